#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "mccr/loss.hpp"
#include "mccr/rng.hpp"

using namespace mccr;

TEST_CASE("correntropy loss closed-form values") {
  const LossSpec spec1{LossFamily::kCorrentropy, 1.0};
  CHECK(loss_value(spec1, 0.0) == 0.0);

  const LossSpec spec2{LossFamily::kCorrentropy, 2.0};
  const double expected = 4.0 * -std::expm1(-1.0);  // 4 (1 - e^{-1})
  CHECK_THAT(loss_value(spec2, 2.0),
             Catch::Matchers::WithinRel(expected, 1e-15));

  // Saturation at sigma^2.
  CHECK_THAT(loss_value(spec1, 1e8), Catch::Matchers::WithinRel(1.0, 1e-12));
  CHECK(loss_value(spec1, 1e8) <= 1.0);
  CHECK(loss_value(spec1, -1e8) <= 1.0);
}

TEST_CASE("huber and squared loss values") {
  CHECK(loss_value({LossFamily::kHuber, 1.0}, 3.0) == 2.5);
  CHECK(loss_value({LossFamily::kHuber, 1.0}, 0.5) == 0.125);
  CHECK(loss_value({LossFamily::kSquared, 1.0}, 3.0) == 9.0);
}

TEST_CASE("loss derivatives") {
  CHECK(loss_derivative({LossFamily::kCorrentropy, 1.0}, 0.0) == 0.0);
  CHECK_THAT(loss_derivative({LossFamily::kCorrentropy, 1.0}, 1.0),
             Catch::Matchers::WithinRel(2.0 * std::exp(-1.0), 1e-15));
  CHECK(loss_derivative({LossFamily::kSquared, 1.0}, 3.0) == 6.0);
  CHECK(loss_derivative({LossFamily::kHuber, 1.0}, 3.0) == 1.0);
  CHECK(loss_derivative({LossFamily::kHuber, 1.0}, -3.0) == -1.0);
}

TEST_CASE("loss weights") {
  for (auto family : {LossFamily::kCorrentropy, LossFamily::kHuber, LossFamily::kSquared}) {
    CHECK(loss_weight({family, 1.0}, 0.0) == 1.0);
  }
  CHECK_THAT(loss_weight({LossFamily::kCorrentropy, 1.0}, 1.0),
             Catch::Matchers::WithinRel(std::exp(-1.0), 1e-15));
  CHECK(loss_weight({LossFamily::kHuber, 1.0}, 4.0) == 0.25);
  CHECK(loss_weight({LossFamily::kHuber, 1.0}, -4.0) == 0.25);
}

TEST_CASE("correntropy is bounded by min(t^2, sigma^2)") {
  SplitMix64 rng(11);
  for (int i = 0; i < 200; ++i) {
    const double sigma = 0.1 + 5.0 * rng.next_uniform();
    const double t = 20.0 * (rng.next_uniform() - 0.5);
    const double v = loss_value({LossFamily::kCorrentropy, sigma}, t);
    CHECK(v >= 0.0);
    CHECK(v <= std::min(t * t, sigma * sigma) * (1.0 + 1e-15));
  }
}

TEST_CASE("correntropy behaves like t^2 near zero") {
  const double t = 1e-4;
  for (double sigma : {0.5, 1.0, 3.0}) {
    const double ratio = loss_value({LossFamily::kCorrentropy, sigma}, t) / (t * t);
    CHECK_THAT(ratio, Catch::Matchers::WithinAbs(1.0, 1e-6));
  }
}

TEST_CASE("derivative matches central finite differences") {
  SplitMix64 rng(17);
  for (int i = 0; i < 100; ++i) {
    const double sigma = 0.2 + 4.0 * rng.next_uniform();
    const double t = 6.0 * sigma * (rng.next_uniform() - 0.5);
    const LossSpec spec{LossFamily::kCorrentropy, sigma};
    const double h = 3e-6 * std::max(1.0, std::abs(t));
    const double fd = (loss_value(spec, t + h) - loss_value(spec, t - h)) / (2.0 * h);
    const double d = loss_derivative(spec, t);
    CHECK_THAT(fd, Catch::Matchers::WithinRel(d, 1e-6) ||
                       Catch::Matchers::WithinAbs(d, 1e-9));
  }
}

TEST_CASE("weight times residual recovers the derivative") {
  SplitMix64 rng(23);
  for (int i = 0; i < 100; ++i) {
    const double r = 10.0 * (rng.next_uniform() - 0.5);
    if (r == 0.0) continue;
    const double sigma = 0.2 + 3.0 * rng.next_uniform();
    // correntropy and squared: weight * 2r = derivative
    for (auto family : {LossFamily::kCorrentropy, LossFamily::kSquared}) {
      const LossSpec spec{family, sigma};
      CHECK_THAT(loss_weight(spec, r) * 2.0 * r,
                 Catch::Matchers::WithinRel(loss_derivative(spec, r), 1e-13));
    }
    // huber, half-quadratic convention: weight * r = derivative
    const LossSpec huber{LossFamily::kHuber, sigma};
    CHECK_THAT(loss_weight(huber, r) * r,
               Catch::Matchers::WithinRel(loss_derivative(huber, r), 1e-13));
  }
}

TEST_CASE("loss is even in the residual") {
  SplitMix64 rng(29);
  for (int i = 0; i < 100; ++i) {
    const double t = 8.0 * (rng.next_uniform() - 0.5);
    const double scale = 0.2 + 2.0 * rng.next_uniform();
    for (auto family : {LossFamily::kCorrentropy, LossFamily::kHuber, LossFamily::kSquared}) {
      const LossSpec spec{family, scale};
      CHECK(loss_value(spec, t) == loss_value(spec, -t));
    }
  }
}

TEST_CASE("non-finite residuals and bad scales are rejected") {
  const LossSpec spec{LossFamily::kCorrentropy, 1.0};
  CHECK_THROWS_WITH(loss_value(spec, std::nan("")), "non-finite residual");
  CHECK_THROWS_WITH(loss_derivative(spec, INFINITY), "non-finite residual");
  CHECK_THROWS_WITH(loss_weight(spec, -INFINITY), "non-finite residual");
  CHECK_THROWS_AS(loss_value({LossFamily::kCorrentropy, 0.0}, 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(loss_value({LossFamily::kHuber, -1.0}, 1.0),
                  std::invalid_argument);
  CHECK_NOTHROW(loss_value({LossFamily::kSquared, 0.0}, 1.0));  // scale unused
}
