#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <cmath>
#include <numeric>

#include "mccr/rng.hpp"
#include "mccr/solver.hpp"
#include "mccr/synth.hpp"
#include "oracles.hpp"

using namespace mccr;

namespace {

Dataset random_dataset(int n, int d, SplitMix64& rng, double noise = 0.1) {
  Dataset data;
  data.xs.resize(n, d);
  data.ys.resize(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) data.xs(i, j) = 2.0 * rng.next_uniform() - 1.0;
    data.ys[i] = std::sin(3.0 * data.xs(i, 0)) + noise * rng.next_normal();
  }
  return data;
}

// Objective of the weighted step, evaluated from its definition.
double weighted_objective(const Eigen::MatrixXd& gram, const Eigen::VectorXd& ys,
                          const Eigen::VectorXd& weights, double lambda,
                          const Eigen::VectorXd& alphas, double intercept) {
  const Eigen::Index n = ys.size();
  const Eigen::VectorXd resid =
      ys - gram * alphas - Eigen::VectorXd::Constant(n, intercept);
  return weights.cwiseProduct(resid).dot(resid) / static_cast<double>(n) +
         lambda * alphas.dot(gram * alphas);
}

}  // namespace

TEST_CASE("constant responses give a pure intercept") {
  SplitMix64 rng(3);
  Dataset data = random_dataset(10, 1, rng);
  data.ys.setConstant(2.5);
  const Eigen::MatrixXd gram = gram_matrix({0.7}, data.xs);
  Eigen::VectorXd weights(10);
  for (int i = 0; i < 10; ++i) weights[i] = 0.2 + rng.next_uniform();
  const auto sol = solve_weighted_krr(gram, data.ys, weights, 1e-3);
  CHECK_THAT(sol.intercept, Catch::Matchers::WithinAbs(2.5, 1e-12));
  CHECK(sol.alphas.cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("single point is absorbed by the intercept") {
  Eigen::MatrixXd gram(1, 1);
  gram << 1.0;
  Eigen::VectorXd ys(1), weights(1);
  ys << 3.0;
  weights << 1.0;
  const auto sol = solve_weighted_krr(gram, ys, weights, 0.5);
  CHECK_THAT(sol.intercept, Catch::Matchers::WithinAbs(3.0, 1e-12));
  CHECK_THAT(sol.alphas[0], Catch::Matchers::WithinAbs(0.0, 1e-12));
}

TEST_CASE("weighted solve matches the quadratic-minimization oracle on n <= 5") {
  SplitMix64 rng(101);
  for (int trial = 0; trial < 8; ++trial) {
    const int n = 2 + static_cast<int>(rng.next_below(4));
    Dataset data = random_dataset(n, 1, rng);
    const Eigen::MatrixXd gram = gram_matrix({0.9}, data.xs);
    Eigen::VectorXd weights = Eigen::VectorXd::Ones(n);
    if (trial % 2 == 1) {
      for (int i = 0; i < n; ++i) weights[i] = 0.1 + rng.next_uniform();
    }
    const double lambda = 0.01 + 0.2 * rng.next_uniform();

    const auto sol = solve_weighted_krr(gram, data.ys, weights, lambda);

    // Oracle: black-box quadratic minimization over (alphas, intercept).
    const auto objective = [&](const Eigen::VectorXd& v) {
      return weighted_objective(gram, data.ys, weights, lambda, v.head(n), v[n]);
    };
    const Eigen::VectorXd best = oracles::minimize_quadratic(objective, n + 1);
    for (int i = 0; i < n; ++i) {
      CHECK_THAT(sol.alphas[i], Catch::Matchers::WithinAbs(best[i], 1e-8));
    }
    CHECK_THAT(sol.intercept, Catch::Matchers::WithinAbs(best[n], 1e-8));
  }
}

TEST_CASE("zero-weight points get zero coefficients") {
  SplitMix64 rng(55);
  Dataset data = random_dataset(8, 1, rng);
  const Eigen::MatrixXd gram = gram_matrix({0.5}, data.xs);
  Eigen::VectorXd weights = Eigen::VectorXd::Ones(8);
  weights[2] = 0.0;
  weights[5] = 0.0;
  const auto sol = solve_weighted_krr(gram, data.ys, weights, 1e-2);
  CHECK(sol.alphas[2] == 0.0);
  CHECK(sol.alphas[5] == 0.0);
}

TEST_CASE("all-zero weights are rejected") {
  Eigen::MatrixXd gram(2, 2);
  gram << 1.0, 0.5, 0.5, 1.0;
  Eigen::VectorXd ys(2), weights(2);
  ys << 1.0, 2.0;
  weights << 0.0, 0.0;
  CHECK_THROWS_AS(solve_weighted_krr(gram, ys, weights, 1e-3), std::invalid_argument);
}

TEST_CASE("squared-loss fit equals the one-shot ridge solve") {
  SplitMix64 rng(77);
  const Dataset data = random_dataset(25, 1, rng);
  FitConfig config;
  config.loss = {LossFamily::kSquared, 1.0};
  config.kernel = {0.6};
  config.lambda = 1e-3;
  const FittedModel model = fit(data, config);
  CHECK(model.converged);
  CHECK(model.iters_used == 1);

  const Eigen::MatrixXd gram = gram_matrix(config.kernel, data.xs);
  const auto direct = solve_weighted_krr(gram, data.ys,
                                         Eigen::VectorXd::Ones(data.size()),
                                         config.lambda);
  CHECK((model.alphas - direct.alphas).cwiseAbs().maxCoeff() <= 1e-10);
  CHECK(std::abs(model.intercept - direct.intercept) <= 1e-10);
}

TEST_CASE("large-sigma correntropy approaches the squared-loss fit") {
  SplitMix64 rng(91);
  const Dataset data = random_dataset(30, 1, rng);
  FitConfig squared;
  squared.loss = {LossFamily::kSquared, 1.0};
  squared.kernel = {0.5};
  squared.lambda = 1e-3;
  const FittedModel ls = fit(data, squared);

  FitConfig corr = squared;
  corr.loss = {LossFamily::kCorrentropy, 1e3};
  const FittedModel mc = fit(data, corr);

  CHECK((ls.alphas - mc.alphas).cwiseAbs().maxCoeff() < 1e-4);
  CHECK(std::abs(ls.intercept - mc.intercept) < 1e-4);
}

TEST_CASE("noiseless constant data is interpolated through the intercept") {
  Dataset data;
  data.xs = Eigen::MatrixXd::Random(12, 1);
  data.ys = Eigen::VectorXd::Constant(12, 0.75);
  FitConfig config;
  config.loss = {LossFamily::kCorrentropy, 0.5};
  config.kernel = {0.4};
  config.lambda = 1e-6;
  const FittedModel model = fit(data, config);
  const Eigen::VectorXd pred = predict(model, data.xs);
  CHECK((pred.array() - 0.75).abs().maxCoeff() < 1e-4);
}

TEST_CASE("IRLS objective is non-increasing for correntropy") {
  SplitMix64 rng(123);
  for (int trial = 0; trial < 20; ++trial) {
    Dataset data = random_dataset(15 + static_cast<int>(rng.next_below(25)), 1, rng, 0.3);
    FitConfig config;
    config.loss = {LossFamily::kCorrentropy, 0.1 + rng.next_uniform()};
    config.kernel = {0.2 + rng.next_uniform()};
    config.lambda = std::pow(10.0, -1.0 - 4.0 * rng.next_uniform());
    FitDiagnostics diag;
    fit(data, config, &diag);
    REQUIRE(diag.objective_trace.size() >= 2);
    for (std::size_t i = 1; i < diag.objective_trace.size(); ++i) {
      CHECK(diag.objective_trace[i] <= diag.objective_trace[i - 1] + 1e-10);
    }
  }
}

TEST_CASE("permuting training points permutes alphas and preserves predictions") {
  SplitMix64 rng(131);
  const int n = 20;
  const Dataset data = random_dataset(n, 1, rng);
  FitConfig config;
  config.loss = {LossFamily::kCorrentropy, 0.4};
  config.kernel = {0.5};
  config.lambda = 1e-4;
  const FittedModel base = fit(data, config);

  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  for (int i = n - 1; i > 0; --i) {
    std::swap(perm[static_cast<std::size_t>(i)],
              perm[rng.next_below(static_cast<std::uint64_t>(i) + 1)]);
  }
  Dataset shuffled;
  shuffled.xs.resize(n, 1);
  shuffled.ys.resize(n);
  for (int i = 0; i < n; ++i) {
    shuffled.xs.row(i) = data.xs.row(perm[static_cast<std::size_t>(i)]);
    shuffled.ys[i] = data.ys[perm[static_cast<std::size_t>(i)]];
  }
  const FittedModel permuted = fit(shuffled, config);
  for (int i = 0; i < n; ++i) {
    CHECK_THAT(permuted.alphas[i],
               Catch::Matchers::WithinAbs(base.alphas[perm[static_cast<std::size_t>(i)]], 1e-10));
  }
  Eigen::VectorXd probe(1);
  for (double x : {-0.9, -0.3, 0.2, 0.8}) {
    probe[0] = x;
    CHECK_THAT(predict(permuted, probe),
               Catch::Matchers::WithinAbs(predict(base, probe), 1e-10));
  }
}

TEST_CASE("adding a constant to responses shifts only the intercept") {
  SplitMix64 rng(137);
  const Dataset data = random_dataset(18, 1, rng);
  const double shift = 3.7;
  Dataset shifted = data;
  shifted.ys.array() += shift;

  for (auto family : {LossFamily::kSquared, LossFamily::kCorrentropy, LossFamily::kHuber}) {
    FitConfig config;
    config.loss = {family, 0.5};
    config.kernel = {0.5};
    config.lambda = 1e-4;
    config.tol = 1e-10;  // drive both runs to the fixed point
    config.max_iters = 500;
    const FittedModel base = fit(data, config);
    const FittedModel moved = fit(shifted, config);
    if (family == LossFamily::kSquared) {
      CHECK((base.alphas - moved.alphas).cwiseAbs().maxCoeff() < 1e-8);
      CHECK_THAT(moved.intercept - base.intercept,
                 Catch::Matchers::WithinAbs(shift, 1e-8));
    }
    Eigen::VectorXd probe(1);
    for (double x : {-0.7, 0.0, 0.5}) {
      probe[0] = x;
      CHECK_THAT(predict(moved, probe),
                 Catch::Matchers::WithinAbs(predict(base, probe) + shift, 1e-6));
    }
  }
}

TEST_CASE("fit is bit-identical across repeated runs") {
  SplitMix64 rng(149);
  const Dataset data = random_dataset(22, 2, rng);
  FitConfig config;
  config.loss = {LossFamily::kCorrentropy, 0.3};
  config.kernel = {0.8};
  config.lambda = 1e-3;
  const FittedModel a = fit(data, config);
  const FittedModel b = fit(data, config);
  REQUIRE(a.alphas.size() == b.alphas.size());
  for (Eigen::Index i = 0; i < a.alphas.size(); ++i) {
    CHECK(a.alphas[i] == b.alphas[i]);
  }
  CHECK(a.intercept == b.intercept);
  CHECK(a.iters_used == b.iters_used);
}

TEST_CASE("model predictions replay the final IRLS residuals") {
  const Dataset data = generate_example({ExampleId::kEx1, 60, 404});
  FitConfig config;
  config.loss = {LossFamily::kCorrentropy, 0.3};
  config.kernel = {0.1};
  config.lambda = 1e-4;
  FitDiagnostics diag;
  const FittedModel model = fit(data, config, &diag);
  REQUIRE(diag.last_residuals.size() == data.size());
  const Eigen::VectorXd replay = data.ys - predict(model, data.xs);
  CHECK((replay - diag.last_residuals).cwiseAbs().maxCoeff() < config.tol);
}

TEST_CASE("vanishing weights keep the previous iterate and flag non-convergence") {
  Dataset data;
  data.xs = Eigen::MatrixXd::Random(6, 1);
  data.ys = Eigen::VectorXd::Constant(6, 5.0);  // residuals >> sigma at start
  FitConfig config;
  config.loss = {LossFamily::kCorrentropy, 1e-8};
  config.kernel = {0.5};
  config.lambda = 1e-4;
  const FittedModel model = fit(data, config);
  CHECK_FALSE(model.converged);
  CHECK(model.iters_used == 0);  // never managed a solve
  CHECK(model.alphas.cwiseAbs().maxCoeff() == 0.0);
  CHECK(model.intercept == 0.0);
}

TEST_CASE("prediction validates dimensions") {
  SplitMix64 rng(61);
  const Dataset data = random_dataset(5, 2, rng);
  FitConfig config;
  config.loss = {LossFamily::kSquared, 1.0};
  config.kernel = {1.0};
  config.lambda = 1e-2;
  const FittedModel model = fit(data, config);
  Eigen::VectorXd bad(3);
  bad.setZero();
  CHECK_THROWS_AS(predict(model, bad), std::invalid_argument);
}

TEST_CASE("empty datasets are rejected") {
  Dataset data;
  data.xs.resize(0, 1);
  data.ys.resize(0);
  FitConfig config;
  config.loss = {LossFamily::kSquared, 1.0};
  config.kernel = {1.0};
  CHECK_THROWS_AS(fit(data, config), std::invalid_argument);
}
