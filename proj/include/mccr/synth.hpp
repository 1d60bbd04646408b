#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mccr/dataset.hpp"
#include "mccr/rng.hpp"
#include "mccr/solver.hpp"

namespace mccr {

enum class NoiseFamily { kGaussian, kCauchy, kLaplace };

// One symmetric zero-centered component: parameter is the standard deviation
// for gaussian, the scale for cauchy and laplace.
struct NoiseComponent {
  NoiseFamily family = NoiseFamily::kGaussian;
  double parameter = 1.0;
};

struct NoiseMixture {
  std::vector<NoiseComponent> components;
  std::vector<double> weights;
};

inline void validate(const NoiseMixture& mixture) {
  if (mixture.components.empty() ||
      mixture.components.size() != mixture.weights.size()) {
    throw std::invalid_argument("noise mixture: components/weights mismatch");
  }
  double sum = 0.0;
  for (double w : mixture.weights) {
    if (!(w > 0.0)) throw std::invalid_argument("noise mixture: weights must be positive");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-12) {
    throw std::invalid_argument("noise mixture: weights must sum to 1");
  }
  for (const auto& c : mixture.components) {
    if (!(std::isfinite(c.parameter) && c.parameter > 0.0)) {
      throw std::invalid_argument("noise mixture: component parameter must be positive");
    }
  }
}

enum class ExampleId { kEx1, kEx2, kEx3 };

struct SyntheticSpec {
  ExampleId example = ExampleId::kEx1;
  int n = 200;
  std::uint64_t seed = 0;
};

inline std::pair<double, double> covariate_domain(ExampleId example) {
  switch (example) {
    case ExampleId::kEx1:
    case ExampleId::kEx2:
      return {0.0, 1.0};
    case ExampleId::kEx3:
      return {-10.0, 10.0};
  }
  throw std::logic_error("unreachable example id");
}

// The three benchmark regression functions:
//   ex1: exp(-7.5 x) cos(10 pi x)            on [0, 1]
//   ex2: -1 + 1.5 x + 0.2 phi(x - 0.6)       on [0, 1], phi = pdf of N(0, 0.04^2)
//   ex3: sin(x)/x (1 at x = 0)               on [-10, 10]
inline double true_function(ExampleId example, double x) {
  constexpr double kPi = 3.14159265358979323846;
  switch (example) {
    case ExampleId::kEx1:
      return std::exp(-7.5 * x) * std::cos(10.0 * kPi * x);
    case ExampleId::kEx2: {
      const double s = 0.04;
      const double t = x - 0.6;
      const double phi = std::exp(-t * t / (2.0 * s * s)) / (s * std::sqrt(2.0 * kPi));
      return -1.0 + 1.5 * x + 0.2 * phi;
    }
    case ExampleId::kEx3:
      return x == 0.0 ? 1.0 : std::sin(x) / x;
  }
  throw std::logic_error("unreachable example id");
}

// Error mixtures of the three examples; the second component generates the
// outliers in each case.
inline NoiseMixture example_mixture(ExampleId example) {
  switch (example) {
    case ExampleId::kEx1:
      return {{{NoiseFamily::kGaussian, 0.1}, {NoiseFamily::kGaussian, 0.5}},
              {0.8, 0.2}};
    case ExampleId::kEx2:
      return {{{NoiseFamily::kGaussian, 0.1}, {NoiseFamily::kGaussian, 1.0}},
              {0.8, 0.2}};
    case ExampleId::kEx3:
      return {{{NoiseFamily::kGaussian, 0.1}, {NoiseFamily::kCauchy, 0.2}},
              {0.8, 0.2}};
  }
  throw std::logic_error("unreachable example id");
}

namespace detail {

inline double sample_component(const NoiseComponent& c, SplitMix64& rng) {
  switch (c.family) {
    case NoiseFamily::kGaussian:
      return c.parameter * rng.next_normal();
    case NoiseFamily::kCauchy:
      return c.parameter *
             std::tan(3.14159265358979323846 * (rng.next_uniform() - 0.5));
    case NoiseFamily::kLaplace: {
      const double u = rng.next_uniform();
      return u < 0.5 ? c.parameter * std::log(2.0 * u)
                     : -c.parameter * std::log(2.0 * (1.0 - u));
    }
  }
  throw std::logic_error("unreachable noise family");
}

}  // namespace detail

// Draws n values from the mixture: pick a component by its weight, then draw
// from it. A single-component mixture skips the selection draw, so it
// produces the same stream as sampling that component directly.
inline Eigen::VectorXd sample_noise_labeled(const NoiseMixture& mixture, int n,
                                            SplitMix64& rng,
                                            std::vector<int>* labels) {
  validate(mixture);
  if (n < 0) throw std::invalid_argument("sample_noise: negative count");
  Eigen::VectorXd out(n);
  if (labels) labels->assign(static_cast<std::size_t>(n), 0);
  const std::size_t k = mixture.components.size();
  for (int i = 0; i < n; ++i) {
    std::size_t pick = 0;
    if (k > 1) {
      const double u = rng.next_uniform();
      double acc = 0.0;
      pick = k - 1;
      for (std::size_t j = 0; j + 1 < k; ++j) {
        acc += mixture.weights[j];
        if (u < acc) {
          pick = j;
          break;
        }
      }
    }
    out[i] = detail::sample_component(mixture.components[pick], rng);
    if (labels) (*labels)[static_cast<std::size_t>(i)] = static_cast<int>(pick);
  }
  return out;
}

inline Eigen::VectorXd sample_noise(const NoiseMixture& mixture, int n,
                                    SplitMix64& rng) {
  return sample_noise_labeled(mixture, n, rng, nullptr);
}

struct LabeledDataset {
  Dataset data;
  std::vector<int> noise_component;  // index of the generating component
};

// x_i iid uniform on the example's domain (all drawn first), then
// y_i = f*(x_i) + eps_i with the example's mixture.
inline LabeledDataset generate_example_labeled(const SyntheticSpec& spec) {
  if (spec.n < 1) throw std::invalid_argument("generate_example: n must be >= 1");
  SplitMix64 rng(spec.seed);
  const auto [lo, hi] = covariate_domain(spec.example);
  LabeledDataset out;
  out.data.xs.resize(spec.n, 1);
  out.data.ys.resize(spec.n);
  for (int i = 0; i < spec.n; ++i) {
    out.data.xs(i, 0) = lo + (hi - lo) * rng.next_uniform();
  }
  const Eigen::VectorXd noise = sample_noise_labeled(
      example_mixture(spec.example), spec.n, rng, &out.noise_component);
  for (int i = 0; i < spec.n; ++i) {
    out.data.ys[i] = true_function(spec.example, out.data.xs(i, 0)) + noise[i];
  }
  return out;
}

inline Dataset generate_example(const SyntheticSpec& spec) {
  return generate_example_labeled(spec).data;
}

// Mean of (predictor(x_j) - f*(x_j))^2 over grid_size equally spaced points
// spanning the example's domain, endpoints included.
inline double mse_to_truth(const std::function<double(double)>& predictor,
                           ExampleId example, int grid_size = 1001) {
  if (grid_size < 2) throw std::invalid_argument("mse_to_truth: grid_size must be >= 2");
  const auto [lo, hi] = covariate_domain(example);
  double acc = 0.0;
  for (int j = 0; j < grid_size; ++j) {
    const double x = lo + (hi - lo) * static_cast<double>(j) /
                              static_cast<double>(grid_size - 1);
    const double diff = predictor(x) - true_function(example, x);
    acc += diff * diff;
  }
  return acc / static_cast<double>(grid_size);
}

inline double mse_to_truth(const FittedModel& model, ExampleId example,
                           int grid_size = 1001) {
  Eigen::VectorXd x(1);
  return mse_to_truth(
      [&](double v) {
        x[0] = v;
        return predict(model, x);
      },
      example, grid_size);
}

// Mean and sample standard deviation (n-1 denominator) over replications.
inline std::pair<double, double> summarize_replications(
    const std::vector<double>& values) {
  if (values.size() < 2) {
    throw std::invalid_argument("summarize_replications: need at least 2 values");
  }
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
  return {mean, sd};
}

// Renders "mean(sd)" with a fixed decimal count, e.g. "0.0014(0.0006)".
inline std::string format_mean_sd(double mean, double sd, int decimals = 4) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f(%.*f)", decimals, mean, decimals, sd);
  return buf;
}

}  // namespace mccr
