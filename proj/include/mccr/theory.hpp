#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mccr/modelsel.hpp"
#include "mccr/parallel.hpp"
#include "mccr/quadrature.hpp"
#include "mccr/rng.hpp"
#include "mccr/synth.hpp"

namespace mccr {

// ---------------------------------------------------------------------------
// Fourier lower-bound certificates
// ---------------------------------------------------------------------------

// Certificate that a noise component's Fourier transform (convention
// p_hat(xi) = integral p(t) exp(-i xi t) dt) is at least C0 on [-c0, c0].
struct FourierLowerBound {
  double c0 = 1.0;
  double C0 = 0.5;
};

// Transform values of the supported families; all are positive and
// decreasing in |xi|, so the minimum over [-c0, c0] sits at the endpoint.
//   gaussian sd s:  exp(-s^2 xi^2 / 2)
//   cauchy scale g: exp(-g |xi|)
//   laplace scale b: 1 / (1 + b^2 xi^2)
inline double fourier_transform(const NoiseComponent& c, double xi) {
  switch (c.family) {
    case NoiseFamily::kGaussian:
      return std::exp(-0.5 * c.parameter * c.parameter * xi * xi);
    case NoiseFamily::kCauchy:
      return std::exp(-c.parameter * std::abs(xi));
    case NoiseFamily::kLaplace:
      return 1.0 / (1.0 + c.parameter * c.parameter * xi * xi);
  }
  throw std::logic_error("unreachable noise family");
}

// Tightest valid certificate on the default window c0 = min(1, pi/(2M)).
inline std::vector<FourierLowerBound> certified_bounds(const NoiseMixture& mixture,
                                                       double M) {
  validate(mixture);
  if (!(M > 0.0)) throw std::invalid_argument("certified_bounds: M must be positive");
  const double c0 = std::min(1.0, 3.14159265358979323846 / (2.0 * M));
  std::vector<FourierLowerBound> bounds;
  bounds.reserve(mixture.components.size());
  for (const auto& c : mixture.components) {
    bounds.push_back({c0, fourier_transform(c, c0)});
  }
  return bounds;
}

// ---------------------------------------------------------------------------
// Configuration and report types
// ---------------------------------------------------------------------------

struct NoiseQuadratureSpec {
  int covariate_nodes = 201;
  int noise_panels = 64;        // 16-point panels per component
  double cauchy_truncation = 0.0;  // multiples of the scale; 0 refuses cauchy
};

struct TheoryConfig {
  double sigma = 1.0;
  double M = 1.0;  // sup-norm bound: ||f||_inf, ||f*||_inf <= M
  NoiseMixture mixture;
  std::vector<FourierLowerBound> bounds;  // one per component
  NoiseQuadratureSpec quadrature;
  std::pair<double, double> x_domain{0.0, 1.0};
};

inline void validate(const TheoryConfig& config) {
  validate(config.mixture);
  if (!(std::isfinite(config.sigma) && config.sigma > 0.0)) {
    throw std::invalid_argument("theory config: sigma must be positive");
  }
  if (!(std::isfinite(config.M) && config.M > 0.0)) {
    throw std::invalid_argument("theory config: M must be positive");
  }
  if (config.bounds.size() != config.mixture.components.size()) {
    throw std::invalid_argument("theory config: one Fourier bound per component required");
  }
  for (const auto& b : config.bounds) {
    if (!(b.c0 > 0.0) || !(b.C0 > 0.0) || b.C0 > 1.0) {
      throw std::invalid_argument("theory config: need c0 > 0 and C0 in (0, 1]");
    }
  }
  if (!(config.x_domain.second > config.x_domain.first)) {
    throw std::invalid_argument("theory config: empty covariate domain");
  }
}

struct TheoryReport {
  double c_sigma = 0.0;
  double lower = 0.0;  // c_sigma * d2
  double gap = 0.0;    // excess risk of f over f*
  double upper = 0.0;  // d2
  double d2 = 0.0;     // squared L2(rho_X) distance
  bool sandwich_holds = false;
  std::string tail_note;  // set when a cauchy component was truncated
};

// ---------------------------------------------------------------------------
// c_sigma of the sandwich lower bound
// ---------------------------------------------------------------------------

namespace detail {

// I(a, c) = integral_{-c}^{c} xi^2 exp(-a xi^2) dxi. The closed form
//   -c exp(-a c^2)/a + sqrt(pi)/(2 a^{3/2}) erf(c sqrt(a))
// cancels badly for small a c^2, where the series
//   2 sum_k (-a)^k c^{2k+3} / (k! (2k+3))
// converges in a few terms instead.
inline double gaussian_second_moment_integral(double a, double c) {
  const double ac2 = a * c * c;
  if (ac2 < 0.25) {
    double term = 2.0 * c * c * c;  // k = 0 numerator base: 2 c^{2k+3} (-a)^k / k!
    double sum = term / 3.0;
    for (int k = 1; k < 40; ++k) {
      term *= -a * c * c / static_cast<double>(k);
      const double add = term / static_cast<double>(2 * k + 3);
      sum += add;
      if (std::abs(add) < 1e-18 * std::abs(sum)) break;
    }
    return sum;
  }
  const double sa = std::sqrt(a);
  return -c * std::exp(-ac2) / a +
         std::sqrt(3.14159265358979323846) / (2.0 * a * sa) * std::erf(c * sa);
}

}  // namespace detail

// c_sigma = sigma^3 / pi^{5/2} * sum_i w_i C0_i * I(sigma^2/4, c') with
// c' = min{c0_1, ..., c0_K, pi/(2M)}.
inline double compute_c_sigma(const TheoryConfig& config) {
  validate(config);
  constexpr double kPi = 3.14159265358979323846;
  double c_prime = kPi / (2.0 * config.M);
  for (const auto& b : config.bounds) c_prime = std::min(c_prime, b.c0);
  const double a = 0.25 * config.sigma * config.sigma;
  const double integral = detail::gaussian_second_moment_integral(a, c_prime);
  double weighted = 0.0;
  for (std::size_t i = 0; i < config.bounds.size(); ++i) {
    weighted += config.mixture.weights[i] * config.bounds[i].C0;
  }
  return config.sigma * config.sigma * config.sigma / std::pow(kPi, 2.5) *
         weighted * integral;
}

// ---------------------------------------------------------------------------
// Excess risk gap by tensor quadrature
// ---------------------------------------------------------------------------

namespace detail {

inline double noise_density(const NoiseComponent& c, double t) {
  constexpr double kPi = 3.14159265358979323846;
  switch (c.family) {
    case NoiseFamily::kGaussian: {
      const double s = c.parameter;
      return std::exp(-t * t / (2.0 * s * s)) / (s * std::sqrt(2.0 * kPi));
    }
    case NoiseFamily::kCauchy: {
      const double g = c.parameter;
      return g / (kPi * (t * t + g * g));
    }
    case NoiseFamily::kLaplace: {
      const double b = c.parameter;
      return std::exp(-std::abs(t) / b) / (2.0 * b);
    }
  }
  throw std::logic_error("unreachable noise family");
}

// Truncation range holding all but ~1e-12 of the component's mass (cauchy
// requires an explicit truncation multiple and reports the cut tail).
inline double component_range(const NoiseComponent& c,
                              const NoiseQuadratureSpec& quad,
                              std::string* tail_note) {
  constexpr double kPi = 3.14159265358979323846;
  switch (c.family) {
    case NoiseFamily::kGaussian:
      return 8.0 * c.parameter;
    case NoiseFamily::kLaplace:
      return 30.0 * c.parameter;
    case NoiseFamily::kCauchy: {
      if (!(quad.cauchy_truncation > 0.0)) {
        throw std::invalid_argument(
            "cauchy component requires explicit truncation settings");
      }
      const double range = c.parameter * quad.cauchy_truncation;
      if (tail_note) {
        const double tail = 1.0 - 2.0 / kPi * std::atan(quad.cauchy_truncation);
        char buf[128];
        std::snprintf(buf, sizeof(buf),
                      "cauchy truncated at %.3g (tail mass %.3g)", range, tail);
        *tail_note = buf;
      }
      return range;
    }
  }
  throw std::logic_error("unreachable noise family");
}

// Flattened noise rule: nodes t_k with weights w_k = gl_weight * mixture
// weight * density, plus the precomputed gaussian factor exp(-t_k^2/sigma^2).
struct NoiseRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  std::vector<double> gauss;  // exp(-t^2 / sigma^2)
  std::string tail_note;
};

inline NoiseRule build_noise_rule(const NoiseMixture& mixture, double sigma,
                                  double max_abs_delta,
                                  const NoiseQuadratureSpec& quad) {
  if (quad.covariate_nodes < 16 || quad.noise_panels * 16 < 16) {
    throw std::invalid_argument("insufficient resolution");
  }
  NoiseRule rule;
  const auto& gl = GaussLegendre16::instance();
  // The integrand difference l(t - delta) - l(t) vanishes at gaussian rate
  // beyond |t| > 30 sigma + |delta|, so the range can be clipped there.
  const double support = 30.0 * sigma + max_abs_delta + 1.0;
  for (std::size_t i = 0; i < mixture.components.size(); ++i) {
    std::string note;
    const double mass_range =
        component_range(mixture.components[i], quad, &note);
    if (!note.empty()) rule.tail_note = note;
    const double range = std::min(mass_range, support);
    const double width = 2.0 * range / quad.noise_panels;
    for (int p = 0; p < quad.noise_panels; ++p) {
      const double mid = -range + (p + 0.5) * width;
      const double half = 0.5 * width;
      for (std::size_t k = 0; k < 16; ++k) {
        const double t = mid + half * gl.nodes[k];
        const double w = half * gl.weights[k] * mixture.weights[i] *
                         noise_density(mixture.components[i], t);
        rule.nodes.push_back(t);
        rule.weights.push_back(w);
        rule.gauss.push_back(std::exp(-t * t / (sigma * sigma)));
      }
    }
  }
  return rule;
}

// E_eps[ l_sigma(eps - delta) - l_sigma(eps) ] under the truncated rule.
// The integrand is exp(-t^2/s^2) - exp(-(t-delta)^2/s^2). Where the two
// exponentials nearly cancel it is written via expm1 of their log ratio;
// elsewhere the direct difference is safe (and immune to the 0 * inf that a
// blanket expm1 form would hit at far-out nodes).
inline double gap_at_delta(const NoiseRule& rule, double sigma, double delta) {
  if (delta == 0.0) return 0.0;
  const double inv_s2 = 1.0 / (sigma * sigma);
  double acc = 0.0;
  for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
    const double t = rule.nodes[k];
    const double d = (2.0 * t * delta - delta * delta) * inv_s2;
    double diff;
    if (std::abs(d) < 1.0) {
      diff = -rule.gauss[k] * std::expm1(d);
    } else {
      const double shifted = t - delta;
      diff = rule.gauss[k] - std::exp(-shifted * shifted * inv_s2);
    }
    acc += rule.weights[k] * diff;
  }
  return acc / inv_s2;
}

struct GapAndDistance {
  double gap = 0.0;
  double d2 = 0.0;
  std::string tail_note;
};

// Shared covariate rule: midpoints of `covariate_nodes` equal slices, uniform
// rho_X by default or weights proportional to x_density at the nodes. Using
// one rule for both gap and d2 keeps the sandwich comparison exact in x.
inline GapAndDistance gap_and_distance(
    const std::function<double(double)>& f,
    const std::function<double(double)>& f_star, double sigma,
    const NoiseMixture& mixture, std::pair<double, double> x_domain,
    const NoiseQuadratureSpec& quad,
    const std::function<double(double)>* x_density = nullptr) {
  validate(mixture);
  const int nx = quad.covariate_nodes;
  if (nx < 16) throw std::invalid_argument("insufficient resolution");
  const auto [lo, hi] = x_domain;

  std::vector<double> deltas(static_cast<std::size_t>(nx));
  std::vector<double> xw(static_cast<std::size_t>(nx));
  double wsum = 0.0;
  double max_abs_delta = 0.0;
  for (int j = 0; j < nx; ++j) {
    const double x = lo + (hi - lo) * (j + 0.5) / nx;
    deltas[static_cast<std::size_t>(j)] = f(x) - f_star(x);
    max_abs_delta = std::max(max_abs_delta, std::abs(deltas[static_cast<std::size_t>(j)]));
    const double w = x_density ? (*x_density)(x) : 1.0;
    if (!(w >= 0.0)) throw std::invalid_argument("x density must be nonnegative");
    xw[static_cast<std::size_t>(j)] = w;
    wsum += w;
  }
  if (!(wsum > 0.0)) throw std::invalid_argument("x density integrates to zero");

  const NoiseRule rule = build_noise_rule(mixture, sigma, max_abs_delta, quad);
  GapAndDistance out;
  out.tail_note = rule.tail_note;
  for (int j = 0; j < nx; ++j) {
    const double w = xw[static_cast<std::size_t>(j)] / wsum;
    const double d = deltas[static_cast<std::size_t>(j)];
    out.gap += w * gap_at_delta(rule, sigma, d);
    out.d2 += w * d * d;
  }
  return out;
}

}  // namespace detail

// epsilon^sigma(f) - epsilon^sigma(f*) for 1-d covariates distributed by
// x_density (uniform when absent) on x_domain.
inline double excess_risk_gap(
    const std::function<double(double)>& f,
    const std::function<double(double)>& f_star, double sigma,
    const NoiseMixture& mixture, std::pair<double, double> x_domain,
    const NoiseQuadratureSpec& quadrature,
    const std::function<double(double)>* x_density = nullptr) {
  if (!(sigma > 0.0)) throw std::invalid_argument("sigma must be positive");
  return detail::gap_and_distance(f, f_star, sigma, mixture, x_domain,
                                  quadrature, x_density)
      .gap;
}

// Checks c_sigma * d2 <= gap <= d2 with tolerance 1e-8 * max(1, d2).
// Throws if a supplied certificate overstates the transform minimum on its
// window, or if f/f* break the sup-norm bound M that c' relies on.
inline TheoryReport verify_sandwich(const TheoryConfig& config,
                                    const std::function<double(double)>& f,
                                    const std::function<double(double)>& f_star) {
  validate(config);
  for (std::size_t i = 0; i < config.bounds.size(); ++i) {
    const double minimum =
        fourier_transform(config.mixture.components[i], config.bounds[i].c0);
    if (config.bounds[i].C0 > minimum * (1.0 + 1e-12)) {
      throw std::runtime_error("bound certificate violated");
    }
  }
  const auto [lo, hi] = config.x_domain;
  for (int j = 0; j < config.quadrature.covariate_nodes; ++j) {
    const double x = lo + (hi - lo) * (j + 0.5) / config.quadrature.covariate_nodes;
    if (std::abs(f(x)) > config.M * (1.0 + 1e-12) ||
        std::abs(f_star(x)) > config.M * (1.0 + 1e-12)) {
      throw std::runtime_error("bound certificate violated: sup norm exceeds M");
    }
  }

  const auto gd = detail::gap_and_distance(f, f_star, config.sigma,
                                           config.mixture, config.x_domain,
                                           config.quadrature);
  TheoryReport report;
  report.c_sigma = compute_c_sigma(config);
  report.gap = gd.gap;
  report.d2 = gd.d2;
  report.lower = report.c_sigma * gd.d2;
  report.upper = gd.d2;
  report.tail_note = gd.tail_note;
  const double tol = 1e-8 * std::max(1.0, gd.d2);
  report.sandwich_holds =
      report.lower <= report.gap + tol && report.gap <= report.upper + tol;
  return report;
}

// ---------------------------------------------------------------------------
// Bundled certified suite
// ---------------------------------------------------------------------------

struct SandwichCase {
  TheoryConfig config;
  std::function<double(double)> f;
  std::function<double(double)> f_star;
  std::string label;
};

namespace detail {

// Random trigonometric polynomial rescaled to a prescribed sup norm.
inline std::function<double(double)> random_smooth_function(SplitMix64& rng,
                                                            double sup_target) {
  constexpr int kTerms = 4;
  std::vector<double> a(kTerms), b(kTerms);
  for (int k = 0; k < kTerms; ++k) {
    a[static_cast<std::size_t>(k)] = 2.0 * rng.next_uniform() - 1.0;
    b[static_cast<std::size_t>(k)] = 2.0 * rng.next_uniform() - 1.0;
  }
  auto raw = [a, b](double x) {
    constexpr double kTwoPi = 2.0 * 3.14159265358979323846;
    double acc = 0.0;
    for (int k = 0; k < kTerms; ++k) {
      acc += a[static_cast<std::size_t>(k)] * std::sin(kTwoPi * (k + 1) * x) +
             b[static_cast<std::size_t>(k)] * std::cos(kTwoPi * (k + 1) * x);
    }
    return acc;
  };
  double sup = 0.0;
  for (int j = 0; j <= 2048; ++j) {
    sup = std::max(sup, std::abs(raw(j / 2048.0)));
  }
  const double scale = sup > 0.0 ? sup_target / sup : 0.0;
  return [raw, scale](double x) { return scale * raw(x); };
}

}  // namespace detail

// Gaussian and gaussian-mixture noise, sigma in {0.05, 0.1, 0.3, 0.5, 1, 5},
// `deltas_per_sigma` random function pairs with ||f||, ||f*|| <= M = 1.
// All certificates come from the exact transform values, so every case must
// report sandwich_holds = true.
inline std::vector<SandwichCase> certified_suite(std::uint64_t seed,
                                                 int deltas_per_sigma = 100) {
  const std::vector<double> sigmas = {0.05, 0.1, 0.3, 0.5, 1.0, 5.0};
  const std::vector<std::pair<std::string, NoiseMixture>> noises = {
      {"gaussian(0.1)", {{{NoiseFamily::kGaussian, 0.1}}, {1.0}}},
      {"0.8 gaussian(0.1) + 0.2 gaussian(0.5)",
       {{{NoiseFamily::kGaussian, 0.1}, {NoiseFamily::kGaussian, 0.5}},
        {0.8, 0.2}}},
  };
  const double M = 1.0;
  std::vector<SandwichCase> suite;
  std::uint64_t stream = 0;
  for (const auto& [noise_label, mixture] : noises) {
    for (double sigma : sigmas) {
      for (int d = 0; d < deltas_per_sigma; ++d) {
        SplitMix64 rng(derive_seed(seed, stream++));
        SandwichCase sc;
        sc.config.sigma = sigma;
        sc.config.M = M;
        sc.config.mixture = mixture;
        sc.config.bounds = certified_bounds(mixture, M);
        sc.config.x_domain = {0.0, 1.0};
        sc.f = detail::random_smooth_function(rng, M * (0.05 + 0.95 * rng.next_uniform()));
        sc.f_star = detail::random_smooth_function(rng, M * (0.05 + 0.95 * rng.next_uniform()));
        sc.label = noise_label + " sigma=" + std::to_string(sigma) +
                   " delta#" + std::to_string(d);
        suite.push_back(std::move(sc));
      }
    }
  }
  return suite;
}

// ---------------------------------------------------------------------------
// Convergence-rate study (sigma = n^theta)
// ---------------------------------------------------------------------------

struct ConvergenceStudyConfig {
  ExampleId example = ExampleId::kEx1;
  double theta = -0.2;  // must lie in (-1/4, 0)
  std::vector<int> n_list;
  int replications = 100;
  double s_report = 1.0;  // complexity exponent, reporting only
  std::uint64_t seed = 0;
};

inline void validate(const ConvergenceStudyConfig& config) {
  if (!(config.theta > -0.25 && config.theta < 0.0)) {
    throw std::invalid_argument("theta out of (-1/4, 0)");
  }
  if (config.n_list.empty()) {
    throw std::invalid_argument("convergence study: empty n list");
  }
  for (std::size_t i = 0; i < config.n_list.size(); ++i) {
    if (config.n_list[i] < 2) {
      throw std::invalid_argument("convergence study: n must be >= 2");
    }
    if (i > 0 && config.n_list[i] <= config.n_list[i - 1]) {
      throw std::invalid_argument("convergence study: n list must be increasing");
    }
  }
  if (config.replications < 1) {
    throw std::invalid_argument("convergence study: replications must be >= 1");
  }
  if (!(config.s_report > 0.0 && config.s_report < 2.0)) {
    throw std::invalid_argument("s_report out of (0, 2)");
  }
}

// Hyperparameters for the study: either CV over (bandwidth, lambda) with the
// loss scale pinned to n^theta, or fixed values.
struct HyperPolicy {
  enum class Kind { kCv, kFixed };
  Kind kind = Kind::kFixed;
  std::vector<double> bandwidths;  // CV grid
  std::vector<double> lambdas;     // CV grid
  int folds = 5;
  double fixed_bandwidth = 1.0;
  double fixed_lambda = 1e-5;
};

struct ConvergenceRow {
  int n = 0;
  double sigma = 0.0;
  double mse_mean = 0.0;
  double mse_sd = 0.0;
  int failures = 0;
  bool flagged = false;  // at least half the replications failed
};

struct ConvergenceStudy {
  std::vector<ConvergenceRow> rows;
  std::optional<double> fitted_slope;  // log mean MSE vs log n
  double theoretical_exponent = 0.0;   // -(8 theta + 2) / (2 + s_report)
};

inline ConvergenceStudy convergence_study(const ConvergenceStudyConfig& config,
                                          const HyperPolicy& policy,
                                          int jobs = 1) {
  validate(config);
  if (policy.kind == HyperPolicy::Kind::kCv &&
      (policy.bandwidths.empty() || policy.lambdas.empty())) {
    throw std::invalid_argument("cv policy requires bandwidth and lambda grids");
  }

  ConvergenceStudy study;
  study.theoretical_exponent =
      -(8.0 * config.theta + 2.0) / (2.0 + config.s_report);

  const std::size_t reps = static_cast<std::size_t>(config.replications);
  for (std::size_t ni = 0; ni < config.n_list.size(); ++ni) {
    const int n = config.n_list[ni];
    const double sigma = std::pow(static_cast<double>(n), config.theta);
    const std::uint64_t n_seed = derive_seed(config.seed, ni);

    std::vector<double> mses(reps, std::numeric_limits<double>::quiet_NaN());
    parallel_for_index(reps, jobs, [&](std::size_t r) {
      const std::uint64_t rep_seed = derive_seed(n_seed, r);
      const Dataset data =
          generate_example({config.example, n, rep_seed});
      try {
        FitConfig fc;
        fc.loss = {LossFamily::kCorrentropy, sigma};
        if (policy.kind == HyperPolicy::Kind::kFixed) {
          fc.kernel = {policy.fixed_bandwidth};
          fc.lambda = policy.fixed_lambda;
        } else {
          CVGrid grid;
          grid.loss_scales = {sigma};
          grid.bandwidths = policy.bandwidths;
          grid.lambdas = policy.lambdas;
          grid.folds = policy.folds;
          grid.seed = derive_seed(rep_seed, 1);
          grid.score = CVScore::kBoundedSquared;
          const CVResult cv = grid_search_cv(data, LossFamily::kCorrentropy,
                                             grid, FitDefaults{});
          fc.kernel = {cv.best.bandwidth};
          fc.lambda = cv.best.lambda;
        }
        const FittedModel model = fit(data, fc);
        mses[r] = mse_to_truth(model, config.example);
      } catch (const std::exception&) {
        // leave NaN; counted as a failure below
      }
    });

    ConvergenceRow row;
    row.n = n;
    row.sigma = sigma;
    std::vector<double> ok;
    ok.reserve(reps);
    for (double v : mses) {
      if (std::isfinite(v)) ok.push_back(v);
    }
    row.failures = static_cast<int>(reps - ok.size());
    row.flagged = 2 * row.failures >= config.replications;
    if (ok.size() >= 2) {
      std::tie(row.mse_mean, row.mse_sd) = summarize_replications(ok);
    } else if (ok.size() == 1) {
      row.mse_mean = ok.front();
      row.mse_sd = 0.0;
    } else {
      row.mse_mean = std::numeric_limits<double>::quiet_NaN();
      row.mse_sd = std::numeric_limits<double>::quiet_NaN();
      row.flagged = true;
    }
    study.rows.push_back(row);
  }

  // Least-squares slope of log(mean MSE) against log n.
  if (study.rows.size() >= 2) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = 0;
    for (const auto& row : study.rows) {
      if (!(row.mse_mean > 0.0) || !std::isfinite(row.mse_mean)) continue;
      const double lx = std::log(static_cast<double>(row.n));
      const double ly = std::log(row.mse_mean);
      sx += lx;
      sy += ly;
      sxx += lx * lx;
      sxy += lx * ly;
      ++m;
    }
    if (m >= 2) {
      study.fitted_slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    }
  }
  return study;
}

}  // namespace mccr
