#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "mccr/dataset.hpp"
#include "mccr/kernel.hpp"
#include "mccr/loss.hpp"

namespace mccr {

struct FitConfig {
  LossSpec loss;
  KernelSpec kernel;
  double lambda = 1e-4;
  int max_iters = 100;
  double tol = 1e-6;
};

inline void validate(const FitConfig& config) {
  validate(config.loss);
  validate(config.kernel);
  if (!(std::isfinite(config.lambda) && config.lambda > 0.0)) {
    throw std::invalid_argument("lambda must be positive and finite");
  }
  if (config.max_iters < 1) throw std::invalid_argument("max_iters must be >= 1");
  if (!(std::isfinite(config.tol) && config.tol > 0.0)) {
    throw std::invalid_argument("tol must be positive and finite");
  }
}

// Representer-expansion model f(x) = sum_i alpha_i K(x, x_i) + intercept.
struct FittedModel {
  Eigen::VectorXd alphas;
  double intercept = 0.0;
  Eigen::MatrixXd train_xs;
  KernelSpec kernel;
  int iters_used = 0;
  bool converged = false;
};

// Optional per-fit trace, mainly for tests: residuals of the returned model
// and the regularized objective after the initial model and each IRLS solve.
struct FitDiagnostics {
  Eigen::VectorXd last_residuals;
  std::vector<double> objective_trace;
};

struct WeightedKrrSolution {
  Eigen::VectorXd alphas;
  double intercept = 0.0;
};

namespace detail {

// Reusable buffers for the weighted solve; IRLS calls it once per iteration.
struct WeightedKrrWorkspace {
  Eigen::MatrixXd m;
  Eigen::VectorXd s, u, v, tmp;
  Eigen::LLT<Eigen::MatrixXd> llt;
};

// Minimizes (1/n) sum_i w_i (y_i - (K alpha)_i - b0)^2 + lambda alpha'K alpha.
// The stationarity system
//     (WK + n lambda I) alpha + w b0 = W y
//     w'K alpha + (sum w) b0        = w'y
// is solved by the substitution alpha = S beta with S = diag(sqrt(w)):
// beta solves the SPD system (SKS + n lambda I) beta = S(y - b0 1), and the
// intercept follows from the Schur complement, whose denominator equals
// n lambda S1' M^{-1} S1 > 0. A zero weight simply forces alpha_i = 0.
inline WeightedKrrSolution solve_weighted_krr_ws(const Eigen::MatrixXd& gram,
                                                 const Eigen::VectorXd& ys,
                                                 const Eigen::VectorXd& weights,
                                                 double lambda,
                                                 WeightedKrrWorkspace& ws) {
  const Eigen::Index n = gram.rows();
  if (gram.cols() != n || ys.size() != n || weights.size() != n) {
    throw std::invalid_argument("solve_weighted_krr: shape mismatch");
  }
  if (!(weights.array() >= 0.0).all() || !weights.allFinite()) {
    throw std::invalid_argument("solve_weighted_krr: weights must be finite and >= 0");
  }
  if (weights.maxCoeff() <= 0.0) {
    throw std::invalid_argument("solve_weighted_krr: all weights are zero");
  }

  ws.s = weights.array().sqrt();
  const double ridge = static_cast<double>(n) * lambda;
  const double jitter = 1e-10 * gram.trace() / static_cast<double>(n);

  for (int attempt = 0; attempt < 2; ++attempt) {
    ws.m.noalias() = ws.s.asDiagonal() * gram * ws.s.asDiagonal();
    ws.m.diagonal().array() += ridge + (attempt == 0 ? 0.0 : jitter);
    ws.llt.compute(ws.m);
    if (ws.llt.info() != Eigen::Success) continue;

    ws.u = ws.llt.solve(ws.s.cwiseProduct(ys));
    ws.v = ws.llt.solve(ws.s);

    // w'K S u and w'K S v, with w = s^2.
    ws.tmp.noalias() = gram * ws.s.cwiseProduct(ws.u);
    const double wksu = weights.dot(ws.tmp);
    ws.tmp.noalias() = gram * ws.s.cwiseProduct(ws.v);
    const double wksv = weights.dot(ws.tmp);

    const double denom = weights.sum() - wksv;
    const double numer = weights.dot(ys) - wksu;
    if (!(denom > 0.0) || !std::isfinite(denom) || !std::isfinite(numer)) continue;

    WeightedKrrSolution sol;
    sol.intercept = numer / denom;
    sol.alphas = ws.s.cwiseProduct(ws.u - sol.intercept * ws.v);
    if (!sol.alphas.allFinite() || !std::isfinite(sol.intercept)) continue;
    return sol;
  }
  throw std::runtime_error("degenerate weighted system");
}

}  // namespace detail

inline WeightedKrrSolution solve_weighted_krr(const Eigen::MatrixXd& gram,
                                              const Eigen::VectorXd& ys,
                                              const Eigen::VectorXd& weights,
                                              double lambda) {
  detail::WeightedKrrWorkspace ws;
  return detail::solve_weighted_krr_ws(gram, ys, weights, lambda, ws);
}

namespace detail {

// IRLS on a precomputed Gram matrix. `train_xs` is only stored into the
// returned model; all numeric work runs off `gram`.
inline FittedModel fit_with_gram(const Eigen::MatrixXd& gram,
                                 const Eigen::MatrixXd& train_xs,
                                 const Eigen::VectorXd& ys,
                                 const FitConfig& config,
                                 FitDiagnostics* diag = nullptr) {
  validate(config);
  const Eigen::Index n = ys.size();

  FittedModel model;
  model.kernel = config.kernel;
  model.train_xs = train_xs;
  model.alphas = Eigen::VectorXd::Zero(n);
  model.intercept = 0.0;

  detail::WeightedKrrWorkspace ws;
  Eigen::VectorXd residuals = ys;  // residuals of the zero initial model
  Eigen::VectorXd weights(n), new_residuals(n);

  const auto objective = [&](const Eigen::VectorXd& r,
                             const Eigen::VectorXd& alphas) {
    double data_term = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) data_term += loss_value(config.loss, r[i]);
    return data_term / static_cast<double>(n) +
           config.lambda * alphas.dot(gram * alphas);
  };
  if (diag) {
    diag->objective_trace.clear();
    diag->objective_trace.push_back(objective(residuals, model.alphas));
  }

  if (config.loss.family == LossFamily::kSquared) {
    // Unit weights are a fixed point: one closed-form solve suffices.
    const WeightedKrrSolution sol = detail::solve_weighted_krr_ws(
        gram, ys, Eigen::VectorXd::Ones(n), config.lambda, ws);
    model.alphas = sol.alphas;
    model.intercept = sol.intercept;
    model.iters_used = 1;
    model.converged = true;
    residuals = ys - (gram * model.alphas).eval() -
                Eigen::VectorXd::Constant(n, model.intercept);
    if (diag) diag->objective_trace.push_back(objective(residuals, model.alphas));
  } else {
    for (int iter = 1; iter <= config.max_iters; ++iter) {
      for (Eigen::Index i = 0; i < n; ++i) {
        weights[i] = loss_weight(config.loss, residuals[i]);
      }
      if (weights.maxCoeff() < 1e-12) {
        // All points look like gross outliers at this scale; solving would be
        // degenerate, so keep the previous iterate.
        model.converged = false;
        break;
      }
      const WeightedKrrSolution sol =
          detail::solve_weighted_krr_ws(gram, ys, weights, config.lambda, ws);
      model.alphas = sol.alphas;
      model.intercept = sol.intercept;
      model.iters_used = iter;
      new_residuals = ys - (gram * model.alphas).eval() -
                      Eigen::VectorXd::Constant(n, model.intercept);
      if (diag) diag->objective_trace.push_back(objective(new_residuals, model.alphas));
      const double change = (new_residuals - residuals).cwiseAbs().maxCoeff();
      residuals = new_residuals;
      if (change < config.tol) {
        model.converged = true;
        break;
      }
    }
  }

  if (diag) diag->last_residuals = residuals;
  return model;
}

}  // namespace detail

inline FittedModel fit(const Dataset& data, const FitConfig& config,
                       FitDiagnostics* diag = nullptr) {
  validate(data);
  validate(config);
  const Eigen::MatrixXd gram = gram_matrix(config.kernel, data.xs);
  return detail::fit_with_gram(gram, data.xs, data.ys, config, diag);
}

inline double predict(const FittedModel& model, const Eigen::VectorXd& x) {
  if (x.size() != model.train_xs.cols()) {
    throw std::invalid_argument("predict: dimension mismatch");
  }
  double acc = model.intercept;
  for (Eigen::Index i = 0; i < model.train_xs.rows(); ++i) {
    acc += model.alphas[i] *
           detail::gaussian_of_sqdist(
               (model.train_xs.row(i).transpose() - x).squaredNorm(),
               model.kernel.bandwidth);
  }
  return acc;
}

inline Eigen::VectorXd predict(const FittedModel& model,
                               const Eigen::MatrixXd& xs) {
  if (xs.cols() != model.train_xs.cols()) {
    throw std::invalid_argument("predict: dimension mismatch");
  }
  const Eigen::MatrixXd cross = cross_gram(model.kernel, xs, model.train_xs);
  return (cross * model.alphas).array() + model.intercept;
}

}  // namespace mccr
