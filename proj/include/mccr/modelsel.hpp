#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "mccr/dataset.hpp"
#include "mccr/kernel.hpp"
#include "mccr/loss.hpp"
#include "mccr/parallel.hpp"
#include "mccr/rng.hpp"
#include "mccr/solver.hpp"

namespace mccr {

// Held-out scoring rule. Mean squared error is the classical choice but
// degenerates under heavy-tailed noise (one large held-out cauchy outlier
// dominates every fold score). The median of squared errors is immune to
// outliers but also ignores gross misfit on up to half the points. The
// bounded score evaluates errors through the correntropy loss at a fixed
// scale sigma0 = MAD of the training fold's responses: quadratic in the
// bulk, saturating at sigma0^2 per point, comparable across grid cells.
enum class CVScore { kMeanSquared, kMedianSquared, kBoundedSquared };

// Hyperparameter grid for k-fold cross validation over
// (loss scale, kernel bandwidth, lambda).
struct CVGrid {
  std::vector<double> loss_scales;
  std::vector<double> bandwidths;
  std::vector<double> lambdas;
  int folds = 5;
  std::uint64_t seed = 0;
  CVScore score = CVScore::kMeanSquared;
};

struct FitDefaults {
  int max_iters = 100;
  double tol = 1e-6;
};

struct CVCell {
  double loss_scale = 1.0;
  double bandwidth = 1.0;
  double lambda = 1e-4;
};

struct CVCellResult {
  CVCell cell;
  double mean_error = std::numeric_limits<double>::infinity();
  std::vector<double> fold_errors;  // +inf where the fold failed to fit
};

struct CVResult {
  CVCell best;
  double best_error = std::numeric_limits<double>::infinity();
  std::vector<CVCellResult> table;  // ordered by grid index
};

// Test hook: observes the exact training subset handed to each fold fit.
struct CVHooks {
  std::function<void(const Dataset& fold_train, int fold, std::size_t cell_index)>
      on_fold_fit;
};

// Seeded uniform permutation of 0..n-1 cut into k contiguous blocks whose
// sizes differ by at most one.
inline std::vector<std::vector<int>> kfold_split(int n, int k,
                                                 std::uint64_t seed) {
  if (k < 2) throw std::invalid_argument("kfold_split: need k >= 2");
  if (k > n) throw std::invalid_argument("kfold_split: k exceeds n");
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  SplitMix64 rng(seed);
  for (int i = n - 1; i > 0; --i) {
    const int j = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(i) + 1));
    std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
  }
  std::vector<std::vector<int>> folds(static_cast<std::size_t>(k));
  const int base = n / k;
  const int extra = n % k;
  int pos = 0;
  for (int f = 0; f < k; ++f) {
    const int size = base + (f < extra ? 1 : 0);
    folds[static_cast<std::size_t>(f)].assign(perm.begin() + pos,
                                              perm.begin() + pos + size);
    pos += size;
  }
  return folds;
}

inline double median_of(std::vector<double> values);
inline double median_abs_deviation(const Eigen::VectorXd& y);

namespace detail {

// `bound_scale` is the fold's sigma0 (only used by kBoundedSquared).
inline double heldout_score(CVScore score, const Eigen::VectorXd& pred,
                            const Eigen::VectorXd& truth, double bound_scale) {
  if (score == CVScore::kBoundedSquared) {
    const LossSpec bounded{LossFamily::kCorrentropy, bound_scale};
    double acc = 0.0;
    for (Eigen::Index i = 0; i < pred.size(); ++i) {
      acc += loss_value(bounded, pred[i] - truth[i]);
    }
    return acc / static_cast<double>(pred.size());
  }
  const Eigen::VectorXd sq = (pred - truth).array().square();
  if (score == CVScore::kMedianSquared) {
    return median_of(std::vector<double>(sq.data(), sq.data() + sq.size()));
  }
  return sq.sum() / static_cast<double>(sq.size());
}

inline Dataset take_rows(const Dataset& data, const std::vector<int>& rows) {
  Dataset out;
  out.xs.resize(static_cast<Eigen::Index>(rows.size()), data.xs.cols());
  out.ys.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.xs.row(static_cast<Eigen::Index>(i)) = data.xs.row(rows[i]);
    out.ys[static_cast<Eigen::Index>(i)] = data.ys[rows[i]];
  }
  return out;
}

inline bool cell_less(const CVCell& a, const CVCell& b) {
  return std::tie(a.loss_scale, a.bandwidth, a.lambda) <
         std::tie(b.loss_scale, b.bandwidth, b.lambda);
}

}  // namespace detail

// Exhaustive CV over the grid. Every cell is scored on the held-out fold by
// grid.score (mean squared prediction error by default, median squared for
// heavy-tailed responses), averaged over folds; a fold whose fit fails
// scores +inf and a cell with no surviving fold scores +inf. Cells are
// independent and may run on several threads; the table is always assembled
// in grid order, so the result does not depend on `jobs`.
inline CVResult grid_search_cv(const Dataset& data, LossFamily family,
                               const CVGrid& grid, const FitDefaults& defaults,
                               int jobs = 1, const CVHooks* hooks = nullptr) {
  validate(data);
  if (grid.loss_scales.empty() || grid.bandwidths.empty() || grid.lambdas.empty()) {
    throw std::invalid_argument("grid_search_cv: empty grid");
  }
  const int n = static_cast<int>(data.size());
  const auto folds = kfold_split(n, grid.folds, grid.seed);
  const int k = grid.folds;

  // Train/held-out index sets per fold.
  std::vector<std::vector<int>> train_idx(static_cast<std::size_t>(k));
  for (int f = 0; f < k; ++f) {
    for (int g = 0; g < k; ++g) {
      if (g == f) continue;
      const auto& fold = folds[static_cast<std::size_t>(g)];
      train_idx[static_cast<std::size_t>(f)].insert(
          train_idx[static_cast<std::size_t>(f)].end(), fold.begin(), fold.end());
    }
  }

  struct FoldData {
    Dataset train;
    Dataset heldout;
    double bound_scale = 1.0;  // sigma0 for kBoundedSquared
  };
  std::vector<FoldData> fold_data(static_cast<std::size_t>(k));
  for (int f = 0; f < k; ++f) {
    FoldData& fd = fold_data[static_cast<std::size_t>(f)];
    fd.train = detail::take_rows(data, train_idx[static_cast<std::size_t>(f)]);
    fd.heldout = detail::take_rows(data, folds[static_cast<std::size_t>(f)]);
    if (grid.score == CVScore::kBoundedSquared) {
      const double mad = median_abs_deviation(fd.train.ys);
      fd.bound_scale = mad > 0.0 ? mad : 1.0;
    }
  }

  // Gram and cross-kernel matrices depend only on (fold, bandwidth); cache
  // them once so grid cells share them read-only.
  const std::size_t nh = grid.bandwidths.size();
  std::vector<Eigen::MatrixXd> grams(static_cast<std::size_t>(k) * nh);
  std::vector<Eigen::MatrixXd> crosses(static_cast<std::size_t>(k) * nh);
  parallel_for_index(grams.size(), jobs, [&](std::size_t fi) {
    const std::size_t f = fi / nh;
    const std::size_t h = fi % nh;
    const KernelSpec kernel{grid.bandwidths[h]};
    grams[fi] = gram_matrix(kernel, fold_data[f].train.xs);
    crosses[fi] = cross_gram(kernel, fold_data[f].heldout.xs, fold_data[f].train.xs);
  });

  const std::size_t ns = grid.loss_scales.size();
  const std::size_t nl = grid.lambdas.size();
  const std::size_t n_cells = ns * nh * nl;
  CVResult result;
  result.table.resize(n_cells);

  parallel_for_index(n_cells, jobs, [&](std::size_t c) {
    const std::size_t si = c / (nh * nl);
    const std::size_t hi = (c / nl) % nh;
    const std::size_t li = c % nl;
    CVCellResult cell_result;
    cell_result.cell = {grid.loss_scales[si], grid.bandwidths[hi],
                        grid.lambdas[li]};
    cell_result.fold_errors.assign(static_cast<std::size_t>(k),
                                   std::numeric_limits<double>::infinity());

    FitConfig config;
    config.loss = {family, cell_result.cell.loss_scale};
    config.kernel = {cell_result.cell.bandwidth};
    config.lambda = cell_result.cell.lambda;
    config.max_iters = defaults.max_iters;
    config.tol = defaults.tol;

    double err_sum = 0.0;
    int err_count = 0;
    for (int f = 0; f < k; ++f) {
      const std::size_t fi = static_cast<std::size_t>(f) * nh + hi;
      const FoldData& fd = fold_data[static_cast<std::size_t>(f)];
      if (hooks && hooks->on_fold_fit) hooks->on_fold_fit(fd.train, f, c);
      try {
        const FittedModel model = detail::fit_with_gram(
            grams[fi], fd.train.xs, fd.train.ys, config);
        const Eigen::VectorXd pred =
            (crosses[fi] * model.alphas).array() + model.intercept;
        const double err =
            detail::heldout_score(grid.score, pred, fd.heldout.ys, fd.bound_scale);
        if (std::isfinite(err)) {
          cell_result.fold_errors[static_cast<std::size_t>(f)] = err;
          err_sum += err;
          ++err_count;
        }
      } catch (const std::exception&) {
        // fold stays at +inf
      }
    }
    cell_result.mean_error = err_count > 0
                                 ? err_sum / static_cast<double>(err_count)
                                 : std::numeric_limits<double>::infinity();
    result.table[c] = std::move(cell_result);
  });

  // Argmin with deterministic tie-breaking: smallest (scale, bandwidth,
  // lambda) tuple among cells attaining the minimum.
  std::size_t best = n_cells;
  for (std::size_t c = 0; c < n_cells; ++c) {
    if (!std::isfinite(result.table[c].mean_error)) continue;
    if (best == n_cells || result.table[c].mean_error < result.table[best].mean_error ||
        (result.table[c].mean_error == result.table[best].mean_error &&
         detail::cell_less(result.table[c].cell, result.table[best].cell))) {
      best = c;
    }
  }
  if (best == n_cells) throw std::runtime_error("no viable hyperparameters");
  result.best = result.table[best].cell;
  result.best_error = result.table[best].mean_error;
  return result;
}

// ---------------------------------------------------------------------------
// Default grids (used by the CLI when the configuration omits them)
// ---------------------------------------------------------------------------

inline std::vector<double> log_grid(double lo, double hi, int count) {
  if (!(lo > 0.0) || !(hi > lo) || count < 2) {
    throw std::invalid_argument("log_grid: need 0 < lo < hi and count >= 2");
  }
  std::vector<double> out(static_cast<std::size_t>(count));
  const double step = (std::log(hi) - std::log(lo)) / (count - 1);
  for (int i = 0; i < count; ++i) {
    out[static_cast<std::size_t>(i)] = std::exp(std::log(lo) + step * i);
  }
  return out;
}

inline double median_of(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("median of empty set");
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + mid, values.end());
  double m = values[mid];
  if (values.size() % 2 == 0) {
    std::nth_element(values.begin(), values.begin() + mid - 1,
                     values.begin() + mid);
    m = 0.5 * (m + values[mid - 1]);
  }
  return m;
}

inline double median_abs_deviation(const Eigen::VectorXd& y) {
  std::vector<double> v(y.data(), y.data() + y.size());
  const double med = median_of(v);
  for (auto& e : v) e = std::abs(e - med);
  return median_of(v);
}

inline double median_pairwise_distance(const Eigen::MatrixXd& xs) {
  const Eigen::Index n = xs.rows();
  if (n < 2) throw std::invalid_argument("median_pairwise_distance: need n >= 2");
  std::vector<double> d;
  d.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      d.push_back((xs.row(i) - xs.row(j)).norm());
    }
  }
  return median_of(d);
}

// Scale-free defaults: loss scales and bandwidths on 8-point log grids over
// [1e-2, 10] times a data scale (MAD of y, median pairwise distance of x),
// lambdas on the fixed log grid 1e-6..1e-1. Squared loss has no scale, so its
// grid collapses to a single placeholder cell.
inline CVGrid default_grid(const Dataset& data, LossFamily family,
                           std::uint64_t seed, int folds = 5) {
  CVGrid grid;
  grid.folds = folds;
  grid.seed = seed;
  if (family == LossFamily::kSquared) {
    grid.loss_scales = {1.0};
  } else {
    double mad = median_abs_deviation(data.ys);
    if (!(mad > 0.0)) mad = 1.0;
    grid.loss_scales = log_grid(1e-2 * mad, 10.0 * mad, 8);
  }
  double mpd = median_pairwise_distance(data.xs);
  if (!(mpd > 0.0)) mpd = 1.0;
  grid.bandwidths = log_grid(1e-2 * mpd, 10.0 * mpd, 8);
  grid.lambdas = {1e-6, 1e-5, 1e-4, 1e-3, 1e-2, 1e-1};
  return grid;
}

}  // namespace mccr
