#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

namespace mccr {

// Gaussian kernel K(x,x') = exp(-||x-x'||^2 / h^2).
struct KernelSpec {
  double bandwidth = 1.0;
};

inline void validate(const KernelSpec& spec) {
  if (!(std::isfinite(spec.bandwidth) && spec.bandwidth > 0.0)) {
    throw std::invalid_argument("kernel bandwidth must be positive and finite");
  }
}

namespace detail {
// Entries this small are flushed to exact zero to keep Gram products out of
// subnormal arithmetic.
constexpr double kGramFlush = 1e-300;

inline double gaussian_of_sqdist(double sq_dist, double h) {
  const double v = std::exp(-sq_dist / (h * h));
  return v < kGramFlush ? 0.0 : v;
}
}  // namespace detail

inline double kernel_eval(const KernelSpec& spec, const Eigen::VectorXd& x,
                          const Eigen::VectorXd& x2) {
  validate(spec);
  if (x.size() != x2.size()) {
    throw std::invalid_argument("kernel_eval: dimension mismatch");
  }
  return detail::gaussian_of_sqdist((x - x2).squaredNorm(), spec.bandwidth);
}

// Gram matrix of a point set (rows of `points`). The upper triangle is
// computed once and mirrored, so symmetry holds to exact bit equality.
inline Eigen::MatrixXd gram_matrix(const KernelSpec& spec,
                                   const Eigen::MatrixXd& points) {
  validate(spec);
  const Eigen::Index n = points.rows();
  if (n == 0) throw std::invalid_argument("gram_matrix: empty point list");
  Eigen::MatrixXd gram(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    gram(i, i) = 1.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double v = detail::gaussian_of_sqdist(
          (points.row(i) - points.row(j)).squaredNorm(), spec.bandwidth);
      gram(i, j) = v;
      gram(j, i) = v;
    }
  }
  return gram;
}

// Rectangular kernel matrix: entry (i,j) = K(a_i, b_j).
inline Eigen::MatrixXd cross_gram(const KernelSpec& spec,
                                  const Eigen::MatrixXd& a,
                                  const Eigen::MatrixXd& b) {
  validate(spec);
  if (a.cols() != b.cols()) {
    throw std::invalid_argument("cross_gram: dimension mismatch");
  }
  Eigen::MatrixXd out(a.rows(), b.rows());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < b.rows(); ++j) {
      out(i, j) = detail::gaussian_of_sqdist(
          (a.row(i) - b.row(j)).squaredNorm(), spec.bandwidth);
    }
  }
  return out;
}

}  // namespace mccr
