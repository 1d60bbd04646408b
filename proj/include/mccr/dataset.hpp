#pragma once

#include <Eigen/Dense>
#include <stdexcept>

namespace mccr {

// Paired observations: xs has one d-dimensional covariate per row, ys the
// matching scalar responses.
struct Dataset {
  Eigen::MatrixXd xs;
  Eigen::VectorXd ys;

  Eigen::Index size() const { return ys.size(); }
  Eigen::Index dim() const { return xs.cols(); }
};

inline void validate(const Dataset& data) {
  if (data.xs.rows() == 0 || data.ys.size() == 0) {
    throw std::invalid_argument("dataset must contain at least one point");
  }
  if (data.xs.rows() != data.ys.size()) {
    throw std::invalid_argument("dataset xs/ys length mismatch");
  }
  if (!data.xs.allFinite() || !data.ys.allFinite()) {
    throw std::invalid_argument("dataset entries must be finite");
  }
}

}  // namespace mccr
