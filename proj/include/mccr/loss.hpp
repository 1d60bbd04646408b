#pragma once

#include <cmath>
#include <stdexcept>

namespace mccr {

enum class LossFamily { kCorrentropy, kHuber, kSquared };

// Loss family plus its scale: sigma for the correntropy-induced loss,
// threshold delta for Huber, ignored for squared error.
struct LossSpec {
  LossFamily family = LossFamily::kSquared;
  double scale = 1.0;
};

inline void validate(const LossSpec& spec) {
  if (spec.family != LossFamily::kSquared &&
      !(std::isfinite(spec.scale) && spec.scale > 0.0)) {
    throw std::invalid_argument("loss scale must be positive and finite");
  }
}

namespace detail {
inline void require_finite_residual(double t) {
  if (!std::isfinite(t)) throw std::invalid_argument("non-finite residual");
}
}  // namespace detail

// Correntropy: sigma^2 (1 - exp(-t^2/sigma^2)), bounded by sigma^2.
// Huber: t^2/2 inside the threshold, delta|t| - delta^2/2 outside.
// Squared: t^2.
inline double loss_value(const LossSpec& spec, double t) {
  validate(spec);
  detail::require_finite_residual(t);
  switch (spec.family) {
    case LossFamily::kCorrentropy: {
      const double s2 = spec.scale * spec.scale;
      return s2 * -std::expm1(-t * t / s2);
    }
    case LossFamily::kHuber: {
      const double d = spec.scale;
      const double a = std::abs(t);
      return a <= d ? 0.5 * t * t : d * a - 0.5 * d * d;
    }
    case LossFamily::kSquared:
      return t * t;
  }
  throw std::logic_error("unreachable loss family");
}

inline double loss_derivative(const LossSpec& spec, double t) {
  validate(spec);
  detail::require_finite_residual(t);
  switch (spec.family) {
    case LossFamily::kCorrentropy: {
      const double s2 = spec.scale * spec.scale;
      return 2.0 * t * std::exp(-t * t / s2);
    }
    case LossFamily::kHuber: {
      const double d = spec.scale;
      if (std::abs(t) <= d) return t;
      return t > 0.0 ? d : -d;
    }
    case LossFamily::kSquared:
      return 2.0 * t;
  }
  throw std::logic_error("unreachable loss family");
}

// IRLS weight at residual r, extended continuously to 1 at r = 0.
// Correntropy and squared use weight = derivative / (2r); Huber follows the
// half-quadratic convention weight = derivative / r, i.e. min(1, delta/|r|).
inline double loss_weight(const LossSpec& spec, double r) {
  validate(spec);
  detail::require_finite_residual(r);
  switch (spec.family) {
    case LossFamily::kCorrentropy: {
      const double s2 = spec.scale * spec.scale;
      return std::exp(-r * r / s2);
    }
    case LossFamily::kHuber: {
      const double d = spec.scale;
      const double a = std::abs(r);
      return a <= d ? 1.0 : d / a;
    }
    case LossFamily::kSquared:
      return 1.0;
  }
  throw std::logic_error("unreachable loss family");
}

}  // namespace mccr
