#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

namespace mccr {

// 16-point Gauss-Legendre rule on [-1,1]; nodes and weights are computed once
// by Newton iteration on P_16, which reproduces the tabulated values to full
// double precision without transcribing constants.
struct GaussLegendre16 {
  std::array<double, 16> nodes{};
  std::array<double, 16> weights{};

  GaussLegendre16() {
    constexpr int n = 16;
    constexpr double kPi = 3.14159265358979323846;
    for (int i = 0; i < n; ++i) {
      double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
      double dp = 0.0;
      for (int iter = 0; iter < 100; ++iter) {
        // Evaluate P_n and P_n' by the three-term recurrence.
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
          const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-16) break;
      }
      nodes[static_cast<std::size_t>(i)] = x;
      weights[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
  }

  static const GaussLegendre16& instance() {
    static const GaussLegendre16 rule;
    return rule;
  }
};

// Composite 16-point Gauss-Legendre integration of f over [a,b].
template <typename F>
double integrate_gl(F&& f, double a, double b, int panels) {
  const auto& rule = GaussLegendre16::instance();
  const double width = (b - a) / panels;
  double total = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * width;
    const double half = 0.5 * width;
    double acc = 0.0;
    for (std::size_t k = 0; k < 16; ++k) {
      acc += rule.weights[k] * f(mid + half * rule.nodes[k]);
    }
    total += acc * half;
  }
  return total;
}

}  // namespace mccr
