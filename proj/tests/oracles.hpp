#pragma once

// Reference computations that share no code path with the library routines
// they check.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "adiamorse/landscape.hpp"

namespace oracle {

using adiamorse::Vec2;

// det(H(s) - lambda I) by LU on the raw path matrix.
inline double det_lu(const adiamorse::HamiltonianPath& path, double s, double l) {
  Eigen::MatrixXcd m = path.at(s);
  m -= l * Eigen::MatrixXcd::Identity(m.rows(), m.cols());
  return m.fullPivLu().determinant().real();
}

// Fourth-order central difference of a scalar function of (s, lambda).
inline Vec2 fd_gradient(const std::function<double(double, double)>& f, double s, double l,
                        double hs, double hl) {
  auto d = [](double fm2, double fm1, double fp1, double fp2, double h) {
    return (fm2 - 8 * fm1 + 8 * fp1 - fp2) / (12 * h);
  };
  return {d(f(s - 2 * hs, l), f(s - hs, l), f(s + hs, l), f(s + 2 * hs, l), hs),
          d(f(s, l - 2 * hl), f(s, l - hl), f(s, l + hl), f(s, l + 2 * hl), hl)};
}

// Eigenvalues of a real symmetric tridiagonal matrix by Sturm-count bisection.
inline std::vector<double> sturm_eigenvalues(const std::vector<double>& diag,
                                             const std::vector<double>& off) {
  const int n = static_cast<int>(diag.size());
  double lo = diag[0], hi = diag[0];
  for (int i = 0; i < n; ++i) {
    const double r = (i > 0 ? std::abs(off[i - 1]) : 0.0) + (i + 1 < n ? std::abs(off[i]) : 0.0);
    lo = std::min(lo, diag[i] - r);
    hi = std::max(hi, diag[i] + r);
  }
  auto count_below = [&](double x) {
    int c = 0;
    double q = diag[0] - x;
    if (q < 0) ++c;
    for (int i = 1; i < n; ++i) {
      if (q == 0.0) q = 1e-300;
      q = diag[i] - x - off[i - 1] * off[i - 1] / q;
      if (q < 0) ++c;
    }
    return c;
  };
  std::vector<double> out(n);
  for (int k = 0; k < n; ++k) {
    double a = lo - 1.0, b = hi + 1.0;
    for (int it = 0; it < 200 && b - a > 1e-15 * std::max(1.0, std::abs(a)); ++it) {
      const double m = 0.5 * (a + b);
      (count_below(m) > k ? b : a) = m;
    }
    out[k] = 0.5 * (a + b);
  }
  return out;
}

// Exact eigenvalues of the reduced Grover path; the characteristic polynomial
// is lambda^2 - lambda + c (s - s^2) with c = (N-1)/N.
inline std::pair<double, double> grover_levels(double N, double s) {
  const double c = (N - 1) / N;
  const double g = std::sqrt(1 - 4 * c * s * (1 - s));
  return {0.5 * (1 - g), 0.5 * (1 + g)};
}

// Integral of 1/gap^2 over [0,1] for Grover N, antiderivative of
// 1/(a (s-1/2)^2 + 1 - a/4) with a = 4 (N-1)/N.
inline double grover_delay(double N) {
  const double a = 4 * (N - 1) / N, c = 1 - a / 4;
  return 2 * std::atan(0.5 * std::sqrt(a / c)) / std::sqrt(a * c);
}

// Fixed-step RK4 along the unit-speed gradient direction. Returns the index
// of the first target within its radius, -1 for a window exit, -2 when the
// step budget runs out.
struct Target {
  Vec2 x;
  double radius;
};

inline int rk4_terminus(const std::function<Vec2(double, double)>& grad, Vec2 x, double sign,
                        const adiamorse::Window& w, const std::vector<Target>& targets, double h,
                        int max_steps) {
  auto rhs = [&](const Vec2& p) -> Vec2 {
    const Vec2 g = grad(p[0], p[1]);
    const double n = g.norm();
    return n > 0 ? Vec2(sign * g / n) : Vec2(0, 0);
  };
  for (int i = 0; i < max_steps; ++i) {
    for (std::size_t t = 0; t < targets.size(); ++t)
      if ((x - targets[t].x).norm() < targets[t].radius) return static_cast<int>(t);
    if (!w.contains(x)) return -1;
    // Shrink the step near a target so the capture disc is not jumped over.
    double step = h;
    for (const auto& t : targets) step = std::min(step, 0.25 * (x - t.x).norm());
    const Vec2 k1 = rhs(x);
    const Vec2 k2 = rhs(x + 0.5 * step * k1);
    const Vec2 k3 = rhs(x + 0.5 * step * k2);
    const Vec2 k4 = rhs(x + step * k3);
    x += step / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  return -2;
}

}  // namespace oracle
