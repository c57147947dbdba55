#pragma once

// Closed-form test fields with hand-derived derivatives.

#include <cmath>
#include <memory>

#include "adiamorse/landscape.hpp"

namespace fixtures {

using adiamorse::ExplicitField;
using adiamorse::FieldPtr;
using adiamorse::Mat2;
using adiamorse::PolynomialField;
using adiamorse::Vec2;
using adiamorse::Window;

// Stereographic height 2v/(1+u^2+v^2) of the unit sphere with a dimple
// pressed into the north pole: the pole becomes a saddle flanked by two
// maxima, the south pole stays the minimum.
struct DeformedSphere {
  double A = 0.3, wv = 0.1, wu = 2.0;

  double bump(double u, double v) const {
    return A * std::exp(-(v - 1) * (v - 1) / wv - u * u / wu);
  }
  double value(double u, double v) const {
    return 2 * v / (1 + u * u + v * v) - bump(u, v);
  }
  Vec2 gradient(double u, double v) const {
    const double D = 1 + u * u + v * v, h = bump(u, v);
    return {-4 * u * v / (D * D) + h * 2 * u / wu,
            2 * (1 + u * u - v * v) / (D * D) + h * 2 * (v - 1) / wv};
  }
  Mat2 hessian(double u, double v) const {
    const double D = 1 + u * u + v * v, D3 = D * D * D, h = bump(u, v);
    const double guu = 4 * v * (3 * u * u - v * v - 1) / D3;
    const double guv = -4 * u * (u * u - 3 * v * v + 1) / D3;
    const double gvv = -4 * v * (3 * u * u - v * v + 3) / D3;
    const double huu = h * (4 * u * u / (wu * wu) - 2 / wu);
    const double huv = h * 4 * u * (v - 1) / (wu * wv);
    const double hvv = h * (4 * (v - 1) * (v - 1) / (wv * wv) - 2 / wv);
    Mat2 m;
    m << guu - huu, guv - huv, guv - huv, gvv - hvv;
    return m;
  }

  FieldPtr field(Window w = {-3, 3, -3, 3}) const {
    const DeformedSphere self = *this;
    return std::make_shared<ExplicitField>(
        ExplicitField::Functions{[self](double u, double v) { return self.value(u, v); },
                                 [self](double u, double v) { return self.gradient(u, v); },
                                 [self](double u, double v) { return self.hessian(u, v); }},
        w, "deformed-sphere");
  }
};

// s^3 - 3 s lambda^2
inline FieldPtr monkey_saddle(Window w = {-1, 1, -1, 1}) {
  return std::make_shared<PolynomialField>(PolynomialField::Coeffs{{{3, 0}, 1.0}, {{1, 2}, -3.0}},
                                           w);
}

// (k1 s^2 + k2 lambda^2) / 2
inline FieldPtr quadratic(double k1, double k2, Window w) {
  return std::make_shared<PolynomialField>(
      PolynomialField::Coeffs{{{2, 0}, 0.5 * k1}, {{0, 2}, 0.5 * k2}}, w);
}

}  // namespace fixtures
