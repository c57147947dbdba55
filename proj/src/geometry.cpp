#include "adiamorse/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace adiamorse {

double gauss_curvature(const Field& f, double s, double l, CurvatureFormula formula) {
  const Jet j = f.jet(s, l);
  const double fs = j.grad[0], fl = j.grad[1];
  const double cross = formula == CurvatureFormula::Standard ? j.hess(0, 1) : fl;
  const double w = 1.0 + fs * fs + fl * fl;
  return (j.hess(0, 0) * j.hess(1, 1) - cross * cross) / (w * w);
}

std::pair<double, double> principal_curvatures(const Field& f, const CriticalPoint& p) {
  if (p.degenerate)
    fail(ErrorCode::DegenerateCriticalPoint, "principal curvatures need a nondegenerate point");
  Eigen::SelfAdjointEigenSolver<Mat2> es(f.hessian(p.s(), p.lambda()));
  return {es.eigenvalues()[0], es.eigenvalues()[1]};
}

CurvatureReport curvature_report(const Field& f, const CriticalPoint& p,
                                 std::optional<std::pair<double, double>> s_range) {
  const auto [k1, k2] = principal_curvatures(f, p);
  CurvatureReport r;
  r.point_id = p.id;
  r.K = gauss_curvature(f, p.s(), p.lambda());
  r.k1 = k1;
  r.k2 = k2;
  r.dupin = {p.value, k1, k2, f.hessian(p.s(), p.lambda())(1, 1), p.s()};
  if (k1 * k2 < 0.0 && s_range) {
    try {
      r.delay = delay_factor(r, *s_range);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::DivergentDelay && e.code() != ErrorCode::NoIntersection) throw;
    }
  }
  return r;
}

namespace {

// g(s)^2 = A u^2 + C with u = s - s_p.
struct GapQuadratic {
  double A, C;
};

GapQuadratic gap_quadratic(const CurvatureReport& r) {
  const auto& d = r.dupin;
  if (!(d.k1 * d.k2 < 0.0)) fail(ErrorCode::InvalidArgument, "Dupin gap needs a saddle");
  if (d.h_ll == 0.0) fail(ErrorCode::NoIntersection, "conic has no lambda extent");
  const double h2 = d.h_ll * d.h_ll;
  return {-4.0 * d.k1 * d.k2 / h2, -8.0 * d.h_ll * d.f_p / h2};
}

void check_range(const GapQuadratic& q, const CurvatureReport& r, std::pair<double, double> rg) {
  if (!(rg.first < rg.second)) fail(ErrorCode::InvalidArgument, "empty s range");
  const double u0 = rg.first - r.dupin.s_p, u1 = rg.second - r.dupin.s_p;
  if (q.C > 0.0) return;
  const double root = std::sqrt(-q.C / q.A);
  const bool hits = (u0 <= root && root <= u1) || (u0 <= -root && -root <= u1);
  if (hits) fail(ErrorCode::DivergentDelay, "gap closes inside the s range");
  if (u0 > -root && u1 < root) fail(ErrorCode::NoIntersection, "s range misses the conic");
}

}  // namespace

double dupin_gap(const CurvatureReport& r, double s) {
  const GapQuadratic q = gap_quadratic(r);
  const double u = s - r.dupin.s_p;
  const double g2 = q.A * u * u + q.C;
  if (g2 < 0.0) fail(ErrorCode::NoIntersection, "slice misses the Dupin conic");
  return std::sqrt(g2);
}

double delay_factor(const CurvatureReport& r, std::pair<double, double> s_range) {
  const GapQuadratic q = gap_quadratic(r);
  check_range(q, r, s_range);
  const double sp = r.dupin.s_p;
  auto integrand = [&](double s) {
    const double u = s - sp;
    return 1.0 / (q.A * u * u + q.C);
  };
  // Split at s_p so the peak sits on a panel edge.
  auto piece = [&](double a, double b) {
    if (!(a < b)) return 0.0;
    double err = 0.0;
    return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand, a, b, 20,
                                                                          1e-12, &err);
  };
  if (sp > s_range.first && sp < s_range.second)
    return piece(s_range.first, sp) + piece(sp, s_range.second);
  return piece(s_range.first, s_range.second);
}

double delay_factor_closed_form(const CurvatureReport& r, std::pair<double, double> s_range) {
  const GapQuadratic q = gap_quadratic(r);
  check_range(q, r, s_range);
  const double u0 = s_range.first - r.dupin.s_p, u1 = s_range.second - r.dupin.s_p;
  if (q.C > 0.0) {
    const double k = std::sqrt(q.A / q.C);
    return (std::atan(k * u1) - std::atan(k * u0)) / std::sqrt(q.A * q.C);
  }
  // Both ends on one side of the closed region.
  const double k = std::sqrt(-q.C / q.A);
  auto F = [&](double u) {
    return std::log(std::abs((u - k) / (u + k))) / (2.0 * q.A * k);
  };
  return F(u1) - F(u0);
}

GaussBonnetResult gauss_bonnet_integral(const Field& f, const Window& region, int density,
                                        CurvatureFormula formula) {
  if (density < 1) fail(ErrorCode::InvalidArgument, "quadrature density must be positive");
  const Window& w = f.window();
  const double slack = 1e-12 * w.diag();
  if (region.s_lo < w.s_lo - slack || region.s_hi > w.s_hi + slack ||
      region.l_lo < w.l_lo - slack || region.l_hi > w.l_hi + slack)
    fail(ErrorCode::DomainError, "integration region leaves the field window");

  using Rule = boost::math::quadrature::gauss<double, 10>;
  std::vector<double> nodes, weights;
  for (std::size_t i = 0; i < Rule::abscissa().size(); ++i) {
    nodes.push_back(Rule::abscissa()[i]);
    weights.push_back(Rule::weights()[i]);
    nodes.push_back(-Rule::abscissa()[i]);
    weights.push_back(Rule::weights()[i]);
  }

  auto integrate = [&](int n) {
    const double hs = region.width_s() / n, hl = region.width_l() / n;
    std::vector<double> xs, ws, ys, wy;
    for (int p = 0; p < n; ++p)
      for (std::size_t i = 0; i < nodes.size(); ++i) {
        xs.push_back(region.s_lo + hs * (p + 0.5 + 0.5 * nodes[i]));
        ws.push_back(0.5 * hs * weights[i]);
        ys.push_back(region.l_lo + hl * (p + 0.5 + 0.5 * nodes[i]));
        wy.push_back(0.5 * hl * weights[i]);
      }
    double total = 0.0;
    for (std::size_t a = 0; a < xs.size(); ++a) {
      double row = 0.0;
      for (std::size_t b = 0; b < ys.size(); ++b) {
        const Jet j = f.jet(xs[a], ys[b]);
        const double fs = j.grad[0], fl = j.grad[1];
        const double cross = formula == CurvatureFormula::Standard ? j.hess(0, 1) : fl;
        const double g = 1.0 + fs * fs + fl * fl;
        // K dA = (det) / g^2 * sqrt(g)
        row += wy[b] * (j.hess(0, 0) * j.hess(1, 1) - cross * cross) / (g * std::sqrt(g));
      }
      total += ws[a] * row;
    }
    return total;
  };

  GaussBonnetResult r;
  r.density = density;
  r.coarse = integrate(density);
  r.value = integrate(2 * density);
  const double ref = std::max(std::abs(r.value), 1e-300);
  r.converged = std::abs(r.value - r.coarse) <= 0.01 * ref ||
                std::abs(r.value - r.coarse) <= 1e-12;
  return r;
}

double determinant_residual(const HamiltonianPath& path, double s, double lambda) {
  Matrix m = path.at(s);
  m.diagonal().array() -= lambda;
  return std::real(m.partialPivLu().determinant());
}

SpectrumTrace spectrum_trace(const CharPolyField& f, int s_samples, int max_refinements) {
  if (s_samples < 2) fail(ErrorCode::InvalidArgument, "need at least two s samples");
  const HamiltonianPath& path = f.path();
  const double a = path.s_lo(), b = path.s_hi();
  const int d = static_cast<int>(path.dim());

  struct Slice {
    double s;
    std::vector<double> mu;
  };
  auto diag = [&](double s) {
    return Slice{s, path_spectrum(path, s)};
  };
  auto gaps = [&](const std::vector<double>& mu) {
    std::vector<double> g(mu.size(), std::numeric_limits<double>::infinity());
    for (int i = 0; i + 1 < d; ++i) {
      const double gi = mu[i + 1] - mu[i];
      g[i] = std::min(g[i], gi);
      g[i + 1] = std::min(g[i + 1], gi);
    }
    return g;
  };

  SpectrumTrace out;
  out.branches.resize(d);
  for (int i = 0; i < d; ++i) {
    out.branches[i].index = i;
    out.branches[i].min_gap_to_next = std::numeric_limits<double>::infinity();
  }

  std::vector<Slice> slices;
  slices.push_back(diag(a));
  for (int k = 1; k < s_samples; ++k) {
    const double s1 = a + (b - a) * k / (s_samples - 1);
    // Depth-first refinement of [last, s1].
    std::vector<std::pair<Slice, int>> stack{{diag(s1), 0}};
    while (!stack.empty()) {
      const Slice& lo = slices.back();
      auto [hi, depth] = stack.back();
      const auto glo = gaps(lo.mu), ghi = gaps(hi.mu);
      bool refine = false;
      for (int i = 0; i < d; ++i)
        if (std::abs(hi.mu[i] - lo.mu[i]) > 0.5 * std::min(glo[i], ghi[i])) refine = true;
      if (refine && depth < max_refinements) {
        stack.push_back({diag(0.5 * (lo.s + hi.s)), depth + 1});
        stack[stack.size() - 2].second = depth + 1;
        continue;
      }
      if (refine) {
        // Nearest-value matching still ambiguous at the finest step.
        for (int i = 0; i < d; ++i) {
          int best = 0;
          for (int j = 1; j < d; ++j)
            if (std::abs(hi.mu[j] - lo.mu[i]) < std::abs(hi.mu[best] - lo.mu[i])) best = j;
          if (best != i) {
            out.branches[i].ambiguous = true;
            out.ambiguous = true;
          }
        }
      }
      slices.push_back(hi);
      stack.pop_back();
    }
  }

  for (const auto& sl : slices) {
    out.s.push_back(sl.s);
    for (int i = 0; i < d; ++i) {
      auto& br = out.branches[i];
      br.samples.emplace_back(sl.s, sl.mu[i]);
      const double res =
          std::abs(determinant_residual(path, sl.s, sl.mu[i])) / f.scale(sl.s, sl.mu[i]);
      br.max_residual = std::max(br.max_residual, res);
      if (i + 1 < d) {
        const double g = sl.mu[i + 1] - sl.mu[i];
        if (g < br.min_gap_to_next) {
          br.min_gap_to_next = g;
          br.s_at_min_gap = sl.s;
        }
      }
    }
  }
  return out;
}

}  // namespace adiamorse
