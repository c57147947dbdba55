#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/tools/roots.hpp>

#include "adiamorse/landscape.hpp"

namespace adiamorse {

const CriticalPoint* CriticalCensus::find(int id) const {
  for (const auto& p : points)
    if (p.id == id) return &p;
  return nullptr;
}

void CriticalCensus::recount() {
  n_min = n_saddle = n_max = n_degenerate = 0;
  for (const auto& p : points) {
    if (p.degenerate) {
      ++n_degenerate;
      continue;
    }
    if (p.index == 0) ++n_min;
    else if (p.index == 1) ++n_saddle;
    else ++n_max;
  }
  is_morse = n_degenerate == 0;
}

CriticalPoint classify(const Field& f, const Vec2& x, double degeneracy_tol) {
  if (!f.window().contains(x, 1e-9 * f.window().diag()))
    fail(ErrorCode::DomainError, "critical point outside field window");
  const Jet j = f.jet(x[0], x[1]);
  CriticalPoint p;
  p.location = x;
  p.value = j.value;
  p.hessian = 0.5 * (j.hess + j.hess.transpose());
  p.grad_norm = j.grad.norm();
  p.scale = j.scale;
  Eigen::SelfAdjointEigenSolver<Mat2> es(p.hessian, Eigen::EigenvaluesOnly);
  p.k1 = es.eigenvalues()[0];
  p.k2 = es.eigenvalues()[1];
  // Curvature is judged against the larger eigenvalue and against the field's
  // own scale over the window, so a uniformly flat Hessian is degenerate too.
  const double diag = f.window().diag();
  const double kref = std::max({std::abs(p.k1), std::abs(p.k2), j.scale / (diag * diag)});
  const double det = std::abs(p.k1 * p.k2);
  p.degenerate = det <= degeneracy_tol * kref * kref;
  p.borderline = !p.degenerate && det <= 100.0 * degeneracy_tol * kref * kref;
  p.index = (p.k1 < 0.0 ? 1 : 0) + (p.k2 < 0.0 ? 1 : 0);
  return p;
}

std::optional<Vec2> newton_critical(const Field& f, const Vec2& seed,
                                    double newton_tol, int max_iters) {
  const Window& w = f.window();
  const double diag = w.diag();
  Vec2 x = seed;
  double best = std::numeric_limits<double>::infinity();
  int stall = 0;
  double last_step = std::numeric_limits<double>::infinity();
  double gn = 0.0, scale = 1.0;
  for (int it = 0; it <= max_iters; ++it) {
    const Jet j = f.jet(x[0], x[1]);
    gn = j.grad.norm();
    scale = j.scale;
    if (!std::isfinite(gn) || !j.hess.allFinite()) return std::nullopt;
    if (gn == 0.0) return x;
    if (gn <= newton_tol * scale && last_step <= 1e-13 * diag) return x;
    if (it == max_iters) break;

    const double rel = gn / scale;
    if (rel < 0.5 * best) {
      best = rel;
      stall = 0;
    } else if (++stall > 20) {
      return std::nullopt;
    }

    Mat2 h = 0.5 * (j.hess + j.hess.transpose());
    Eigen::SelfAdjointEigenSolver<Mat2> es(h);
    Eigen::Vector2d ev = es.eigenvalues();
    const double emax = ev.cwiseAbs().maxCoeff();
    if (emax == 0.0) return std::nullopt;
    for (int i = 0; i < 2; ++i)
      if (std::abs(ev[i]) < 1e-14 * emax) ev[i] = std::copysign(1e-14 * emax, ev[i]);
    const Eigen::Matrix2d v = es.eigenvectors();
    Vec2 step = -(v * (v.transpose() * j.grad).cwiseQuotient(ev));

    const double fs = std::abs(step[0]) / (0.25 * w.width_s());
    const double fl = std::abs(step[1]) / (0.25 * w.width_l());
    const double over = std::max(fs, fl);
    if (over > 1.0) step /= over;
    x += step;
    last_step = step.norm();
    if (!w.contains(x, 0.05 * diag)) return std::nullopt;
  }
  if (gn <= newton_tol * scale) return x;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Ridge structure of Hermitian char-poly fields

double ridge_lambda(const std::vector<double>& mu, int i) {
  double lo = mu[i], hi = mu[i + 1];
  const double gap = hi - lo;
  if (!(gap > 1e-14 * (1.0 + std::abs(lo) + std::abs(hi)))) return 0.5 * (lo + hi);
  // phi(l) = sum 1/(mu_j - l) is increasing on (mu_i, mu_{i+1}) from -inf to +inf.
  auto phi = [&](double l, double* dphi) {
    double v = 0.0, d = 0.0;
    for (double m : mu) {
      const double r = 1.0 / (m - l);
      v += r;
      d += r * r;
    }
    *dphi = d;
    return v;
  };
  double l = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    double d = 0.0;
    const double v = phi(l, &d);
    if (v == 0.0) return l;
    if (v < 0.0) lo = l;
    else hi = l;
    double next = l - v / d;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - l) <= 4.0 * std::numeric_limits<double>::epsilon() *
                                  (std::abs(l) + gap) ||
        hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * (std::abs(l) + gap))
      return next;
    l = next;
  }
  return l;
}

namespace {

// d log|f| / ds along ridge i; NaN at an exact level crossing.
double ridge_slope(const CharPolyField::Slice& sl, int i, double* lambda_out) {
  const double gap = sl.mu[i + 1] - sl.mu[i];
  const double l = ridge_lambda(sl.mu, i);
  if (lambda_out) *lambda_out = l;
  if (!(gap > 1e-14 * (1.0 + std::abs(sl.mu[i]) + std::abs(sl.mu[i + 1]))))
    return std::numeric_limits<double>::quiet_NaN();
  double g = 0.0;
  for (std::size_t j = 0; j < sl.mu.size(); ++j) g += sl.dh[j] / (sl.mu[j] - l);
  return g;
}

std::vector<Vec2> ridge_seeds(const CharPolyField& f, int samples) {
  const Window& w = f.window();
  const int dim = f.path().dim();
  const int ridges = dim - 1;
  std::vector<Vec2> seeds;
  if (ridges < 1) return seeds;
  samples = std::max(samples, 16);
  std::vector<double> s(samples);
  std::vector<std::vector<double>> g(ridges, std::vector<double>(samples));
  std::vector<std::vector<double>> lam(ridges, std::vector<double>(samples));
  for (int k = 0; k < samples; ++k) {
    s[k] = w.s_lo + w.width_s() * k / (samples - 1);
    const auto sl = f.slice(s[k]);
    for (int i = 0; i < ridges; ++i) g[i][k] = ridge_slope(sl, i, &lam[i][k]);
  }
  auto slope_at = [&](int i, double ss, double* l) {
    return ridge_slope(f.slice(ss), i, l);
  };
  for (int i = 0; i < ridges; ++i) {
    for (int k = 0; k + 1 < samples; ++k) {
      const double a = g[i][k], b = g[i][k + 1];
      if (!std::isfinite(a)) {
        seeds.emplace_back(s[k], lam[i][k]);
        continue;
      }
      if (!std::isfinite(b)) continue;
      if ((a < 0.0) != (b < 0.0)) {
        auto fn = [&](double ss) {
          const double v = slope_at(i, ss, nullptr);
          return std::isfinite(v) ? v : 0.0;
        };
        boost::uintmax_t iters = 200;
        const auto tol = boost::math::tools::eps_tolerance<double>(50);
        double root;
        try {
          const auto r = boost::math::tools::toms748_solve(fn, s[k], s[k + 1], a, b, tol, iters);
          root = 0.5 * (r.first + r.second);
        } catch (const std::exception&) {
          root = 0.5 * (s[k] + s[k + 1]);
        }
        double l = 0.0;
        slope_at(i, root, &l);
        seeds.emplace_back(root, l);
      } else if (k > 0 && std::isfinite(g[i][k - 1]) &&
                 std::abs(a) < std::abs(g[i][k - 1]) && std::abs(a) < std::abs(b)) {
        // Close pair of critical points may hide between samples.
        seeds.emplace_back(s[k], lam[i][k]);
      }
    }
  }
  return seeds;
}

std::vector<Vec2> grid_seeds(const Window& w, int density) {
  std::vector<Vec2> seeds;
  seeds.reserve(std::size_t(density) * density);
  for (int a = 0; a < density; ++a)
    for (int b = 0; b < density; ++b)
      seeds.emplace_back(w.s_lo + w.width_s() * (a + 0.5) / density,
                         w.l_lo + w.width_l() * (b + 0.5) / density);
  return seeds;
}

struct Candidate {
  CriticalPoint point;
  double quality;  // |grad| / scale, smaller is better
};

CriticalCensus assemble(const Field& f, const std::vector<Vec2>& converged,
                        const CensusOptions& opt) {
  const Window& w = f.window();
  const double diag = w.diag();
  CriticalCensus c;
  c.merge_radius = opt.merge_radius_rel * diag;

  std::vector<Candidate> cands;
  for (const auto& x : converged) {
    if (w.edge_distance(x) < -1e-9 * diag) continue;
    Vec2 xc = x;
    xc[0] = std::clamp(xc[0], w.s_lo, w.s_hi);
    xc[1] = std::clamp(xc[1], w.l_lo, w.l_hi);
    auto p = classify(f, xc, opt.degeneracy_tol);
    cands.push_back({p, p.grad_norm / p.scale});
  }
  std::sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
    if (a.point.location[0] != b.point.location[0])
      return a.point.location[0] < b.point.location[0];
    return a.point.location[1] < b.point.location[1];
  });

  std::vector<Candidate> kept;
  for (auto& cand : cands) {
    bool merged = false;
    for (auto& k : kept) {
      const double d = (k.point.location - cand.point.location).norm();
      if (d > c.merge_radius) continue;
      // Two sharply converged nondegenerate roots are distinct points even
      // when closer than the merge radius.
      const bool sharp = !k.point.degenerate && !cand.point.degenerate;
      if (sharp && d > 1e-9 * diag) continue;
      if (cand.quality < k.quality) k = cand;
      merged = true;
      break;
    }
    if (!merged) kept.push_back(cand);
  }
  std::sort(kept.begin(), kept.end(), [](const Candidate& a, const Candidate& b) {
    if (a.point.location[0] != b.point.location[0])
      return a.point.location[0] < b.point.location[0];
    return a.point.location[1] < b.point.location[1];
  });
  for (auto& k : kept) {
    if (w.edge_distance(k.point.location) <= c.merge_radius)
      c.boundary_points.push_back(k.point);
    else
      c.points.push_back(k.point);
  }
  for (std::size_t i = 0; i < c.points.size(); ++i) c.points[i].id = int(i);
  for (std::size_t i = 0; i < c.boundary_points.size(); ++i)
    c.boundary_points[i].id = int(c.points.size() + i);
  c.recount();
  return c;
}

std::vector<Vec2> solve_seeds(const Field& f, const std::vector<Vec2>& seeds,
                              const CensusOptions& opt) {
  std::vector<Vec2> out;
  for (const auto& s : seeds)
    if (auto x = newton_critical(f, s, opt.newton_tol, opt.max_newton_iters)) out.push_back(*x);
  return out;
}

bool same_counts(const CriticalCensus& a, const CriticalCensus& b) {
  return a.n_min == b.n_min && a.n_saddle == b.n_saddle && a.n_max == b.n_max &&
         a.n_degenerate == b.n_degenerate;
}

}  // namespace

CriticalCensus find_critical_points(const Field& f, const CensusOptions& opt) {
  if (opt.grid_density < 8)
    fail(ErrorCode::InvalidArgument, "grid density must be >= 8 per axis");
  if (!(opt.newton_tol > 0.0) || !(opt.merge_radius_rel > 0.0))
    fail(ErrorCode::InvalidArgument, "census tolerances must be positive");

  std::vector<Vec2> ridge;
  if (opt.ridge_seeding) {
    if (auto cp = dynamic_cast<const CharPolyField*>(&f); cp && cp->path().hermitian())
      ridge = solve_seeds(f, ridge_seeds(*cp, opt.ridge_samples), opt);
  }

  auto run = [&](int density) {
    auto pts = solve_seeds(f, grid_seeds(f.window(), density), opt);
    pts.insert(pts.end(), ridge.begin(), ridge.end());
    return pts;
  };

  auto pool = run(opt.grid_density);
  CriticalCensus c = assemble(f, pool, opt);
  c.density_used = opt.grid_density;
  if (!opt.density_check) return c;

  const int half = std::max(8, opt.grid_density / 2);
  auto coarse_pool = run(half);
  const CriticalCensus coarse = assemble(f, coarse_pool, opt);
  if (same_counts(coarse, c)) {
    pool.insert(pool.end(), coarse_pool.begin(), coarse_pool.end());
    c = assemble(f, pool, opt);
    c.density_used = opt.grid_density;
    c.density_stable = true;
    return c;
  }
  auto fine_pool = run(2 * opt.grid_density);
  const CriticalCensus fine = assemble(f, fine_pool, opt);
  const bool stable = same_counts(fine, c);
  pool.insert(pool.end(), coarse_pool.begin(), coarse_pool.end());
  pool.insert(pool.end(), fine_pool.begin(), fine_pool.end());
  c = assemble(f, pool, opt);
  c.density_used = 2 * opt.grid_density;
  c.density_stable = stable;
  return c;
}

bool RidgeEdgeSigns::certified() const {
  for (double v : left)
    if (!(v < 0.0)) return false;
  for (double v : right)
    if (!(v > 0.0)) return false;
  return true;
}

RidgeEdgeSigns ridge_edge_signs(const CharPolyField& f) {
  RidgeEdgeSigns out;
  const auto a = f.slice(f.window().s_lo);
  const auto b = f.slice(f.window().s_hi);
  for (int i = 0; i + 1 < f.path().dim(); ++i) {
    out.left.push_back(ridge_slope(a, i, nullptr));
    out.right.push_back(ridge_slope(b, i, nullptr));
  }
  return out;
}

// ---------------------------------------------------------------------------
// k-fold saddles

KFoldResult detect_kfold(const Field& f, const CriticalPoint& p, double sample_radius,
                         double fit_tol) {
  if (!p.degenerate)
    fail(ErrorCode::InvalidArgument,
         "detect_kfold precondition violated: critical point is not degenerate");
  constexpr int kMaxDegree = 5;
  const double rho = sample_radius > 0.0 ? sample_radius : 0.02 * f.window().diag();

  // Monomials u^a v^b with a + b <= 5 in local coordinates scaled by rho.
  std::vector<std::pair<int, int>> mono;
  for (int m = 0; m <= kMaxDegree; ++m)
    for (int b = 0; b <= m; ++b) mono.emplace_back(m - b, b);

  constexpr int kRings = 6, kAngles = 48;
  const int rows = 1 + kRings * kAngles;
  Eigen::MatrixXd a(rows, int(mono.size()));
  Eigen::VectorXd y(rows);
  int r = 0;
  auto add_row = [&](double u, double v) {
    for (std::size_t c = 0; c < mono.size(); ++c)
      a(r, int(c)) = std::pow(u, mono[c].first) * std::pow(v, mono[c].second);
    y[r] = f.value(p.s() + rho * u, p.lambda() + rho * v);
    ++r;
  };
  add_row(0.0, 0.0);
  for (int ring = 1; ring <= kRings; ++ring)
    for (int t = 0; t < kAngles; ++t) {
      const double rad = double(ring) / kRings;
      const double phi = 2.0 * std::numbers::pi * t / kAngles;
      add_row(rad * std::cos(phi), rad * std::sin(phi));
    }
  const Eigen::VectorXd coef = a.colPivHouseholderQr().solve(y);

  // Norm of each homogeneous part sampled on the unit circle.
  constexpr int kCircle = 64;
  std::vector<Eigen::VectorXd> parts(kMaxDegree + 1, Eigen::VectorXd::Zero(kCircle));
  for (std::size_t c = 0; c < mono.size(); ++c) {
    const int deg = mono[c].first + mono[c].second;
    for (int t = 0; t < kCircle; ++t) {
      const double phi = 2.0 * std::numbers::pi * t / kCircle;
      parts[deg][t] += coef[int(c)] * std::pow(std::cos(phi), mono[c].first) *
                       std::pow(std::sin(phi), mono[c].second);
    }
  }
  double total = 0.0;
  for (int m = 1; m <= kMaxDegree; ++m) total = std::max(total, parts[m].norm());

  KFoldResult out;
  if (total == 0.0) return out;
  int lead = 0;
  for (int m = 1; m <= kMaxDegree; ++m)
    if (parts[m].norm() > 1e-6 * total) {
      lead = m;
      break;
    }
  out.leading_degree = lead;
  if (lead < 3) return out;

  // Project the leading part onto span{cos m phi, sin m phi}.
  Eigen::MatrixXd basis(kCircle, 2);
  for (int t = 0; t < kCircle; ++t) {
    const double phi = 2.0 * std::numbers::pi * t / kCircle;
    basis(t, 0) = std::cos(lead * phi);
    basis(t, 1) = std::sin(lead * phi);
  }
  const Eigen::Vector2d ab = basis.colPivHouseholderQr().solve(parts[lead]);
  out.harmonic_residual = (parts[lead] - basis * ab).norm() / parts[lead].norm();
  if (out.harmonic_residual <= fit_tol) out.k = lead - 1;
  return out;
}

PerturbResult perturb_split(const FieldPtr& f, const CriticalPoint& p, double eps,
                            double radius, const CensusOptions& opt) {
  if (!(radius > 0.0)) fail(ErrorCode::InvalidArgument, "neighbourhood radius must be positive");
  if (eps < 0.0) fail(ErrorCode::InvalidArgument, "perturbation must be non-negative");
  Window box{p.s() - radius, p.s() + radius, p.lambda() - radius, p.lambda() + radius};

  PerturbResult out;
  out.neighborhood_radius = radius;
  if (eps == 0.0) {
    out.field = f;
    out.local = find_critical_points(*f->with_window(box), opt);
    return out;
  }
  const auto kf = detect_kfold(*f, p);
  if (!kf.k) fail(ErrorCode::InvalidArgument, "perturb_split needs a k-fold saddle");

  auto tilted = std::make_shared<TiltedField>(f, eps, p.s());
  out.field = tilted;
  out.local = find_critical_points(*tilted->with_window(box), opt);

  const int k = *kf.k;
  bool ok = out.local.boundary_points.empty() && out.local.total() == k &&
            out.local.n_saddle == k;
  // Points crowding the neighbourhood edge are on their way out.
  for (const auto& q : out.local.points)
    if (box.edge_distance(q.location) < 0.05 * radius) ok = false;
  if (!ok)
    fail(ErrorCode::PerturbationTooLarge,
         "perturbed critical points are not k nondegenerate saddles inside the neighbourhood");
  return out;
}

}  // namespace adiamorse
