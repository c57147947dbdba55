#include "adiamorse/pspin.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>

#include <boost/math/tools/minima.hpp>

namespace adiamorse {

namespace {
constexpr double kPi = std::numbers::pi;

// Local minimum on [a, b]; Brent's method (golden section plus parabolic steps).
double refine_minimum(const ClassicalEnergy& e, double s, double a, double b) {
  auto f = [&](double t) { return e(s, t); };
  double t = boost::math::tools::brent_find_minima(f, a, b, 40).first;
  // Brent never returns the bracket ends; a minimum on the domain edge
  // would otherwise come back sqrt(eps) inside it.
  for (double end : {0.0, kPi})
    if ((a == end || b == end) && f(end) <= f(t)) t = end;
  return t;
}

// Walks downhill from theta in small steps, then refines.
double local_minimizer(const ClassicalEnergy& e, double s, double theta) {
  constexpr double h = 1e-3;
  const double up = e(s, std::min(theta + h, kPi));
  const double dn = e(s, std::max(theta - h, 0.0));
  const double here = e(s, theta);
  if (here <= up && here <= dn)
    return refine_minimum(e, s, std::max(theta - h, 0.0), std::min(theta + h, kPi));
  const double dir = up < dn ? 1.0 : -1.0;
  double x = theta, fx = here;
  while (true) {
    const double nx = std::clamp(x + dir * h, 0.0, kPi);
    const double fn = e(s, nx);
    if (fn >= fx || nx == x) break;
    x = nx;
    fx = fn;
  }
  return refine_minimum(e, s, std::max(x - h, 0.0), std::min(x + h, kPi));
}
}  // namespace

double ClassicalEnergy::operator()(double s, double theta) const {
  const double c = std::cos(theta), sn = std::sin(theta);
  return -s * b * std::pow(sn, p) + s * (1.0 - b) * std::pow(c, k) - (1.0 - s) * c;
}

double classical_minimizer(const ClassicalEnergy& e, double s, int theta_grid) {
  if (!(s > 0.0 && s <= 1.0)) fail(ErrorCode::InvalidArgument, "s must lie in (0, 1]");
  if (theta_grid < 3) fail(ErrorCode::InvalidArgument, "theta grid too coarse");
  std::vector<double> val(theta_grid + 1);
  for (int i = 0; i <= theta_grid; ++i) val[i] = e(s, kPi * i / theta_grid);
  double best_theta = 0.0, best = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= theta_grid; ++i) {
    const bool left = i == 0 || val[i] <= val[i - 1];
    const bool right = i == theta_grid || val[i] <= val[i + 1];
    if (!(left && right)) continue;
    const double a = kPi * std::max(i - 1, 0) / theta_grid;
    const double b = kPi * std::min(i + 1, theta_grid) / theta_grid;
    const double t = refine_minimum(e, s, a, b);
    const double v = e(s, t);
    if (!std::isfinite(best) || v < best - 1e-13 * (1.0 + std::abs(best))) {
      best = v;
      best_theta = t;
    }
  }
  return best_theta;
}

std::vector<Transition> transition_locator(const ClassicalEnergy& e, double s_resolution,
                                           TransitionMode mode, double jump_threshold) {
  if (!(s_resolution > 0.0 && s_resolution <= 1e-3))
    fail(ErrorCode::InvalidArgument, "s resolution must be in (0, 1e-3]");
  const int n = static_cast<int>(std::ceil(1.0 / s_resolution));
  std::vector<double> s(n), th(n);
  // Descending s from 1 to s_resolution.
  for (int i = 0; i < n; ++i) s[i] = 1.0 - i * (1.0 - s_resolution) / (n - 1);
  th[0] = classical_minimizer(e, s[0]);
  for (int i = 1; i < n; ++i)
    th[i] = mode == TransitionMode::Global ? classical_minimizer(e, s[i])
                                           : local_minimizer(e, s[i], th[i - 1]);
  std::vector<Transition> out;
  for (int i = n - 1; i > 0; --i) {
    const double jump = std::abs(th[i - 1] - th[i]);
    if (jump > jump_threshold) out.push_back({0.5 * (s[i] + s[i - 1]), jump});
  }
  return out;
}

BSweepRecord pspin_record(int n, int p, int k, double b, const BSweepOptions& opt) {
  if (n > 12) fail(ErrorCode::InvalidArgument, "b sweep is limited to n <= 12");
  if (!(opt.s_margin_start > 0.0) || !(opt.l_margin > 0.0))
    fail(ErrorCode::InvalidArgument, "window margins must be positive");
  auto path = std::make_shared<HamiltonianPath>(build_pspin(n, p, b, k));
  BSweepRecord rec;
  rec.b = b;
  std::shared_ptr<CharPolyField> field;
  for (double m = opt.s_margin_start; m <= opt.s_margin_max; m *= 2.0) {
    field = std::make_shared<CharPolyField>(path, window_from_path(*path, m, opt.l_margin));
    if (ridge_edge_signs(*field).certified()) {
      rec.window_certified = true;
      break;
    }
  }
  rec.window = field->window();
  rec.census = find_critical_points(*field, opt.census);
  rec.n_min = rec.census.n_min;
  rec.n_saddle = rec.census.n_saddle;
  rec.n_max = rec.census.n_max;
  if (!rec.census.is_morse) {
    rec.flagged = true;
    rec.flag_reason = "degenerate critical point";
  } else if (!rec.window_certified) {
    rec.flagged = true;
    rec.flag_reason = "window edges not certified";
  } else if (!rec.census.boundary_points.empty()) {
    rec.flagged = true;
    rec.flag_reason = "critical point on the window boundary";
  }
  if (!rec.flagged) rec.chi = rec.census.euler();
  return rec;
}

std::vector<double> uniform_b_grid(int points) {
  if (points < 1) fail(ErrorCode::InvalidArgument, "b grid needs at least one point");
  if (points == 1) return {1.0};
  std::vector<double> g(points);
  for (int i = 0; i < points; ++i) g[i] = double(i) / (points - 1);
  return g;
}

std::vector<BSweepRecord> b_sweep(int n, int p, int k, const std::vector<double>& b_grid,
                                  const BSweepOptions& opt) {
  if (b_grid.empty()) fail(ErrorCode::InvalidArgument, "empty b grid");
  for (double b : b_grid)
    if (!(b >= 0.0 && b <= 1.0)) fail(ErrorCode::InvalidArgument, "b grid must lie in [0, 1]");
  std::vector<double> grid = b_grid;
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  std::vector<BSweepRecord> recs;
  for (double b : grid) recs.push_back(pspin_record(n, p, k, b, opt));

  std::vector<double> extra;
  for (std::size_t i = 0; i < recs.size(); ++i) {
    if (!recs[i].flagged || opt.refine_points <= 0) continue;
    const double lo = i > 0 ? grid[i - 1] : grid[i];
    const double hi = i + 1 < grid.size() ? grid[i + 1] : grid[i];
    if (!(hi > lo)) continue;
    for (int j = 1; j <= opt.refine_points; ++j) {
      const double b = lo + (hi - lo) * j / (opt.refine_points + 1);
      if (std::none_of(grid.begin(), grid.end(), [&](double g) { return std::abs(g - b) < 1e-12; }))
        extra.push_back(b);
    }
  }
  std::sort(extra.begin(), extra.end());
  extra.erase(std::unique(extra.begin(), extra.end()), extra.end());
  for (double b : extra) {
    recs.push_back(pspin_record(n, p, k, b, opt));
    recs.back().refinement = true;
  }
  std::stable_sort(recs.begin(), recs.end(),
                   [](const BSweepRecord& a, const BSweepRecord& b) { return a.b < b.b; });
  return recs;
}

HomotopyVerdict homotopy_check(const std::vector<BSweepRecord>& records) {
  std::vector<const BSweepRecord*> good;
  for (const auto& r : records)
    if (!r.flagged && r.chi) good.push_back(&r);
  if (good.size() < 2) fail(ErrorCode::InvalidArgument, "need at least two unflagged records");
  std::sort(good.begin(), good.end(),
            [](const BSweepRecord* a, const BSweepRecord* b) { return a->b < b->b; });
  HomotopyVerdict v;
  v.chi = good.front()->chi;
  for (std::size_t i = 1; i < good.size(); ++i) {
    const auto& a = *good[i - 1];
    const auto& b = *good[i];
    if (*a.chi != *b.chi) {
      v.b_from = a.b;
      v.b_to = b.b;
      v.reason = "Euler characteristic changes from " + std::to_string(*a.chi) + " to " +
                 std::to_string(*b.chi);
      v.chi.reset();
      return v;
    }
    if ((a.total() - b.total()) % 2 != 0) {
      v.b_from = a.b;
      v.b_to = b.b;
      v.reason = "critical count changes by an odd number";
      return v;
    }
  }
  v.pass = true;
  return v;
}

}  // namespace adiamorse
