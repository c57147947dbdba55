#include "adiamorse/morse.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "adiamorse/geometry.hpp"

namespace adiamorse {

const char* to_string(FlowDirection d) {
  return d == FlowDirection::Downward ? "downward" : "upward";
}

const char* to_string(TerminusKind k) {
  switch (k) {
    case TerminusKind::CriticalPoint: return "critical-point";
    case TerminusKind::BoundaryExit: return "boundary-exit";
    case TerminusKind::Unresolved: return "unresolved";
  }
  return "unresolved";
}

const char* to_string(WindowEdge e) {
  switch (e) {
    case WindowEdge::None: return "none";
    case WindowEdge::SLo: return "s_lo";
    case WindowEdge::SHi: return "s_hi";
    case WindowEdge::LambdaLo: return "lambda_lo";
    case WindowEdge::LambdaHi: return "lambda_hi";
  }
  return "none";
}

FlowContext make_flow_context(const Field& f, const CriticalCensus& census,
                              const FlowOptions& opt) {
  if (!(opt.rtol > 0.0) || !(opt.capture_radius_rel > 0.0) || !(opt.launch_offset_rel > 0.0))
    fail(ErrorCode::InvalidArgument, "flow tolerances must be positive");
  FlowContext ctx;
  ctx.field = &f;
  ctx.census = &census;
  ctx.options = opt;
  const Window& w = f.window();

  std::vector<double> speeds;
  constexpr int kGrid = 16;
  for (int a = 0; a < kGrid; ++a)
    for (int b = 0; b < kGrid; ++b) {
      const double g = f.gradient(w.s_lo + w.width_s() * (a + 0.5) / kGrid,
                                  w.l_lo + w.width_l() * (b + 0.5) / kGrid)
                           .norm();
      if (std::isfinite(g) && g > 0.0) speeds.push_back(g);
    }
  if (!speeds.empty()) {
    std::nth_element(speeds.begin(), speeds.begin() + speeds.size() / 2, speeds.end());
    ctx.speed_cap = speeds[speeds.size() / 2];
  }
  // Travel at the cap plus escape from a saddle, ~ log(r / delta) / |k|.
  ctx.tau_max = opt.tau_span * w.diag() / ctx.speed_cap;
  double kmin = std::numeric_limits<double>::infinity();
  for (const auto& p : census.points)
    if (!p.degenerate) kmin = std::min({kmin, std::abs(p.k1), std::abs(p.k2)});
  if (std::isfinite(kmin) && kmin > 0.0) ctx.tau_max += 2.0 * opt.tau_span / kmin;

  const double base = opt.capture_radius_rel * w.diag();
  ctx.capture_radius.assign(census.points.size(), base);
  for (std::size_t i = 0; i < census.points.size(); ++i)
    for (std::size_t j = 0; j < census.points.size(); ++j)
      if (i != j) {
        const double d = (census.points[i].location - census.points[j].location).norm();
        ctx.capture_radius[i] = std::min(ctx.capture_radius[i], 0.25 * d);
      }
  return ctx;
}

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

WindowEdge exit_point(const Window& w, const Vec2& a, const Vec2& b, Vec2* hit) {
  double t_best = 2.0;
  WindowEdge edge = WindowEdge::None;
  auto consider = [&](double from, double to, double bound, WindowEdge e) {
    if ((to - bound) * (from - bound) < 0.0 || (to == bound && from != bound)) {
      const double t = (bound - from) / (to - from);
      if (t < t_best) {
        t_best = t;
        edge = e;
      }
    }
  };
  consider(a[0], b[0], w.s_lo, WindowEdge::SLo);
  consider(a[0], b[0], w.s_hi, WindowEdge::SHi);
  consider(a[1], b[1], w.l_lo, WindowEdge::LambdaLo);
  consider(a[1], b[1], w.l_hi, WindowEdge::LambdaHi);
  if (edge == WindowEdge::None) {
    // Started outside; report the side it is on.
    *hit = b;
    if (b[0] < w.s_lo) return WindowEdge::SLo;
    if (b[0] > w.s_hi) return WindowEdge::SHi;
    if (b[1] < w.l_lo) return WindowEdge::LambdaLo;
    return WindowEdge::LambdaHi;
  }
  *hit = a + t_best * (b - a);
  return edge;
}

}  // namespace

Trajectory integrate_flow(const FlowContext& ctx, const Vec2& start, FlowDirection dir,
                          int origin) {
  const Field& f = *ctx.field;
  const Window& w = f.window();
  const auto& opt = ctx.options;
  const double sign = dir == FlowDirection::Downward ? -1.0 : 1.0;
  const double cap = ctx.speed_cap;

  if (!w.contains(start)) fail(ErrorCode::DomainError, "flow start outside window");
  {
    const Jet j0 = f.jet(start[0], start[1]);
    if (j0.grad.norm() <= 1e-10 * j0.scale)
      fail(ErrorCode::InvalidArgument, "flow start is a critical point");
  }

  auto rhs = [&](const Vec2& x) -> Vec2 {
    const Vec2 g = f.gradient(x[0], x[1]);
    const double n = g.norm();
    return sign * g / std::max(1.0, n / cap);
  };

  Trajectory tr;
  tr.origin = origin;
  tr.direction = dir;
  const double min_spacing = w.diag() / double(std::max(opt.max_samples, 16));
  auto push = [&](const Vec2& x, double tau, bool force) {
    if (!force && !tr.samples.empty()) {
      const auto& last = tr.samples.back();
      if (std::hypot(x[0] - last.s, x[1] - last.lambda) < min_spacing) return;
    }
    tr.samples.push_back({x[0], x[1], tau, f.value(x[0], x[1])});
  };

  // Saddle capture only along the stable direction of the flow.
  struct Target {
    Vec2 loc;
    double radius;
    int id;
    bool saddle;
    Vec2 unstable;
  };
  std::vector<Target> targets;
  for (std::size_t i = 0; i < ctx.census->points.size(); ++i) {
    const auto& p = ctx.census->points[i];
    if (p.id == origin || p.degenerate) continue;
    const bool attractor = dir == FlowDirection::Downward ? p.index == 0 : p.index == 2;
    if (!attractor && p.index != 1) continue;
    Target t{p.location, ctx.capture_radius[i], p.id, p.index == 1, Vec2::Zero()};
    if (t.saddle) {
      Eigen::SelfAdjointEigenSolver<Mat2> es(p.hessian);
      // Downward flow escapes a saddle along the negative-curvature direction.
      t.unstable = dir == FlowDirection::Downward ? Vec2(es.eigenvectors().col(0))
                                                  : Vec2(es.eigenvectors().col(1));
    }
    targets.push_back(t);
  }

  Vec2 x = start;
  double tau = 0.0;
  double h = 1e-3 * w.diag() / cap;
  const Vec2 atol(opt.rtol * w.width_s(), opt.rtol * w.width_l());
  push(x, tau, true);
  Vec2 k1 = rhs(x);

  for (int step = 0; step < opt.max_steps && tau < ctx.tau_max; ++step) {
    const Vec2 k2 = rhs(x + h * (a21 * k1));
    const Vec2 k3 = rhs(x + h * (a31 * k1 + a32 * k2));
    const Vec2 k4 = rhs(x + h * (a41 * k1 + a42 * k2 + a43 * k3));
    const Vec2 k5 = rhs(x + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const Vec2 k6 = rhs(x + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    const Vec2 xn = x + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const Vec2 k7 = rhs(xn);
    const Vec2 err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    double en = 0.0;
    for (int i = 0; i < 2; ++i) {
      const double sc = atol[i] + opt.rtol * std::max(std::abs(x[i]), std::abs(xn[i]));
      en = std::max(en, std::abs(err[i]) / sc);
    }
    if (!std::isfinite(en)) {
      h *= 0.1;
      continue;
    }
    if (en > 1.0) {
      h *= std::max(0.1, 0.9 * std::pow(en, -0.2));
      continue;
    }
    ++tr.steps;
    const Vec2 prev = x;
    x = xn;
    tau += h;
    k1 = k7;
    h *= std::min(5.0, std::max(0.2, 0.9 * std::pow(std::max(en, 1e-10), -0.2)));

    if (!w.contains(x)) {
      Vec2 hit;
      tr.exit_edge = exit_point(w, prev, x, &hit);
      hit[0] = std::clamp(hit[0], w.s_lo, w.s_hi);
      hit[1] = std::clamp(hit[1], w.l_lo, w.l_hi);
      push(hit, tau, true);
      tr.kind = TerminusKind::BoundaryExit;
      return tr;
    }
    push(x, tau, false);
    for (const auto& t : targets) {
      const Vec2 d = x - t.loc;
      if (d.norm() > t.radius) continue;
      if (t.saddle && std::abs(d.dot(t.unstable)) > 0.05 * t.radius) continue;
      tr.kind = TerminusKind::CriticalPoint;
      tr.terminus = t.id;
      push(x, tau, true);
      return tr;
    }
  }
  push(x, tau, true);
  tr.kind = TerminusKind::Unresolved;
  return tr;
}

std::array<Trajectory, 4> separatrices(const FlowContext& ctx, const CriticalPoint& saddle) {
  if (saddle.index != 1 || saddle.degenerate)
    fail(ErrorCode::InvalidArgument, "separatrices need a nondegenerate saddle");
  const Field& f = *ctx.field;
  Eigen::SelfAdjointEigenSolver<Mat2> es(saddle.hessian);
  const Vec2 down = es.eigenvectors().col(0);  // k1 < 0
  const Vec2 up = es.eigenvectors().col(1);    // k2 > 0

  double delta = ctx.options.launch_offset_rel * f.window().diag();
  for (std::size_t i = 0; i < ctx.census->points.size(); ++i)
    if (ctx.census->points[i].id == saddle.id)
      delta = std::min(delta, 0.5 * ctx.capture_radius[i]);

  // Shrink the offset until every launch point sits on the expected side of f(q).
  auto launch = [&](const Vec2& dirv, double sgn, bool lower) {
    double d = delta;
    Vec2 x = saddle.location + sgn * d * dirv;
    for (int it = 0; it < 12; ++it) {
      x = saddle.location + sgn * d * dirv;
      const double fx = f.value(x[0], x[1]);
      if (lower ? fx < saddle.value : fx > saddle.value) break;
      d *= 0.1;
    }
    return x;
  };
  return {
      integrate_flow(ctx, launch(down, 1.0, true), FlowDirection::Downward, saddle.id),
      integrate_flow(ctx, launch(down, -1.0, true), FlowDirection::Downward, saddle.id),
      integrate_flow(ctx, launch(up, 1.0, false), FlowDirection::Upward, saddle.id),
      integrate_flow(ctx, launch(up, -1.0, false), FlowDirection::Upward, saddle.id),
  };
}

InstantonCount count_instantons(const FlowContext& ctx) {
  const auto& census = *ctx.census;
  if (!census.is_morse)
    fail(ErrorCode::InvalidArgument, "instanton counting needs a Morse census");
  InstantonCount out;
  std::map<std::pair<int, int>, InstantonEdge> acc;
  for (const auto& q : census.points) {
    if (q.index != 1) continue;
    for (auto& tr : separatrices(ctx, q)) {
      if (tr.kind == TerminusKind::Unresolved) {
        out.certifiable = false;
        out.issues.push_back("unresolved separatrix from critical point " +
                             std::to_string(q.id));
      } else if (tr.kind == TerminusKind::CriticalPoint) {
        const CriticalPoint* p = census.find(tr.terminus);
        if (p->index == 1) {
          out.certifiable = false;
          out.issues.push_back("saddle-saddle connection " + std::to_string(q.id) + " -> " +
                               std::to_string(p->id) + "; tilt the field slightly");
        } else {
          // Downward lands on a minimum: edge saddle -> min.
          // Upward lands on a maximum: edge max -> saddle.
          const auto key = tr.direction == FlowDirection::Downward
                               ? std::make_pair(q.id, p->id)
                               : std::make_pair(p->id, q.id);
          auto& e = acc[key];
          if (e.count == 0) {
            e.from = key.first;
            e.to = key.second;
            e.representative = tr;
          }
          ++e.count;
        }
      }
      out.trajectories.push_back(std::move(tr));
    }
  }
  for (auto& [key, e] : acc) {
    e.multiplicity_mod2 = static_cast<std::uint8_t>(e.count % 2);
    out.edges.push_back(std::move(e));
  }
  return out;
}

int gf2_rank(Gf2Matrix m) {
  if (m.empty()) return 0;
  const std::size_t rows = m.size(), cols = m[0].size();
  std::size_t rank = 0;
  for (std::size_t c = 0; c < cols && rank < rows; ++c) {
    std::size_t piv = rank;
    while (piv < rows && !m[piv][c]) ++piv;
    if (piv == rows) continue;
    std::swap(m[piv], m[rank]);
    for (std::size_t r = 0; r < rows; ++r)
      if (r != rank && m[r][c])
        for (std::size_t k = c; k < cols; ++k) m[r][k] ^= m[rank][k];
    ++rank;
  }
  return int(rank);
}

Gf2Matrix gf2_multiply(const Gf2Matrix& a, const Gf2Matrix& b, int inner) {
  const std::size_t rows = a.size();
  const std::size_t cols = b.empty() ? 0 : b[0].size();
  Gf2Matrix out(rows, std::vector<std::uint8_t>(cols, 0));
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) {
      std::uint8_t v = 0;
      for (int k = 0; k < inner; ++k) v ^= a[i][k] & b[k][j];
      out[i][j] = v;
    }
  return out;
}

MorseComplex build_complex(const CriticalCensus& census,
                           const std::vector<InstantonEdge>& edges) {
  if (!census.is_morse) fail(ErrorCode::InvalidArgument, "Morse complex needs a Morse census");
  MorseComplex c;
  for (const auto& p : census.points) c.generators[p.index].push_back(p.id);
  auto pos = [](const std::vector<int>& g, int id) {
    return int(std::find(g.begin(), g.end(), id) - g.begin());
  };
  const std::size_t nmin = c.generators[0].size(), nsad = c.generators[1].size(),
                    nmax = c.generators[2].size();
  c.d1.assign(nmin, std::vector<std::uint8_t>(nsad, 0));
  c.d2.assign(nsad, std::vector<std::uint8_t>(nmax, 0));
  for (const auto& e : edges) {
    const CriticalPoint* from = census.find(e.from);
    const CriticalPoint* to = census.find(e.to);
    if (!from || !to || from->index - to->index != 1)
      fail(ErrorCode::InternalConsistency, "instanton edge does not lower the index by one");
    if (from->index == 1)
      c.d1[pos(c.generators[0], to->id)][pos(c.generators[1], from->id)] ^= e.multiplicity_mod2;
    else
      c.d2[pos(c.generators[1], to->id)][pos(c.generators[2], from->id)] ^= e.multiplicity_mod2;
  }
  const auto dd = gf2_multiply(c.d1, c.d2, int(nsad));
  for (const auto& row : dd)
    for (auto v : row)
      if (v) fail(ErrorCode::InternalConsistency, "boundary operator does not square to zero");
  return c;
}

HomologySummary homology(const MorseComplex& c) {
  const int n0 = int(c.generators[0].size());
  const int n1 = int(c.generators[1].size());
  const int n2 = int(c.generators[2].size());
  const auto dd = gf2_multiply(c.d1, c.d2, n1);
  for (const auto& row : dd)
    for (auto v : row)
      if (v) fail(ErrorCode::InvalidArgument, "homology needs d1 d2 = 0");
  const int r1 = gf2_rank(c.d1);
  const int r2 = gf2_rank(c.d2);
  HomologySummary h;
  h.betti[0] = n0 - r1;
  h.betti[1] = (n1 - r1) - r2;
  h.betti[2] = n2 - r2;
  h.euler = h.betti[0] - h.betti[1] + h.betti[2];
  h.euler_counts = n0 - n1 + n2;
  h.handles = {n0, n1, n2};
  if (h.euler != h.euler_counts)
    fail(ErrorCode::InternalConsistency, "Euler characteristic from Betti numbers disagrees "
                                         "with the critical-point count");
  return h;
}

CriticalNetwork critical_network(const CriticalCensus& census,
                                 const std::vector<InstantonEdge>& edges,
                                 const std::vector<CurvatureReport>& curvature) {
  CriticalNetwork net;
  for (const auto& p : census.points) {
    NetworkNode node{&p, nullptr};
    for (const auto& r : curvature)
      if (r.point_id == p.id) node.curvature = &r;
    net.nodes.push_back(node);
  }
  for (const auto& e : edges) net.edges.push_back(&e);
  return net;
}

}  // namespace adiamorse
