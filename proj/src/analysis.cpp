#include "adiamorse/analysis.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <set>

#include "json.hpp"

namespace adiamorse {

using nlohmann::json;

const char* version() { return ADIAMORSE_VERSION; }

namespace {

[[noreturn]] void bad_config(const std::string& msg) {
  throw Error(ErrorCode::InvalidArgument, msg, "config");
}

void check_keys(const json& obj, const std::string& where, std::initializer_list<const char*> keys) {
  if (!obj.is_object()) bad_config(where + " must be an object");
  std::set<std::string> allowed(keys.begin(), keys.end());
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!allowed.count(it.key())) bad_config("unknown key '" + it.key() + "' in " + where);
}

double get_number(const json& obj, const char* key, const std::string& where) {
  const json& v = obj.at(key);
  if (!v.is_number()) bad_config(where + "." + key + " must be a number");
  return v.get<double>();
}

long long get_integer(const json& obj, const char* key, const std::string& where) {
  const json& v = obj.at(key);
  if (!v.is_number_integer()) bad_config(where + "." + key + " must be an integer");
  return v.get<long long>();
}

bool get_bool(const json& obj, const char* key, const std::string& where) {
  const json& v = obj.at(key);
  if (!v.is_boolean()) bad_config(where + "." + key + " must be a boolean");
  return v.get<bool>();
}

RealMatrix get_matrix(const json& v, const std::string& where) {
  if (!v.is_array() || v.empty()) bad_config(where + " must be a non-empty array of rows");
  const std::size_t n = v.size();
  RealMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!v[i].is_array() || v[i].size() != n) bad_config(where + " must be square");
    for (std::size_t j = 0; j < n; ++j) {
      if (!v[i][j].is_number()) bad_config(where + " entries must be numbers");
      m(i, j) = v[i][j].get<double>();
    }
  }
  return m;
}

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) bad_config(std::string(name) + " must be positive");
}

void validate(const AnalysisConfig& c) {
  const auto& t = c.tolerances;
  require_positive(t.newton_tol, "newton_tol");
  require_positive(t.merge_radius, "merge_radius");
  require_positive(t.capture_radius, "capture_radius");
  require_positive(t.flow_rtol, "flow_rtol");
  require_positive(t.degeneracy_tol, "degeneracy_tol");
  require_positive(t.quadrature_density, "quadrature_density");
  require_positive(t.seed_density, "seed_density");
  require_positive(c.window.s_margin, "s_margin");
  require_positive(c.window.l_margin, "l_margin");
  if (c.outputs.spectrum_samples < 2) bad_config("spectrum_samples must be at least 2");
  const auto& w = c.window;
  const int set = int(bool(w.s_lo)) + bool(w.s_hi) + bool(w.l_lo) + bool(w.l_hi);
  if (set != 0 && set != 4) bad_config("window bounds must be given all four or none");
  if (set == 4 && !(*w.s_lo < *w.s_hi && *w.l_lo < *w.l_hi)) bad_config("empty window");
  if (c.model.kind == "polynomial" && set != 4) bad_config("polynomial fields need a window");
}

}  // namespace

AnalysisConfig parse_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    bad_config(std::string("malformed JSON: ") + e.what());
  }
  AnalysisConfig c;
  check_keys(root, "config", {"model", "window", "tolerances", "outputs", "output_dir"});
  if (!root.contains("model")) bad_config("config.model is required");
  const json& m = root["model"];
  if (!m.is_object() || !m.contains("kind") || !m["kind"].is_string())
    bad_config("model.kind is required");
  c.model.kind = m["kind"].get<std::string>();
  auto& mc = c.model;
  if (mc.kind == "grover") {
    check_keys(m, "model", {"kind", "N", "basis"});
    if (!m.contains("N")) bad_config("model.N is required");
    mc.N = get_integer(m, "N", "model");
    if (m.contains("basis")) {
      const json& b = m["basis"];
      if (b == "printed") mc.basis = GroverBasis::Printed;
      else if (b == "orthonormal") mc.basis = GroverBasis::Orthonormal;
      else bad_config("model.basis must be 'printed' or 'orthonormal'");
    }
  } else if (mc.kind == "pspin") {
    check_keys(m, "model", {"kind", "n", "p", "b", "k"});
    for (const char* key : {"n", "p", "b"})
      if (!m.contains(key)) bad_config(std::string("model.") + key + " is required");
    mc.n = int(get_integer(m, "n", "model"));
    mc.p = int(get_integer(m, "p", "model"));
    mc.b = get_number(m, "b", "model");
    if (m.contains("k")) mc.k = int(get_integer(m, "k", "model"));
  } else if (mc.kind == "polynomial") {
    check_keys(m, "model", {"kind", "coefficients"});
    if (!m.contains("coefficients") || !m["coefficients"].is_object())
      bad_config("model.coefficients must be an object of \"i,j\": c entries");
    for (auto it = m["coefficients"].begin(); it != m["coefficients"].end(); ++it) {
      const std::string& key = it.key();
      const auto comma = key.find(',');
      int i = -1, j = -1;
      if (comma == std::string::npos ||
          std::from_chars(key.data(), key.data() + comma, i).ec != std::errc{} ||
          std::from_chars(key.data() + comma + 1, key.data() + key.size(), j).ec != std::errc{} ||
          i < 0 || j < 0)
        bad_config("coefficient key '" + key + "' is not \"i,j\"");
      if (!it.value().is_number()) bad_config("coefficient values must be numbers");
      mc.coefficients[{i, j}] += it.value().get<double>();
    }
  } else if (mc.kind == "linear") {
    check_keys(m, "model", {"kind", "h0", "h1"});
    if (!m.contains("h0") || !m.contains("h1")) bad_config("model.h0 and model.h1 are required");
    mc.h0 = get_matrix(m["h0"], "model.h0");
    mc.h1 = get_matrix(m["h1"], "model.h1");
    if (mc.h0.rows() != mc.h1.rows()) bad_config("model.h0 and model.h1 differ in size");
  } else {
    bad_config("unknown model kind '" + mc.kind + "'");
  }

  if (root.contains("window")) {
    const json& w = root["window"];
    check_keys(w, "window", {"s_lo", "s_hi", "lambda_lo", "lambda_hi", "s_margin",
                             "lambda_margin", "grow"});
    if (w.contains("s_lo")) c.window.s_lo = get_number(w, "s_lo", "window");
    if (w.contains("s_hi")) c.window.s_hi = get_number(w, "s_hi", "window");
    if (w.contains("lambda_lo")) c.window.l_lo = get_number(w, "lambda_lo", "window");
    if (w.contains("lambda_hi")) c.window.l_hi = get_number(w, "lambda_hi", "window");
    if (w.contains("s_margin")) c.window.s_margin = get_number(w, "s_margin", "window");
    if (w.contains("lambda_margin")) c.window.l_margin = get_number(w, "lambda_margin", "window");
    if (w.contains("grow")) c.window.grow = get_bool(w, "grow", "window");
  }
  if (root.contains("tolerances")) {
    const json& t = root["tolerances"];
    check_keys(t, "tolerances", {"newton_tol", "merge_radius", "capture_radius", "flow_rtol",
                                 "degeneracy_tol", "quadrature_density", "seed_density"});
    auto& tc = c.tolerances;
    if (t.contains("newton_tol")) tc.newton_tol = get_number(t, "newton_tol", "tolerances");
    if (t.contains("merge_radius")) tc.merge_radius = get_number(t, "merge_radius", "tolerances");
    if (t.contains("capture_radius"))
      tc.capture_radius = get_number(t, "capture_radius", "tolerances");
    if (t.contains("flow_rtol")) tc.flow_rtol = get_number(t, "flow_rtol", "tolerances");
    if (t.contains("degeneracy_tol"))
      tc.degeneracy_tol = get_number(t, "degeneracy_tol", "tolerances");
    if (t.contains("quadrature_density"))
      tc.quadrature_density = int(get_integer(t, "quadrature_density", "tolerances"));
    if (t.contains("seed_density"))
      tc.seed_density = int(get_integer(t, "seed_density", "tolerances"));
  }
  if (root.contains("outputs")) {
    const json& o = root["outputs"];
    check_keys(o, "outputs", {"census", "complex", "curvature", "spectrum", "trajectories",
                              "network", "gauss_bonnet", "spectrum_samples"});
    auto& oc = c.outputs;
    for (auto [key, slot] : {std::pair{"census", &oc.census}, {"complex", &oc.complex},
                             {"curvature", &oc.curvature}, {"spectrum", &oc.spectrum},
                             {"trajectories", &oc.trajectories}, {"network", &oc.network},
                             {"gauss_bonnet", &oc.gauss_bonnet}})
      if (o.contains(key)) *slot = get_bool(o, key, "outputs");
    if (o.contains("spectrum_samples"))
      oc.spectrum_samples = int(get_integer(o, "spectrum_samples", "outputs"));
  }
  if (root.contains("output_dir")) {
    if (!root["output_dir"].is_string()) bad_config("output_dir must be a string");
    c.output_dir = root["output_dir"].get<std::string>();
  }
  validate(c);
  return c;
}

std::string config_to_json(const AnalysisConfig& c) {
  nlohmann::ordered_json m;
  m["kind"] = c.model.kind;
  if (c.model.kind == "grover") {
    m["N"] = c.model.N;
    m["basis"] = c.model.basis == GroverBasis::Printed ? "printed" : "orthonormal";
  } else if (c.model.kind == "pspin") {
    m["n"] = c.model.n;
    m["p"] = c.model.p;
    m["b"] = c.model.b;
    m["k"] = c.model.k;
  } else if (c.model.kind == "polynomial") {
    nlohmann::ordered_json co = nlohmann::ordered_json::object();
    for (const auto& [ij, v] : c.model.coefficients)
      co[std::to_string(ij.first) + "," + std::to_string(ij.second)] = v;
    m["coefficients"] = co;
  } else if (c.model.kind == "linear") {
    for (auto [key, mat] : {std::pair{"h0", &c.model.h0}, {"h1", &c.model.h1}}) {
      nlohmann::ordered_json rows = nlohmann::ordered_json::array();
      for (int i = 0; i < mat->rows(); ++i) {
        nlohmann::ordered_json row = nlohmann::ordered_json::array();
        for (int j = 0; j < mat->cols(); ++j) row.push_back((*mat)(i, j));
        rows.push_back(row);
      }
      m[key] = rows;
    }
  }
  nlohmann::ordered_json w;
  if (c.window.s_lo) {
    w["s_lo"] = *c.window.s_lo;
    w["s_hi"] = *c.window.s_hi;
    w["lambda_lo"] = *c.window.l_lo;
    w["lambda_hi"] = *c.window.l_hi;
  }
  w["s_margin"] = c.window.s_margin;
  w["lambda_margin"] = c.window.l_margin;
  w["grow"] = c.window.grow;
  const auto& t = c.tolerances;
  nlohmann::ordered_json tj{{"newton_tol", t.newton_tol},
                            {"merge_radius", t.merge_radius},
                            {"capture_radius", t.capture_radius},
                            {"flow_rtol", t.flow_rtol},
                            {"degeneracy_tol", t.degeneracy_tol},
                            {"quadrature_density", t.quadrature_density},
                            {"seed_density", t.seed_density}};
  const auto& o = c.outputs;
  nlohmann::ordered_json oj{{"census", o.census},       {"complex", o.complex},
                            {"curvature", o.curvature}, {"spectrum", o.spectrum},
                            {"trajectories", o.trajectories}, {"network", o.network},
                            {"gauss_bonnet", o.gauss_bonnet},
                            {"spectrum_samples", o.spectrum_samples}};
  nlohmann::ordered_json root;
  root["model"] = m;
  root["window"] = w;
  root["tolerances"] = tj;
  root["outputs"] = oj;
  root["output_dir"] = c.output_dir;
  return root.dump(2);
}

void apply_env_overrides(AnalysisConfig& c) {
  auto num = [](const char* name, auto* slot) {
    const char* v = std::getenv(name);
    if (!v || !*v) return;
    using T = std::remove_pointer_t<decltype(slot)>;
    T parsed{};
    const char* end = v + std::char_traits<char>::length(v);
    auto [ptr, ec] = std::from_chars(v, end, parsed);
    if (ec != std::errc{} || ptr != end)
      throw Error(ErrorCode::InvalidArgument, std::string("cannot parse ") + name, "config");
    *slot = parsed;
  };
  auto& t = c.tolerances;
  num("ADIAMORSE_NEWTON_TOL", &t.newton_tol);
  num("ADIAMORSE_MERGE_RADIUS", &t.merge_radius);
  num("ADIAMORSE_CAPTURE_RADIUS", &t.capture_radius);
  num("ADIAMORSE_FLOW_RTOL", &t.flow_rtol);
  num("ADIAMORSE_DEGENERACY_TOL", &t.degeneracy_tol);
  num("ADIAMORSE_QUADRATURE_DENSITY", &t.quadrature_density);
  num("ADIAMORSE_SEED_DENSITY", &t.seed_density);
  validate(c);
}

namespace {

template <class F>
auto staged(const char* stage, F&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Error& e) {
    throw Error(e.code(), e.what(), stage);
  } catch (const std::exception& e) {
    throw Error(ErrorCode::InternalConsistency, e.what(), stage);
  }
}

}  // namespace

AnalysisReport run_analysis(const AnalysisConfig& config) {
  staged("config", [&] {
    validate(config);
    return 0;
  });
  AnalysisReport r;
  r.config = config;
  r.version = version();
  const auto& mc = config.model;
  const auto& tol = config.tolerances;

  std::shared_ptr<const HamiltonianPath> path = staged("path", [&] {
    std::shared_ptr<const HamiltonianPath> p;
    if (mc.kind == "grover")
      p = std::make_shared<HamiltonianPath>(build_grover_reduced(mc.N, mc.basis));
    else if (mc.kind == "pspin")
      p = std::make_shared<HamiltonianPath>(build_pspin(mc.n, mc.p, mc.b, mc.k));
    else if (mc.kind == "linear")
      p = std::make_shared<HamiltonianPath>(
          build_linear(Operator::from_real(mc.h0), Operator::from_real(mc.h1)));
    return p;
  });

  staged("landscape", [&] {
    const auto& wc = config.window;
    if (!path) {
      const Window w{*wc.s_lo, *wc.s_hi, *wc.l_lo, *wc.l_hi};
      r.field = std::make_shared<PolynomialField>(mc.coefficients, w);
      r.model_label = r.field->describe();
      return 0;
    }
    r.model_label = path->label();
    if (wc.s_lo) {
      const Window w{*wc.s_lo, *wc.s_hi, *wc.l_lo, *wc.l_hi};
      auto f = std::make_shared<CharPolyField>(path, w);
      if (path->hermitian()) r.window_certified = ridge_edge_signs(*f).certified();
      r.field = f;
      return 0;
    }
    std::shared_ptr<CharPolyField> f;
    double m = wc.s_margin;
    for (;;) {
      f = std::make_shared<CharPolyField>(path, window_from_path(*path, m, wc.l_margin));
      if (!path->hermitian()) break;
      r.window_certified = ridge_edge_signs(*f).certified();
      if (*r.window_certified || !wc.grow || m >= 128.0) break;
      m *= 2.0;
    }
    r.field = f;
    return 0;
  });
  r.window = r.field->window();
  if (r.window_certified && !*r.window_certified)
    r.issues.push_back({"landscape", "window s-edges not certified; the Euler characteristic "
                                     "may change with a larger window"});

  CensusOptions copt;
  copt.grid_density = tol.seed_density;
  copt.newton_tol = tol.newton_tol;
  copt.merge_radius_rel = tol.merge_radius;
  copt.degeneracy_tol = tol.degeneracy_tol;
  r.census = staged("census", [&] { return find_critical_points(*r.field, copt); });
  if (!r.census.is_morse)
    r.issues.push_back({"census", std::to_string(r.census.n_degenerate) +
                                      " degenerate critical point(s)"});
  if (!r.census.boundary_points.empty())
    r.issues.push_back({"census", std::to_string(r.census.boundary_points.size()) +
                                      " critical point(s) on the window boundary"});
  if (!r.census.density_stable)
    r.issues.push_back({"census", "seed-density doubling changed the census"});

  if (config.outputs.complex && r.census.is_morse) {
    try {
      FlowOptions fo;
      fo.rtol = tol.flow_rtol;
      fo.capture_radius_rel = tol.capture_radius;
      const FlowContext ctx = make_flow_context(*r.field, r.census, fo);
      r.instantons = count_instantons(ctx);
      for (const auto& msg : r.instantons->issues) r.issues.push_back({"morse", msg});
      if (r.instantons->certifiable) {
        r.complex = build_complex(r.census, r.instantons->edges);
        r.homology = homology(*r.complex);
      }
    } catch (const Error& e) {
      r.issues.push_back({"morse", e.what()});
    }
  }

  if (config.outputs.curvature || config.outputs.network) {
    std::pair<double, double> s_range{r.window.s_lo, r.window.s_hi};
    if (path) s_range = {path->s_lo(), path->s_hi()};
    for (const auto& p : r.census.points) {
      if (p.degenerate) continue;
      try {
        r.curvature.push_back(curvature_report(*r.field, p, s_range));
      } catch (const Error& e) {
        r.issues.push_back({"geometry", e.what()});
      }
    }
  }
  if (config.outputs.gauss_bonnet) {
    try {
      r.gauss_bonnet = gauss_bonnet_integral(*r.field, r.window, tol.quadrature_density);
      if (!r.gauss_bonnet->converged)
        r.issues.push_back({"geometry", "Gauss-Bonnet quadrature not converged"});
    } catch (const Error& e) {
      r.issues.push_back({"geometry", e.what()});
    }
  }

  if (config.outputs.spectrum && path) {
    try {
      const auto* cf = dynamic_cast<const CharPolyField*>(r.field.get());
      r.spectrum = spectrum_trace(*cf, config.outputs.spectrum_samples);
      if (r.spectrum->ambiguous)
        r.issues.push_back({"spectrum", "branch matching ambiguous at the finest step"});
      for (const auto& br : r.spectrum->branches)
        if (br.max_residual > 1e-9)
          r.issues.push_back({"spectrum", "branch " + std::to_string(br.index) +
                                              " leaves the zero level"});
    } catch (const Error& e) {
      r.issues.push_back({"spectrum", e.what()});
    }
  }
  return r;
}

bool ReportDiff::empty() const {
  if (d_min || d_saddle || d_max || chi_a != chi_b) return false;
  if (!unmatched_a.empty() || !unmatched_b.empty()) return false;
  for (const auto& m : matched)
    if (m.distance != 0.0 || m.dk1 != 0.0 || m.dk2 != 0.0 || m.dK != 0.0 ||
        m.index_a != m.index_b)
      return false;
  return true;
}

ReportDiff compare_reports(const AnalysisReport& a, const AnalysisReport& b) {
  if (a.config.model.kind != b.config.model.kind)
    fail(ErrorCode::InvalidArgument, "reports come from different model families");
  ReportDiff d;
  d.chi_a = a.census.euler();
  d.chi_b = b.census.euler();
  d.d_min = b.census.n_min - a.census.n_min;
  d.d_saddle = b.census.n_saddle - a.census.n_saddle;
  d.d_max = b.census.n_max - a.census.n_max;

  struct Cand {
    double dist;
    std::size_t i, j;
  };
  std::vector<Cand> cands;
  const auto& pa = a.census.points;
  const auto& pb = b.census.points;
  for (std::size_t i = 0; i < pa.size(); ++i)
    for (std::size_t j = 0; j < pb.size(); ++j)
      cands.push_back({(pa[i].location - pb[j].location).norm(), i, j});
  std::stable_sort(cands.begin(), cands.end(),
                   [](const Cand& x, const Cand& y) { return x.dist < y.dist; });
  std::vector<bool> ua(pa.size()), ub(pb.size());
  auto curv = [](const AnalysisReport& r, const CriticalPoint& p) {
    for (const auto& c : r.curvature)
      if (c.point_id == p.id) return std::array<double, 3>{c.k1, c.k2, c.K};
    return std::array<double, 3>{p.k1, p.k2, p.k1 * p.k2};
  };
  for (const auto& c : cands) {
    if (ua[c.i] || ub[c.j]) continue;
    ua[c.i] = ub[c.j] = true;
    const auto ca = curv(a, pa[c.i]), cb = curv(b, pb[c.j]);
    d.matched.push_back({pa[c.i].id, pb[c.j].id, c.dist, cb[0] - ca[0], cb[1] - ca[1],
                         cb[2] - ca[2], pa[c.i].index, pb[c.j].index});
  }
  std::sort(d.matched.begin(), d.matched.end(),
            [](const PointDiff& x, const PointDiff& y) { return x.id_a < y.id_a; });
  for (std::size_t i = 0; i < pa.size(); ++i)
    if (!ua[i]) d.unmatched_a.push_back(pa[i].id);
  for (std::size_t j = 0; j < pb.size(); ++j)
    if (!ub[j]) d.unmatched_b.push_back(pb[j].id);
  return d;
}

}  // namespace adiamorse
