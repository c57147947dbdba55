#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <system_error>

#include "adiamorse/analysis.hpp"
#include "json.hpp"

namespace adiamorse {

using ojson = nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

ojson finite_or_null(double v) { return std::isfinite(v) ? ojson(v) : ojson(nullptr); }

ojson point_json(const CriticalPoint& p) {
  return ojson{{"id", p.id},
               {"s", p.s()},
               {"lambda", p.lambda()},
               {"value", p.value},
               {"index", p.index},
               {"k1", p.k1},
               {"k2", p.k2},
               {"degenerate", p.degenerate},
               {"borderline", p.borderline},
               {"grad_norm", p.grad_norm}};
}

ojson window_json(const Window& w) {
  return ojson{{"s_lo", w.s_lo}, {"s_hi", w.s_hi}, {"lambda_lo", w.l_lo}, {"lambda_hi", w.l_hi}};
}

ojson curvature_json(const CurvatureReport& c) {
  return ojson{{"point_id", c.point_id},
               {"K", c.K},
               {"k1", c.k1},
               {"k2", c.k2},
               {"dupin",
                {{"f_p", c.dupin.f_p},
                 {"k1", c.dupin.k1},
                 {"k2", c.dupin.k2},
                 {"h_lambda_lambda", c.dupin.h_ll},
                 {"s_p", c.dupin.s_p}}},
               {"delay", c.delay ? finite_or_null(*c.delay) : ojson(nullptr)}};
}

ojson edge_json(const InstantonEdge& e) {
  return ojson{{"from", e.from}, {"to", e.to}, {"count", e.count},
               {"mod2", int(e.multiplicity_mod2)}};
}

ojson gf2_json(const Gf2Matrix& m) {
  ojson rows = ojson::array();
  for (const auto& r : m) {
    ojson row = ojson::array();
    for (auto v : r) row.push_back(int(v));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

std::string report_to_json(const AnalysisReport& r) {
  ojson j;
  j["tool"] = {{"name", "adiamorse"}, {"version", r.version}};
  j["status"] = r.status();
  ojson issues = ojson::array();
  for (const auto& i : r.issues) issues.push_back({{"stage", i.stage}, {"message", i.message}});
  j["issues"] = issues;
  j["config"] = ojson::parse(config_to_json(r.config));
  j["model"] = r.model_label;
  j["window"] = window_json(r.window);
  j["window_certified"] = r.window_certified ? ojson(*r.window_certified) : ojson(nullptr);

  const auto& c = r.census;
  ojson census{{"counts",
                {{"min", c.n_min}, {"saddle", c.n_saddle}, {"max", c.n_max},
                 {"degenerate", c.n_degenerate}}},
               {"euler", c.euler()},
               {"is_morse", c.is_morse},
               {"density_used", c.density_used},
               {"density_stable", c.density_stable},
               {"merge_radius", c.merge_radius}};
  ojson pts = ojson::array(), bpts = ojson::array();
  for (const auto& p : c.points) pts.push_back(point_json(p));
  for (const auto& p : c.boundary_points) bpts.push_back(point_json(p));
  census["points"] = pts;
  census["boundary_points"] = bpts;
  j["census"] = census;

  if (r.instantons) {
    ojson edges = ojson::array();
    for (const auto& e : r.instantons->edges) edges.push_back(edge_json(e));
    j["instantons"] = {{"certifiable", r.instantons->certifiable},
                       {"separatrices", r.instantons->trajectories.size()},
                       {"edges", edges}};
  } else {
    j["instantons"] = nullptr;
  }
  if (r.complex) {
    j["complex"] = {{"generators", r.complex->generators},
                    {"d1", gf2_json(r.complex->d1)},
                    {"d2", gf2_json(r.complex->d2)}};
  } else {
    j["complex"] = nullptr;
  }
  if (r.homology) {
    j["homology"] = {{"betti", r.homology->betti},
                     {"euler", r.homology->euler},
                     {"euler_counts", r.homology->euler_counts}};
  } else {
    j["homology"] = nullptr;
  }
  ojson curv = ojson::array();
  for (const auto& cr : r.curvature) curv.push_back(curvature_json(cr));
  j["curvature"] = curv;
  if (r.gauss_bonnet)
    j["gauss_bonnet"] = {{"value", r.gauss_bonnet->value},
                         {"coarse", r.gauss_bonnet->coarse},
                         {"converged", r.gauss_bonnet->converged},
                         {"density", r.gauss_bonnet->density}};
  else
    j["gauss_bonnet"] = nullptr;
  if (r.spectrum) {
    ojson brs = ojson::array();
    for (const auto& b : r.spectrum->branches)
      brs.push_back({{"index", b.index},
                     {"lambda_start", b.samples.front().second},
                     {"lambda_end", b.samples.back().second},
                     {"min_gap_to_next", finite_or_null(b.min_gap_to_next)},
                     {"s_at_min_gap", b.s_at_min_gap},
                     {"max_residual", b.max_residual},
                     {"ambiguous", b.ambiguous}});
    j["spectrum"] = {{"samples", r.spectrum->s.size()},
                     {"ambiguous", r.spectrum->ambiguous},
                     {"branches", brs}};
  } else {
    j["spectrum"] = nullptr;
  }
  return j.dump(2) + "\n";
}

std::string diff_to_json(const ReportDiff& d) {
  ojson m = ojson::array();
  for (const auto& p : d.matched)
    m.push_back({{"id_a", p.id_a},
                 {"id_b", p.id_b},
                 {"distance", p.distance},
                 {"index_a", p.index_a},
                 {"index_b", p.index_b},
                 {"dk1", p.dk1},
                 {"dk2", p.dk2},
                 {"dK", p.dK}});
  ojson j{{"empty", d.empty()},
          {"chi_a", d.chi_a},
          {"chi_b", d.chi_b},
          {"chi_diff", d.chi_diff()},
          {"count_diff", {{"min", d.d_min}, {"saddle", d.d_saddle}, {"max", d.d_max}}},
          {"total_diff", d.total_diff()},
          {"matched", m},
          {"unmatched_a", d.unmatched_a},
          {"unmatched_b", d.unmatched_b}};
  return j.dump(2) + "\n";
}

std::string network_to_json(const CriticalNetwork& net) {
  ojson nodes = ojson::array(), edges = ojson::array();
  for (const auto& n : net.nodes) {
    ojson node = point_json(*n.point);
    node["curvature"] = n.curvature ? curvature_json(*n.curvature) : ojson(nullptr);
    nodes.push_back(node);
  }
  for (const auto* e : net.edges) edges.push_back(edge_json(*e));
  return ojson{{"nodes", nodes}, {"edges", edges}}.dump(2) + "\n";
}

std::string census_csv(const CriticalCensus& c) {
  std::string out = "id,s,lambda,value,index,k1,k2,degenerate,borderline,on_boundary\n";
  auto row = [&](const CriticalPoint& p, bool boundary) {
    out += std::to_string(p.id) + "," + num(p.s()) + "," + num(p.lambda()) + "," +
           num(p.value) + "," + std::to_string(p.index) + "," + num(p.k1) + "," + num(p.k2) +
           "," + (p.degenerate ? "1" : "0") + "," + (p.borderline ? "1" : "0") + "," +
           (boundary ? "1" : "0") + "\n";
  };
  for (const auto& p : c.points) row(p, false);
  for (const auto& p : c.boundary_points) row(p, true);
  return out;
}

std::string trajectories_csv(const std::vector<Trajectory>& ts) {
  std::string out = "trajectory,origin,direction,terminus_kind,terminus,exit_edge,s,lambda,tau,f\n";
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const auto& t = ts[i];
    const std::string head = std::to_string(i) + "," + std::to_string(t.origin) + "," +
                             to_string(t.direction) + "," + to_string(t.kind) + "," +
                             std::to_string(t.terminus) + "," + to_string(t.exit_edge) + ",";
    for (const auto& s : t.samples)
      out += head + num(s.s) + "," + num(s.lambda) + "," + num(s.tau) + "," + num(s.f) + "\n";
  }
  return out;
}

std::string spectrum_csv(const SpectrumTrace& t) {
  std::string out = "s";
  for (std::size_t i = 0; i < t.branches.size(); ++i) out += ",lambda_" + std::to_string(i);
  out += "\n";
  for (std::size_t k = 0; k < t.s.size(); ++k) {
    out += num(t.s[k]);
    for (const auto& b : t.branches) out += "," + num(b.samples[k].second);
    out += "\n";
  }
  return out;
}

std::string sweep_csv(const std::vector<BSweepRecord>& records) {
  std::string out = "b,n_min,n_saddle,n_max,chi,flagged\n";
  for (const auto& r : records)
    out += num(r.b) + "," + std::to_string(r.n_min) + "," + std::to_string(r.n_saddle) + "," +
           std::to_string(r.n_max) + "," + (r.chi ? std::to_string(*r.chi) : "") + "," +
           (r.flagged ? "1" : "0") + "\n";
  return out;
}

std::string sweep_to_json(const std::vector<BSweepRecord>& records,
                          const std::optional<HomotopyVerdict>& verdict) {
  ojson recs = ojson::array();
  for (const auto& r : records)
    recs.push_back({{"b", r.b},
                    {"n_min", r.n_min},
                    {"n_saddle", r.n_saddle},
                    {"n_max", r.n_max},
                    {"chi", r.chi ? ojson(*r.chi) : ojson(nullptr)},
                    {"flagged", r.flagged},
                    {"flag_reason", r.flag_reason},
                    {"refinement", r.refinement},
                    {"window", window_json(r.window)},
                    {"window_certified", r.window_certified}});
  ojson j;
  j["tool"] = {{"name", "adiamorse"}, {"version", version()}};
  j["records"] = recs;
  if (verdict)
    j["homotopy"] = {{"pass", verdict->pass},
                     {"chi", verdict->chi ? ojson(*verdict->chi) : ojson(nullptr)},
                     {"b_from", verdict->b_from},
                     {"b_to", verdict->b_to},
                     {"reason", verdict->reason}};
  else
    j["homotopy"] = nullptr;
  return j.dump(2) + "\n";
}

void write_file_atomic(const std::string& path, const std::string& content) {
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot open " + tmp.string() + " for writing", "io");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error(ErrorCode::Io, "write failed for " + tmp.string(), "io");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error(ErrorCode::Io, "cannot rename into " + target.string(), "io");
  }
}

std::vector<std::string> write_artifacts(const AnalysisReport& r, const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create " + dir + ": " + ec.message(), "io");
  std::vector<std::string> written;
  auto put = [&](const char* name, const std::string& content) {
    const std::string p = (fs::path(dir) / name).string();
    write_file_atomic(p, content);
    written.push_back(p);
  };
  put("report.json", report_to_json(r));
  const auto& o = r.config.outputs;
  if (o.census) put("census.csv", census_csv(r.census));
  if (o.trajectories && r.instantons) put("trajectories.csv", trajectories_csv(r.instantons->trajectories));
  if (o.spectrum && r.spectrum) put("spectrum.csv", spectrum_csv(*r.spectrum));
  if (o.network) {
    static const std::vector<InstantonEdge> no_edges;
    const auto net = critical_network(r.census, r.instantons ? r.instantons->edges : no_edges,
                                      r.curvature);
    put("network.json", network_to_json(net));
  }
  return written;
}

}  // namespace adiamorse
