#include "adiamorse/adiamorse.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <new>
#include <string>

#include "adiamorse/analysis.hpp"

using namespace adiamorse;

struct am_path {
  std::shared_ptr<const HamiltonianPath> path;
};
struct am_field {
  FieldPtr field;
};
struct am_report {
  AnalysisReport report;
  std::string json;
  std::vector<std::string> artifacts;
};

namespace {

thread_local std::string g_error;
thread_local std::string g_stage;

am_status to_status(ErrorCode c) {
  switch (c) {
    case ErrorCode::InvalidArgument: return AM_INVALID_ARGUMENT;
    case ErrorCode::DomainError: return AM_DOMAIN_ERROR;
    case ErrorCode::DegenerateCriticalPoint: return AM_DEGENERATE_CRITICAL_POINT;
    case ErrorCode::NoIntersection: return AM_NO_INTERSECTION;
    case ErrorCode::DivergentDelay: return AM_DIVERGENT_DELAY;
    case ErrorCode::PerturbationTooLarge: return AM_PERTURBATION_TOO_LARGE;
    case ErrorCode::UnresolvedTrajectory: return AM_UNRESOLVED_TRAJECTORY;
    case ErrorCode::InternalConsistency: return AM_INTERNAL_CONSISTENCY;
    case ErrorCode::Io: return AM_IO_ERROR;
  }
  return AM_UNKNOWN_ERROR;
}

template <class F>
am_status guarded(F&& fn) {
  g_error.clear();
  g_stage.clear();
  try {
    fn();
    return AM_OK;
  } catch (const Error& e) {
    g_error = e.what();
    g_stage = e.stage();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    g_error = "out of memory";
    return AM_UNKNOWN_ERROR;
  } catch (const std::exception& e) {
    g_error = e.what();
    return AM_UNKNOWN_ERROR;
  }
}

am_status null_arg(const char* what) {
  g_error = std::string(what) + " must not be NULL";
  g_stage.clear();
  return AM_INVALID_ARGUMENT;
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

}  // namespace

extern "C" {

const char* am_version(void) { return version(); }

const char* am_status_string(am_status status) {
  switch (status) {
    case AM_OK: return "ok";
    case AM_UNKNOWN_ERROR: return "unknown-error";
    default: return to_string(static_cast<ErrorCode>(status));
  }
}

const char* am_last_error(void) { return g_error.c_str(); }
const char* am_last_error_stage(void) { return g_stage.c_str(); }
void am_string_free(char* s) { std::free(s); }

am_status am_path_grover(long long N, int orthonormal, am_path** out) {
  if (!out) return null_arg("out");
  return guarded([&] {
    auto p = build_grover_reduced(N, orthonormal ? GroverBasis::Orthonormal : GroverBasis::Printed);
    *out = new am_path{std::make_shared<HamiltonianPath>(std::move(p))};
  });
}

am_status am_path_pspin(int n, int p, double b, int k, am_path** out) {
  if (!out) return null_arg("out");
  return guarded([&] {
    *out = new am_path{std::make_shared<HamiltonianPath>(build_pspin(n, p, b, k))};
  });
}

am_status am_path_linear(int dim, const double* h0, const double* h1, am_path** out) {
  if (!out || !h0 || !h1) return null_arg("h0, h1 and out");
  return guarded([&] {
    if (dim < 1) fail(ErrorCode::InvalidArgument, "dimension must be positive");
    using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    const RealMatrix a = Eigen::Map<const RowMajor>(h0, dim, dim);
    const RealMatrix b = Eigen::Map<const RowMajor>(h1, dim, dim);
    auto path = build_linear(Operator::from_real(a), Operator::from_real(b));
    *out = new am_path{std::make_shared<HamiltonianPath>(std::move(path))};
  });
}

void am_path_free(am_path* path) { delete path; }

int am_path_dim(const am_path* path) { return path ? path->path->dim() : 0; }

am_status am_path_evaluate(const am_path* path, double s, double* re, double* im) {
  if (!path || !re) return null_arg("path and re");
  return guarded([&] {
    const Operator h = evaluate(*path->path, s);
    const int d = h.dim();
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        re[i * d + j] = h(i, j).real();
        if (im) im[i * d + j] = h(i, j).imag();
      }
  });
}

am_status am_path_eigenvalues(const am_path* path, double s, double* out) {
  if (!path || !out) return null_arg("path and out");
  return guarded([&] {
    const Operator h = evaluate(*path->path, s);
    const auto ev = path->path->hermitian() ? eigenvalues(h) : path_spectrum(*path->path, s);
    std::copy(ev.begin(), ev.end(), out);
  });
}

am_status am_field_from_path(const am_path* path, double s_lo, double s_hi, double lambda_lo,
                             double lambda_hi, am_field** out) {
  if (!path || !out) return null_arg("path and out");
  return guarded([&] {
    *out = new am_field{
        std::make_shared<CharPolyField>(path->path, Window{s_lo, s_hi, lambda_lo, lambda_hi})};
  });
}

am_status am_field_polynomial(size_t n_terms, const int* i, const int* j, const double* c,
                              double s_lo, double s_hi, double lambda_lo, double lambda_hi,
                              am_field** out) {
  if (!out || (n_terms && (!i || !j || !c))) return null_arg("coefficient arrays and out");
  return guarded([&] {
    PolynomialField::Coeffs coeffs;
    for (size_t t = 0; t < n_terms; ++t) coeffs[{i[t], j[t]}] += c[t];
    *out = new am_field{
        std::make_shared<PolynomialField>(coeffs, Window{s_lo, s_hi, lambda_lo, lambda_hi})};
  });
}

void am_field_free(am_field* field) { delete field; }

am_status am_field_value(const am_field* field, double s, double lambda, double* out) {
  if (!field || !out) return null_arg("field and out");
  return guarded([&] { *out = field_value(*field->field, s, lambda); });
}

am_status am_field_gradient(const am_field* field, double s, double lambda, double out[2]) {
  if (!field || !out) return null_arg("field and out");
  return guarded([&] {
    const Vec2 g = gradient(*field->field, s, lambda);
    out[0] = g[0];
    out[1] = g[1];
  });
}

am_status am_field_hessian(const am_field* field, double s, double lambda, double out[4]) {
  if (!field || !out) return null_arg("field and out");
  return guarded([&] {
    const Mat2 h = hessian(*field->field, s, lambda);
    out[0] = h(0, 0);
    out[1] = h(0, 1);
    out[2] = h(1, 0);
    out[3] = h(1, 1);
  });
}

am_status am_analyze(const char* config_json, int apply_env, am_report** out) {
  if (!config_json || !out) return null_arg("config_json and out");
  return guarded([&] {
    AnalysisConfig cfg = parse_config(config_json);
    if (apply_env) apply_env_overrides(cfg);
    auto r = std::make_unique<am_report>();
    r->report = run_analysis(cfg);
    r->json = report_to_json(r->report);
    *out = r.release();
  });
}

void am_report_free(am_report* report) { delete report; }

int am_report_certified(const am_report* report) {
  return report && report->report.certified() ? 1 : 0;
}

const char* am_report_status(const am_report* report) {
  return report ? report->report.status() : "";
}

const char* am_report_json(const am_report* report) { return report ? report->json.c_str() : ""; }

int am_report_euler(const am_report* report) {
  return report ? report->report.census.euler() : 0;
}

am_status am_report_counts(const am_report* report, int* n_min, int* n_saddle, int* n_max) {
  if (!report) return null_arg("report");
  const auto& c = report->report.census;
  if (n_min) *n_min = c.n_min;
  if (n_saddle) *n_saddle = c.n_saddle;
  if (n_max) *n_max = c.n_max;
  return AM_OK;
}

am_status am_report_write(am_report* report, const char* dir) {
  if (!report || !dir) return null_arg("report and dir");
  return guarded([&] { report->artifacts = write_artifacts(report->report, dir); });
}

size_t am_report_artifact_count(const am_report* report) {
  return report ? report->artifacts.size() : 0;
}

const char* am_report_artifact(const am_report* report, size_t i) {
  if (!report || i >= report->artifacts.size()) return nullptr;
  return report->artifacts[i].c_str();
}

const char* am_report_output_dir(const am_report* report) {
  return report ? report->report.config.output_dir.c_str() : "";
}

am_status am_compare_reports(const am_report* a, const am_report* b, char** diff_json) {
  if (!a || !b || !diff_json) return null_arg("a, b and diff_json");
  return guarded([&] { *diff_json = dup_string(diff_to_json(compare_reports(a->report, b->report))); });
}

am_status am_pspin_sweep(int n, int p, int k, const double* b_grid, size_t n_b, char** csv_out,
                         char** json_out, int* homotopy_pass) {
  if (!b_grid && n_b) return null_arg("b_grid");
  return guarded([&] {
    const std::vector<double> grid(b_grid, b_grid + n_b);
    const auto recs = b_sweep(n, p, k, grid);
    std::optional<HomotopyVerdict> verdict;
    try {
      verdict = homotopy_check(recs);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::InvalidArgument) throw;
    }
    if (homotopy_pass) *homotopy_pass = verdict ? (verdict->pass ? 1 : 0) : -1;
    std::unique_ptr<char, decltype(&std::free)> csv(nullptr, &std::free);
    if (csv_out) csv.reset(dup_string(sweep_csv(recs)));
    if (json_out) *json_out = dup_string(sweep_to_json(recs, verdict));
    if (csv_out) *csv_out = csv.release();
  });
}

am_status am_write_file(const char* path, const char* content) {
  if (!path || !content) return null_arg("path and content");
  return guarded([&] { write_file_atomic(path, content); });
}

}  // extern "C"
