#pragma once

// Config -> path -> landscape -> Morse complex -> curvature pipeline, plus
// deterministic JSON/CSV artifacts.

#include <optional>
#include <string>
#include <vector>

#include "adiamorse/geometry.hpp"
#include "adiamorse/landscape.hpp"
#include "adiamorse/morse.hpp"
#include "adiamorse/pspin.hpp"

namespace adiamorse {

struct ModelConfig {
  std::string kind;  // grover | pspin | polynomial | linear
  long long N = 4;
  GroverBasis basis = GroverBasis::Printed;
  int n = 7, p = 5, k = 2;
  double b = 1.0;
  PolynomialField::Coeffs coefficients;
  RealMatrix h0, h1;
};

struct WindowConfig {
  std::optional<double> s_lo, s_hi, l_lo, l_hi;  // fixed window when all four set
  double s_margin = 0.25;
  double l_margin = 0.25;
  bool grow = true;  // widen s until the edges certify (Hermitian paths)
};

struct Tolerances {
  double newton_tol = 1e-10;
  double merge_radius = 1e-5;    // x window diagonal
  double capture_radius = 1e-3;  // x window diagonal
  double flow_rtol = 1e-9;
  double degeneracy_tol = 1e-8;
  int quadrature_density = 64;
  int seed_density = 64;
};

struct OutputConfig {
  bool census = true;
  bool complex = true;
  bool curvature = true;
  bool spectrum = true;
  bool trajectories = true;
  bool network = true;
  bool gauss_bonnet = false;
  int spectrum_samples = 201;
};

struct AnalysisConfig {
  ModelConfig model;
  WindowConfig window;
  Tolerances tolerances;
  OutputConfig outputs;
  std::string output_dir;
};

/// Strict parse: unknown keys, wrong types and non-positive tolerances are
/// rejected with InvalidArgument before any computation.
AnalysisConfig parse_config(const std::string& json_text);
std::string config_to_json(const AnalysisConfig& c);

/// Tolerance overrides from ADIAMORSE_* environment variables.
void apply_env_overrides(AnalysisConfig& c);

struct StageIssue {
  std::string stage;
  std::string message;
};

struct AnalysisReport {
  AnalysisConfig config;
  std::string model_label;
  FieldPtr field;
  Window window;
  std::optional<bool> window_certified;  // unset for non-Hermitian paths
  CriticalCensus census;
  std::optional<InstantonCount> instantons;
  std::optional<MorseComplex> complex;
  std::optional<HomologySummary> homology;
  std::vector<CurvatureReport> curvature;
  std::optional<GaussBonnetResult> gauss_bonnet;
  std::optional<SpectrumTrace> spectrum;
  std::vector<StageIssue> issues;
  std::string version;

  bool certified() const { return issues.empty(); }
  const char* status() const { return certified() ? "certified" : "partial"; }
};

/// Deterministic for a given config. Errors in config, path or census
/// stages throw with the stage recorded; later stage failures are kept as
/// issues and make the report partial.
AnalysisReport run_analysis(const AnalysisConfig& config);

struct PointDiff {
  int id_a = -1, id_b = -1;
  double distance = 0.0;
  double dk1 = 0.0, dk2 = 0.0, dK = 0.0;
  int index_a = 0, index_b = 0;
};

struct ReportDiff {
  int chi_a = 0, chi_b = 0;
  int d_min = 0, d_saddle = 0, d_max = 0;
  std::vector<PointDiff> matched;
  std::vector<int> unmatched_a, unmatched_b;

  int chi_diff() const { return chi_b - chi_a; }
  int total_diff() const { return d_min + d_saddle + d_max; }
  /// No count change and every matched point coincides exactly.
  bool empty() const;
};

/// Nearest-point census alignment. InvalidArgument across model kinds.
ReportDiff compare_reports(const AnalysisReport& a, const AnalysisReport& b);

// Serialisation. Keys are emitted in a fixed order and doubles in shortest
// round-trip form, so equal inputs give byte-identical output.
std::string report_to_json(const AnalysisReport& r);
std::string diff_to_json(const ReportDiff& d);
std::string network_to_json(const CriticalNetwork& net);
std::string census_csv(const CriticalCensus& c);
std::string trajectories_csv(const std::vector<Trajectory>& ts);
std::string spectrum_csv(const SpectrumTrace& t);
std::string sweep_csv(const std::vector<BSweepRecord>& records);
std::string sweep_to_json(const std::vector<BSweepRecord>& records,
                          const std::optional<HomotopyVerdict>& verdict);

/// Writes via a temporary file and rename. Io on failure.
void write_file_atomic(const std::string& path, const std::string& content);

/// Writes report.json and the selected CSV/JSON side files into dir and
/// returns the paths written.
std::vector<std::string> write_artifacts(const AnalysisReport& r, const std::string& dir);

const char* version();

}  // namespace adiamorse
