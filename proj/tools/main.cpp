// adiamorse command line. Talks to the library only through the C API.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "adiamorse/adiamorse.h"
#include "json.hpp"

namespace {

constexpr int kCertified = 0;
constexpr int kError = 1;
constexpr int kPartial = 2;

using ReportPtr = std::unique_ptr<am_report, decltype(&am_report_free)>;

int report_error(am_status st) {
  std::cerr << "error: " << am_status_string(st);
  if (*am_last_error_stage()) std::cerr << " [" << am_last_error_stage() << "]";
  std::cerr << ": " << am_last_error() << "\n";
  return kError;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_config(const std::string& config, const std::string& out_dir, bool print_json) {
  am_report* raw = nullptr;
  if (am_status st = am_analyze(config.c_str(), 1, &raw); st != AM_OK) return report_error(st);
  ReportPtr report(raw, &am_report_free);

  std::string dir = out_dir.empty() ? am_report_output_dir(report.get()) : out_dir;
  if (!dir.empty()) {
    if (am_status st = am_report_write(report.get(), dir.c_str()); st != AM_OK)
      return report_error(st);
  }
  if (print_json) {
    std::cout << am_report_json(report.get());
  } else {
    int n0 = 0, n1 = 0, n2 = 0;
    am_report_counts(report.get(), &n0, &n1, &n2);
    std::cout << "status " << am_report_status(report.get()) << "\n"
              << "minima " << n0 << "  saddles " << n1 << "  maxima " << n2
              << "  euler " << am_report_euler(report.get()) << "\n";
    for (size_t i = 0; i < am_report_artifact_count(report.get()); ++i)
      std::cout << "wrote " << am_report_artifact(report.get(), i) << "\n";
  }
  if (!am_report_certified(report.get())) {
    auto j = nlohmann::json::parse(am_report_json(report.get()));
    for (const auto& issue : j["issues"])
      std::cerr << "partial: " << issue["stage"].get<std::string>() << ": "
                << issue["message"].get<std::string>() << "\n";
    return kPartial;
  }
  return kCertified;
}

// "lo:hi:count" or a comma-separated list.
std::vector<double> parse_b_grid(const std::string& text) {
  std::vector<double> out;
  if (text.find(':') != std::string::npos) {
    double lo = 0, hi = 0;
    int count = 0;
    char c1 = 0, c2 = 0;
    std::istringstream ss(text);
    if (!(ss >> lo >> c1 >> hi >> c2 >> count) || c1 != ':' || c2 != ':' || count < 1 ||
        !ss.eof())
      throw CLI::ValidationError("--b-grid", "expected lo:hi:count");
    for (int i = 0; i < count; ++i)
      out.push_back(count == 1 ? lo : lo + (hi - lo) * i / (count - 1));
    return out;
  }
  std::istringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw CLI::ValidationError("--b-grid", "bad value '" + item + "'");
    }
  }
  if (out.empty()) throw CLI::ValidationError("--b-grid", "empty grid");
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Morse-theoretic analysis of adiabatic Hamiltonian paths"};
  app.set_version_flag("--version", std::string(am_version()));
  app.require_subcommand(1);
  app.fallthrough();
  app.footer(
      "Exit codes: 0 certified, 2 partial or non-certifiable, 1 error.\n\n"
      "Environment overrides (applied after the config file):\n"
      "  ADIAMORSE_NEWTON_TOL          Newton convergence, relative to the local scale\n"
      "  ADIAMORSE_MERGE_RADIUS        duplicate-merge radius, x window diagonal\n"
      "  ADIAMORSE_CAPTURE_RADIUS      flow capture radius, x window diagonal\n"
      "  ADIAMORSE_FLOW_RTOL           RK45 relative tolerance\n"
      "  ADIAMORSE_DEGENERACY_TOL      |k1 k2| / max k^2 below this is degenerate\n"
      "  ADIAMORSE_QUADRATURE_DENSITY  Gauss-Bonnet panels per axis\n"
      "  ADIAMORSE_SEED_DENSITY        Newton seed grid per axis");

  std::string out_dir;
  bool json = false;
  app.add_option("--out", out_dir, "Directory for report.json and CSV side files");
  app.add_flag("--json", json, "Print the full JSON report instead of a summary");

  std::string config_path;
  auto* analyze = app.add_subcommand("analyze", "Run the full pipeline from a JSON config");
  analyze->add_option("--config", config_path, "Config file")->required()->check(CLI::ExistingFile);

  long long N = 4;
  std::string basis = "printed";
  auto* grover = app.add_subcommand("grover", "Reduced Grover search path");
  grover->add_option("--N", N, "Number of items (power of two)")->required();
  grover->add_option("--basis", basis, "printed | orthonormal")
      ->check(CLI::IsMember({"printed", "orthonormal"}));

  int n = 7, p = 5, k = 2;
  std::string grid_text = "0:1:41";
  auto* sweep = app.add_subcommand("pspin-sweep", "Census of the p-spin landscape across b");
  sweep->add_option("--n", n, "Number of spins (<= 12)")->capture_default_str();
  sweep->add_option("--p", p, "Interaction order")->capture_default_str();
  sweep->add_option("--k", k, "Non-stoquastic power")->capture_default_str();
  sweep->add_option("--b-grid", grid_text, "lo:hi:count or comma list")->capture_default_str();

  std::string poly_path;
  auto* field = app.add_subcommand(
      "field", "Explicit polynomial field: {\"coefficients\": {\"i,j\": c}, \"window\": {...}}");
  field->add_option("--poly", poly_path, "Polynomial file")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*analyze) return run_config(read_file(config_path), out_dir, json);

    if (*grover) {
      nlohmann::json cfg{{"model", {{"kind", "grover"}, {"N", N}, {"basis", basis}}}};
      return run_config(cfg.dump(), out_dir, json);
    }

    if (*field) {
      auto poly = nlohmann::json::parse(read_file(poly_path));
      nlohmann::json cfg{{"model", {{"kind", "polynomial"}}}};
      for (auto it = poly.begin(); it != poly.end(); ++it) {
        if (it.key() == "coefficients") cfg["model"]["coefficients"] = it.value();
        else cfg[it.key()] = it.value();  // window, tolerances, ... checked by the library
      }
      return run_config(cfg.dump(), out_dir, json);
    }

    if (*sweep) {
      const auto grid = parse_b_grid(grid_text);
      char* csv = nullptr;
      char* js = nullptr;
      int pass = -1;
      if (am_status st = am_pspin_sweep(n, p, k, grid.data(), grid.size(), &csv, &js, &pass);
          st != AM_OK)
        return report_error(st);
      std::unique_ptr<char, decltype(&am_string_free)> csv_guard(csv, &am_string_free);
      std::unique_ptr<char, decltype(&am_string_free)> js_guard(js, &am_string_free);
      if (!out_dir.empty()) {
        std::error_code ec;
        std::filesystem::create_directories(out_dir, ec);
        for (auto [name, body] : {std::pair{"sweep.csv", csv}, {"sweep.json", js}}) {
          const std::string path = (std::filesystem::path(out_dir) / name).string();
          if (am_status st = am_write_file(path.c_str(), body); st != AM_OK)
            return report_error(st);
          if (!json) std::cout << "wrote " << path << "\n";
        }
      }
      std::cout << (json ? js : csv);
      auto j = nlohmann::json::parse(js);
      bool flagged = false;
      for (const auto& r : j["records"]) flagged = flagged || r["flagged"].get<bool>();
      if (pass != 1) {
        std::cerr << "partial: homotopy check "
                  << (pass == 0 ? "failed: " + j["homotopy"]["reason"].get<std::string>()
                                : std::string("needs two unflagged records"))
                  << "\n";
        return kPartial;
      }
      return flagged ? kPartial : kCertified;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kError;
  }
  return kError;
}
