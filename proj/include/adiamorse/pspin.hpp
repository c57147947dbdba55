#pragma once

// Ferromagnetic p-spin: semiclassical single-spin energy and the quantum
// b-sweep of the landscape census.

#include <optional>
#include <string>
#include <vector>

#include "adiamorse/landscape.hpp"

namespace adiamorse {

/// e(s, theta) = -s b sin^p theta + s (1-b) cos^k theta - (1-s) cos theta.
struct ClassicalEnergy {
  int p = 2;
  int k = 2;
  double b = 1.0;

  double operator()(double s, double theta) const;
};

/// Global minimizer over theta in [0, pi]: grid scan, then Brent
/// refinement of every grid-local minimum. Ties go to the smaller theta.
double classical_minimizer(const ClassicalEnergy& e, double s, int theta_grid = 4000);

enum class TransitionMode {
  Tracked,  // follow the minimum that is stable at s = 1 downward in s
  Global,   // global minimizer at each s
};

struct Transition {
  double s = 0.0;     // midpoint of the sample interval containing the jump
  double jump = 0.0;  // |delta theta*|
};

std::vector<Transition> transition_locator(const ClassicalEnergy& e, double s_resolution = 1e-3,
                                           TransitionMode mode = TransitionMode::Tracked,
                                           double jump_threshold = 0.1);

struct BSweepOptions {
  CensusOptions census;
  double s_margin_start = 0.25;  // grown until the s-edges certify
  double s_margin_max = 128.0;
  double l_margin = 0.25;
  int refine_points = 10;
};

struct BSweepRecord {
  double b = 0.0;
  CriticalCensus census;
  std::optional<int> chi;  // absent when flagged
  int n_min = 0, n_saddle = 0, n_max = 0;
  bool flagged = false;
  std::string flag_reason;
  Window window;
  bool window_certified = false;
  bool refinement = false;  // inserted around a flagged record

  int total() const { return n_min + n_saddle + n_max; }
};

/// Census of the p-spin landscape for one b.
BSweepRecord pspin_record(int n, int p, int k, double b, const BSweepOptions& opt = {});

/// Records in ascending b. Flagged records get `refine_points` extra b
/// values spread over the neighbouring grid intervals.
std::vector<BSweepRecord> b_sweep(int n, int p, int k, const std::vector<double>& b_grid,
                                  const BSweepOptions& opt = {});

std::vector<double> uniform_b_grid(int points = 41);

struct HomotopyVerdict {
  bool pass = false;
  std::optional<int> chi;
  double b_from = 0.0, b_to = 0.0;  // offending interval on failure
  std::string reason;
};

HomotopyVerdict homotopy_check(const std::vector<BSweepRecord>& records);

}  // namespace adiamorse
