#pragma once

// Gradient flow, instanton counting and the GF(2) Morse complex.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "adiamorse/landscape.hpp"

namespace adiamorse {

enum class FlowDirection { Downward, Upward };
enum class TerminusKind { CriticalPoint, BoundaryExit, Unresolved };
enum class WindowEdge { None, SLo, SHi, LambdaLo, LambdaHi };

const char* to_string(FlowDirection d);
const char* to_string(TerminusKind k);
const char* to_string(WindowEdge e);

struct TrajectorySample {
  double s, lambda, tau, f;
};

struct Trajectory {
  std::vector<TrajectorySample> samples;
  int origin = -1;  // critical-point id, -1 for a free seed
  FlowDirection direction = FlowDirection::Downward;
  TerminusKind kind = TerminusKind::Unresolved;
  int terminus = -1;  // critical-point id when kind == CriticalPoint
  WindowEdge exit_edge = WindowEdge::None;
  int steps = 0;
};

struct FlowOptions {
  double rtol = 1e-9;               // per-step relative error
  double capture_radius_rel = 1e-3; // x window diagonal
  double launch_offset_rel = 1e-4;  // x window diagonal
  double tau_span = 100.0;          // time budget, see make_flow_context
  int max_steps = 400000;
  int max_samples = 4000;
};

/// Per-field data shared by many integrations: speed cap and capture radii.
struct FlowContext {
  const Field* field = nullptr;
  const CriticalCensus* census = nullptr;
  FlowOptions options;
  double speed_cap = 1.0;  // median |grad f| over the window
  double tau_max = 0.0;
  std::vector<double> capture_radius;  // per census point
};

FlowContext make_flow_context(const Field& f, const CriticalCensus& census,
                              const FlowOptions& opt = {});

/// Integrates x' = -grad f (downward) or +grad f (upward) until the path is
/// captured by a census point, leaves the window, or runs out of time.
/// Orbits are those of the plain gradient flow; tau is measured in the
/// speed-capped parametrisation x' = -/+ grad f / max(1, |grad f| / cap).
Trajectory integrate_flow(const FlowContext& ctx, const Vec2& start, FlowDirection dir,
                          int origin = -1);

/// Two downward launches along the negative-curvature eigenvector and two
/// upward launches along the positive one.
std::array<Trajectory, 4> separatrices(const FlowContext& ctx, const CriticalPoint& saddle);

struct InstantonEdge {
  int from = -1;  // index k
  int to = -1;    // index k-1
  int count = 0;  // raw number of flow lines found
  std::uint8_t multiplicity_mod2 = 0;
  Trajectory representative;
};

struct InstantonCount {
  std::vector<InstantonEdge> edges;
  std::vector<Trajectory> trajectories;  // every separatrix traced
  bool certifiable = true;
  std::vector<std::string> issues;
};

InstantonCount count_instantons(const FlowContext& ctx);

using Gf2Matrix = std::vector<std::vector<std::uint8_t>>;  // rows x cols

int gf2_rank(Gf2Matrix m);
Gf2Matrix gf2_multiply(const Gf2Matrix& a, const Gf2Matrix& b, int inner);

struct MorseComplex {
  std::array<std::vector<int>, 3> generators;  // critical ids by index
  Gf2Matrix d1;  // #min x #saddle   (C1 -> C0)
  Gf2Matrix d2;  // #saddle x #max   (C2 -> C1)
};

/// Boundary matrices from instanton multiplicities. Throws InvalidArgument
/// for a non-Morse census and InternalConsistency when d1 d2 != 0.
MorseComplex build_complex(const CriticalCensus& census,
                           const std::vector<InstantonEdge>& edges);

struct HomologySummary {
  std::array<int, 3> betti{0, 0, 0};
  int euler = 0;         // from Betti numbers
  int euler_counts = 0;  // from generator counts
  std::array<int, 3> handles{0, 0, 0};
};

HomologySummary homology(const MorseComplex& c);

struct CurvatureReport;

struct NetworkNode {
  const CriticalPoint* point = nullptr;
  const CurvatureReport* curvature = nullptr;
};

struct CriticalNetwork {
  std::vector<NetworkNode> nodes;
  std::vector<const InstantonEdge*> edges;
};

/// Critical points annotated with curvature, joined by instantons.
/// Holds pointers into its arguments, which must outlive it.
CriticalNetwork critical_network(const CriticalCensus& census,
                                 const std::vector<InstantonEdge>& edges,
                                 const std::vector<CurvatureReport>& curvature);

}  // namespace adiamorse
