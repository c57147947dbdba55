#pragma once

// Curvature of the landscape graph, Dupin-indicatrix gaps, delay factors,
// Gauss-Bonnet budgets and level-set spectrum tracing.

#include <optional>
#include <utility>
#include <vector>

#include "adiamorse/landscape.hpp"

namespace adiamorse {

enum class CurvatureFormula {
  Standard,  // (f_ss f_ll - f_sl^2) / (1 + |grad f|^2)^2
  Printed,   // numerator f_ss f_ll - f_l^2; kept for comparison only
};

double gauss_curvature(const Field& f, double s, double l,
                       CurvatureFormula formula = CurvatureFormula::Standard);

/// Hessian eigenvalues at a nondegenerate critical point, ascending.
std::pair<double, double> principal_curvatures(const Field& f, const CriticalPoint& p);

/// Local conic model f(p) + (x-p)^T H (x-p) / 2 restricted to the zero level.
struct DupinParameters {
  double f_p = 0.0;
  double k1 = 0.0, k2 = 0.0;
  double h_ll = 0.0;  // curvature along lambda, selects the slice
  double s_p = 0.0;
};

struct CurvatureReport {
  int point_id = -1;
  double K = 0.0;
  double k1 = 0.0, k2 = 0.0;
  DupinParameters dupin;
  std::optional<double> delay;  // saddles only
};

/// K, principal curvatures and Dupin parameters of a census point. For a
/// saddle the delay over s_range is attached when it is finite.
CurvatureReport curvature_report(const Field& f, const CriticalPoint& p,
                                 std::optional<std::pair<double, double>> s_range = {});

/// Distance between the two zero-level roots of the conic model at slice s.
/// NoIntersection when the slice misses the conic.
double dupin_gap(const CurvatureReport& r, double s);

/// Integral of 1/g(s)^2 over s_range by adaptive Gauss-Kronrod.
/// DivergentDelay when g vanishes in the range.
double delay_factor(const CurvatureReport& r, std::pair<double, double> s_range);

/// Antiderivative evaluation of the same integral, for cross-checks.
double delay_factor_closed_form(const CurvatureReport& r, std::pair<double, double> s_range);

struct GaussBonnetResult {
  double value = 0.0;   // at twice the requested density
  double coarse = 0.0;  // at the requested density
  bool converged = false;  // relative difference <= 1%
  int density = 0;
};

/// Integral of K sqrt(1 + |grad f|^2) over a rectangle, composite
/// Gauss-Legendre with `density` panels per axis.
GaussBonnetResult gauss_bonnet_integral(const Field& f, const Window& region, int density = 64,
                                        CurvatureFormula formula = CurvatureFormula::Standard);

struct SpectrumBranch {
  int index = 0;
  std::vector<std::pair<double, double>> samples;  // (s, lambda_i(s))
  double min_gap_to_next = 0.0;                     // +inf for the top branch
  double s_at_min_gap = 0.0;
  double max_residual = 0.0;  // max |f(s, lambda_i)| / scale
  bool ambiguous = false;
};

struct SpectrumTrace {
  std::vector<double> s;
  std::vector<SpectrumBranch> branches;
  bool ambiguous = false;
};

/// Diagonalizes the path on a uniform grid over its domain, refining where
/// a branch moves by more than half the local gap, and checks that every
/// sample lies on the zero level of the field (determinant by LU).
SpectrumTrace spectrum_trace(const CharPolyField& f, int s_samples = 201,
                             int max_refinements = 12);

/// det(H(s) - lambda I) via partial-pivot LU, independent of the spectral
/// route the field uses.
double determinant_residual(const HamiltonianPath& path, double s, double lambda);

}  // namespace adiamorse
