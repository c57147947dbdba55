#pragma once

// The scalar landscape f(s, lambda) = det(H(s) - lambda I), closed-form
// fields, and the critical-point census built on top of them.

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "adiamorse/operators.hpp"

namespace adiamorse {

using Vec2 = Eigen::Vector2d;  // (s, lambda)
using Mat2 = Eigen::Matrix2d;

struct Window {
  double s_lo = 0.0, s_hi = 1.0;
  double l_lo = 0.0, l_hi = 1.0;

  double width_s() const { return s_hi - s_lo; }
  double width_l() const { return l_hi - l_lo; }
  double diag() const;
  bool contains(double s, double l, double slack = 0.0) const;
  bool contains(const Vec2& x, double slack = 0.0) const {
    return contains(x[0], x[1], slack);
  }
  /// Euclidean distance from an interior point to the nearest edge.
  double edge_distance(const Vec2& x) const;
};

/// Value, gradient and Hessian at one point. `scale` bounds the magnitude of
/// the terms that make up f there and is used to scale tolerances.
struct Jet {
  double value = 0.0;
  Vec2 grad = Vec2::Zero();
  Mat2 hess = Mat2::Zero();
  double scale = 1.0;
};

class Field {
 public:
  explicit Field(Window w);
  virtual ~Field() = default;

  const Window& window() const noexcept { return window_; }

  // Raw evaluation, valid everywhere the formula is; no window check.
  virtual double value(double s, double l) const = 0;
  virtual Vec2 gradient(double s, double l) const = 0;
  virtual Mat2 hessian(double s, double l) const = 0;
  virtual Jet jet(double s, double l) const;
  virtual double scale(double, double) const { return 1.0; }
  virtual std::string describe() const = 0;
  virtual std::shared_ptr<const Field> with_window(const Window& w) const = 0;

 protected:
  Window window_;
};

using FieldPtr = std::shared_ptr<const Field>;

/// Characteristic-polynomial field of a Hamiltonian path.
class CharPolyField final : public Field {
 public:
  CharPolyField(std::shared_ptr<const HamiltonianPath> path, Window w);

  double value(double s, double l) const override;
  Vec2 gradient(double s, double l) const override;
  Mat2 hessian(double s, double l) const override;
  Jet jet(double s, double l) const override;
  double scale(double s, double l) const override;
  std::string describe() const override;
  FieldPtr with_window(const Window& w) const override;

  const HamiltonianPath& path() const noexcept { return *path_; }
  std::shared_ptr<const HamiltonianPath> path_ptr() const noexcept { return path_; }

  /// Spectral data of one s-slice: ascending eigenvalues of H(s) and the
  /// diagonal of V^T H'(s) V in the same eigenbasis. Hermitian paths only.
  struct Slice {
    std::vector<double> mu;
    std::vector<double> dh;
  };
  Slice slice(double s) const;

  /// Hessian from central differences of the exact gradient. Always used
  /// for non-Hermitian paths; exposed so tests can cross-check the exact one.
  Mat2 hessian_fd(double s, double l) const;

 private:
  Jet spectral_jet(double s, double l) const;
  Jet cofactor_jet(double s, double l) const;

  std::shared_ptr<const HamiltonianPath> path_;
};

/// f = sum c_ij s^i lambda^j.
class PolynomialField final : public Field {
 public:
  using Coeffs = std::map<std::pair<int, int>, double>;
  PolynomialField(Coeffs coeffs, Window w);

  double value(double s, double l) const override;
  Vec2 gradient(double s, double l) const override;
  Mat2 hessian(double s, double l) const override;
  std::string describe() const override;
  FieldPtr with_window(const Window& w) const override;

  const Coeffs& coefficients() const noexcept { return c_; }

 private:
  Coeffs c_;
};

/// Closed-form field with user-supplied analytic derivatives.
class ExplicitField final : public Field {
 public:
  struct Functions {
    std::function<double(double, double)> value;
    std::function<Vec2(double, double)> gradient;
    std::function<Mat2(double, double)> hessian;
  };
  ExplicitField(Functions fns, Window w, std::string name = "explicit");

  double value(double s, double l) const override { return fns_.value(s, l); }
  Vec2 gradient(double s, double l) const override { return fns_.gradient(s, l); }
  Mat2 hessian(double s, double l) const override { return fns_.hessian(s, l); }
  std::string describe() const override { return name_; }
  FieldPtr with_window(const Window& w) const override;

 private:
  Functions fns_;
  std::string name_;
};

/// base + eps * (s - s0).
class TiltedField final : public Field {
 public:
  TiltedField(FieldPtr base, double eps, double s0);

  double value(double s, double l) const override;
  Vec2 gradient(double s, double l) const override;
  Mat2 hessian(double s, double l) const override { return base_->hessian(s, l); }
  Jet jet(double s, double l) const override;
  double scale(double s, double l) const override { return base_->scale(s, l); }
  std::string describe() const override;
  FieldPtr with_window(const Window& w) const override;

  double eps() const noexcept { return eps_; }

 private:
  FieldPtr base_;
  double eps_, s0_;
};

// Window-checked evaluation (DomainError outside the field window).
double field_value(const Field& f, double s, double l);
Vec2 gradient(const Field& f, double s, double l);
Mat2 hessian(const Field& f, double s, double l);

/// s-range = path domain +- s_margin; lambda-range = union of Gershgorin
/// bounds over a dense s-sample of that range, +- l_margin.
Window window_from_path(const HamiltonianPath& path, double s_margin,
                        double l_margin, int samples = 401);

// ---------------------------------------------------------------------------
// Critical points

struct CriticalPoint {
  int id = -1;
  Vec2 location = Vec2::Zero();
  double value = 0.0;
  Mat2 hessian = Mat2::Zero();
  double k1 = 0.0, k2 = 0.0;  // Hessian eigenvalues, ascending
  int index = 0;              // number of negative eigenvalues
  bool degenerate = false;
  bool borderline = false;    // within 100x of the degeneracy threshold
  double grad_norm = 0.0;
  double scale = 1.0;

  double s() const { return location[0]; }
  double lambda() const { return location[1]; }
};

struct CensusOptions {
  int grid_density = 64;
  double newton_tol = 1e-10;
  int max_newton_iters = 100;
  double merge_radius_rel = 1e-5;  // x window diagonal
  double degeneracy_tol = 1e-8;
  bool density_check = true;
  bool ridge_seeding = true;  // Hermitian char-poly fields only
  int ridge_samples = 4000;
};

struct CriticalCensus {
  std::vector<CriticalPoint> points;
  std::vector<CriticalPoint> boundary_points;
  int n_min = 0, n_saddle = 0, n_max = 0, n_degenerate = 0;
  bool is_morse = true;
  int density_used = 0;
  bool density_stable = true;
  double merge_radius = 0.0;

  int total() const { return static_cast<int>(points.size()); }
  /// #min - #saddle + #max over nondegenerate points.
  int euler() const { return n_min - n_saddle + n_max; }
  const CriticalPoint* find(int id) const;
  void recount();
};

/// Classify a converged location. Throws DomainError outside the window.
CriticalPoint classify(const Field& f, const Vec2& x, double degeneracy_tol = 1e-8);

/// Newton on grad f = 0 from one seed. Returns the converged location or
/// nullopt when the seed diverges, stalls or leaves the window.
std::optional<Vec2> newton_critical(const Field& f, const Vec2& seed,
                                    double newton_tol, int max_iters);

CriticalCensus find_critical_points(const Field& f, const CensusOptions& opt = {});

/// Per-ridge d log|f| / ds at the two s-edges of the window (Hermitian
/// char-poly fields). Ridge i lies between eigenvalues i and i+1.
struct RidgeEdgeSigns {
  std::vector<double> left, right;
  /// Every ridge grows outward at both s-edges: no critical point can enter
  /// or leave through them, so the census Euler characteristic is pinned.
  bool certified() const;
};
RidgeEdgeSigns ridge_edge_signs(const CharPolyField& f);

/// Lambda-critical point of det(H - lambda) between mu[i] and mu[i+1].
double ridge_lambda(const std::vector<double>& mu, int i);

// ---------------------------------------------------------------------------
// Degenerate critical points

struct KFoldResult {
  std::optional<int> k;        // set when the leading part is Re((x+iy)^(k+1))
  int leading_degree = 0;
  double harmonic_residual = 1.0;  // relative misfit of the leading part
};

/// Fits the local Taylor polynomial (degree <= 5) around a degenerate point
/// and tests whether its leading homogeneous part is a rotated, scaled
/// Re((x+iy)^m), m >= 3.
KFoldResult detect_kfold(const Field& f, const CriticalPoint& p,
                         double sample_radius = 0.0, double fit_tol = 1e-3);

struct PerturbResult {
  FieldPtr field;
  CriticalCensus local;  // census inside the isolating neighbourhood
  double neighborhood_radius = 0.0;
};

/// f + eps (s - s_p) and its census on the square neighbourhood of
/// half-width `radius` around p. PerturbationTooLarge when the local census
/// is not k nondegenerate saddles strictly inside the neighbourhood.
PerturbResult perturb_split(const FieldPtr& f, const CriticalPoint& p, double eps,
                            double radius, const CensusOptions& opt = {});

}  // namespace adiamorse
