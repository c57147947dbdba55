#pragma once

// Hamiltonian families and dense Hermitian matrix services.

#include <complex>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "adiamorse/error.hpp"

namespace adiamorse {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;

inline constexpr double kHermitianTol = 1e-12;

/// Dense square operator. Construction checks squareness only; whether the
/// entries are Hermitian is a queryable property because the printed Grover
/// reduction lives in a non-orthonormal basis.
class Operator {
 public:
  Operator() = default;
  explicit Operator(Matrix entries);
  static Operator zero(int dim);
  static Operator from_real(const RealMatrix& m);

  int dim() const noexcept { return static_cast<int>(m_.rows()); }
  const Matrix& entries() const noexcept { return m_; }
  Complex operator()(int i, int j) const { return m_(i, j); }

  bool is_hermitian(double tol = kHermitianTol) const;
  bool is_real(double tol = 0.0) const;

  Operator operator+(const Operator& o) const { return Operator(m_ + o.m_); }
  Operator operator-(const Operator& o) const { return Operator(m_ - o.m_); }
  Operator operator*(const Operator& o) const { return Operator(m_ * o.m_); }
  Operator scaled(double c) const { return Operator(m_ * c); }

 private:
  Matrix m_;
};

/// Smooth real coefficient c(s) with analytic first and second derivatives.
struct Coefficient {
  std::function<double(double)> value;
  std::function<double(double)> d1;
  std::function<double(double)> d2;

  /// c(s) = a0 + a1 s + a2 s^2 + ...
  static Coefficient polynomial(std::vector<double> coeffs);
  static Coefficient constant(double c) { return polynomial({c}); }
};

struct PathTerm {
  Coefficient coefficient;
  Operator op;
};

/// s -> H(s) = sum_i c_i(s) A_i on a closed s-interval.
class HamiltonianPath {
 public:
  HamiltonianPath(int dim, std::vector<PathTerm> terms, double s_lo = 0.0,
                  double s_hi = 1.0, std::string label = {});

  int dim() const noexcept { return dim_; }
  double s_lo() const noexcept { return s_lo_; }
  double s_hi() const noexcept { return s_hi_; }
  const std::string& label() const noexcept { return label_; }
  const std::vector<PathTerm>& terms() const noexcept { return terms_; }

  /// True when every term operator is Hermitian, so H(s) is Hermitian for all s.
  bool hermitian() const noexcept { return hermitian_; }
  bool real() const noexcept { return real_; }

  // Unchecked evaluation; the landscape extends paths past their domain.
  Matrix at(double s) const;
  Matrix derivative(double s) const;
  Matrix second_derivative(double s) const;

 private:
  int dim_;
  std::vector<PathTerm> terms_;
  double s_lo_, s_hi_;
  std::string label_;
  bool hermitian_ = true;
  bool real_ = true;
};

/// H(s) for s inside the path domain; outside raises DomainError.
Operator evaluate(const HamiltonianPath& path, double s);

/// Ascending eigenvalues of a Hermitian operator.
std::vector<double> eigenvalues(const Operator& op);

/// Ascending eigenvalues of H(s) without the domain check. Non-Hermitian
/// paths go through a general solver and must have a real spectrum.
std::vector<double> path_spectrum(const HamiltonianPath& path, double s);

enum class GroverBasis {
  Printed,      // (v,u) basis exactly as displayed, not orthonormal
  Orthonormal,  // Hermitian form with the same characteristic polynomial
};

/// Reduced 2x2 adiabatic search Hamiltonian for N = 2^n items.
HamiltonianPath build_grover_reduced(long long N,
                                     GroverBasis basis = GroverBasis::Printed);

struct SpinOperators {
  Operator sz;
  Operator sx;
  Operator sy;
  Operator s_plus;
  Operator s_minus;
};

/// Maximal-spin sector (spin n/2, dimension n+1, basis m = n/2 ... -n/2).
SpinOperators build_spin_operators(int n);

/// Ferromagnetic p-spin with non-stoquastic (sum sigma_x / n)^k coupling,
/// restricted to the maximal-spin sector. b = 1 is the stoquastic model.
HamiltonianPath build_pspin(int n, int p, double b, int k = 2);

/// H(s) = (1-s) H0 + s H1 for user-supplied matrices.
HamiltonianPath build_linear(const Operator& initial, const Operator& final_op,
                             std::string label = "linear");

Operator matrix_power(const Operator& op, int power);

}  // namespace adiamorse
