#include "adiamorse/operators.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace adiamorse {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid-argument";
    case ErrorCode::DomainError: return "domain-error";
    case ErrorCode::DegenerateCriticalPoint: return "degenerate-critical-point";
    case ErrorCode::NoIntersection: return "no-intersection";
    case ErrorCode::DivergentDelay: return "divergent-delay";
    case ErrorCode::PerturbationTooLarge: return "perturbation-too-large";
    case ErrorCode::UnresolvedTrajectory: return "unresolved-trajectory";
    case ErrorCode::InternalConsistency: return "internal-consistency-failure";
    case ErrorCode::Io: return "io-error";
  }
  return "unknown";
}

Operator::Operator(Matrix entries) : m_(std::move(entries)) {
  if (m_.rows() != m_.cols())
    fail(ErrorCode::InvalidArgument, "operator must be square");
  if (m_.rows() < 1) fail(ErrorCode::InvalidArgument, "operator dim must be >= 1");
}

Operator Operator::zero(int dim) { return Operator(Matrix::Zero(dim, dim)); }

Operator Operator::from_real(const RealMatrix& m) {
  return Operator(m.cast<Complex>());
}

bool Operator::is_hermitian(double tol) const {
  for (int i = 0; i < dim(); ++i)
    for (int j = i; j < dim(); ++j)
      if (std::abs(m_(i, j) - std::conj(m_(j, i))) > tol) return false;
  return true;
}

bool Operator::is_real(double tol) const {
  return (m_.imag().array().abs() <= tol).all();
}

Coefficient Coefficient::polynomial(std::vector<double> a) {
  auto horner = [](const std::vector<double>& c, double s) {
    double r = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) r = r * s + *it;
    return r;
  };
  std::vector<double> da, dda;
  for (std::size_t i = 1; i < a.size(); ++i) da.push_back(a[i] * double(i));
  for (std::size_t i = 1; i < da.size(); ++i) dda.push_back(da[i] * double(i));
  return Coefficient{
      [a, horner](double s) { return horner(a, s); },
      [da, horner](double s) { return horner(da, s); },
      [dda, horner](double s) { return horner(dda, s); },
  };
}

HamiltonianPath::HamiltonianPath(int dim, std::vector<PathTerm> terms,
                                 double s_lo, double s_hi, std::string label)
    : dim_(dim), terms_(std::move(terms)), s_lo_(s_lo), s_hi_(s_hi),
      label_(std::move(label)) {
  if (dim_ < 1) fail(ErrorCode::InvalidArgument, "path dim must be >= 1");
  if (!(s_lo_ < s_hi_)) fail(ErrorCode::InvalidArgument, "empty path domain");
  for (const auto& t : terms_) {
    if (t.op.dim() != dim_)
      fail(ErrorCode::InvalidArgument, "path terms must share one dimension");
    if (!t.coefficient.value || !t.coefficient.d1 || !t.coefficient.d2)
      fail(ErrorCode::InvalidArgument, "coefficient needs value and derivatives");
    hermitian_ = hermitian_ && t.op.is_hermitian();
    real_ = real_ && t.op.is_real();
  }
}

Matrix HamiltonianPath::at(double s) const {
  Matrix h = Matrix::Zero(dim_, dim_);
  for (const auto& t : terms_) h += t.coefficient.value(s) * t.op.entries();
  return h;
}

Matrix HamiltonianPath::derivative(double s) const {
  Matrix h = Matrix::Zero(dim_, dim_);
  for (const auto& t : terms_) h += t.coefficient.d1(s) * t.op.entries();
  return h;
}

Matrix HamiltonianPath::second_derivative(double s) const {
  Matrix h = Matrix::Zero(dim_, dim_);
  for (const auto& t : terms_) h += t.coefficient.d2(s) * t.op.entries();
  return h;
}

Operator evaluate(const HamiltonianPath& path, double s) {
  const double slack = 1e-12 * (1.0 + path.s_hi() - path.s_lo());
  if (!(s >= path.s_lo() - slack && s <= path.s_hi() + slack)) {
    std::ostringstream os;
    os << "s=" << s << " outside path domain [" << path.s_lo() << ", "
       << path.s_hi() << "]";
    fail(ErrorCode::DomainError, os.str());
  }
  return Operator(path.at(s));
}

std::vector<double> eigenvalues(const Operator& op) {
  if (!op.is_hermitian())
    fail(ErrorCode::InvalidArgument, "eigenvalues() requires a Hermitian operator");
  std::vector<double> out(op.dim());
  if (op.is_real()) {
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(op.entries().real(),
                                                 Eigen::EigenvaluesOnly);
    Eigen::VectorXd::Map(out.data(), op.dim()) = es.eigenvalues();
  } else {
    Eigen::SelfAdjointEigenSolver<Matrix> es(op.entries(), Eigen::EigenvaluesOnly);
    Eigen::VectorXd::Map(out.data(), op.dim()) = es.eigenvalues();
  }
  return out;
}

std::vector<double> path_spectrum(const HamiltonianPath& path, double s) {
  Matrix h = path.at(s);
  if (path.hermitian()) {
    // Symmetrize away rounding so the Hermitian check in eigenvalues() holds.
    Matrix sym = 0.5 * (h + h.adjoint());
    return eigenvalues(Operator(std::move(sym)));
  }
  Eigen::ComplexEigenSolver<Matrix> es(h, false);
  const auto& ev = es.eigenvalues();
  const double scale = 1.0 + h.cwiseAbs().maxCoeff();
  std::vector<double> out(path.dim());
  for (int i = 0; i < path.dim(); ++i) {
    if (std::abs(ev(i).imag()) > 1e-8 * scale)
      fail(ErrorCode::InvalidArgument, "path spectrum is not real at this s");
    out[i] = ev(i).real();
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

bool is_power_of_two(long long n) { return n >= 2 && (n & (n - 1)) == 0; }

}  // namespace

HamiltonianPath build_grover_reduced(long long N, GroverBasis basis) {
  if (!is_power_of_two(N)) {
    std::ostringstream os;
    os << "Grover N must be a power of two >= 2, got " << N;
    fail(ErrorCode::InvalidArgument, os.str());
  }
  const double n = static_cast<double>(N);
  const double c = (n - 1.0) / n;
  RealMatrix h0(2, 2), h1(2, 2);
  if (basis == GroverBasis::Printed) {
    h0 << c, -(n - 1.0) / std::pow(n, 1.5), -1.0 / std::sqrt(n), 1.0 / n;
  } else {
    const double off = -std::sqrt(n - 1.0) / n;
    h0 << c, off, off, 1.0 / n;
  }
  h1 << 0.0, 0.0, 0.0, 1.0;
  std::vector<PathTerm> terms{
      {Coefficient::polynomial({1.0, -1.0}), Operator::from_real(h0)},
      {Coefficient::polynomial({0.0, 1.0}), Operator::from_real(h1)},
  };
  std::ostringstream label;
  label << "grover(N=" << N
        << (basis == GroverBasis::Printed ? ")" : ", orthonormal)");
  return HamiltonianPath(2, std::move(terms), 0.0, 1.0, label.str());
}

SpinOperators build_spin_operators(int n) {
  if (n < 1) fail(ErrorCode::InvalidArgument, "spin sector needs n >= 1");
  const int dim = n + 1;
  const double j = 0.5 * n;
  Matrix sz = Matrix::Zero(dim, dim);
  Matrix sp = Matrix::Zero(dim, dim);
  for (int i = 0; i < dim; ++i) {
    const double m = j - i;
    sz(i, i) = m;
    // S+ |j,m> = sqrt(j(j+1) - m(m+1)) |j,m+1>, and m+1 sits at index i-1.
    if (i > 0) sp(i - 1, i) = std::sqrt(j * (j + 1.0) - m * (m + 1.0));
  }
  Matrix sm = sp.adjoint();
  const Complex two_i(0.0, 2.0);
  return SpinOperators{
      Operator(sz),
      Operator((sp + sm) * 0.5),
      Operator((sp - sm) / two_i),
      Operator(sp),
      Operator(sm),
  };
}

Operator matrix_power(const Operator& op, int power) {
  if (power < 0) fail(ErrorCode::InvalidArgument, "negative matrix power");
  Matrix r = Matrix::Identity(op.dim(), op.dim());
  for (int i = 0; i < power; ++i) r = r * op.entries();
  return Operator(std::move(r));
}

HamiltonianPath build_pspin(int n, int p, double b, int k) {
  if (n < 1 || p < 1 || k < 1)
    fail(ErrorCode::InvalidArgument, "p-spin needs n, p, k >= 1");
  if (!(b >= 0.0 && b <= 1.0))
    fail(ErrorCode::InvalidArgument, "stoquasticity b must lie in [0,1]");
  const auto spin = build_spin_operators(n);
  const double nn = n;
  // Collective Pauli sums on the sector: sum sigma_z = 2 S_z, sum sigma_x = 2 S_x.
  const Operator sigma_z = spin.sz.scaled(2.0);
  const Operator sigma_x = spin.sx.scaled(2.0);
  const Operator z_term = matrix_power(sigma_z.scaled(1.0 / nn), p).scaled(nn);
  const Operator x_term = matrix_power(sigma_x.scaled(1.0 / nn), k).scaled(nn);

  std::vector<PathTerm> terms{
      {Coefficient::polynomial({0.0, -b}), z_term},
      {Coefficient::polynomial({0.0, 1.0 - b}), x_term},
      {Coefficient::polynomial({-1.0, 1.0}), sigma_x},
  };
  std::ostringstream label;
  label << "pspin(n=" << n << ", p=" << p << ", b=" << b << ", k=" << k << ")";
  return HamiltonianPath(n + 1, std::move(terms), 0.0, 1.0, label.str());
}

HamiltonianPath build_linear(const Operator& initial, const Operator& final_op,
                             std::string label) {
  if (initial.dim() != final_op.dim())
    fail(ErrorCode::InvalidArgument, "initial and final operators differ in dim");
  std::vector<PathTerm> terms{
      {Coefficient::polynomial({1.0, -1.0}), initial},
      {Coefficient::polynomial({0.0, 1.0}), final_op},
  };
  return HamiltonianPath(initial.dim(), std::move(terms), 0.0, 1.0,
                         std::move(label));
}

}  // namespace adiamorse
