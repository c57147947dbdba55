#include "adiamorse/landscape.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

namespace adiamorse {

double Window::diag() const { return std::hypot(width_s(), width_l()); }

bool Window::contains(double s, double l, double slack) const {
  return s >= s_lo - slack && s <= s_hi + slack && l >= l_lo - slack &&
         l <= l_hi + slack;
}

double Window::edge_distance(const Vec2& x) const {
  return std::min({x[0] - s_lo, s_hi - x[0], x[1] - l_lo, l_hi - x[1]});
}

Field::Field(Window w) : window_(w) {
  if (!(w.s_lo < w.s_hi) || !(w.l_lo < w.l_hi) || !std::isfinite(w.diag()))
    fail(ErrorCode::InvalidArgument, "field window must be a finite, non-empty rectangle");
}

Jet Field::jet(double s, double l) const {
  return Jet{value(s, l), gradient(s, l), hessian(s, l), scale(s, l)};
}

namespace {

void check_inside(const Field& f, double s, double l) {
  if (!f.window().contains(s, l, 1e-12 * f.window().diag())) {
    std::ostringstream os;
    os << "point (" << s << ", " << l << ") outside field window";
    fail(ErrorCode::DomainError, os.str());
  }
}

}  // namespace

double field_value(const Field& f, double s, double l) {
  check_inside(f, s, l);
  return f.value(s, l);
}

Vec2 gradient(const Field& f, double s, double l) {
  check_inside(f, s, l);
  return f.gradient(s, l);
}

Mat2 hessian(const Field& f, double s, double l) {
  check_inside(f, s, l);
  return f.hessian(s, l);
}

// ---------------------------------------------------------------------------
// CharPolyField

CharPolyField::CharPolyField(std::shared_ptr<const HamiltonianPath> path, Window w)
    : Field(w), path_(std::move(path)) {
  if (!path_) fail(ErrorCode::InvalidArgument, "null path");
}

namespace {

struct Eigenbasis {
  Eigen::VectorXd mu;
  Matrix v;
};

Eigenbasis diagonalize(const HamiltonianPath& path, double s, bool vectors) {
  const Matrix h = path.at(s);
  Eigenbasis out;
  const auto opts = vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly;
  if (path.real()) {
    RealMatrix hr = 0.5 * (h.real() + h.real().transpose());
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(hr, opts);
    out.mu = es.eigenvalues();
    if (vectors) out.v = es.eigenvectors().cast<Complex>();
  } else {
    Matrix hs = 0.5 * (h + h.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> es(hs, opts);
    out.mu = es.eigenvalues();
    if (vectors) out.v = es.eigenvectors();
  }
  return out;
}

// Products of all shifted eigenvalues except one (P) or two (Q) of them.
// Computed directly rather than by division so exact zeros are harmless.
struct CofactorProducts {
  std::vector<double> p;               // P_j
  std::vector<std::vector<double>> q;  // Q_jk, j != k
  double all = 1.0;
};

CofactorProducts cofactor_products(const Eigen::VectorXd& d) {
  const int n = static_cast<int>(d.size());
  CofactorProducts c;
  c.p.assign(n, 1.0);
  c.q.assign(n, std::vector<double>(n, 0.0));
  for (int j = 0; j < n; ++j) c.all *= d[j];
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k)
      if (k != j) c.p[j] *= d[k];
  for (int j = 0; j < n; ++j)
    for (int k = j + 1; k < n; ++k) {
      double prod = 1.0;
      for (int m = 0; m < n; ++m)
        if (m != j && m != k) prod *= d[m];
      c.q[j][k] = c.q[k][j] = prod;
    }
  return c;
}

}  // namespace

Jet CharPolyField::spectral_jet(double s, double l) const {
  const auto eb = diagonalize(*path_, s, true);
  const int n = path_->dim();
  const Eigen::VectorXd d = eb.mu.array() - l;
  const Matrix b = eb.v.adjoint() * path_->derivative(s) * eb.v;
  const Matrix c = eb.v.adjoint() * path_->second_derivative(s) * eb.v;
  const auto cp = cofactor_products(d);

  Jet j;
  j.value = cp.all;
  double fs = 0.0, fl = 0.0, fss = 0.0, fsl = 0.0, fll = 0.0;
  for (int a = 0; a < n; ++a) {
    const double baa = b(a, a).real();
    fl -= cp.p[a];
    fs += cp.p[a] * baa;
    fss += cp.p[a] * c(a, a).real();
    double qsum = 0.0;
    for (int k = 0; k < n; ++k)
      if (k != a) qsum += cp.q[a][k];
    fsl -= baa * qsum;
    for (int k = a + 1; k < n; ++k) {
      fll += 2.0 * cp.q[a][k];
      fss += 2.0 * cp.q[a][k] * (baa * b(k, k).real() - std::norm(b(a, k)));
    }
  }
  j.grad << fs, fl;
  j.hess << fss, fsl, fsl, fll;
  j.scale = 1.0;
  for (int a = 0; a < n; ++a) j.scale *= 1.0 + std::abs(d[a]);
  return j;
}

namespace {

Complex cofactor_det(const Matrix& a, int row, int col) {
  const int n = static_cast<int>(a.rows());
  if (n == 1) return 1.0;
  Matrix m(n - 1, n - 1);
  for (int i = 0, r = 0; i < n; ++i) {
    if (i == row) continue;
    for (int k = 0, cc = 0; k < n; ++k) {
      if (k == col) continue;
      m(r, cc++) = a(i, k);
    }
    ++r;
  }
  return m.partialPivLu().determinant();
}

Matrix adjugate(const Matrix& a) {
  const int n = static_cast<int>(a.rows());
  Matrix adj(n, n);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k)
      adj(k, i) = (((i + k) % 2) ? -1.0 : 1.0) * cofactor_det(a, i, k);
  return adj;
}

double row_scale(const Matrix& a) {
  double sc = 1.0;
  for (int i = 0; i < a.rows(); ++i) sc *= 1.0 + a.row(i).cwiseAbs().sum();
  return sc;
}

}  // namespace

Jet CharPolyField::cofactor_jet(double s, double l) const {
  const int n = path_->dim();
  const Matrix a = path_->at(s) - l * Matrix::Identity(n, n);
  const Matrix adj = adjugate(a);
  Jet j;
  j.value = a.partialPivLu().determinant().real();
  j.grad << (adj * path_->derivative(s)).trace().real(), -adj.trace().real();
  j.hess = hessian_fd(s, l);
  j.scale = row_scale(a);
  return j;
}

Mat2 CharPolyField::hessian_fd(double s, double l) const {
  const double hs = 1e-4 * window_.width_s();
  const double hl = 1e-4 * window_.width_l();
  auto grad_at = [&](double ss, double ll) {
    if (path_->hermitian()) return spectral_jet(ss, ll).grad;
    const int n = path_->dim();
    const Matrix a = path_->at(ss) - ll * Matrix::Identity(n, n);
    const Matrix adj = adjugate(a);
    Vec2 g;
    g << (adj * path_->derivative(ss)).trace().real(), -adj.trace().real();
    return g;
  };
  const Vec2 ds = (grad_at(s + hs, l) - grad_at(s - hs, l)) / (2.0 * hs);
  const Vec2 dl = (grad_at(s, l + hl) - grad_at(s, l - hl)) / (2.0 * hl);
  Mat2 h;
  h << ds[0], 0.5 * (ds[1] + dl[0]), 0.5 * (ds[1] + dl[0]), dl[1];
  return h;
}

Jet CharPolyField::jet(double s, double l) const {
  return path_->hermitian() ? spectral_jet(s, l) : cofactor_jet(s, l);
}

double CharPolyField::value(double s, double l) const {
  if (path_->hermitian()) {
    const auto eb = diagonalize(*path_, s, false);
    double v = 1.0;
    for (int a = 0; a < eb.mu.size(); ++a) v *= eb.mu[a] - l;
    return v;
  }
  const int n = path_->dim();
  return (path_->at(s) - l * Matrix::Identity(n, n)).partialPivLu().determinant().real();
}

Vec2 CharPolyField::gradient(double s, double l) const {
  if (path_->hermitian()) return spectral_jet(s, l).grad;
  const int n = path_->dim();
  const Matrix a = path_->at(s) - l * Matrix::Identity(n, n);
  const Matrix adj = adjugate(a);
  Vec2 g;
  g << (adj * path_->derivative(s)).trace().real(), -adj.trace().real();
  return g;
}

Mat2 CharPolyField::hessian(double s, double l) const {
  return path_->hermitian() ? spectral_jet(s, l).hess : hessian_fd(s, l);
}

double CharPolyField::scale(double s, double l) const {
  if (path_->hermitian()) {
    const auto eb = diagonalize(*path_, s, false);
    double sc = 1.0;
    for (int a = 0; a < eb.mu.size(); ++a) sc *= 1.0 + std::abs(eb.mu[a] - l);
    return sc;
  }
  const int n = path_->dim();
  return row_scale(path_->at(s) - l * Matrix::Identity(n, n));
}

std::string CharPolyField::describe() const { return "det(H(s)-lambda) of " + path_->label(); }

FieldPtr CharPolyField::with_window(const Window& w) const {
  return std::make_shared<CharPolyField>(path_, w);
}

CharPolyField::Slice CharPolyField::slice(double s) const {
  if (!path_->hermitian())
    fail(ErrorCode::InvalidArgument, "spectral slices need a Hermitian path");
  const auto eb = diagonalize(*path_, s, true);
  const Matrix b = eb.v.adjoint() * path_->derivative(s) * eb.v;
  Slice out;
  out.mu.assign(eb.mu.data(), eb.mu.data() + eb.mu.size());
  out.dh.resize(out.mu.size());
  for (std::size_t a = 0; a < out.mu.size(); ++a) out.dh[a] = b(a, a).real();
  return out;
}

// ---------------------------------------------------------------------------
// PolynomialField

PolynomialField::PolynomialField(Coeffs coeffs, Window w)
    : Field(w), c_(std::move(coeffs)) {
  for (const auto& [ij, c] : c_) {
    if (ij.first < 0 || ij.second < 0)
      fail(ErrorCode::InvalidArgument, "polynomial exponents must be >= 0");
    if (!std::isfinite(c)) fail(ErrorCode::InvalidArgument, "non-finite coefficient");
  }
}

namespace {

double ipow(double x, int e) {
  double r = 1.0;
  for (int i = 0; i < e; ++i) r *= x;
  return r;
}

}  // namespace

double PolynomialField::value(double s, double l) const {
  double v = 0.0;
  for (const auto& [ij, c] : c_) v += c * ipow(s, ij.first) * ipow(l, ij.second);
  return v;
}

Vec2 PolynomialField::gradient(double s, double l) const {
  Vec2 g = Vec2::Zero();
  for (const auto& [ij, c] : c_) {
    const auto [i, j] = ij;
    if (i > 0) g[0] += c * i * ipow(s, i - 1) * ipow(l, j);
    if (j > 0) g[1] += c * j * ipow(s, i) * ipow(l, j - 1);
  }
  return g;
}

Mat2 PolynomialField::hessian(double s, double l) const {
  Mat2 h = Mat2::Zero();
  for (const auto& [ij, c] : c_) {
    const auto [i, j] = ij;
    if (i > 1) h(0, 0) += c * i * (i - 1) * ipow(s, i - 2) * ipow(l, j);
    if (j > 1) h(1, 1) += c * j * (j - 1) * ipow(s, i) * ipow(l, j - 2);
    if (i > 0 && j > 0) h(0, 1) += c * i * j * ipow(s, i - 1) * ipow(l, j - 1);
  }
  h(1, 0) = h(0, 1);
  return h;
}

std::string PolynomialField::describe() const {
  std::ostringstream os;
  os << "polynomial(";
  bool first = true;
  for (const auto& [ij, c] : c_) {
    if (!first) os << " + ";
    os << c << "*s^" << ij.first << "*l^" << ij.second;
    first = false;
  }
  os << ")";
  return os.str();
}

FieldPtr PolynomialField::with_window(const Window& w) const {
  return std::make_shared<PolynomialField>(c_, w);
}

// ---------------------------------------------------------------------------

ExplicitField::ExplicitField(Functions fns, Window w, std::string name)
    : Field(w), fns_(std::move(fns)), name_(std::move(name)) {
  if (!fns_.value || !fns_.gradient || !fns_.hessian)
    fail(ErrorCode::InvalidArgument, "explicit field needs value, gradient and Hessian");
}

FieldPtr ExplicitField::with_window(const Window& w) const {
  return std::make_shared<ExplicitField>(fns_, w, name_);
}

TiltedField::TiltedField(FieldPtr base, double eps, double s0)
    : Field(base->window()), base_(std::move(base)), eps_(eps), s0_(s0) {}

double TiltedField::value(double s, double l) const {
  return base_->value(s, l) + eps_ * (s - s0_);
}

Vec2 TiltedField::gradient(double s, double l) const {
  Vec2 g = base_->gradient(s, l);
  g[0] += eps_;
  return g;
}

Jet TiltedField::jet(double s, double l) const {
  Jet j = base_->jet(s, l);
  j.value += eps_ * (s - s0_);
  j.grad[0] += eps_;
  return j;
}

std::string TiltedField::describe() const {
  std::ostringstream os;
  os << base_->describe() << " + " << eps_ << "*(s - " << s0_ << ")";
  return os.str();
}

FieldPtr TiltedField::with_window(const Window& w) const {
  return std::make_shared<TiltedField>(base_->with_window(w), eps_, s0_);
}

// ---------------------------------------------------------------------------

Window window_from_path(const HamiltonianPath& path, double s_margin,
                        double l_margin, int samples) {
  if (s_margin < 0.0 || l_margin < 0.0)
    fail(ErrorCode::InvalidArgument, "window margins must be non-negative");
  Window w;
  w.s_lo = path.s_lo() - s_margin;
  w.s_hi = path.s_hi() + s_margin;
  double lo = 0.0, hi = 0.0;
  bool first = true;
  samples = std::max(samples, 2);
  for (int i = 0; i < samples; ++i) {
    const double s = w.s_lo + (w.s_hi - w.s_lo) * i / (samples - 1);
    const Matrix h = path.at(s);
    for (int r = 0; r < h.rows(); ++r) {
      const double center = h(r, r).real();
      const double radius = h.row(r).cwiseAbs().sum() - std::abs(h(r, r));
      if (first) {
        lo = center - radius;
        hi = center + radius;
        first = false;
      } else {
        lo = std::min(lo, center - radius);
        hi = std::max(hi, center + radius);
      }
    }
  }
  w.l_lo = lo - l_margin;
  w.l_hi = hi + l_margin;
  return w;
}

}  // namespace adiamorse
