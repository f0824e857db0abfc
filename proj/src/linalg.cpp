#include "qmetric/linalg.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>

#include "qmetric/errors.hpp"

namespace qmetric::linalg {

namespace {

using EigenRowMatrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Eigen::Map<const EigenRowMatrix> as_eigen(const CMatrix& m) {
  return {m.data().data(), static_cast<Eigen::Index>(m.rows()), static_cast<Eigen::Index>(m.cols())};
}

CMatrix from_eigen(const Eigen::MatrixXcd& e) {
  CMatrix out(static_cast<std::size_t>(e.rows()), static_cast<std::size_t>(e.cols()));
  for (Eigen::Index r = 0; r < e.rows(); ++r)
    for (Eigen::Index c = 0; c < e.cols(); ++c) out(r, c) = e(r, c);
  return out;
}

void require_finite(const CMatrix& m, const char* op) {
  if (!m.all_finite()) throw PreconditionError(std::string(op) + ": matrix has non-finite entries");
}

bool finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

}  // namespace

CMatrix::CMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

CMatrix::CMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
  if (data_.size() != rows_ * cols_)
    throw PreconditionError("CMatrix: " + std::to_string(data_.size()) + " entries for " + std::to_string(rows_) +
                            "x" + std::to_string(cols_));
  if (!all_finite()) throw PreconditionError("CMatrix: non-finite entry");
}

CMatrix::CMatrix(std::initializer_list<std::initializer_list<Complex>> rows) {
  rows_ = rows.size();
  cols_ = rows_ ? rows.begin()->size() : 0;
  data_.reserve(rows_ * cols_);
  for (const auto& row : rows) {
    if (row.size() != cols_) throw PreconditionError("CMatrix: ragged initializer");
    data_.insert(data_.end(), row.begin(), row.end());
  }
  if (!all_finite()) throw PreconditionError("CMatrix: non-finite entry");
}

CMatrix CMatrix::identity(std::size_t n) {
  CMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

CMatrix CMatrix::diagonal(std::span<const Complex> diag) {
  CMatrix m(diag.size(), diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
  return m;
}

CMatrix CMatrix::adjoint() const {
  CMatrix out(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) out(c, r) = std::conj((*this)(r, c));
  return out;
}

Complex CMatrix::trace() const {
  QMETRIC_REQUIRE(is_square(), "trace: matrix not square");
  Complex t = 0.0;
  for (std::size_t i = 0; i < rows_; ++i) t += (*this)(i, i);
  return t;
}

double CMatrix::frobenius_norm() const {
  double s = 0.0;
  for (const auto& z : data_) s += std::norm(z);
  return std::sqrt(s);
}

bool CMatrix::all_finite() const { return std::all_of(data_.begin(), data_.end(), finite); }

double CMatrix::max_abs_diff(const CMatrix& other) const {
  QMETRIC_REQUIRE(rows_ == other.rows_ && cols_ == other.cols_, "max_abs_diff: shape mismatch");
  double d = 0.0;
  for (std::size_t i = 0; i < data_.size(); ++i) d = std::max(d, std::abs(data_[i] - other.data_[i]));
  return d;
}

CMatrix& CMatrix::operator+=(const CMatrix& rhs) {
  QMETRIC_REQUIRE(rows_ == rhs.rows_ && cols_ == rhs.cols_, "matrix sum: shape mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += rhs.data_[i];
  return *this;
}

CMatrix& CMatrix::operator-=(const CMatrix& rhs) {
  QMETRIC_REQUIRE(rows_ == rhs.rows_ && cols_ == rhs.cols_, "matrix difference: shape mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= rhs.data_[i];
  return *this;
}

CMatrix& CMatrix::operator*=(Complex s) {
  for (auto& z : data_) z *= s;
  return *this;
}

CMatrix operator*(const CMatrix& a, const CMatrix& b) {
  QMETRIC_REQUIRE(a.cols_ == b.rows_, "matrix product: inner dimensions differ");
  CMatrix out(a.rows_, b.cols_);
  for (std::size_t r = 0; r < a.rows_; ++r) {
    Complex* dst = &out.data_[r * b.cols_];
    for (std::size_t k = 0; k < a.cols_; ++k) {
      const Complex s = a.data_[r * a.cols_ + k];
      if (s == Complex{}) continue;
      const Complex* src = &b.data_[k * b.cols_];
      for (std::size_t c = 0; c < b.cols_; ++c) dst[c] += s * src[c];
    }
  }
  return out;
}

double SingularSpectrum::sum_of_squares() const {
  double s = 0.0;
  for (double v : values) s += v * v;
  return s;
}

CMatrix kron(const CMatrix& a, const CMatrix& b, const Caps& caps) {
  const std::size_t rows = a.rows() * b.rows();
  const std::size_t cols = a.cols() * b.cols();
  if (std::max(rows, cols) > caps.matrix_dim)
    throw ResourceLimitError("kron: result " + std::to_string(rows) + "x" + std::to_string(cols) +
                             " exceeds matrix cap " + std::to_string(caps.matrix_dim));
  CMatrix out(rows, cols);
  for (std::size_t ar = 0; ar < a.rows(); ++ar)
    for (std::size_t ac = 0; ac < a.cols(); ++ac) {
      const Complex s = a(ar, ac);
      if (s == Complex{}) continue;
      for (std::size_t br = 0; br < b.rows(); ++br)
        for (std::size_t bc = 0; bc < b.cols(); ++bc) out(ar * b.rows() + br, ac * b.cols() + bc) = s * b(br, bc);
    }
  return out;
}

SingularSpectrum singular_values(const CMatrix& m) {
  require_finite(m, "singular_values");
  SingularSpectrum out;
  if (m.rows() == 0 || m.cols() == 0) return out;
  const Eigen::MatrixXcd e = as_eigen(m);
  Eigen::VectorXd s;
  if (std::min(m.rows(), m.cols()) <= 64) {
    s = Eigen::JacobiSVD<Eigen::MatrixXcd>(e).singularValues();
  } else {
    s = Eigen::BDCSVD<Eigen::MatrixXcd>(e).singularValues();
  }
  out.values.assign(s.data(), s.data() + s.size());
  std::sort(out.values.begin(), out.values.end(), std::greater<>());
  return out;
}

Svd svd(const CMatrix& m) {
  require_finite(m, "svd");
  const Eigen::MatrixXcd e = as_eigen(m);
  Eigen::BDCSVD<Eigen::MatrixXcd> dec(e, Eigen::ComputeThinU | Eigen::ComputeThinV);
  Svd out{from_eigen(dec.matrixU()), {}, from_eigen(dec.matrixV())};
  const Eigen::VectorXd& s = dec.singularValues();
  out.sigma.values.assign(s.data(), s.data() + s.size());
  return out;
}

double operator_norm_power(const CMatrix& m, double rel_tol, int max_iter) {
  require_finite(m, "operator_norm_power");
  if (m.rows() == 0 || m.cols() == 0) return 0.0;
  const auto a = as_eigen(m);
  // Deterministic start with no special alignment to coordinate axes.
  Eigen::VectorXcd x(static_cast<Eigen::Index>(m.cols()));
  for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = Complex(1.0 + 0.37 * std::sin(1.7 * i + 0.3), 0.21 * std::cos(2.3 * i));
  x.normalize();
  double prev = -1.0;
  for (int it = 0; it < max_iter; ++it) {
    const Eigen::VectorXcd y = a * x;
    Eigen::VectorXcd z = a.adjoint() * y;
    const double lambda = y.squaredNorm();  // Rayleigh quotient of m^*m at unit x
    const double zn = z.norm();
    if (zn == 0.0) return 0.0;
    x = z / zn;
    if (prev >= 0.0 && std::abs(lambda - prev) <= rel_tol * lambda) return std::sqrt(std::max(lambda, zn));
    prev = lambda;
  }
  throw NumericalError("operator_norm_power: no convergence in " + std::to_string(max_iter) + " iterations");
}

double operator_norm(const CMatrix& m) {
  require_finite(m, "operator_norm");
  if (std::max(m.rows(), m.cols()) <= kDenseNormLimit) return singular_values(m).largest();
  return operator_norm_power(m);
}

CMatrix random_gaussian(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  CMatrix m(rows, cols);
  for (auto& z : m.data()) z = Complex(g(rng), g(rng));
  return m;
}

CMatrix random_unitary(std::size_t n, std::mt19937_64& rng) {
  const CMatrix g = random_gaussian(n, n, rng);
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(Eigen::MatrixXcd(as_eigen(g)));
  Eigen::MatrixXcd q = qr.householderQ();
  // Fix column phases by the diagonal of R so the distribution is unitarily invariant.
  const Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index i = 0; i < q.cols(); ++i) {
    const Complex d = r(i, i);
    if (std::abs(d) > 0) q.col(i) *= d / std::abs(d);
  }
  return from_eigen(q);
}

}  // namespace qmetric::linalg
