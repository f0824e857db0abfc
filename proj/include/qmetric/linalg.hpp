#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <random>
#include <span>
#include <vector>

#include "qmetric/caps.hpp"

namespace qmetric::linalg {

using Complex = std::complex<double>;

// Dense complex matrix, row-major storage.
class CMatrix {
 public:
  CMatrix() = default;
  CMatrix(std::size_t rows, std::size_t cols);
  // Throws PreconditionError when entries.size() != rows*cols or any entry is non-finite.
  CMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries);
  CMatrix(std::initializer_list<std::initializer_list<Complex>> rows);

  static CMatrix identity(std::size_t n);
  static CMatrix diagonal(std::span<const Complex> diag);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool is_square() const { return rows_ == cols_; }

  Complex operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  Complex& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  std::span<const Complex> data() const { return data_; }
  std::span<Complex> data() { return data_; }

  CMatrix adjoint() const;
  Complex trace() const;
  double frobenius_norm() const;
  bool all_finite() const;
  // max |a_ij - b_ij|; shapes must agree.
  double max_abs_diff(const CMatrix& other) const;

  CMatrix& operator+=(const CMatrix& rhs);
  CMatrix& operator-=(const CMatrix& rhs);
  CMatrix& operator*=(Complex s);

  friend CMatrix operator+(CMatrix a, const CMatrix& b) { return a += b; }
  friend CMatrix operator-(CMatrix a, const CMatrix& b) { return a -= b; }
  friend CMatrix operator*(CMatrix a, Complex s) { return a *= s; }
  friend CMatrix operator*(Complex s, CMatrix a) { return a *= s; }
  friend CMatrix operator*(const CMatrix& a, const CMatrix& b);
  friend bool operator==(const CMatrix& a, const CMatrix& b) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Complex> data_;
};

// Nonincreasing list of nonnegative singular values.
struct SingularSpectrum {
  std::vector<double> values;

  double largest() const { return values.empty() ? 0.0 : values.front(); }
  double sum_of_squares() const;
};

// Thin singular value decomposition m = u * diag(sigma) * v^*.
struct Svd {
  CMatrix u;                // rows x k, orthonormal columns
  SingularSpectrum sigma;   // k = min(rows, cols) values
  CMatrix v;                // cols x k, orthonormal columns
};

// Matrices up to this side length take the exact singular-spectrum route in operator_norm.
inline constexpr std::size_t kDenseNormLimit = 256;

CMatrix kron(const CMatrix& a, const CMatrix& b, const Caps& caps = default_caps());

double operator_norm(const CMatrix& m);

// Largest singular value by power iteration on m^*m; the independent route
// operator_norm falls back to above kDenseNormLimit.
double operator_norm_power(const CMatrix& m, double rel_tol = 1e-14, int max_iter = 200000);

SingularSpectrum singular_values(const CMatrix& m);

Svd svd(const CMatrix& m);

// Standard complex Gaussian entries.
CMatrix random_gaussian(std::size_t rows, std::size_t cols, std::mt19937_64& rng);

// Haar-ish random unitary from the QR factor of a Gaussian matrix.
CMatrix random_unitary(std::size_t n, std::mt19937_64& rng);

}  // namespace qmetric::linalg
