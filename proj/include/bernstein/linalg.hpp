#pragma once

// Small dense linear algebra: a row-major matrix type, LU solves, a cyclic
// Jacobi symmetric eigensolver and a one-sided Jacobi SVD. Everything here is
// sized for the n+m <= 16 matrices the rest of the library works with.

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

#include "bernstein/errors.hpp"

namespace bernstein {

using Vector = std::vector<double>;

inline constexpr double kJacobiTolerance = 1e-13;
inline constexpr int kJacobiMaxSweeps = 100;

class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  Matrix(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
      if (r.size() != cols_) throw InvalidArgument("Matrix: ragged initializer");
      data_.insert(data_.end(), r.begin(), r.end());
    }
  }

  static Matrix identity(std::size_t n) {
    Matrix I(n, n);
    for (std::size_t i = 0; i < n; ++i) I(i, i) = 1.0;
    return I;
  }

  static Matrix diagonal(std::span<const double> d) {
    Matrix D(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) D(i, i) = d[i];
    return D;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool square() const noexcept { return rows_ == cols_; }

  double& operator()(std::size_t i, std::size_t j) {
    assert(i < rows_ && j < cols_);
    return data_[i * cols_ + j];
  }
  double operator()(std::size_t i, std::size_t j) const {
    assert(i < rows_ && j < cols_);
    return data_[i * cols_ + j];
  }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }

  Vector column(std::size_t j) const {
    Vector c(rows_);
    for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
    return c;
  }
  void set_column(std::size_t j, std::span<const double> c) {
    assert(c.size() == rows_);
    for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = c[i];
  }
  Vector row(std::size_t i) const {
    return Vector(data_.begin() + static_cast<std::ptrdiff_t>(i * cols_),
                  data_.begin() + static_cast<std::ptrdiff_t>((i + 1) * cols_));
  }

  /// Copies the block starting at (r0, c0) with the given extent.
  Matrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
    assert(r0 + nr <= rows_ && c0 + nc <= cols_);
    Matrix B(nr, nc);
    for (std::size_t i = 0; i < nr; ++i)
      for (std::size_t j = 0; j < nc; ++j) B(i, j) = (*this)(r0 + i, c0 + j);
    return B;
  }
  void set_block(std::size_t r0, std::size_t c0, const Matrix& B) {
    assert(r0 + B.rows() <= rows_ && c0 + B.cols() <= cols_);
    for (std::size_t i = 0; i < B.rows(); ++i)
      for (std::size_t j = 0; j < B.cols(); ++j) (*this)(r0 + i, c0 + j) = B(i, j);
  }

  Matrix transpose() const {
    Matrix T(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) T(j, i) = (*this)(i, j);
    return T;
  }

  Matrix& operator+=(const Matrix& o) {
    check_same_shape(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
  }
  Matrix& operator-=(const Matrix& o) {
    check_same_shape(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
  }
  Matrix& operator*=(double s) {
    for (double& v : data_) v *= s;
    return *this;
  }

  friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
  friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
  friend Matrix operator*(Matrix a, double s) { return a *= s; }
  friend Matrix operator*(double s, Matrix a) { return a *= s; }
  friend Matrix operator-(Matrix a) { return a *= -1.0; }

  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols_ != b.rows_) throw InvalidArgument("Matrix product: inner dimensions differ");
    Matrix c(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const double aik = a(i, k);
        if (aik == 0.0) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
      }
    return c;
  }

  friend Vector operator*(const Matrix& a, std::span<const double> x) {
    if (a.cols_ != x.size()) throw InvalidArgument("Matrix-vector product: size mismatch");
    Vector y(a.rows_, 0.0);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t j = 0; j < a.cols_; ++j) y[i] += a(i, j) * x[j];
    return y;
  }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  void check_same_shape(const Matrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw InvalidArgument("Matrix: shape mismatch");
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

inline double dot(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

inline double frobenius_norm(const Matrix& A) { return norm(A.data()); }

inline double max_abs(const Matrix& A) {
  double m = 0.0;
  for (double v : A.data()) m = std::max(m, std::abs(v));
  return m;
}

inline double max_abs_diff(const Matrix& A, const Matrix& B) { return max_abs(A - B); }

inline bool all_finite(const Matrix& A) {
  return std::all_of(A.data().begin(), A.data().end(), [](double v) { return std::isfinite(v); });
}

/// Largest |A(i,j) - A(j,i)|.
inline double asymmetry(const Matrix& A) {
  double d = 0.0;
  for (std::size_t i = 0; i < A.rows(); ++i)
    for (std::size_t j = i + 1; j < A.cols(); ++j) d = std::max(d, std::abs(A(i, j) - A(j, i)));
  return d;
}

inline Matrix symmetrized(const Matrix& A) { return 0.5 * (A + A.transpose()); }

/// LU factorization with partial pivoting, kept around for repeated solves.
class LU {
 public:
  explicit LU(Matrix A) : lu_(std::move(A)), perm_(lu_.rows()) {
    if (!lu_.square()) throw InvalidArgument("LU: matrix must be square");
    const std::size_t n = lu_.rows();
    std::iota(perm_.begin(), perm_.end(), std::size_t{0});
    for (std::size_t k = 0; k < n; ++k) {
      std::size_t piv = k;
      for (std::size_t i = k + 1; i < n; ++i)
        if (std::abs(lu_(i, k)) > std::abs(lu_(piv, k))) piv = i;
      if (piv != k) {
        for (std::size_t j = 0; j < n; ++j) std::swap(lu_(k, j), lu_(piv, j));
        std::swap(perm_[k], perm_[piv]);
        sign_ = -sign_;
      }
      if (lu_(k, k) == 0.0) {
        singular_ = true;
        continue;
      }
      for (std::size_t i = k + 1; i < n; ++i) {
        const double l = lu_(i, k) / lu_(k, k);
        lu_(i, k) = l;
        for (std::size_t j = k + 1; j < n; ++j) lu_(i, j) -= l * lu_(k, j);
      }
    }
  }

  bool singular() const noexcept { return singular_; }

  double determinant() const {
    double d = sign_;
    for (std::size_t i = 0; i < lu_.rows(); ++i) d *= lu_(i, i);
    return d;
  }

  Matrix solve(const Matrix& B) const {
    if (singular_) throw InvalidArgument("LU::solve: singular matrix");
    const std::size_t n = lu_.rows();
    if (B.rows() != n) throw InvalidArgument("LU::solve: right-hand side has wrong row count");
    Matrix X(n, B.cols());
    for (std::size_t c = 0; c < B.cols(); ++c) {
      Vector y(n);
      for (std::size_t i = 0; i < n; ++i) {
        double s = B(perm_[i], c);
        for (std::size_t j = 0; j < i; ++j) s -= lu_(i, j) * y[j];
        y[i] = s;
      }
      for (std::size_t ii = n; ii-- > 0;) {
        double s = y[ii];
        for (std::size_t j = ii + 1; j < n; ++j) s -= lu_(ii, j) * X(j, c);
        X(ii, c) = s / lu_(ii, ii);
      }
    }
    return X;
  }

 private:
  Matrix lu_;
  std::vector<std::size_t> perm_;
  double sign_ = 1.0;
  bool singular_ = false;
};

inline double determinant(const Matrix& A) {
  if (A.rows() == 0) return 1.0;
  return LU(A).determinant();
}

inline Matrix inverse(const Matrix& A) { return LU(A).solve(Matrix::identity(A.rows())); }

struct SymmetricEigen {
  Vector values;   ///< ascending
  Matrix vectors;  ///< column k is the unit eigenvector for values[k]
  int sweeps = 0;
};

/// Cyclic Jacobi eigensolver for a real symmetric matrix.
///
/// Sweeps rotate every off-diagonal pair in row order until the off-diagonal
/// Frobenius mass drops below kJacobiTolerance times the total Frobenius norm.
/// Throws NonConvergence after kJacobiMaxSweeps sweeps.
inline SymmetricEigen symmetric_eigen(const Matrix& input) {
  if (!input.square()) throw InvalidArgument("symmetric_eigen: matrix must be square");
  const std::size_t n = input.rows();
  Matrix A = symmetrized(input);
  Matrix V = Matrix::identity(n);
  const double total = frobenius_norm(A);

  auto off_mass = [&] {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j) s += A(i, j) * A(i, j);
    return std::sqrt(s);
  };

  SymmetricEigen out;
  int sweep = 0;
  for (;; ++sweep) {
    const double off = off_mass();
    if (off <= kJacobiTolerance * total || total == 0.0) break;
    if (sweep >= kJacobiMaxSweeps)
      throw NonConvergence("symmetric_eigen: sweep cap exceeded", off / total);
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = A(p, q);
        if (apq == 0.0) continue;
        const double theta = (A(q, q) - A(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = A(k, p), akq = A(k, q);
          A(k, p) = c * akp - s * akq;
          A(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = A(p, k), aqk = A(q, k);
          A(p, k) = c * apk - s * aqk;
          A(q, k) = s * apk + c * aqk;
        }
        A(p, q) = A(q, p) = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = V(k, p), vkq = V(k, q);
          V(k, p) = c * vkp - s * vkq;
          V(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return A(a, a) < A(b, b); });
  out.values.resize(n);
  out.vectors = Matrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = A(order[k], order[k]);
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = V(i, order[k]);
  }
  out.sweeps = sweep;
  return out;
}

/// Smallest eigenvalue of a symmetric matrix.
inline double min_eigenvalue(const Matrix& A) {
  if (A.rows() == 0) throw InvalidArgument("min_eigenvalue: empty matrix");
  return symmetric_eigen(A).values.front();
}

struct JacobiSvd {
  Vector sigma;  ///< descending, nonnegative
  Matrix V;      ///< right singular vectors as columns (cols x cols, orthogonal)
  Matrix W;      ///< M * V; column j has norm sigma[j]
  int sweeps = 0;
};

/// One-sided (Hestenes) Jacobi SVD of an r x c matrix.
///
/// Columns of M are orthogonalized by plane rotations accumulated into V. A
/// pair is skipped once its cosine falls below kJacobiTolerance or either
/// column is at rounding level; the sweep loop ends when no pair rotates. Singular values are sorted descending with
/// ties kept in column order.
inline JacobiSvd jacobi_svd(const Matrix& M) {
  const std::size_t r = M.rows(), c = M.cols();
  Matrix W = M;
  Matrix V = Matrix::identity(c);
  // Columns below this squared norm are rounding residue of annihilated columns.
  const double negligible = std::pow(4.0 * std::numeric_limits<double>::epsilon() * frobenius_norm(M), 2);
  int sweep = 0;
  for (;; ++sweep) {
    bool rotated = false;
    double worst = 0.0;
    for (std::size_t p = 0; p + 1 < c; ++p) {
      for (std::size_t q = p + 1; q < c; ++q) {
        double alpha = 0.0, beta = 0.0, gamma = 0.0;
        for (std::size_t i = 0; i < r; ++i) {
          alpha += W(i, p) * W(i, p);
          beta += W(i, q) * W(i, q);
          gamma += W(i, p) * W(i, q);
        }
        if (gamma == 0.0 || alpha <= negligible || beta <= negligible) continue;
        const double cosine = std::abs(gamma) / std::sqrt(alpha * beta);
        if (!(cosine > kJacobiTolerance)) continue;
        worst = std::max(worst, cosine);
        if (sweep >= kJacobiMaxSweeps) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = (zeta >= 0.0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double cs = 1.0 / std::sqrt(1.0 + t * t);
        const double sn = cs * t;
        for (std::size_t i = 0; i < r; ++i) {
          const double wp = W(i, p), wq = W(i, q);
          W(i, p) = cs * wp - sn * wq;
          W(i, q) = sn * wp + cs * wq;
        }
        for (std::size_t i = 0; i < c; ++i) {
          const double vp = V(i, p), vq = V(i, q);
          V(i, p) = cs * vp - sn * vq;
          V(i, q) = sn * vp + cs * vq;
        }
      }
    }
    if (sweep >= kJacobiMaxSweeps && worst > 0.0)
      throw NonConvergence("jacobi_svd: sweep cap exceeded", worst);
    if (!rotated) break;
  }

  Vector sigma(c);
  for (std::size_t j = 0; j < c; ++j) sigma[j] = norm(W.column(j));
  std::vector<std::size_t> order(c);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return sigma[a] > sigma[b]; });

  JacobiSvd out;
  out.sigma.resize(c);
  out.V = Matrix(c, c);
  out.W = Matrix(r, c);
  for (std::size_t k = 0; k < c; ++k) {
    out.sigma[k] = sigma[order[k]];
    for (std::size_t i = 0; i < c; ++i) out.V(i, k) = V(i, order[k]);
    for (std::size_t i = 0; i < r; ++i) out.W(i, k) = W(i, order[k]);
  }
  out.sweeps = sweep;
  return out;
}

/// Singular values of M, descending.
inline Vector singular_values(const Matrix& M) { return jacobi_svd(M).sigma; }

/// 2-norm condition number of a square matrix; +inf when singular.
inline double condition_number(const Matrix& A) {
  if (!A.square()) throw InvalidArgument("condition_number: matrix must be square");
  if (A.rows() == 0) return 1.0;
  const Vector s = singular_values(A);
  if (!(s.back() > 0.0)) return std::numeric_limits<double>::infinity();
  return s.front() / s.back();
}

/// Orthogonal projector onto the row space of a full-row-rank matrix.
inline Matrix row_space_projector(const Matrix& M) {
  const Matrix Mt = M.transpose();
  return Mt * LU(M * Mt).solve(M);
}

}  // namespace bernstein
