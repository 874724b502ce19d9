#pragma once

// Pointwise geometry of a graph {(x, f(x))} in R^{n+m}: singular values of df,
// the adapted tangent/normal frames built from them, *Omega, the induced
// metric, the second fundamental form and the mean curvature vector.
//
// Ambient vectors are ordered as (domain coordinates, target coordinates).
// Indices are zero-based: tangent index i in [0, n), normal index a in [0, m)
// stands for e_{n+1+a}.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "bernstein/linalg.hpp"
#include "bernstein/map_spec.hpp"

namespace bernstein {

struct SingularData {
  Vector lambdas;      ///< n values, descending, nonnegative; zero past min(n, m)
  Matrix domain_basis; ///< n x n orthogonal, det = +1; column i is a_i
  Matrix target_basis; ///< m x m orthogonal; column a is a_{n+1+a}
  Matrix tangent_frame;///< (n+m) x n, column i is e_i
  Matrix normal_frame; ///< (n+m) x m, column a is e_{n+1+a}

  std::size_t n() const noexcept { return domain_basis.rows(); }
  std::size_t m() const noexcept { return target_basis.rows(); }
  std::size_t rank_bound() const noexcept { return std::min(n(), m()); }

  /// The full orthonormal frame [e_1 .. e_n | e_{n+1} .. e_{n+m}].
  Matrix frame() const {
    Matrix F(n() + m(), n() + m());
    F.set_block(0, 0, tangent_frame);
    F.set_block(0, n(), normal_frame);
    return F;
  }

  /// Coordinate vector c_i with dX(c_i) = e_i, i.e. a_i / sqrt(1 + lambda_i^2).
  Vector coordinate_tangent(std::size_t i) const {
    Vector c = domain_basis.column(i);
    const double s = 1.0 / std::sqrt(1.0 + lambdas[i] * lambdas[i]);
    for (double& v : c) v *= s;
    return c;
  }
};

/// Second fundamental form h(a, l, k) = <D_{e_l} e_k, e_{n+1+a}> in the adapted frame.
struct SffTensor {
  Tensor3 h;  ///< m x n x n, symmetric in the last two slots
  Vector lambdas;

  std::size_t m() const noexcept { return h.dim0(); }
  std::size_t n() const noexcept { return h.dim1(); }

  double squared_norm() const { return dot(h.data(), h.data()); }
};

namespace detail {

/// Fills every column flagged in `missing` with a unit vector orthogonal to all
/// columns already present, choosing among the standard basis vectors the one
/// with the largest residual (lowest index on ties).
inline void complete_orthonormal(Matrix& B, std::vector<bool> missing) {
  const std::size_t d = B.rows();
  for (std::size_t col = 0; col < B.cols(); ++col) {
    if (!missing[col]) continue;
    Vector best;
    double best_norm = -1.0;
    for (std::size_t e = 0; e < d; ++e) {
      Vector v(d, 0.0);
      v[e] = 1.0;
      for (int pass = 0; pass < 2; ++pass)
        for (std::size_t other = 0; other < B.cols(); ++other) {
          if (missing[other]) continue;
          const Vector u = B.column(other);
          const double p = dot(u, v);
          for (std::size_t k = 0; k < d; ++k) v[k] -= p * u[k];
        }
      const double nv = norm(v);
      if (nv > best_norm + 1e-12) {
        best_norm = nv;
        best = v;
      }
    }
    for (double& x : best) x /= best_norm;
    B.set_column(col, best);
    missing[col] = false;
  }
}

}  // namespace detail

/// Singular data of df for an n x m Jacobian (rows indexed by domain variables).
///
/// df as a map R^n -> R^m is v -> jac^t v, so the one-sided Jacobi SVD runs
/// on jac^t. Singular values come out nonnegative and descending. Directions
/// without a partner (zero singular values, or m > n) are completed from the
/// standard basis. The domain basis is oriented so that det = +1, flipping a_n
/// together with its partner a_{2n} when one exists.
inline SingularData singular_data(const Matrix& jac) {
  if (!all_finite(jac)) throw InvalidArgument("singular_data: non-finite Jacobian");
  const std::size_t n = jac.rows(), m = jac.cols();
  const std::size_t p = std::min(n, m);
  const JacobiSvd svd = jacobi_svd(jac.transpose());

  SingularData sd;
  sd.lambdas.assign(n, 0.0);
  sd.domain_basis = svd.V;
  sd.target_basis = Matrix(m, m);
  std::vector<bool> missing(m, true);
  const double cutoff = 1e-13 * std::max(1.0, svd.sigma.empty() ? 0.0 : svd.sigma.front());
  for (std::size_t i = 0; i < p; ++i) {
    if (svd.sigma[i] <= cutoff) continue;
    sd.lambdas[i] = svd.sigma[i];
    Vector u = svd.W.column(i);
    for (double& v : u) v /= svd.sigma[i];
    sd.target_basis.set_column(i, u);
    missing[i] = false;
  }
  detail::complete_orthonormal(sd.target_basis, missing);

  if (n > 0 && determinant(sd.domain_basis) < 0.0) {
    for (std::size_t r = 0; r < n; ++r) sd.domain_basis(r, n - 1) = -sd.domain_basis(r, n - 1);
    if (n - 1 < m)
      for (std::size_t r = 0; r < m; ++r) sd.target_basis(r, n - 1) = -sd.target_basis(r, n - 1);
  }

  sd.tangent_frame = Matrix(n + m, n);
  for (std::size_t i = 0; i < n; ++i) {
    const double lam = sd.lambdas[i];
    const double s = 1.0 / std::sqrt(1.0 + lam * lam);
    for (std::size_t r = 0; r < n; ++r) sd.tangent_frame(r, i) = s * sd.domain_basis(r, i);
    if (i < m)
      for (std::size_t r = 0; r < m; ++r) sd.tangent_frame(n + r, i) = s * lam * sd.target_basis(r, i);
  }
  sd.normal_frame = Matrix(n + m, m);
  for (std::size_t a = 0; a < m; ++a) {
    const double lam = a < n ? sd.lambdas[a] : 0.0;
    const double s = 1.0 / std::sqrt(1.0 + lam * lam);
    for (std::size_t r = 0; r < m; ++r) sd.normal_frame(n + r, a) = s * sd.target_basis(r, a);
    if (a < n)
      for (std::size_t r = 0; r < n; ++r) sd.normal_frame(r, a) = -s * lam * sd.domain_basis(r, a);
  }
  return sd;
}

/// *Omega = 1 / sqrt(prod (1 + lambda_i^2)).
inline double star_omega(std::span<const double> lambdas) {
  double prod = 1.0;
  for (double l : lambdas) prod *= 1.0 + l * l;
  return 1.0 / std::sqrt(prod);
}

/// g = I + jac jac^t in domain coordinates.
inline Matrix induced_metric(const Matrix& jac) {
  return Matrix::identity(jac.rows()) + jac * jac.transpose();
}

/// Second fundamental form of the graph at a jet, in the adapted frame of sd.
///
/// With X(u) = (u, f(u)) the only nonzero second derivatives of X are those of
/// f, so h(a, l, k) = sum_{i,j} c_l[i] c_k[j] <(0, d_ij f), e_{n+1+a}> where
/// c_l is the coordinate vector of e_l.
inline SffTensor second_fundamental_form(const Jet2& jet, const SingularData& sd) {
  const std::size_t n = jet.jac.rows(), m = jet.jac.cols();
  std::vector<Vector> coords(n);
  for (std::size_t l = 0; l < n; ++l) coords[l] = sd.coordinate_tangent(l);

  SffTensor out{Tensor3(m, n, n), sd.lambdas};
  // Hessian projected on each normal: N_a(i, j) = sum_b hess(b, i, j) e_a[n + b].
  for (std::size_t a = 0; a < m; ++a) {
    Matrix Na(n, n);
    for (std::size_t b = 0; b < m; ++b) {
      const double w = sd.normal_frame(n + b, a);
      if (w == 0.0) continue;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) Na(i, j) += w * jet.hess(b, i, j);
    }
    for (std::size_t l = 0; l < n; ++l)
      for (std::size_t k = l; k < n; ++k) {
        double v = 0.0;
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t j = 0; j < n; ++j) v += coords[l][i] * Na(i, j) * coords[k][j];
        out.h(a, l, k) = v;
        out.h(a, k, l) = v;
      }
  }
  return out;
}

inline SffTensor second_fundamental_form(const Jet2& jet) {
  return second_fundamental_form(jet, singular_data(jet.jac));
}

/// Component a is the trace sum_k h(a, k, k).
inline Vector mean_curvature(const SffTensor& sff) {
  Vector H(sff.m(), 0.0);
  for (std::size_t a = 0; a < sff.m(); ++a)
    for (std::size_t k = 0; k < sff.n(); ++k) H[a] += sff.h(a, k, k);
  return H;
}

}  // namespace bernstein
