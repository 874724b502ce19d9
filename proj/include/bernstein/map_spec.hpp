#pragma once

// Maps f: R^n -> R^m over a rectangular parameter box, their 2-jets, and
// polynomial maps given by monomial tables.

#include <cmath>
#include <cstddef>
#include <algorithm>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bernstein/errors.hpp"
#include "bernstein/linalg.hpp"

namespace bernstein {

/// Dense rank-3 array, row-major in (a, i, j).
class Tensor3 {
 public:
  Tensor3() = default;
  Tensor3(std::size_t d0, std::size_t d1, std::size_t d2) : d0_(d0), d1_(d1), d2_(d2), data_(d0 * d1 * d2, 0.0) {}

  std::size_t dim0() const noexcept { return d0_; }
  std::size_t dim1() const noexcept { return d1_; }
  std::size_t dim2() const noexcept { return d2_; }
  std::size_t size() const noexcept { return data_.size(); }

  double& operator()(std::size_t a, std::size_t i, std::size_t j) { return data_[(a * d1_ + i) * d2_ + j]; }
  double operator()(std::size_t a, std::size_t i, std::size_t j) const { return data_[(a * d1_ + i) * d2_ + j]; }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }

  /// Largest |T(a,i,j) - T(a,j,i)|.
  double asymmetry() const {
    double d = 0.0;
    for (std::size_t a = 0; a < d0_; ++a)
      for (std::size_t i = 0; i < d1_; ++i)
        for (std::size_t j = i + 1; j < d2_; ++j) d = std::max(d, std::abs((*this)(a, i, j) - (*this)(a, j, i)));
    return d;
  }

  void symmetrize_last_two() {
    for (std::size_t a = 0; a < d0_; ++a)
      for (std::size_t i = 0; i < d1_; ++i)
        for (std::size_t j = i + 1; j < d2_; ++j) {
          const double v = 0.5 * ((*this)(a, i, j) + (*this)(a, j, i));
          (*this)(a, i, j) = (*this)(a, j, i) = v;
        }
  }

  friend bool operator==(const Tensor3&, const Tensor3&) = default;

 private:
  std::size_t d0_ = 0, d1_ = 0, d2_ = 0;
  std::vector<double> data_;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Second-order jet of f at x.
struct Jet2 {
  Vector x;
  Vector value;  ///< f(x), length m
  Matrix jac;    ///< n x m, jac(i, a) = d f^a / d x^i
  Tensor3 hess;  ///< m x n x n, hess(a, i, j) = d^2 f^a / dx^i dx^j
};

/// Analytic first and second derivatives at a point.
struct Derivatives {
  Matrix jac;
  Tensor3 hess;
};

struct MapSpec {
  std::string name;
  int n = 0;
  int m = 0;
  std::vector<Interval> domain;
  std::function<Vector(const Vector&)> value;
  /// Empty when only values are available; jet() then falls back to finite differences.
  std::function<Derivatives(const Vector&)> derivatives;

  bool has_analytic_derivatives() const { return static_cast<bool>(derivatives); }

  bool contains(const Vector& x) const {
    if (x.size() != domain.size()) return false;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double slack = 1e-12 * (1.0 + std::abs(domain[i].lo) + std::abs(domain[i].hi));
      if (!(x[i] >= domain[i].lo - slack && x[i] <= domain[i].hi + slack)) return false;
    }
    return true;
  }

  /// Same map with the analytic derivative routine dropped.
  MapSpec value_only() const {
    MapSpec copy = *this;
    copy.derivatives = nullptr;
    return copy;
  }
};

inline void validate(const MapSpec& spec) {
  if (spec.n < 1 || spec.m < 1) throw InvalidArgument("MapSpec: n and m must be positive");
  if (spec.n + spec.m > 16) throw InvalidArgument("MapSpec: n + m > 16 is not supported");
  if (spec.domain.size() != static_cast<std::size_t>(spec.n))
    throw InvalidArgument("MapSpec: domain needs one interval per variable");
  for (const auto& iv : spec.domain)
    if (!(iv.lo <= iv.hi)) throw InvalidArgument("MapSpec: domain interval with lo > hi");
  if (!spec.value) throw InvalidArgument("MapSpec: missing evaluator");
}

/// Steps used by the centered finite-difference fallback.
inline double first_derivative_step(const Vector& x) { return 1e-5 * (1.0 + norm(x)); }
inline double second_derivative_step(const Vector& x) { return 1e-4 * (1.0 + norm(x)); }

namespace detail {

inline Vector eval_checked(const MapSpec& spec, const Vector& x) {
  Vector v = spec.value(x);
  if (v.size() != static_cast<std::size_t>(spec.m)) throw Error("MapSpec '" + spec.name + "': evaluator returned wrong size");
  for (double c : v)
    if (!std::isfinite(c)) throw Error("MapSpec '" + spec.name + "': evaluator returned a non-finite value");
  return v;
}

inline Matrix fd_jacobian(const MapSpec& spec, const Vector& x, double h) {
  const std::size_t n = x.size(), m = static_cast<std::size_t>(spec.m);
  Matrix J(n, m);
  for (std::size_t i = 0; i < n; ++i) {
    Vector xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    const Vector fp = eval_checked(spec, xp), fm = eval_checked(spec, xm);
    for (std::size_t a = 0; a < m; ++a) J(i, a) = (fp[a] - fm[a]) / (2.0 * h);
  }
  return J;
}

inline Tensor3 fd_hessian(const MapSpec& spec, const Vector& x, const Vector& fx, double h) {
  const std::size_t n = x.size(), m = static_cast<std::size_t>(spec.m);
  Tensor3 H(m, n, n);
  for (std::size_t i = 0; i < n; ++i) {
    Vector xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    const Vector fp = eval_checked(spec, xp), fm = eval_checked(spec, xm);
    for (std::size_t a = 0; a < m; ++a) H(a, i, i) = (fp[a] - 2.0 * fx[a] + fm[a]) / (h * h);
    for (std::size_t j = i + 1; j < n; ++j) {
      Vector pp = x, pm = x, mp = x, mm = x;
      pp[i] += h, pp[j] += h;
      pm[i] += h, pm[j] -= h;
      mp[i] -= h, mp[j] += h;
      mm[i] -= h, mm[j] -= h;
      const Vector fpp = eval_checked(spec, pp), fpm = eval_checked(spec, pm);
      const Vector fmp = eval_checked(spec, mp), fmm = eval_checked(spec, mm);
      for (std::size_t a = 0; a < m; ++a) H(a, i, j) = H(a, j, i) = (fpp[a] - fpm[a] - fmp[a] + fmm[a]) / (4.0 * h * h);
    }
  }
  return H;
}

}  // namespace detail

/// Evaluates the 2-jet of spec at x.
///
/// Analytic derivatives are used when the spec provides them. Otherwise the
/// Jacobian uses centered differences with step 1e-5 (1 + |x|) and the Hessian
/// uses the centered second-difference stencil with step 1e-4 (1 + |x|).
inline Jet2 jet(const MapSpec& spec, const Vector& x) {
  if (x.size() != static_cast<std::size_t>(spec.n)) throw InvalidArgument("jet: point has wrong dimension");
  if (!spec.contains(x)) throw DomainError("jet: point outside the domain of '" + spec.name + "'");

  Jet2 out;
  out.x = x;
  out.value = detail::eval_checked(spec, x);
  if (spec.has_analytic_derivatives()) {
    Derivatives d = spec.derivatives(x);
    if (d.jac.rows() != x.size() || d.jac.cols() != static_cast<std::size_t>(spec.m) ||
        d.hess.dim0() != static_cast<std::size_t>(spec.m) || d.hess.dim1() != x.size() || d.hess.dim2() != x.size())
      throw Error("jet: derivative evaluator of '" + spec.name + "' returned wrong shapes");
    if (!all_finite(d.jac)) throw Error("jet: non-finite derivatives for '" + spec.name + "'");
    out.jac = std::move(d.jac);
    out.hess = std::move(d.hess);
  } else {
    out.jac = detail::fd_jacobian(spec, x, first_derivative_step(x));
    out.hess = detail::fd_hessian(spec, x, out.value, second_derivative_step(x));
  }
  double scale = 1.0;
  for (double v : out.hess.data()) scale = std::max(scale, std::abs(v));
  if (out.hess.asymmetry() > 1e-12 * scale) throw Error("jet: Hessian of '" + spec.name + "' is not symmetric");
  out.hess.symmetrize_last_two();
  return out;
}

/// Result of comparing finite-difference derivatives at steps h and h/2.
struct FdConsistency {
  double jac_gap = 0.0;   ///< max |J_h - J_{h/2}|
  double hess_gap = 0.0;  ///< max |H_h - H_{h/2}|
  bool consistent = false;
};

/// Second-order self-consistency of the finite-difference fallback.
///
/// For a centered stencil, D_h - D_{h/2} = (3/4) c h^2 + O(h^4) plus rounding;
/// the check passes when both gaps are below 1e-6 (1 + |D|).
inline FdConsistency fd_self_consistency(const MapSpec& spec, const Vector& x) {
  const Vector fx = detail::eval_checked(spec, x);
  const double h1 = first_derivative_step(x), h2 = second_derivative_step(x);
  const Matrix Ja = detail::fd_jacobian(spec, x, h1), Jb = detail::fd_jacobian(spec, x, 0.5 * h1);
  const Tensor3 Ha = detail::fd_hessian(spec, x, fx, h2), Hb = detail::fd_hessian(spec, x, fx, 0.5 * h2);
  FdConsistency r;
  double jscale = 1.0, hscale = 1.0;
  for (double v : Ja.data()) jscale = std::max(jscale, std::abs(v));
  for (double v : Ha.data()) hscale = std::max(hscale, std::abs(v));
  r.jac_gap = max_abs_diff(Ja, Jb);
  for (std::size_t k = 0; k < Ha.size(); ++k) r.hess_gap = std::max(r.hess_gap, std::abs(Ha.data()[k] - Hb.data()[k]));
  r.consistent = r.jac_gap <= 1e-6 * jscale && r.hess_gap <= 1e-6 * hscale;
  return r;
}

/// One monomial c * x1^p1 ... xn^pn.
struct Monomial {
  std::vector<int> powers;
  double c = 0.0;
};

/// Per-component monomial tables; component a of f is the sum of coeffs[a].
using PolynomialCoefficients = std::vector<std::vector<Monomial>>;

namespace detail {

inline double monomial_value(const Monomial& mono, const Vector& x, int di, int dj) {
  // Value of d/dx_di d/dx_dj of the monomial (di, dj = -1 for no derivative).
  double coef = mono.c;
  std::vector<int> p = mono.powers;
  for (int d : {di, dj}) {
    if (d < 0) continue;
    if (p[static_cast<std::size_t>(d)] == 0) return 0.0;
    coef *= p[static_cast<std::size_t>(d)];
    --p[static_cast<std::size_t>(d)];
  }
  double v = coef;
  for (std::size_t k = 0; k < x.size(); ++k)
    if (p[k] > 0) v *= std::pow(x[k], p[k]);
  return v;
}

}  // namespace detail

/// Builds a polynomial map with exact derivatives.
inline MapSpec polynomial_map(std::string name, int n, std::vector<Interval> domain, PolynomialCoefficients coeffs) {
  if (n < 1) throw InvalidArgument("polynomial_map: n must be positive");
  for (const auto& comp : coeffs)
    for (const auto& mono : comp) {
      if (mono.powers.size() != static_cast<std::size_t>(n))
        throw InvalidArgument("polynomial_map: monomial has wrong number of powers");
      for (int p : mono.powers)
        if (p < 0) throw InvalidArgument("polynomial_map: negative power");
    }
  MapSpec spec;
  spec.name = std::move(name);
  spec.n = n;
  spec.m = static_cast<int>(coeffs.size());
  spec.domain = std::move(domain);
  auto shared = std::make_shared<const PolynomialCoefficients>(std::move(coeffs));
  spec.value = [shared](const Vector& x) {
    Vector v(shared->size(), 0.0);
    for (std::size_t a = 0; a < shared->size(); ++a)
      for (const auto& mono : (*shared)[a]) v[a] += detail::monomial_value(mono, x, -1, -1);
    return v;
  };
  spec.derivatives = [shared](const Vector& x) {
    const std::size_t n = x.size(), m = shared->size();
    Derivatives d{Matrix(n, m), Tensor3(m, n, n)};
    for (std::size_t a = 0; a < m; ++a)
      for (const auto& mono : (*shared)[a])
        for (std::size_t i = 0; i < n; ++i) {
          d.jac(i, a) += detail::monomial_value(mono, x, static_cast<int>(i), -1);
          for (std::size_t j = i; j < n; ++j) {
            const double v = detail::monomial_value(mono, x, static_cast<int>(i), static_cast<int>(j));
            d.hess(a, i, j) += v;
            if (j != i) d.hess(a, j, i) += v;
          }
        }
    return d;
  };
  validate(spec);
  return spec;
}

/// f(x) = A^t x for an n x m matrix A, i.e. jac == A everywhere.
inline MapSpec linear_map(const Matrix& A, std::vector<Interval> domain) {
  const int n = static_cast<int>(A.rows()), m = static_cast<int>(A.cols());
  PolynomialCoefficients coeffs(static_cast<std::size_t>(m));
  for (int a = 0; a < m; ++a)
    for (int i = 0; i < n; ++i) {
      const double c = A(static_cast<std::size_t>(i), static_cast<std::size_t>(a));
      if (c == 0.0) continue;
      Monomial mono{std::vector<int>(static_cast<std::size_t>(n), 0), c};
      mono.powers[static_cast<std::size_t>(i)] = 1;
      coeffs[static_cast<std::size_t>(a)].push_back(mono);
    }
  return polynomial_map("linear", n, std::move(domain), std::move(coeffs));
}

}  // namespace bernstein
