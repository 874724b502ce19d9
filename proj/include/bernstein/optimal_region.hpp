#pragma once

// The quadratic form F on second-fundamental-form tensors whose positivity
// makes ln *Omega superharmonic, its Gram matrix over an orthonormal basis of
// the admissible tensors, and scans of its smallest eigenvalue over
// singular-value space.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <thread>
#include <vector>

#include "bernstein/conditions.hpp"
#include "bernstein/errors.hpp"
#include "bernstein/graph_geometry.hpp"
#include "bernstein/linalg.hpp"
#include "bernstein/map_spec.hpp"

namespace bernstein {

inline constexpr double kDefaultEpsilon = 1e-3;
inline constexpr double kBoundaryBand = 1e-6;

/// Orthonormal basis of symmetric m x n x n tensors, optionally trace-free per normal index.
///
/// Ordering: normal index outer, then (l <= k) lexicographic. Off-diagonal
/// slots are (E_lk + E_kl)/sqrt(2). In the trace-free case the diagonal slots
/// (l, l) for l < n-1 carry the Gram-Schmidt orthonormalization of
/// E_ll - E_{l+1,l+1} and (n-1, n-1) is dropped.
struct HBasis {
  std::size_t n = 0;
  std::size_t m = 0;
  bool traceless = false;
  std::vector<Tensor3> elements;

  std::size_t dim() const noexcept { return elements.size(); }

  /// sum_p coeffs[p] * elements[p]
  Tensor3 compose(std::span<const double> coeffs) const {
    if (coeffs.size() != dim()) throw InvalidArgument("HBasis::compose: coefficient count mismatch");
    Tensor3 t(m, n, n);
    for (std::size_t p = 0; p < dim(); ++p) {
      if (coeffs[p] == 0.0) continue;
      const auto src = elements[p].data();
      auto dst = t.data();
      for (std::size_t k = 0; k < dst.size(); ++k) dst[k] += coeffs[p] * src[k];
    }
    return t;
  }
};

inline std::size_t h_space_dimension(std::size_t n, std::size_t m, bool traceless) {
  return m * (n * (n + 1) / 2 - (traceless ? 1 : 0));
}

inline HBasis h_space_basis(std::size_t n, std::size_t m, bool traceless) {
  if (n < 1 || m < 1) throw InvalidArgument("h_space_basis: n, m must be positive");
  if (traceless && n < 2) throw InvalidArgument("h_space_basis: trace-free tensors need n >= 2");

  // Orthonormalized diagonal differences, shared by every normal index.
  std::vector<Vector> diag_dirs;
  if (traceless) {
    for (std::size_t l = 0; l + 1 < n; ++l) {
      Vector d(n, 0.0);
      d[l] = 1.0;
      d[l + 1] = -1.0;
      for (const auto& prev : diag_dirs) {
        const double p = dot(prev, d);
        for (std::size_t k = 0; k < n; ++k) d[k] -= p * prev[k];
      }
      const double nd = norm(d);
      for (double& v : d) v /= nd;
      diag_dirs.push_back(d);
    }
  }

  HBasis basis{n, m, traceless, {}};
  basis.elements.reserve(h_space_dimension(n, m, traceless));
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t l = 0; l < n; ++l)
      for (std::size_t k = l; k < n; ++k) {
        Tensor3 t(m, n, n);
        if (l != k) {
          t(a, l, k) = t(a, k, l) = 1.0 / std::sqrt(2.0);
        } else if (!traceless) {
          t(a, l, l) = 1.0;
        } else if (l + 1 < n) {
          for (std::size_t q = 0; q < n; ++q) t(a, q, q) = diag_dirs[l][q];
        } else {
          continue;
        }
        basis.elements.push_back(std::move(t));
      }
  return basis;
}

/// F(h) = sum h^2 + sum_{k,i} lambda_i^2 h(i,i,k)^2 + 2 sum_{k,i<j} lambda_i lambda_j h(i,j,k) h(j,i,k)
///
/// i, j run over [0, min(n, m)); the normal index a of h(a, l, k) is paired
/// with lambda_a. Signed lambdas are accepted.
inline double evaluate_F_direct(std::span<const double> lambdas, const Tensor3& h) {
  const std::size_t m = h.dim0(), n = h.dim1();
  if (lambdas.size() != n) throw InvalidArgument("evaluate_F_direct: need one lambda per domain direction");
  const std::size_t p = std::min(n, m);
  double F = dot(h.data(), h.data());
  for (std::size_t i = 0; i < p; ++i) {
    const double l2 = lambdas[i] * lambdas[i];
    if (l2 == 0.0) continue;
    for (std::size_t k = 0; k < n; ++k) F += l2 * h(i, i, k) * h(i, i, k);
  }
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = i + 1; j < p; ++j) {
      const double lij = lambdas[i] * lambdas[j];
      if (lij == 0.0) continue;
      double s = 0.0;
      for (std::size_t k = 0; k < n; ++k) s += h(i, j, k) * h(j, i, k);
      F += 2.0 * lij * s;
    }
  return F;
}

inline double evaluate_F_direct(std::span<const double> lambdas, const SffTensor& sff) {
  return evaluate_F_direct(lambdas, sff.h);
}

struct GramForm {
  Vector lambdas;
  std::shared_ptr<const HBasis> basis;
  Matrix gram;  ///< gram(p, q) = B(b_p, b_q), B the polarization of F

  /// c^t gram c
  double quadratic(std::span<const double> c) const { return dot(c, gram * c); }
};

/// Gram matrix of F over `basis` by polarization: B(u, v) = (F(u+v) - F(u-v)) / 4.
inline GramForm assemble_gram(std::span<const double> lambdas, std::shared_ptr<const HBasis> basis) {
  if (!basis) throw InvalidArgument("assemble_gram: null basis");
  if (lambdas.size() != basis->n) throw InvalidArgument("assemble_gram: lambda count must equal n");
  const std::size_t d = basis->dim();
  GramForm g{Vector(lambdas.begin(), lambdas.end()), basis, Matrix(d, d)};
  const auto& E = basis->elements;
  Tensor3 sum(basis->m, basis->n, basis->n), diff(basis->m, basis->n, basis->n);
  for (std::size_t p = 0; p < d; ++p)
    for (std::size_t q = p; q < d; ++q) {
      const auto bp = E[p].data(), bq = E[q].data();
      auto s = sum.data(), t = diff.data();
      for (std::size_t k = 0; k < s.size(); ++k) {
        s[k] = bp[k] + bq[k];
        t[k] = bp[k] - bq[k];
      }
      const double v = 0.25 * (evaluate_F_direct(lambdas, sum) - evaluate_F_direct(lambdas, diff));
      g.gram(p, q) = g.gram(q, p) = v;
    }
  return g;
}

inline GramForm assemble_gram(std::span<const double> lambdas, const HBasis& basis) {
  return assemble_gram(lambdas, std::make_shared<const HBasis>(basis));
}

inline double min_eigenvalue(const GramForm& g) { return min_eigenvalue(g.gram); }

/// Smallest eigenvalue of F on the admissible space at the given singular values.
inline double optimal_min_eigenvalue(std::span<const double> lambdas, const std::shared_ptr<const HBasis>& basis) {
  return min_eigenvalue(assemble_gram(lambdas, basis));
}

/// Pass iff min-eig(F) >= epsilon on the admissible space (trace-free for minimal graphs).
inline ConditionReport optimal_condition(std::span<const double> lambdas, const std::shared_ptr<const HBasis>& basis,
                                         double epsilon) {
  if (!(epsilon > 0.0)) throw InvalidArgument("optimal_condition: epsilon must be positive");
  const double mineig = optimal_min_eigenvalue(lambdas, basis);
  ConditionReport r;
  r.condition_name = ConditionName::OptimalB;
  r.margin = mineig - epsilon;
  r.pass = r.margin >= -kClosedBoundarySlack;
  r.details = {{"min_eig", mineig}, {"epsilon", epsilon}, {"traceless", basis->traceless ? 1.0 : 0.0},
               {"dim", static_cast<double>(basis->dim())}};
  return r;
}

inline ConditionReport optimal_condition(std::span<const double> lambdas, std::size_t m, double epsilon,
                                         bool traceless) {
  return optimal_condition(lambdas, std::make_shared<const HBasis>(h_space_basis(lambdas.size(), m, traceless)),
                           epsilon);
}

enum class RegionClass { Inside, Boundary, Outside };

inline std::string_view to_string(RegionClass c) {
  switch (c) {
    case RegionClass::Inside: return "inside";
    case RegionClass::Boundary: return "boundary";
    case RegionClass::Outside: return "outside";
  }
  return "?";
}

inline RegionClass classify(double min_eig, double epsilon) {
  const double d = min_eig - epsilon;
  if (std::abs(d) <= kBoundaryBand) return RegionClass::Boundary;
  return d > 0.0 ? RegionClass::Inside : RegionClass::Outside;
}

struct GridAxis {
  double lo = 0.0;
  double hi = 0.0;
  int steps = 0;  ///< number of nodes, including both ends

  double node(int k) const { return steps == 1 ? lo : lo + (hi - lo) * static_cast<double>(k) / (steps - 1); }
};

struct RegionScanResult {
  std::size_t n = 0, m = 0;
  bool traceless = false;
  std::vector<GridAxis> axes;
  double epsilon = kDefaultEpsilon;
  std::vector<double> values;  ///< min-eig per node, lexicographic in grid indices (first axis slowest)
  std::vector<RegionClass> classes;

  std::size_t node_count() const noexcept { return values.size(); }

  /// Singular values (length n, zero-padded) at flat node index.
  Vector lambdas_at(std::size_t flat) const {
    Vector lam(n, 0.0);
    for (std::size_t ax = axes.size(); ax-- > 0;) {
      const auto steps = static_cast<std::size_t>(axes[ax].steps);
      lam[ax] = axes[ax].node(static_cast<int>(flat % steps));
      flat /= steps;
    }
    return lam;
  }

  std::size_t count(RegionClass c) const {
    return static_cast<std::size_t>(std::count(classes.begin(), classes.end(), c));
  }
};

/// Smallest eigenvalue of F at every node of a grid over the first min(n, m)
/// singular values; the remaining ones are zero.
///
/// Nodes are evaluated in parallel; results are stored by node index so the
/// output does not depend on scheduling.
inline RegionScanResult region_scan(std::size_t n, std::size_t m, bool traceless, std::vector<GridAxis> axes,
                                    double epsilon, unsigned threads = 0) {
  if (!(epsilon > 0.0)) throw InvalidArgument("region_scan: epsilon must be positive");
  const std::size_t p = std::min(n, m);
  if (axes.size() != p) throw InvalidArgument("region_scan: need one grid axis per nonzero singular value");
  std::size_t total = axes.empty() ? 0 : 1;
  for (const auto& ax : axes) {
    if (ax.steps < 1) throw InvalidArgument("region_scan: empty grid");
    if (!(ax.lo >= 0.0) || !(ax.hi >= ax.lo)) throw InvalidArgument("region_scan: axis needs 0 <= lo <= hi");
    total *= static_cast<std::size_t>(ax.steps);
  }
  if (total == 0) throw InvalidArgument("region_scan: empty grid");

  RegionScanResult res;
  res.n = n;
  res.m = m;
  res.traceless = traceless;
  res.axes = std::move(axes);
  res.epsilon = epsilon;
  res.values.assign(total, 0.0);
  res.classes.assign(total, RegionClass::Outside);
  const auto basis = std::make_shared<const HBasis>(h_space_basis(n, m, traceless));

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, total));
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      const Vector lam = res.lambdas_at(k);
      res.values[k] = optimal_min_eigenvalue(lam, basis);
      res.classes[k] = classify(res.values[k], epsilon);
    }
  };
  if (threads <= 1) {
    work(0, total);
  } else {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (total + threads - 1) / threads;
    for (std::size_t b = 0; b < total; b += chunk) pool.emplace_back(work, b, std::min(total, b + chunk));
  }
  return res;
}

namespace detail {

inline void require_trace_free(const Tensor3& h, double tol) {
  for (std::size_t a = 0; a < h.dim0(); ++a) {
    double tr = 0.0;
    for (std::size_t k = 0; k < h.dim1(); ++k) tr += h(a, k, k);
    if (std::abs(tr) > tol) throw InvalidArgument("h is not trace-free");
  }
}

}  // namespace detail

/// n = 2 rewrite of F for trace-free h:
/// |h|^2 + (l1 h(0,1,1) + l2 h(1,0,1))^2 + (l1 h(0,0,1) + l2 h(1,0,0))^2.
/// Components with a second normal index are treated as zero when m = 1.
inline double two_d_completed_square(std::span<const double> lambdas, const Tensor3& h) {
  if (lambdas.size() != 2 || h.dim1() != 2) throw InvalidArgument("two_d_completed_square: needs n = 2");
  detail::require_trace_free(h, 1e-9);
  const double l1 = lambdas[0], l2 = h.dim0() >= 2 ? lambdas[1] : 0.0;
  auto at = [&](std::size_t a, std::size_t l, std::size_t k) { return a < h.dim0() ? h(a, l, k) : 0.0; };
  const double s1 = l1 * at(0, 1, 1) + l2 * at(1, 0, 1);
  const double s2 = l1 * at(0, 0, 1) + l2 * at(1, 0, 0);
  return dot(h.data(), h.data()) + s1 * s1 + s2 * s2;
}

/// Predicted Laplacian of *Omega for a graph with parallel mean curvature:
/// -*Omega { sum h^2 - 2 sum_{k,i<j} l_i l_j h(i,i,k) h(j,j,k) + 2 sum_{k,i<j} l_i l_j h(j,i,k) h(i,j,k) }.
inline double rhs_delta_star_omega(std::span<const double> lambdas, const Tensor3& h) {
  const std::size_t m = h.dim0(), n = h.dim1();
  if (lambdas.size() != n) throw InvalidArgument("rhs_delta_star_omega: need one lambda per domain direction");
  const std::size_t p = std::min(n, m);
  double bracket = dot(h.data(), h.data());
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = i + 1; j < p; ++j) {
      const double lij = lambdas[i] * lambdas[j];
      if (lij == 0.0) continue;
      double diag = 0.0, cross = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        diag += h(i, i, k) * h(j, j, k);
        cross += h(j, i, k) * h(i, j, k);
      }
      bracket += 2.0 * lij * (cross - diag);
    }
  return -star_omega(lambdas) * bracket;
}

/// Predicted frame derivatives e_k(*Omega) = -*Omega sum_i lambda_i h(i, i, k).
inline Vector rhs_gradient_star_omega(std::span<const double> lambdas, const Tensor3& h) {
  const std::size_t m = h.dim0(), n = h.dim1();
  if (lambdas.size() != n) throw InvalidArgument("rhs_gradient_star_omega: need one lambda per domain direction");
  const std::size_t p = std::min(n, m);
  const double so = star_omega(lambdas);
  Vector g(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    double s = 0.0;
    for (std::size_t i = 0; i < p; ++i) s += lambdas[i] * h(i, i, k);
    g[k] = -so * s;
  }
  return g;
}

}  // namespace bernstein
