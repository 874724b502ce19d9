#pragma once

// Rewriting a graph over R^n after an isometry of R^{n+m}, the U(n) action on
// Lagrangian graphs, and a derivative-free search for an isometry that moves
// df into the region where a chosen flatness condition holds.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <memory>
#include <numbers>
#include <optional>
#include <random>
#include <utility>
#include <variant>
#include <vector>

#include "bernstein/conditions.hpp"
#include "bernstein/errors.hpp"
#include "bernstein/linalg.hpp"
#include "bernstein/optimal_region.hpp"

namespace bernstein {

inline constexpr double kGraphicConditionLimit = 1e12;

/// g = [[P, Q], [R, S]] in O(n+m) with P n x n and S m x m.
class OrthBlock {
 public:
  OrthBlock(std::size_t n, std::size_t m, Matrix g) : n_(n), m_(m), g_(std::move(g)) {
    if (g_.rows() != n + m || g_.cols() != n + m) throw InvalidArgument("OrthBlock: g must be (n+m) x (n+m)");
  }
  static OrthBlock identity(std::size_t n, std::size_t m) { return {n, m, Matrix::identity(n + m)}; }
  static OrthBlock from_blocks(const Matrix& P, const Matrix& Q, const Matrix& R, const Matrix& S) {
    const std::size_t n = P.rows(), m = S.rows();
    if (!P.square() || !S.square() || Q.rows() != n || Q.cols() != m || R.rows() != m || R.cols() != n)
      throw InvalidArgument("OrthBlock: inconsistent block shapes");
    Matrix g(n + m, n + m);
    g.set_block(0, 0, P);
    g.set_block(0, n, Q);
    g.set_block(n, 0, R);
    g.set_block(n, n, S);
    return {n, m, std::move(g)};
  }

  std::size_t n() const noexcept { return n_; }
  std::size_t m() const noexcept { return m_; }
  const Matrix& g() const noexcept { return g_; }
  Matrix P() const { return g_.block(0, 0, n_, n_); }
  Matrix Q() const { return g_.block(0, n_, n_, m_); }
  Matrix R() const { return g_.block(n_, 0, m_, n_); }
  Matrix S() const { return g_.block(n_, n_, m_, m_); }

  /// max |g^t g - I|
  double orthogonality_defect() const {
    return max_abs_diff(g_.transpose() * g_, Matrix::identity(n_ + m_));
  }

  friend OrthBlock operator*(const OrthBlock& a, const OrthBlock& b) {
    if (a.n_ != b.n_ || a.m_ != b.m_) throw InvalidArgument("OrthBlock product: block shapes differ");
    return {a.n_, a.m_, a.g_ * b.g_};
  }

 private:
  std::size_t n_, m_;
  Matrix g_;
};

/// Element P + iQ of U(n), acting on R^{2n} as [[P, -Q], [Q, P]].
class UnitaryBlock {
 public:
  UnitaryBlock(Matrix P, Matrix Q) : P_(std::move(P)), Q_(std::move(Q)) {
    if (!P_.square() || P_.rows() != Q_.rows() || Q_.rows() != Q_.cols())
      throw InvalidArgument("UnitaryBlock: P and Q must be square of equal size");
  }
  static UnitaryBlock identity(std::size_t n) { return {Matrix::identity(n), Matrix(n, n)}; }

  std::size_t n() const noexcept { return P_.rows(); }
  const Matrix& P() const noexcept { return P_; }
  const Matrix& Q() const noexcept { return Q_; }

  Matrix g() const {
    const std::size_t n = P_.rows();
    Matrix g(2 * n, 2 * n);
    g.set_block(0, 0, P_);
    g.set_block(0, n, -Q_);
    g.set_block(n, 0, Q_);
    g.set_block(n, n, P_);
    return g;
  }

  /// max of |P P^t + Q Q^t - I| and |-P Q^t + Q P^t|
  double constraint_defect() const {
    const Matrix Pt = P_.transpose(), Qt = Q_.transpose();
    return std::max(max_abs_diff(P_ * Pt + Q_ * Qt, Matrix::identity(n())), max_abs(Q_ * Pt - P_ * Qt));
  }

  /// Right multiplication by the complex matrix C + iS.
  UnitaryBlock times(const Matrix& C, const Matrix& S) const {
    return {P_ * C - Q_ * S, P_ * S + Q_ * C};
  }

 private:
  Matrix P_, Q_;
};

namespace detail {

/// M = [I A] W with W having orthonormal columns, so |M| <= sqrt(1 + |A|^2).
/// The ratio uses that bound so 1 x 1 blocks near zero are caught too.
inline void require_graphic(const Matrix& A, const Matrix& M, const char* what) {
  const Vector sa = singular_values(A), sm = singular_values(M);
  const double scale = std::sqrt(1.0 + (sa.empty() ? 0.0 : sa.front() * sa.front()));
  const double cond = sm.back() > 0.0 ? std::max(scale, sm.front()) / sm.back() : std::numeric_limits<double>::infinity();
  if (!(cond <= kGraphicConditionLimit))
    throw NonGraphic(std::string(what) + ": rotated submanifold is not a graph over R^n (condition number " +
                         std::to_string(cond) + ")",
                     cond);
}

/// (P + AQ)^{-1}(-Q + AP) without symmetrization.
inline Matrix lagrangian_raw(const Matrix& A, const UnitaryBlock& g) {
  const Matrix M = g.P() + A * g.Q();
  require_graphic(A, M, "lagrangian_transform");
  return LU(M).solve(-g.Q() + A * g.P());
}

}  // namespace detail

/// New Jacobian (P + AR)^{-1}(Q + AS) of g(Sigma) viewed as a graph over R^n.
///
/// Throws NonGraphic when sqrt(1 + |A|^2) / sigma_min(P + AR) exceeds 1e12.
inline Matrix transform_graph(const Matrix& A, const OrthBlock& g) {
  if (A.rows() != g.n() || A.cols() != g.m()) throw InvalidArgument("transform_graph: A must be n x m");
  const Matrix M = g.P() + A * g.R();
  detail::require_graphic(A, M, "transform_graph");
  return LU(M).solve(g.Q() + A * g.S());
}

/// Hessian (P + AQ)^{-1}(-Q + AP) of the rotated Lagrangian potential.
///
/// The result is symmetric in exact arithmetic; an asymmetry above
/// 1e-9 (1 + max|X|) is reported as a numerical error.
inline Matrix lagrangian_transform(const Matrix& A, const UnitaryBlock& g) {
  if (!A.square() || A.rows() != g.n()) throw InvalidArgument("lagrangian_transform: A must be n x n");
  if (asymmetry(A) > 1e-12 * (1.0 + max_abs(A))) throw InvalidArgument("lagrangian_transform: A must be symmetric");
  const Matrix X = detail::lagrangian_raw(A, g);
  if (asymmetry(X) > 1e-9 * (1.0 + max_abs(X)))
    throw Error("lagrangian_transform: result lost symmetry (ill-conditioned input)");
  return symmetrized(X);
}

namespace detail {

inline std::mt19937_64 substream(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

inline Matrix haar_orthogonal(std::size_t d, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix G(d, d);
  for (double& v : G.data()) v = normal(rng);
  // Modified Gram-Schmidt on the columns, twice; the sign convention of a QR
  // with positive diagonal R is what makes the result Haar distributed.
  Matrix Qm(d, d);
  for (std::size_t j = 0; j < d; ++j) {
    Vector v = G.column(j);
    for (int pass = 0; pass < 2; ++pass)
      for (std::size_t k = 0; k < j; ++k) {
        const Vector q = Qm.column(k);
        const double p = dot(q, v);
        for (std::size_t i = 0; i < d; ++i) v[i] -= p * q[i];
      }
    const double nv = norm(v);
    for (double& x : v) x /= nv;
    Qm.set_column(j, v);
  }
  return Qm;
}

}  // namespace detail

/// Haar-random element of O(n+m), deterministic per seed.
inline OrthBlock random_orthogonal(std::size_t n, std::size_t m, std::uint64_t seed) {
  auto rng = detail::substream(seed, 0);
  return {n, m, detail::haar_orthogonal(n + m, rng)};
}

/// Haar-random element of U(n) from a complex Gaussian matrix, deterministic per seed.
inline UnitaryBlock random_unitary(std::size_t n, std::uint64_t seed) {
  using C = std::complex<double>;
  auto rng = detail::substream(seed, 1);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<std::vector<C>> cols(n, std::vector<C>(n));
  for (auto& col : cols)
    for (auto& z : col) {
      const double re = normal(rng);
      const double im = normal(rng);
      z = C(re, im);
    }
  for (std::size_t j = 0; j < n; ++j) {
    for (int pass = 0; pass < 2; ++pass)
      for (std::size_t k = 0; k < j; ++k) {
        C p(0.0, 0.0);
        for (std::size_t i = 0; i < n; ++i) p += std::conj(cols[k][i]) * cols[j][i];
        for (std::size_t i = 0; i < n; ++i) cols[j][i] -= p * cols[k][i];
      }
    double nv = 0.0;
    for (const auto& z : cols[j]) nv += std::norm(z);
    nv = std::sqrt(nv);
    for (auto& z : cols[j]) z /= nv;
  }
  Matrix P(n, n), Q(n, n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) {
      P(i, j) = cols[j][i].real();
      Q(i, j) = cols[j][i].imag();
    }
  return {std::move(P), std::move(Q)};
}

/// Condition a rotation search tries to satisfy.
struct SearchTarget {
  ConditionName kind = ConditionName::TheoremA;
  double delta = 0.1;
  double k_min = 0.1;
  double epsilon = kDefaultEpsilon;
  bool traceless = true;

  static SearchTarget theorem_a(double delta, double k_min) {
    return {ConditionName::TheoremA, delta, k_min, kDefaultEpsilon, true};
  }
  static SearchTarget optimal_b(double epsilon, bool traceless) {
    return {ConditionName::OptimalB, 0.1, 0.1, epsilon, traceless};
  }
};

enum class Group { Orthogonal, Unitary };

struct SearchOutcome {
  Group group = Group::Orthogonal;
  std::variant<OrthBlock, UnitaryBlock> best_g = OrthBlock::identity(0, 0);
  Matrix transformed;
  ConditionReport report;
  std::vector<std::pair<int, double>> objective_trace;  ///< (evaluation index, best margin so far)
  int evaluations = 0;

  double margin() const { return report.margin; }
  Matrix g_matrix() const {
    return std::visit([](const auto& b) { return Matrix(b.g()); }, best_g);
  }
};

/// Evaluates a target at the singular values of an n x m Jacobian.
inline ConditionReport evaluate_target(const Matrix& jac, const SearchTarget& target,
                                       const std::shared_ptr<const HBasis>& basis = nullptr) {
  Vector lam = singular_values(jac.transpose());
  if (target.kind == ConditionName::TheoremA) return check_theorem_a(lam, target.delta, target.k_min);
  if (target.kind == ConditionName::OptimalB) {
    auto b = basis ? basis : std::make_shared<const HBasis>(h_space_basis(jac.rows(), jac.cols(), target.traceless));
    return optimal_condition(lam, b, target.epsilon);
  }
  throw InvalidArgument("search target must be TheoremA or OptimalB");
}

/// Evaluates a target at the signed eigenvalues of a symmetric Lagrangian Hessian.
///
/// Theorem A uses |lambda|; the optimal form takes the signed values, which
/// give the same spectrum as their absolute values.
inline ConditionReport evaluate_lagrangian_target(const Matrix& hessian, const SearchTarget& target,
                                                  const std::shared_ptr<const HBasis>& basis = nullptr) {
  Vector lam = symmetric_eigen(hessian).values;
  std::stable_sort(lam.begin(), lam.end(), [](double a, double b) { return std::abs(a) > std::abs(b); });
  if (target.kind == ConditionName::TheoremA) {
    for (double& l : lam) l = std::abs(l);
    return check_theorem_a(lam, target.delta, target.k_min);
  }
  if (target.kind == ConditionName::OptimalB) {
    auto b = basis ? basis : std::make_shared<const HBasis>(h_space_basis(hessian.rows(), hessian.rows(), target.traceless));
    return optimal_condition(lam, b, target.epsilon);
  }
  throw InvalidArgument("search target must be TheoremA or OptimalB");
}

namespace detail {

inline Matrix givens(std::size_t d, std::size_t p, std::size_t q, double theta) {
  Matrix G = Matrix::identity(d);
  const double c = std::cos(theta), s = std::sin(theta);
  G(p, p) = c;
  G(q, q) = c;
  G(p, q) = -s;
  G(q, p) = s;
  return G;
}

/// Moves on U(n): real plane rotations, complex plane rotations and phases,
/// each given as a factor C + iS multiplied on the right.
struct UnitaryMove {
  std::size_t p, q;
  int kind;  // 0 real rotation, 1 complex rotation, 2 phase on p (q unused)
};

inline std::pair<Matrix, Matrix> unitary_factor(std::size_t n, const UnitaryMove& mv, double theta) {
  Matrix C = Matrix::identity(n), S(n, n);
  const double c = std::cos(theta), s = std::sin(theta);
  if (mv.kind == 0) {
    C(mv.p, mv.p) = c, C(mv.q, mv.q) = c, C(mv.p, mv.q) = -s, C(mv.q, mv.p) = s;
  } else if (mv.kind == 1) {
    C(mv.p, mv.p) = c, C(mv.q, mv.q) = c;
    S(mv.p, mv.q) = s, S(mv.q, mv.p) = s;
  } else {
    C(mv.p, mv.p) = c;
    S(mv.p, mv.p) = s;
  }
  return {std::move(C), std::move(S)};
}

}  // namespace detail

struct SearchOptions {
  Group group = Group::Orthogonal;
  int budget = 10000;          ///< total condition evaluations
  std::uint64_t seed = 0;
  int max_restarts = 8;
  double initial_step = std::numbers::pi / 4.0;
  double min_step = 1e-9;
};

/// Maximizes the margin of `target` at the transformed Jacobian over the group.
///
/// Restart 0 starts at the identity and later restarts at seeded Haar-random
/// elements. Each restart runs coordinate descent over one-parameter
/// rotations (Givens planes for O(n+m); real, complex and phase rotations for
/// U(n)), accepting a step only on strict improvement and halving the step
/// after a pass with no improvement. The best result over all restarts is
/// returned; nothing is claimed about global optimality.
inline SearchOutcome search_rotation(const Matrix& A, const SearchTarget& target, const SearchOptions& opts) {
  if (opts.budget < 1) throw InvalidArgument("search_rotation: budget must be at least 1");
  if (target.kind != ConditionName::TheoremA && target.kind != ConditionName::OptimalB)
    throw InvalidArgument("search_rotation: target must be TheoremA or OptimalB");
  const std::size_t n = A.rows(), m = A.cols();
  const bool unitary = opts.group == Group::Unitary;
  if (unitary && (n != m || asymmetry(A) > 1e-12 * (1.0 + max_abs(A))))
    throw InvalidArgument("search_rotation: the unitary search needs a symmetric n x n matrix");

  const auto basis =
      target.kind == ConditionName::OptimalB ? std::make_shared<const HBasis>(h_space_basis(n, m, target.traceless)) : nullptr;
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();

  struct Candidate {
    std::variant<OrthBlock, UnitaryBlock> g;
    Matrix transformed;
    ConditionReport report;
    double margin = kNegInf;
  };

  int evals = 0;
  double global_best = kNegInf;
  SearchOutcome out;
  out.group = opts.group;

  auto evaluate = [&](const std::variant<OrthBlock, UnitaryBlock>& g) {
    ++evals;
    Candidate c{g, {}, {}, kNegInf};
    try {
      if (unitary) {
        c.transformed = lagrangian_transform(A, std::get<UnitaryBlock>(g));
        c.report = evaluate_lagrangian_target(c.transformed, target, basis);
      } else {
        c.transformed = transform_graph(A, std::get<OrthBlock>(g));
        c.report = evaluate_target(c.transformed, target, basis);
      }
      c.margin = c.report.margin;
    } catch (const NonGraphic&) {
    } catch (const Error&) {
      // Rotations that lose symmetry numerically count as non-graphic.
    }
    if (c.margin > global_best) {
      global_best = c.margin;
      out.objective_trace.emplace_back(evals, c.margin);
    }
    return c;
  };

  const int restarts = std::clamp(opts.budget / 250, 1, std::max(1, opts.max_restarts));
  std::optional<Candidate> best;

  std::vector<std::pair<std::size_t, std::size_t>> planes;
  std::vector<detail::UnitaryMove> umoves;
  if (unitary) {
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        umoves.push_back({p, q, 0});
        umoves.push_back({p, q, 1});
      }
    for (std::size_t p = 0; p < n; ++p) umoves.push_back({p, p, 2});
  } else {
    for (std::size_t p = 0; p < n + m; ++p)
      for (std::size_t q = p + 1; q < n + m; ++q) planes.emplace_back(p, q);
  }
  const std::size_t move_count = unitary ? umoves.size() : planes.size();

  for (int r = 0; r < restarts && evals < opts.budget; ++r) {
    const int restart_budget_end = std::min(opts.budget, evals + (opts.budget - evals) / (restarts - r));
    std::variant<OrthBlock, UnitaryBlock> start = OrthBlock::identity(n, m);
    if (unitary) {
      start = r == 0 ? UnitaryBlock::identity(n) : random_unitary(n, opts.seed * 1000003ULL + static_cast<std::uint64_t>(r));
    } else if (r > 0) {
      start = random_orthogonal(n, m, opts.seed * 1000003ULL + static_cast<std::uint64_t>(r));
    }
    Candidate cur = evaluate(start);
    double step = opts.initial_step;
    while (evals < restart_budget_end && step >= opts.min_step && move_count > 0) {
      bool improved = false;
      for (std::size_t mv = 0; mv < move_count && evals < restart_budget_end; ++mv) {
        for (double sgn : {1.0, -1.0}) {
          if (evals >= restart_budget_end) break;
          std::variant<OrthBlock, UnitaryBlock> trial = cur.g;
          if (unitary) {
            const auto [C, S] = detail::unitary_factor(n, umoves[mv], sgn * step);
            trial = std::get<UnitaryBlock>(cur.g).times(C, S);
          } else {
            const auto& g = std::get<OrthBlock>(cur.g);
            trial = OrthBlock(n, m, g.g() * detail::givens(n + m, planes[mv].first, planes[mv].second, sgn * step));
          }
          Candidate c = evaluate(trial);
          if (c.margin > cur.margin) {
            cur = std::move(c);
            improved = true;
            break;
          }
        }
      }
      if (!improved) step *= 0.5;
    }
    if (!best || cur.margin > best->margin) best = std::move(cur);
  }

  out.evaluations = evals;
  if (!best || best->margin == kNegInf) {
    out.report.condition_name = target.kind;
    out.report.margin = kNegInf;
    out.report.pass = false;
    if (best) out.best_g = best->g;
    return out;
  }
  out.best_g = best->g;
  out.transformed = best->transformed;
  out.report = best->report;
  return out;
}

}  // namespace bernstein
