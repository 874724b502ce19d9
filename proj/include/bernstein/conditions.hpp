#pragma once

// Closed-form sufficient flatness conditions stated in terms of the singular
// values of df, each reported with a signed margin in its own natural units.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bernstein/errors.hpp"
#include "bernstein/graph_geometry.hpp"
#include "bernstein/linalg.hpp"

namespace bernstein {

enum class ConditionName { TheoremA, JostXin, FC_HJW, Hemisphere24, OptimalB };

inline std::string_view to_string(ConditionName c) {
  switch (c) {
    case ConditionName::TheoremA: return "TheoremA";
    case ConditionName::JostXin: return "JostXin";
    case ConditionName::FC_HJW: return "FC_HJW";
    case ConditionName::Hemisphere24: return "Hemisphere24";
    case ConditionName::OptimalB: return "OptimalB";
  }
  return "?";
}

inline ConditionName parse_condition_name(std::string_view s) {
  for (auto c : {ConditionName::TheoremA, ConditionName::JostXin, ConditionName::FC_HJW, ConditionName::Hemisphere24,
                 ConditionName::OptimalB})
    if (to_string(c) == s) return c;
  throw InvalidArgument("unknown condition '" + std::string(s) + "'");
}

/// Slack allowed on conditions whose inequality is closed (<= or >=), so a
/// value sitting exactly on the boundary passes despite rounding.
inline constexpr double kClosedBoundarySlack = 1e-12;

struct ConditionReport {
  ConditionName condition_name = ConditionName::TheoremA;
  bool pass = false;
  double margin = 0.0;
  std::vector<std::pair<std::string, double>> details;

  double detail(std::string_view key) const {
    for (const auto& [k, v] : details)
      if (k == key) return v;
    throw InvalidArgument("ConditionReport: no detail '" + std::string(key) + "'");
  }
};

namespace detail {

inline void require_nonnegative(std::span<const double> lambdas) {
  for (double l : lambdas)
    if (!(l >= 0.0)) throw InvalidArgument("singular values must be nonnegative");
}

}  // namespace detail

/// max_{i != j} lambda_i lambda_j (0 when fewer than two values).
inline double max_pair_product(std::span<const double> lambdas) {
  double best = 0.0;
  bool any = false;
  for (std::size_t i = 0; i < lambdas.size(); ++i)
    for (std::size_t j = i + 1; j < lambdas.size(); ++j) {
      const double p = std::abs(lambdas[i] * lambdas[j]);
      best = any ? std::max(best, p) : p;
      any = true;
    }
  return best;
}

/// Pass iff max_{i!=j} lambda_i lambda_j <= 1 - delta and *Omega >= k_min.
inline ConditionReport check_theorem_a(std::span<const double> lambdas, double delta, double k_min) {
  detail::require_nonnegative(lambdas);
  if (!(delta > 0.0) || !(delta < 1.0)) throw InvalidArgument("check_theorem_a: delta must lie in (0, 1)");
  if (!(k_min > 0.0)) throw InvalidArgument("check_theorem_a: k_min must be positive");
  const double prod = max_pair_product(lambdas);
  const double so = star_omega(lambdas);
  const double product_margin = (1.0 - delta) - prod;
  const double omega_margin = so - k_min;
  ConditionReport r;
  r.condition_name = ConditionName::TheoremA;
  r.margin = std::min(product_margin, omega_margin);
  r.pass = r.margin >= -kClosedBoundarySlack;
  r.details = {{"max_pair_product", prod}, {"star_omega", so}, {"delta", delta}, {"k_min", k_min},
               {"product_margin", product_margin}, {"omega_margin", omega_margin}};
  return r;
}

/// Delta_f = sqrt(prod (1 + lambda_i^2)) = 1 / *Omega.
inline double jost_xin_delta(std::span<const double> lambdas) {
  detail::require_nonnegative(lambdas);
  double prod = 1.0;
  for (double l : lambdas) prod *= 1.0 + l * l;
  return std::sqrt(prod);
}

/// Pass iff Delta_f < 2.
inline ConditionReport check_jost_xin(std::span<const double> lambdas) {
  const double d = jost_xin_delta(lambdas);
  ConditionReport r;
  r.condition_name = ConditionName::JostXin;
  r.margin = 2.0 - d;
  r.pass = r.margin > 0.0;
  r.details = {{"delta_f", d}};
  return r;
}

/// cos^p(pi / (2 sqrt(2) p)) with p = min(n, m).
inline double fc_hjw_threshold(int n, int m) {
  if (n < 1 || m < 1) throw InvalidArgument("fc_hjw_threshold: n, m must be positive");
  const double p = std::min(n, m);
  return std::pow(std::cos(std::numbers::pi / (2.0 * std::numbers::sqrt2 * p)), p);
}

/// Pass iff *Omega > cos^p(pi / (2 sqrt(2) p)).
inline ConditionReport check_fc_hjw(std::span<const double> lambdas, int n, int m) {
  detail::require_nonnegative(lambdas);
  const double thr = fc_hjw_threshold(n, m);
  const double so = star_omega(lambdas);
  ConditionReport r;
  r.condition_name = ConditionName::FC_HJW;
  r.margin = so - thr;
  r.pass = r.margin > 0.0;
  r.details = {{"star_omega", so}, {"threshold", thr}, {"p", static_cast<double>(std::min(n, m))}};
  return r;
}

struct ImplicationWitness {
  bool hypothesis = false;      ///< prod (1 + lambda_i^2) < 4
  bool conclusion = false;      ///< max_{i!=j} |lambda_i lambda_j| < 1
  bool counterexample = false;  ///< hypothesis && !conclusion
  double product = 0.0;         ///< prod (1 + lambda_i^2)
  double max_pair = 0.0;
};

/// Checks prod (1 + lambda_i^2) < 4  =>  |lambda_i lambda_j| < 1 at one point.
inline ImplicationWitness implication_jx_to_a(std::span<const double> lambdas) {
  detail::require_nonnegative(lambdas);
  ImplicationWitness w;
  w.product = 1.0;
  for (double l : lambdas) w.product *= 1.0 + l * l;
  w.max_pair = max_pair_product(lambdas);
  w.hypothesis = w.product < 4.0;
  w.conclusion = w.max_pair < 1.0;
  w.counterexample = w.hypothesis && !w.conclusion;
  return w;
}

/// Heights (*omega_1, *omega_2) of the Gauss image on the two spheres of G(2,4).
///
/// lambda2 may carry a sign: the sign of lambda1 * lambda2 is the sign of
/// det(df), which distinguishes the two hemispheres.
inline std::pair<double, double> grassmannian_g24(double lambda1, double lambda2) {
  const double prod = lambda1 * lambda2;
  const double D = std::numbers::sqrt2 * std::sqrt((1.0 + lambda1 * lambda1) * (1.0 + lambda2 * lambda2));
  return {(1.0 - prod) / D, (1.0 + prod) / D};
}

/// Singular values of a 2x2 Jacobian with the second one signed by det(jac).
inline std::pair<double, double> signed_singular_pair(const Matrix& jac) {
  if (jac.rows() != 2 || jac.cols() != 2) throw InvalidArgument("signed_singular_pair: jac must be 2x2");
  const Vector s = singular_values(jac);
  const double sign = determinant(jac) < 0.0 ? -1.0 : 1.0;
  return {s[0], sign * s[1]};
}

/// Pass iff both *omega_1 and *omega_2 are positive; margin is the smaller one.
inline ConditionReport check_hemisphere_g24(double lambda1, double signed_lambda2) {
  const auto [w1, w2] = grassmannian_g24(lambda1, signed_lambda2);
  ConditionReport r;
  r.condition_name = ConditionName::Hemisphere24;
  r.margin = std::min(w1, w2);
  r.pass = r.margin > 0.0;
  r.details = {{"star_omega1", w1}, {"star_omega2", w2}, {"signed_product", lambda1 * signed_lambda2}};
  return r;
}

inline ConditionReport check_hemisphere_g24(const Matrix& jac) {
  const auto [l1, l2] = signed_singular_pair(jac);
  return check_hemisphere_g24(l1, l2);
}

}  // namespace bernstein
