#pragma once

// Built-in minimal graphs with analytic derivatives, plus one deliberately
// non-minimal guard surface.

#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bernstein/errors.hpp"
#include "bernstein/map_spec.hpp"

namespace bernstein {

inline const std::vector<std::string>& builtin_surface_names() {
  static const std::vector<std::string> names{"holo_z2", "holo_z3", "scherk", "catenoid_graph",
                                              "lawson_osserman", "lagrangian_harmonic", "paraboloid_guard"};
  return names;
}

namespace detail {

inline std::vector<Interval> square_domain(int n, double lo, double hi) {
  return std::vector<Interval>(static_cast<std::size_t>(n), Interval{lo, hi});
}

inline Monomial mono2(int px, int py, double c) { return Monomial{{px, py}, c}; }

/// Coefficients of (Re w, s * Im w) for w = z^k, z = x + iy.
inline PolynomialCoefficients power_of_z(int k, double imag_sign) {
  PolynomialCoefficients coeffs(2);
  double binom = 1.0;
  for (int j = 0; j <= k; ++j) {
    // term C(k, j) x^{k-j} (iy)^j; i^j cycles 1, i, -1, -i
    const int phase = j % 4;
    const double c = binom * ((phase == 2 || phase == 3) ? -1.0 : 1.0);
    if (phase % 2 == 0)
      coeffs[0].push_back(mono2(k - j, j, c));
    else
      coeffs[1].push_back(mono2(k - j, j, imag_sign * c));
    binom = binom * (k - j) / (j + 1);
  }
  return coeffs;
}

inline MapSpec scherk_surface(std::vector<Interval> domain) {
  for (const auto& iv : domain)
    if (!(std::abs(iv.lo) < std::numbers::pi / 2) || !(std::abs(iv.hi) < std::numbers::pi / 2))
      throw DomainError("scherk: domain must stay inside |x|, |y| < pi/2");
  MapSpec s;
  s.name = "scherk";
  s.n = 2;
  s.m = 1;
  s.domain = std::move(domain);
  s.value = [](const Vector& x) { return Vector{std::log(std::cos(x[0])) - std::log(std::cos(x[1]))}; };
  s.derivatives = [](const Vector& x) {
    Derivatives d{Matrix(2, 1), Tensor3(1, 2, 2)};
    d.jac(0, 0) = -std::tan(x[0]);
    d.jac(1, 0) = std::tan(x[1]);
    const double cx = std::cos(x[0]), cy = std::cos(x[1]);
    d.hess(0, 0, 0) = -1.0 / (cx * cx);
    d.hess(0, 1, 1) = 1.0 / (cy * cy);
    return d;
  };
  return s;
}

inline MapSpec catenoid_surface(std::vector<Interval> domain) {
  // Nearest point of the box to the origin must stay outside the neck r = 1.
  double near2 = 0.0;
  for (const auto& iv : domain) {
    const double c = (iv.lo > 0.0) ? iv.lo : (iv.hi < 0.0 ? iv.hi : 0.0);
    near2 += c * c;
  }
  if (!(near2 > 1.0)) throw DomainError("catenoid_graph: domain must satisfy r > 1");
  MapSpec s;
  s.name = "catenoid_graph";
  s.n = 2;
  s.m = 1;
  s.domain = std::move(domain);
  s.value = [](const Vector& x) { return Vector{std::acosh(std::hypot(x[0], x[1]))}; };
  s.derivatives = [](const Vector& x) {
    const double r2 = x[0] * x[0] + x[1] * x[1], r = std::sqrt(r2);
    const double d1 = 1.0 / std::sqrt(r2 - 1.0);           // phi'(r)
    const double d2 = -r / ((r2 - 1.0) * std::sqrt(r2 - 1.0));  // phi''(r)
    Derivatives d{Matrix(2, 1), Tensor3(1, 2, 2)};
    for (std::size_t i = 0; i < 2; ++i) {
      d.jac(i, 0) = d1 * x[i] / r;
      for (std::size_t j = 0; j < 2; ++j)
        d.hess(0, i, j) = d2 * x[i] * x[j] / r2 + d1 * ((i == j ? 1.0 : 0.0) / r - x[i] * x[j] / (r2 * r));
    }
    return d;
  };
  return s;
}

/// f(x) = (sqrt(5)/2) |x| eta(x/|x|) with eta the Hopf map S^3 -> S^2.
inline MapSpec lawson_osserman_cone(std::vector<Interval> domain) {
  for (const auto& iv : domain)
    if (iv.lo <= 0.0 && iv.hi >= 0.0) {
      bool all_straddle = true;
      for (const auto& jv : domain) all_straddle = all_straddle && jv.lo <= 0.0 && jv.hi >= 0.0;
      if (all_straddle) throw DomainError("lawson_osserman: domain must exclude the origin");
    }
  // eta_a(x) = x^t Qa x with z1 = x1 + i x2, z2 = x3 + i x4:
  //   |z1|^2 - |z2|^2, 2 Re(z1 conj z2), 2 Im(z1 conj z2).
  static const double Qs[3][4][4] = {
      {{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, -1, 0}, {0, 0, 0, -1}},
      {{0, 0, 1, 0}, {0, 0, 0, 1}, {1, 0, 0, 0}, {0, 1, 0, 0}},
      {{0, 0, 0, -1}, {0, 0, 1, 0}, {0, 1, 0, 0}, {-1, 0, 0, 0}},
  };
  const double c = std::sqrt(5.0) / 2.0;
  MapSpec s;
  s.name = "lawson_osserman";
  s.n = 4;
  s.m = 3;
  s.domain = std::move(domain);
  s.value = [c](const Vector& x) {
    const double r = norm(x);
    Vector f(3, 0.0);
    for (int a = 0; a < 3; ++a) {
      double q = 0.0;
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) q += x[i] * Qs[a][i][j] * x[j];
      f[a] = c * q / r;
    }
    return f;
  };
  s.derivatives = [c](const Vector& x) {
    const double r2 = dot(x, x), r = std::sqrt(r2), r3 = r2 * r, r5 = r3 * r2;
    Derivatives d{Matrix(4, 3), Tensor3(3, 4, 4)};
    for (std::size_t a = 0; a < 3; ++a) {
      double q = 0.0;
      double gq[4] = {0, 0, 0, 0};
      for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t j = 0; j < 4; ++j) gq[i] += 2.0 * Qs[a][i][j] * x[j];
        q += 0.5 * gq[i] * x[i];
      }
      for (std::size_t i = 0; i < 4; ++i) {
        d.jac(i, a) = c * (gq[i] / r - q * x[i] / r3);
        for (std::size_t j = 0; j < 4; ++j)
          d.hess(a, i, j) = c * (2.0 * Qs[a][i][j] / r - (gq[i] * x[j] + gq[j] * x[i]) / r3 -
                                 (i == j ? q / r3 : 0.0) + 3.0 * q * x[i] * x[j] / r5);
      }
    }
    return d;
  };
  return s;
}

}  // namespace detail

inline std::vector<Interval> builtin_default_domain(std::string_view name) {
  if (name == "scherk") return detail::square_domain(2, -1.2, 1.2);
  if (name == "catenoid_graph") return {{1.2, 2.8}, {-1.0, 1.0}};
  if (name == "lawson_osserman") return detail::square_domain(4, 0.25, 1.25);
  if (name == "holo_z2" || name == "holo_z3" || name == "paraboloid_guard" || name.starts_with("lagrangian_harmonic"))
    return detail::square_domain(2, -1.0, 1.0);
  throw InvalidArgument("unknown built-in surface '" + std::string(name) + "'");
}

/// Built-in map by name, optionally on a caller-chosen box.
///
/// holo_z2, holo_z3        real and imaginary parts of z^2, z^3
/// scherk                  ln(cos x / cos y), |x|, |y| < pi/2
/// catenoid_graph          arccosh(r), box inside r > 1
/// lawson_osserman         the Hopf-map cone R^4 -> R^3, box away from 0
/// lagrangian_harmonic[:k] gradient of the harmonic potential Re(z^k)/k (default k = 3)
/// paraboloid_guard        (x^2 + y^2, 0), not minimal
inline MapSpec builtin_surface(std::string_view name, std::optional<std::vector<Interval>> domain = std::nullopt) {
  std::vector<Interval> dom = domain ? *domain : builtin_default_domain(name);
  auto check_dim = [&](std::size_t n) {
    if (dom.size() != n) throw InvalidArgument("builtin '" + std::string(name) + "': domain needs " + std::to_string(n) + " intervals");
  };
  if (name == "holo_z2" || name == "holo_z3") {
    check_dim(2);
    return polynomial_map(std::string(name), 2, dom, detail::power_of_z(name == "holo_z2" ? 2 : 3, 1.0));
  }
  if (name.starts_with("lagrangian_harmonic")) {
    check_dim(2);
    int k = 3;
    if (name.size() > std::string_view("lagrangian_harmonic").size()) {
      const auto suffix = name.substr(std::string_view("lagrangian_harmonic").size());
      if (suffix.size() < 2 || suffix[0] != ':') throw InvalidArgument("lagrangian_harmonic: expected ':<degree>'");
      try {
        k = std::stoi(std::string(suffix.substr(1)));
      } catch (const std::exception&) {
        throw InvalidArgument("lagrangian_harmonic: bad degree");
      }
      if (k < 2) throw InvalidArgument("lagrangian_harmonic: degree must be at least 2");
    }
    // grad Re(z^k)/k = (Re z^{k-1}, -Im z^{k-1})
    return polynomial_map(std::string(name), 2, dom, detail::power_of_z(k - 1, -1.0));
  }
  if (name == "paraboloid_guard") {
    check_dim(2);
    return polynomial_map("paraboloid_guard", 2, dom, {{detail::mono2(2, 0, 1.0), detail::mono2(0, 2, 1.0)}, {}});
  }
  if (name == "scherk") {
    check_dim(2);
    return detail::scherk_surface(dom);
  }
  if (name == "catenoid_graph") {
    check_dim(2);
    return detail::catenoid_surface(dom);
  }
  if (name == "lawson_osserman") {
    check_dim(4);
    return detail::lawson_osserman_cone(dom);
  }
  throw InvalidArgument("unknown built-in surface '" + std::string(name) + "'");
}

}  // namespace bernstein
