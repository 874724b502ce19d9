#pragma once

// JSON and CSV serialization of the library's inputs and results.

#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "bernstein/conditions.hpp"
#include "bernstein/discrete_verification.hpp"
#include "bernstein/errors.hpp"
#include "bernstein/linalg.hpp"
#include "bernstein/map_spec.hpp"
#include "bernstein/optimal_region.hpp"
#include "bernstein/rotation_search.hpp"
#include "bernstein/surfaces.hpp"
#include "json.hpp"

namespace bernstein::io {

using nlohmann::json;

inline constexpr std::string_view kSchemaVersion = "bernstein-lab/1";

inline json to_json(const Matrix& A) {
  json rows = json::array();
  for (std::size_t i = 0; i < A.rows(); ++i) rows.push_back(A.row(i));
  return rows;
}

inline Matrix matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw InvalidArgument("matrix must be a non-empty array of rows");
  if (!j.front().is_array()) throw InvalidArgument("matrix rows must be arrays");
  const std::size_t rows = j.size(), cols = j.front().size();
  if (cols == 0) throw InvalidArgument("matrix rows must be non-empty");
  Matrix A(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    if (!j[i].is_array() || j[i].size() != cols) throw InvalidArgument("matrix rows must have equal length");
    for (std::size_t k = 0; k < cols; ++k) {
      if (!j[i][k].is_number()) throw InvalidArgument("matrix entries must be numbers");
      A(i, k) = j[i][k].get<double>();
    }
  }
  if (!all_finite(A)) throw InvalidArgument("matrix entries must be finite");
  return A;
}

/// Parses "a,b;c,d" (rows separated by ';').
inline Matrix matrix_from_string(std::string_view text) {
  json rows = json::array();
  std::string s(text);
  std::stringstream rs(s);
  std::string row;
  while (std::getline(rs, row, ';')) {
    json r = json::array();
    std::stringstream cs(row);
    std::string cell;
    while (std::getline(cs, cell, ',')) {
      try {
        std::size_t used = 0;
        const double v = std::stod(cell, &used);
        if (cell.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(cell);
        r.push_back(v);
      } catch (const std::exception&) {
        throw InvalidArgument("bad matrix entry '" + cell + "'");
      }
    }
    rows.push_back(r);
  }
  return matrix_from_json(rows);
}

inline Vector vector_from_string(std::string_view text) {
  const Matrix M = matrix_from_string(text);
  if (M.rows() != 1) throw InvalidArgument("expected a comma-separated list");
  return M.row(0);
}

/// MapSpec schema:
///   {"n": int, "m": int, "kind": "polynomial", "coeffs": [[{"powers": [..], "c": x}, ..], ..],
///    "domain": [[lo, hi], ..]}
///   {"kind": "builtin", "name": "holo_z2", "domain": [[lo, hi], ..] (optional)}
/// An optional "derivatives": "finite-difference" drops analytic derivatives.
inline MapSpec map_spec_from_json(const json& j) {
  if (!j.is_object()) throw InvalidArgument("MapSpec must be a JSON object");
  const std::string kind = j.value("kind", std::string("polynomial"));
  std::optional<std::vector<Interval>> domain;
  if (j.contains("domain")) {
    std::vector<Interval> d;
    for (const auto& iv : j.at("domain")) {
      if (!iv.is_array() || iv.size() != 2) throw InvalidArgument("domain entries must be [lo, hi]");
      d.push_back({iv[0].get<double>(), iv[1].get<double>()});
    }
    domain = std::move(d);
  }
  MapSpec spec;
  if (kind == "builtin") {
    if (!j.contains("name")) throw InvalidArgument("builtin MapSpec needs a name");
    spec = builtin_surface(j.at("name").get<std::string>(), domain);
  } else if (kind == "polynomial") {
    if (!j.contains("n") || !j.contains("m") || !j.contains("coeffs"))
      throw InvalidArgument("polynomial MapSpec needs n, m and coeffs");
    const int n = j.at("n").get<int>(), m = j.at("m").get<int>();
    if (!domain) throw InvalidArgument("polynomial MapSpec needs a domain");
    PolynomialCoefficients coeffs;
    for (const auto& comp : j.at("coeffs")) {
      std::vector<Monomial> terms;
      for (const auto& t : comp) terms.push_back({t.at("powers").get<std::vector<int>>(), t.at("c").get<double>()});
      coeffs.push_back(std::move(terms));
    }
    if (coeffs.size() != static_cast<std::size_t>(m)) throw InvalidArgument("coeffs must have one table per component");
    spec = polynomial_map(j.value("name", std::string("polynomial")), n, *domain, std::move(coeffs));
  } else {
    throw InvalidArgument("MapSpec kind must be 'polynomial' or 'builtin'");
  }
  if (j.value("derivatives", std::string("analytic")) == "finite-difference") spec = spec.value_only();
  validate(spec);
  return spec;
}

inline json to_json(const ConditionReport& r) {
  json details = json::object();
  for (const auto& [k, v] : r.details) details[k] = v;
  return {{"condition", std::string(to_string(r.condition_name))}, {"pass", r.pass}, {"margin", r.margin},
          {"details", details}};
}

inline json to_json(const VerificationStats& st) {
  json j = {{"identity", std::string(to_string(st.identity))},
            {"max_abs_error", st.max_abs_error},
            {"rms_error", st.rms_error},
            {"spacing", st.spacing},
            {"grid_steps", st.grid_steps},
            {"nodes_compared", st.nodes_compared},
            {"repeated_singular_nodes", st.repeated_singular_nodes}};
  j["observed_order"] = st.observed_order ? json(*st.observed_order) : json(nullptr);
  j["common_max_abs_error"] = st.common_max_abs_error ? json(*st.common_max_abs_error) : json(nullptr);
  return j;
}

/// Per-node comparison rows as CSV: x1..xn,component,lhs,rhs,err.
inline std::string nodes_csv(const VerificationStats& st, std::size_t n) {
  std::ostringstream os;
  os.precision(17);
  for (std::size_t i = 0; i < n; ++i) os << "x" << (i + 1) << ",";
  os << "component,lhs,rhs,err\n";
  for (const auto& r : st.rows) {
    for (double v : r.x) os << v << ",";
    os << r.component << "," << r.lhs << "," << r.rhs << "," << r.err() << "\n";
  }
  return os.str();
}

/// Region scan as CSV: one "# <schema> <config>" line, then
/// lambda1..lambdap,min_eig,class with rows in lexicographic grid order.
inline std::string region_csv(const RegionScanResult& r, const json& config) {
  std::ostringstream os;
  os.precision(17);
  os << "# " << kSchemaVersion << " " << config.dump() << "\n";
  for (std::size_t a = 0; a < r.axes.size(); ++a) os << "lambda" << (a + 1) << ",";
  os << "min_eig,class\n";
  for (std::size_t k = 0; k < r.node_count(); ++k) {
    const Vector lam = r.lambdas_at(k);
    for (std::size_t a = 0; a < r.axes.size(); ++a) os << lam[a] << ",";
    os << r.values[k] << "," << to_string(r.classes[k]) << "\n";
  }
  return os.str();
}

inline json region_json(const RegionScanResult& r, const json& config) {
  json rows = json::array();
  for (std::size_t k = 0; k < r.node_count(); ++k) {
    Vector lam = r.lambdas_at(k);
    lam.resize(r.axes.size());
    rows.push_back({{"lambdas", lam}, {"min_eig", r.values[k]}, {"class", std::string(to_string(r.classes[k]))}});
  }
  return {{"schema", kSchemaVersion},
          {"config", config},
          {"counts",
           {{"inside", r.count(RegionClass::Inside)},
            {"boundary", r.count(RegionClass::Boundary)},
            {"outside", r.count(RegionClass::Outside)}}},
          {"rows", rows}};
}

inline json to_json(const SearchOutcome& o) {
  json j = {{"group", o.group == Group::Orthogonal ? "orthogonal" : "unitary"}, {"g", to_json(o.g_matrix())}};
  if (const auto* u = std::get_if<UnitaryBlock>(&o.best_g)) {
    j["P"] = to_json(u->P());
    j["Q"] = to_json(u->Q());
  }
  j["transformed"] = o.transformed.rows() > 0 ? to_json(o.transformed) : json(nullptr);
  j["report"] = to_json(o.report);
  j["margin"] = std::isfinite(o.report.margin) ? json(o.report.margin) : json(nullptr);
  json trace = json::array();
  for (const auto& [it, margin] : o.objective_trace) trace.push_back({it, margin});
  j["objective_trace"] = trace;
  j["evaluations"] = o.evaluations;
  return j;
}

/// Parses "lo:hi:steps,lo:hi:steps,...".
inline std::vector<GridAxis> parse_region_grid(std::string_view text) {
  std::vector<GridAxis> axes;
  std::stringstream ss{std::string(text)};
  std::string part;
  while (std::getline(ss, part, ',')) {
    GridAxis ax;
    char c1 = 0, c2 = 0;
    std::stringstream ps(part);
    if (!(ps >> ax.lo >> c1 >> ax.hi >> c2 >> ax.steps) || c1 != ':' || c2 != ':' || !(ps >> std::ws).eof())
      throw InvalidArgument("bad grid axis '" + part + "' (expected lo:hi:steps)");
    axes.push_back(ax);
  }
  if (axes.empty()) throw InvalidArgument("empty grid");
  return axes;
}

/// Parses "N" or "N1,N2,...".
inline std::vector<int> parse_grid_sizes(std::string_view text) {
  const Vector v = vector_from_string(text);
  std::vector<int> out;
  for (double d : v) {
    if (d != std::floor(d) || d < 1) throw InvalidArgument("grid sizes must be positive integers");
    out.push_back(static_cast<int>(d));
  }
  return out;
}

}  // namespace bernstein::io
