// Acceptance checks. One PASS/FAIL line per criterion; exit status is the
// number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "bernstein/cli.hpp"
#include "bernstein/conditions.hpp"
#include "bernstein/discrete_verification.hpp"
#include "bernstein/optimal_region.hpp"
#include "bernstein/rotation_search.hpp"
#include "bernstein/surfaces.hpp"
#include "support.hpp"

using namespace bernstein;
using namespace testing_support;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Verdict completed_square_floor() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t m : {2u, 3u, 4u}) {
    const RegionScanResult r = region_scan(2, m, true, {{0, 10, 41}, {0, 10, 41}}, kDefaultEpsilon);
    for (double v : r.values) worst = std::min(worst, v);
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {worst >= 1.0 - 1e-9 && secs < 10.0, fmt("min eig %.12f over m=2,3,4; %.3f s", worst, secs)};
}

Verdict gram_matches_direct() {
  auto g = rng(1001);
  double worst = 0.0;
  int trials = 0;
  for (std::size_t n = 1; n <= 4; ++n)
    for (std::size_t m = 1; m <= 4; ++m)
      for (bool traceless : {false, true}) {
        // n = 1 has no trace-free symmetric tensors.
        if (traceless && n == 1) continue;
        const auto basis = std::make_shared<const HBasis>(h_space_basis(n, m, traceless));
        for (int t = 0; t < 1000; ++t, ++trials) {
          const Vector lam = random_vector(g, n, 0.0, 3.0);
          const Vector c = random_vector(g, basis->dim());
          const double gram = assemble_gram(lam, basis).quadratic(c);
          worst = std::max(worst, std::abs(gram - evaluate_F_direct(lam, basis->compose(c))));
        }
      }
  return {worst <= 1e-10, fmt("max |diff| %.3e over %d trials", worst, trials)};
}

Verdict theorem_a_positivity() {
  struct Dims {
    std::size_t n, m;
  };
  Verdict v;
  for (const Dims d : {Dims{2, 2}, Dims{2, 3}, Dims{3, 3}}) {
    const std::size_t p = std::min(d.n, d.m);
    const RegionScanResult r = region_scan(d.n, d.m, false, std::vector<GridAxis>(p, GridAxis{0, 3, 21}), kDefaultEpsilon);
    double floor = std::numeric_limits<double>::infinity();
    std::size_t kept = 0;
    for (std::size_t k = 0; k < r.node_count(); ++k) {
      const Vector lam = r.lambdas_at(k);
      double prod = 0.0;
      for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = i + 1; j < p; ++j) prod = std::max(prod, lam[i] * lam[j]);
      if (prod > 0.9) continue;
      ++kept;
      floor = std::min(floor, r.values[k]);
    }
    v.pass = v.pass && floor > 0.0 && floor >= 0.05;
    v.detail += fmt("(%zu,%zu) floor %.4f on %zu nodes; ", d.n, d.m, floor, kept);
  }
  return v;
}

Verdict jost_xin_implication() {
  auto g = rng(1004);
  int counterexamples = 0, hypothesis = 0;
  for (int t = 0; t < 100000; ++t) {
    const auto n = static_cast<std::size_t>(uniform_int(g, 2, 6));
    const ImplicationWitness w = implication_jx_to_a(random_vector(g, n, 0.0, 3.0));
    counterexamples += w.counterexample ? 1 : 0;
    hypothesis += w.hypothesis ? 1 : 0;
  }
  return {counterexamples == 0, fmt("%d counterexamples, %d samples met the hypothesis", counterexamples, hypothesis)};
}

Verdict identity_convergence() {
  struct Case {
    const char* surface;
    Identity id;
  };
  Verdict v;
  for (const Case c : {Case{"holo_z2", Identity::Gradient}, Case{"holo_z2", Identity::LaplacianLog},
                       Case{"scherk", Identity::Gradient}, Case{"scherk", Identity::LaplacianLog},
                       Case{"catenoid_graph", Identity::Gradient}, Case{"catenoid_graph", Identity::LaplacianRaw}}) {
    const auto st = convergence_study(builtin_surface(c.surface), {33, 65}, c.id);
    const double order = st[1].observed_order.value_or(std::nan(""));
    const double err = st[1].max_abs_error;
    const bool ok = order >= 1.5 && order <= 2.5 && err < 5e-3;
    v.pass = v.pass && ok;
    v.detail += fmt("\n    %-15s %-14s order %.3f  max err %.3e  %s", c.surface, std::string(to_string(c.id)).c_str(),
                    order, err, ok ? "ok" : "over tolerance");
  }
  return v;
}

Verdict lawson_osserman() {
  const MapSpec lo = builtin_surface("lawson_osserman");
  const SurfaceSample s = sample_surface(lo, 7);
  double worst_h = 0.0;
  int failures = 0;
  for (const auto& node : s.nodes) {
    worst_h = std::max(worst_h, norm(node.mean_curvature));
    failures += check_theorem_a(node.singular.lambdas, 0.01, 0.01).pass ? 0 : 1;
  }
  return {worst_h < 1e-6 && failures > 0,
          fmt("max |H| %.3e on %zu nodes; Theorem A fails at %d", worst_h, s.nodes.size(), failures)};
}

Matrix graph_projector(const Matrix& A) {
  Matrix M(A.rows(), A.rows() + A.cols());
  M.set_block(0, 0, Matrix::identity(A.rows()));
  M.set_block(0, A.rows(), A);
  return row_space_projector(M);
}

Verdict corollary_algebra() {
  auto g = rng(1007);
  double subspace = 0.0;
  int checked = 0;
  for (std::uint64_t t = 0; checked < 1000; ++t) {
    const auto n = static_cast<std::size_t>(uniform_int(g, 1, 4));
    const auto m = static_cast<std::size_t>(uniform_int(g, 1, 4));
    const Matrix A = random_matrix(g, n, m, 2.0);
    const OrthBlock rot = random_orthogonal(n, m, t);
    if (condition_number(rot.P() + A * rot.R()) > 1e6) continue;
    const Matrix expected = rot.g().transpose() * graph_projector(A) * rot.g();
    subspace = std::max(subspace, max_abs_diff(graph_projector(transform_graph(A, rot)), expected));
    ++checked;
  }

  double scalar = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const double a = uniform(g, -5, 5), theta = uniform(g, -1.5, 1.5);
    const double c = std::cos(theta), s = std::sin(theta);
    if (std::abs(c - a * s) < 0.1) continue;
    const OrthBlock rot = OrthBlock::from_blocks(Matrix{{c}}, Matrix{{s}}, Matrix{{-s}}, Matrix{{c}});
    scalar = std::max(scalar, std::abs(transform_graph(Matrix{{a}}, rot)(0, 0) - (s + a * c) / (c - a * s)));
  }

  double diagonal = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const Vector mu = random_vector(g, 3, -4, 4);
    const double theta = uniform(g, -1.0, 1.0);
    const double c = std::cos(theta), s = std::sin(theta);
    bool near_pole = false;
    for (double x : mu) near_pole = near_pole || std::abs(c + x * s) < 0.1;
    if (near_pole) continue;
    const Matrix X = lagrangian_transform(Matrix::diagonal(mu), {c * Matrix::identity(3), s * Matrix::identity(3)});
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j) {
        const double expected = i == j ? std::tan(std::atan(mu[i]) - theta) : 0.0;
        diagonal = std::max(diagonal, std::abs(X(i, j) - expected));
      }
  }
  return {subspace <= 1e-8 && scalar <= 1e-10 && diagonal <= 1e-10,
          fmt("subspace %.3e (%d trials); scalar %.3e; diagonal Lagrangian %.3e", subspace, checked, scalar, diagonal)};
}

Verdict cone_reduction() {
  auto g = rng(1008);
  int mismatches = 0;
  for (int t = 0; t < 1000; ++t) {
    const auto m = static_cast<std::size_t>(uniform_int(g, 1, 4));
    const HBasis b2 = h_space_basis(2, m, true);
    const Tensor3 h2 = b2.compose(random_vector(g, b2.dim()));
    Tensor3 h3(m, 3, 3);
    for (std::size_t a = 0; a < m; ++a)
      for (std::size_t l = 0; l < 2; ++l)
        for (std::size_t k = 0; k < 2; ++k) h3(a, l, k) = h2(a, l, k);
    const Vector lam2 = random_vector(g, 2, 0.0, 5.0);
    const Vector lam3{lam2[0], lam2[1], uniform(g, 0.0, 5.0)};
    mismatches += evaluate_F_direct(lam3, h3) == evaluate_F_direct(lam2, h2) ? 0 : 1;
  }
  return {mismatches == 0, fmt("%d of 1000 embeddings differ", mismatches)};
}

Verdict determinism() {
  cli::RunConfig rot;
  rot.subcommand = "rotate";
  rot.matrix = "3,0.5,1;0.2,2.5,-1";
  rot.seed = 20260915;
  rot.budget = 4000;
  cli::RunConfig uni = rot;
  uni.matrix = "3,0.5;0.5,2";
  uni.group = "unitary";
  cli::RunConfig reg;
  reg.subcommand = "region";
  reg.grid = "0:3:17,0:3:17,0:3:17";
  reg.traceless = false;
  reg.epsilon = 1.0;
  int differing = 0;
  std::size_t bytes = 0;
  for (const auto& c : {rot, uni, reg}) {
    const cli::CommandResult a = cli::run(c), b = cli::run(c);
    if (a.exit_code == cli::kExitError || a.output != b.output) ++differing;
    bytes += a.output.size();
  }
  return {differing == 0, fmt("%d of 3 commands differ; %zu bytes compared", differing, bytes)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria = {
      {"traceless completed-square floor", completed_square_floor},
      {"Gram form equals direct evaluation", gram_matches_direct},
      {"positivity on the product region", theorem_a_positivity},
      {"Jost-Xin implication", jost_xin_implication},
      {"discrete identity convergence", identity_convergence},
      {"Lawson-Osserman cone", lawson_osserman},
      {"graph transform algebra", corollary_algebra},
      {"three-dimensional cone reduction", cone_reduction},
      {"determinism", determinism},
  };
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Verdict v;
    try {
      v = criteria[k].second();
    } catch (const std::exception& e) {
      v = {false, std::string("threw: ") + e.what()};
    }
    failed += v.pass ? 0 : 1;
    std::printf("criterion %zu %s: %s  %s\n", k + 1, v.pass ? "PASS" : "FAIL", criteria[k].first, v.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failed, criteria.size());
  return failed;
}
