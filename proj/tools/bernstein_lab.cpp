#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "bernstein/cli.hpp"

namespace {

bool write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  f << text;
  return static_cast<bool>(f);
}

}  // namespace

int main(int argc, char** argv) {
  using bernstein::cli::RunConfig;
  CLI::App app{"bernstein_lab: curvature conditions, optimal regions, rotations and discrete checks for minimal graphs"};
  app.require_subcommand(1);
  RunConfig cfg;
  std::uint64_t seed = 0;
  std::string traceless = "true";

  auto common = [&](CLI::App* sub) {
    sub->add_option("--input", cfg.input, "JSON input file");
    sub->add_option("--out", cfg.out, "Output file (default stdout)");
    sub->add_option("--format", cfg.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--delta", cfg.delta, "TheoremA delta in (0,1)");
    sub->add_option("--kmin", cfg.k_min, "TheoremA lower bound on *Omega");
    sub->add_option("--epsilon", cfg.epsilon, "OptimalB spectral threshold");
    sub->add_option("--traceless", traceless, "Restrict h to the trace-free subspace")
        ->check(CLI::IsMember({"true", "false"}));
    sub->add_option("--grid", cfg.grid, "region: lo:hi:steps,...   verify: N[,N2,...]");
    sub->add_option("--budget", cfg.budget, "rotate: evaluation budget");
    sub->add_option("--seed", seed, "rotate: RNG seed (required)");
    sub->add_option("--surface", cfg.surface, "Built-in surface name");
    sub->add_option("--identity", cfg.identity, "gradient, laplacian-log, laplacian-raw or minimality");
    sub->add_option("--conditions", cfg.conditions, "Comma-separated condition names or 'all'");
    sub->add_option("--matrix", cfg.matrix, "Inline matrix, rows separated by ';'");
    sub->add_option("--point", cfg.points, "Sample point 'x1,x2,...' (repeatable)");
    sub->add_option("--n", cfg.n, "region: domain dimension");
    sub->add_option("--m", cfg.m, "region: target dimension");
    sub->add_option("--target", cfg.target, "rotate: TheoremA or OptimalB");
    sub->add_option("--group", cfg.group, "rotate: orthogonal or unitary");
    sub->add_option("--nodes", cfg.nodes, "verify: per-node CSV output path");
    sub->add_option("--threads", cfg.threads, "region: worker threads (0 = hardware)");
  };
  for (const char* name : {"check", "region", "rotate", "verify"}) common(app.add_subcommand(name));
  app.get_subcommand("check")->description("Evaluate flatness conditions at Jacobians or surface points");
  app.get_subcommand("region")->description("Scan the optimal region over a lambda grid");
  app.get_subcommand("rotate")->description("Search for a rotation improving a condition margin");
  app.get_subcommand("verify")->description("Check the curvature identities on a sampled surface");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : bernstein::cli::kExitError;
  }
  CLI::App* sub = app.get_subcommands().front();
  cfg.subcommand = sub->get_name();
  cfg.traceless = traceless == "true";
  if (sub->count("--seed") > 0) cfg.seed = seed;

  const auto res = bernstein::cli::run(cfg);
  if (res.exit_code == bernstein::cli::kExitError) {
    std::cerr << "error: " << res.error << "\n";
    return res.exit_code;
  }
  if (cfg.out.empty()) {
    std::cout << res.output;
  } else if (!write_file(cfg.out, res.output)) {
    std::cerr << "error: cannot write '" << cfg.out << "'\n";
    return bernstein::cli::kExitError;
  }
  if (!cfg.nodes.empty() && !write_file(cfg.nodes, res.nodes_csv)) {
    std::cerr << "error: cannot write '" << cfg.nodes << "'\n";
    return bernstein::cli::kExitError;
  }
  return res.exit_code;
}
