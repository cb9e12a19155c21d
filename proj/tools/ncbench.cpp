// Experiment driver: reproduces the throughput / decoding-delay studies at
// desk scale and emits CSV/JSON for external plotting.

#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "ncomp/experiment.hpp"

namespace {

std::vector<int> parse_range(const std::string& spec) {
  // "a:b:step"
  int a = 0, b = 0, step = 1;
  char c1 = 0, c2 = 0;
  std::istringstream in(spec);
  if (!(in >> a >> c1 >> b >> c2 >> step) || c1 != ':' || c2 != ':' || step < 1)
    throw CLI::ValidationError("--n-range", "expected a:b:step with step >= 1");
  std::vector<int> ns;
  for (int n = a; n <= b; n += step) ns.push_back(n);
  return ns;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"IDNC vs RLNC broadcast coding workbench"};
  ncomp::ExperimentConfig cfg;
  std::string n_range_spec;
  std::string solver = "exact";

  app.add_option("--experiment", cfg.experiment,
                 "fig1|fig2|fig3|fig4|fig5|example1|example3|example4|"
                 "appendixC|custom")
      ->required();
  app.add_option("--kt", cfg.kt, "block size K_T");
  app.add_option("--n", cfg.n, "receiver count");
  app.add_option("--n-range", n_range_spec, "receiver range a:b:step");
  app.add_option("--pe", cfg.pe, "erasure probability");
  auto* trials_opt = app.add_option("--trials", cfg.trials, "Monte Carlo trials");
  app.add_option("--seed", cfg.seed, "master seed");
  app.add_option("--solver", solver, "exact|greedy")
      ->check(CLI::IsMember({"exact", "greedy"}));
  app.add_option("--out", cfg.out_dir, "output directory");
  app.add_option("--format", cfg.format, "csv|json|both")
      ->check(CLI::IsMember({"csv", "json", "both"}));
  app.add_option("--workers", cfg.workers, "worker threads (0 = all cores)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (!n_range_spec.empty()) cfg.n_range = parse_range(n_range_spec);
    cfg.trials_set = trials_opt->count() > 0;
    cfg.solver = solver == "greedy" ? ncomp::SolverMode::greedy
                                    : ncomp::SolverMode::exact;
    auto rep = ncomp::run_experiment(cfg);
    for (const auto& p : ncomp::emit_report(rep, cfg))
      std::cout << "wrote " << p.string() << '\n';
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
