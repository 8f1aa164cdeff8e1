#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pcvi/bench.hpp"
#include "pcvi/perturbations.hpp"
#include "pcvi/projections.hpp"

int main(int argc, char** argv) {
  CLI::App app{"projection-and-contraction solvers for monotone variational inequalities"};
  app.require_subcommand(1);

  auto* bench_cmd = app.add_subcommand("bench", "run a batch experiment from a JSON config");
  std::string config_path;
  bench_cmd->add_option("config", config_path, "experiment config (JSON)")->required();

  auto* solve_cmd = app.add_subcommand("solve", "run one algorithm on a preset instance");
  pcvi::bench::SingleOptions opts;
  std::string alg_str = "pc1";
  solve_cmd->add_option("--alg", alg_str, "algorithm id (eg, pc1, pc2, pc1-op, ..., ipc1-r56)");
  solve_cmd->add_option("--preset", opts.preset, "lasso-k20 | lasso-k30 | lasso-k40 | affine-n20");
  solve_cmd->add_option("--eps", opts.epsilon, "stopping tolerance on ||x_{k+1} - x_k||");
  solve_cmd->add_option("--seed", opts.seed, "instance seed");
  solve_cmd->add_option("--out", opts.output_dir, "output directory ('' disables file output)");
  solve_cmd->add_option("--gamma", opts.gamma, "relaxation factor in (0, 2)");
  solve_cmd->add_option("--nu", opts.nu, "line search contraction bound in (0, 1)");
  solve_cmd->add_option("--sigma-ls", opts.sigma_ls, "initial trial step of the line search");
  solve_cmd->add_option("--backtrack", opts.backtrack, "line search shrink factor in (0, 1)");
  solve_cmd->add_option("--alpha", opts.alpha1, "inertial target (alpha1)");
  solve_cmd->add_option("--alpha2", opts.alpha2, "second inertial target (ipc*-1 variants)");
  solve_cmd->add_option("--zeta", opts.zeta, "online inertial cap numerator (-1 disables)");
  solve_cmd->add_option("--xi", opts.xi, "online inertial cap exponent offset");
  solve_cmd->add_option("--sigma", opts.sigma_r, "constant-inertia sigma (ipc1-r56)");
  solve_cmd->add_option("--delta", opts.delta_r, "constant-inertia delta (ipc1-r56)");
  solve_cmd->add_option("--budget", opts.budget, "perturbation budget (op/bp variants)");
  solve_cmd->add_option("--max-iter", opts.max_iter, "iteration cap");

  auto* project_cmd =
      app.add_subcommand("project", "project a whitespace-separated stdin vector");
  double l1_radius = 0.0;
  project_cmd->add_option("--l1", l1_radius, "radius of the l1 ball")->required();

  auto* plot_cmd =
      app.add_subcommand("plot", "merge a bench run's series into plot/objective_series.csv");
  std::string run_dir;
  plot_cmd->add_option("dir", run_dir, "bench output directory (contains summary.csv)")
      ->required();

  auto* r56_cmd =
      app.add_subcommand("validate-r56", "check a constant-inertia (alpha, sigma, delta) triple");
  double r56_alpha = 0.0;
  double r56_sigma = 0.0;
  double r56_delta = 0.0;
  r56_cmd->add_option("--alpha", r56_alpha, "constant inertial factor")->required();
  r56_cmd->add_option("--sigma", r56_sigma, "sigma > 0")->required();
  r56_cmd->add_option("--delta", r56_delta, "delta > 0")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  if (*bench_cmd) return pcvi::bench::run_bench(config_path, std::cout, std::cerr);

  if (*solve_cmd) {
    try {
      opts.alg = pcvi::parse_algorithm(alg_str);
    } catch (const std::invalid_argument& e) {
      std::cerr << "config error: " << e.what() << "\n";
      return 1;
    }
    return pcvi::bench::run_single(opts, std::cout, std::cerr);
  }

  if (*project_cmd) {
    std::vector<double> v;
    double x = 0.0;
    while (std::cin >> x) v.push_back(x);
    if (!std::cin.eof()) {
      std::cerr << "config error: stdin must contain only numbers\n";
      return 1;
    }
    try {
      std::vector<double> out(v.size());
      pcvi::projections::project_l1_ball(v, l1_radius, out);
      for (const double value : out) std::cout << pcvi::bench::format_double(value) << "\n";
      return 0;
    } catch (const std::invalid_argument& e) {
      std::cerr << "config error: " << e.what() << "\n";
      return 1;
    } catch (const std::exception& e) {
      std::cerr << "runtime failure: " << e.what() << "\n";
      return 2;
    }
  }

  if (*plot_cmd) {
    try {
      pcvi::bench::emit_plot_series(run_dir, std::cout);
      return 0;
    } catch (const std::exception& e) {
      std::cerr << "runtime failure: " << e.what() << "\n";
      return 2;
    }
  }

  if (*r56_cmd) {
    try {
      const double gamma_max =
          pcvi::perturbations::validate_remark56(r56_alpha, r56_sigma, r56_delta);
      std::cout << "admissible, gamma_max=" << pcvi::bench::format_double(gamma_max) << "\n";
      return 0;
    } catch (const std::invalid_argument& e) {
      std::cerr << "config error: " << e.what() << "\n";
      return 1;
    }
  }

  return 0;
}
