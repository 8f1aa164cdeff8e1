#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "pcvi/core.hpp"
#include "pcvi/perturbations.hpp"
#include "pcvi/problems.hpp"

namespace pcvi::bench {

inline constexpr const char* kVersion = "0.3.0";

/// Raised for malformed or inconsistent experiment configs; the message names
/// the offending field.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One algorithm cell of an experiment: id plus fully resolved solver and
/// schedule parameters.
struct AlgorithmSpec {
  AlgorithmId id = AlgorithmId::PC1;
  SolverConfig solver{};
  perturbations::PerturbationSchedule schedule{};
};

/// Fully resolved batch description: the cross product of K, noise, epsilon,
/// seed and algorithm defines the run cells.
struct ExperimentConfig {
  int m = 240;
  int n = 1024;
  std::vector<int> K = {20};
  std::vector<double> noise_beta = {0.0};
  problems::LassoOptions lasso_options{};
  std::vector<std::uint64_t> seeds = {1};
  std::vector<AlgorithmSpec> algorithms{};
  std::vector<double> epsilon = {1e-6};
  std::string output_dir = "pcvi-out";
  bool audit = true;
  bool write_series = true;
};

/// Applies the benchmark parameter block for an algorithm id: gamma = 1,
/// nu = 0.7, sigma_ls = 5, backtrack = 0.9, inertial targets 0.4 for the -1
/// variants and 0.8 for the -2 variants, the admissible (alpha, sigma, delta)
/// triple (0.2, 0.01, 1.8) for ipc1-r56, unit perturbation budgets, and the
/// online inertial cap with zeta = 1e6, xi = 1.
AlgorithmSpec preset_algorithm(AlgorithmId id);

/// Strict parser; unknown algorithm ids, empty lists and out-of-range values
/// raise ConfigError naming the field.
ExperimentConfig parse_experiment_config(const nlohmann::json& j);
ExperimentConfig load_experiment_config(const std::string& path);

/// Round-trip of the resolved config, written into the manifest.
nlohmann::json resolved_config_json(const ExperimentConfig& cfg);

/// One summary.csv row.
struct SummaryRow {
  std::string run_id;
  std::string algorithm;
  int K = 0;
  double noise_beta = 0.0;
  double epsilon = 0.0;
  std::uint64_t seed = 0;
  long iters = 0;
  double obj_final = 0.0;
  double err_final = 0.0;
  double wall_ms = 0.0;
  std::string status;
  double min_rho = 0.0;
  bool audits_passed = false;
};

inline constexpr const char* kSummaryHeader =
    "run_id,algorithm,K,noise_beta,epsilon,seed,iters,obj_final,err_final,wall_ms,status,min_rho,"
    "audits_passed";

struct ExperimentResult {
  std::vector<SummaryRow> rows;
  std::string summary_path;  ///< empty when output_dir was empty
};

/// Shortest round-trip decimal rendering, used for every float column.
std::string format_double(double v);

std::string summary_row_csv(const SummaryRow& row);

/// Runs the full grid. With a nonempty output_dir writes summary.csv,
/// series/<run_id>.csv per run and manifest.json; with an empty one only
/// returns the rows. Solver blow-ups are recorded in the row status and do
/// not abort the batch. log, when given, receives one line per run.
ExperimentResult run_experiment(const ExperimentConfig& cfg, std::ostream* log = nullptr);

/// exit codes: 0 ok, 1 config error, 2 runtime failure
int run_bench(const std::string& config_path, std::ostream& out, std::ostream& err);

struct SingleOptions {
  std::string preset = "lasso-k20";  ///< lasso-k20 / lasso-k30 / lasso-k40 / affine-n20
  AlgorithmId alg = AlgorithmId::PC1;
  double epsilon = 1e-6;
  std::uint64_t seed = 1;
  std::string output_dir = "pcvi-out";
  // Negative values keep the preset's setting.
  double gamma = -1.0;
  double nu = -1.0;
  double sigma_ls = -1.0;
  double backtrack = -1.0;
  double alpha1 = -1.0;
  double alpha2 = -1.0;
  double zeta = -2.0;  ///< -1 is a meaningful value (no online cap), so -2 keeps the preset
  double xi = -1.0;
  double sigma_r = -1.0;
  double delta_r = -1.0;
  double budget = -1.0;
  long max_iter = -1;
};

/// Solves one (preset, algorithm) cell, prints the summary header and row to
/// out, writes the series file when output_dir is nonempty.
int run_single(const SingleOptions& opts, std::ostream& out, std::ostream& err);

/// Merges the per-run objective series of a finished benchmark directory into
/// <run_dir>/plot/objective_series.csv with columns algorithm,k,objective.
/// Runs without an objective column are skipped with a notice on log.
void emit_plot_series(const std::string& run_dir, std::ostream& log);

}  // namespace pcvi::bench
