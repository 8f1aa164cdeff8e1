#pragma once

#include <algorithm>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "pcvi/perturbations.hpp"
#include "pcvi/projections.hpp"

namespace pcvi {

/// out := F(x). Output span is preallocated to the problem dimension.
using MapFn = std::function<void(std::span<const double>, std::span<double>)>;
/// Optional objective value associated with the problem (reporting only).
using ObjectiveFn = std::function<double(std::span<const double>)>;

/// Monotone variational inequality: find x* in C with <F(x*), x - x*> >= 0
/// for all x in C.
struct VIProblem {
  int dim = 0;
  MapFn F;
  projections::ProjectorSpec projector;
  /// Spectral bound on the Jacobian of F when known; 0 means unknown.
  double lipschitz_hint = 0.0;
  ObjectiveFn objective;

  void project(std::span<const double> v, std::span<double> out) const {
    projections::project(projector, v, out);
  }
  bool contains(std::span<const double> x, double tol) const {
    return projections::contains(projector, x, tol);
  }
};

VIProblem make_problem(int dim, MapFn F, projections::ProjectorSpec projector,
                       double lipschitz_hint = 0.0, ObjectiveFn objective = {});

enum class AlgorithmId {
  EG,        // extragradient
  PC1,       // projection-contraction, direct update
  PC2,       // projection-contraction, projected update
  PC1_OP,    // PC1 with summable outer perturbations
  PC2_OP,    // PC2 with perturbed projection input
  PC1_BP,    // PC1 with bounded perturbations ahead of the step
  PC2_BP,    // PC2 with bounded perturbations ahead of the step
  IPC1_1,    // inertial PC1, perturbation form
  IPC2_1,    // inertial PC2, perturbation form
  IPC1_2,    // inertial PC1, extrapolation form
  IPC2_2,    // inertial PC2, extrapolation form
  IPC1_R56,  // inertial PC1, constant extrapolation factor with admissibility caps
};

const char* to_string(AlgorithmId id);
AlgorithmId parse_algorithm(const std::string& s);
/// All stable algorithm ids, in presentation order.
const std::vector<AlgorithmId>& all_algorithms();

/// True for the variants whose relaxation factor rho is the PC1-form ratio,
/// i.e. every family member except the perturbed-projection PC2 variants.
bool uses_pc1_rho_bound(AlgorithmId id);

enum class SolveStatus {
  Converged,      // ||x^{k+1} - x^k|| <= epsilon
  MaxIterations,  // iteration cap reached
  DegenerateStep, // ||d|| vanished while x was not a certified fixed point
  AuditFailure,   // a runtime invariant audit failed on the finished trace
};

const char* to_string(SolveStatus s);

/// Thrown when a nonfinite value surfaces mid-iteration; carries the step
/// index for diagnostics.
struct NumericalError : std::runtime_error {
  long k = -1;
  NumericalError(const std::string& msg, long k_)
      : std::runtime_error(msg + " (iteration " + std::to_string(k_) + ")"), k(k_) {}
};

struct SolverConfig {
  double epsilon = 1e-6;
  long max_iter = 100000;
  /// Relaxation factor gamma in (0, 2).
  double gamma = 1.0;
  /// Line search acceptance factor nu in (0, 1).
  double nu = 0.7;
  /// Initial trial step sigma_ls > 0.
  double sigma_ls = 5.0;
  /// Geometric backtracking factor in (0, 1).
  double backtrack = 0.9;
  int max_backtracks = 100;
  /// Perturbed-projection clip bound; negative selects 0.99 * min(nu, 1 - nu).
  double mu = -1.0;
  /// Below this, ||x - y|| certifies a fixed point; 0 selects 1e-14 * (1 + ||x||).
  double degenerate_tol = 0.0;
  /// Run invariant audits over the finished trace.
  bool audit = true;
  bool record_trace = true;

  double effective_mu() const { return mu < 0.0 ? 0.99 * std::min(nu, 1.0 - nu) : mu; }
};

/// Validates config ranges and algorithm/schedule compatibility; throws
/// std::invalid_argument with a diagnostic on violation.
void validate_config(const SolverConfig& cfg, AlgorithmId alg,
                     const perturbations::PerturbationSchedule& schedule);

struct IterationRecord {
  long k = 0;
  std::vector<double> x;  // iterate produced by this step
  std::vector<double> y;  // feasible trial point of this step
  double beta = 0.0;
  double rho = 0.0;
  double alpha = 0.0;     // effective inertial factor, 0 when unused
  double residual = 0.0;  // ||x^{k+1} - x^k||
  double e1_norm = 0.0;   // ||e1||, lambda * ||v||, or alpha * ||x^k - x^{k-1}||
  double e2_norm = 0.0;
  double wall_ms = 0.0;
};

void to_json(nlohmann::json& j, const IterationRecord& r);

struct AuditResult {
  std::string name;
  bool passed = true;
  double worst = 0.0;  // most negative slack observed
  long worst_k = -1;
};

void to_json(nlohmann::json& j, const AuditResult& a);

struct SolveReport {
  SolveStatus status = SolveStatus::MaxIterations;
  std::string algorithm;
  long iterations = 0;
  std::vector<double> x0;
  std::vector<double> final_x;
  double final_residual = std::numeric_limits<double>::infinity();
  /// Weighted average of the feasible trial points with weights rho_k beta_k;
  /// empty when no weight accumulated.
  std::vector<double> ergodic_x;
  /// (1/Upsilon) sum_k rho_k beta_k e1^k, tracked for the perturbation-aware
  /// ergodic bound; empty when every e1 was zero.
  std::vector<double> ergodic_e1_offset;
  double upsilon = 0.0;      // sum_k rho_k beta_k
  double min_rho = std::numeric_limits<double>::infinity();
  double sum_e1_norm = 0.0;  // series of first-slot perturbation norms
  double sum_e2_norm = 0.0;
  double sum_rho_beta_e1 = 0.0;  // sum_k rho_k beta_k ||e1^k||
  /// Ergodic gap bound (||final_x - x0||^2 + 2M) / (2 gamma Upsilon) anchored
  /// at the final iterate; 0 when Upsilon is 0.
  double rate_bound = 0.0;
  std::vector<AuditResult> audits;
  std::vector<IterationRecord> trace;
  double wall_ms = 0.0;

  bool audits_passed() const;
};

void to_json(nlohmann::json& j, const SolveReport& r);

/// Natural residual ||x - P_C(x - beta F(x))|| at a fixed probe step beta.
double residual(const VIProblem& problem, std::span<const double> x, double beta);

/// Runs the selected algorithm from x0 until ||x^{k+1} - x^k|| <= epsilon or
/// a cap/degeneracy fires. The schedule supplies outer, bounded, or inertial
/// perturbation data; pass kind None for the base algorithms.
SolveReport solve(const VIProblem& problem, AlgorithmId algorithm, const SolverConfig& cfg,
                  const perturbations::PerturbationSchedule& schedule,
                  std::span<const double> x0);

}  // namespace pcvi
