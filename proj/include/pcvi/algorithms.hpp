#pragma once

#include <span>
#include <vector>

#include "pcvi/core.hpp"

namespace pcvi::algorithms {

/// Mutable iteration state threaded through the step operations.
struct StepState {
  std::vector<double> x;
  std::vector<double> x_prev;  // empty until a step has completed
  long k = 0;
  int ls_hint = -1;  // accepted backtrack exponent of the previous step

  static StepState from(std::span<const double> x0) {
    StepState s;
    s.x.assign(x0.begin(), x0.end());
    return s;
  }
};

struct StepResult {
  IterationRecord rec;
  /// The line search certified ||x - y|| <= degenerate_tol: x is a fixed
  /// point of the projected step, hence a solution. State is left unchanged.
  bool fixed_point = false;
  /// ||d|| vanished while ||x - y|| did not; no certified conclusion. State
  /// is left unchanged.
  bool degenerate_d = false;
  int ls_evals = 0;
};

// Each step advances state (x_prev, x, k, line-search hint) and returns the
// iteration record with x, y, beta, rho, alpha, perturbation norms, and
// residual filled in. Fixed-point and degenerate outcomes leave x in place.

/// Extragradient: y from the step rule, then x' = P_C(x - beta F(y)).
StepResult eg_step(StepState& st, const VIProblem& problem, const SolverConfig& cfg);

/// Projection-contraction, direct update: x' = x - gamma rho d with
/// d = (x - y) - beta (F(x) - F(y)) and rho = <x - y, d> / ||d||^2.
StepResult pc1_step(StepState& st, const VIProblem& problem, const SolverConfig& cfg);

/// Projection-contraction, projected update: x' = P_C(x - gamma rho beta F(y)).
StepResult pc2_step(StepState& st, const VIProblem& problem, const SolverConfig& cfg);

/// pc1_step with outer perturbations. e1 offsets the trial point after the
/// projection, so it cancels identically in d and rho and the recorded y
/// stays the feasible projected point; only its norm is recorded, and the
/// caller folds the offset into the ergodic accounting. e2 is added to the
/// update. Empty spans mean exact zeros.
StepResult pc1_op_step(StepState& st, const VIProblem& problem, const SolverConfig& cfg,
                       std::span<const double> e1, std::span<const double> e2);

/// pc2_step with e1 added inside the projection argument and e2 added to the
/// projected update's argument. e1 is rescaled when ||e1|| > mu ||x - y||, so
/// the recorded perturbation always satisfies the clip bound.
StepResult pc2_op_step(StepState& st, const VIProblem& problem, const SolverConfig& cfg,
                       std::span<const double> e1, std::span<const double> e2);

/// pc1_step anchored at w = x + lambda v.
StepResult pc1_bp_step(StepState& st, const VIProblem& problem, const SolverConfig& cfg,
                       double lambda, std::span<const double> v);

/// pc2_step anchored at w = x + lambda v.
StepResult pc2_bp_step(StepState& st, const VIProblem& problem, const SolverConfig& cfg,
                       double lambda, std::span<const double> v);

/// pc1_op_step with e1 = alpha1 (x - x_prev), e2 = alpha2 (x - x_prev).
StepResult ipc1_1_step(StepState& st, const VIProblem& problem, const SolverConfig& cfg,
                       double alpha1, double alpha2);

/// pc2_op_step with e1 = alpha1 (x - x_prev), e2 = alpha2 (x - x_prev); the
/// clip on e1 uses the inertial guard bound mu < nu and the effective alpha1
/// is recorded.
StepResult ipc2_1_step(StepState& st, const VIProblem& problem, const SolverConfig& cfg,
                       double alpha1, double alpha2);

/// pc1_bp_step with lambda v = alpha (x - x_prev).
StepResult ipc1_2_step(StepState& st, const VIProblem& problem, const SolverConfig& cfg,
                       double alpha);

/// pc2_bp_step with lambda v = alpha (x - x_prev).
StepResult ipc2_2_step(StepState& st, const VIProblem& problem, const SolverConfig& cfg,
                       double alpha);

/// ipc1_2_step with a constant factor (0 on the first step). The triple
/// (alpha_const, sigma_r, delta_r) must be admissible and cfg.gamma must not
/// exceed the returned bound; violations throw std::invalid_argument.
StepResult ipc1_remark56_step(StepState& st, const VIProblem& problem, const SolverConfig& cfg,
                              double alpha_const, double sigma_r, double delta_r);

}  // namespace pcvi::algorithms
