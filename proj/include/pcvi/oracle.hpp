#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "pcvi/core.hpp"

namespace pcvi::oracle {

/// Raised when an oracle fails to converge or its output fails validation.
class OracleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct OracleConfig {
  double tol = 1e-12;
  long max_iter = 10'000'000;
  double step_scale = 0.1;  ///< fixed extragradient step, as a fraction of 1/L
};

void validate(const OracleConfig& cfg);

/// Projection onto { ||x||_1 <= t } by bisection on the soft threshold theta
/// over [0, max|v_i|], run until |sum_i max(|v_i|-theta,0) - t| <= cfg.tol.
/// Deliberately shares no code with the main projection module so the two
/// can check each other.
std::vector<double> oracle_project_l1(std::span<const double> v, double t,
                                      const OracleConfig& cfg = {});

/// Brute-force VI reference: a long-horizon fixed-step extragradient run with
/// step step_scale / L, where L is the problem's Lipschitz hint (estimated
/// from random probes when the hint is absent). The candidate is accepted
/// only after Minty sampling validation, <F(z), z - x*> >= -1e-8 over 1000
/// random feasible z; a failed validation or a non-monotone probe raises
/// OracleError.
///
/// Restricted to dim <= 50: this is a test reference, not a solver.
std::vector<double> oracle_solve_vi(const VIProblem& problem, const OracleConfig& cfg = {},
                                    std::uint64_t validation_seed = 999);

}  // namespace pcvi::oracle
