#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "pcvi/core.hpp"

namespace pcvi::linesearch {

struct LineSearchParams {
  double nu = 0.7;          // acceptance factor in (0, 1)
  double sigma = 5.0;       // initial trial step, beta(0) = sigma
  double backtrack = 0.9;   // geometric grid factor in (0, 1)
  int max_backtracks = 100; // largest admissible exponent

  static LineSearchParams from_config(const SolverConfig& cfg) {
    return {cfg.nu, cfg.sigma_ls, cfg.backtrack, cfg.max_backtracks};
  }
};

void validate(const LineSearchParams& p);

/// Thrown when no exponent within max_backtracks satisfies the acceptance
/// condition.
struct LineSearchError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct LineSearchResult {
  double beta = 0.0;
  std::vector<double> y;   // P_C(w - beta F(w) + e1) at the accepted beta
  std::vector<double> Fy;  // F at the accepted y
  double dist = 0.0;       // ||w - y|| at the accepted beta
  /// Accepted exponent m with beta = sigma * backtrack^m; reported negated
  /// when the step is degenerate (the sign carries no information at m = 0,
  /// so the flag below is authoritative).
  int trials = 0;
  /// ||w - y|| fell to or below degenerate_tol at the accepted trial, which
  /// certifies w as a fixed point of the projected step.
  bool degenerate = false;
  int evals = 0;           // acceptance-condition evaluations performed
};

/// Backtracking step rule: on the grid beta(m) = sigma * backtrack^m, find a
/// boundary exponent whose trial satisfies
///   beta ||F(w) - F(y)|| <= nu ||w - y||,   y = P_C(w - beta F(w) + e1),
/// while the trial at m - 1 fails (or m = 0). Acceptance is monotone in m on
/// the problem families shipped here, making the boundary the largest passing
/// beta; the gallop/bisection locator returns it in O(log m) evaluations and
/// a warm hint from the previous iteration cuts steady-state cost to two or
/// three evaluations without changing the result.
///
/// e1 is an optional offset added inside the projection argument; pass an
/// empty span for none. The offset is held fixed while beta varies.
LineSearchResult backtrack_beta(const VIProblem& problem, std::span<const double> w,
                                std::span<const double> Fw, const LineSearchParams& params,
                                double degenerate_tol, std::span<const double> e1 = {},
                                int hint = -1);

/// Convenience overload evaluating F(w) internally.
LineSearchResult backtrack_beta(const VIProblem& problem, std::span<const double> w,
                                const LineSearchParams& params);

}  // namespace pcvi::linesearch
