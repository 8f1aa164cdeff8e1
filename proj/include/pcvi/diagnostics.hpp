#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "pcvi/core.hpp"

namespace pcvi::diagnostics {

/// Lower bound on the relaxation ratio of the direct-rho family:
/// (1 - nu) / (1 + nu^2).
double rho_lower_bound_pc1(double nu);

/// Lower bound under a perturbed projection input with ||e1|| <= mu ||x - y||:
/// (1 - nu - mu) / (1 + nu^2 + mu^2 + 2 mu + 2 nu mu).
double rho_lower_bound_pc2(double nu, double mu);

/// Weighted average of the feasible trial points with weights rho_k beta_k
/// over records with rho > 0. Empty when no weight accumulated.
std::vector<double> ergodic_point(const std::vector<IterationRecord>& trace);

struct RateCertificate {
  long t = 0;
  double upsilon = 0.0;
  /// Right-hand side at the worst sample.
  double bound = 0.0;
  /// Most negative slack (bound - gap) over the samples; nonnegative means
  /// every sample satisfied the certificate.
  double worst_violation = 0.0;
  long samples = 0;
  bool passed = false;
};

/// Ergodic rate certificate over the first t + 1 records: for each feasible
/// sample x,
///   <F(x), y_hat_t - x> <= (||x - x0||^2 + 2 M) / (2 gamma Upsilon_t),
/// with y_hat_t the rho beta weighted average of the feasible trial points.
/// M_bound < 0 computes M from the trace as sup_k ||x^{k+1} - x|| times the
/// sum of the e2 norms (0 for unperturbed runs). When the first-slot
/// perturbations were nonzero, the certificate also charges them through
/// ||F(x)|| times their rho beta weighted norm sum, matching the perturbed
/// ergodic bound.
RateCertificate rate_certificate(const std::vector<IterationRecord>& trace,
                                 std::span<const double> x0, double gamma, double M_bound,
                                 const std::vector<std::vector<double>>& x_samples,
                                 const MapFn& F, long t = -1);

struct FejerAudit {
  bool passed = true;
  double worst = 0.0;  // most negative slack over the iteration pairs
  long worst_k = -1;
};

/// Per-iteration contraction audit toward a known solution. The inequality
/// form follows the algorithm family:
///   base (no perturbations):  r_{k+1}^2 <= r_k^2 - ((2 - gamma) / gamma) ||x^{k+1} - x^k||^2,
///   outer perturbations:      r_{k+1}^2 <= (1 + ||e2||) (r_k + n1)^2 + ((2 + gamma) / gamma) ||e2||,
///   anchored perturbations:   r_{k+1}^2 <= (r_k + n1)^2,
/// where n1 is the recorded first-slot norm (0 for the direct-update outer
/// variant, whose e1 cancels). Slack tolerance is 1e-9 (1 + ||x^k||^2).
FejerAudit fejer_audit(const std::vector<IterationRecord>& trace, std::span<const double> x0,
                       std::span<const double> x_star, double gamma, AlgorithmId algorithm);

struct MonotonicityProbe {
  double min_normalized_inner = 0.0;  // min <F(a) - F(b), a - b> / ||a - b||^2
  long pairs = 0;
  bool passed = false;
};

/// Samples feasible point pairs (gaussian draws projected onto C, scaled by
/// `spread`) and probes monotonicity of F.
MonotonicityProbe monotonicity_probe(const MapFn& F, int dim,
                                     const projections::ProjectorSpec& region, long pairs,
                                     std::uint64_t seed, double spread = 1.0, double tol = 1e-10);

}  // namespace pcvi::diagnostics
