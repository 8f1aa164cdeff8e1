#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace pcvi::perturbations {

enum class ScheduleKind { None, Outer, Bounded, Inertial };

const char* to_string(ScheduleKind k);
ScheduleKind parse_schedule_kind(const std::string& s);

/// Perturbation data source for a solve. Outer and Bounded draws are pure
/// functions of (seed, k), so replays and parallel sweeps see identical
/// vectors.
struct PerturbationSchedule {
  ScheduleKind kind = ScheduleKind::None;
  std::uint64_t seed = 0;
  /// Outer: per-series norm budget (series of ||e_i^k|| sums to at most this).
  /// Bounded: scale c of lambda_k = c / (k+1)^2.
  double budget = 1.0;
  /// Inertial targets. alpha1 doubles as the single extrapolation factor for
  /// the one-factor variants and as the constant factor of the capped variant.
  double alpha1 = 0.0;
  double alpha2 = 0.0;
  /// Online cap scale; negative selects the matching alpha target.
  double zeta = -1.0;
  /// Online cap decay exponent: the cap is zeta / (k^(1+xi) ||x^k - x^{k-1}||).
  double xi = 1.0;
  /// Admissibility pair for the constant-factor inertial variant.
  double sigma_r = 0.0;
  double delta_r = 0.0;

  double zeta_for(double alpha_target) const { return zeta < 0.0 ? alpha_target : zeta; }
};

/// Norm cap of each outer perturbation at iteration k: budget * 6 / (pi^2 (k+1)^2).
/// The caps sum to the budget over all k.
double outer_cap(double budget, long k);

struct OuterPair {
  std::vector<double> e1, e2;  // ||e_i|| equals the cap; directions are seeded sphere draws
};

/// Outer perturbation pair for iteration k.
OuterPair outer_at(const PerturbationSchedule& s, long k, int dim);

/// lambda_k = c / (k+1)^2; partial sums stay below c * pi^2 / 6.
double bounded_lambda(double c, long k);

struct BoundedPerturbation {
  double lambda = 0.0;
  std::vector<double> v;  // unit-norm seeded direction
};

/// Bounded perturbation for iteration k.
BoundedPerturbation bounded_at(const PerturbationSchedule& s, long k, int dim);

/// Online inertial factor: min(alpha_target, zeta / (k^(1+xi) delta_norm)).
/// Returns alpha_target when delta_norm is 0 or k < 1. The capped branch makes
/// alpha_k * delta_norm summable regardless of how the iterates behave.
double inertial_alpha(long k, double alpha_target, double delta_norm, double zeta, double xi);

/// Admissibility of (alpha, sigma_r, delta_r) for the constant-factor inertial
/// variant. Returns the gamma upper bound
///   2 [delta (1 - alpha^2) - alpha (1 + alpha) - alpha sigma]
///   / (delta [1 + alpha (1 + alpha) + alpha delta + sigma]),
/// throwing std::invalid_argument when the delta inequality fails or the bound
/// is nonpositive. The bound never exceeds 2.
double validate_remark56(double alpha, double sigma_r, double delta_r);

}  // namespace pcvi::perturbations
