#include "pcvi/perturbations.hpp"

#include <cmath>
#include <stdexcept>

#include "pcvi/rng.hpp"

namespace pcvi::perturbations {

namespace {
constexpr double kPi = 3.14159265358979323846264338328;
}

const char* to_string(ScheduleKind k) {
  switch (k) {
    case ScheduleKind::None: return "none";
    case ScheduleKind::Outer: return "outer";
    case ScheduleKind::Bounded: return "bounded";
    case ScheduleKind::Inertial: return "inertial";
  }
  return "unknown";
}

ScheduleKind parse_schedule_kind(const std::string& s) {
  if (s == "none") return ScheduleKind::None;
  if (s == "outer") return ScheduleKind::Outer;
  if (s == "bounded") return ScheduleKind::Bounded;
  if (s == "inertial") return ScheduleKind::Inertial;
  throw std::invalid_argument("unknown schedule kind: " + s);
}

double outer_cap(double budget, long k) {
  if (budget < 0.0) throw std::invalid_argument("outer_cap: budget must be nonnegative");
  if (k < 0) throw std::invalid_argument("outer_cap: k must be nonnegative");
  const double kk = static_cast<double>(k + 1);
  return budget * 6.0 / (kPi * kPi * kk * kk);
}

OuterPair outer_at(const PerturbationSchedule& s, long k, int dim) {
  if (dim <= 0) throw std::invalid_argument("outer_at: dimension must be positive");
  OuterPair p;
  const double cap = outer_cap(s.budget, k);
  if (cap == 0.0) return p;  // empty vectors mean exact zeros
  for (int slot = 0; slot < 2; ++slot) {
    rng::Stream stream(rng::substream(s.seed, static_cast<std::uint64_t>(k),
                                      static_cast<std::uint64_t>(slot)));
    auto e = stream.sphere(static_cast<std::size_t>(dim));
    for (auto& c : e) c *= cap;
    (slot == 0 ? p.e1 : p.e2) = std::move(e);
  }
  return p;
}

double bounded_lambda(double c, long k) {
  if (c < 0.0) throw std::invalid_argument("bounded_lambda: scale must be nonnegative");
  if (k < 0) throw std::invalid_argument("bounded_lambda: k must be nonnegative");
  const double kk = static_cast<double>(k + 1);
  return c / (kk * kk);
}

BoundedPerturbation bounded_at(const PerturbationSchedule& s, long k, int dim) {
  if (dim <= 0) throw std::invalid_argument("bounded_at: dimension must be positive");
  BoundedPerturbation p;
  p.lambda = bounded_lambda(s.budget, k);
  if (p.lambda == 0.0) return p;
  rng::Stream stream(rng::substream(s.seed, static_cast<std::uint64_t>(k), 7));
  p.v = stream.sphere(static_cast<std::size_t>(dim));
  return p;
}

double inertial_alpha(long k, double alpha_target, double delta_norm, double zeta, double xi) {
  if (alpha_target < 0.0 || alpha_target >= 1.0)
    throw std::invalid_argument("inertial_alpha: target must lie in [0, 1)");
  if (zeta < 0.0) throw std::invalid_argument("inertial_alpha: zeta must be nonnegative");
  if (k < 1 || delta_norm == 0.0) return alpha_target;
  const double cap = zeta / (std::pow(static_cast<double>(k), 1.0 + xi) * delta_norm);
  return std::min(alpha_target, cap);
}

double validate_remark56(double alpha, double sigma_r, double delta_r) {
  if (alpha < 0.0 || alpha >= 1.0)
    throw std::invalid_argument("validate_remark56: alpha must lie in [0, 1)");
  if (!(sigma_r > 0.0)) throw std::invalid_argument("validate_remark56: sigma must be positive");
  if (!(delta_r > 0.0)) throw std::invalid_argument("validate_remark56: delta must be positive");
  const double one_m_a2 = 1.0 - alpha * alpha;
  if (!(delta_r * one_m_a2 > alpha * alpha * (1.0 + alpha) + alpha * sigma_r))
    throw std::invalid_argument(
        "validate_remark56: delta must exceed (alpha^2 (1 + alpha) + alpha sigma) / (1 - alpha^2)");
  const double numer = 2.0 * (delta_r * one_m_a2 - alpha * (1.0 + alpha) - alpha * sigma_r);
  const double denom =
      delta_r * (1.0 + alpha * (1.0 + alpha) + alpha * delta_r + sigma_r);
  const double gamma_max = numer / denom;
  if (!(gamma_max > 0.0))
    throw std::invalid_argument(
        "validate_remark56: gamma bound is nonpositive; increase delta or decrease alpha/sigma");
  return gamma_max;
}

}  // namespace pcvi::perturbations
