#include "pcvi/diagnostics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "pcvi/kernels.hpp"
#include "pcvi/rng.hpp"

namespace pcvi::diagnostics {

double rho_lower_bound_pc1(double nu) {
  if (!(nu > 0.0 && nu < 1.0))
    throw std::invalid_argument("rho_lower_bound_pc1: nu must lie in (0, 1)");
  return (1.0 - nu) / (1.0 + nu * nu);
}

double rho_lower_bound_pc2(double nu, double mu) {
  if (!(nu > 0.0 && nu < 1.0))
    throw std::invalid_argument("rho_lower_bound_pc2: nu must lie in (0, 1)");
  if (mu < 0.0 || mu >= 1.0 - nu)
    throw std::invalid_argument("rho_lower_bound_pc2: mu must lie in [0, 1 - nu)");
  return (1.0 - nu - mu) / (1.0 + nu * nu + mu * mu + 2.0 * mu + 2.0 * nu * mu);
}

std::vector<double> ergodic_point(const std::vector<IterationRecord>& trace) {
  std::vector<double> acc;
  double upsilon = 0.0;
  for (const auto& rec : trace) {
    if (!(rec.rho > 0.0)) continue;
    const double w = rec.rho * rec.beta;
    if (acc.empty()) acc.assign(rec.y.size(), 0.0);
    for (std::size_t i = 0; i < rec.y.size(); ++i) acc[i] += w * rec.y[i];
    upsilon += w;
  }
  if (upsilon <= 0.0) return {};
  for (auto& v : acc) v /= upsilon;
  return acc;
}

RateCertificate rate_certificate(const std::vector<IterationRecord>& trace,
                                 std::span<const double> x0, double gamma, double M_bound,
                                 const std::vector<std::vector<double>>& x_samples,
                                 const MapFn& F, long t) {
  RateCertificate cert;
  if (trace.empty()) throw std::invalid_argument("rate_certificate: empty trace");
  const long limit = t < 0 ? static_cast<long>(trace.size()) - 1 : t;
  if (limit < 0 || limit >= static_cast<long>(trace.size()))
    throw std::invalid_argument("rate_certificate: t outside the trace");
  cert.t = limit;

  const std::size_t n = x0.size();
  std::vector<double> yhat(n, 0.0);
  double upsilon = 0.0;
  double weighted_e1 = 0.0;  // sum rho beta ||e1||
  double sum_e2 = 0.0;
  for (long k = 0; k <= limit; ++k) {
    const auto& rec = trace[static_cast<std::size_t>(k)];
    sum_e2 += rec.e2_norm;
    if (!(rec.rho > 0.0)) continue;
    const double w = rec.rho * rec.beta;
    for (std::size_t i = 0; i < n; ++i) yhat[i] += w * rec.y[i];
    upsilon += w;
    weighted_e1 += w * rec.e1_norm;
  }
  cert.upsilon = upsilon;
  if (!(upsilon > 0.0))
    throw std::invalid_argument("rate_certificate: no weight accumulated over the prefix");
  for (auto& v : yhat) v /= upsilon;

  std::vector<double> Fx(n);
  std::vector<double> diff(n);
  double worst = std::numeric_limits<double>::infinity();
  double worst_bound = 0.0;
  for (const auto& x : x_samples) {
    if (x.size() != n) throw std::invalid_argument("rate_certificate: sample dimension mismatch");
    double M = M_bound;
    if (M < 0.0) {
      double sup = 0.0;
      for (long k = 0; k <= limit; ++k)
        sup = std::max(sup, kernels::nrm2_diff(trace[static_cast<std::size_t>(k)].x, x));
      M = sup * sum_e2;
    }
    F(x, Fx);
    double lhs = 0.0;
    for (std::size_t i = 0; i < n; ++i) lhs += Fx[i] * (yhat[i] - x[i]);
    const double r0 = kernels::nrm2_diff(x, x0);
    double bound = (r0 * r0 + 2.0 * M) / (2.0 * gamma * upsilon);
    // Nonzero first-slot perturbations shift the averaged trial point; the
    // certificate charges them at ||F(x)|| per unit of weighted norm.
    if (weighted_e1 > 0.0) bound += kernels::nrm2(Fx) * weighted_e1 / upsilon;
    const double slack = bound - lhs + 1e-9 * (1.0 + std::fabs(bound));
    if (slack < worst) {
      worst = slack;
      worst_bound = bound;
    }
  }
  cert.samples = static_cast<long>(x_samples.size());
  cert.worst_violation = worst;
  cert.bound = worst_bound;
  cert.passed = x_samples.empty() || worst >= 0.0;
  return cert;
}

FejerAudit fejer_audit(const std::vector<IterationRecord>& trace, std::span<const double> x0,
                       std::span<const double> x_star, double gamma, AlgorithmId algorithm) {
  FejerAudit audit;
  enum class Form { Base, OuterQuasi, Anchored };
  Form form = Form::Base;
  switch (algorithm) {
    case AlgorithmId::PC1_OP:
    case AlgorithmId::PC2_OP:
    case AlgorithmId::IPC1_1:
    case AlgorithmId::IPC2_1:
      form = Form::OuterQuasi;
      break;
    case AlgorithmId::PC1_BP:
    case AlgorithmId::PC2_BP:
    case AlgorithmId::IPC1_2:
    case AlgorithmId::IPC2_2:
    case AlgorithmId::IPC1_R56:
      form = Form::Anchored;
      break;
    default:
      form = Form::Base;
      break;
  }
  // The direct-update outer variant's first slot cancels in the step, so the
  // exact quasi-Fejer recursion carries only e2.
  const bool e1_cancels =
      algorithm == AlgorithmId::PC1_OP || algorithm == AlgorithmId::IPC1_1;

  std::span<const double> prev = x0;
  double r_prev = kernels::nrm2_diff(prev, x_star);
  for (std::size_t k = 0; k < trace.size(); ++k) {
    const auto& rec = trace[k];
    const double r_next = kernels::nrm2_diff(rec.x, x_star);
    const double xk_norm = kernels::nrm2(prev);
    const double tol = 1e-9 * (1.0 + xk_norm * xk_norm);
    double rhs = 0.0;
    switch (form) {
      case Form::Base: {
        const double step = rec.residual;
        rhs = r_prev * r_prev - (2.0 - gamma) / gamma * step * step;
        break;
      }
      case Form::OuterQuasi: {
        const double n1 = e1_cancels ? 0.0 : rec.e1_norm;
        const double base = r_prev + n1;
        rhs = (1.0 + rec.e2_norm) * base * base + (2.0 + gamma) / gamma * rec.e2_norm;
        break;
      }
      case Form::Anchored: {
        const double base = r_prev + rec.e1_norm;
        rhs = base * base;
        break;
      }
    }
    const double slack = rhs + tol - r_next * r_next;
    if (slack < audit.worst || audit.worst_k < 0) {
      audit.worst = slack;
      audit.worst_k = rec.k;
    }
    if (slack < 0.0) audit.passed = false;
    prev = rec.x;
    r_prev = r_next;
  }
  return audit;
}

MonotonicityProbe monotonicity_probe(const MapFn& F, int dim,
                                     const projections::ProjectorSpec& region, long pairs,
                                     std::uint64_t seed, double spread, double tol) {
  if (dim <= 0) throw std::invalid_argument("monotonicity_probe: dimension must be positive");
  MonotonicityProbe probe;
  probe.pairs = pairs;
  probe.min_normalized_inner = std::numeric_limits<double>::infinity();
  rng::Stream stream(rng::substream(seed, 0x6d6f6e6f, 0));
  std::vector<double> a(static_cast<std::size_t>(dim)), b(a.size()), pa(a.size()), pb(a.size());
  std::vector<double> Fa(a.size()), Fb(a.size());
  for (long p = 0; p < pairs; ++p) {
    for (auto& v : a) v = spread * stream.gaussian();
    for (auto& v : b) v = spread * stream.gaussian();
    projections::project(region, a, pa);
    projections::project(region, b, pb);
    const double dn = kernels::nrm2_diff(pa, pb);
    if (dn < 1e-14) continue;
    F(pa, Fa);
    F(pb, Fb);
    double inner = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) inner += (Fa[i] - Fb[i]) * (pa[i] - pb[i]);
    probe.min_normalized_inner = std::min(probe.min_normalized_inner, inner / (dn * dn));
  }
  if (!std::isfinite(probe.min_normalized_inner)) probe.min_normalized_inner = 0.0;
  probe.passed = probe.min_normalized_inner >= -tol;
  return probe;
}

}  // namespace pcvi::diagnostics
