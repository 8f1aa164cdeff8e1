#include "pcvi/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pcvi/diagnostics.hpp"
#include "pcvi/kernels.hpp"
#include "pcvi/rng.hpp"

namespace pcvi::oracle {

void validate(const OracleConfig& cfg) {
  if (!(cfg.tol > 0.0)) throw std::invalid_argument("oracle: tol must be positive");
  if (cfg.max_iter < 1) throw std::invalid_argument("oracle: max_iter must be positive");
  if (!(cfg.step_scale > 0.0 && cfg.step_scale <= 1.0))
    throw std::invalid_argument("oracle: step_scale must lie in (0, 1]");
}

std::vector<double> oracle_project_l1(std::span<const double> v, double t,
                                      const OracleConfig& cfg) {
  validate(cfg);
  if (!(t > 0.0)) throw std::invalid_argument("oracle_project_l1: t must be positive");
  std::vector<double> out(v.begin(), v.end());
  double nrm1 = 0.0;
  double vmax = 0.0;
  for (const double x : v) {
    nrm1 += std::abs(x);
    vmax = std::max(vmax, std::abs(x));
  }
  if (nrm1 <= t) return out;

  const auto excess = [&](double theta) {
    double s = 0.0;
    for (const double x : v) s += std::max(std::abs(x) - theta, 0.0);
    return s - t;
  };
  // excess is continuous, strictly decreasing until it hits -t, positive at 0;
  // bisection therefore pins the root to machine precision well inside the
  // iteration cap.
  double lo = 0.0;
  double hi = vmax;
  double theta = 0.5 * vmax;
  for (int it = 0; it < 200; ++it) {
    theta = 0.5 * (lo + hi);
    const double g = excess(theta);
    if (std::abs(g) <= cfg.tol) break;
    if (g > 0.0)
      lo = theta;
    else
      hi = theta;
    if (hi - lo <= 1e-16 * (1.0 + vmax)) break;
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double a = std::abs(v[i]) - theta;
    out[i] = a > 0.0 ? (v[i] > 0.0 ? a : -a) : 0.0;
  }
  return out;
}

std::vector<double> oracle_solve_vi(const VIProblem& problem, const OracleConfig& cfg,
                                    std::uint64_t validation_seed) {
  validate(cfg);
  if (problem.dim < 1 || problem.dim > 50)
    throw std::invalid_argument("oracle_solve_vi: dim must lie in [1, 50]");
  if (!problem.F) throw std::invalid_argument("oracle_solve_vi: mapping is required");
  const std::size_t n = static_cast<std::size_t>(problem.dim);

  const auto probe = diagnostics::monotonicity_probe(problem.F, problem.dim, problem.projector,
                                                     200, validation_seed ^ 0x5bd1e995u, 2.0);
  if (!probe.passed)
    throw OracleError("oracle_solve_vi: monotonicity probe failed (min normalized inner product " +
                      std::to_string(probe.min_normalized_inner) + ")");

  double L = problem.lipschitz_hint;
  if (!(L > 0.0)) {
    // No hint: bound the local Lipschitz constant from feasible probe pairs
    // and add headroom.
    rng::Stream s(rng::substream(validation_seed, 0x9e37u));
    std::vector<double> a(n), c(n), pa(n), pc(n), Fa(n), Fc(n);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
      a = s.gaussian_vec(n);
      c = s.gaussian_vec(n);
      for (auto& v : a) v *= 2.0;
      for (auto& v : c) v *= 2.0;
      problem.project(a, pa);
      problem.project(c, pc);
      const double dx = kernels::nrm2_diff(pa, pc);
      if (dx <= 1e-12) continue;
      problem.F(pa, Fa);
      problem.F(pc, Fc);
      worst = std::max(worst, kernels::nrm2_diff(Fa, Fc) / dx);
    }
    L = worst > 0.0 ? 2.0 * worst : 1.0;
  }
  const double beta = cfg.step_scale / L;

  // Fixed-step extragradient from P_C(0); deliberately not the
  // projection-and-contraction family so the reference stays structurally
  // independent of the code it checks.
  std::vector<double> zero(n, 0.0), x(n), y(n), Fx(n), Fy(n), arg(n), xn(n);
  problem.project(zero, x);
  bool converged = false;
  for (long k = 0; k < cfg.max_iter; ++k) {
    problem.F(x, Fx);
    for (std::size_t i = 0; i < n; ++i) arg[i] = x[i] - beta * Fx[i];
    problem.project(arg, y);
    if (kernels::nrm2_diff(x, y) <= cfg.tol * (1.0 + kernels::nrm2(x))) {
      converged = true;
      break;
    }
    problem.F(y, Fy);
    for (std::size_t i = 0; i < n; ++i) arg[i] = x[i] - beta * Fy[i];
    problem.project(arg, xn);
    std::swap(x, xn);
  }
  if (!converged)
    throw OracleError("oracle_solve_vi: no convergence within " + std::to_string(cfg.max_iter) +
                      " iterations");

  // Minty validation: a solution of a monotone VI satisfies
  // <F(z), z - x*> >= 0 for every feasible z.
  rng::Stream val(validation_seed);
  std::vector<double> z(n), Fz(n);
  for (int i = 0; i < 1000; ++i) {
    auto g = val.gaussian_vec(n);
    for (std::size_t j = 0; j < n; ++j) arg[j] = x[j] + 2.0 * g[j];
    problem.project(arg, z);
    problem.F(z, Fz);
    double inner = 0.0;
    for (std::size_t j = 0; j < n; ++j) inner += Fz[j] * (z[j] - x[j]);
    if (inner < -1e-8)
      throw OracleError("oracle_solve_vi: Minty validation failed at sample " + std::to_string(i) +
                        " (inner product " + std::to_string(inner) + ")");
  }
  return x;
}

}  // namespace pcvi::oracle
