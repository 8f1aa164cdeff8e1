#include "pcvi/algorithms.hpp"

#include <cassert>
#include <cmath>
#include <cstdlib>

#include "pcvi/kernels.hpp"
#include "pcvi/linesearch.hpp"

namespace pcvi::algorithms {

namespace {

double auto_degenerate_tol(const SolverConfig& cfg, std::span<const double> w) {
  return cfg.degenerate_tol > 0.0 ? cfg.degenerate_tol : 1e-14 * (1.0 + kernels::nrm2(w));
}

void check_finite(std::span<const double> v, const char* what, long k) {
  for (const double x : v)
    if (!std::isfinite(x)) throw NumericalError(std::string(what) + " is not finite", k);
}

void advance(StepState& st, std::vector<double>&& x_next) {
  st.x_prev = st.x;
  st.x = std::move(x_next);
  ++st.k;
}

/// Fills the parts of the record shared by every outcome and handles the two
/// degenerate exits. Returns true when the step is finished.
bool finish_if_degenerate(StepState& st, StepResult& out, linesearch::LineSearchResult& ls,
                          bool d_degenerate) {
  if (!ls.degenerate && !d_degenerate) return false;
  out.fixed_point = ls.degenerate;
  out.degenerate_d = !ls.degenerate && d_degenerate;
  out.rec.y = std::move(ls.y);
  out.rec.rho = 0.0;
  out.rec.x = st.x;
  out.rec.residual = 0.0;
  advance(st, std::vector<double>(st.x));
  return true;
}

/// Direct-update family. The anchor is x + shift (shift empty for the base
/// algorithm), e2 is added to the update, and rec_* values are pass-through
/// bookkeeping for the caller's perturbation choice.
StepResult pc1_family(StepState& st, const VIProblem& prob, const SolverConfig& cfg,
                      std::span<const double> shift, std::span<const double> e2,
                      double rec_alpha, double rec_e1_norm, double rec_e2_norm) {
  const std::size_t n = st.x.size();
  assert(n == static_cast<std::size_t>(prob.dim));
  std::vector<double> w_buf;
  std::span<const double> w = st.x;
  if (!shift.empty()) {
    w_buf.resize(n);
    for (std::size_t i = 0; i < n; ++i) w_buf[i] = st.x[i] + shift[i];
    w = w_buf;
  }
  std::vector<double> Fw(n);
  prob.F(w, Fw);
  check_finite(Fw, "F(x)", st.k);
  const double dtol = auto_degenerate_tol(cfg, w);
  auto ls = linesearch::backtrack_beta(prob, w, Fw, linesearch::LineSearchParams::from_config(cfg),
                                       dtol, {}, st.ls_hint);
  st.ls_hint = std::abs(ls.trials);

  StepResult out;
  out.ls_evals = ls.evals;
  out.rec.k = st.k;
  out.rec.beta = ls.beta;
  out.rec.alpha = rec_alpha;
  out.rec.e1_norm = rec_e1_norm;
  out.rec.e2_norm = rec_e2_norm;
  if (finish_if_degenerate(st, out, ls, false)) return out;

  std::vector<double> d(n);
  double phi = 0.0;
  double dd = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double u = w[i] - ls.y[i];
    const double di = u - ls.beta * (Fw[i] - ls.Fy[i]);
    d[i] = di;
    phi += u * di;
    dd += di * di;
  }
  if (std::sqrt(dd) <= dtol) {
    if (finish_if_degenerate(st, out, ls, true)) return out;
  }
  const double rho = phi / dd;
  if (!std::isfinite(rho)) throw NumericalError("rho is not finite", st.k);
  out.rec.rho = rho;

  std::vector<double> xn(n);
  const double step = cfg.gamma * rho;
  for (std::size_t i = 0; i < n; ++i) xn[i] = w[i] - step * d[i];
  if (!e2.empty())
    for (std::size_t i = 0; i < n; ++i) xn[i] += e2[i];
  check_finite(xn, "iterate", st.k);
  out.rec.residual = kernels::nrm2_diff(xn, st.x);
  out.rec.y = std::move(ls.y);
  out.rec.x = xn;
  advance(st, std::move(xn));
  return out;
}

/// Projected-update family. e1 is added inside the projection argument and,
/// when clip_mu >= 0, rescaled until ||e1|| <= clip_mu ||x - y|| holds at the
/// accepted trial; the applied scale is folded into the recorded alpha.
StepResult pc2_family(StepState& st, const VIProblem& prob, const SolverConfig& cfg,
                      std::span<const double> shift, std::span<const double> e1_in,
                      double clip_mu, std::span<const double> e2, double rec_alpha) {
  const std::size_t n = st.x.size();
  assert(n == static_cast<std::size_t>(prob.dim));
  std::vector<double> w_buf;
  std::span<const double> w = st.x;
  if (!shift.empty()) {
    w_buf.resize(n);
    for (std::size_t i = 0; i < n; ++i) w_buf[i] = st.x[i] + shift[i];
    w = w_buf;
  }
  std::vector<double> Fw(n);
  prob.F(w, Fw);
  check_finite(Fw, "F(x)", st.k);
  const double dtol = auto_degenerate_tol(cfg, w);
  const auto params = linesearch::LineSearchParams::from_config(cfg);

  std::vector<double> e1(e1_in.begin(), e1_in.end());
  double alpha_scale = 1.0;
  linesearch::LineSearchResult ls;
  int rounds = 0;
  while (true) {
    ls = linesearch::backtrack_beta(prob, w, Fw, params, dtol,
                                    e1.empty() ? std::span<const double>{} : e1, st.ls_hint);
    if (e1.empty()) break;
    const double e1n = kernels::nrm2(e1);
    const double bound = clip_mu * ls.dist;
    if (e1n <= bound * (1.0 + 1e-12)) break;
    if (ls.degenerate || !(bound > 0.0) || rounds >= 20) {
      // No admissible perturbation of this shape here; drop it and rerun.
      alpha_scale = 0.0;
      e1.clear();
      continue;
    }
    const double s = (bound / e1n) * (1.0 - 1e-9);
    alpha_scale *= s;
    kernels::scal(s, e1);
    ++rounds;
  }
  st.ls_hint = std::abs(ls.trials);

  StepResult out;
  out.ls_evals = ls.evals;
  out.rec.k = st.k;
  out.rec.beta = ls.beta;
  out.rec.alpha = rec_alpha * alpha_scale;
  out.rec.e1_norm = e1.empty() ? 0.0 : kernels::nrm2(e1);
  out.rec.e2_norm = e2.empty() ? 0.0 : kernels::nrm2(e2);
  if (finish_if_degenerate(st, out, ls, false)) return out;

  std::vector<double> d(n);
  double phi = 0.0;
  double dd = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double u = w[i] - ls.y[i];
    double di = u - ls.beta * (Fw[i] - ls.Fy[i]);
    if (!e1.empty()) di += e1[i];
    d[i] = di;
    phi += u * di;
    dd += di * di;
  }
  if (std::sqrt(dd) <= dtol) {
    if (finish_if_degenerate(st, out, ls, true)) return out;
  }
  const double rho = phi / dd;
  if (!std::isfinite(rho)) throw NumericalError("rho is not finite", st.k);
  out.rec.rho = rho;

  std::vector<double> arg(n);
  const double step = cfg.gamma * rho * ls.beta;
  for (std::size_t i = 0; i < n; ++i) arg[i] = w[i] - step * ls.Fy[i];
  if (!e2.empty())
    for (std::size_t i = 0; i < n; ++i) arg[i] += e2[i];
  std::vector<double> xn(n);
  prob.project(arg, xn);
  check_finite(xn, "iterate", st.k);
  out.rec.residual = kernels::nrm2_diff(xn, st.x);
  out.rec.y = std::move(ls.y);
  out.rec.x = xn;
  advance(st, std::move(xn));
  return out;
}

/// alpha * (x - x_prev), or an empty vector when the product is exactly zero.
std::vector<double> inertial_term(const StepState& st, double alpha) {
  if (alpha == 0.0 || st.x_prev.empty()) return {};
  const std::size_t n = st.x.size();
  std::vector<double> t(n);
  bool all_zero = true;
  for (std::size_t i = 0; i < n; ++i) {
    t[i] = alpha * (st.x[i] - st.x_prev[i]);
    all_zero = all_zero && t[i] == 0.0;
  }
  if (all_zero) return {};
  return t;
}

}  // namespace

StepResult eg_step(StepState& st, const VIProblem& prob, const SolverConfig& cfg) {
  const std::size_t n = st.x.size();
  assert(n == static_cast<std::size_t>(prob.dim));
  std::vector<double> Fx(n);
  prob.F(st.x, Fx);
  check_finite(Fx, "F(x)", st.k);
  const double dtol = auto_degenerate_tol(cfg, st.x);
  auto ls = linesearch::backtrack_beta(prob, st.x, Fx, linesearch::LineSearchParams::from_config(cfg),
                                       dtol, {}, st.ls_hint);
  st.ls_hint = std::abs(ls.trials);

  StepResult out;
  out.ls_evals = ls.evals;
  out.rec.k = st.k;
  out.rec.beta = ls.beta;
  out.rec.rho = 1.0;
  if (ls.degenerate) {
    out.fixed_point = true;
    out.rec.y = std::move(ls.y);
    out.rec.rho = 0.0;
    out.rec.x = st.x;
    out.rec.residual = 0.0;
    advance(st, std::vector<double>(st.x));
    return out;
  }
  std::vector<double> arg(n);
  for (std::size_t i = 0; i < n; ++i) arg[i] = st.x[i] - ls.beta * ls.Fy[i];
  std::vector<double> xn(n);
  prob.project(arg, xn);
  check_finite(xn, "iterate", st.k);
  out.rec.residual = kernels::nrm2_diff(xn, st.x);
  out.rec.y = std::move(ls.y);
  out.rec.x = xn;
  advance(st, std::move(xn));
  return out;
}

StepResult pc1_step(StepState& st, const VIProblem& prob, const SolverConfig& cfg) {
  return pc1_family(st, prob, cfg, {}, {}, 0.0, 0.0, 0.0);
}

StepResult pc2_step(StepState& st, const VIProblem& prob, const SolverConfig& cfg) {
  return pc2_family(st, prob, cfg, {}, {}, -1.0, {}, 0.0);
}

StepResult pc1_op_step(StepState& st, const VIProblem& prob, const SolverConfig& cfg,
                       std::span<const double> e1, std::span<const double> e2) {
  const double e1n = e1.empty() ? 0.0 : kernels::nrm2(e1);
  const double e2n = e2.empty() ? 0.0 : kernels::nrm2(e2);
  return pc1_family(st, prob, cfg, {}, e2n == 0.0 ? std::span<const double>{} : e2, 0.0, e1n, e2n);
}

StepResult pc2_op_step(StepState& st, const VIProblem& prob, const SolverConfig& cfg,
                       std::span<const double> e1, std::span<const double> e2) {
  const double e1n = e1.empty() ? 0.0 : kernels::nrm2(e1);
  const double e2n = e2.empty() ? 0.0 : kernels::nrm2(e2);
  return pc2_family(st, prob, cfg, {}, e1n == 0.0 ? std::span<const double>{} : e1,
                    cfg.effective_mu(), e2n == 0.0 ? std::span<const double>{} : e2, 0.0);
}

StepResult pc1_bp_step(StepState& st, const VIProblem& prob, const SolverConfig& cfg,
                       double lambda, std::span<const double> v) {
  std::vector<double> shift;
  double shift_norm = 0.0;
  if (lambda != 0.0 && !v.empty()) {
    shift.resize(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) shift[i] = lambda * v[i];
    shift_norm = kernels::nrm2(shift);
    if (shift_norm == 0.0) shift.clear();
  }
  return pc1_family(st, prob, cfg, shift.empty() ? std::span<const double>{} : shift, {}, 0.0,
                    shift_norm, 0.0);
}

StepResult pc2_bp_step(StepState& st, const VIProblem& prob, const SolverConfig& cfg,
                       double lambda, std::span<const double> v) {
  std::vector<double> shift;
  double shift_norm = 0.0;
  if (lambda != 0.0 && !v.empty()) {
    shift.resize(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) shift[i] = lambda * v[i];
    shift_norm = kernels::nrm2(shift);
    if (shift_norm == 0.0) shift.clear();
  }
  auto out = pc2_family(st, prob, cfg, shift.empty() ? std::span<const double>{} : shift, {}, -1.0,
                        {}, 0.0);
  out.rec.e1_norm = shift_norm;
  return out;
}

StepResult ipc1_1_step(StepState& st, const VIProblem& prob, const SolverConfig& cfg,
                       double alpha1, double alpha2) {
  const auto e1 = inertial_term(st, alpha1);
  const auto e2 = inertial_term(st, alpha2);
  auto out = pc1_op_step(st, prob, cfg, e1.empty() ? std::span<const double>{} : e1,
                         e2.empty() ? std::span<const double>{} : e2);
  out.rec.alpha = e1.empty() && e2.empty() ? 0.0 : alpha1;
  return out;
}

StepResult ipc2_1_step(StepState& st, const VIProblem& prob, const SolverConfig& cfg,
                       double alpha1, double alpha2) {
  const auto e1 = inertial_term(st, alpha1);
  const auto e2 = inertial_term(st, alpha2);
  return pc2_family(st, prob, cfg, {}, e1.empty() ? std::span<const double>{} : e1,
                    cfg.effective_mu(), e2.empty() ? std::span<const double>{} : e2,
                    e1.empty() ? 0.0 : alpha1);
}

StepResult ipc1_2_step(StepState& st, const VIProblem& prob, const SolverConfig& cfg,
                       double alpha) {
  std::vector<double> delta;
  if (!st.x_prev.empty()) {
    delta.resize(st.x.size());
    for (std::size_t i = 0; i < st.x.size(); ++i) delta[i] = st.x[i] - st.x_prev[i];
  }
  auto out = pc1_bp_step(st, prob, cfg, delta.empty() ? 0.0 : alpha,
                         delta.empty() ? std::span<const double>{} : delta);
  out.rec.alpha = out.rec.e1_norm > 0.0 ? alpha : 0.0;
  return out;
}

StepResult ipc2_2_step(StepState& st, const VIProblem& prob, const SolverConfig& cfg,
                       double alpha) {
  std::vector<double> delta;
  if (!st.x_prev.empty()) {
    delta.resize(st.x.size());
    for (std::size_t i = 0; i < st.x.size(); ++i) delta[i] = st.x[i] - st.x_prev[i];
  }
  auto out = pc2_bp_step(st, prob, cfg, delta.empty() ? 0.0 : alpha,
                         delta.empty() ? std::span<const double>{} : delta);
  out.rec.alpha = out.rec.e1_norm > 0.0 ? alpha : 0.0;
  return out;
}

StepResult ipc1_remark56_step(StepState& st, const VIProblem& prob, const SolverConfig& cfg,
                              double alpha_const, double sigma_r, double delta_r) {
  const double gamma_max = perturbations::validate_remark56(alpha_const, sigma_r, delta_r);
  if (cfg.gamma > gamma_max * (1.0 + 1e-12))
    throw std::invalid_argument("ipc1_remark56_step: gamma exceeds the admissible bound " +
                                std::to_string(gamma_max));
  const double alpha_k = st.x_prev.empty() ? 0.0 : alpha_const;
  return ipc1_2_step(st, prob, cfg, alpha_k);
}

}  // namespace pcvi::algorithms
