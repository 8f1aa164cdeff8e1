#include "pcvi/core.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "pcvi/algorithms.hpp"
#include "pcvi/diagnostics.hpp"
#include "pcvi/kernels.hpp"
#include "pcvi/linesearch.hpp"

namespace pcvi {

VIProblem make_problem(int dim, MapFn F, projections::ProjectorSpec projector,
                       double lipschitz_hint, ObjectiveFn objective) {
  if (dim <= 0) throw std::invalid_argument("make_problem: dimension must be positive");
  if (!F) throw std::invalid_argument("make_problem: mapping is required");
  projections::validate(projector, static_cast<std::size_t>(dim));
  VIProblem p;
  p.dim = dim;
  p.F = std::move(F);
  p.projector = std::move(projector);
  p.lipschitz_hint = lipschitz_hint;
  p.objective = std::move(objective);
  return p;
}

const char* to_string(AlgorithmId id) {
  switch (id) {
    case AlgorithmId::EG: return "eg";
    case AlgorithmId::PC1: return "pc1";
    case AlgorithmId::PC2: return "pc2";
    case AlgorithmId::PC1_OP: return "pc1-op";
    case AlgorithmId::PC2_OP: return "pc2-op";
    case AlgorithmId::PC1_BP: return "pc1-bp";
    case AlgorithmId::PC2_BP: return "pc2-bp";
    case AlgorithmId::IPC1_1: return "ipc1-1";
    case AlgorithmId::IPC2_1: return "ipc2-1";
    case AlgorithmId::IPC1_2: return "ipc1-2";
    case AlgorithmId::IPC2_2: return "ipc2-2";
    case AlgorithmId::IPC1_R56: return "ipc1-r56";
  }
  return "unknown";
}

const std::vector<AlgorithmId>& all_algorithms() {
  static const std::vector<AlgorithmId> ids = {
      AlgorithmId::EG,     AlgorithmId::PC1,    AlgorithmId::PC2,    AlgorithmId::PC1_OP,
      AlgorithmId::PC2_OP, AlgorithmId::PC1_BP, AlgorithmId::PC2_BP, AlgorithmId::IPC1_1,
      AlgorithmId::IPC2_1, AlgorithmId::IPC1_2, AlgorithmId::IPC2_2, AlgorithmId::IPC1_R56};
  return ids;
}

AlgorithmId parse_algorithm(const std::string& s) {
  for (const auto id : all_algorithms())
    if (s == to_string(id)) return id;
  throw std::invalid_argument("unknown algorithm id: " + s);
}

bool uses_pc1_rho_bound(AlgorithmId id) {
  return id != AlgorithmId::PC2_OP && id != AlgorithmId::IPC2_1;
}

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Converged: return "converged";
    case SolveStatus::MaxIterations: return "max-iterations";
    case SolveStatus::DegenerateStep: return "degenerate-step";
    case SolveStatus::AuditFailure: return "audit-failure";
  }
  return "unknown";
}

void validate_config(const SolverConfig& cfg, AlgorithmId alg,
                     const perturbations::PerturbationSchedule& schedule) {
  if (!(cfg.epsilon > 0.0)) throw std::invalid_argument("config: epsilon must be positive");
  if (cfg.max_iter < 0) throw std::invalid_argument("config: max_iter must be nonnegative");
  if (!(cfg.gamma > 0.0 && cfg.gamma < 2.0))
    throw std::invalid_argument("config: gamma must lie in (0, 2)");
  linesearch::validate(linesearch::LineSearchParams::from_config(cfg));
  if (cfg.degenerate_tol < 0.0)
    throw std::invalid_argument("config: degenerate_tol must be nonnegative");

  const double mu = cfg.effective_mu();
  if (alg == AlgorithmId::PC2_OP) {
    if (mu < 0.0 || mu >= 1.0 - cfg.nu)
      throw std::invalid_argument("config: mu must lie in [0, 1 - nu) for pc2-op");
  }
  if (alg == AlgorithmId::IPC2_1) {
    // The inertial guard needs mu < nu and the relaxation bound needs
    // mu < 1 - nu, so both caps apply.
    if (mu < 0.0 || mu >= std::min(cfg.nu, 1.0 - cfg.nu))
      throw std::invalid_argument("config: mu must lie in [0, min(nu, 1 - nu)) for ipc2-1");
  }

  using perturbations::ScheduleKind;
  const auto kind = schedule.kind;
  auto require = [&](bool ok, const char* need) {
    if (!ok)
      throw std::invalid_argument(std::string("config: algorithm ") + to_string(alg) +
                                  " requires a " + need + " or none schedule, got " +
                                  perturbations::to_string(kind));
  };
  switch (alg) {
    case AlgorithmId::EG:
    case AlgorithmId::PC1:
    case AlgorithmId::PC2:
      if (kind != ScheduleKind::None)
        throw std::invalid_argument(std::string("config: algorithm ") + to_string(alg) +
                                    " takes no perturbation schedule");
      break;
    case AlgorithmId::PC1_OP:
    case AlgorithmId::PC2_OP:
      require(kind == ScheduleKind::Outer || kind == ScheduleKind::None, "outer");
      break;
    case AlgorithmId::PC1_BP:
    case AlgorithmId::PC2_BP:
      require(kind == ScheduleKind::Bounded || kind == ScheduleKind::None, "bounded");
      break;
    default:
      require(kind == ScheduleKind::Inertial || kind == ScheduleKind::None, "inertial");
      break;
  }
  if (kind == ScheduleKind::Outer || kind == ScheduleKind::Bounded) {
    if (schedule.budget < 0.0) throw std::invalid_argument("config: schedule budget must be nonnegative");
  }
  if (kind == ScheduleKind::Inertial) {
    if (schedule.alpha1 < 0.0 || schedule.alpha1 >= 1.0 || schedule.alpha2 < 0.0 ||
        schedule.alpha2 >= 1.0)
      throw std::invalid_argument("config: inertial targets must lie in [0, 1)");
    if (!(schedule.xi > 0.0))
      throw std::invalid_argument("config: xi must be positive for the online cap");
    if (alg == AlgorithmId::IPC1_R56) {
      const double gamma_max =
          perturbations::validate_remark56(schedule.alpha1, schedule.sigma_r, schedule.delta_r);
      if (cfg.gamma > gamma_max * (1.0 + 1e-12))
        throw std::invalid_argument("config: gamma " + std::to_string(cfg.gamma) +
                                    " exceeds the admissible bound " + std::to_string(gamma_max));
    }
  }
}

void to_json(nlohmann::json& j, const IterationRecord& r) {
  j = nlohmann::json{{"k", r.k},
                     {"x", r.x},
                     {"y", r.y},
                     {"beta", r.beta},
                     {"rho", r.rho},
                     {"alpha", r.alpha},
                     {"residual", r.residual},
                     {"e1_norm", r.e1_norm},
                     {"e2_norm", r.e2_norm},
                     {"wall_ms", r.wall_ms}};
}

void to_json(nlohmann::json& j, const AuditResult& a) {
  j = nlohmann::json{
      {"name", a.name}, {"passed", a.passed}, {"worst", a.worst}, {"worst_k", a.worst_k}};
}

bool SolveReport::audits_passed() const {
  for (const auto& a : audits)
    if (!a.passed) return false;
  return true;
}

void to_json(nlohmann::json& j, const SolveReport& r) {
  j = nlohmann::json{{"status", to_string(r.status)},
                     {"algorithm", r.algorithm},
                     {"iterations", r.iterations},
                     {"x0", r.x0},
                     {"final_x", r.final_x},
                     {"final_residual", r.final_residual},
                     {"ergodic_x", r.ergodic_x},
                     {"ergodic_e1_offset", r.ergodic_e1_offset},
                     {"upsilon", r.upsilon},
                     {"min_rho", r.min_rho},
                     {"sum_e1_norm", r.sum_e1_norm},
                     {"sum_e2_norm", r.sum_e2_norm},
                     {"sum_rho_beta_e1", r.sum_rho_beta_e1},
                     {"rate_bound", r.rate_bound},
                     {"audits", r.audits},
                     {"trace", r.trace},
                     {"wall_ms", r.wall_ms}};
}

double residual(const VIProblem& problem, std::span<const double> x, double beta) {
  if (!(beta > 0.0)) throw std::invalid_argument("residual: beta must be positive");
  const std::size_t n = x.size();
  std::vector<double> Fx(n), arg(n), px(n);
  problem.F(x, Fx);
  for (std::size_t i = 0; i < n; ++i) arg[i] = x[i] - beta * Fx[i];
  problem.project(arg, px);
  return kernels::nrm2_diff(x, px);
}

namespace {

using algorithms::StepResult;
using algorithms::StepState;
using perturbations::ScheduleKind;

struct ErgodicAccumulator {
  std::vector<double> weighted_y;   // sum rho beta y
  std::vector<double> weighted_e1;  // sum rho beta e1 over steps whose e1 adds to the trial point
  double upsilon = 0.0;
  bool any_e1 = false;

  void add(const IterationRecord& rec, std::span<const double> e1_vec) {
    if (!(rec.rho > 0.0)) return;
    const double w = rec.rho * rec.beta;
    if (weighted_y.empty()) weighted_y.assign(rec.y.size(), 0.0);
    for (std::size_t i = 0; i < rec.y.size(); ++i) weighted_y[i] += w * rec.y[i];
    upsilon += w;
    if (!e1_vec.empty()) {
      if (weighted_e1.empty()) weighted_e1.assign(rec.y.size(), 0.0);
      for (std::size_t i = 0; i < e1_vec.size(); ++i) weighted_e1[i] += w * e1_vec[i];
      any_e1 = true;
    }
  }
};

void run_audits(SolveReport& rep, AlgorithmId alg, const SolverConfig& cfg,
                const perturbations::PerturbationSchedule& schedule, const VIProblem& prob) {
  // Relaxation-ratio lower bound. Degenerate records carry rho = 0 and are
  // excluded; the extragradient step has no ratio to audit.
  if (alg != AlgorithmId::EG) {
    AuditResult a;
    a.name = "rho-lower-bound";
    const double bound = uses_pc1_rho_bound(alg)
                             ? diagnostics::rho_lower_bound_pc1(cfg.nu)
                             : diagnostics::rho_lower_bound_pc2(cfg.nu, cfg.effective_mu());
    a.worst = std::numeric_limits<double>::infinity();
    for (const auto& rec : rep.trace) {
      if (!(rec.rho > 0.0)) continue;
      const double slack = rec.rho - bound;
      if (slack < a.worst) {
        a.worst = slack;
        a.worst_k = rec.k;
      }
    }
    if (!std::isfinite(a.worst)) a.worst = 0.0;
    a.passed = a.worst >= -1e-10;
    rep.audits.push_back(std::move(a));
  }

  {
    AuditResult a;
    a.name = "trial-feasible";
    a.worst = 0.0;
    for (const auto& rec : rep.trace) {
      const double excess = projections::feasibility_violation(prob.projector, rec.y);
      const double slack = 1e-8 * (1.0 + kernels::nrm2(rec.y)) - excess;
      if (slack < a.worst) {
        a.worst = slack;
        a.worst_k = rec.k;
      }
    }
    a.passed = a.worst >= 0.0;
    rep.audits.push_back(std::move(a));
  }

  if (schedule.kind == ScheduleKind::Outer || schedule.kind == ScheduleKind::Bounded) {
    AuditResult a;
    a.name = "perturbation-budget";
    const double cap = schedule.kind == ScheduleKind::Outer
                           ? schedule.budget
                           : schedule.budget * 1.6449340668482264365;  // pi^2 / 6
    const double slack1 = cap * (1.0 + 1e-9) - rep.sum_e1_norm;
    const double slack2 = cap * (1.0 + 1e-9) - rep.sum_e2_norm;
    a.worst = std::min(slack1, slack2);
    a.passed = a.worst >= 0.0;
    rep.audits.push_back(std::move(a));
  }
  {
    // Upsilon must be positive whenever any step made progress; a zero sum
    // with nondegenerate records would invalidate every ergodic statement.
    AuditResult a;
    a.name = "upsilon-positive";
    bool any_progress = false;
    for (const auto& rec : rep.trace)
      if (rec.rho > 0.0) {
        any_progress = true;
        break;
      }
    a.worst = rep.upsilon;
    a.passed = !any_progress || rep.upsilon > 0.0;
    rep.audits.push_back(std::move(a));
  }
  if (schedule.kind == ScheduleKind::Inertial) {
    AuditResult a;
    a.name = "inertial-target-cap";
    const double target = std::max(schedule.alpha1, schedule.alpha2);
    a.worst = std::numeric_limits<double>::infinity();
    for (const auto& rec : rep.trace) {
      const double slack = target * (1.0 + 1e-12) - rec.alpha;
      if (slack < a.worst) {
        a.worst = slack;
        a.worst_k = rec.k;
      }
    }
    if (!std::isfinite(a.worst)) a.worst = 0.0;
    a.passed = a.worst >= 0.0;
    rep.audits.push_back(std::move(a));
  }
}

}  // namespace

SolveReport solve(const VIProblem& problem, AlgorithmId algorithm, const SolverConfig& cfg,
                  const perturbations::PerturbationSchedule& schedule,
                  std::span<const double> x0) {
  validate_config(cfg, algorithm, schedule);
  if (problem.dim <= 0 || !problem.F)
    throw std::invalid_argument("solve: problem must carry a dimension and a mapping");
  projections::validate(problem.projector, static_cast<std::size_t>(problem.dim));
  if (x0.size() != static_cast<std::size_t>(problem.dim))
    throw std::invalid_argument("solve: x0 dimension mismatch");
  for (const double v : x0)
    if (!std::isfinite(v)) throw std::invalid_argument("solve: x0 must be finite");

  const auto t_start = std::chrono::steady_clock::now();
  SolveReport rep;
  rep.algorithm = to_string(algorithm);
  rep.x0.assign(x0.begin(), x0.end());
  rep.status = SolveStatus::MaxIterations;

  StepState st = StepState::from(x0);
  ErgodicAccumulator erg;
  const int dim = problem.dim;
  std::vector<double> e1_for_ergodic;

  for (long k = 0; k < cfg.max_iter; ++k) {
    const auto t_iter = std::chrono::steady_clock::now();
    e1_for_ergodic.clear();
    StepResult r;
    switch (algorithm) {
      case AlgorithmId::EG:
        r = algorithms::eg_step(st, problem, cfg);
        break;
      case AlgorithmId::PC1:
        r = algorithms::pc1_step(st, problem, cfg);
        break;
      case AlgorithmId::PC2:
        r = algorithms::pc2_step(st, problem, cfg);
        break;
      case AlgorithmId::PC1_OP: {
        auto p = perturbations::outer_at(schedule, k, dim);
        r = algorithms::pc1_op_step(st, problem, cfg, p.e1, p.e2);
        e1_for_ergodic = std::move(p.e1);
        break;
      }
      case AlgorithmId::PC2_OP: {
        auto p = perturbations::outer_at(schedule, k, dim);
        r = algorithms::pc2_op_step(st, problem, cfg, p.e1, p.e2);
        break;
      }
      case AlgorithmId::PC1_BP: {
        auto b = perturbations::bounded_at(schedule, k, dim);
        r = algorithms::pc1_bp_step(st, problem, cfg, b.lambda, b.v);
        break;
      }
      case AlgorithmId::PC2_BP: {
        auto b = perturbations::bounded_at(schedule, k, dim);
        r = algorithms::pc2_bp_step(st, problem, cfg, b.lambda, b.v);
        break;
      }
      case AlgorithmId::IPC1_1:
      case AlgorithmId::IPC2_1:
      case AlgorithmId::IPC1_2:
      case AlgorithmId::IPC2_2: {
        double a1 = 0.0;
        double a2 = 0.0;
        if (!st.x_prev.empty()) {
          const double dn = kernels::nrm2_diff(st.x, st.x_prev);
          a1 = perturbations::inertial_alpha(k, schedule.alpha1, dn,
                                             schedule.zeta_for(schedule.alpha1), schedule.xi);
          a2 = perturbations::inertial_alpha(k, schedule.alpha2, dn,
                                             schedule.zeta_for(schedule.alpha2), schedule.xi);
        }
        if (algorithm == AlgorithmId::IPC1_1) {
          if (a1 > 0.0 && !st.x_prev.empty()) {
            e1_for_ergodic.resize(static_cast<std::size_t>(dim));
            for (std::size_t i = 0; i < e1_for_ergodic.size(); ++i)
              e1_for_ergodic[i] = a1 * (st.x[i] - st.x_prev[i]);
          }
          r = algorithms::ipc1_1_step(st, problem, cfg, a1, a2);
        } else if (algorithm == AlgorithmId::IPC2_1) {
          r = algorithms::ipc2_1_step(st, problem, cfg, a1, a2);
        } else if (algorithm == AlgorithmId::IPC1_2) {
          r = algorithms::ipc1_2_step(st, problem, cfg, a1);
        } else {
          r = algorithms::ipc2_2_step(st, problem, cfg, a1);
        }
        break;
      }
      case AlgorithmId::IPC1_R56:
        r = algorithms::ipc1_remark56_step(st, problem, cfg, schedule.alpha1, schedule.sigma_r,
                                           schedule.delta_r);
        break;
    }

    r.rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                              t_iter)
                        .count();
    erg.add(r.rec, e1_for_ergodic);
    if (r.rec.rho > 0.0 && r.rec.rho < rep.min_rho) rep.min_rho = r.rec.rho;
    rep.sum_e1_norm += r.rec.e1_norm;
    rep.sum_e2_norm += r.rec.e2_norm;
    if (r.rec.rho > 0.0) rep.sum_rho_beta_e1 += r.rec.rho * r.rec.beta * r.rec.e1_norm;
    rep.final_residual = r.rec.residual;
    const bool fixed_point = r.fixed_point;
    const bool degenerate = r.degenerate_d;
    const double res = r.rec.residual;
    if (cfg.record_trace) rep.trace.push_back(std::move(r.rec));
    if (fixed_point) {
      rep.status = SolveStatus::Converged;
      break;
    }
    if (degenerate) {
      rep.status = SolveStatus::DegenerateStep;
      break;
    }
    if (res <= cfg.epsilon) {
      rep.status = SolveStatus::Converged;
      break;
    }
  }

  rep.iterations = st.k;
  rep.final_x = st.x;
  rep.upsilon = erg.upsilon;
  if (erg.upsilon > 0.0) {
    rep.ergodic_x = erg.weighted_y;
    for (auto& v : rep.ergodic_x) v /= erg.upsilon;
    if (erg.any_e1) {
      rep.ergodic_e1_offset = erg.weighted_e1;
      for (auto& v : rep.ergodic_e1_offset) v /= erg.upsilon;
    }
    double sup = 0.0;
    for (const auto& rec : rep.trace) sup = std::max(sup, kernels::nrm2_diff(rec.x, rep.final_x));
    const double M = sup * rep.sum_e2_norm;
    const double r0 = kernels::nrm2_diff(rep.final_x, rep.x0);
    rep.rate_bound = (r0 * r0 + 2.0 * M) / (2.0 * cfg.gamma * erg.upsilon);
  }

  if (cfg.audit) {
    run_audits(rep, algorithm, cfg, schedule, problem);
    if (!rep.audits_passed()) rep.status = SolveStatus::AuditFailure;
  }
  rep.wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t_start).count();
  return rep;
}

}  // namespace pcvi
