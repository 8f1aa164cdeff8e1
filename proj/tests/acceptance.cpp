// Acceptance gate for the solver library and benchmark harness. Each
// criterion runs against frozen tolerances, buffers its verdict, and the
// binary prints one pass/fail line per criterion before exiting nonzero on
// any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pcvi/bench.hpp"
#include "pcvi/core.hpp"
#include "pcvi/diagnostics.hpp"
#include "pcvi/kernels.hpp"
#include "pcvi/oracle.hpp"
#include "pcvi/problems.hpp"
#include "pcvi/projections.hpp"
#include "pcvi/rng.hpp"

namespace {

using pcvi::AlgorithmId;
using pcvi::SolveReport;
using pcvi::SolverConfig;
using pcvi::SolveStatus;
namespace bench = pcvi::bench;
namespace dg = pcvi::diagnostics;
namespace kern = pcvi::kernels;
namespace pb = pcvi::problems;
namespace pj = pcvi::projections;
namespace pt = pcvi::perturbations;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

struct Criterion {
  int id = 0;
  std::string name;
  double budget = 0.0;  // wall-clock limit in seconds, 0 = unlimited
  bool passed = true;
  double seconds = 0.0;
  std::vector<std::string> notes;

  void require(bool ok, const std::string& msg) {
    if (!ok) {
      passed = false;
      notes.push_back(msg);
    }
  }
  void note(const std::string& msg) { notes.push_back(msg); }
};

/// min rho and audit outcome of one solver run, checked in bulk by criterion 2.
struct RhoEvidence {
  std::string label;
  AlgorithmId alg = AlgorithmId::PC1;
  double nu = 0.0;
  double mu_eff = 0.0;
  double min_rho = 0.0;
  bool audits_ok = false;
};

std::vector<RhoEvidence> g_rho;

void record_rho(const std::string& label, AlgorithmId alg, const SolverConfig& cfg,
                const SolveReport& rep) {
  g_rho.push_back({label, alg, cfg.nu, cfg.effective_mu(), rep.min_rho, rep.audits_passed()});
}

SolverConfig base_solver(double eps) {
  SolverConfig sc;
  sc.epsilon = eps;
  sc.gamma = 1.0;
  sc.nu = 0.7;
  sc.sigma_ls = 5.0;
  sc.backtrack = 0.9;
  return sc;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// ---------------------------------------------------------------------------
// 1. l1 projection vs the independent bisection oracle.

void criterion1(Criterion& c) {
  pcvi::rng::Stream rng(20260815);
  double worst_gap = 0.0;
  double worst_excess = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t dim = 1 + static_cast<std::size_t>(rng.below(10));
    const double t = 5.0 * (1.0 - rng.uniform01());  // radius in (0, 5]
    const double scale = rng.uniform(0.1, 4.0);
    std::vector<double> v = rng.gaussian_vec(dim);
    for (double& x : v) x *= scale;

    std::vector<double> p(dim);
    pj::project_l1_ball(v, t, p);
    const std::vector<double> q = pcvi::oracle::oracle_project_l1(v, t);

    double nrm1 = 0.0;
    for (std::size_t j = 0; j < dim; ++j) {
      worst_gap = std::max(worst_gap, std::abs(p[j] - q[j]));
      nrm1 += std::abs(p[j]);
    }
    worst_excess = std::max(worst_excess, nrm1 - t);
  }
  c.require(worst_gap <= 1e-8, "worst oracle disagreement " + fmt(worst_gap) + " > 1e-8");
  c.require(worst_excess <= 1e-12, "worst l1 excess " + fmt(worst_excess) + " > 1e-12");
  c.note("1000 vectors, worst gap " + fmt(worst_gap) + ", worst feasibility excess " +
         fmt(std::max(worst_excess, 0.0)));
}

// ---------------------------------------------------------------------------
// 2. min_k rho_k against the family lower bounds, over every run recorded by
//    the other criteria (zero violations allowed).

void criterion2(Criterion& c) {
  long violations = 0;
  double worst_margin = std::numeric_limits<double>::infinity();
  for (const RhoEvidence& ev : g_rho) {
    const double bound = pcvi::uses_pc1_rho_bound(ev.alg)
                             ? dg::rho_lower_bound_pc1(ev.nu)
                             : dg::rho_lower_bound_pc2(ev.nu, ev.mu_eff);
    const double margin = ev.min_rho - (bound - 1e-10);
    worst_margin = std::min(worst_margin, margin);
    if (margin < 0.0 || !ev.audits_ok) {
      ++violations;
      if (violations <= 5)
        c.note(ev.label + ": min rho " + fmt(ev.min_rho) + " vs bound " + fmt(bound) +
               (ev.audits_ok ? "" : " (runtime audit failed)"));
    }
  }
  c.require(g_rho.size() >= 200,
            "only " + std::to_string(g_rho.size()) + " runs collected, expected at least 200");
  c.require(violations == 0, std::to_string(violations) + " runs violated their rho bound");
  c.note(std::to_string(g_rho.size()) + " runs audited, worst margin above bound " +
         fmt(worst_margin));
}

// ---------------------------------------------------------------------------
// 3. Per-iteration contraction toward the known solution on 20 seeded affine
//    instances; the outer-perturbed variant satisfies the quasi form.

void criterion3(Criterion& c) {
  double worst_slack = 0.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    auto inst = std::make_shared<const pb::AffineVIInstance>(
        pb::gen_affine_vi(20, 0.5, pj::Kind::Box, seed));
    const pcvi::VIProblem problem = pb::make_vi(inst);
    const std::vector<double> x0(20, 0.0);

    SolverConfig sc = base_solver(1e-9);
    sc.max_iter = 5000;
    const pt::PerturbationSchedule none;

    for (const AlgorithmId alg : {AlgorithmId::PC1, AlgorithmId::PC2}) {
      const SolveReport rep = pcvi::solve(problem, alg, sc, none, x0);
      record_rho("affine-fejer-" + std::to_string(seed) + "-" + pcvi::to_string(alg), alg, sc,
                 rep);
      const dg::FejerAudit audit = dg::fejer_audit(rep.trace, x0, inst->x_star, sc.gamma, alg);
      worst_slack = std::min(worst_slack, audit.worst);
      c.require(audit.passed, std::string("seed ") + std::to_string(seed) + " " +
                                  pcvi::to_string(alg) + ": contraction slack " +
                                  fmt(audit.worst) + " at k=" + std::to_string(audit.worst_k));
    }

    pt::PerturbationSchedule outer;
    outer.kind = pt::ScheduleKind::Outer;
    outer.budget = 0.25;
    outer.seed = pcvi::rng::substream(seed, 21);
    const SolveReport rep = pcvi::solve(problem, AlgorithmId::PC1_OP, sc, outer, x0);
    record_rho("affine-fejer-" + std::to_string(seed) + "-pc1-op", AlgorithmId::PC1_OP, sc, rep);
    const dg::FejerAudit audit =
        dg::fejer_audit(rep.trace, x0, inst->x_star, sc.gamma, AlgorithmId::PC1_OP);
    worst_slack = std::min(worst_slack, audit.worst);
    c.require(audit.passed, "seed " + std::to_string(seed) + " pc1-op: quasi contraction slack " +
                                fmt(audit.worst) + " at k=" + std::to_string(audit.worst_k));
  }
  c.note("20 instances x (pc1, pc2, pc1-op), worst slack " + fmt(worst_slack));
}

// ---------------------------------------------------------------------------
// 4. Ergodic gap certificate at t in {10, 100, 1000} and the 1/t decay of its
//    right-hand side.

void criterion4(Criterion& c) {
  auto inst = std::make_shared<const pb::AffineVIInstance>(
      pb::gen_affine_vi(20, 0.5, pj::Kind::Box, 5));
  const pcvi::VIProblem problem = pb::make_vi(inst);
  const std::vector<double> x0(20, 0.0);

  SolverConfig sc = base_solver(1e-300);  // run the full horizon
  sc.gamma = 0.2;
  sc.max_iter = 1001;
  const pt::PerturbationSchedule none;
  const SolveReport rep = pcvi::solve(problem, AlgorithmId::PC1, sc, none, x0);
  record_rho("affine-rate-pc1", AlgorithmId::PC1, sc, rep);
  c.require(rep.trace.size() == 1001,
            "expected 1001 recorded steps, got " + std::to_string(rep.trace.size()));
  if (rep.trace.size() < 1001) return;

  pcvi::rng::Stream rng(123);
  std::vector<std::vector<double>> samples;
  for (int i = 0; i < 50; ++i) {
    std::vector<double> z = rng.gaussian_vec(20);
    for (double& v : z) v *= 1.5;
    std::vector<double> pz(20);
    pj::project(inst->C, z, pz);
    samples.push_back(std::move(pz));
  }

  for (const long t : {10L, 100L, 1000L}) {
    const dg::RateCertificate cert =
        dg::rate_certificate(rep.trace, x0, sc.gamma, 0.0, samples, problem.F, t);
    c.require(cert.passed, "certificate failed at t=" + std::to_string(t) +
                               " with violation " + fmt(cert.worst_violation));
    c.require(cert.upsilon > 0.0, "nonpositive weight sum at t=" + std::to_string(t));
  }

  const dg::RateCertificate c500 =
      dg::rate_certificate(rep.trace, x0, sc.gamma, 0.0, samples, problem.F, 500);
  const dg::RateCertificate c1000 =
      dg::rate_certificate(rep.trace, x0, sc.gamma, 0.0, samples, problem.F, 1000);
  const double r500 = c500.upsilon / 500.0;
  const double r1000 = c1000.upsilon / 1000.0;
  c.require(r1000 > 0.0, "weight sum rate is not positive");
  const double drift = std::abs(r1000 - r500) / r1000;
  c.require(drift <= 0.05,
            "Upsilon_t/t moved " + fmt(100.0 * drift) + "% between t=500 and t=1000");
  c.note("50 samples at t in {10,100,1000}; Upsilon_t/t drift " + fmt(100.0 * drift) +
         "% between t=500 and t=1000");
}

// ---------------------------------------------------------------------------
// 5. Bounded and outer perturbed runs land on the unperturbed solution.

void criterion5(Criterion& c) {
  double worst_drift = 0.0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto inst = std::make_shared<const pb::LassoInstance>(pb::gen_lasso(240, 1024, 20, 0.0, seed));
    const pcvi::VIProblem problem = pb::make_vi(inst);
    const std::vector<double> x0(1024, 0.0);

    SolverConfig sc = base_solver(1e-8);
    // The stop rule fires on the step norm gamma*rho*||d||, and the reference
    // run's distance from the limit at stop scales with epsilon/gamma. At
    // gamma=1 that distance sits at the same 1e-6 scale as the agreement
    // tolerance, so the comparison would measure stopping error rather than
    // perturbation drift; gamma=1.9 keeps it several times below.
    sc.gamma = 1.9;
    sc.record_trace = false;
    const pt::PerturbationSchedule none;

    const SolveReport base1 = pcvi::solve(problem, AlgorithmId::PC1, sc, none, x0);
    const SolveReport base2 = pcvi::solve(problem, AlgorithmId::PC2, sc, none, x0);
    record_rho("lasso-bpr-" + std::to_string(seed) + "-pc1", AlgorithmId::PC1, sc, base1);
    record_rho("lasso-bpr-" + std::to_string(seed) + "-pc2", AlgorithmId::PC2, sc, base2);

    struct Cell {
      AlgorithmId alg;
      pt::ScheduleKind kind;
      double budget;
      std::uint64_t tag;
      const SolveReport* base;
    };
    const Cell cells[] = {
        {AlgorithmId::PC1_BP, pt::ScheduleKind::Bounded, 1.0, 11, &base1},
        {AlgorithmId::PC2_BP, pt::ScheduleKind::Bounded, 1.0, 12, &base2},
        {AlgorithmId::PC1_OP, pt::ScheduleKind::Outer, 0.01, 13, &base1},
        {AlgorithmId::PC2_OP, pt::ScheduleKind::Outer, 0.01, 14, &base2},
    };
    for (const Cell& cell : cells) {
      pt::PerturbationSchedule sched;
      sched.kind = cell.kind;
      sched.budget = cell.budget;
      sched.seed = pcvi::rng::substream(seed, cell.tag);
      const SolveReport rep = pcvi::solve(problem, cell.alg, sc, sched, x0);
      const std::string label =
          "lasso-bpr-" + std::to_string(seed) + "-" + pcvi::to_string(cell.alg);
      record_rho(label, cell.alg, sc, rep);
      c.require(rep.status == SolveStatus::Converged,
                label + ": status " + pcvi::to_string(rep.status));
      const double drift = kern::nrm2_diff(rep.final_x, cell.base->final_x);
      worst_drift = std::max(worst_drift, drift);
      c.require(drift <= 1e-6, label + ": drifted " + fmt(drift) + " from the unperturbed point");
    }
  }
  c.note("5 seeds x (pc1-bp, pc2-bp, pc1-op, pc2-op), worst drift " + fmt(worst_drift));
}

// ---------------------------------------------------------------------------
// 6. Desk-scale sparse recovery benchmark: accuracy plus the iteration-count
//    orderings, over 10 seeds per sparsity level.

const std::vector<AlgorithmId>& benchmark_algorithms() {
  static const std::vector<AlgorithmId> algs = {
      AlgorithmId::PC1,    AlgorithmId::PC2,    AlgorithmId::IPC1_R56, AlgorithmId::IPC1_1,
      AlgorithmId::IPC1_2, AlgorithmId::IPC2_1, AlgorithmId::IPC2_2,
  };
  return algs;
}

void criterion6(Criterion& c) {
  std::map<int, std::map<AlgorithmId, std::vector<double>>> iters;
  double worst_err = 0.0;
  for (const int K : {20, 30}) {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      auto inst =
          std::make_shared<const pb::LassoInstance>(pb::gen_lasso(240, 1024, K, 0.0, seed));
      const pcvi::VIProblem problem = pb::make_vi(inst);
      const std::vector<double> x0(1024, 0.0);
      for (std::size_t ai = 0; ai < benchmark_algorithms().size(); ++ai) {
        const AlgorithmId alg = benchmark_algorithms()[ai];
        bench::AlgorithmSpec spec = bench::preset_algorithm(alg);
        spec.solver.epsilon = 1e-6;
        spec.solver.record_trace = false;
        spec.schedule.seed = pcvi::rng::substream(seed, 1000 + ai);
        const SolveReport rep = pcvi::solve(problem, alg, spec.solver, spec.schedule, x0);
        const std::string label = "lasso-K" + std::to_string(K) + "-s" + std::to_string(seed) +
                                  "-" + pcvi::to_string(alg);
        record_rho(label, alg, spec.solver, rep);
        c.require(rep.status == SolveStatus::Converged,
                  label + ": status " + pcvi::to_string(rep.status));
        const double err = pb::lasso_error(*inst, rep.final_x);
        worst_err = std::max(worst_err, err);
        c.require(err <= 1e-3, label + ": recovery error " + fmt(err) + " > 1e-3");
        iters[K][alg].push_back(static_cast<double>(rep.iterations));
      }
    }
  }

  for (const int K : {20, 30}) {
    auto med = [&](AlgorithmId alg) { return median(iters[K][alg]); };
    const std::string at = " at K=" + std::to_string(K);
    c.require(med(AlgorithmId::PC2) < med(AlgorithmId::PC1),
              "median iterations pc2 " + fmt(med(AlgorithmId::PC2)) + " !< pc1 " +
                  fmt(med(AlgorithmId::PC1)) + at);
    for (const AlgorithmId other :
         {AlgorithmId::IPC1_R56, AlgorithmId::IPC1_1, AlgorithmId::IPC1_2, AlgorithmId::IPC2_1})
      c.require(med(AlgorithmId::IPC2_2) < med(other),
                std::string("ipc2-2 median ") + fmt(med(AlgorithmId::IPC2_2)) + " !< " +
                    pcvi::to_string(other) + " " + fmt(med(other)) + at);
    for (const AlgorithmId inertial :
         {AlgorithmId::IPC1_R56, AlgorithmId::IPC1_1, AlgorithmId::IPC1_2})
      c.require(med(inertial) < med(AlgorithmId::PC1),
                std::string(pcvi::to_string(inertial)) + " median " + fmt(med(inertial)) +
                    " !< pc1 " + fmt(med(AlgorithmId::PC1)) + at);
    for (const AlgorithmId inertial : {AlgorithmId::IPC2_1, AlgorithmId::IPC2_2})
      c.require(med(inertial) < med(AlgorithmId::PC2),
                std::string(pcvi::to_string(inertial)) + " median " + fmt(med(inertial)) +
                    " !< pc2 " + fmt(med(AlgorithmId::PC2)) + at);

    std::string line = "median iterations at K=" + std::to_string(K) + ":";
    for (const AlgorithmId alg : benchmark_algorithms())
      line += std::string(" ") + pcvi::to_string(alg) + "=" + fmt(med(alg));
    c.note(line);
  }
  c.note("worst recovery error " + fmt(worst_err));
}

// ---------------------------------------------------------------------------
// 7. Noisy benchmark: final objectives agree across algorithms per noise
//    level (relative spread of the medians at most 5%).

void criterion7(Criterion& c) {
  for (const double noise : {0.01, 0.02}) {
    std::map<AlgorithmId, std::vector<double>> objs;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      auto inst =
          std::make_shared<const pb::LassoInstance>(pb::gen_lasso(240, 1024, 30, noise, seed));
      const pcvi::VIProblem problem = pb::make_vi(inst);
      const std::vector<double> x0(1024, 0.0);
      for (std::size_t ai = 0; ai < benchmark_algorithms().size(); ++ai) {
        const AlgorithmId alg = benchmark_algorithms()[ai];
        bench::AlgorithmSpec spec = bench::preset_algorithm(alg);
        spec.solver.epsilon = 1e-6;
        spec.solver.record_trace = false;
        spec.schedule.seed = pcvi::rng::substream(seed, 1000 + ai);
        const SolveReport rep = pcvi::solve(problem, alg, spec.solver, spec.schedule, x0);
        const std::string label = "lasso-noisy-b" + fmt(noise) + "-s" + std::to_string(seed) +
                                  "-" + pcvi::to_string(alg);
        record_rho(label, alg, spec.solver, rep);
        c.require(rep.status == SolveStatus::Converged,
                  label + ": status " + pcvi::to_string(rep.status));
        objs[alg].push_back(pb::lasso_objective(*inst, rep.final_x));
      }
    }

    std::vector<double> meds;
    for (const AlgorithmId alg : benchmark_algorithms()) meds.push_back(median(objs[alg]));
    const double lo = *std::min_element(meds.begin(), meds.end());
    const double hi = *std::max_element(meds.begin(), meds.end());
    const double mid = median(meds);
    const double spread = (hi - lo) / mid;
    c.require(mid > 0.0, "median objective is not positive at noise " + fmt(noise));
    c.require(spread <= 0.05, "objective spread " + fmt(100.0 * spread) + "% at noise " +
                                  fmt(noise) + " exceeds 5%");
    c.note("noise " + fmt(noise) + ": median objective " + fmt(mid) + ", spread across algorithms " +
           fmt(100.0 * spread) + "%");
  }
}

// ---------------------------------------------------------------------------
// 8. Zeroed perturbation and inertia settings reproduce the base traces
//    bitwise over 100 steps.

void criterion8(Criterion& c) {
  auto inst = std::make_shared<const pb::AffineVIInstance>(
      pb::gen_affine_vi(20, 0.5, pj::Kind::Ball, 31));
  const pcvi::VIProblem problem = pb::make_vi(inst);
  const std::vector<double> x0 = pcvi::rng::Stream(17).gaussian_vec(20);

  SolverConfig sc = base_solver(1e-300);  // never converges: exactly 100 steps
  sc.max_iter = 100;
  const pt::PerturbationSchedule none;

  const SolveReport base1 = pcvi::solve(problem, AlgorithmId::PC1, sc, none, x0);
  const SolveReport base2 = pcvi::solve(problem, AlgorithmId::PC2, sc, none, x0);
  record_rho("reduction-pc1", AlgorithmId::PC1, sc, base1);
  record_rho("reduction-pc2", AlgorithmId::PC2, sc, base2);
  c.require(base1.trace.size() == 100, "base pc1 recorded " + std::to_string(base1.trace.size()) +
                                           " steps, expected 100");

  pt::PerturbationSchedule outer0;
  outer0.kind = pt::ScheduleKind::Outer;
  outer0.budget = 0.0;
  outer0.seed = 42;
  pt::PerturbationSchedule bounded0;
  bounded0.kind = pt::ScheduleKind::Bounded;
  bounded0.budget = 0.0;
  bounded0.seed = 43;
  pt::PerturbationSchedule inertial0;
  inertial0.kind = pt::ScheduleKind::Inertial;
  inertial0.alpha1 = 0.0;
  inertial0.alpha2 = 0.0;
  inertial0.zeta = 1e6;
  inertial0.xi = 1.0;

  struct Pair {
    AlgorithmId variant;
    const SolveReport* base;
    const pt::PerturbationSchedule* sched;
  };
  const Pair pairs[] = {
      {AlgorithmId::PC1_OP, &base1, &outer0},   {AlgorithmId::PC1_BP, &base1, &bounded0},
      {AlgorithmId::IPC1_1, &base1, &inertial0}, {AlgorithmId::IPC1_2, &base1, &inertial0},
      {AlgorithmId::PC2_OP, &base2, &outer0},   {AlgorithmId::PC2_BP, &base2, &bounded0},
      {AlgorithmId::IPC2_1, &base2, &inertial0}, {AlgorithmId::IPC2_2, &base2, &inertial0},
  };
  for (const Pair& pair : pairs) {
    const SolveReport rep = pcvi::solve(problem, pair.variant, sc, *pair.sched, x0);
    const std::string label = std::string("reduction-") + pcvi::to_string(pair.variant);
    record_rho(label, pair.variant, sc, rep);
    bool identical = rep.trace.size() == pair.base->trace.size() &&
                     rep.final_x == pair.base->final_x;
    for (std::size_t k = 0; identical && k < rep.trace.size(); ++k) {
      const pcvi::IterationRecord& a = rep.trace[k];
      const pcvi::IterationRecord& b = pair.base->trace[k];
      identical = a.x == b.x && a.y == b.y && a.beta == b.beta && a.rho == b.rho;
    }
    c.require(identical, label + " diverged from its base trace");
  }
  c.note("8 zeroed variants match their base over 100 steps");
}

// ---------------------------------------------------------------------------
// 9. Objective gradient vs the mapping by central differences.

void criterion9(Criterion& c) {
  auto inst = std::make_shared<const pb::LassoInstance>(pb::gen_lasso(60, 256, 8, 0.05, 99));
  const pcvi::MapFn F = pb::lasso_mapping(inst);
  pcvi::rng::Stream rng(7);
  double worst_rel = 0.0;
  for (int point = 0; point < 10; ++point) {
    const std::vector<double> x = rng.gaussian_vec(256);
    std::vector<double> g(256);
    F(x, g);

    std::vector<double> fd(256);
    std::vector<double> probe = x;
    for (std::size_t i = 0; i < probe.size(); ++i) {
      const double h = 1e-6 * (1.0 + std::abs(x[i]));
      probe[i] = x[i] + h;
      const double up = pb::lasso_objective(*inst, probe);
      probe[i] = x[i] - h;
      const double down = pb::lasso_objective(*inst, probe);
      probe[i] = x[i];
      fd[i] = (up - down) / (2.0 * h);
    }
    const double rel = kern::nrm2_diff(fd, g) / (1.0 + kern::nrm2(g));
    worst_rel = std::max(worst_rel, rel);
    c.require(rel <= 1e-5,
              "point " + std::to_string(point) + ": relative gradient gap " + fmt(rel));
  }
  c.note("10 points, worst relative gap " + fmt(worst_rel));
}

// ---------------------------------------------------------------------------
// 10. Projection inequalities on 1000 probes per region kind.

void criterion10(Criterion& c) {
  const int dim = 8;
  std::vector<std::pair<std::string, pj::ProjectorSpec>> regions;
  regions.emplace_back("full-space", pj::ProjectorSpec::full_space());
  regions.emplace_back("box", pj::ProjectorSpec::box(std::vector<double>(dim, -0.8),
                                                     std::vector<double>(dim, 1.3)));
  regions.emplace_back("ball", pj::ProjectorSpec::ball(std::vector<double>(dim, 0.1), 1.7));
  regions.emplace_back("l1-ball", pj::ProjectorSpec::l1_ball(2.5));
  regions.emplace_back("halfspace",
                       pj::ProjectorSpec::halfspace(pcvi::rng::Stream(4).gaussian_vec(dim), 0.4));

  double worst = 0.0;  // largest violation across the three inequalities
  for (std::size_t r = 0; r < regions.size(); ++r) {
    const pj::ProjectorSpec& spec = regions[r].second;
    pcvi::rng::Stream rng(500 + r);
    double region_worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
      std::vector<double> x = rng.gaussian_vec(dim);
      std::vector<double> y = rng.gaussian_vec(dim);
      for (double& v : x) v *= 2.0;
      for (double& v : y) v *= 2.0;
      std::vector<double> px(dim), py(dim);
      pj::project(spec, x, px);
      pj::project(spec, y, py);

      std::vector<double> dp(dim), dxy(dim);
      for (int i = 0; i < dim; ++i) {
        dp[i] = px[i] - py[i];
        dxy[i] = x[i] - y[i];
      }
      const double pdist = kern::nrm2(dp);
      const double xydist = kern::nrm2(dxy);
      region_worst = std::max(region_worst, pdist - xydist);                    // nonexpansive
      region_worst = std::max(region_worst, pdist * pdist - kern::dot(dp, dxy));  // firm

      const std::vector<double> z = rng.gaussian_vec(dim);
      const double slack = pj::projection_inequality_slack(spec, x, px, {y, z});
      region_worst = std::max(region_worst, -slack);  // variational characterization
    }
    c.require(region_worst <= 1e-10,
              regions[r].first + ": worst inequality violation " + fmt(region_worst));
    worst = std::max(worst, region_worst);
  }
  c.note("5 region kinds x 1000 probes, worst violation " + fmt(worst));
}

template <typename Fn>
void run(Criterion& c, Fn fn) {
  const auto t0 = std::chrono::steady_clock::now();
  try {
    fn(c);
  } catch (const std::exception& e) {
    c.passed = false;
    c.notes.push_back(std::string("exception: ") + e.what());
  }
  c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (c.budget > 0.0 && c.seconds > c.budget) {
    c.passed = false;
    c.notes.push_back("runtime " + fmt(c.seconds) + " s exceeded the " + fmt(c.budget) +
                      " s budget");
  }
}

}  // namespace

int main() {
  std::vector<Criterion> cs(10);
  const char* names[10] = {
      "l1 projection matches the independent oracle on 1000 random vectors",
      "relaxation ratios stay above their family lower bounds in every run",
      "per-iteration contraction toward the known solution on 20 affine instances",
      "ergodic gap certificate holds and its bound decays as 1/t",
      "bounded and outer perturbed runs land on the unperturbed solution",
      "sparse recovery benchmark hits the expected accuracy and iteration ordering",
      "noisy benchmark objectives agree across algorithms",
      "zeroed perturbation and inertia settings reproduce base traces bitwise",
      "objective gradient matches the mapping by central differences",
      "projection inequalities hold on 1000 probes per region kind",
  };
  const double budgets[10] = {1.0, 0.0, 30.0, 10.0, 120.0, 600.0, 300.0, 0.0, 0.0, 0.0};
  for (int i = 0; i < 10; ++i) {
    cs[i].id = i + 1;
    cs[i].name = names[i];
    cs[i].budget = budgets[i];
  }

  // Criterion 2 consumes the rho evidence of every other solver run, so it is
  // evaluated last; the report still prints in ascending order.
  run(cs[0], criterion1);
  run(cs[9], criterion10);
  run(cs[8], criterion9);
  run(cs[7], criterion8);
  run(cs[2], criterion3);
  run(cs[3], criterion4);
  run(cs[4], criterion5);
  run(cs[5], criterion6);
  run(cs[6], criterion7);
  run(cs[1], criterion2);

  std::printf("pcvi acceptance suite\n");
  int failed = 0;
  for (const Criterion& c : cs) {
    std::printf("[%2d] %s %s (%.2f s)\n", c.id, c.passed ? "PASS" : "FAIL", c.name.c_str(),
                c.seconds);
    for (const std::string& n : c.notes) std::printf("     - %s\n", n.c_str());
    if (!c.passed) ++failed;
  }
  std::printf("acceptance: %d/10 criteria passed\n", 10 - failed);
  return failed == 0 ? 0 : 1;
}
