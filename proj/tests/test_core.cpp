#include <doctest.h>

#include <cmath>
#include <vector>

#include <json.hpp>

#include "pcvi/core.hpp"
#include "pcvi/diagnostics.hpp"

using pcvi::AlgorithmId;
using pcvi::SolverConfig;
using pcvi::SolveStatus;
namespace pt = pcvi::perturbations;

namespace {

/// 2-D monotone field with a strong rotational part over the unit ball.
pcvi::VIProblem rotation_problem() {
  return pcvi::make_problem(
      2,
      [](std::span<const double> in, std::span<double> out) {
        out[0] = 0.5 * in[0] + 1.0 * in[1] - 2.0;
        out[1] = -1.0 * in[0] + 0.5 * in[1];
      },
      pcvi::projections::ProjectorSpec::ball({0.0, 0.0}, 1.0), 1.2);
}

pcvi::VIProblem identity_problem() {
  return pcvi::make_problem(
      1, [](std::span<const double> in, std::span<double> out) { out[0] = in[0]; },
      pcvi::projections::ProjectorSpec::full_space(), 1.0);
}

bool has_audit(const pcvi::SolveReport& rep, const std::string& name) {
  for (const auto& a : rep.audits)
    if (a.name == name) return true;
  return false;
}

}  // namespace

TEST_CASE("algorithm ids round trip and the rho-bound split is exact") {
  const auto& ids = pcvi::all_algorithms();
  CHECK(ids.size() == 12);
  for (const auto id : ids) CHECK(pcvi::parse_algorithm(pcvi::to_string(id)) == id);
  CHECK_THROWS_AS(pcvi::parse_algorithm("pc3"), std::invalid_argument);

  for (const auto id : ids) {
    const bool pc2_form = id == AlgorithmId::PC2_OP || id == AlgorithmId::IPC2_1;
    CHECK(pcvi::uses_pc1_rho_bound(id) == !pc2_form);
  }
}

TEST_CASE("status names are stable") {
  CHECK(std::string(pcvi::to_string(SolveStatus::Converged)) == "converged");
  CHECK(std::string(pcvi::to_string(SolveStatus::MaxIterations)) == "max-iterations");
  CHECK(std::string(pcvi::to_string(SolveStatus::DegenerateStep)) == "degenerate-step");
  CHECK(std::string(pcvi::to_string(SolveStatus::AuditFailure)) == "audit-failure");
}

TEST_CASE("problem construction validates its pieces") {
  const auto ok = [](std::span<const double> in, std::span<double> out) { out[0] = in[0]; };
  CHECK_THROWS_AS(pcvi::make_problem(0, ok, pcvi::projections::ProjectorSpec::full_space()),
                  std::invalid_argument);
  CHECK_THROWS_AS(pcvi::make_problem(1, {}, pcvi::projections::ProjectorSpec::full_space()),
                  std::invalid_argument);
  CHECK_THROWS_AS(pcvi::make_problem(1, ok, pcvi::projections::ProjectorSpec::box({1.0}, {0.0})),
                  std::invalid_argument);
  CHECK_NOTHROW(pcvi::make_problem(1, ok, pcvi::projections::ProjectorSpec::l1_ball(2.0)));
}

TEST_CASE("config validation covers ranges, mu caps and schedule compatibility") {
  SolverConfig cfg;
  const pt::PerturbationSchedule none{};

  SUBCASE("scalar ranges") {
    auto bad = cfg;
    bad.epsilon = 0.0;
    CHECK_THROWS_AS(pcvi::validate_config(bad, AlgorithmId::PC1, none), std::invalid_argument);
    bad = cfg;
    bad.gamma = 0.0;
    CHECK_THROWS_AS(pcvi::validate_config(bad, AlgorithmId::PC1, none), std::invalid_argument);
    bad = cfg;
    bad.gamma = 2.0;
    CHECK_THROWS_AS(pcvi::validate_config(bad, AlgorithmId::PC1, none), std::invalid_argument);
    bad = cfg;
    bad.nu = 1.0;
    CHECK_THROWS_AS(pcvi::validate_config(bad, AlgorithmId::PC1, none), std::invalid_argument);
    bad = cfg;
    bad.max_iter = -1;
    CHECK_THROWS_AS(pcvi::validate_config(bad, AlgorithmId::PC1, none), std::invalid_argument);
    bad = cfg;
    bad.degenerate_tol = -1e-3;
    CHECK_THROWS_AS(pcvi::validate_config(bad, AlgorithmId::PC1, none), std::invalid_argument);
    CHECK_NOTHROW(pcvi::validate_config(cfg, AlgorithmId::PC1, none));
  }

  SUBCASE("mu caps") {
    auto c = cfg;
    c.nu = 0.5;
    c.mu = 0.5;  // = 1 - nu
    CHECK_THROWS_AS(pcvi::validate_config(c, AlgorithmId::PC2_OP, none), std::invalid_argument);
    c.mu = 0.49;
    CHECK_NOTHROW(pcvi::validate_config(c, AlgorithmId::PC2_OP, none));
    // the same mu passes pc1 variants untouched
    c.mu = 0.8;
    CHECK_NOTHROW(pcvi::validate_config(c, AlgorithmId::PC1_OP, none));

    c = cfg;
    c.nu = 0.3;
    c.mu = 0.3;  // = min(nu, 1 - nu), here capped by nu itself
    CHECK_THROWS_AS(pcvi::validate_config(c, AlgorithmId::IPC2_1, none), std::invalid_argument);
    c.mu = 0.29;
    CHECK_NOTHROW(pcvi::validate_config(c, AlgorithmId::IPC2_1, none));
    c.nu = 0.7;
    c.mu = 0.31;  // above 1 - nu
    CHECK_THROWS_AS(pcvi::validate_config(c, AlgorithmId::IPC2_1, none), std::invalid_argument);
    c.mu = 0.29;
    CHECK_NOTHROW(pcvi::validate_config(c, AlgorithmId::IPC2_1, none));
    // the negative sentinel selects 0.99 min(nu, 1 - nu), always admissible
    c.mu = -1.0;
    CHECK_NOTHROW(pcvi::validate_config(c, AlgorithmId::IPC2_1, none));
    CHECK_NOTHROW(pcvi::validate_config(c, AlgorithmId::PC2_OP, none));
  }

  SUBCASE("schedule kinds must match the family") {
    pt::PerturbationSchedule outer;
    outer.kind = pt::ScheduleKind::Outer;
    pt::PerturbationSchedule bounded;
    bounded.kind = pt::ScheduleKind::Bounded;
    pt::PerturbationSchedule inertial;
    inertial.kind = pt::ScheduleKind::Inertial;
    inertial.alpha1 = 0.4;
    inertial.alpha2 = 0.4;

    CHECK_THROWS_AS(pcvi::validate_config(cfg, AlgorithmId::PC1, outer), std::invalid_argument);
    CHECK_THROWS_AS(pcvi::validate_config(cfg, AlgorithmId::EG, inertial), std::invalid_argument);
    CHECK_THROWS_AS(pcvi::validate_config(cfg, AlgorithmId::PC1_OP, bounded),
                    std::invalid_argument);
    CHECK_THROWS_AS(pcvi::validate_config(cfg, AlgorithmId::PC1_BP, inertial),
                    std::invalid_argument);
    CHECK_THROWS_AS(pcvi::validate_config(cfg, AlgorithmId::IPC1_1, outer), std::invalid_argument);

    CHECK_NOTHROW(pcvi::validate_config(cfg, AlgorithmId::PC1_OP, outer));
    CHECK_NOTHROW(pcvi::validate_config(cfg, AlgorithmId::PC1_OP, none));
    CHECK_NOTHROW(pcvi::validate_config(cfg, AlgorithmId::PC2_BP, bounded));
    CHECK_NOTHROW(pcvi::validate_config(cfg, AlgorithmId::IPC1_2, inertial));

    auto bad = outer;
    bad.budget = -1.0;
    CHECK_THROWS_AS(pcvi::validate_config(cfg, AlgorithmId::PC1_OP, bad), std::invalid_argument);
    auto bad2 = inertial;
    bad2.alpha1 = 1.0;
    CHECK_THROWS_AS(pcvi::validate_config(cfg, AlgorithmId::IPC1_2, bad2), std::invalid_argument);
    auto bad3 = inertial;
    bad3.xi = 0.0;
    CHECK_THROWS_AS(pcvi::validate_config(cfg, AlgorithmId::IPC1_2, bad3), std::invalid_argument);
  }

  SUBCASE("the constant-factor variant must respect its gamma bound") {
    pt::PerturbationSchedule r56;
    r56.kind = pt::ScheduleKind::Inertial;
    r56.alpha1 = 0.2;
    r56.sigma_r = 0.01;
    r56.delta_r = 1.8;  // gamma_max about 1.0255
    auto c = cfg;
    c.gamma = 1.02;
    CHECK_NOTHROW(pcvi::validate_config(c, AlgorithmId::IPC1_R56, r56));
    c.gamma = 1.2;
    CHECK_THROWS_AS(pcvi::validate_config(c, AlgorithmId::IPC1_R56, r56), std::invalid_argument);
  }
}

TEST_CASE("the natural residual vanishes only at solutions") {
  const auto problem = rotation_problem();
  // x* for this field lies on the ball boundary toward the pull (2, 0)
  SolverConfig cfg;
  cfg.epsilon = 1e-12;
  const auto rep = pcvi::solve(problem, AlgorithmId::PC1, cfg, {}, std::vector<double>{0.0, 0.0});
  REQUIRE(rep.status == SolveStatus::Converged);
  CHECK(pcvi::residual(problem, rep.final_x, 1.0) <= 1e-9);
  CHECK(pcvi::residual(problem, std::vector<double>{0.0, 0.0}, 1.0) > 0.1);
  CHECK_THROWS_AS(pcvi::residual(problem, rep.final_x, 0.0), std::invalid_argument);
}

TEST_CASE("solve reports convergence with full bookkeeping") {
  const auto problem = rotation_problem();
  SolverConfig cfg;
  cfg.epsilon = 1e-8;
  const std::vector<double> x0 = {0.0, 0.0};
  const auto rep = pcvi::solve(problem, AlgorithmId::PC1, cfg, {}, x0);

  CHECK(rep.status == SolveStatus::Converged);
  CHECK(rep.algorithm == "pc1");
  CHECK(rep.iterations > 0);
  CHECK(rep.trace.size() == static_cast<std::size_t>(rep.iterations));
  CHECK(rep.final_residual <= cfg.epsilon);
  CHECK(rep.x0 == x0);
  CHECK(rep.final_x.size() == 2);
  CHECK(rep.upsilon > 0.0);
  REQUIRE(rep.ergodic_x.size() == 2);
  CHECK(rep.ergodic_e1_offset.empty());  // no perturbations anywhere
  CHECK(rep.rate_bound > 0.0);
  CHECK(rep.min_rho >= pcvi::diagnostics::rho_lower_bound_pc1(cfg.nu) - 1e-10);
  CHECK(rep.sum_e1_norm == 0.0);
  CHECK(rep.sum_e2_norm == 0.0);
  CHECK(rep.wall_ms >= 0.0);

  REQUIRE(rep.audits_passed());
  CHECK(has_audit(rep, "rho-lower-bound"));
  CHECK(has_audit(rep, "trial-feasible"));
  CHECK(has_audit(rep, "upsilon-positive"));
  CHECK_FALSE(has_audit(rep, "perturbation-budget"));
  CHECK_FALSE(has_audit(rep, "inertial-target-cap"));

  // the ergodic point matches the diagnostics-side recomputation
  const auto y = pcvi::diagnostics::ergodic_point(rep.trace);
  REQUIRE(y.size() == 2);
  CHECK(y[0] == doctest::Approx(rep.ergodic_x[0]).epsilon(1e-12));
  CHECK(y[1] == doctest::Approx(rep.ergodic_x[1]).epsilon(1e-12));
}

TEST_CASE("solve hits the iteration cap and handles trivial caps") {
  const auto problem = rotation_problem();
  SolverConfig cfg;
  cfg.epsilon = 1e-16;
  cfg.max_iter = 3;
  const auto rep = pcvi::solve(problem, AlgorithmId::PC2, cfg, {}, std::vector<double>{0.0, 0.0});
  CHECK(rep.status == SolveStatus::MaxIterations);
  CHECK(rep.iterations == 3);

  cfg.max_iter = 0;
  const auto empty = pcvi::solve(problem, AlgorithmId::PC2, cfg, {}, std::vector<double>{0.0, 0.0});
  CHECK(empty.status == SolveStatus::MaxIterations);
  CHECK(empty.iterations == 0);
  CHECK(empty.trace.empty());
  CHECK(empty.upsilon == 0.0);
  CHECK(empty.rate_bound == 0.0);
  CHECK(empty.ergodic_x.empty());
  CHECK(empty.audits_passed());  // vacuous audits pass on an empty trace
}

TEST_CASE("a solved start converges in one certified step") {
  const auto problem = identity_problem();
  SolverConfig cfg;
  const auto rep = pcvi::solve(problem, AlgorithmId::PC1, cfg, {}, std::vector<double>{0.0});
  CHECK(rep.status == SolveStatus::Converged);
  CHECK(rep.iterations == 1);
  CHECK(rep.final_residual == 0.0);
  CHECK(rep.upsilon == 0.0);  // the certified step carries rho = 0
  CHECK(rep.audits_passed());
}

TEST_CASE("an uncertified vanishing d reports a degenerate step") {
  const auto problem = identity_problem();
  SolverConfig cfg;
  cfg.sigma_ls = 0.5;
  cfg.backtrack = 0.5;
  cfg.degenerate_tol = 0.5;
  const auto rep = pcvi::solve(problem, AlgorithmId::PC1, cfg, {}, std::vector<double>{2.0});
  CHECK(rep.status == SolveStatus::DegenerateStep);
  CHECK(rep.iterations == 1);
  CHECK(rep.final_x[0] == 2.0);
}

TEST_CASE("trace recording and audits can be switched off") {
  const auto problem = rotation_problem();
  SolverConfig cfg;
  cfg.epsilon = 1e-8;
  cfg.record_trace = false;
  const auto rep = pcvi::solve(problem, AlgorithmId::PC1, cfg, {}, std::vector<double>{0.0, 0.0});
  CHECK(rep.status == SolveStatus::Converged);
  CHECK(rep.trace.empty());
  CHECK(rep.upsilon > 0.0);  // accumulation does not depend on the trace
  CHECK_FALSE(rep.ergodic_x.empty());

  auto cfg2 = cfg;
  cfg2.record_trace = true;
  cfg2.audit = false;
  const auto rep2 = pcvi::solve(problem, AlgorithmId::PC1, cfg2, {}, std::vector<double>{0.0, 0.0});
  CHECK(rep2.audits.empty());
}

TEST_CASE("solve validates its inputs") {
  const auto problem = rotation_problem();
  SolverConfig cfg;
  CHECK_THROWS_AS(pcvi::solve(problem, AlgorithmId::PC1, cfg, {}, std::vector<double>{0.0}),
                  std::invalid_argument);  // dimension mismatch
  const double nan = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(pcvi::solve(problem, AlgorithmId::PC1, cfg, {}, std::vector<double>{nan, 0.0}),
                  std::invalid_argument);
  pt::PerturbationSchedule outer;
  outer.kind = pt::ScheduleKind::Outer;
  CHECK_THROWS_AS(pcvi::solve(problem, AlgorithmId::PC1, cfg, outer, std::vector<double>{0.0, 0.0}),
                  std::invalid_argument);
  pcvi::VIProblem blank;
  CHECK_THROWS_AS(pcvi::solve(blank, AlgorithmId::PC1, cfg, {}, std::vector<double>{}),
                  std::invalid_argument);
}

TEST_CASE("outer perturbations are budgeted and audited through solve") {
  const auto problem = rotation_problem();
  SolverConfig cfg;
  cfg.epsilon = 1e-8;
  pt::PerturbationSchedule sched;
  sched.kind = pt::ScheduleKind::Outer;
  sched.seed = 7;
  sched.budget = 0.5;
  const auto rep =
      pcvi::solve(problem, AlgorithmId::PC1_OP, cfg, sched, std::vector<double>{0.0, 0.0});
  CHECK(rep.status == SolveStatus::Converged);
  CHECK(rep.sum_e1_norm > 0.0);
  CHECK(rep.sum_e1_norm <= 0.5 * (1.0 + 1e-9));
  CHECK(rep.sum_e2_norm <= 0.5 * (1.0 + 1e-9));
  CHECK(has_audit(rep, "perturbation-budget"));
  CHECK(rep.audits_passed());
  CHECK_FALSE(rep.ergodic_e1_offset.empty());
  CHECK(rep.sum_rho_beta_e1 > 0.0);

  // replaying the same seed reproduces the run exactly
  const auto again =
      pcvi::solve(problem, AlgorithmId::PC1_OP, cfg, sched, std::vector<double>{0.0, 0.0});
  CHECK(again.final_x == rep.final_x);
  CHECK(again.iterations == rep.iterations);
}

TEST_CASE("bounded and inertial runs carry their own audits") {
  const auto problem = rotation_problem();
  SolverConfig cfg;
  cfg.epsilon = 1e-8;

  pt::PerturbationSchedule bp;
  bp.kind = pt::ScheduleKind::Bounded;
  bp.seed = 7;
  bp.budget = 1.0;
  const auto rep =
      pcvi::solve(problem, AlgorithmId::PC2_BP, cfg, bp, std::vector<double>{0.0, 0.0});
  CHECK(rep.status == SolveStatus::Converged);
  CHECK(rep.sum_e1_norm <= 1.6449340668482264 * (1.0 + 1e-9));
  CHECK(has_audit(rep, "perturbation-budget"));
  CHECK(rep.audits_passed());

  pt::PerturbationSchedule in;
  in.kind = pt::ScheduleKind::Inertial;
  in.alpha1 = 0.8;
  const auto irep =
      pcvi::solve(problem, AlgorithmId::IPC2_2, cfg, in, std::vector<double>{0.0, 0.0});
  CHECK(irep.status == SolveStatus::Converged);
  CHECK(has_audit(irep, "inertial-target-cap"));
  CHECK(irep.audits_passed());
  for (const auto& rec : irep.trace) CHECK(rec.alpha <= 0.8 * (1.0 + 1e-12));
}

TEST_CASE("reports serialize to json with stable keys") {
  const auto problem = identity_problem();
  SolverConfig cfg;
  const auto rep = pcvi::solve(problem, AlgorithmId::PC1, cfg, {}, std::vector<double>{1.0});
  const nlohmann::json j = rep;
  for (const char* key :
       {"status", "algorithm", "iterations", "x0", "final_x", "final_residual", "ergodic_x",
        "upsilon", "min_rho", "sum_e1_norm", "sum_e2_norm", "sum_rho_beta_e1", "rate_bound",
        "audits", "trace", "wall_ms"}) {
    CAPTURE(key);
    CHECK(j.contains(key));
  }
  CHECK(j["status"] == "converged");
  CHECK(j["algorithm"] == "pc1");
  REQUIRE(j["trace"].is_array());
  REQUIRE(!j["trace"].empty());
  for (const char* key : {"k", "x", "y", "beta", "rho", "alpha", "residual", "e1_norm", "e2_norm"}) {
    CAPTURE(key);
    CHECK(j["trace"][0].contains(key));
  }
  REQUIRE(j["audits"].is_array());
  REQUIRE(!j["audits"].empty());
  CHECK(j["audits"][0].contains("name"));
  CHECK(j["audits"][0].contains("passed"));

  pcvi::SolveReport failing;
  failing.audits.push_back({"fake", false, -1.0, 3});
  CHECK_FALSE(failing.audits_passed());
}
