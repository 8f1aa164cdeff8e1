#include "pcvi/linesearch.hpp"

#include <cassert>
#include <cmath>
#include <string>

#include "pcvi/kernels.hpp"

namespace pcvi::linesearch {

void validate(const LineSearchParams& p) {
  if (!(p.nu > 0.0 && p.nu < 1.0))
    throw std::invalid_argument("line search: nu must lie in (0, 1)");
  if (!(p.sigma > 0.0)) throw std::invalid_argument("line search: sigma must be positive");
  if (!(p.backtrack > 0.0 && p.backtrack < 1.0))
    throw std::invalid_argument("line search: backtrack factor must lie in (0, 1)");
  if (p.max_backtracks < 0)
    throw std::invalid_argument("line search: max_backtracks must be nonnegative");
}

namespace {

struct Trial {
  double beta = 0.0;
  std::vector<double> y;
  std::vector<double> Fy;
  double dist = 0.0;  // ||w - y||
  bool pass = false;
};

}  // namespace

LineSearchResult backtrack_beta(const VIProblem& problem, std::span<const double> w,
                                std::span<const double> Fw, const LineSearchParams& params,
                                double degenerate_tol, std::span<const double> e1, int hint) {
  validate(params);
  assert(w.size() == static_cast<std::size_t>(problem.dim));
  assert(Fw.size() == w.size());
  assert(e1.empty() || e1.size() == w.size());

  const std::size_t n = w.size();
  std::vector<double> input(n);
  int evals = 0;

  auto evaluate = [&](int m) {
    Trial t;
    t.beta = params.sigma * std::pow(params.backtrack, m);
    for (std::size_t i = 0; i < n; ++i) input[i] = w[i] - t.beta * Fw[i];
    if (!e1.empty())
      for (std::size_t i = 0; i < n; ++i) input[i] += e1[i];
    t.y.resize(n);
    problem.project(input, t.y);
    t.Fy.resize(n);
    problem.F(t.y, t.Fy);
    t.dist = kernels::nrm2_diff(w, t.y);
    const double lhs = t.beta * kernels::nrm2_diff(Fw, t.Fy);
    t.pass = lhs <= params.nu * t.dist;
    ++evals;
    return t;
  };

  const int cap = params.max_backtracks;
  int lo = -1;  // largest known failing exponent (-1: none below zero)
  int hi = -1;  // smallest known passing exponent
  Trial hi_trial;

  auto adopt = [&](int m, Trial&& t) {
    hi = m;
    hi_trial = std::move(t);
  };

  if (hint >= 0 && hint <= cap) {
    Trial t = evaluate(hint);
    if (t.pass) {
      // Gallop downward; the boundary is usually within a step or two of the
      // previous iteration's exponent.
      adopt(hint, std::move(t));
      int step = 1;
      while (hi > 0 && lo < hi - 1) {
        const int m = std::max(hint - step, 0);
        Trial below = evaluate(m);
        if (below.pass)
          adopt(m, std::move(below));
        else {
          lo = m;
          break;
        }
        step *= 2;
      }
    } else {
      lo = hint;
    }
  }

  if (hi < 0) {
    // Gallop upward from the last known failure until a trial passes.
    if (lo < 0) {
      Trial t = evaluate(0);
      if (t.pass)
        adopt(0, std::move(t));
      else
        lo = 0;
    }
    int step = 1;
    while (hi < 0 && lo < cap) {
      const int m = std::min(lo + step, cap);
      Trial t = evaluate(m);
      if (t.pass)
        adopt(m, std::move(t));
      else
        lo = m;
      step *= 2;
    }
    if (hi < 0)
      throw LineSearchError(
          "backtrack_beta: no step within " + std::to_string(cap) +
          " backtracks satisfies the acceptance condition (final beta " +
          std::to_string(params.sigma * std::pow(params.backtrack, cap)) + ")");
  }

  // Bisect to the boundary: hi passes, lo fails, adjacent at exit.
  while (hi - lo > 1) {
    const int mid = lo + (hi - lo) / 2;
    Trial t = evaluate(mid);
    if (t.pass)
      adopt(mid, std::move(t));
    else
      lo = mid;
  }

  LineSearchResult r;
  r.beta = hi_trial.beta;
  r.y = std::move(hi_trial.y);
  r.Fy = std::move(hi_trial.Fy);
  r.dist = hi_trial.dist;
  r.degenerate = hi_trial.dist <= degenerate_tol;
  r.trials = r.degenerate ? -hi : hi;
  r.evals = evals;
  return r;
}

LineSearchResult backtrack_beta(const VIProblem& problem, std::span<const double> w,
                                const LineSearchParams& params) {
  std::vector<double> Fw(w.size());
  problem.F(w, Fw);
  const double tol = 1e-14 * (1.0 + kernels::nrm2(w));
  return backtrack_beta(problem, w, Fw, params, tol, {}, -1);
}

}  // namespace pcvi::linesearch
