#include "pcvi/projections.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include "pcvi/kernels.hpp"

namespace pcvi::projections {

const char* to_string(Kind k) {
  switch (k) {
    case Kind::FullSpace: return "full-space";
    case Kind::Box: return "box";
    case Kind::Ball: return "ball";
    case Kind::L1Ball: return "l1-ball";
    case Kind::Halfspace: return "halfspace";
  }
  return "unknown";
}

Kind parse_kind(const std::string& s) {
  if (s == "full-space") return Kind::FullSpace;
  if (s == "box") return Kind::Box;
  if (s == "ball") return Kind::Ball;
  if (s == "l1-ball") return Kind::L1Ball;
  if (s == "halfspace") return Kind::Halfspace;
  throw std::invalid_argument("unknown projector kind: " + s);
}

ProjectorSpec ProjectorSpec::full_space() { return {}; }

ProjectorSpec ProjectorSpec::box(std::vector<double> lo, std::vector<double> hi) {
  ProjectorSpec s;
  s.kind = Kind::Box;
  s.lo = std::move(lo);
  s.hi = std::move(hi);
  return s;
}

ProjectorSpec ProjectorSpec::ball(std::vector<double> center, double radius) {
  ProjectorSpec s;
  s.kind = Kind::Ball;
  s.center = std::move(center);
  s.radius = radius;
  return s;
}

ProjectorSpec ProjectorSpec::l1_ball(double t) {
  ProjectorSpec s;
  s.kind = Kind::L1Ball;
  s.t = t;
  return s;
}

ProjectorSpec ProjectorSpec::halfspace(std::vector<double> a, double b) {
  ProjectorSpec s;
  s.kind = Kind::Halfspace;
  s.a = std::move(a);
  s.b = b;
  return s;
}

void project_l1_ball(std::span<const double> v, double t, std::span<double> out) {
  assert(v.size() == out.size());
  if (!(t > 0.0)) throw std::invalid_argument("project_l1_ball: radius t must be positive");
  if (v.empty()) return;
  if (kernels::nrm1(v) <= t) {
    std::copy(v.begin(), v.end(), out.begin());
    return;
  }
  // Sorted magnitudes u_1 >= ... >= u_n. The active count is the largest j
  // with u_j > (sum_{i<=j} u_i - t) / j; theta is that ratio at the largest j.
  std::vector<double> u(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) u[i] = std::fabs(v[i]);
  std::sort(u.begin(), u.end(), std::greater<double>());
  double cumsum = 0.0;
  double theta = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    cumsum += u[j];
    const double candidate = (cumsum - t) / static_cast<double>(j + 1);
    if (u[j] > candidate) theta = candidate;
  }
  if (theta < 0.0) theta = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double mag = std::fabs(v[i]) - theta;
    out[i] = mag > 0.0 ? (v[i] > 0.0 ? mag : -mag) : 0.0;
  }
}

void validate(const ProjectorSpec& spec, std::size_t dim) {
  switch (spec.kind) {
    case Kind::FullSpace:
      return;
    case Kind::Box: {
      if (spec.lo.size() != dim || spec.hi.size() != dim)
        throw std::invalid_argument("box projector: bound sizes must match the dimension");
      for (std::size_t i = 0; i < dim; ++i)
        if (!(spec.lo[i] <= spec.hi[i]))
          throw std::invalid_argument("box projector: requires lo <= hi");
      return;
    }
    case Kind::Ball: {
      if (spec.center.size() != dim)
        throw std::invalid_argument("ball projector: center size must match the dimension");
      if (!(spec.radius > 0.0)) throw std::invalid_argument("ball projector: radius must be positive");
      return;
    }
    case Kind::L1Ball: {
      if (!(spec.t > 0.0)) throw std::invalid_argument("l1-ball projector: t must be positive");
      return;
    }
    case Kind::Halfspace: {
      if (spec.a.size() != dim)
        throw std::invalid_argument("halfspace projector: normal size must match the dimension");
      if (kernels::nrm2(spec.a) == 0.0)
        throw std::invalid_argument("halfspace projector: normal must be nonzero");
      return;
    }
  }
}

void project(const ProjectorSpec& spec, std::span<const double> v, std::span<double> out) {
  assert(v.size() == out.size());
  switch (spec.kind) {
    case Kind::FullSpace: {
      std::copy(v.begin(), v.end(), out.begin());
      return;
    }
    case Kind::Box: {
      assert(spec.lo.size() == v.size() && spec.hi.size() == v.size());
      for (std::size_t i = 0; i < v.size(); ++i)
        out[i] = std::min(std::max(v[i], spec.lo[i]), spec.hi[i]);
      return;
    }
    case Kind::Ball: {
      assert(spec.center.size() == v.size());
      const double dist = kernels::nrm2_diff(v, spec.center);
      if (dist <= spec.radius) {
        std::copy(v.begin(), v.end(), out.begin());
        return;
      }
      const double scale = spec.radius / dist;
      for (std::size_t i = 0; i < v.size(); ++i)
        out[i] = spec.center[i] + scale * (v[i] - spec.center[i]);
      return;
    }
    case Kind::L1Ball: {
      project_l1_ball(v, spec.t, out);
      return;
    }
    case Kind::Halfspace: {
      assert(spec.a.size() == v.size());
      const double excess = kernels::dot(spec.a, v) - spec.b;
      if (excess <= 0.0) {
        std::copy(v.begin(), v.end(), out.begin());
        return;
      }
      const double an2 = kernels::dot(spec.a, spec.a);
      const double scale = excess / an2;
      for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] - scale * spec.a[i];
      return;
    }
  }
}

bool contains(const ProjectorSpec& spec, std::span<const double> x, double tol) {
  switch (spec.kind) {
    case Kind::FullSpace:
      return true;
    case Kind::Box: {
      for (std::size_t i = 0; i < x.size(); ++i)
        if (x[i] < spec.lo[i] - tol || x[i] > spec.hi[i] + tol) return false;
      return true;
    }
    case Kind::Ball:
      return kernels::nrm2_diff(x, spec.center) <= spec.radius + tol;
    case Kind::L1Ball:
      return kernels::nrm1(x) <= spec.t + tol;
    case Kind::Halfspace:
      return kernels::dot(spec.a, x) <= spec.b + tol;
  }
  return false;
}

double feasibility_violation(const ProjectorSpec& spec, std::span<const double> x) {
  switch (spec.kind) {
    case Kind::FullSpace:
      return 0.0;
    case Kind::Box: {
      double worst = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) {
        worst = std::max(worst, spec.lo[i] - x[i]);
        worst = std::max(worst, x[i] - spec.hi[i]);
      }
      return worst;
    }
    case Kind::Ball:
      return std::max(0.0, kernels::nrm2_diff(x, spec.center) - spec.radius);
    case Kind::L1Ball:
      return std::max(0.0, kernels::nrm1(x) - spec.t);
    case Kind::Halfspace:
      return std::max(0.0, kernels::dot(spec.a, x) - spec.b);
  }
  return 0.0;
}

double projection_inequality_slack(const ProjectorSpec& spec, std::span<const double> x,
                                   std::span<const double> px,
                                   const std::vector<std::vector<double>>& candidates) {
  std::vector<double> r(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) r[i] = x[i] - px[i];
  std::vector<double> y(x.size());
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& c : candidates) {
    if (c.size() != x.size())
      throw std::invalid_argument("projection_inequality_slack: candidate dimension mismatch");
    project(spec, c, y);
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += r[i] * (px[i] - y[i]);
    worst = std::min(worst, s);
  }
  return worst;
}

}  // namespace pcvi::projections
