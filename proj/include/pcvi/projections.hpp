#pragma once

#include <span>
#include <string>
#include <vector>

namespace pcvi::projections {

enum class Kind { FullSpace, Box, Ball, L1Ball, Halfspace };

const char* to_string(Kind k);
Kind parse_kind(const std::string& s);

/// Declarative description of the feasible set C.
struct ProjectorSpec {
  Kind kind = Kind::FullSpace;
  // Box: lo <= x <= hi, elementwise.
  std::vector<double> lo, hi;
  // Ball: ||x - center|| <= radius.
  std::vector<double> center;
  double radius = 0.0;
  // L1Ball: ||x||_1 <= t, t > 0.
  double t = 0.0;
  // Halfspace: <a, x> <= b, a != 0.
  std::vector<double> a;
  double b = 0.0;

  static ProjectorSpec full_space();
  static ProjectorSpec box(std::vector<double> lo, std::vector<double> hi);
  static ProjectorSpec ball(std::vector<double> center, double radius);
  static ProjectorSpec l1_ball(double t);
  static ProjectorSpec halfspace(std::vector<double> a, double b);
};

/// Euclidean projection onto {x : ||x||_1 <= t}, t > 0. Exact sort-based
/// threshold selection: when ||v||_1 > t, finds theta >= 0 with
/// sum_i max(|v_i| - theta, 0) = t and soft-thresholds. Coordinates with
/// |v_i| <= theta map to exactly 0.
void project_l1_ball(std::span<const double> v, double t, std::span<double> out);

/// Projection onto the set a ProjectorSpec describes.
void project(const ProjectorSpec& spec, std::span<const double> v, std::span<double> out);

/// Membership test with absolute tolerance on the defining inequality.
bool contains(const ProjectorSpec& spec, std::span<const double> x, double tol);

/// Largest excess over the defining constraints; 0 when x lies in C.
double feasibility_violation(const ProjectorSpec& spec, std::span<const double> x);

/// Validates a ProjectorSpec against a dimension; throws std::invalid_argument
/// on inconsistent sizes or parameters.
void validate(const ProjectorSpec& spec, std::size_t dim);

/// Worst slack of <x - Px, Px - y> over the candidate points y, each projected
/// onto C first. The projection characterization makes the slack nonnegative
/// up to roundoff for every feasible y.
double projection_inequality_slack(const ProjectorSpec& spec, std::span<const double> x,
                                   std::span<const double> px,
                                   const std::vector<std::vector<double>>& candidates);

}  // namespace pcvi::projections
