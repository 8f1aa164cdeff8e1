#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "pcvi/core.hpp"
#include "pcvi/projections.hpp"

namespace pcvi::problems {

/// Policy for the l1 radius of the generated feasible set.
enum class TPolicy {
  ExactL1,  ///< t = ||x_true||_1, so the planted signal sits on the boundary.
  Scalar,   ///< t supplied by the caller.
};

const char* to_string(TPolicy p);
TPolicy parse_t_policy(const std::string& s);

struct LassoOptions {
  TPolicy t_policy = TPolicy::ExactL1;
  double t_scalar = 0.0;          ///< used when t_policy == Scalar
  double amplitude_jitter = 0.0;  ///< nonzero magnitudes drawn from 1 +/- jitter
  /// When true, noise_beta is read as a variance and the noise standard
  /// deviation becomes sqrt(noise_beta); default reads it as the standard
  /// deviation directly.
  bool noise_as_variance = false;
};

/// Sparse-recovery instance: recover a K-sparse signal from m < n Gaussian
/// measurements by minimizing 1/2 ||Ax-b||^2 over the l1 ball of radius t.
struct LassoInstance {
  int m = 0;
  int n = 0;
  int K = 0;
  double noise_beta = 0.0;
  std::uint64_t seed = 0;
  double t = 0.0;
  LassoOptions options{};

  std::vector<double> A;       ///< m x n, row-major
  std::vector<double> At;      ///< n x m, row-major transpose copy for column access
  std::vector<double> b;       ///< length m
  std::vector<double> x_true;  ///< length n, exactly K nonzeros
  double lipschitz = 0.0;      ///< power-iteration estimate of ||A||_2^2
};

/// Deterministic generator. A has i.i.d. standard Gaussian entries, the
/// support of x_true is uniform without replacement, nonzero entries are
/// signed spikes, and b = A x_true + e with e seeded Gaussian of scale
/// noise_beta (e identically zero when noise_beta == 0).
///
/// Requires 1 <= m < n and 0 <= K <= n.
LassoInstance gen_lasso(int m, int n, int K, double noise_beta, std::uint64_t seed,
                        const LassoOptions& options = {});

/// 1/2 ||Ax - b||^2. Throws on dimension mismatch.
double lasso_objective(const LassoInstance& inst, std::span<const double> x);

/// ||x - x_true||_2, the recovery error reported in benchmark tables.
double lasso_error(const LassoInstance& inst, std::span<const double> x);

/// Evaluator for F(x) = A^T (Ax - b). Skips zero entries of x when the input
/// is sparse enough for the column-gather product to win.
MapFn lasso_mapping(std::shared_ptr<const LassoInstance> inst);

/// Full problem wrapper: mapping, l1-ball projector (a singleton box when
/// t == 0), Lipschitz hint and objective.
VIProblem make_vi(std::shared_ptr<const LassoInstance> inst);
VIProblem make_vi(LassoInstance inst);

/// Writes A.bin / b.bin / x_true.bin (raw little-endian doubles, A row-major)
/// plus meta.json into dir. Creates the directory if needed.
void save_lasso(const LassoInstance& inst, const std::string& dir);

/// Inverse of save_lasso; rebuilds the transpose copy and validates sizes.
LassoInstance load_lasso(const std::string& dir);

/// Small affine monotone VI with an oracle solution, used by property tests.
/// F(x) = Mx + q with M = P^T P + skew_weight (S - S^T), so M + M^T is
/// positive semidefinite by construction.
struct AffineVIInstance {
  int n = 0;
  double skew_weight = 0.0;
  std::uint64_t seed = 0;
  std::vector<double> M;  ///< n x n, row-major
  std::vector<double> q;  ///< length n
  projections::ProjectorSpec C{};
  std::vector<double> x_star;  ///< oracle solution, Minty-validated
  double lipschitz = 0.0;      ///< ||M||_2 estimate
};

/// Deterministic generator; kind selects the feasible set (full-space, the
/// box [-1,1]^n, or the unit-radius ball at the origin). The oracle solution
/// is computed by the independent oracle module and validated there; a
/// failed validation propagates as a generation error.
///
/// Requires 1 <= n <= 50.
AffineVIInstance gen_affine_vi(int n, double skew_weight, projections::Kind kind,
                               std::uint64_t seed);

/// Evaluator for F(x) = Mx + q.
MapFn affine_mapping(std::shared_ptr<const AffineVIInstance> inst);

VIProblem make_vi(std::shared_ptr<const AffineVIInstance> inst);
VIProblem make_vi(AffineVIInstance inst);

}  // namespace pcvi::problems
