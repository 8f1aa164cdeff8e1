#include "pcvi/problems.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "pcvi/kernels.hpp"
#include "pcvi/oracle.hpp"
#include "pcvi/rng.hpp"

namespace pcvi::problems {

namespace {

// Substream slots for the independent draws of one instance.
constexpr std::uint64_t kSlotMatrix = 1;
constexpr std::uint64_t kSlotSignal = 2;
constexpr std::uint64_t kSlotNoise = 3;
constexpr std::uint64_t kSlotPower = 4;

std::vector<double> transpose(const std::vector<double>& A, int m, int n) {
  std::vector<double> At(A.size());
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) At[static_cast<std::size_t>(j) * m + i] = A[static_cast<std::size_t>(i) * n + j];
  return At;
}

/// Largest eigenvalue of the symmetric map v -> Op(v) by power iteration with
/// a seeded start, run to a 1e-13 relative Rayleigh-quotient plateau.
template <typename Op>
double power_iteration(int n, std::uint64_t seed, Op&& op) {
  rng::Stream stream(seed);
  std::vector<double> v = stream.gaussian_vec(static_cast<std::size_t>(n));
  std::vector<double> w(static_cast<std::size_t>(n));
  double nv = kernels::nrm2(v);
  if (nv == 0.0) {
    v.assign(static_cast<std::size_t>(n), 0.0);
    v[0] = 1.0;
    nv = 1.0;
  }
  kernels::scal(1.0 / nv, v);
  double lambda = 0.0;
  for (int it = 0; it < 500; ++it) {
    op(std::span<const double>(v), std::span<double>(w));
    const double next = kernels::dot(v, w);
    const double nw = kernels::nrm2(w);
    if (nw == 0.0) return 0.0;
    std::swap(v, w);
    kernels::scal(1.0 / nw, v);
    if (it > 0 && std::abs(next - lambda) <= 1e-13 * (1.0 + std::abs(next))) return next;
    lambda = next;
  }
  return lambda;
}

void write_doubles(const std::filesystem::path& path, const std::vector<double>& v) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(v.data()),
            static_cast<std::streamsize>(v.size() * sizeof(double)));
  if (!out) throw std::runtime_error("short write to " + path.string());
}

std::vector<double> read_doubles(const std::filesystem::path& path, std::size_t count) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::vector<double> v(count);
  in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(count * sizeof(double)));
  if (static_cast<std::size_t>(in.gcount()) != count * sizeof(double))
    throw std::runtime_error("short read from " + path.string());
  return v;
}

}  // namespace

const char* to_string(TPolicy p) {
  switch (p) {
    case TPolicy::ExactL1: return "exact-l1";
    case TPolicy::Scalar: return "scalar";
  }
  return "unknown";
}

TPolicy parse_t_policy(const std::string& s) {
  if (s == "exact-l1") return TPolicy::ExactL1;
  if (s == "scalar") return TPolicy::Scalar;
  throw std::invalid_argument("unknown t policy: " + s);
}

LassoInstance gen_lasso(int m, int n, int K, double noise_beta, std::uint64_t seed,
                        const LassoOptions& options) {
  if (m < 1 || n < 1) throw std::invalid_argument("gen_lasso: m and n must be positive");
  if (m >= n) throw std::invalid_argument("gen_lasso: requires m < n");
  if (K < 0 || K > n) throw std::invalid_argument("gen_lasso: requires 0 <= K <= n");
  if (noise_beta < 0.0) throw std::invalid_argument("gen_lasso: noise_beta must be nonnegative");
  if (options.amplitude_jitter < 0.0 || options.amplitude_jitter >= 1.0)
    throw std::invalid_argument("gen_lasso: amplitude_jitter must lie in [0, 1)");
  if (options.t_policy == TPolicy::Scalar && options.t_scalar < 0.0)
    throw std::invalid_argument("gen_lasso: scalar t must be nonnegative");

  LassoInstance inst;
  inst.m = m;
  inst.n = n;
  inst.K = K;
  inst.noise_beta = noise_beta;
  inst.seed = seed;
  inst.options = options;

  const std::size_t um = static_cast<std::size_t>(m);
  const std::size_t un = static_cast<std::size_t>(n);

  rng::Stream matrix_stream(rng::substream(seed, kSlotMatrix));
  inst.A = matrix_stream.gaussian_vec(um * un);
  inst.At = transpose(inst.A, m, n);

  inst.x_true.assign(un, 0.0);
  rng::Stream signal_stream(rng::substream(seed, kSlotSignal));
  const auto support = signal_stream.sample_indices(un, static_cast<std::size_t>(K));
  for (const std::size_t j : support) {
    const double sign = signal_stream.uniform01() < 0.5 ? -1.0 : 1.0;
    double mag = 1.0;
    if (options.amplitude_jitter > 0.0)
      mag += options.amplitude_jitter * (2.0 * signal_stream.uniform01() - 1.0);
    inst.x_true[j] = sign * mag;
  }

  inst.b.assign(um, 0.0);
  kernels::matvec_sparse_cols(inst.At, um, un, inst.x_true, inst.b);
  if (noise_beta > 0.0) {
    const double sd = options.noise_as_variance ? std::sqrt(noise_beta) : noise_beta;
    rng::Stream noise_stream(rng::substream(seed, kSlotNoise));
    for (std::size_t i = 0; i < um; ++i) inst.b[i] += sd * noise_stream.gaussian();
  }

  inst.t = options.t_policy == TPolicy::ExactL1 ? kernels::nrm1(inst.x_true) : options.t_scalar;

  std::vector<double> tmp(um);
  inst.lipschitz = power_iteration(n, rng::substream(seed, kSlotPower), [&](auto x, auto y) {
    kernels::matvec(inst.A, um, un, x, tmp);
    kernels::matvec(inst.At, un, um, tmp, y);
  });
  return inst;
}

double lasso_objective(const LassoInstance& inst, std::span<const double> x) {
  if (x.size() != static_cast<std::size_t>(inst.n))
    throw std::invalid_argument("lasso_objective: dimension mismatch");
  const std::size_t um = static_cast<std::size_t>(inst.m);
  std::vector<double> r(um);
  if (kernels::count_nonzeros(x) * 4 < x.size())
    kernels::matvec_sparse_cols(inst.At, um, x.size(), x, r);
  else
    kernels::matvec(inst.A, um, x.size(), x, r);
  double s = 0.0;
  for (std::size_t i = 0; i < um; ++i) {
    const double d = r[i] - inst.b[i];
    s += d * d;
  }
  return 0.5 * s;
}

double lasso_error(const LassoInstance& inst, std::span<const double> x) {
  if (x.size() != inst.x_true.size())
    throw std::invalid_argument("lasso_error: dimension mismatch");
  return kernels::nrm2_diff(x, inst.x_true);
}

MapFn lasso_mapping(std::shared_ptr<const LassoInstance> inst) {
  if (!inst) throw std::invalid_argument("lasso_mapping: null instance");
  return [inst](std::span<const double> x, std::span<double> out) {
    const std::size_t um = static_cast<std::size_t>(inst->m);
    const std::size_t un = static_cast<std::size_t>(inst->n);
    if (x.size() != un || out.size() != un)
      throw std::invalid_argument("lasso mapping: dimension mismatch");
    std::vector<double> r(um);
    // The iterates of an l1-constrained run are mostly exact zeros, so the
    // column-gather product usually wins; fall back to the dense row kernel
    // for dense inputs.
    if (kernels::count_nonzeros(x) * 4 < un)
      kernels::matvec_sparse_cols(inst->At, um, un, x, r);
    else
      kernels::matvec(inst->A, um, un, x, r);
    for (std::size_t i = 0; i < um; ++i) r[i] -= inst->b[i];
    kernels::matvec(inst->At, un, um, r, out);
  };
}

VIProblem make_vi(std::shared_ptr<const LassoInstance> inst) {
  if (!inst) throw std::invalid_argument("make_vi: null instance");
  // t == 0 collapses the ball to the singleton {0}; a degenerate box keeps
  // the projector well defined there.
  const std::size_t un = static_cast<std::size_t>(inst->n);
  auto spec = inst->t > 0.0
                  ? projections::ProjectorSpec::l1_ball(inst->t)
                  : projections::ProjectorSpec::box(std::vector<double>(un, 0.0),
                                                    std::vector<double>(un, 0.0));
  auto shared = inst;
  ObjectiveFn obj = [shared](std::span<const double> x) { return lasso_objective(*shared, x); };
  return make_problem(inst->n, lasso_mapping(inst), spec, inst->lipschitz, std::move(obj));
}

VIProblem make_vi(LassoInstance inst) {
  return make_vi(std::make_shared<const LassoInstance>(std::move(inst)));
}

void save_lasso(const LassoInstance& inst, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const fs::path base(dir);
  write_doubles(base / "A.bin", inst.A);
  write_doubles(base / "b.bin", inst.b);
  write_doubles(base / "x_true.bin", inst.x_true);
  nlohmann::json meta{{"m", inst.m},
                      {"n", inst.n},
                      {"K", inst.K},
                      {"noise_beta", inst.noise_beta},
                      {"seed", inst.seed},
                      {"t", inst.t},
                      {"t_policy", to_string(inst.options.t_policy)},
                      {"t_scalar", inst.options.t_scalar},
                      {"amplitude_jitter", inst.options.amplitude_jitter},
                      {"noise_as_variance", inst.options.noise_as_variance},
                      {"lipschitz", inst.lipschitz}};
  std::ofstream out(base / "meta.json", std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + (base / "meta.json").string());
  out << meta.dump(2) << "\n";
}

LassoInstance load_lasso(const std::string& dir) {
  namespace fs = std::filesystem;
  const fs::path base(dir);
  std::ifstream in(base / "meta.json");
  if (!in) throw std::runtime_error("cannot open " + (base / "meta.json").string());
  nlohmann::json meta = nlohmann::json::parse(in);

  LassoInstance inst;
  inst.m = meta.at("m").get<int>();
  inst.n = meta.at("n").get<int>();
  inst.K = meta.at("K").get<int>();
  inst.noise_beta = meta.at("noise_beta").get<double>();
  inst.seed = meta.at("seed").get<std::uint64_t>();
  inst.t = meta.at("t").get<double>();
  inst.options.t_policy = parse_t_policy(meta.at("t_policy").get<std::string>());
  inst.options.t_scalar = meta.at("t_scalar").get<double>();
  inst.options.amplitude_jitter = meta.at("amplitude_jitter").get<double>();
  inst.options.noise_as_variance = meta.at("noise_as_variance").get<bool>();
  inst.lipschitz = meta.at("lipschitz").get<double>();
  if (inst.m < 1 || inst.n < 1) throw std::runtime_error("load_lasso: corrupt dimensions");

  const std::size_t um = static_cast<std::size_t>(inst.m);
  const std::size_t un = static_cast<std::size_t>(inst.n);
  inst.A = read_doubles(base / "A.bin", um * un);
  inst.b = read_doubles(base / "b.bin", um);
  inst.x_true = read_doubles(base / "x_true.bin", un);
  inst.At = transpose(inst.A, inst.m, inst.n);
  return inst;
}

AffineVIInstance gen_affine_vi(int n, double skew_weight, projections::Kind kind,
                               std::uint64_t seed) {
  if (n < 1 || n > 50) throw std::invalid_argument("gen_affine_vi: requires 1 <= n <= 50");

  AffineVIInstance inst;
  inst.n = n;
  inst.skew_weight = skew_weight;
  inst.seed = seed;
  const std::size_t un = static_cast<std::size_t>(n);

  rng::Stream stream(rng::substream(seed, 11));
  const auto P = stream.gaussian_vec(un * un);
  const auto S = stream.gaussian_vec(un * un);
  inst.M.assign(un * un, 0.0);
  for (std::size_t i = 0; i < un; ++i)
    for (std::size_t j = 0; j < un; ++j) {
      double v = 0.0;
      for (std::size_t k = 0; k < un; ++k) v += P[k * un + i] * P[k * un + j];
      v += skew_weight * (S[i * un + j] - S[j * un + i]);
      inst.M[i * un + j] = v;
    }
  inst.q = stream.gaussian_vec(un);

  switch (kind) {
    case projections::Kind::FullSpace:
      inst.C = projections::ProjectorSpec::full_space();
      break;
    case projections::Kind::Box:
      inst.C = projections::ProjectorSpec::box(std::vector<double>(un, -1.0),
                                               std::vector<double>(un, 1.0));
      break;
    case projections::Kind::Ball:
      inst.C = projections::ProjectorSpec::ball(std::vector<double>(un, 0.0), 1.0);
      break;
    default:
      throw std::invalid_argument("gen_affine_vi: feasible set must be full-space, box or ball");
  }

  // ||M||_2 via the symmetric power iteration on M^T M.
  std::vector<double> tmp(un);
  std::vector<double> Mt = transpose(inst.M, n, n);
  const double mtm = power_iteration(n, rng::substream(seed, 14), [&](auto x, auto y) {
    kernels::matvec(inst.M, un, un, x, tmp);
    kernels::matvec(Mt, un, un, tmp, y);
  });
  inst.lipschitz = std::sqrt(std::max(mtm, 0.0));

  // A larger fixed step is still well inside the extragradient stability
  // range and cuts generation time; the oracle validates the result either
  // way.
  oracle::OracleConfig oracle_cfg;
  oracle_cfg.step_scale = 0.4;
  inst.x_star = oracle::oracle_solve_vi(make_vi(inst), oracle_cfg, rng::substream(seed, 15));
  return inst;
}

MapFn affine_mapping(std::shared_ptr<const AffineVIInstance> inst) {
  if (!inst) throw std::invalid_argument("affine_mapping: null instance");
  return [inst](std::span<const double> x, std::span<double> out) {
    const std::size_t un = static_cast<std::size_t>(inst->n);
    if (x.size() != un || out.size() != un)
      throw std::invalid_argument("affine mapping: dimension mismatch");
    kernels::matvec(inst->M, un, un, x, out);
    for (std::size_t i = 0; i < un; ++i) out[i] += inst->q[i];
  };
}

VIProblem make_vi(std::shared_ptr<const AffineVIInstance> inst) {
  if (!inst) throw std::invalid_argument("make_vi: null instance");
  return make_problem(inst->n, affine_mapping(inst), inst->C, inst->lipschitz, nullptr);
}

VIProblem make_vi(AffineVIInstance inst) {
  return make_vi(std::make_shared<const AffineVIInstance>(std::move(inst)));
}

}  // namespace pcvi::problems
