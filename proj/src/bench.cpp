#include "pcvi/bench.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include "pcvi/kernels.hpp"
#include "pcvi/linesearch.hpp"
#include "pcvi/oracle.hpp"
#include "pcvi/rng.hpp"

namespace pcvi::bench {

namespace fs = std::filesystem;

std::string format_double(double v) {
  std::array<char, 40> buf;
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

AlgorithmSpec preset_algorithm(AlgorithmId id) {
  AlgorithmSpec spec;
  spec.id = id;
  spec.solver.gamma = 1.0;
  spec.solver.nu = 0.7;
  spec.solver.sigma_ls = 5.0;
  spec.solver.backtrack = 0.9;

  using perturbations::ScheduleKind;
  switch (id) {
    case AlgorithmId::PC1_OP:
    case AlgorithmId::PC2_OP:
      spec.schedule.kind = ScheduleKind::Outer;
      spec.schedule.budget = 1.0;
      break;
    case AlgorithmId::PC1_BP:
    case AlgorithmId::PC2_BP:
      spec.schedule.kind = ScheduleKind::Bounded;
      spec.schedule.budget = 1.0;
      break;
    case AlgorithmId::IPC1_1:
    case AlgorithmId::IPC2_1:
      spec.schedule.kind = ScheduleKind::Inertial;
      spec.schedule.alpha1 = 0.4;
      spec.schedule.alpha2 = 0.4;
      spec.schedule.zeta = 1e6;
      spec.schedule.xi = 1.0;
      break;
    case AlgorithmId::IPC1_2:
    case AlgorithmId::IPC2_2:
      spec.schedule.kind = ScheduleKind::Inertial;
      spec.schedule.alpha1 = 0.8;
      spec.schedule.alpha2 = 0.0;
      spec.schedule.zeta = 1e6;
      spec.schedule.xi = 1.0;
      break;
    case AlgorithmId::IPC1_R56:
      // Constant inertia needs an admissible (alpha, sigma, delta) triple;
      // this one keeps gamma = 1 admissible.
      spec.schedule.kind = ScheduleKind::Inertial;
      spec.schedule.alpha1 = 0.2;
      spec.schedule.sigma_r = 0.01;
      spec.schedule.delta_r = 1.8;
      break;
    default:
      break;
  }
  return spec;
}

namespace {

double require_number(const nlohmann::json& j, const std::string& ctx) {
  if (!j.is_number()) throw ConfigError(ctx + ": expected a number");
  return j.get<double>();
}

long require_integer(const nlohmann::json& j, const std::string& ctx) {
  if (!j.is_number_integer()) throw ConfigError(ctx + ": expected an integer");
  return j.get<long>();
}

template <typename T, typename Conv>
std::vector<T> number_list(const nlohmann::json& j, const std::string& ctx, Conv conv) {
  std::vector<T> out;
  if (j.is_array()) {
    std::size_t i = 0;
    for (const auto& v : j) out.push_back(conv(v, ctx + "[" + std::to_string(i++) + "]"));
  } else {
    out.push_back(conv(j, ctx));
  }
  if (out.empty()) throw ConfigError(ctx + ": list must be nonempty");
  return out;
}

void apply_algorithm_field(AlgorithmSpec& spec, const std::string& key, const nlohmann::json& v,
                           const std::string& ctx) {
  const std::string where = ctx + "." + key;
  if (key == "gamma")
    spec.solver.gamma = require_number(v, where);
  else if (key == "nu")
    spec.solver.nu = require_number(v, where);
  else if (key == "sigma_ls")
    spec.solver.sigma_ls = require_number(v, where);
  else if (key == "backtrack")
    spec.solver.backtrack = require_number(v, where);
  else if (key == "max_backtracks")
    spec.solver.max_backtracks = static_cast<int>(require_integer(v, where));
  else if (key == "mu")
    spec.solver.mu = require_number(v, where);
  else if (key == "max_iter")
    spec.solver.max_iter = require_integer(v, where);
  else if (key == "degenerate_tol")
    spec.solver.degenerate_tol = require_number(v, where);
  else if (key == "budget")
    spec.schedule.budget = require_number(v, where);
  else if (key == "alpha1")
    spec.schedule.alpha1 = require_number(v, where);
  else if (key == "alpha2")
    spec.schedule.alpha2 = require_number(v, where);
  else if (key == "zeta")
    spec.schedule.zeta = require_number(v, where);
  else if (key == "xi")
    spec.schedule.xi = require_number(v, where);
  else if (key == "sigma_r")
    spec.schedule.sigma_r = require_number(v, where);
  else if (key == "delta_r")
    spec.schedule.delta_r = require_number(v, where);
  else
    throw ConfigError(where + ": unknown field");
}

std::string make_run_id(AlgorithmId id, int K, double noise, double eps, std::uint64_t seed) {
  return std::string(to_string(id)) + "-K" + std::to_string(K) + "-b" + format_double(noise) +
         "-e" + format_double(eps) + "-s" + std::to_string(seed);
}

void apply_thread_cap() {
  if (const char* env = std::getenv("VI_PC_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) kernels::set_threads(v);
  }
}

void write_series_file(const fs::path& path, const SolveReport& rep,
                       const problems::LassoInstance* inst,
                       const std::vector<double>* x_star) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  const bool with_objective = inst != nullptr;
  out << (with_objective ? "k,residual,objective,err,beta,rho,alpha"
                         : "k,residual,err,beta,rho,alpha")
      << "\n";
  for (const auto& rec : rep.trace) {
    out << rec.k << ',' << format_double(rec.residual) << ',';
    if (with_objective) out << format_double(problems::lasso_objective(*inst, rec.x)) << ',';
    double err = std::numeric_limits<double>::quiet_NaN();
    if (inst != nullptr)
      err = problems::lasso_error(*inst, rec.x);
    else if (x_star != nullptr)
      err = kernels::nrm2_diff(rec.x, *x_star);
    out << format_double(err) << ',' << format_double(rec.beta) << ','
        << format_double(rec.rho) << ',' << format_double(rec.alpha) << "\n";
  }
}

}  // namespace

ExperimentConfig parse_experiment_config(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config: expected a JSON object");
  ExperimentConfig cfg;
  cfg.algorithms.clear();

  for (const auto& [key, value] : j.items()) {
    if (key == "instance") {
      if (!value.is_object()) throw ConfigError("instance: expected an object");
      for (const auto& [ik, iv] : value.items()) {
        const std::string ctx = "instance." + ik;
        if (ik == "m")
          cfg.m = static_cast<int>(require_integer(iv, ctx));
        else if (ik == "n")
          cfg.n = static_cast<int>(require_integer(iv, ctx));
        else if (ik == "K")
          cfg.K = number_list<int>(iv, ctx, [](const nlohmann::json& x, const std::string& c) {
            return static_cast<int>(require_integer(x, c));
          });
        else if (ik == "noise_beta")
          cfg.noise_beta = number_list<double>(iv, ctx, require_number);
        else if (ik == "seeds")
          cfg.seeds = number_list<std::uint64_t>(
              iv, ctx, [](const nlohmann::json& x, const std::string& c) {
                const long s = require_integer(x, c);
                if (s < 0) throw ConfigError(c + ": seeds must be nonnegative");
                return static_cast<std::uint64_t>(s);
              });
        else if (ik == "t_policy") {
          if (!iv.is_string()) throw ConfigError(ctx + ": expected a string");
          try {
            cfg.lasso_options.t_policy = problems::parse_t_policy(iv.get<std::string>());
          } catch (const std::invalid_argument& e) {
            throw ConfigError(ctx + ": " + e.what());
          }
        } else if (ik == "t_scalar")
          cfg.lasso_options.t_scalar = require_number(iv, ctx);
        else if (ik == "amplitude_jitter")
          cfg.lasso_options.amplitude_jitter = require_number(iv, ctx);
        else if (ik == "noise_as_variance") {
          if (!iv.is_boolean()) throw ConfigError(ctx + ": expected a boolean");
          cfg.lasso_options.noise_as_variance = iv.get<bool>();
        } else
          throw ConfigError(ctx + ": unknown field");
      }
    } else if (key == "algorithms") {
      if (!value.is_array() || value.empty())
        throw ConfigError("algorithms: expected a nonempty array");
      std::size_t idx = 0;
      for (const auto& entry : value) {
        const std::string ctx = "algorithms[" + std::to_string(idx++) + "]";
        std::string id_str;
        if (entry.is_string()) {
          id_str = entry.get<std::string>();
        } else if (entry.is_object()) {
          if (!entry.contains("id") || !entry.at("id").is_string())
            throw ConfigError(ctx + ": missing string field 'id'");
          id_str = entry.at("id").get<std::string>();
        } else {
          throw ConfigError(ctx + ": expected a string id or an object");
        }
        AlgorithmId id;
        try {
          id = parse_algorithm(id_str);
        } catch (const std::invalid_argument& e) {
          throw ConfigError(ctx + ": " + e.what());
        }
        AlgorithmSpec spec = preset_algorithm(id);
        if (entry.is_object())
          for (const auto& [ak, av] : entry.items()) {
            if (ak == "id") continue;
            apply_algorithm_field(spec, ak, av, ctx);
          }
        cfg.algorithms.push_back(std::move(spec));
      }
    } else if (key == "epsilon")
      cfg.epsilon = number_list<double>(value, "epsilon", require_number);
    else if (key == "output_dir") {
      if (!value.is_string()) throw ConfigError("output_dir: expected a string");
      cfg.output_dir = value.get<std::string>();
    } else if (key == "audit") {
      if (!value.is_boolean()) throw ConfigError("audit: expected a boolean");
      cfg.audit = value.get<bool>();
    } else if (key == "write_series") {
      if (!value.is_boolean()) throw ConfigError("write_series: expected a boolean");
      cfg.write_series = value.get<bool>();
    } else
      throw ConfigError(key + ": unknown field");
  }

  if (cfg.algorithms.empty()) throw ConfigError("algorithms: list must be nonempty");
  if (cfg.seeds.empty()) throw ConfigError("instance.seeds: list must be nonempty");
  if (cfg.K.empty()) throw ConfigError("instance.K: list must be nonempty");
  if (cfg.noise_beta.empty()) throw ConfigError("instance.noise_beta: list must be nonempty");
  if (cfg.epsilon.empty()) throw ConfigError("epsilon: list must be nonempty");
  for (const double e : cfg.epsilon)
    if (!(e > 0.0)) throw ConfigError("epsilon: values must be positive");
  return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  nlohmann::json j = nlohmann::json::parse(in);  // parse_error carries the byte position
  return parse_experiment_config(j);
}

nlohmann::json resolved_config_json(const ExperimentConfig& cfg) {
  nlohmann::json algs = nlohmann::json::array();
  for (const auto& spec : cfg.algorithms) {
    algs.push_back({{"id", to_string(spec.id)},
                    {"gamma", spec.solver.gamma},
                    {"nu", spec.solver.nu},
                    {"sigma_ls", spec.solver.sigma_ls},
                    {"backtrack", spec.solver.backtrack},
                    {"max_backtracks", spec.solver.max_backtracks},
                    {"mu", spec.solver.mu},
                    {"max_iter", spec.solver.max_iter},
                    {"degenerate_tol", spec.solver.degenerate_tol},
                    {"budget", spec.schedule.budget},
                    {"alpha1", spec.schedule.alpha1},
                    {"alpha2", spec.schedule.alpha2},
                    {"zeta", spec.schedule.zeta},
                    {"xi", spec.schedule.xi},
                    {"sigma_r", spec.schedule.sigma_r},
                    {"delta_r", spec.schedule.delta_r}});
  }
  return nlohmann::json{{"instance",
                         {{"m", cfg.m},
                          {"n", cfg.n},
                          {"K", cfg.K},
                          {"noise_beta", cfg.noise_beta},
                          {"seeds", cfg.seeds},
                          {"t_policy", problems::to_string(cfg.lasso_options.t_policy)},
                          {"t_scalar", cfg.lasso_options.t_scalar},
                          {"amplitude_jitter", cfg.lasso_options.amplitude_jitter},
                          {"noise_as_variance", cfg.lasso_options.noise_as_variance}}},
                        {"algorithms", algs},
                        {"epsilon", cfg.epsilon},
                        {"output_dir", cfg.output_dir},
                        {"audit", cfg.audit},
                        {"write_series", cfg.write_series}};
}

std::string summary_row_csv(const SummaryRow& row) {
  std::ostringstream out;
  out << row.run_id << ',' << row.algorithm << ',' << row.K << ','
      << format_double(row.noise_beta) << ',' << format_double(row.epsilon) << ',' << row.seed
      << ',' << row.iters << ',' << format_double(row.obj_final) << ','
      << format_double(row.err_final) << ',' << format_double(row.wall_ms) << ',' << row.status
      << ',' << format_double(row.min_rho) << ',' << (row.audits_passed ? 1 : 0);
  return out.str();
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, std::ostream* log) {
  if (cfg.algorithms.empty()) throw ConfigError("algorithms: list must be nonempty");
  if (cfg.seeds.empty()) throw ConfigError("instance.seeds: list must be nonempty");
  apply_thread_cap();

  ExperimentResult result;
  std::ofstream summary;
  fs::path series_dir;
  const bool writing = !cfg.output_dir.empty();
  if (writing) {
    fs::create_directories(cfg.output_dir);
    if (cfg.write_series) {
      series_dir = fs::path(cfg.output_dir) / "series";
      fs::create_directories(series_dir);
    }
    result.summary_path = (fs::path(cfg.output_dir) / "summary.csv").string();
    summary.open(result.summary_path, std::ios::trunc);
    if (!summary) throw std::runtime_error("cannot write " + result.summary_path);
    summary << kSummaryHeader << "\n";
  }

  for (const int K : cfg.K) {
    for (const double noise : cfg.noise_beta) {
      for (const std::uint64_t seed : cfg.seeds) {
        auto inst = std::make_shared<const problems::LassoInstance>(
            problems::gen_lasso(cfg.m, cfg.n, K, noise, seed, cfg.lasso_options));
        const VIProblem problem = problems::make_vi(inst);
        const std::vector<double> x0(static_cast<std::size_t>(cfg.n), 0.0);
        for (const double eps : cfg.epsilon) {
          for (std::size_t ai = 0; ai < cfg.algorithms.size(); ++ai) {
            const AlgorithmSpec& spec = cfg.algorithms[ai];
            SolverConfig sc = spec.solver;
            sc.epsilon = eps;
            sc.audit = cfg.audit;
            sc.record_trace = true;
            perturbations::PerturbationSchedule schedule = spec.schedule;
            schedule.seed = rng::substream(seed, 1000 + ai);

            SummaryRow row;
            row.run_id = make_run_id(spec.id, K, noise, eps, seed);
            row.algorithm = to_string(spec.id);
            row.K = K;
            row.noise_beta = noise;
            row.epsilon = eps;
            row.seed = seed;
            try {
              const SolveReport rep = solve(problem, spec.id, sc, schedule, x0);
              row.iters = rep.iterations;
              row.obj_final = problems::lasso_objective(*inst, rep.final_x);
              row.err_final = problems::lasso_error(*inst, rep.final_x);
              row.wall_ms = rep.wall_ms;
              row.status = to_string(rep.status);
              row.min_rho = rep.min_rho;
              row.audits_passed = rep.audits_passed();
              if (writing && cfg.write_series)
                write_series_file(series_dir / (row.run_id + ".csv"), rep, inst.get(), nullptr);
            } catch (const NumericalError& e) {
              row.iters = e.k;
              row.obj_final = std::numeric_limits<double>::quiet_NaN();
              row.err_final = std::numeric_limits<double>::quiet_NaN();
              row.min_rho = std::numeric_limits<double>::quiet_NaN();
              row.status = "numerical-error";
              row.audits_passed = false;
            } catch (const linesearch::LineSearchError&) {
              row.obj_final = std::numeric_limits<double>::quiet_NaN();
              row.err_final = std::numeric_limits<double>::quiet_NaN();
              row.min_rho = std::numeric_limits<double>::quiet_NaN();
              row.status = "line-search-failure";
              row.audits_passed = false;
            }
            if (writing) summary << summary_row_csv(row) << "\n";
            if (log)
              (*log) << row.run_id << ": status=" << row.status << " iters=" << row.iters
                     << " err=" << format_double(row.err_final) << "\n";
            result.rows.push_back(std::move(row));
          }
        }
      }
    }
  }

  if (writing) {
    summary.close();
    nlohmann::json manifest{{"version", kVersion},
                            {"config", resolved_config_json(cfg)},
                            {"runs", result.rows.size()},
                            {"summary", "summary.csv"}};
    std::ofstream mf(fs::path(cfg.output_dir) / "manifest.json", std::ios::trunc);
    if (!mf) throw std::runtime_error("cannot write manifest.json");
    mf << manifest.dump(2) << "\n";
  }
  return result;
}

int run_bench(const std::string& config_path, std::ostream& out, std::ostream& err) {
  ExperimentConfig cfg;
  try {
    cfg = load_experiment_config(config_path);
  } catch (const nlohmann::json::parse_error& e) {
    err << "config parse error: " << e.what() << "\n";
    return 1;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return 1;
  }
  try {
    const ExperimentResult res = run_experiment(cfg, &out);
    out << "wrote " << res.summary_path << " (" << res.rows.size() << " runs)\n";
    return 0;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "runtime failure: " << e.what() << "\n";
    return 2;
  }
}

int run_single(const SingleOptions& opts, std::ostream& out, std::ostream& err) {
  try {
    apply_thread_cap();
    AlgorithmSpec spec = preset_algorithm(opts.alg);
    if (opts.gamma >= 0.0) spec.solver.gamma = opts.gamma;
    if (opts.nu >= 0.0) spec.solver.nu = opts.nu;
    if (opts.sigma_ls >= 0.0) spec.solver.sigma_ls = opts.sigma_ls;
    if (opts.backtrack >= 0.0) spec.solver.backtrack = opts.backtrack;
    if (opts.alpha1 >= 0.0) spec.schedule.alpha1 = opts.alpha1;
    if (opts.alpha2 >= 0.0) spec.schedule.alpha2 = opts.alpha2;
    if (opts.zeta != -2.0) spec.schedule.zeta = opts.zeta;
    if (opts.xi >= 0.0) spec.schedule.xi = opts.xi;
    if (opts.sigma_r >= 0.0) spec.schedule.sigma_r = opts.sigma_r;
    if (opts.delta_r >= 0.0) spec.schedule.delta_r = opts.delta_r;
    if (opts.budget >= 0.0) spec.schedule.budget = opts.budget;
    if (opts.max_iter >= 0) spec.solver.max_iter = opts.max_iter;
    spec.solver.epsilon = opts.epsilon;
    spec.schedule.seed = rng::substream(opts.seed, 1000);

    VIProblem problem;
    std::shared_ptr<const problems::LassoInstance> lasso;
    std::vector<double> x_star;
    SummaryRow row;
    if (opts.preset == "lasso-k20" || opts.preset == "lasso-k30" || opts.preset == "lasso-k40") {
      const int K = opts.preset == "lasso-k20" ? 20 : opts.preset == "lasso-k30" ? 30 : 40;
      lasso = std::make_shared<const problems::LassoInstance>(
          problems::gen_lasso(240, 1024, K, 0.0, opts.seed));
      problem = problems::make_vi(lasso);
      row.K = K;
    } else if (opts.preset == "affine-n20") {
      auto affine = problems::gen_affine_vi(20, 0.5, projections::Kind::Box, opts.seed);
      x_star = affine.x_star;
      problem = problems::make_vi(std::move(affine));
    } else {
      throw ConfigError("unknown preset " + opts.preset);
    }

    const std::vector<double> x0(static_cast<std::size_t>(problem.dim), 0.0);
    const SolveReport rep = solve(problem, opts.alg, spec.solver, spec.schedule, x0);

    row.run_id = opts.preset + "-" + to_string(opts.alg) + "-e" + format_double(opts.epsilon) +
                 "-s" + std::to_string(opts.seed);
    row.algorithm = to_string(opts.alg);
    row.epsilon = opts.epsilon;
    row.seed = opts.seed;
    row.iters = rep.iterations;
    row.obj_final = lasso ? problems::lasso_objective(*lasso, rep.final_x)
                          : std::numeric_limits<double>::quiet_NaN();
    row.err_final = lasso ? problems::lasso_error(*lasso, rep.final_x)
                          : kernels::nrm2_diff(rep.final_x, x_star);
    row.wall_ms = rep.wall_ms;
    row.status = to_string(rep.status);
    row.min_rho = rep.min_rho;
    row.audits_passed = rep.audits_passed();

    if (!opts.output_dir.empty()) {
      const fs::path series_dir = fs::path(opts.output_dir) / "series";
      fs::create_directories(series_dir);
      write_series_file(series_dir / (row.run_id + ".csv"), rep, lasso.get(),
                        x_star.empty() ? nullptr : &x_star);
    }
    out << kSummaryHeader << "\n" << summary_row_csv(row) << "\n";
    return 0;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "runtime failure: " << e.what() << "\n";
    return 2;
  }
}

void emit_plot_series(const std::string& run_dir, std::ostream& log) {
  const fs::path base(run_dir);
  std::ifstream summary(base / "summary.csv");
  if (!summary) throw std::runtime_error("missing " + (base / "summary.csv").string());

  std::string line;
  if (!std::getline(summary, line)) throw std::runtime_error("empty summary.csv");

  fs::create_directories(base / "plot");
  const fs::path out_path = base / "plot" / "objective_series.csv";
  std::ofstream out(out_path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + out_path.string());
  out << "algorithm,k,objective\n";

  while (std::getline(summary, line)) {
    if (line.empty()) continue;
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos)
      throw std::runtime_error("malformed summary row: " + line);
    const std::string run_id = line.substr(0, c1);
    const std::string algorithm = line.substr(c1 + 1, c2 - c1 - 1);

    const fs::path series_path = base / "series" / (run_id + ".csv");
    std::ifstream series(series_path);
    if (!series) throw std::runtime_error("missing series file " + series_path.string());
    std::string header;
    if (!std::getline(series, header)) throw std::runtime_error("empty " + series_path.string());

    // Locate the objective column; runs solved without an objective omit it.
    int obj_col = -1;
    {
      std::istringstream hs(header);
      std::string col;
      for (int idx = 0; std::getline(hs, col, ','); ++idx)
        if (col == "objective") obj_col = idx;
    }
    if (obj_col < 0) {
      log << "skipping " << run_id << ": no objective column\n";
      continue;
    }
    while (std::getline(series, line)) {
      if (line.empty()) continue;
      std::istringstream ls(line);
      std::string field, k_field, obj_field;
      for (int idx = 0; std::getline(ls, field, ','); ++idx) {
        if (idx == 0) k_field = field;
        if (idx == obj_col) obj_field = field;
      }
      out << algorithm << ',' << k_field << ',' << obj_field << "\n";
    }
  }
}

}  // namespace pcvi::bench
