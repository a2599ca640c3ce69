#include "myula/cli.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <boost/version.hpp>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <ostream>
#include <stdexcept>

#include "myula/convex_body.hpp"
#include "myula/data_io.hpp"
#include "myula/errors.hpp"
#include "myula/estimators.hpp"
#include "myula/parallel.hpp"
#include "myula/potential.hpp"
#include "myula/samplers.hpp"
#include "myula/theory.hpp"

namespace myula::cli {

namespace {

namespace fs = std::filesystem;

std::string fmt(double v) { return format_real(v); }
std::string fmt(std::uint64_t v) { return std::to_string(v); }

std::vector<double> list_or(const Config& cfg, const std::string& key, std::vector<double> fallback) {
  if (!cfg.has(key)) return fallback;
  try {
    return parse_real_list(cfg.get(key));
  } catch (const std::invalid_argument& e) {
    throw ConfigError("key '" + key + "': " + e.what());
  }
}

std::size_t size_or(const Config& cfg, const std::string& key, std::size_t fallback) {
  return static_cast<std::size_t>(cfg.get_u64_or(key, fallback));
}

/// Config values as typed errors: anything std::invalid_argument raised
/// while interpreting the config is reported as a configuration problem.
template <class Fn>
auto interpret(const std::string& what, Fn&& fn) {
  try {
    return fn();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(what + ": " + e.what());
  }
}

void log_line(const RunContext& ctx, const std::string& line) {
  if (ctx.log) *ctx.log << line << '\n';
}

double elapsed(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

Potential potential_from_config(const Config& cfg, std::size_t dim) {
  const auto kind = cfg.get_or("potential.kind", "zero");
  return interpret("potential", [&] {
    if (kind == "zero") return Potential::zero(dim);
    if (kind == "isotropic") return Potential::isotropic(dim, cfg.get_double_or("potential.variance", 1.0));
    if (kind == "tmg") return tmg_precision(dim);
    if (kind == "diagonal") {
      const Vector variances = cfg.get_vector("potential.variances");
      if (static_cast<std::size_t>(variances.size()) != dim)
        throw ConfigError("potential.variances must have one entry per dimension");
      return Potential::from_covariance(variances.asDiagonal().toDenseMatrix());
    }
    throw ConfigError("unknown potential.kind '" + kind + "' (expected zero, isotropic, diagonal or tmg)");
  });
}

ChainConfig chain_from_config(const Config& cfg, std::uint64_t seed, std::size_t dim) {
  ChainConfig c;
  c.sampler = interpret("chain.sampler", [&] { return parse_sampler(cfg.get_or("chain.sampler", "myula")); });
  c.gamma = cfg.get_double_or("chain.gamma", c.gamma);
  if (cfg.has("chain.lambda")) c.lambda = cfg.get_double("chain.lambda");
  c.n_samples = cfg.get_u64_or("chain.n_samples", c.n_samples);
  c.burn_in_fraction = cfg.get_double_or("chain.burn_in", c.burn_in_fraction);
  c.thinning = cfg.get_u64_or("chain.thinning", c.thinning);
  c.rwm_proposal_scale = cfg.get_double_or("chain.rwm_scale", c.rwm_proposal_scale);
  c.rwm_hard_constraint = cfg.get_bool_or("chain.rwm_hard", c.rwm_hard_constraint);
  c.enforce_theory_step = cfg.get_bool_or("chain.enforce_theory_step", c.enforce_theory_step);
  if (cfg.has("chain.initial")) {
    c.initial_point = cfg.get_vector("chain.initial");
    if (static_cast<std::size_t>(c.initial_point->size()) != dim)
      throw ConfigError("chain.initial must have " + std::to_string(dim) + " entries");
  }
  c.seed = seed;
  interpret("chain", [&] {
    c.validate();
    return 0;
  });
  return c;
}

ConvexBody body_from_config(const Config& cfg) { return ConvexBody::from_config(cfg.entries(), "body."); }

std::vector<std::string> summary_row(const std::string& label, const ChainOutput& out) {
  return {label,
          fmt(static_cast<std::uint64_t>(out.samples.rows())),
          out.acceptance_rate ? fmt(*out.acceptance_rate) : "",
          fmt(out.mean_dist_to_body),
          fmt(out.fraction_outside),
          fmt(out.max_dist_to_body)};
}

const std::vector<std::string> kSummaryHeader{"chain", "kept", "acceptance", "mean_dist", "fraction_outside",
                                              "max_dist"};

}  // namespace

RunContext make_context(const std::string& command, const RunOptions& opts, std::ostream& log) {
  const auto& names = subcommands();
  if (std::find(names.begin(), names.end(), command) == names.end())
    throw ConfigError("unknown subcommand '" + command + "'");
  RunContext ctx;
  if (opts.config_path) ctx.config = Config::load(*opts.config_path);
  for (const auto& kv : opts.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("--set expects key=value, got '" + kv + "'");
    ctx.config.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  ctx.seed = opts.seed ? *opts.seed : ctx.config.get_u64_or("seed", 0);
  ctx.reps = opts.reps ? *opts.reps : size_or(ctx.config, "reps", 1);
  if (ctx.reps == 0) throw ConfigError("reps must be positive");
  ctx.config.set("seed", std::to_string(ctx.seed));
  ctx.config.set("reps", std::to_string(ctx.reps));
  ctx.paper_scale = opts.paper_scale;
  ctx.threads = std::max(1u, opts.threads);
  ctx.out = opts.out;
  ctx.log = &log;
  return ctx;
}

void write_run_manifest(const std::string& command, const RunContext& ctx) {
  std::map<std::string, std::string> m;
  m["command"] = command;
  m["seed"] = std::to_string(ctx.seed);
  m["reps"] = std::to_string(ctx.reps);
  m["paper_scale"] = ctx.paper_scale ? "true" : "false";
  char hash[17];
  std::snprintf(hash, sizeof(hash), "%016llx", static_cast<unsigned long long>(ctx.config.hash()));
  m["config_hash"] = hash;
  for (const auto& [k, v] : ctx.config.entries()) m["config." + k] = v;
  m["version.myula"] = kVersion;
  m["version.eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                       std::to_string(EIGEN_MINOR_VERSION);
  m["version.boost"] = std::to_string(BOOST_VERSION / 100000) + "." + std::to_string(BOOST_VERSION / 100 % 1000) +
                       "." + std::to_string(BOOST_VERSION % 100);
  write_manifest(ctx.out / "manifest", m);
}

void cmd_sample(const RunContext& ctx) {
  const auto& cfg = ctx.config;
  const ConvexBody body = body_from_config(cfg);
  const Potential f = potential_from_config(cfg, body.dimension());
  const ChainConfig chain = chain_from_config(cfg, ctx.seed, body.dimension());
  const bool binary = cfg.get_or("output.format", "csv") == "binary";
  if (!binary && cfg.get_or("output.format", "csv") != "csv")
    throw ConfigError("output.format must be csv or binary");
  write_run_manifest("sample", ctx);

  const auto start = std::chrono::steady_clock::now();
  const auto outputs = run_chains(chain, ctx.reps, f, body, ctx.threads);
  std::vector<std::vector<std::string>> summary;
  std::vector<std::vector<std::string>> mean_rows;
  for (std::size_t r = 0; r < outputs.size(); ++r) {
    const auto& out = outputs[r];
    const auto name = "samples_" + std::to_string(r);
    if (binary)
      write_samples_binary(ctx.out / (name + ".bin"), out.samples);
    else
      write_samples_csv(ctx.out / (name + ".csv"), out.samples);
    summary.push_back(summary_row(std::to_string(r), out));
    if (out.samples.rows() >= 2) {
      const auto m = moments(out.samples, 2);
      for (Eigen::Index j = 0; j < m.mean.size(); ++j)
        mean_rows.push_back({std::to_string(r), std::to_string(j + 1), fmt(m.mean[j]),
                             fmt(std::sqrt(m.covariance(j, j))), fmt(m.batch_means_se[j])});
    }
  }
  write_table(ctx.out / "summary.csv", kSummaryHeader, summary);
  write_table(ctx.out / "moments.csv", {"chain", "coord", "mean", "sd", "se"}, mean_rows);
  log_line(ctx, "sample: " + std::to_string(outputs.size()) + " chain(s) written to " + ctx.out.string() + " in " +
                    std::to_string(elapsed(start)) + " s");
}

namespace {

struct TmgPreset {
  ConvexBody body;
  Potential f;
  std::uint64_t myula_n;
  std::uint64_t rwm_n;
};

TmgPreset tmg_preset(std::size_t d, bool paper_scale) {
  Vector lower = Vector::Zero(static_cast<Eigen::Index>(d));
  Vector upper = Vector::Constant(static_cast<Eigen::Index>(d), d == 2 ? 1.0 : 0.5);
  upper[0] = 5.0;
  const std::uint64_t n = (d == 100 && !paper_scale) ? 100000 : 1000000;
  return {ConvexBody::box(lower, upper), tmg_precision(d), n, n};
}

/// Adjusts the RWM proposal scale toward a 25% acceptance rate with short
/// pilot chains on reserved streams; returns the scale and the last state.
std::pair<double, Vector> tune_rwm(const Potential& f, const ConvexBody& body, const Vector& start,
                                   std::uint64_t seed, std::uint64_t stream_base) {
  const double d = static_cast<double>(body.dimension());
  double scale = 0.5 / std::sqrt(d);
  Vector x = start;
  for (std::uint64_t round = 0; round < 20; ++round) {
    ChainConfig pilot;
    pilot.sampler = SamplerKind::Rwm;
    pilot.n_samples = 2000;
    pilot.burn_in_fraction = 0.0;
    pilot.seed = seed;
    pilot.chain_index = stream_base + round;
    pilot.initial_point = x;
    pilot.rwm_proposal_scale = scale;
    const auto s = stream_chain(pilot, f, body, [](const Vector&) {});
    x = s.final_state;
    scale *= std::exp(2.0 * (s.acceptance_rate.value_or(0.0) - 0.25));
  }
  return {scale, x};
}

}  // namespace

void cmd_tmg(const RunContext& ctx) {
  const auto& cfg = ctx.config;
  const auto d = size_or(cfg, "tmg.dim", 2);
  if (d != 2 && d != 10 && d != 100) throw ConfigError("tmg.dim must be 2, 10 or 100");
  TmgPreset preset = tmg_preset(d, ctx.paper_scale);
  preset.myula_n = cfg.get_u64_or("tmg.n_samples", preset.myula_n);
  preset.rwm_n = cfg.get_u64_or("tmg.rwm_n_samples", preset.rwm_n);
  const double gamma = cfg.get_double_or("tmg.gamma", 1e-3);
  const double lambda = cfg.get_double_or("tmg.lambda", 2.0 * gamma);
  const double burn = cfg.get_double_or("tmg.burn_in", 0.1);
  // Rows kept per chain are capped so that d = 100 under --paper-scale stays in memory.
  const auto max_values = cfg.get_u64_or("tmg.max_stored_values", 20000000);
  write_run_manifest("tmg", ctx);

  const auto& box = std::get<BoxShape>(preset.body.shape());
  const Vector start = box.lower + 0.05 * (box.upper - box.lower);
  const auto start_time = std::chrono::steady_clock::now();

  // Streams: method m, repetition r -> 3r + m; RWM pilots use 1e6 + 100r.
  struct Job {
    SamplerKind sampler;
    std::size_t rep;
  };
  std::vector<Job> jobs;
  for (std::size_t r = 0; r < ctx.reps; ++r)
    for (const auto s : {SamplerKind::Myula, SamplerKind::Rwm, SamplerKind::Plmc}) jobs.push_back({s, r});
  std::vector<ChainOutput> outputs(jobs.size());
  std::vector<double> rwm_scales(jobs.size(), 0.0);

  parallel_for(jobs.size(), ctx.threads, [&](std::size_t k) {
    const auto& job = jobs[k];
    ChainConfig c;
    c.sampler = job.sampler;
    c.gamma = gamma;
    c.lambda = lambda;
    c.burn_in_fraction = burn;
    c.seed = ctx.seed;
    c.chain_index = 3 * job.rep + static_cast<std::uint64_t>(k % 3);
    c.initial_point = start;
    c.n_samples = job.sampler == SamplerKind::Rwm ? preset.rwm_n : preset.myula_n;
    if (job.sampler == SamplerKind::Rwm) {
      auto [scale, x] = tune_rwm(preset.f, preset.body, start, ctx.seed, 1000000 + 100 * job.rep);
      c.rwm_proposal_scale = scale;
      c.initial_point = x;
      rwm_scales[k] = scale;
    }
    const std::uint64_t kept = c.kept_rows();
    c.thinning = std::max<std::uint64_t>(1, (kept * d + max_values - 1) / max_values);
    outputs[k] = run_chain(c, preset.f, preset.body);
  });

  std::vector<std::vector<std::string>> means, cov, boxplot, summary;
  for (std::size_t k = 0; k < jobs.size(); ++k) {
    const auto& out = outputs[k];
    const std::string method(to_string(jobs[k].sampler));
    const std::string rep = std::to_string(jobs[k].rep);
    const auto m = moments(out.samples, 2);
    for (std::size_t i = 0; i < d; ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      means.push_back({method, rep, std::to_string(i + 1), fmt(m.mean[ii]), fmt(m.batch_means_se[ii])});
      if (d <= 10)
        for (std::size_t j = i; j < d; ++j)
          cov.push_back({method, rep, std::to_string(i + 1), std::to_string(j + 1),
                         fmt(m.covariance(ii, static_cast<Eigen::Index>(j)))});
      if (jobs[k].rep == 0) {
        std::vector<double> col(out.samples.col(ii).data(), out.samples.col(ii).data() + out.samples.rows());
        std::sort(col.begin(), col.end());
        boxplot.push_back({method, std::to_string(i + 1), fmt(col.front()), fmt(sorted_quantile(col, 0.25)),
                           fmt(sorted_quantile(col, 0.5)), fmt(sorted_quantile(col, 0.75)), fmt(col.back())});
      }
    }
    auto row = summary_row(method, out);
    row.insert(row.begin() + 1, rep);
    row.push_back(jobs[k].sampler == SamplerKind::Rwm ? fmt(rwm_scales[k]) : "");
    summary.push_back(row);
  }
  write_table(ctx.out / "means.csv", {"method", "rep", "coord", "mean", "se"}, means);
  if (d <= 10) write_table(ctx.out / "covariance.csv", {"method", "rep", "i", "j", "value"}, cov);
  write_table(ctx.out / "boxplot.csv", {"method", "coord", "min", "q1", "median", "q3", "max"}, boxplot);
  auto header = kSummaryHeader;
  header[0] = "method";
  header.insert(header.begin() + 1, "rep");
  header.push_back("rwm_scale");
  write_table(ctx.out / "summary.csv", header, summary);
  log_line(ctx, "tmg d=" + std::to_string(d) + ": " + std::to_string(jobs.size()) + " chains in " +
                    std::to_string(elapsed(start_time)) + " s");
}

void cmd_volume(const RunContext& ctx) {
  const auto& cfg = ctx.config;
  const ConvexBody body = cfg.has("body.kind")
                              ? body_from_config(cfg)
                              : interpret("volume", [&] {
                                  return ConvexBody::cube(size_or(cfg, "volume.dim", 2),
                                                          cfg.get_double_or("volume.half_side", 1.0));
                                });
  ScheduleOptions so;
  so.c_gamma = cfg.get_double_or("volume.c_gamma", so.c_gamma);
  so.budget = cfg.get_u64_or("volume.budget", so.budget);
  so.burn_in_fraction = cfg.get_double_or("volume.burn_in", so.burn_in_fraction);
  const AnnealingSchedule schedule = interpret("volume", [&] {
    auto s = default_schedule(body, so);
    s.validate();
    return s;
  });
  write_run_manifest("volume", ctx);

  const auto start = std::chrono::steady_clock::now();
  std::vector<VolumeEstimate> estimates(ctx.reps);
  parallel_for(ctx.reps, ctx.threads,
               [&](std::size_t r) { estimates[r] = estimate_volume(schedule, ctx.seed, static_cast<std::uint64_t>(r)); });

  const double truth = body.volume();
  std::vector<std::vector<std::string>> rows;
  for (std::size_t r = 0; r < estimates.size(); ++r) {
    const auto& e = estimates[r];
    std::vector<std::vector<std::string>> report;
    for (std::size_t i = 0; i < schedule.phases.size(); ++i) {
      const auto& ph = schedule.phases[i];
      report.push_back({std::to_string(i), fmt(ph.sigma), fmt(ph.gamma), fmt(ph.lambda), fmt(e.log_phase_ratios[i]),
                        fmt(e.log_ratio_se[i])});
    }
    write_table(ctx.out / ("volume_rep" + std::to_string(r) + ".csv"),
                {"phase", "sigma", "gamma", "lambda", "log_ratio", "se"}, report);
    rows.push_back({std::to_string(r), fmt(e.estimate), fmt(e.estimate / truth), fmt(e.log_estimate),
                    fmt(e.relative_se), fmt(e.base_log_integral), fmt(e.base_log_integral_lower)});
  }
  write_table(ctx.out / "estimates.csv",
              {"rep", "estimate", "normalized", "log_estimate", "relative_se", "base_log_integral",
               "base_log_integral_lower"},
              rows);
  log_line(ctx, "volume: " + std::to_string(ctx.reps) + " repetition(s), " + std::to_string(schedule.phases.size()) +
                    " phases, " + std::to_string(elapsed(start)) + " s");
}

void cmd_lasso_path(const RunContext& ctx) {
  const auto& cfg = ctx.config;
  const fs::path data = cfg.get_or("lasso.data", "data/diabetes.csv");
  const auto target = cfg.get_or("lasso.target", "y");
  LassoPathOptions opts;
  if (cfg.has("lasso.t_grid")) {
    opts.t_grid = list_or(cfg, "lasso.t_grid", {});
  } else {
    const auto points = size_or(cfg, "lasso.t_points", 21);
    if (points < 2) throw ConfigError("lasso.t_points must be at least 2");
    for (std::size_t k = 0; k < points; ++k) opts.t_grid.push_back(static_cast<double>(k) / (points - 1));
  }
  for (std::size_t k = 1; k < opts.t_grid.size(); ++k)
    if (opts.t_grid[k] < opts.t_grid[k - 1]) throw ConfigError("lasso.t_grid must be nondecreasing");
  opts.n_samples = cfg.get_u64_or("lasso.n_samples", opts.n_samples);
  opts.burn_in_fraction = cfg.get_double_or("lasso.burn_in", opts.burn_in_fraction);
  opts.step_scale = cfg.get_double_or("lasso.step_scale", opts.step_scale);
  opts.repetitions = ctx.reps;
  opts.threads = ctx.threads;
  const bool standardise = cfg.get_bool_or("lasso.standardize", true);
  write_run_manifest("lasso-path", ctx);

  Dataset ds = load_csv(data, target);
  if (standardise) ds = standardize(ds);
  const auto fit = interpret("lasso", [&] { return ols(ds); });
  const auto start = std::chrono::steady_clock::now();
  const auto rows = interpret("lasso", [&] { return lasso_path(ds.x, ds.y, opts, ctx.seed); });

  std::vector<std::vector<std::string>> table;
  for (const auto& row : rows)
    for (Eigen::Index j = 0; j < row.median.size(); ++j)
      table.push_back({fmt(row.t), fmt(row.s), ds.feature_names[static_cast<std::size_t>(j)], fmt(row.median[j]),
                       fmt(row.lo95[j]), fmt(row.hi95[j])});
  write_table(ctx.out / "path.csv", {"t", "s", "coord", "median", "lo95", "hi95"}, table);

  std::vector<std::vector<std::string>> anchor;
  for (Eigen::Index j = 0; j < fit.beta.size(); ++j)
    anchor.push_back({ds.feature_names[static_cast<std::size_t>(j)], fmt(fit.beta[j])});
  write_table(ctx.out / "ols.csv", {"coord", "beta"}, anchor);

  std::vector<std::vector<std::string>> steps;
  for (const auto& row : rows) steps.push_back({fmt(row.t), fmt(row.s), fmt(row.gamma), fmt(2.0 * row.gamma)});
  write_table(ctx.out / "steps.csv", {"t", "s", "gamma", "lambda"}, steps);
  log_line(ctx, "lasso-path: " + std::to_string(rows.size()) + " grid points, ||beta_OLS||_1 = " + fmt(fit.l1_norm) +
                    ", " + std::to_string(elapsed(start)) + " s");
}

namespace {

std::vector<double> sweep_values(const Config& cfg, const std::string& prefix) {
  std::vector<double> v;
  if (cfg.has(prefix)) {
    v = list_or(cfg, prefix, {});
  } else if (cfg.has(prefix + "_min")) {
    const double lo = cfg.get_double(prefix + "_min");
    const double hi = cfg.get_double(prefix + "_max");
    const auto points = size_or(cfg, prefix + "_points", 10);
    if (!(lo > 0.0 && hi >= lo) || points == 0)
      throw ConfigError(prefix + "_min/_max must satisfy 0 < min <= max with at least one point");
    for (std::size_t k = 0; k < points; ++k) {
      const double u = points == 1 ? 0.0 : static_cast<double>(k) / static_cast<double>(points - 1);
      v.push_back(std::exp(std::log(lo) + u * (std::log(hi) - std::log(lo))));
    }
  }
  std::sort(v.begin(), v.end());
  return v;
}

InnerBodyConstants constants_from(const Config& cfg, const std::string& prefix) {
  return interpret("constants", [&] {
    return InnerBodyConstants(cfg.get_double_or(prefix + "delta1", 1.0), cfg.get_double_or(prefix + "delta2", 0.0));
  });
}

/// One `key=value` line per column, empty cells omitted.
void write_report(const fs::path& path, const std::vector<std::string>& header,
                  const std::vector<std::string>& row) {
  std::map<std::string, std::string> kv;
  for (std::size_t j = 0; j < header.size(); ++j)
    if (!row[j].empty()) kv[header[j]] = row[j];
  write_manifest(path, kv);
}

std::optional<double> cube_side(const ConvexBody& body) {
  const auto* box = std::get_if<BoxShape>(&body.shape());
  if (!box) return std::nullopt;
  const Vector sides = box->upper - box->lower;
  if (sides.maxCoeff() != sides.minCoeff()) return std::nullopt;
  return sides[0];
}

}  // namespace

void cmd_bounds(const RunContext& ctx) {
  const auto& cfg = ctx.config;
  const BoundCase bc = interpret("bounds.case", [&] { return parse_bound_case(cfg.get_or("bounds.case", "a")); });
  const auto constants = constants_from(cfg, "bounds.");
  BoundInputs in;
  std::optional<double> side;
  if (cfg.has("body.kind")) {
    const ConvexBody body = body_from_config(cfg);
    in = interpret("body", [&] { return BoundInputs::for_body(body, constants); });
    side = cube_side(body);
  } else {
    if (bc == BoundCase::A) throw ConfigError("case (a) needs a box or ball body (body.kind)");
    in.dim = size_or(cfg, "bounds.dim", 1);
    in.inner_radius = cfg.get_double("bounds.r");
    in.outer_radius = cfg.get_double("bounds.R");
    in.constants = constants;
  }
  const auto lambdas = sweep_values(cfg, "bounds.lambda");
  if (lambdas.empty()) throw ConfigError("set bounds.lambda or bounds.lambda_min/bounds.lambda_max");
  // Reject the whole sweep before writing anything if a value is inadmissible.
  const auto dom = admissible_lambda(bc, in.dim, in.inner_radius);
  for (const double lam : lambdas)
    if (!(lam > 0.0) || (dom.upper_closed ? lam > dom.upper : lam >= dom.upper))
      throw DomainError("bounds.lambda=" + fmt(lam) + " is outside the admissible interval of case (" +
                            std::string(to_string(bc)) + "), upper end " + fmt(dom.upper),
                        0.0, dom.upper, dom.upper_closed);
  write_run_manifest("bounds", ctx);

  std::vector<std::vector<std::string>> rows;
  for (const double lam : lambdas) {
    const auto tv = tv_bound(bc, in, lam);
    const double w1 = w1_bound(bc, in, lam);
    rows.push_back({fmt(lam), fmt(tv.value), fmt(tv.raw), tv.informative ? "1" : "0", fmt(w1),
                    side ? fmt(cube_exact_tv(in.dim, *side, lam)) : "",
                    in.volumes ? fmt(d_constant(*in.volumes, lam)) : ""});
  }
  const std::vector<std::string> header{"lambda",   "tv_bound",      "tv_raw",    "informative",
                                        "w1_bound", "cube_exact_tv", "d_constant"};
  write_table(ctx.out / "bounds.csv", header, rows);
  if (rows.size() == 1) write_report(ctx.out / "report.txt", header, rows.front());
  log_line(ctx, "bounds: case (" + std::string(to_string(bc)) + "), " + std::to_string(rows.size()) + " rows");
}

void cmd_plan(const RunContext& ctx) {
  const auto& cfg = ctx.config;
  const auto metric = cfg.get_or("plan.metric", "tv");
  if (metric != "tv" && metric != "w2") throw ConfigError("plan.metric must be tv or w2");
  PlanRequest base;
  base.epsilon = cfg.get_double_or("plan.epsilon", 0.1);
  base.dim = size_or(cfg, "plan.dim", 1);
  base.inner_radius = cfg.get_double_or("plan.r", 1.0);
  base.outer_radius = cfg.get_double_or("plan.R", 1.0);
  base.lf = cfg.get_double_or("plan.lf", 0.0);
  base.constants = constants_from(cfg, "plan.");
  base.assumption = interpret("plan.assumption", [&] { return parse_bound_case(cfg.get_or("plan.assumption", "b")); });
  base.split = cfg.get_double_or("plan.split", base.split);
  if (cfg.has("plan.x0_dist")) base.x0_dist = cfg.get_double("plan.x0_dist");
  base.tuning.gamma_bar_fraction = cfg.get_double_or("plan.gamma_bar_fraction", base.tuning.gamma_bar_fraction);
  const double m = cfg.get_double_or("plan.m", 0.0);

  const auto sweep = cfg.get_or("plan.sweep", "none");
  std::vector<double> values = sweep_values(cfg, "plan.values");
  if (sweep == "none") {
    values = {0.0};
  } else if (sweep != "epsilon" && sweep != "dim" && sweep != "r" && sweep != "R") {
    throw ConfigError("plan.sweep must be none, epsilon, dim, r or R");
  } else if (values.empty()) {
    throw ConfigError("plan.sweep needs plan.values or plan.values_min/plan.values_max");
  }

  std::vector<PlanRequest> requests;
  for (const double v : values) {
    PlanRequest req = base;
    if (sweep == "epsilon") req.epsilon = v;
    if (sweep == "dim") {
      if (v < 1.0 || v != std::floor(v)) throw ConfigError("plan.values for dim must be positive integers");
      req.dim = static_cast<std::size_t>(v);
    }
    if (sweep == "r") req.inner_radius = v;
    if (sweep == "R") req.outer_radius = v;
    requests.push_back(req);
  }
  std::vector<TuningReport> reports;
  for (const auto& req : requests) {
    reports.push_back(interpret("plan", [&] {
      if (metric == "w2")
        return w2_tuning(req.epsilon, req.x0_dist.value_or(req.outer_radius), m, req.lf, req.dim);
      return plan_theorem1(req);
    }));
  }
  write_run_manifest("plan", ctx);

  std::vector<std::vector<std::string>> rows;
  for (std::size_t k = 0; k < requests.size(); ++k) {
    const auto& q = requests[k];
    const auto& p = reports[k];
    rows.push_back({fmt(q.epsilon), std::to_string(q.dim), fmt(q.inner_radius), fmt(q.outer_radius), fmt(p.lambda),
                    fmt(p.gamma), p.n_saturated ? fmt(p.n_real) : fmt(p.n), fmt(p.n_real), fmt(p.horizon), fmt(p.log_kappa), fmt(p.kappa), fmt(p.a1), fmt(p.a2),
                    fmt(p.gamma_bar), fmt(p.quadratic_ceiling), fmt(p.theorem1_ceiling),
                    std::string(to_string(p.binding)), fmt(p.epsilon_regularization), fmt(p.regularization_bound),
                    fmt(p.epsilon_mcmc), p.trivially_satisfied ? "1" : "0"});
  }
  const std::vector<std::string> header{
      "epsilon",   "dim",       "r",         "R",  "lambda", "gamma",     "n",
      "n_real",    "horizon",   "log_kappa", "kappa",     "a1", "a2",     "gamma_bar", "quadratic_ceiling",
      "theorem1_ceiling", "binding", "epsilon_regularization", "regularization_bound", "epsilon_mcmc",
      "trivially_satisfied"};
  write_table(ctx.out / "plan.csv", header, rows);
  if (sweep == "none") write_report(ctx.out / "report.txt", header, rows.front());
  log_line(ctx, "plan: " + std::to_string(rows.size()) + " row(s)");
}

int exit_code_for(const std::exception_ptr& error) {
  try {
    std::rethrow_exception(error);
  } catch (const DivergedChain&) {
    return kDiverged;
  } catch (const ScheduleTooCoarse&) {
    return kDiverged;
  } catch (const std::overflow_error&) {
    return kDiverged;
  } catch (const IoError&) {
    return kIoError;
  } catch (const ParseError&) {
    return kIoError;
  } catch (const fs::filesystem_error&) {
    return kIoError;
  } catch (const ConfigError&) {
    return kConfigError;
  } catch (const std::invalid_argument&) {
    return kConfigError;
  } catch (const std::domain_error&) {
    return kConfigError;
  } catch (...) {
    return 1;
  }
}

int run(const std::string& command, const RunOptions& opts, std::ostream& log, std::ostream& err) {
  try {
    const RunContext ctx = make_context(command, opts, log);
    if (command == "sample") cmd_sample(ctx);
    if (command == "tmg") cmd_tmg(ctx);
    if (command == "volume") cmd_volume(ctx);
    if (command == "lasso-path") cmd_lasso_path(ctx);
    if (command == "bounds") cmd_bounds(ctx);
    if (command == "plan") cmd_plan(ctx);
    return kOk;
  } catch (const std::exception& e) {
    const int code = exit_code_for(std::current_exception());
    err << "myula " << command << ": " << e.what() << '\n';
    return code;
  }
}

}  // namespace myula::cli
