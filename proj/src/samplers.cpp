#include "myula/samplers.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <string>

#include "myula/errors.hpp"
#include "myula/parallel.hpp"

namespace myula {

std::string_view to_string(SamplerKind kind) {
  switch (kind) {
    case SamplerKind::Myula:
      return "myula";
    case SamplerKind::Plmc:
      return "plmc";
    case SamplerKind::Ula:
      return "ula";
    case SamplerKind::Rwm:
      return "rwm";
  }
  return "unknown";
}

SamplerKind parse_sampler(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower == "myula") return SamplerKind::Myula;
  if (lower == "plmc") return SamplerKind::Plmc;
  if (lower == "ula") return SamplerKind::Ula;
  if (lower == "rwm") return SamplerKind::Rwm;
  throw std::invalid_argument("unknown sampler '" + std::string(name) + "' (expected myula, plmc, ula or rwm)");
}

std::uint64_t ChainConfig::burn_in_iterations() const {
  // n (1 - b) is nudged up by a relative 1e-12 so that e.g. 10 * 0.9 keeps 9.
  const double kept = std::floor(static_cast<double>(n_samples) * (1.0 - burn_in_fraction) * (1.0 + 1e-12));
  const auto kept_total = std::min<std::uint64_t>(n_samples, static_cast<std::uint64_t>(kept));
  return n_samples - kept_total;
}

std::uint64_t ChainConfig::kept_rows() const { return (n_samples - burn_in_iterations()) / thinning; }

void ChainConfig::validate() const {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw std::invalid_argument("stepsize gamma must be positive");
  if (lambda && (!(*lambda > 0.0) || !std::isfinite(*lambda)))
    throw std::invalid_argument("lambda must be positive");
  if (n_samples == 0) throw std::invalid_argument("n_samples must be positive");
  if (!(burn_in_fraction >= 0.0 && burn_in_fraction < 1.0))
    throw std::invalid_argument("burn_in_fraction must lie in [0, 1)");
  if (thinning == 0) throw std::invalid_argument("thinning must be positive");
  if (sampler == SamplerKind::Rwm && !(rwm_proposal_scale > 0.0))
    throw std::invalid_argument("rwm_proposal_scale must be positive");
}

Vector myula_step(const RegularizedPotential& rp, double gamma, const Vector& x, const Vector& z) {
  const double ratio = gamma / rp.lambda();
  return (1.0 - ratio) * x - gamma * rp.base().gradient(x) + ratio * rp.body().project(x) +
         std::sqrt(2.0 * gamma) * z;
}

Vector plmc_step(const Potential& p, const ConvexBody& body, double gamma, const Vector& x, const Vector& z) {
  if (!body.contains(x)) throw InvalidState("plmc_step: current state lies outside K");
  return body.project(x - gamma * p.gradient(x) + std::sqrt(2.0 * gamma) * z);
}

Vector ula_step(const Potential& p, double gamma, const Vector& x, const Vector& z) {
  return x - gamma * p.gradient(x) + std::sqrt(2.0 * gamma) * z;
}

namespace {

bool metropolis_accept(double log_ratio, CounterRng& rng) {
  if (log_ratio >= 0.0) return true;
  return std::log(rng.uniform()) < log_ratio;
}

}  // namespace

RwmResult rwm_step(const RegularizedPotential& rp, double scale, const Vector& x, CounterRng& rng) {
  Vector z(x.size());
  rng.fill_normal(z);
  Vector proposal = x + scale * z;
  const double log_ratio = rp.log_density(proposal) - rp.log_density(x);
  if (metropolis_accept(log_ratio, rng)) return {std::move(proposal), true};
  return {x, false};
}

RwmResult rwm_step(const Potential& p, const ConvexBody& body, double scale, const Vector& x, CounterRng& rng) {
  Vector z(x.size());
  rng.fill_normal(z);
  Vector proposal = x + scale * z;
  if (!body.contains(proposal)) return {x, false};
  const double log_ratio = p.value(x) - p.value(proposal);
  if (metropolis_accept(log_ratio, rng)) return {std::move(proposal), true};
  return {x, false};
}

namespace {

bool diverged(const Vector& x) {
  return !x.allFinite() || x.cwiseAbs().maxCoeff() > kDivergenceThreshold;
}

}  // namespace

ChainSummary stream_chain(const ChainConfig& cfg, const Potential& p, const ConvexBody& body,
                          const std::function<void(const Vector&)>& on_kept) {
  cfg.validate();
  const auto d = static_cast<Eigen::Index>(p.dimension());
  if (static_cast<std::size_t>(d) != body.dimension())
    throw std::invalid_argument("potential and body dimensions differ");

  Vector x = cfg.initial_point.value_or(Vector::Zero(d));
  if (x.size() != d) throw std::invalid_argument("initial point has the wrong dimension");

  const double gamma = cfg.gamma;
  const double lambda = cfg.effective_lambda();
  if (cfg.sampler == SamplerKind::Myula && cfg.enforce_theory_step) {
    const double lf = p.lipschitz();
    const double ceiling = lambda / (1.0 + lf * lf * lambda * lambda);
    if (!(gamma < ceiling))
      throw std::invalid_argument("gamma=" + std::to_string(gamma) + " exceeds the admissible ceiling " +
                                  std::to_string(ceiling) + " = lambda (1 + L_f^2 lambda^2)^-1");
  }
  const bool hard_rwm = cfg.sampler == SamplerKind::Rwm && cfg.rwm_hard_constraint;
  if ((cfg.sampler == SamplerKind::Plmc || hard_rwm) && !body.contains(x))
    throw InvalidState(std::string(to_string(cfg.sampler)) + ": initial point must lie in K");

  CounterRng rng(cfg.seed, cfg.chain_index);
  const auto start = std::chrono::steady_clock::now();

  Vector z(d), grad(d), proj(d), scratch(d);
  const double noise = std::sqrt(2.0 * gamma);
  const double ratio = gamma / lambda;

  std::optional<RegularizedPotential> smoothed;
  if (cfg.sampler == SamplerKind::Rwm && !cfg.rwm_hard_constraint) smoothed.emplace(p, body, lambda);
  double current_log_density = 0.0;
  if (cfg.sampler == SamplerKind::Rwm)
    current_log_density = smoothed ? smoothed->log_density(x) : -p.value(x);
  std::uint64_t accepted = 0;

  const std::uint64_t burn = cfg.burn_in_iterations();
  ChainSummary summary;
  double dist_sum = 0.0;
  std::uint64_t outside = 0;

  for (std::uint64_t k = 1; k <= cfg.n_samples; ++k) {
    switch (cfg.sampler) {
      case SamplerKind::Myula:
        rng.fill_normal(z);
        body.project_into(x, proj);
        p.gradient_into(x, grad);
        x = (1.0 - ratio) * x - gamma * grad + ratio * proj + noise * z;
        break;
      case SamplerKind::Plmc:
        rng.fill_normal(z);
        p.gradient_into(x, grad);
        scratch = x - gamma * grad + noise * z;
        body.project_into(scratch, x);
        break;
      case SamplerKind::Ula:
        rng.fill_normal(z);
        p.gradient_into(x, grad);
        x += noise * z - gamma * grad;
        break;
      case SamplerKind::Rwm: {
        rng.fill_normal(z);
        scratch = x + cfg.rwm_proposal_scale * z;
        double proposal_log_density = 0.0;
        bool admissible = true;
        if (smoothed) {
          proposal_log_density = smoothed->log_density(scratch);
        } else if (body.contains(scratch)) {
          proposal_log_density = -p.value(scratch);
        } else {
          admissible = false;
        }
        if (admissible && metropolis_accept(proposal_log_density - current_log_density, rng)) {
          x.swap(scratch);
          current_log_density = proposal_log_density;
          ++accepted;
        }
        break;
      }
    }

    if (diverged(x))
      throw DivergedChain(std::string(to_string(cfg.sampler)) + " chain diverged at iteration " + std::to_string(k),
                          k);

    if (k > burn && (k - burn) % cfg.thinning == 0) {
      const double dist = body.distance(x);
      dist_sum += dist;
      if (dist > 0.0) ++outside;
      summary.max_dist_to_body = std::max(summary.max_dist_to_body, dist);
      ++summary.kept;
      on_kept(x);
    }
  }

  if (summary.kept > 0) {
    summary.mean_dist_to_body = dist_sum / static_cast<double>(summary.kept);
    summary.fraction_outside = static_cast<double>(outside) / static_cast<double>(summary.kept);
  }
  if (cfg.sampler == SamplerKind::Rwm)
    summary.acceptance_rate = static_cast<double>(accepted) / static_cast<double>(cfg.n_samples);
  summary.final_state = x;
  summary.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return summary;
}

ChainOutput run_chain(const ChainConfig& cfg, const Potential& p, const ConvexBody& body) {
  cfg.validate();
  ChainOutput out;
  out.samples.resize(static_cast<Eigen::Index>(cfg.kept_rows()), static_cast<Eigen::Index>(p.dimension()));
  Eigen::Index row = 0;
  const auto summary = stream_chain(cfg, p, body, [&](const Vector& x) { out.samples.row(row++) = x.transpose(); });
  out.acceptance_rate = summary.acceptance_rate;
  out.mean_dist_to_body = summary.mean_dist_to_body;
  out.fraction_outside = summary.fraction_outside;
  out.max_dist_to_body = summary.max_dist_to_body;
  out.wall_time = summary.wall_time;
  out.final_state = summary.final_state;
  return out;
}

std::vector<ChainOutput> run_chains(const ChainConfig& cfg, std::size_t count, const Potential& p,
                                    const ConvexBody& body, unsigned threads) {
  std::vector<ChainOutput> outputs(count);
  parallel_for(count, threads, [&](std::size_t i) {
    ChainConfig local = cfg;
    local.chain_index = cfg.chain_index + i;
    outputs[i] = run_chain(local, p, body);
  });
  return outputs;
}

}  // namespace myula
