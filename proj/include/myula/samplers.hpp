#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "myula/convex_body.hpp"
#include "myula/moreau_yosida.hpp"
#include "myula/potential.hpp"
#include "myula/rng.hpp"

namespace myula {

enum class SamplerKind { Myula, Plmc, Ula, Rwm };

std::string_view to_string(SamplerKind kind);
/// Accepts "myula", "plmc", "ula", "rwm" (case-insensitive).
SamplerKind parse_sampler(std::string_view name);

/// Coordinates beyond this magnitude count as divergence.
inline constexpr double kDivergenceThreshold = 1e12;

struct ChainConfig {
  SamplerKind sampler = SamplerKind::Myula;
  double gamma = 1e-3;
  /// Defaults to 2γ.
  std::optional<double> lambda;
  std::uint64_t n_samples = 1000;
  double burn_in_fraction = 0.10;
  std::uint64_t thinning = 1;
  std::uint64_t seed = 0;
  std::uint64_t chain_index = 0;
  /// Defaults to the origin.
  std::optional<Vector> initial_point;
  double rwm_proposal_scale = 0.1;
  /// RWM targets π (reject outside K) when true, π^λ otherwise.
  bool rwm_hard_constraint = true;
  /// Reject MYULA stepsizes above λ(1 + L_f²λ²)⁻¹.
  bool enforce_theory_step = false;

  double effective_lambda() const { return lambda.value_or(2.0 * gamma); }
  std::uint64_t burn_in_iterations() const;
  /// floor(n (1 - burn_in) / thinning)
  std::uint64_t kept_rows() const;
  void validate() const;
};

struct ChainOutput {
  Matrix samples;
  std::optional<double> acceptance_rate;
  double mean_dist_to_body = 0.0;
  double fraction_outside = 0.0;
  double max_dist_to_body = 0.0;
  double wall_time = 0.0;
  Vector final_state;
};

/// Summary of a streamed run (no sample storage).
struct ChainSummary {
  std::uint64_t kept = 0;
  std::optional<double> acceptance_rate;
  double mean_dist_to_body = 0.0;
  double fraction_outside = 0.0;
  double max_dist_to_body = 0.0;
  double wall_time = 0.0;
  Vector final_state;
};

/// X⁺ = (1 - γ/λ) X - γ∇f(X) + (γ/λ) proj_K(X) + √(2γ) Z
Vector myula_step(const RegularizedPotential& rp, double gamma, const Vector& x, const Vector& z);
/// X⁺ = proj_K(X - γ∇f(X) + √(2γ) Z); throws InvalidState unless x ∈ K.
Vector plmc_step(const Potential& p, const ConvexBody& body, double gamma, const Vector& x, const Vector& z);
/// X⁺ = X - γ∇f(X) + √(2γ) Z
Vector ula_step(const Potential& p, double gamma, const Vector& x, const Vector& z);

struct RwmResult {
  Vector point;
  bool accepted;
};

/// Gaussian random-walk Metropolis on π^λ.
RwmResult rwm_step(const RegularizedPotential& rp, double scale, const Vector& x, CounterRng& rng);
/// Gaussian random-walk Metropolis on π ∝ e^{-f} 1_K; proposals outside K are rejected.
RwmResult rwm_step(const Potential& p, const ConvexBody& body, double scale, const Vector& x, CounterRng& rng);

/// Runs one chain, calling `on_kept` for every retained draw after burn-in
/// and thinning. Deterministic in (cfg.seed, cfg.chain_index). Throws
/// DivergedChain with the offending iteration.
ChainSummary stream_chain(const ChainConfig& cfg, const Potential& p, const ConvexBody& body,
                          const std::function<void(const Vector&)>& on_kept);

ChainOutput run_chain(const ChainConfig& cfg, const Potential& p, const ConvexBody& body);

/// Chains 0..count-1 with streams derived from (cfg.seed, index); results are
/// keyed by index and do not depend on `threads`.
std::vector<ChainOutput> run_chains(const ChainConfig& cfg, std::size_t count, const Potential& p,
                                    const ConvexBody& body, unsigned threads = 1);

}  // namespace myula
