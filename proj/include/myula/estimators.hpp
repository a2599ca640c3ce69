#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "myula/convex_body.hpp"

namespace myula {

struct Moments {
  Vector mean;
  Matrix covariance;  ///< unbiased, divisor n - 1
  Vector batch_means_se;
  std::size_t n = 0;
};

/// Sample mean, unbiased covariance and per-coordinate batch-means standard
/// errors with ⌈√n⌉ non-overlapping batches. Rows are draws. Throws
/// std::invalid_argument below `min_samples` rows (at least 2).
Moments moments(const Matrix& samples, std::size_t min_samples = 100);

/// Standard error of the mean of each column from ⌈√n⌉ batches of size
/// ⌊n / ⌈√n⌉⌋; trailing rows that do not fill a batch are dropped.
Vector batch_means_se(const Matrix& samples);
double batch_means_se(const std::vector<double>& values);

/// (1/n) Σ |a_(i) - b_(i)| over order statistics; equal sizes required.
double empirical_w1_1d(std::vector<double> a, std::vector<double> b);

struct ConstraintDiagnostics {
  double mean_dist = 0.0;
  double fraction_outside = 0.0;
  double max_dist = 0.0;
};
ConstraintDiagnostics constraint_diagnostics(const Matrix& samples, const ConvexBody& body);

/// Linear-interpolation quantile (type 7) of already sorted values.
double sorted_quantile(const std::vector<double>& sorted, double q);

/// One tempered target π_i^λ ∝ exp(-||x||² / 2σ² - ι_K^λ(x)) and the number of
/// MYULA iterations spent on it.
struct AnnealingPhase {
  double sigma;
  double gamma;
  double lambda;
  std::uint64_t budget;
};

/// Phases 0..M-1 sampled with MYULA; the telescoping product ends at the
/// uniform distribution on K, so the last ratio uses the hard indicator.
struct AnnealingSchedule {
  std::vector<AnnealingPhase> phases;
  ConvexBody body;
  double burn_in_fraction = 0.1;

  void validate() const;
};

struct ScheduleOptions {
  double c_gamma = 0.003;
  std::uint64_t budget = 100000;
  double burn_in_fraction = 0.1;
};

/// σ₀ = r / (6√d), σ_{i+1}² = σ_i² (1 + 1/√d) until σ ≥ 4R;
/// γ_i = c_γ / {d max(d, 1/σ_i)}, λ_i = 2γ_i.
AnnealingSchedule default_schedule(const ConvexBody& body, const ScheduleOptions& opts = {});

struct VolumeEstimate {
  double estimate = 0.0;
  double log_estimate = 0.0;
  std::vector<double> phase_ratios;
  std::vector<double> log_phase_ratios;
  /// Batch-means standard error of each log ratio (delta method).
  std::vector<double> log_ratio_se;
  /// log (2πσ₀²)^{d/2}, an upper bound on the first normalising constant.
  double base_log_integral = 0.0;
  /// Lower end of the bracket: the Gaussian mass inside B(0, r).
  double base_log_integral_lower = 0.0;
  double relative_se = 0.0;
};

/// Telescoping estimate of Vol(K) with one RNG stream (seed, stream). Each
/// phase starts from the previous phase's final state, the first at the
/// origin. Throws ScheduleTooCoarse when a ratio leaves the double range.
VolumeEstimate estimate_volume(const AnnealingSchedule& schedule, std::uint64_t seed, std::uint64_t stream = 0);

struct LassoPathOptions {
  std::vector<double> t_grid;
  std::uint64_t n_samples = 100000;
  double burn_in_fraction = 0.1;
  std::size_t repetitions = 1;
  /// γ = min(step_scale · s^{3/2}, 1 / (2 L_f)), λ = 2γ.
  double step_scale = 1e-5;
  double s_min_fraction = 1e-6;
  unsigned threads = 1;
};

struct LassoPathRow {
  double t;
  double s;
  double gamma;
  Vector median;
  Vector lo95;
  Vector hi95;
};

/// For each t, MYULA on ||Y - Xβ||² + ι_{B₁(0, s)}(β) with s = t ||β_OLS||₁;
/// quantiles of the pooled draws of all repetitions. The t grid must be
/// nondecreasing in [0, 1].
std::vector<LassoPathRow> lasso_path(const Matrix& x, const Vector& y, const LassoPathOptions& opts,
                                     std::uint64_t seed);

}  // namespace myula
