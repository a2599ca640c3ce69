#include "myula/estimators.hpp"

#include <algorithm>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "myula/data_io.hpp"
#include "myula/errors.hpp"
#include "myula/parallel.hpp"
#include "myula/potential.hpp"
#include "myula/rng.hpp"
#include "myula/samplers.hpp"

namespace myula {

namespace {

constexpr double kLogOverflow = 700.0;

std::size_t batch_count(std::size_t n) {
  auto b = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n))));
  while (b * b < n) ++b;
  while (b > 1 && (b - 1) * (b - 1) >= n) --b;
  return b;
}

}  // namespace

Vector batch_means_se(const Matrix& samples) {
  const auto n = static_cast<std::size_t>(samples.rows());
  Vector se = Vector::Zero(samples.cols());
  if (n < 2) return se;
  const std::size_t b = batch_count(n);
  const std::size_t size = n / b;
  Matrix means(static_cast<Eigen::Index>(b), samples.cols());
  for (std::size_t k = 0; k < b; ++k)
    means.row(static_cast<Eigen::Index>(k)) =
        samples.middleRows(static_cast<Eigen::Index>(k * size), static_cast<Eigen::Index>(size)).colwise().mean();
  const Vector grand = means.colwise().mean().transpose();
  for (Eigen::Index j = 0; j < samples.cols(); ++j) {
    const double var = (means.col(j).array() - grand[j]).square().sum() / static_cast<double>(b - 1);
    se[j] = std::sqrt(var / static_cast<double>(b));
  }
  return se;
}

double batch_means_se(const std::vector<double>& values) {
  const Eigen::Map<const Vector> col(values.data(), static_cast<Eigen::Index>(values.size()));
  return batch_means_se(Matrix(col))[0];
}

Moments moments(const Matrix& samples, std::size_t min_samples) {
  min_samples = std::max<std::size_t>(min_samples, 2);
  const auto n = static_cast<std::size_t>(samples.rows());
  if (n < min_samples)
    throw std::invalid_argument("moments need at least " + std::to_string(min_samples) + " draws, got " +
                                std::to_string(n));
  Moments m;
  m.n = n;
  m.mean = samples.colwise().mean().transpose();
  const Matrix centered = samples.rowwise() - m.mean.transpose();
  m.covariance = centered.transpose() * centered / static_cast<double>(n - 1);
  m.batch_means_se = batch_means_se(samples);
  return m;
}

double empirical_w1_1d(std::vector<double> a, std::vector<double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("empirical_w1_1d needs samples of equal size");
  if (a.empty()) throw std::invalid_argument("empirical_w1_1d needs non-empty samples");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += std::abs(a[i] - b[i]);
  return sum / static_cast<double>(a.size());
}

ConstraintDiagnostics constraint_diagnostics(const Matrix& samples, const ConvexBody& body) {
  ConstraintDiagnostics out;
  if (samples.rows() == 0) return out;
  std::size_t outside = 0;
  double sum = 0.0;
  for (Eigen::Index i = 0; i < samples.rows(); ++i) {
    const double dist = body.distance(samples.row(i).transpose());
    sum += dist;
    if (dist > 0.0) ++outside;
    out.max_dist = std::max(out.max_dist, dist);
  }
  out.mean_dist = sum / static_cast<double>(samples.rows());
  out.fraction_outside = static_cast<double>(outside) / static_cast<double>(samples.rows());
  return out;
}

double sorted_quantile(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) throw std::invalid_argument("quantile of an empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("quantile level must lie in [0, 1]");
  const double h = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

void AnnealingSchedule::validate() const {
  if (phases.empty()) throw std::invalid_argument("annealing schedule has no phases");
  if (!(burn_in_fraction >= 0.0 && burn_in_fraction < 1.0))
    throw std::invalid_argument("burn_in_fraction must lie in [0, 1)");
  for (std::size_t i = 0; i < phases.size(); ++i) {
    const auto& p = phases[i];
    if (!(p.sigma > 0.0) || !std::isfinite(p.sigma) || !(p.gamma > 0.0) || !(p.lambda > 0.0))
      throw std::invalid_argument("phase " + std::to_string(i) + ": sigma, gamma and lambda must be positive");
    if (p.budget == 0) throw std::invalid_argument("phase " + std::to_string(i) + ": budget must be positive");
    if (i > 0 && p.sigma < phases[i - 1].sigma)
      throw std::invalid_argument("phase " + std::to_string(i) + ": sigma must not decrease");
  }
}

AnnealingSchedule default_schedule(const ConvexBody& body, const ScheduleOptions& opts) {
  if (!(opts.c_gamma > 0.0)) throw std::invalid_argument("c_gamma must be positive");
  if (opts.budget == 0) throw std::invalid_argument("budget must be positive");
  const auto radii = body.radii();
  const double d = static_cast<double>(body.dimension());
  const double growth = 1.0 + 1.0 / std::sqrt(d);
  AnnealingSchedule s{{}, body, opts.burn_in_fraction};
  double var = std::pow(radii.inner / (6.0 * std::sqrt(d)), 2);
  while (true) {
    const double sigma = std::sqrt(var);
    const double gamma = opts.c_gamma / (d * std::max(d, 1.0 / sigma));
    s.phases.push_back({sigma, gamma, 2.0 * gamma, opts.budget});
    if (sigma >= 4.0 * radii.outer) break;
    var *= growth;
  }
  return s;
}

namespace {

double log_mean_exp(const std::vector<double>& logs, double top) {
  double sum = 0.0;
  for (const double v : logs) sum += std::exp(v - top);
  return top + std::log(sum / static_cast<double>(logs.size()));
}

}  // namespace

VolumeEstimate estimate_volume(const AnnealingSchedule& schedule, std::uint64_t seed, std::uint64_t stream) {
  schedule.validate();
  const ConvexBody& body = schedule.body;
  const auto radii = body.radii();
  const auto d = static_cast<Eigen::Index>(body.dimension());
  const double dd = static_cast<double>(d);
  const auto& phases = schedule.phases;

  VolumeEstimate est;
  const double sigma0 = phases.front().sigma;
  est.base_log_integral = 0.5 * dd * std::log(2.0 * M_PI * sigma0 * sigma0);
  // P(||σ₀ Z|| > r) = Q(d/2, r² / 2σ₀²)
  const double tail = boost::math::gamma_q(0.5 * dd, radii.inner * radii.inner / (2.0 * sigma0 * sigma0));
  est.base_log_integral_lower = est.base_log_integral + std::log1p(-tail);

  CounterRng rng(seed, stream);
  Vector x = Vector::Zero(d);
  Vector z(d), proj(d);
  std::vector<double> log_g;
  double log_total = est.base_log_integral;
  double var_total = 0.0;

  for (std::size_t i = 0; i < phases.size(); ++i) {
    const auto& ph = phases[i];
    const bool last = i + 1 == phases.size();
    if (!last && phases[i + 1].sigma == ph.sigma && phases[i + 1].lambda == ph.lambda) {
      est.phase_ratios.push_back(1.0);
      est.log_phase_ratios.push_back(0.0);
      est.log_ratio_se.push_back(0.0);
      continue;
    }
    const double inv_var = 1.0 / (ph.sigma * ph.sigma);
    const double next_inv_var = last ? 0.0 : 1.0 / (phases[i + 1].sigma * phases[i + 1].sigma);
    const double dist_coeff = last ? 0.0 : 0.5 / ph.lambda - 0.5 / phases[i + 1].lambda;
    const double noise = std::sqrt(2.0 * ph.gamma);
    const double shrink = 1.0 - ph.gamma * inv_var - ph.gamma / ph.lambda;
    const double pull = ph.gamma / ph.lambda;

    ChainConfig rounding;
    rounding.n_samples = ph.budget;
    rounding.burn_in_fraction = schedule.burn_in_fraction;
    const std::uint64_t burn = rounding.burn_in_iterations();
    log_g.clear();
    log_g.reserve(ph.budget - burn);

    for (std::uint64_t k = 1; k <= ph.budget; ++k) {
      rng.fill_normal(z);
      body.project_into(x, proj);
      x = shrink * x + pull * proj + noise * z;
      if (!x.allFinite())
        throw DivergedChain("annealing phase " + std::to_string(i) + " diverged at iteration " + std::to_string(k), k);
      if (k <= burn) continue;
      const double half_sq = 0.5 * x.squaredNorm();
      if (last) {
        log_g.push_back(body.contains(x) ? inv_var * half_sq : -std::numeric_limits<double>::infinity());
      } else {
        body.project_into(x, proj);
        log_g.push_back((inv_var - next_inv_var) * half_sq + dist_coeff * (x - proj).squaredNorm());
      }
    }

    const double top = *std::max_element(log_g.begin(), log_g.end());
    if (!std::isfinite(top) || top > kLogOverflow)
      throw ScheduleTooCoarse("annealing phase " + std::to_string(i) + ": log ratio term " + std::to_string(top) +
                                  " is out of range; refine the sigma ladder",
                              i);
    const double log_ratio = log_mean_exp(log_g, top);
    if (!std::isfinite(log_ratio) || std::abs(log_ratio) > kLogOverflow)
      throw ScheduleTooCoarse("annealing phase " + std::to_string(i) + ": ratio overflow", i);

    std::vector<double> w(log_g.size());
    for (std::size_t k = 0; k < w.size(); ++k) w[k] = std::exp(log_g[k] - top);
    const double mean_w = std::exp(log_ratio - top);
    const double rel_se = batch_means_se(w) / mean_w;

    est.phase_ratios.push_back(std::exp(log_ratio));
    est.log_phase_ratios.push_back(log_ratio);
    est.log_ratio_se.push_back(rel_se);
    log_total += log_ratio;
    var_total += rel_se * rel_se;
  }

  est.log_estimate = log_total;
  est.estimate = std::exp(log_total);
  est.relative_se = std::sqrt(var_total);
  return est;
}

std::vector<LassoPathRow> lasso_path(const Matrix& x, const Vector& y, const LassoPathOptions& opts,
                                     std::uint64_t seed) {
  if (opts.t_grid.empty()) throw std::invalid_argument("t grid is empty");
  for (std::size_t k = 0; k < opts.t_grid.size(); ++k) {
    const double t = opts.t_grid[k];
    if (!(t >= 0.0 && t <= 1.0)) throw std::invalid_argument("t grid values must lie in [0, 1]");
    if (k > 0 && t < opts.t_grid[k - 1]) throw std::invalid_argument("t grid must be nondecreasing");
  }
  if (opts.repetitions == 0) throw std::invalid_argument("repetitions must be positive");
  if (!(opts.step_scale > 0.0) || !(opts.s_min_fraction > 0.0))
    throw std::invalid_argument("step_scale and s_min_fraction must be positive");

  const OlsFit anchor = ols(x, y);
  const Potential f = Potential::least_squares(x, y);
  const auto d = static_cast<std::size_t>(x.cols());
  const double step_cap = 1.0 / (2.0 * f.lipschitz());

  std::vector<LassoPathRow> rows(opts.t_grid.size());
  parallel_for(opts.t_grid.size(), opts.threads, [&](std::size_t k) {
    LassoPathRow& row = rows[k];
    row.t = opts.t_grid[k];
    row.s = std::max(row.t * anchor.l1_norm, opts.s_min_fraction * anchor.l1_norm);
    row.gamma = std::min(opts.step_scale * std::pow(row.s, 1.5), step_cap);
    const ConvexBody body = ConvexBody::l1_ball(d, row.s);

    ChainConfig cfg;
    cfg.sampler = SamplerKind::Myula;
    cfg.gamma = row.gamma;
    cfg.lambda = 2.0 * row.gamma;
    cfg.n_samples = opts.n_samples;
    cfg.burn_in_fraction = opts.burn_in_fraction;
    cfg.seed = seed;

    std::vector<std::vector<double>> pooled(d);
    for (auto& v : pooled) v.reserve(cfg.kept_rows() * opts.repetitions);
    for (std::size_t r = 0; r < opts.repetitions; ++r) {
      cfg.chain_index = k * opts.repetitions + r;
      stream_chain(cfg, f, body, [&](const Vector& draw) {
        for (std::size_t j = 0; j < d; ++j) pooled[j].push_back(draw[static_cast<Eigen::Index>(j)]);
      });
    }
    row.median.resize(static_cast<Eigen::Index>(d));
    row.lo95.resize(static_cast<Eigen::Index>(d));
    row.hi95.resize(static_cast<Eigen::Index>(d));
    for (std::size_t j = 0; j < d; ++j) {
      auto& v = pooled[j];
      std::sort(v.begin(), v.end());
      const auto jj = static_cast<Eigen::Index>(j);
      row.median[jj] = sorted_quantile(v, 0.5);
      row.lo95[jj] = sorted_quantile(v, 0.025);
      row.hi95[jj] = sorted_quantile(v, 0.975);
    }
  });
  return rows;
}

}  // namespace myula
