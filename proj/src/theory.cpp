#include "myula/theory.hpp"

#include <algorithm>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cctype>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "myula/errors.hpp"

namespace myula {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTvCap = 2.0;

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument(std::string(name) + " must be positive and finite");
}

/// Neumaier-compensated log Σ exp(terms).
double log_sum_exp(const std::vector<double>& terms) {
  double top = -kInf;
  for (const double t : terms) top = std::max(top, t);
  if (top == -kInf) return -kInf;
  double sum = 0.0;
  double comp = 0.0;
  for (const double t : terms) {
    const double v = std::exp(t - top);
    const double s = sum + v;
    comp += std::abs(sum) >= std::abs(v) ? (sum - s) + v : (v - s) + sum;
    sum = s;
  }
  return top + std::log(sum + comp);
}

std::vector<double> log_binomials(std::size_t d) {
  std::vector<double> out(d + 1);
  double c = 1.0;
  for (std::size_t i = 0; i <= d; ++i) {
    out[i] = std::isfinite(c) ? std::log(c)
                              : std::lgamma(d + 1.0) - std::lgamma(i + 1.0) - std::lgamma(static_cast<double>(d - i) + 1.0);
    c = c * static_cast<double>(d - i) / static_cast<double>(i + 1);
  }
  return out;
}

/// log of the i-th term V_i (2πλ)^{(d-i)/2}
double log_mollified_term(const IntrinsicVolumes& iv, std::size_t i, double lambda) {
  const double d = static_cast<double>(iv.dimension());
  return iv.log_value(i) + 0.5 * (d - static_cast<double>(i)) * std::log(2.0 * M_PI * lambda);
}

}  // namespace

double log_kappa_ball(std::size_t i) {
  const double h = 0.5 * static_cast<double>(i);
  return h * std::log(M_PI) - std::lgamma(1.0 + h);
}

double kappa_ball(std::size_t i) { return std::exp(log_kappa_ball(i)); }

IntrinsicVolumes::IntrinsicVolumes(std::vector<double> log_values) : log_values_(std::move(log_values)) {
  if (log_values_.empty()) throw std::invalid_argument("intrinsic volumes need at least V_0");
}

double IntrinsicVolumes::value(std::size_t i) const { return std::exp(log_values_.at(i)); }

std::vector<double> IntrinsicVolumes::values() const {
  std::vector<double> out(log_values_.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = value(i);
  return out;
}

IntrinsicVolumes intrinsic_volumes_cube(std::size_t d, double side) {
  if (d == 0) throw std::invalid_argument("cube dimension must be positive");
  require_positive(side, "cube side");
  auto logs = log_binomials(d);
  for (std::size_t i = 0; i <= d; ++i) logs[i] += static_cast<double>(i) * std::log(side);
  return IntrinsicVolumes(std::move(logs));
}

IntrinsicVolumes intrinsic_volumes_box(const Vector& sides) {
  const auto d = static_cast<std::size_t>(sides.size());
  if (d == 0) throw std::invalid_argument("box dimension must be positive");
  // e_i(c_1..c_k) built one side at a time; all terms positive.
  std::vector<double> e(d + 1, 0.0);
  e[0] = 1.0;
  for (std::size_t k = 0; k < d; ++k) {
    require_positive(sides[static_cast<Eigen::Index>(k)], "box side");
    for (std::size_t i = k + 1; i >= 1; --i) e[i] += sides[static_cast<Eigen::Index>(k)] * e[i - 1];
  }
  std::vector<double> logs(d + 1);
  for (std::size_t i = 0; i <= d; ++i) logs[i] = std::log(e[i]);
  return IntrinsicVolumes(std::move(logs));
}

IntrinsicVolumes intrinsic_volumes_ball(std::size_t d, double radius) {
  if (d == 0) throw std::invalid_argument("ball dimension must be positive");
  require_positive(radius, "ball radius");
  auto logs = log_binomials(d);
  for (std::size_t i = 0; i <= d; ++i)
    logs[i] += log_kappa_ball(d) - log_kappa_ball(d - i) + static_cast<double>(i) * std::log(radius);
  return IntrinsicVolumes(std::move(logs));
}

IntrinsicVolumes intrinsic_volumes(const ConvexBody& body) {
  if (const auto* box = std::get_if<BoxShape>(&body.shape())) return intrinsic_volumes_box(box->upper - box->lower);
  if (const auto* ball = std::get_if<BallShape>(&body.shape()))
    return intrinsic_volumes_ball(body.dimension(), ball->radius);
  throw std::invalid_argument("intrinsic volumes are only available for boxes and Euclidean balls");
}

double outer_parallel_volume(const IntrinsicVolumes& iv, double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("parallel distance t must be nonnegative");
  const std::size_t d = iv.dimension();
  if (t == 0.0) return iv.volume();
  std::vector<double> terms(d + 1);
  for (std::size_t i = 0; i <= d; ++i)
    terms[i] = static_cast<double>(i) * std::log(t) + log_kappa_ball(i) + iv.log_value(d - i);
  return std::exp(log_sum_exp(terms));
}

double ball_outer_parallel_volume(std::size_t d, double radius, double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("parallel distance t must be nonnegative");
  return std::exp(log_kappa_ball(d) + static_cast<double>(d) * std::log(radius + t));
}

double mollified_mass(const IntrinsicVolumes& iv, double lambda) {
  require_positive(lambda, "lambda");
  const std::size_t d = iv.dimension();
  std::vector<double> terms(d + 1);
  for (std::size_t i = 0; i <= d; ++i) terms[i] = log_mollified_term(iv, i, lambda);
  return std::exp(log_sum_exp(terms));
}

double mollified_mass_ball_quadrature(std::size_t d, double radius, double lambda) {
  require_positive(lambda, "lambda");
  require_positive(radius, "ball radius");
  // t = √λ s turns λ⁻¹ t e^{-t²/2λ} dt into s e^{-s²/2} ds; Vol(B(0, ρ)) is factored out.
  const double scale = std::sqrt(lambda) / radius;
  const double dd = static_cast<double>(d);
  const auto integrand = [&](double s) { return std::exp(dd * std::log1p(scale * s) - 0.5 * s * s) * s; };
  const double upper = 40.0 + 2.0 * std::sqrt(dd);
  double error = 0.0;
  const double integral =
      boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, 0.0, upper, 20, 1e-12, &error);
  return std::exp(log_kappa_ball(d) + dd * std::log(radius)) * integral;
}

double mollified_mass(const ConvexBody& body, double lambda) {
  if (const auto* ball = std::get_if<BallShape>(&body.shape()))
    return mollified_mass_ball_quadrature(body.dimension(), ball->radius, lambda);
  return mollified_mass(intrinsic_volumes(body), lambda);
}

double d_constant(const IntrinsicVolumes& iv, double lambda) {
  require_positive(lambda, "lambda");
  const std::size_t d = iv.dimension();
  std::vector<double> terms(d);
  for (std::size_t i = 0; i < d; ++i) terms[i] = log_mollified_term(iv, i, lambda) - iv.log_value(d);
  return std::exp(log_sum_exp(terms));
}

double cube_d_constant(std::size_t d, double side, double lambda) {
  require_positive(lambda, "lambda");
  require_positive(side, "cube side");
  return std::expm1(static_cast<double>(d) * std::log1p(std::sqrt(2.0 * M_PI * lambda) / side));
}

double e_constant(const IntrinsicVolumes& iv, double lambda, double outer_radius) {
  require_positive(lambda, "lambda");
  require_positive(outer_radius, "outer radius");
  const std::size_t d = iv.dimension();
  std::vector<double> terms(d);
  for (std::size_t i = 0; i < d; ++i) {
    const double bracket = 2.0 * outer_radius + std::sqrt(lambda * static_cast<double>(d - i + 2));
    terms[i] = log_mollified_term(iv, i, lambda) - iv.log_value(d) + std::log(bracket);
  }
  return std::exp(log_sum_exp(terms));
}

double cube_exact_tv(std::size_t d, double side, double lambda) {
  require_positive(lambda, "lambda");
  require_positive(side, "cube side");
  return -2.0 * std::expm1(-static_cast<double>(d) * std::log1p(std::sqrt(2.0 * M_PI * lambda) / side));
}

std::string_view to_string(BoundCase c) {
  switch (c) {
    case BoundCase::A:
      return "a";
    case BoundCase::B:
      return "b";
    case BoundCase::C:
      return "c";
  }
  return "?";
}

BoundCase parse_bound_case(std::string_view name) {
  if (name == "a" || name == "A") return BoundCase::A;
  if (name == "b" || name == "B") return BoundCase::B;
  if (name == "c" || name == "C") return BoundCase::C;
  throw std::invalid_argument("unknown bound case '" + std::string(name) + "' (expected a, b or c)");
}

LambdaDomain admissible_lambda(BoundCase c, std::size_t d, double inner_radius) {
  const double ratio = inner_radius / static_cast<double>(d);
  switch (c) {
    case BoundCase::A:
      return {kInf, false};
    case BoundCase::B:
      return {ratio * ratio / (2.0 * M_PI), false};
    case BoundCase::C:
      return {ratio * ratio / 16.0, true};
  }
  return {kInf, false};
}

BoundInputs BoundInputs::for_body(const ConvexBody& body, InnerBodyConstants constants) {
  const auto radii = body.radii();
  BoundInputs in;
  in.dim = body.dimension();
  in.inner_radius = radii.inner;
  in.outer_radius = radii.outer;
  in.constants = constants;
  if (!std::holds_alternative<L1BallShape>(body.shape())) in.volumes = intrinsic_volumes(body);
  return in;
}

namespace {

void check_domain(BoundCase c, const BoundInputs& in, double lambda) {
  if (in.dim == 0) throw std::invalid_argument("dimension must be positive");
  require_positive(in.inner_radius, "inner radius");
  require_positive(in.outer_radius, "outer radius");
  const auto dom = admissible_lambda(c, in.dim, in.inner_radius);
  const bool inside = lambda > 0.0 && (dom.upper_closed ? lambda <= dom.upper : lambda < dom.upper);
  if (!inside) {
    std::string interval = "(0, ";
    interval += std::isfinite(dom.upper) ? std::to_string(dom.upper) : "inf";
    interval += dom.upper_closed ? "]" : ")";
    throw DomainError("case (" + std::string(to_string(c)) + "): lambda=" + std::to_string(lambda) +
                          " outside the admissible interval " + interval,
                      0.0, dom.upper, dom.upper_closed);
  }
  if (c == BoundCase::A && !in.volumes) throw std::invalid_argument("case (a) needs the intrinsic volumes of K");
}

}  // namespace

BoundValue tv_bound(BoundCase c, const BoundInputs& in, double lambda) {
  check_domain(c, in, lambda);
  const double d = static_cast<double>(in.dim);
  const double r = in.inner_radius;
  const double d1 = in.constants.delta1;
  const double d2 = in.constants.delta2;
  double raw = 0.0;
  switch (c) {
    case BoundCase::A: {
      const double dk = d_constant(*in.volumes, lambda);
      raw = 2.0 * dk / (dk + d1);
      break;
    }
    case BoundCase::B:
      raw = std::pow(2.0, 1.5) / d1 * std::sqrt(M_PI * lambda) * d / r;
      break;
    case BoundCase::C:
      raw = (4.0 / r) * std::exp(4.0 * lambda * (d2 / r) * (d2 / r)) *
            (std::sqrt(lambda) * (d + d2) + 2.0 * lambda * d2 / r);
      break;
  }
  return {std::min(raw, kTvCap), raw, raw <= kTvCap};
}

double w1_bound(BoundCase c, const BoundInputs& in, double lambda) {
  check_domain(c, in, lambda);
  const double d = static_cast<double>(in.dim);
  const double r = in.inner_radius;
  const double big_r = in.outer_radius;
  const double d1 = in.constants.delta1;
  const double d2 = in.constants.delta2;
  switch (c) {
    case BoundCase::A:
      return e_constant(*in.volumes, lambda, big_r) / d1;
    case BoundCase::B:
      return std::sqrt(2.0 * M_PI * lambda) * d / (r * d1) * (2.0 * big_r + r * std::sqrt(3.0 / (2.0 * d * M_PI)));
    case BoundCase::C:
      return 4.0 * std::exp(4.0 * lambda * (d2 / r) * (d2 / r)) *
             (std::sqrt(lambda) * (d + d2) * (big_r / r) + 2.0 * lambda * d2 * big_r / (r * r) +
              std::sqrt(M_PI * lambda));
  }
  return 0.0;
}

double standard_normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("quantile level must lie in (0, 1)");
  return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

double omega(double r) {
  if (!(r >= 0.0)) throw std::invalid_argument("omega: r must be nonnegative");
  const double q = 2.0 * standard_normal_quantile(0.75);
  return r * r / (q * q);
}

std::string_view to_string(StepCeiling c) {
  switch (c) {
    case StepCeiling::Quadratic:
      return "quadratic";
    case StepCeiling::GammaBar:
      return "gamma_bar";
    case StepCeiling::Theorem1:
      return "theorem1";
    case StepCeiling::StrongConvexity:
      return "inverse_m_plus_L";
    case StepCeiling::Trivial:
      return "trivial";
  }
  return "?";
}

namespace {

struct TvParts {
  double a1;
  double a2;
  double horizon;
  double ceiling;
};

double iterations_for(double horizon, double gamma) {
  double n = std::ceil(horizon / gamma) + 1.0;
  // Above 2^53 the +1 is absorbed by rounding; step to the next representable count.
  while (n * gamma <= horizon) n = std::nextafter(n, std::numeric_limits<double>::infinity());
  return n;
}

void set_iterations(TuningReport& rep, double n) {
  constexpr double kTwo64 = 18446744073709551616.0;
  rep.n_real = n;
  rep.n_saturated = !(n < kTwo64);
  rep.n = rep.n_saturated ? std::numeric_limits<std::uint64_t>::max() : static_cast<std::uint64_t>(n);
}

}  // namespace

TuningReport tv_tuning(double epsilon, double x0_dist, double lambda, double lf, double outer_radius, std::size_t d,
                       const TuningOptions& opts) {
  require_positive(epsilon, "epsilon");
  require_positive(lambda, "lambda");
  require_positive(outer_radius, "outer radius");
  if (!(x0_dist >= 0.0) || !std::isfinite(x0_dist)) throw std::invalid_argument("x0_dist must be nonnegative");
  if (!(lf >= 0.0) || !std::isfinite(lf)) throw std::invalid_argument("L_f must be nonnegative");
  if (d == 0) throw std::invalid_argument("dimension must be positive");
  if (!(opts.gamma_bar_fraction > 0.0 && opts.gamma_bar_fraction < 1.0))
    throw std::invalid_argument("gamma_bar_fraction must lie in (0, 1)");

  TuningReport rep;
  rep.epsilon = epsilon;
  rep.epsilon_mcmc = epsilon;
  rep.lambda = lambda;
  const double big_l = lf + 1.0 / lambda;
  rep.lipschitz = big_l;
  const double dd = static_cast<double>(d);
  rep.gamma_bar = opts.gamma_bar_fraction / (lambda * big_l * big_l);
  rep.theorem1_ceiling = lambda / (1.0 + lf * lf * lambda * lambda);

  const double spread = std::max(1.0, 4.0 * outer_radius);
  const double a = omega(spread) / (8.0 * lambda);
  const double log1p_exp_a = a + std::log1p(std::exp(-a));
  rep.log_kappa = -std::log(2.0) / (4.0 * lambda) / (log1p_exp_a + std::log1p(spread) + std::log(2.0));

  if (epsilon >= kTvCap) {
    rep.trivially_satisfied = true;
    rep.gamma = std::min(rep.gamma_bar, rep.theorem1_ceiling);
    rep.binding = StepCeiling::Trivial;
    set_iterations(rep, 0.0);
    return rep;
  }

  const double slack = 1.0 / lambda - rep.gamma_bar * big_l * big_l;  // > 0 since γ̄ < λ⁻¹L⁻²
  const auto parts_at = [&](double gamma_eval) {
    TvParts p{};
    p.a1 = big_l * big_l *
           (x0_dist * x0_dist + 2.0 * (dd + 8.0 * outer_radius * outer_radius / lambda) *
                                    std::exp(gamma_eval * slack) / slack);
    p.a2 = 6.0 + std::pow(2.0, 1.5) * std::sqrt(dd * lambda + 8.0 * outer_radius * outer_radius) +
           2.0 * std::sqrt(p.a1 / (big_l * big_l));
    p.horizon = (std::log(p.a2) - std::log(epsilon / 2.0)) / (-rep.log_kappa);
    // (-d + √(d² + a)) / (2A₁/3), a = (2/3)A₁ε²/(L²T), in cancellation-free form.
    const double q = epsilon * epsilon / (big_l * big_l * p.horizon);
    const double disc = dd * dd + (2.0 / 3.0) * p.a1 * q;
    p.ceiling = q / (dd + std::sqrt(disc));
    return p;
  };
  const double cap = std::min(rep.gamma_bar, rep.theorem1_ceiling);

  double gamma = rep.gamma_bar;
  for (int k = 0; k <= std::max(0, opts.fixed_point_iterations); ++k) gamma = std::min(parts_at(gamma).ceiling, cap);
  TvParts parts = parts_at(gamma);
  if (gamma > std::min(parts.ceiling, cap)) {
    // A₁ evaluated at γ̄ bounds A₁(γ) from above for every γ ≤ γ̄.
    gamma = std::min(parts_at(rep.gamma_bar).ceiling, cap);
    parts = parts_at(gamma);
  }

  rep.gamma = gamma;
  rep.a1 = parts.a1;
  rep.a2 = parts.a2;
  rep.horizon = parts.horizon;
  rep.quadratic_ceiling = parts.ceiling;
  if (gamma == parts.ceiling && parts.ceiling <= cap)
    rep.binding = StepCeiling::Quadratic;
  else if (rep.gamma_bar <= rep.theorem1_ceiling)
    rep.binding = StepCeiling::GammaBar;
  else
    rep.binding = StepCeiling::Theorem1;
  set_iterations(rep, iterations_for(parts.horizon, gamma));
  return rep;
}

TuningReport w2_tuning(double epsilon, double x0_dist, double m, double lipschitz, std::size_t d) {
  require_positive(epsilon, "epsilon");
  if (!(m > 0.0) || !std::isfinite(m)) throw StrongConvexityRequired("w2 tuning requires strong convexity m > 0");
  if (!(lipschitz >= m) || !std::isfinite(lipschitz)) throw std::invalid_argument("need L >= m");
  if (!(x0_dist >= 0.0) || !std::isfinite(x0_dist)) throw std::invalid_argument("x0_dist must be nonnegative");
  if (d == 0) throw std::invalid_argument("dimension must be positive");

  TuningReport rep;
  rep.epsilon = epsilon;
  rep.epsilon_mcmc = epsilon;
  rep.lipschitz = lipschitz;
  const double dd = static_cast<double>(d);
  rep.kappa = 2.0 * m * lipschitz / (m + lipschitz);
  const double a = 13.0 / 12.0;
  const double b = epsilon * epsilon * rep.kappa * rep.kappa / (8.0 * m * dd);
  // (m/L²){-a + √(a² + b)} without cancellation.
  rep.quadratic_ceiling = (m / (lipschitz * lipschitz)) * b / (a + std::sqrt(a * a + b));
  const double strong_cap = 1.0 / (m + lipschitz);
  rep.gamma = std::min(rep.quadratic_ceiling, strong_cap);
  rep.binding = rep.quadratic_ceiling <= strong_cap ? StepCeiling::Quadratic : StepCeiling::StrongConvexity;
  const double bracket = -std::log(epsilon * epsilon / 4.0) + std::log(x0_dist * x0_dist + dd / m);
  const double n = std::ceil(2.0 / (rep.kappa * rep.gamma) * bracket);
  set_iterations(rep, std::max(n, 0.0));
  rep.trivially_satisfied = n <= 0.0;
  return rep;
}

namespace {

double regularization_lambda(const PlanRequest& req, const BoundInputs& in, double budget) {
  const auto dom = admissible_lambda(req.assumption, req.dim, req.inner_radius);
  const auto bound = [&](double lam) { return tv_bound(req.assumption, in, lam).raw; };
  if (req.assumption == BoundCase::B) {
    const double ratio = budget * req.constants.delta1 * req.inner_radius / static_cast<double>(req.dim);
    double lam = ratio * ratio / (8.0 * M_PI);
    while (!(lam < dom.upper)) lam = std::nextafter(lam, 0.0);
    while (bound(lam) > budget) lam = std::nextafter(lam, 0.0);
    return lam;
  }
  // Case (c): the bound is increasing in λ; keep the largest feasible λ.
  if (bound(dom.upper) <= budget) return dom.upper;
  double lo = 0.0;
  double hi = dom.upper;
  for (int it = 0; it < 200 && hi - lo > 1e-300; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (bound(mid) <= budget)
      lo = mid;
    else
      hi = mid;
  }
  if (!(lo > 0.0)) throw std::runtime_error("could not find a positive lambda meeting the regularisation budget");
  return lo;
}

}  // namespace

TuningReport plan_theorem1(const PlanRequest& req) {
  require_positive(req.epsilon, "epsilon");
  require_positive(req.inner_radius, "inner radius");
  require_positive(req.outer_radius, "outer radius");
  if (req.inner_radius > req.outer_radius) throw std::invalid_argument("need r <= R");
  if (req.dim == 0) throw std::invalid_argument("dimension must be positive");
  if (req.assumption == BoundCase::A)
    throw std::invalid_argument("the planner works under assumption (b) or (c) only");
  if (!(req.split > 0.0 && req.split < 1.0)) throw std::invalid_argument("split must lie in (0, 1)");

  BoundInputs in;
  in.dim = req.dim;
  in.inner_radius = req.inner_radius;
  in.outer_radius = req.outer_radius;
  in.constants = req.constants;

  const double x0 = req.x0_dist.value_or(req.outer_radius);
  if (req.epsilon >= kTvCap) {
    // Any λ, γ, n satisfies a TV budget of 2.
    const double lam = admissible_lambda(req.assumption, req.dim, req.inner_radius).upper / 2.0;
    TuningReport rep = tv_tuning(kTvCap, x0, lam, req.lf, req.outer_radius, req.dim, req.tuning);
    rep.epsilon = req.epsilon;
    rep.epsilon_regularization = req.split * req.epsilon;
    rep.epsilon_mcmc = (1.0 - req.split) * req.epsilon;
    rep.regularization_bound = tv_bound(req.assumption, in, lam).value;
    return rep;
  }

  const double eps_reg = req.split * req.epsilon;
  const double eps_mcmc = req.epsilon - eps_reg;
  const double lam = regularization_lambda(req, in, eps_reg);

  TuningReport rep = tv_tuning(eps_mcmc, x0, lam, req.lf, req.outer_radius, req.dim, req.tuning);
  rep.epsilon = req.epsilon;
  rep.epsilon_regularization = eps_reg;
  rep.epsilon_mcmc = eps_mcmc;
  rep.regularization_bound = tv_bound(req.assumption, in, lam).raw;
  return rep;
}

}  // namespace myula
