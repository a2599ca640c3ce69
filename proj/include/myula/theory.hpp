#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "myula/convex_body.hpp"

namespace myula {

/// Volume of the unit ball in R^i, π^{i/2} / Γ(1 + i/2).
double kappa_ball(std::size_t i);
double log_kappa_ball(std::size_t i);

/// Intrinsic volumes V_0(K), ..., V_d(K), stored as logarithms so that the
/// Steiner-type sums can be evaluated without under/overflow.
class IntrinsicVolumes {
 public:
  explicit IntrinsicVolumes(std::vector<double> log_values);

  std::size_t dimension() const { return log_values_.size() - 1; }
  double log_value(std::size_t i) const { return log_values_.at(i); }
  double value(std::size_t i) const;
  std::vector<double> values() const;
  const std::vector<double>& log_values() const { return log_values_; }
  double volume() const { return value(dimension()); }

 private:
  std::vector<double> log_values_;
};

/// V_i = binom(d, i) c^i for the cube of side c.
IntrinsicVolumes intrinsic_volumes_cube(std::size_t d, double side);
/// Elementary symmetric polynomials of the side lengths.
IntrinsicVolumes intrinsic_volumes_box(const Vector& sides);
/// V_i = binom(d, i) κ_d / κ_{d-i} ρ^i
IntrinsicVolumes intrinsic_volumes_ball(std::size_t d, double radius);
/// Boxes and Euclidean balls only; throws std::invalid_argument otherwise.
IntrinsicVolumes intrinsic_volumes(const ConvexBody& body);

/// Steiner polynomial Vol(K + B(0, t)) = Σ t^i κ_i V_{d-i}(K).
double outer_parallel_volume(const IntrinsicVolumes& iv, double t);
/// κ_d (ρ + t)^d
double ball_outer_parallel_volume(std::size_t d, double radius, double t);

/// ∫ exp(-dist(x, K)² / 2λ) dx = Σ V_i(K) (2πλ)^{(d-i)/2}
double mollified_mass(const IntrinsicVolumes& iv, double lambda);
/// Same integral for a ball of radius ρ by adaptive quadrature of
/// ∫ Vol(B(0, ρ + t)) λ⁻¹ t e^{-t²/2λ} dt (relative tolerance 1e-10).
double mollified_mass_ball_quadrature(std::size_t d, double radius, double lambda);
/// Exact sum for boxes, quadrature for balls.
double mollified_mass(const ConvexBody& body, double lambda);

/// D(K, λ) = Vol(K)⁻¹ Σ_{i<d} (2πλ)^{(d-i)/2} V_i(K)
double d_constant(const IntrinsicVolumes& iv, double lambda);
/// (1 + √(2πλ)/c)^d - 1
double cube_d_constant(std::size_t d, double side, double lambda);
/// E(K, λ, R) = Vol(K)⁻¹ Σ_{i<d} V_i(K) (2πλ)^{(d-i)/2} {2R + √(λ(d-i+2))}
double e_constant(const IntrinsicVolumes& iv, double lambda, double outer_radius);
/// ||π^λ - π||_TV for the uniform distribution on a cube: 2{1 - (1 + √(2πλ)/c)^{-d}}
double cube_exact_tv(std::size_t d, double side, double lambda);

/// Which assumption the bound is stated under: (a) intrinsic volumes and Δ₁,
/// (b) Δ₁ with the inner radius, (c) Δ₂ with the inner radius.
enum class BoundCase { A, B, C };
std::string_view to_string(BoundCase c);
BoundCase parse_bound_case(std::string_view name);

struct LambdaDomain {
  double upper;          ///< +inf for case (a)
  bool upper_closed;
};
LambdaDomain admissible_lambda(BoundCase c, std::size_t d, double inner_radius);

struct BoundInputs {
  std::size_t dim = 1;
  double inner_radius = 1.0;
  double outer_radius = 1.0;
  InnerBodyConstants constants;
  /// Required for case (a).
  std::optional<IntrinsicVolumes> volumes;

  static BoundInputs for_body(const ConvexBody& body, InnerBodyConstants constants = {});
};

struct BoundValue {
  double value;      ///< clipped to the trivial cap
  double raw;        ///< formula value
  bool informative;  ///< false when the cap was hit
};

/// Upper bound on ||π^λ - π||_TV (TV ≤ 2 convention). Throws DomainError
/// when λ is outside the admissible interval of the case.
BoundValue tv_bound(BoundCase c, const BoundInputs& in, double lambda);
/// Upper bound on W₁(π, π^λ).
double w1_bound(BoundCase c, const BoundInputs& in, double lambda);

double standard_normal_quantile(double p);
/// ω(r) = r² / {2Φ⁻¹(3/4)}²
double omega(double r);

enum class StepCeiling { Quadratic, GammaBar, Theorem1, StrongConvexity, Trivial };
std::string_view to_string(StepCeiling c);

struct TuningOptions {
  /// γ̄ = fraction · λ⁻¹ L⁻², strictly inside (0, λ⁻¹ L⁻²).
  double gamma_bar_fraction = 0.5;
  /// Re-evaluations of A₁ at the returned γ.
  int fixed_point_iterations = 2;
};

struct TuningReport {
  double epsilon = 0.0;
  double epsilon_regularization = 0.0;
  double epsilon_mcmc = 0.0;
  double lambda = 0.0;
  double lipschitz = 0.0;  ///< L = L_f + 1/λ
  double gamma = 0.0;
  std::uint64_t n = 0;
  /// The iteration count as a real; plans with tiny ε or large d exceed 2⁶⁴.
  double n_real = 0.0;
  /// n is clamped to the largest 64-bit value.
  bool n_saturated = false;
  double a1 = 0.0;
  double a2 = 0.0;
  double horizon = 0.0;  ///< T
  double log_kappa = 0.0;
  double kappa = 0.0;    ///< W₂ contraction rate (w2_tuning only)
  double gamma_bar = 0.0;
  double quadratic_ceiling = 0.0;
  double theorem1_ceiling = 0.0;
  StepCeiling binding = StepCeiling::Quadratic;
  double regularization_bound = 0.0;  ///< plan only: TV(π, π^λ) bound at λ
  bool trivially_satisfied = false;
};

/// Stepsize and iteration count for ||δ_x R_γ^n - π^λ||_TV ≤ ε.
TuningReport tv_tuning(double epsilon, double x0_dist, double lambda, double lf, double outer_radius,
                       std::size_t d, const TuningOptions& opts = {});

/// Stepsize and iteration count for W₂(δ_x R_γ^n, π^λ) ≤ ε under m-strong convexity.
TuningReport w2_tuning(double epsilon, double x0_dist, double m, double lipschitz, std::size_t d);

struct PlanRequest {
  double epsilon = 0.1;
  std::size_t dim = 1;
  double inner_radius = 1.0;
  double outer_radius = 1.0;
  InnerBodyConstants constants;
  double lf = 0.0;
  BoundCase assumption = BoundCase::B;
  /// Share of ε spent on the regularisation error.
  double split = 0.5;
  /// ||x - x*|| proxy; defaults to the outer radius (start at the origin).
  std::optional<double> x0_dist;
  TuningOptions tuning;
};

/// Chooses λ so that the regularisation bound is at most split·ε, then tunes
/// (γ, n) so that the MCMC error is at most (1 - split)·ε.
TuningReport plan_theorem1(const PlanRequest& req);

}  // namespace myula
