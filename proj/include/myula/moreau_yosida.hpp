#pragma once

#include "myula/convex_body.hpp"
#include "myula/potential.hpp"

namespace myula {

/// ι_K^λ(x) = dist(x, K)² / (2λ). Throws std::invalid_argument for λ <= 0.
double envelope(const ConvexBody& body, double lambda, const Vector& x);
/// ∇ι_K^λ(x) = (x - proj_K(x)) / λ
Vector envelope_grad(const ConvexBody& body, double lambda, const Vector& x);

struct ValueAndGradient {
  double value;
  Vector gradient;
};

/// U^λ = f + ι_K^λ, the smoothed potential targeted by MYULA. Its gradient is
/// (L_f + 1/λ)-Lipschitz.
class RegularizedPotential {
 public:
  RegularizedPotential(Potential base, ConvexBody body, double lambda);

  const Potential& base() const { return base_; }
  const ConvexBody& body() const { return body_; }
  double lambda() const { return lambda_; }
  std::size_t dimension() const { return base_.dimension(); }
  /// L = L_f + 1/λ
  double lipschitz() const { return base_.lipschitz() + 1.0 / lambda_; }

  double value(const Vector& x) const;
  Vector gradient(const Vector& x) const;
  /// One projection for both quantities.
  ValueAndGradient value_and_gradient(const Vector& x) const;
  /// -U^λ(x); the normalising constant is never formed.
  double log_density(const Vector& x) const { return -value(x); }

 private:
  Potential base_;
  ConvexBody body_;
  double lambda_;
};

}  // namespace myula
