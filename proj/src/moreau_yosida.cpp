#include "myula/moreau_yosida.hpp"

#include <cmath>
#include <stdexcept>

namespace myula {

namespace {

void check_lambda(double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw std::invalid_argument("regularisation parameter lambda must be positive and finite");
}

}  // namespace

double envelope(const ConvexBody& body, double lambda, const Vector& x) {
  check_lambda(lambda);
  return body.squared_distance(x) / (2.0 * lambda);
}

Vector envelope_grad(const ConvexBody& body, double lambda, const Vector& x) {
  check_lambda(lambda);
  return (x - body.project(x)) / lambda;
}

RegularizedPotential::RegularizedPotential(Potential base, ConvexBody body, double lambda)
    : base_(std::move(base)), body_(std::move(body)), lambda_(lambda) {
  check_lambda(lambda);
  if (base_.dimension() != body_.dimension())
    throw std::invalid_argument("potential and body dimensions differ");
}

double RegularizedPotential::value(const Vector& x) const { return base_.value(x) + envelope(body_, lambda_, x); }

Vector RegularizedPotential::gradient(const Vector& x) const {
  return base_.gradient(x) + (x - body_.project(x)) / lambda_;
}

ValueAndGradient RegularizedPotential::value_and_gradient(const Vector& x) const {
  const Vector residual = x - body_.project(x);
  return {base_.value(x) + residual.squaredNorm() / (2.0 * lambda_), base_.gradient(x) + residual / lambda_};
}

}  // namespace myula
