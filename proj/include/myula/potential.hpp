#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <optional>
#include <variant>

#include "myula/convex_body.hpp"

namespace myula {

struct ZeroPotential {
  std::size_t dim;
};

/// f(x) = ||x||² / (2 σ²)
struct IsotropicQuadratic {
  std::size_t dim;
  double variance;
};

/// f(x) = ½ <x, Σ⁻¹ x>, held through the lower Cholesky factor of Σ so that
/// gradients are two triangular solves.
struct PrecisionQuadratic {
  Eigen::LLT<Matrix> covariance_factor;
};

/// f(β) = ||Y - Xβ||², without a ½ factor. XᵀX and XᵀY are cached for the
/// O(d²) gradient 2(XᵀXβ - XᵀY).
struct LeastSquares {
  Matrix design;
  Vector response;
  Matrix gram;
  Vector moment;
};

struct CurvatureConstants {
  double lipschitz;
  std::optional<double> strong_convexity;
};

/// Smooth convex part f of U = f + ι_K.
class Potential {
 public:
  using Variant = std::variant<ZeroPotential, IsotropicQuadratic, PrecisionQuadratic, LeastSquares>;

  static Potential zero(std::size_t dim);
  static Potential isotropic(std::size_t dim, double variance);
  /// Throws InvalidModel if `covariance` is not symmetric positive definite.
  static Potential from_covariance(const Matrix& covariance);
  static Potential from_precision(const Matrix& precision);
  static Potential least_squares(Matrix design, Vector response);

  std::size_t dimension() const { return dim_; }
  const Variant& variant() const { return v_; }

  double value(const Vector& x) const;
  Vector gradient(const Vector& x) const;
  void gradient_into(const Vector& x, Vector& out) const;

  const CurvatureConstants& curvature() const { return curvature_; }
  double lipschitz() const { return curvature_.lipschitz; }
  std::optional<double> strong_convexity() const { return curvature_.strong_convexity; }

  /// Constant Hessian of f (Σ⁻¹ for the quadratic variants, 2XᵀX for least squares).
  Matrix hessian() const;

 private:
  Potential(std::size_t dim, Variant v);
  void check_dim(const Vector& x) const;

  std::size_t dim_;
  Variant v_;
  CurvatureConstants curvature_;
};

/// Extreme eigenvalues of a symmetric matrix.
CurvatureConstants curvature_from_matrix(const Matrix& sym, double scale);

/// Σ_{ij} = 1 / (1 + |i - j|)
Matrix tmg_covariance(std::size_t dim);
/// Quadratic potential with precision Σ⁻¹ for the covariance above.
Potential tmg_precision(std::size_t dim);

}  // namespace myula
