#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <map>
#include <string>
#include <variant>

namespace myula {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

struct BallShape {
  Vector center;
  double radius;
};

struct BoxShape {
  Vector lower;
  Vector upper;
};

/// { x : ||x||_1 <= radius }
struct L1BallShape {
  std::size_t dim;
  double radius;
};

using BodyShape = std::variant<BallShape, BoxShape, L1BallShape>;

/// Radii (r, R) with B(0, r) ⊆ K ⊆ B(0, R).
struct Radii {
  double inner;
  double outer;
};

/// Potential gaps Δ₁ ∈ (0, 1] and Δ₂ ≥ 0 relating f to the body. These are
/// user inputs; Δ₁ = 1, Δ₂ = 0 hold whenever f = 0 or f is minimised deep
/// inside K.
struct InnerBodyConstants {
  double delta1 = 1.0;
  double delta2 = 0.0;

  InnerBodyConstants() = default;
  InnerBodyConstants(double d1, double d2);
};

/// Closed convex body with an exact Euclidean projection.
///
/// Construction only checks that the body has non-empty interior. Whether
/// the origin is interior (needed for `radii`) is checked lazily so that
/// bodies such as [0,5]x[0,1] with the origin at a corner can still be
/// sampled from.
class ConvexBody {
 public:
  static ConvexBody ball(Vector center, double radius);
  static ConvexBody centered_ball(std::size_t dim, double radius);
  static ConvexBody box(Vector lower, Vector upper);
  /// [-half_side, half_side]^dim
  static ConvexBody cube(std::size_t dim, double half_side);
  static ConvexBody l1_ball(std::size_t dim, double radius);

  std::size_t dimension() const { return dim_; }
  const BodyShape& shape() const { return shape_; }

  Vector project(const Vector& x) const;
  void project_into(const Vector& x, Vector& out) const;
  /// Closed-set membership, no tolerance.
  bool contains(const Vector& x) const;
  double distance(const Vector& x) const;
  double squared_distance(const Vector& x) const;

  /// Tightest (r, R) for the shipped variants. Throws InvalidBody when the
  /// origin is not an interior point.
  Radii radii() const;
  double volume() const;

  /// Flat key-value form, keys prefixed by `prefix` (e.g. "body.").
  std::map<std::string, std::string> to_config(const std::string& prefix = "body.") const;
  static ConvexBody from_config(const std::map<std::string, std::string>& kv,
                                const std::string& prefix = "body.");

 private:
  ConvexBody(std::size_t dim, BodyShape shape) : dim_(dim), shape_(std::move(shape)) {}
  void check_dim(const Vector& x) const;

  std::size_t dim_;
  BodyShape shape_;
};

/// Euclidean projection onto { ||y||_1 <= radius } by sort-and-threshold.
Vector project_l1_ball(const Vector& x, double radius);

}  // namespace myula
