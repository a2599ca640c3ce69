#include "myula/convex_body.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "myula/config.hpp"
#include "myula/errors.hpp"

namespace myula {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

InnerBodyConstants::InnerBodyConstants(double d1, double d2) : delta1(d1), delta2(d2) {
  if (!(d1 > 0.0 && d1 <= 1.0)) throw std::invalid_argument("delta1 must lie in (0, 1]");
  if (!(d2 >= 0.0)) throw std::invalid_argument("delta2 must be nonnegative");
}

ConvexBody ConvexBody::ball(Vector center, double radius) {
  if (center.size() == 0) throw std::invalid_argument("ball: dimension must be positive");
  if (!(radius > 0.0) || !std::isfinite(radius)) throw InvalidBody("ball: radius must be positive");
  const auto d = static_cast<std::size_t>(center.size());
  return ConvexBody(d, BallShape{std::move(center), radius});
}

ConvexBody ConvexBody::centered_ball(std::size_t dim, double radius) {
  return ball(Vector::Zero(static_cast<Eigen::Index>(dim)), radius);
}

ConvexBody ConvexBody::box(Vector lower, Vector upper) {
  if (lower.size() == 0) throw std::invalid_argument("box: dimension must be positive");
  if (lower.size() != upper.size()) throw std::invalid_argument("box: lower/upper dimension mismatch");
  for (Eigen::Index j = 0; j < lower.size(); ++j) {
    if (!(lower[j] < upper[j]) || !std::isfinite(lower[j]) || !std::isfinite(upper[j]))
      throw InvalidBody("box: need finite lower_j < upper_j in every coordinate");
  }
  const auto d = static_cast<std::size_t>(lower.size());
  return ConvexBody(d, BoxShape{std::move(lower), std::move(upper)});
}

ConvexBody ConvexBody::cube(std::size_t dim, double half_side) {
  const auto n = static_cast<Eigen::Index>(dim);
  return box(Vector::Constant(n, -half_side), Vector::Constant(n, half_side));
}

ConvexBody ConvexBody::l1_ball(std::size_t dim, double radius) {
  if (dim == 0) throw std::invalid_argument("l1 ball: dimension must be positive");
  if (!(radius > 0.0) || !std::isfinite(radius)) throw InvalidBody("l1 ball: radius must be positive");
  return ConvexBody(dim, L1BallShape{dim, radius});
}

void ConvexBody::check_dim(const Vector& x) const {
  if (static_cast<std::size_t>(x.size()) != dim_)
    throw std::invalid_argument("dimension mismatch: body has d=" + std::to_string(dim_) +
                                ", point has " + std::to_string(x.size()));
}

Vector project_l1_ball(const Vector& x, double radius) {
  if (x.lpNorm<1>() <= radius) return x;
  if (radius <= 0.0) return Vector::Zero(x.size());

  std::vector<double> mags(static_cast<std::size_t>(x.size()));
  for (Eigen::Index i = 0; i < x.size(); ++i) mags[static_cast<std::size_t>(i)] = std::abs(x[i]);
  std::sort(mags.begin(), mags.end(), std::greater<>());

  // Largest j with mags[j] > (cumsum_j - radius) / (j + 1).
  double cumsum = 0.0;
  double theta = 0.0;
  for (std::size_t j = 0; j < mags.size(); ++j) {
    cumsum += mags[j];
    const double candidate = (cumsum - radius) / static_cast<double>(j + 1);
    if (mags[j] > candidate) theta = candidate;
  }

  Vector y(x.size());
  const auto shrink = [&] {
    for (Eigen::Index i = 0; i < x.size(); ++i) y[i] = std::copysign(std::max(std::abs(x[i]) - theta, 0.0), x[i]);
  };
  shrink();
  // Round-off can leave ||y||_1 a few ulps above the radius.
  while (y.lpNorm<1>() > radius) {
    theta = std::nextafter(theta, std::numeric_limits<double>::infinity());
    shrink();
  }
  return y;
}

void ConvexBody::project_into(const Vector& x, Vector& out) const {
  check_dim(x);
  std::visit(Overloaded{
                 [&](const BallShape& b) {
                   const double dist = (x - b.center).norm();
                   if (dist <= b.radius) {
                     out = x;
                     return;
                   }
                   double scale = b.radius / dist;
                   out = b.center + scale * (x - b.center);
                   while ((out - b.center).norm() > b.radius) {
                     scale = std::nextafter(scale, 0.0);
                     out = b.center + scale * (x - b.center);
                   }
                 },
                 [&](const BoxShape& b) { out = x.cwiseMax(b.lower).cwiseMin(b.upper); },
                 [&](const L1BallShape& b) { out = project_l1_ball(x, b.radius); },
             },
             shape_);
}

Vector ConvexBody::project(const Vector& x) const {
  Vector out(x.size());
  project_into(x, out);
  return out;
}

bool ConvexBody::contains(const Vector& x) const {
  check_dim(x);
  return std::visit(Overloaded{
                        [&](const BallShape& b) { return (x - b.center).norm() <= b.radius; },
                        [&](const BoxShape& b) {
                          return (x.array() >= b.lower.array()).all() && (x.array() <= b.upper.array()).all();
                        },
                        [&](const L1BallShape& b) { return x.lpNorm<1>() <= b.radius; },
                    },
                    shape_);
}

double ConvexBody::squared_distance(const Vector& x) const {
  if (contains(x)) return 0.0;
  return (x - project(x)).squaredNorm();
}

double ConvexBody::distance(const Vector& x) const { return std::sqrt(squared_distance(x)); }

Radii ConvexBody::radii() const {
  return std::visit(
      Overloaded{
          [&](const BallShape& b) {
            const double offset = b.center.norm();
            if (!(offset < b.radius)) throw InvalidBody("ball does not contain the origin in its interior");
            return Radii{b.radius - offset, b.radius + offset};
          },
          [&](const BoxShape& b) {
            if (!((b.lower.array() < 0.0).all() && (b.upper.array() > 0.0).all()))
              throw InvalidBody("box does not contain the origin in its interior");
            const double inner = std::min((-b.lower).minCoeff(), b.upper.minCoeff());
            const double outer = b.lower.cwiseAbs().cwiseMax(b.upper.cwiseAbs()).norm();
            return Radii{inner, outer};
          },
          [&](const L1BallShape& b) {
            return Radii{b.radius / std::sqrt(static_cast<double>(b.dim)), b.radius};
          },
      },
      shape_);
}

double ConvexBody::volume() const {
  return std::visit(Overloaded{
                        [&](const BallShape& b) {
                          const double d = static_cast<double>(dim_);
                          return std::exp(0.5 * d * std::log(M_PI) - std::lgamma(1.0 + 0.5 * d) +
                                          d * std::log(b.radius));
                        },
                        [&](const BoxShape& b) { return (b.upper - b.lower).prod(); },
                        [&](const L1BallShape& b) {
                          const double d = static_cast<double>(b.dim);
                          return std::exp(d * std::log(2.0 * b.radius) - std::lgamma(d + 1.0));
                        },
                    },
                    shape_);
}

std::map<std::string, std::string> ConvexBody::to_config(const std::string& prefix) const {
  std::map<std::string, std::string> kv;
  std::visit(Overloaded{
                 [&](const BallShape& b) {
                   kv[prefix + "kind"] = "ball";
                   kv[prefix + "center"] = format_vector(b.center);
                   kv[prefix + "radius"] = format_real(b.radius);
                 },
                 [&](const BoxShape& b) {
                   kv[prefix + "kind"] = "box";
                   kv[prefix + "lower"] = format_vector(b.lower);
                   kv[prefix + "upper"] = format_vector(b.upper);
                 },
                 [&](const L1BallShape& b) {
                   kv[prefix + "kind"] = "l1ball";
                   kv[prefix + "dim"] = std::to_string(b.dim);
                   kv[prefix + "radius"] = format_real(b.radius);
                 },
             },
             shape_);
  return kv;
}

ConvexBody ConvexBody::from_config(const std::map<std::string, std::string>& kv, const std::string& prefix) {
  const Config cfg(kv);
  const auto kind = cfg.get(prefix + "kind");
  try {
    if (kind == "box") return box(cfg.get_vector(prefix + "lower"), cfg.get_vector(prefix + "upper"));
    if (kind == "cube") {
      return cube(static_cast<std::size_t>(cfg.get_u64_or(prefix + "dim", 0)),
                  cfg.get_double_or(prefix + "half_side", 1.0));
    }
    if (kind == "ball") {
      Vector center = cfg.has(prefix + "center")
                          ? cfg.get_vector(prefix + "center")
                          : Vector::Zero(static_cast<Eigen::Index>(cfg.get_u64_or(prefix + "dim", 0)));
      return ball(std::move(center), cfg.get_double(prefix + "radius"));
    }
    if (kind == "l1ball") {
      return l1_ball(static_cast<std::size_t>(cfg.get_u64_or(prefix + "dim", 0)), cfg.get_double(prefix + "radius"));
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("invalid body: ") + e.what());
  }
  throw ConfigError("unknown body kind '" + kind + "' (expected box, cube, ball or l1ball)");
}

}  // namespace myula
