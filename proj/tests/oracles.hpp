#pragma once

// Brute-force reference computations used only by the tests. They share no
// code with the library routines they check.

#include <Eigen/Dense>
#include <cmath>
#include <cstddef>
#include <limits>
#include <random>
#include <vector>

namespace oracle {

using Vec = Eigen::VectorXd;

/// Projection onto {lo <= y <= hi} by enumerating the 3^d active sets
/// (coordinate at lo, at hi, or free) and keeping the closest feasible point.
inline Vec box_projection(const Vec& x, const Vec& lo, const Vec& hi) {
  const auto d = x.size();
  std::size_t total = 1;
  for (Eigen::Index j = 0; j < d; ++j) total *= 3;
  Vec best;
  double best_dist = std::numeric_limits<double>::infinity();
  for (std::size_t code = 0; code < total; ++code) {
    Vec y(d);
    std::size_t c = code;
    bool feasible = true;
    for (Eigen::Index j = 0; j < d; ++j, c /= 3) {
      const auto pick = c % 3;
      y[j] = pick == 0 ? lo[j] : pick == 1 ? hi[j] : x[j];
      if (y[j] < lo[j] || y[j] > hi[j]) feasible = false;
    }
    if (!feasible) continue;
    const double dist = (y - x).squaredNorm();
    if (dist < best_dist) {
      best_dist = dist;
      best = y;
    }
  }
  return best;
}

/// Projection onto {||y||_1 <= s}: the interior candidate plus, for every
/// support and sign pattern, the minimiser on that face of the cross-polytope.
inline Vec l1_projection(const Vec& x, double s) {
  const auto d = x.size();
  if (x.lpNorm<1>() <= s) return x;
  std::size_t total = 1;
  for (Eigen::Index j = 0; j < d; ++j) total *= 3;
  Vec best;
  double best_dist = std::numeric_limits<double>::infinity();
  for (std::size_t code = 0; code < total; ++code) {
    Vec sign(d);
    std::size_t c = code;
    int support = 0;
    for (Eigen::Index j = 0; j < d; ++j, c /= 3) {
      sign[j] = static_cast<double>(static_cast<int>(c % 3) - 1);
      if (sign[j] != 0.0) ++support;
    }
    if (support == 0) continue;
    // min ||y - x||² s.t. <sign, y> = s, y_j = 0 off the support
    const double theta = (sign.dot(x) - s) / support;
    Vec y = Vec::Zero(d);
    bool feasible = true;
    for (Eigen::Index j = 0; j < d; ++j) {
      if (sign[j] == 0.0) continue;
      y[j] = x[j] - theta * sign[j];
      if (y[j] * sign[j] < 0.0) feasible = false;
    }
    if (!feasible || y.lpNorm<1>() > s * (1.0 + 1e-12)) continue;
    const double dist = (y - x).squaredNorm();
    if (dist < best_dist) {
      best_dist = dist;
      best = y;
    }
  }
  return best;
}

/// Projection onto B(c, rho) from the KKT condition y = c + (x - c)/(1 + mu),
/// with mu >= 0 found by bisection on ||y - c|| = rho.
inline Vec ball_projection(const Vec& x, const Vec& c, double rho) {
  const double norm = (x - c).norm();
  if (norm <= rho) return x;
  double lo = 0.0;
  double hi = 1.0;
  while (norm / (1.0 + hi) > rho) hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (norm / (1.0 + mid) > rho)
      lo = mid;
    else
      hi = mid;
  }
  return c + (x - c) / (1.0 + hi);
}

/// Central difference gradient.
template <class F>
Vec fd_gradient(F&& f, const Vec& x, double h) {
  Vec g(x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    Vec a = x, b = x;
    a[j] += h;
    b[j] -= h;
    g[j] = (f(a) - f(b)) / (2.0 * h);
  }
  return g;
}

/// Standard normal quantile by bisection on 0.5 erfc(-z/√2) = p.
inline double normal_quantile(double p) {
  double lo = -40.0;
  double hi = 40.0;
  for (int it = 0; it < 300; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (0.5 * std::erfc(-mid / std::sqrt(2.0)) < p)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

/// Composite Simpson rule on [a, b] with n (even) panels.
template <class F>
double simpson(F&& f, double a, double b, int n) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

inline Vec random_vector(std::mt19937_64& gen, Eigen::Index d, double scale) {
  std::normal_distribution<double> n(0.0, scale);
  Vec v(d);
  for (Eigen::Index j = 0; j < d; ++j) v[j] = n(gen);
  return v;
}

}  // namespace oracle
