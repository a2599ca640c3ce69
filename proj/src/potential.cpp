#include "myula/potential.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>
#include <string>

#include "myula/errors.hpp"

namespace myula {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

// Relative eigenvalue floor below which a Gram matrix is treated as singular.
constexpr double kSingularTol = 1e-12;

}  // namespace

CurvatureConstants curvature_from_matrix(const Matrix& sym, double scale) {
  const Eigen::SelfAdjointEigenSolver<Matrix> eig(sym, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) throw InvalidModel("eigenvalue decomposition failed");
  const double hi = eig.eigenvalues().maxCoeff();
  const double lo = eig.eigenvalues().minCoeff();
  CurvatureConstants c{scale * hi, std::nullopt};
  if (lo > kSingularTol * std::max(hi, 1.0)) c.strong_convexity = scale * lo;
  return c;
}

Potential::Potential(std::size_t dim, Variant v) : dim_(dim), v_(std::move(v)) {
  curvature_ = std::visit(
      Overloaded{
          [](const ZeroPotential&) { return CurvatureConstants{0.0, std::nullopt}; },
          [](const IsotropicQuadratic& q) { return CurvatureConstants{1.0 / q.variance, 1.0 / q.variance}; },
          [](const PrecisionQuadratic& q) {
            // Eigenvalues of Σ⁻¹ are reciprocals of those of Σ.
            const Matrix cov = q.covariance_factor.reconstructedMatrix();
            const Eigen::SelfAdjointEigenSolver<Matrix> eig(cov, Eigen::EigenvaluesOnly);
            return CurvatureConstants{1.0 / eig.eigenvalues().minCoeff(), 1.0 / eig.eigenvalues().maxCoeff()};
          },
          [](const LeastSquares& ls) { return curvature_from_matrix(ls.gram, 2.0); },
      },
      v_);
}

Potential Potential::zero(std::size_t dim) {
  if (dim == 0) throw std::invalid_argument("potential dimension must be positive");
  return Potential(dim, ZeroPotential{dim});
}

Potential Potential::isotropic(std::size_t dim, double variance) {
  if (dim == 0) throw std::invalid_argument("potential dimension must be positive");
  if (!(variance > 0.0) || !std::isfinite(variance)) throw InvalidModel("variance must be positive");
  return Potential(dim, IsotropicQuadratic{dim, variance});
}

Potential Potential::from_covariance(const Matrix& covariance) {
  if (covariance.rows() == 0 || covariance.rows() != covariance.cols())
    throw InvalidModel("covariance must be a non-empty square matrix");
  if (!covariance.isApprox(covariance.transpose(), 1e-12)) throw InvalidModel("covariance must be symmetric");
  Eigen::LLT<Matrix> llt(covariance);
  if (llt.info() != Eigen::Success) throw InvalidModel("covariance is not positive definite (Cholesky failed)");
  return Potential(static_cast<std::size_t>(covariance.rows()), PrecisionQuadratic{std::move(llt)});
}

Potential Potential::from_precision(const Matrix& precision) {
  if (precision.rows() == 0 || precision.rows() != precision.cols())
    throw InvalidModel("precision must be a non-empty square matrix");
  Eigen::LLT<Matrix> llt(precision);
  if (llt.info() != Eigen::Success) throw InvalidModel("precision is not positive definite (Cholesky failed)");
  const Matrix cov = llt.solve(Matrix::Identity(precision.rows(), precision.cols()));
  return from_covariance(0.5 * (cov + cov.transpose()));
}

Potential Potential::least_squares(Matrix design, Vector response) {
  if (design.rows() == 0 || design.cols() == 0) throw InvalidModel("design matrix must be non-empty");
  if (design.rows() != response.size()) throw InvalidModel("design rows and response length differ");
  Matrix gram = design.transpose() * design;
  Vector moment = design.transpose() * response;
  const auto d = static_cast<std::size_t>(design.cols());
  return Potential(d, LeastSquares{std::move(design), std::move(response), std::move(gram), std::move(moment)});
}

void Potential::check_dim(const Vector& x) const {
  if (static_cast<std::size_t>(x.size()) != dim_)
    throw std::invalid_argument("dimension mismatch: potential has d=" + std::to_string(dim_) + ", point has " +
                                std::to_string(x.size()));
}

double Potential::value(const Vector& x) const {
  check_dim(x);
  return std::visit(Overloaded{
                        [](const ZeroPotential&) { return 0.0; },
                        [&](const IsotropicQuadratic& q) { return x.squaredNorm() / (2.0 * q.variance); },
                        [&](const PrecisionQuadratic& q) {
                          const Vector w = q.covariance_factor.matrixL().solve(x);
                          return 0.5 * w.squaredNorm();
                        },
                        [&](const LeastSquares& ls) { return (ls.response - ls.design * x).squaredNorm(); },
                    },
                    v_);
}

void Potential::gradient_into(const Vector& x, Vector& out) const {
  check_dim(x);
  std::visit(Overloaded{
                 [&](const ZeroPotential&) { out.setZero(x.size()); },
                 [&](const IsotropicQuadratic& q) { out = x / q.variance; },
                 [&](const PrecisionQuadratic& q) { out = q.covariance_factor.solve(x); },
                 [&](const LeastSquares& ls) { out = 2.0 * (ls.gram * x - ls.moment); },
             },
             v_);
}

Vector Potential::gradient(const Vector& x) const {
  Vector out(x.size());
  gradient_into(x, out);
  return out;
}

Matrix Potential::hessian() const {
  const auto n = static_cast<Eigen::Index>(dim_);
  return std::visit(Overloaded{
                        [&](const ZeroPotential&) -> Matrix { return Matrix::Zero(n, n); },
                        [&](const IsotropicQuadratic& q) -> Matrix {
                          return Matrix::Identity(n, n) / q.variance;
                        },
                        [&](const PrecisionQuadratic& q) -> Matrix {
                          return q.covariance_factor.solve(Matrix::Identity(n, n));
                        },
                        [&](const LeastSquares& ls) -> Matrix { return 2.0 * ls.gram; },
                    },
                    v_);
}

Matrix tmg_covariance(std::size_t dim) {
  const auto n = static_cast<Eigen::Index>(dim);
  Matrix sigma(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) sigma(i, j) = 1.0 / (1.0 + static_cast<double>(std::abs(i - j)));
  return sigma;
}

Potential tmg_precision(std::size_t dim) {
  if (dim == 0) throw std::invalid_argument("tmg_precision: dimension must be positive");
  return Potential::from_covariance(tmg_covariance(dim));
}

}  // namespace myula
