#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "rlab/errors.hpp"
#include "rlab/tensor.hpp"

// Frechet distance between Gaussian fits of two sample sets, computed on raw
// sample coordinates. The matrix square root goes through the symmetrized
// product sqrt(S2) S1 sqrt(S2), which is PSD, so a self-adjoint
// eigendecomposition suffices.

namespace rlab {

struct GaussianFit {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;

  int dim() const { return static_cast<int>(mean.size()); }
};

// Sample mean and unbiased covariance, symmetrized and eigenvalue-floored
// at 1e-10 so downstream square roots stay PSD.
inline GaussianFit fit_gaussian(const Tensor<double>& samples) {
  const int n = samples.rows;
  const int d = samples.cols;
  if (n < 2)
    throw InsufficientSamples("unbiased covariance needs >= 2 samples, got " +
                              std::to_string(n));
  using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                            Eigen::RowMajor>;
  Eigen::Map<const Mat> x(samples.data.data(), n, d);

  GaussianFit fit;
  fit.mean = x.colwise().mean();
  const Mat centered = x.rowwise() - fit.mean.transpose();
  Eigen::MatrixXd cov =
      (centered.transpose() * centered) / static_cast<double>(n - 1);
  cov = 0.5 * (cov + cov.transpose());

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  if (eig.info() != Eigen::Success)
    throw MatrixSqrtNonConvergence("covariance eigendecomposition failed");
  Eigen::VectorXd vals = eig.eigenvalues().cwiseMax(1e-10);
  fit.covariance =
      eig.eigenvectors() * vals.asDiagonal() * eig.eigenvectors().transpose();
  fit.covariance = 0.5 * (fit.covariance + fit.covariance.transpose());
  return fit;
}

namespace detail {

inline Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m);
  if (eig.info() != Eigen::Success)
    throw MatrixSqrtNonConvergence("eigendecomposition failed");
  Eigen::VectorXd vals = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return eig.eigenvectors() * vals.asDiagonal() *
         eig.eigenvectors().transpose();
}

}  // namespace detail

// ||mu1 - mu2||^2 + tr(S1 + S2 - 2 (S1 S2)^(1/2)); tiny negative results from
// floating error are clipped to zero and reported through `clipped`.
inline double frechet_distance(const GaussianFit& f1, const GaussianFit& f2,
                               bool* clipped = nullptr) {
  if (f1.dim() != f2.dim())
    throw DimensionMismatch("Gaussian fits differ in dimension");
  const Eigen::MatrixXd s2_half = detail::psd_sqrt(f2.covariance);
  Eigen::MatrixXd inner = s2_half * f1.covariance * s2_half;
  inner = 0.5 * (inner + inner.transpose());
  const double trace_sqrt = detail::psd_sqrt(inner).trace();

  const double mean_term = (f1.mean - f2.mean).squaredNorm();
  const double value = mean_term + f1.covariance.trace() +
                       f2.covariance.trace() - 2.0 * trace_sqrt;
  if (value < -1e-6)
    throw MatrixSqrtNonConvergence("Frechet distance evaluated below -1e-6");
  if (clipped) *clipped = value < 0.0;
  return value < 0.0 ? 0.0 : value;
}

inline double frechet_distance(const Tensor<double>& a,
                               const Tensor<double>& b) {
  return frechet_distance(fit_gaussian(a), fit_gaussian(b));
}

}  // namespace rlab
