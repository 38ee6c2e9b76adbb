#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "rlab/errors.hpp"
#include "rlab/rng.hpp"
#include "rlab/tensor.hpp"

// Two-dimensional synthetic targets: the mode-coverage benchmarks (ring and
// grid of Gaussians) and a single Gaussian smoke target.

namespace rlab {

enum class DatasetKind { GaussianRing, GridMixture, SingleGaussian };

struct DatasetSpec {
  DatasetKind kind = DatasetKind::GaussianRing;
  // ring
  int n_modes = 8;
  double radius = 2.0;
  // grid (unit spacing kGridSpacing between neighbours, centered at origin)
  int rows = 3;
  int cols = 3;
  // shared mixture width
  double mode_std = 0.05;
  // single gaussian
  std::array<double, 2> mean = {0.0, 0.0};
  std::array<double, 2> cov_diag = {1.0, 1.0};

  void validate() const {
    if (!(mode_std > 0.0)) throw ConfigInvalid("mode_std must be positive");
    switch (kind) {
      case DatasetKind::GaussianRing:
        if (n_modes < 1) throw ConfigInvalid("ring needs n_modes >= 1");
        if (!(radius > 0.0)) throw ConfigInvalid("ring radius must be > 0");
        break;
      case DatasetKind::GridMixture:
        if (rows < 1 || cols < 1)
          throw ConfigInvalid("grid needs rows, cols >= 1");
        break;
      case DatasetKind::SingleGaussian:
        for (double v : cov_diag)
          if (!(v > 0.0)) throw ConfigInvalid("covariance must be positive");
        break;
    }
  }
};

inline constexpr double kGridSpacing = 2.0;

class SyntheticDataset {
 public:
  explicit SyntheticDataset(DatasetSpec spec) : spec_(spec) {
    spec_.validate();
    switch (spec_.kind) {
      case DatasetKind::GaussianRing: {
        for (int i = 0; i < spec_.n_modes; ++i) {
          const double theta = 2.0 * kPi * i / spec_.n_modes;
          modes_.push_back({spec_.radius * std::cos(theta),
                            spec_.radius * std::sin(theta)});
        }
        break;
      }
      case DatasetKind::GridMixture: {
        const double x0 = -kGridSpacing * (spec_.cols - 1) / 2.0;
        const double y0 = -kGridSpacing * (spec_.rows - 1) / 2.0;
        for (int r = 0; r < spec_.rows; ++r)
          for (int c = 0; c < spec_.cols; ++c)
            modes_.push_back(
                {x0 + kGridSpacing * c, y0 + kGridSpacing * r});
        break;
      }
      case DatasetKind::SingleGaussian:
        break;
    }
  }

  static constexpr int dim() { return 2; }
  const DatasetSpec& spec() const { return spec_; }
  bool is_mixture() const { return !modes_.empty(); }
  const std::vector<std::array<double, 2>>& modes() const { return modes_; }

  Tensor<double> sample(Rng& rng, int n) const {
    Tensor<double> out(n, 2);
    for (int i = 0; i < n; ++i) {
      if (is_mixture()) {
        const auto& m = modes_[rng.index(modes_.size())];
        out.at(i, 0) = rng.normal(m[0], spec_.mode_std);
        out.at(i, 1) = rng.normal(m[1], spec_.mode_std);
      } else {
        out.at(i, 0) = rng.normal(spec_.mean[0], std::sqrt(spec_.cov_diag[0]));
        out.at(i, 1) = rng.normal(spec_.mean[1], std::sqrt(spec_.cov_diag[1]));
      }
    }
    return out;
  }

 private:
  static constexpr double kPi = 3.14159265358979323846;
  DatasetSpec spec_;
  std::vector<std::array<double, 2>> modes_;
};

struct ModeCoverage {
  int modes_hit = 0;
  double high_quality_fraction = 0.0;
};

// Nearest-mode assignment; a mode counts as hit when at least 1% of the
// samples land within 3 mode_std of it, and the high-quality fraction is the
// share of samples within 3 mode_std of their nearest mode.
inline ModeCoverage mode_coverage(const Tensor<double>& samples,
                                  const SyntheticDataset& dataset) {
  if (!dataset.is_mixture())
    throw WrongDatasetKind("mode coverage needs a mixture dataset");
  if (samples.cols != 2) throw ShapeMismatch("samples must be n x 2");
  const auto& modes = dataset.modes();
  const double r2 = 9.0 * dataset.spec().mode_std * dataset.spec().mode_std;

  std::vector<long> close_counts(modes.size(), 0);
  long high_quality = 0;
  for (int i = 0; i < samples.rows; ++i) {
    double best = 1e300;
    std::size_t best_mode = 0;
    for (std::size_t m = 0; m < modes.size(); ++m) {
      const double dx = samples.at(i, 0) - modes[m][0];
      const double dy = samples.at(i, 1) - modes[m][1];
      const double d2 = dx * dx + dy * dy;
      if (d2 < best) {
        best = d2;
        best_mode = m;
      }
    }
    if (best <= r2) {
      ++close_counts[best_mode];
      ++high_quality;
    }
  }

  ModeCoverage cov;
  const double hit_threshold = 0.01 * samples.rows;
  for (long c : close_counts)
    if (static_cast<double>(c) >= hit_threshold) ++cov.modes_hit;
  cov.high_quality_fraction =
      static_cast<double>(high_quality) / samples.rows;
  return cov;
}

}  // namespace rlab
