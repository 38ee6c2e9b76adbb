#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "rlab/errors.hpp"

namespace rlab {

// Densities below this level are treated as zero mass when deciding
// absolute-continuity violations; it keeps far Gaussian tails from tripping
// the checks while genuine zero regions (histograms) still do.
inline constexpr double kDensityFloor = 1e-280;

// Order parameter of a parametrized information measure (alpha or k).
// Construction requires positivity; measure-specific restrictions
// (alpha != 1, k >= 1) are enforced by the named factories and re-checked
// at the call sites.
class Order {
 public:
  explicit Order(double value) : value_(value) {
    if (!std::isfinite(value) || !(value > 0.0))
      throw OrderOutOfRange("order must be a positive real, got " +
                            std::to_string(value));
  }

  // Renyi-type order: positive and bounded away from 1.
  static Order renyi(double alpha) {
    Order o(alpha);
    if (std::abs(alpha - 1.0) <= 1e-9)
      throw OrderOutOfRange("Renyi order must satisfy |alpha - 1| > 1e-9");
    return o;
  }

  // Pearson-Vajda order: k >= 1.
  static Order vajda(double k) {
    Order o(k);
    if (!(k >= 1.0))
      throw OrderOutOfRange("Pearson-Vajda order must satisfy k >= 1");
    return o;
  }

  double value() const { return value_; }

 private:
  double value_;
};

// Finite probability vector; support labels are implicit by index.
class DiscreteDist {
 public:
  explicit DiscreteDist(std::vector<double> probs) : probs_(std::move(probs)) {
    if (probs_.empty()) throw ConfigInvalid("discrete distribution is empty");
    double sum = 0.0;
    for (double p : probs_) {
      if (!(p >= 0.0))
        throw ConfigInvalid("discrete probabilities must be non-negative");
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-12)
      throw ConfigInvalid("discrete probabilities must sum to 1 (got " +
                          std::to_string(sum) + ")");
  }

  std::size_t size() const { return probs_.size(); }
  double operator[](std::size_t i) const { return probs_[i]; }
  const std::vector<double>& probs() const { return probs_; }

 private:
  std::vector<double> probs_;
};

enum class DensityKind { Gaussian1d, GaussianDiag, Histogram, Evaluable };

// One-dimensional (or diagonal product) density with a declared support used
// as the integration domain. Gaussian pdfs are evaluated exactly everywhere;
// their support is truncated at +-12 sigma, beyond which the tail mass is
// far below any tolerance used here.
class ContinuousDensity {
 public:
  static ContinuousDensity gaussian(double mean, double variance) {
    require_variance(variance);
    ContinuousDensity d(DensityKind::Gaussian1d);
    d.mean_ = {mean};
    d.var_ = {variance};
    const double sigma = std::sqrt(variance);
    d.lo_ = mean - 12.0 * sigma;
    d.hi_ = mean + 12.0 * sigma;
    return d;
  }

  static ContinuousDensity gaussian_diag(std::vector<double> mean,
                                         std::vector<double> variance) {
    if (mean.empty() || mean.size() != variance.size())
      throw ConfigInvalid("diagonal Gaussian needs matching mean/variance");
    for (double v : variance) require_variance(v);
    ContinuousDensity d(DensityKind::GaussianDiag);
    d.mean_ = std::move(mean);
    d.var_ = std::move(variance);
    return d;
  }

  // Piecewise-constant density over contiguous bins. `masses` are the bin
  // probabilities and must integrate (sum) to 1.
  static ContinuousDensity histogram(std::vector<double> edges,
                                     std::vector<double> masses) {
    if (edges.size() < 2 || masses.size() + 1 != edges.size())
      throw ConfigInvalid("histogram needs n+1 edges for n masses");
    for (std::size_t i = 0; i + 1 < edges.size(); ++i)
      if (!(edges[i] < edges[i + 1]))
        throw ConfigInvalid("histogram edges must be strictly increasing");
    double total = 0.0;
    for (double m : masses) {
      if (!(m >= 0.0)) throw ConfigInvalid("histogram masses must be >= 0");
      total += m;
    }
    if (std::abs(total - 1.0) > 1e-10)
      throw ConfigInvalid("histogram masses must integrate to 1 (got " +
                          std::to_string(total) + ")");
    ContinuousDensity d(DensityKind::Histogram);
    d.lo_ = edges.front();
    d.hi_ = edges.back();
    d.heights_.resize(masses.size());
    for (std::size_t i = 0; i < masses.size(); ++i)
      d.heights_[i] = masses[i] / (edges[i + 1] - edges[i]);
    d.edges_ = std::move(edges);
    d.masses_ = std::move(masses);
    return d;
  }

  // Arbitrary pdf callback over a closed interval. Non-negativity is
  // spot-checked on a coarse grid now and on every evaluation later.
  static ContinuousDensity evaluable(std::function<double(double)> pdf,
                                     double lo, double hi) {
    if (!pdf) throw ConfigInvalid("evaluable density needs a callable pdf");
    if (!(lo < hi)) throw ConfigInvalid("evaluable support must be non-empty");
    ContinuousDensity d(DensityKind::Evaluable);
    d.pdf_fn_ = std::move(pdf);
    d.lo_ = lo;
    d.hi_ = hi;
    for (int i = 0; i <= 32; ++i) {
      const double x = lo + (hi - lo) * i / 32.0;
      if (d.pdf_fn_(x) < 0.0)
        throw NegativeFunctionValue("pdf is negative at x = " +
                                    std::to_string(x));
    }
    return d;
  }

  DensityKind kind() const { return kind_; }

  int dim() const {
    return kind_ == DensityKind::GaussianDiag
               ? static_cast<int>(mean_.size())
               : 1;
  }

  double support_lo() const { return lo_; }
  double support_hi() const { return hi_; }

  double pdf(double x) const {
    switch (kind_) {
      case DensityKind::Gaussian1d: {
        const double z = (x - mean_[0]) * (x - mean_[0]) / var_[0];
        return std::exp(-0.5 * z) / std::sqrt(2.0 * kPi * var_[0]);
      }
      case DensityKind::Histogram: {
        if (x < lo_ || x >= hi_) return x == hi_ ? heights_.back() : 0.0;
        const auto it = std::upper_bound(edges_.begin(), edges_.end(), x);
        const auto bin = static_cast<std::size_t>(it - edges_.begin()) - 1;
        return heights_[std::min(bin, heights_.size() - 1)];
      }
      case DensityKind::Evaluable: {
        if (x < lo_ || x > hi_) return 0.0;
        const double v = pdf_fn_(x);
        if (v < 0.0)
          throw NegativeFunctionValue("pdf is negative at x = " +
                                      std::to_string(x));
        return v;
      }
      case DensityKind::GaussianDiag:
        throw UnsupportedDensity("scalar pdf undefined for diagonal Gaussian");
    }
    return 0.0;
  }

  // Per-dimension marginal of a diagonal Gaussian.
  ContinuousDensity component(int i) const {
    if (kind_ != DensityKind::GaussianDiag)
      throw UnsupportedDensity("component() requires a diagonal Gaussian");
    return gaussian(mean_[static_cast<std::size_t>(i)],
                    var_[static_cast<std::size_t>(i)]);
  }

  const std::vector<double>& means() const { return mean_; }
  const std::vector<double>& variances() const { return var_; }
  const std::vector<double>& edges() const { return edges_; }
  const std::vector<double>& masses() const { return masses_; }

  // Natural panel seeds for adaptive integration over this density.
  void append_breakpoints(std::vector<double>& out) const {
    switch (kind_) {
      case DensityKind::Gaussian1d:
        out.push_back(lo_);
        out.push_back(mean_[0]);
        out.push_back(hi_);
        break;
      case DensityKind::Histogram:
        out.insert(out.end(), edges_.begin(), edges_.end());
        break;
      case DensityKind::Evaluable:
        out.push_back(lo_);
        out.push_back(hi_);
        break;
      case DensityKind::GaussianDiag:
        throw UnsupportedDensity("no 1-d breakpoints for diagonal Gaussian");
    }
  }

 private:
  explicit ContinuousDensity(DensityKind kind) : kind_(kind) {}

  static void require_variance(double v) {
    if (!std::isfinite(v) || !(v > 0.0))
      throw ConfigInvalid("Gaussian variance must be positive");
  }

  static constexpr double kPi = 3.14159265358979323846;

  DensityKind kind_;
  std::vector<double> mean_, var_;
  std::vector<double> edges_, masses_, heights_;
  std::function<double(double)> pdf_fn_;
  double lo_ = 0.0, hi_ = 0.0;
};

// Merged panel seeds covering the supports of both densities.
inline std::vector<double> merged_breakpoints(const ContinuousDensity& p,
                                              const ContinuousDensity& q) {
  std::vector<double> pts;
  p.append_breakpoints(pts);
  q.append_breakpoints(pts);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

}  // namespace rlab
