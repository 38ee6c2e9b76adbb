#pragma once

#include <cmath>
#include <functional>
#include <span>
#include <vector>

#include "rlab/distributions.hpp"
#include "rlab/quadrature.hpp"

// Exact and numerical evaluation of the information measures between a pair
// of distributions: KL, Shannon cross-entropy, Pearson-Vajda |chi|^k, Renyi
// divergence and cross-entropy, Jensen-Shannon and Jensen-Renyi.
//
// Conventions used throughout:
//   * natural logarithms;
//   * discrete sums skip indices where both masses vanish;
//   * alpha = 1 is rejected, a separate limit helper gives the Shannon case.

namespace rlab {

namespace detail {

inline void require_same_size(const DiscreteDist& p, const DiscreteDist& q) {
  if (p.size() != q.size())
    throw SupportMismatch("discrete distributions differ in dimension");
}

inline bool factorizes_over_dims(const ContinuousDensity& p,
                                 const ContinuousDensity& q) {
  const bool pd = p.kind() == DensityKind::GaussianDiag;
  const bool qd = q.kind() == DensityKind::GaussianDiag;
  if (pd != qd)
    throw SupportMismatch("cannot mix diagonal Gaussian with 1-d density");
  if (pd && p.dim() != q.dim())
    throw SupportMismatch("diagonal Gaussians differ in dimension");
  return pd;
}

template <typename Term>
double integrate_pair(const ContinuousDensity& p, const ContinuousDensity& q,
                      Term&& term, const QuadratureConfig& cfg) {
  const auto pts = merged_breakpoints(p, q);
  return integrate([&](double x) { return term(p.pdf(x), q.pdf(x)); },
                   std::span<const double>(pts), cfg);
}

// Kernel of |chi|^k on non-negative measures. The p >= |q - p| case never
// overflows because the ratio is formed before the power.
inline double vajda_term(double pv, double qv, double k) {
  if (pv <= kDensityFloor) {
    if (qv <= kDensityFloor) return 0.0;
    if (k == 1.0) return qv;
    throw DivisionByZeroSupport(
        "Pearson-Vajda of order k > 1 needs p > 0 where q has mass");
  }
  const double d = std::abs(qv - pv);
  if (d == 0.0) return 0.0;
  return d * std::pow(d / pv, k - 1.0);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Discrete specializations
// ---------------------------------------------------------------------------

inline double kl_divergence(const DiscreteDist& p, const DiscreteDist& q) {
  detail::require_same_size(p, q);
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) continue;
    if (q[i] == 0.0)
      throw AbsoluteContinuityViolation("q vanishes where p has mass");
    sum += p[i] * std::log(p[i] / q[i]);
  }
  return sum;
}

inline double shannon_cross_entropy(const DiscreteDist& p,
                                    const DiscreteDist& q) {
  detail::require_same_size(p, q);
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) continue;
    if (q[i] == 0.0)
      throw AbsoluteContinuityViolation("q vanishes where p has mass");
    sum -= p[i] * std::log(q[i]);
  }
  return sum;
}

// |chi|^k over plain non-negative weight vectors (no normalization demanded);
// this is the form consumed by the optimal-discriminator identities where the
// arguments are sums of densities.
inline double pearson_vajda_measures(std::span<const double> p,
                                     std::span<const double> q, double k) {
  if (!(k >= 1.0)) throw OrderOutOfRange("Pearson-Vajda needs k >= 1");
  if (p.size() != q.size())
    throw SupportMismatch("weight vectors differ in dimension");
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i)
    sum += detail::vajda_term(p[i], q[i], k);
  return sum;
}

inline double pearson_vajda(const DiscreteDist& p, const DiscreteDist& q,
                            Order k) {
  if (!(k.value() >= 1.0))
    throw OrderOutOfRange("Pearson-Vajda needs k >= 1");
  return pearson_vajda_measures(p.probs(), q.probs(), k.value());
}

inline double renyi_divergence(const DiscreteDist& p, const DiscreteDist& q,
                               Order alpha) {
  detail::require_same_size(p, q);
  const double a = Order::renyi(alpha.value()).value();
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) continue;
    if (q[i] == 0.0) {
      if (a > 1.0)
        throw IntegralDiverges("q vanishes where p has mass (alpha > 1)");
      continue;  // p^a * q^(1-a) -> 0 for alpha < 1
    }
    sum += std::pow(p[i], a) * std::pow(q[i], 1.0 - a);
  }
  if (!(sum > 0.0) || !std::isfinite(sum))
    throw IntegralDiverges("Renyi divergence sum is degenerate");
  return std::log(sum) / (a - 1.0);
}

inline double renyi_cross_entropy(const DiscreteDist& p, const DiscreteDist& q,
                                  Order alpha) {
  detail::require_same_size(p, q);
  const double a = Order::renyi(alpha.value()).value();
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) continue;
    if (q[i] == 0.0) {
      if (a < 1.0)
        throw IntegralDiverges("q vanishes where p has mass (alpha < 1)");
      continue;
    }
    sum += p[i] * std::pow(q[i], a - 1.0);
  }
  if (!std::isfinite(sum)) throw IntegralDiverges("cross-entropy sum diverged");
  if (!(sum > 0.0)) throw LogOfZero("integral of p q^(alpha-1) is zero");
  return std::log(sum) / (1.0 - a);
}

// Cross-entropy functional: q need not normalize, only be non-negative.
inline double renyi_cross_entropy_functional(const DiscreteDist& p,
                                             std::span<const double> q_fn,
                                             Order alpha) {
  if (p.size() != q_fn.size())
    throw SupportMismatch("function values differ in dimension");
  const double a = Order::renyi(alpha.value()).value();
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double qv = q_fn[i];
    if (qv < 0.0)
      throw NegativeFunctionValue("cross-entropy functional needs q >= 0");
    if (p[i] == 0.0) continue;
    if (qv == 0.0) {
      if (a < 1.0)
        throw IntegralDiverges("q vanishes where p has mass (alpha < 1)");
      continue;
    }
    sum += p[i] * std::pow(qv, a - 1.0);
  }
  if (!std::isfinite(sum)) throw IntegralDiverges("functional sum diverged");
  if (!(sum > 0.0)) throw LogOfZero("integral of p q^(alpha-1) is zero");
  return std::log(sum) / (1.0 - a);
}

inline double jensen_shannon(const DiscreteDist& p, const DiscreteDist& q) {
  detail::require_same_size(p, q);
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double m = 0.5 * (p[i] + q[i]);
    if (m == 0.0) continue;
    if (p[i] > 0.0) sum += 0.5 * p[i] * std::log(p[i] / m);
    if (q[i] > 0.0) sum += 0.5 * q[i] * std::log(q[i] / m);
  }
  return sum;
}

inline double jensen_renyi(const DiscreteDist& p, const DiscreteDist& q,
                           Order alpha) {
  detail::require_same_size(p, q);
  const double a = Order::renyi(alpha.value()).value();
  double sp = 0.0, sq = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double m = 0.5 * (p[i] + q[i]);
    if (m == 0.0) continue;
    if (p[i] > 0.0) sp += p[i] * std::pow(p[i] / m, a - 1.0);
    if (q[i] > 0.0) sq += q[i] * std::pow(q[i] / m, a - 1.0);
  }
  if (!(sp > 0.0) || !(sq > 0.0) || !std::isfinite(sp) || !std::isfinite(sq))
    throw IntegralDiverges("Jensen-Renyi sums are degenerate");
  return 0.5 * (std::log(sp) + std::log(sq)) / (a - 1.0);
}

// ---------------------------------------------------------------------------
// Continuous densities (adaptive quadrature; diagonal Gaussians reduce
// per-dimension where the measure factorizes)
// ---------------------------------------------------------------------------

inline double kl_divergence(const ContinuousDensity& p,
                            const ContinuousDensity& q,
                            const QuadratureConfig& cfg = {}) {
  if (detail::factorizes_over_dims(p, q)) {
    double sum = 0.0;
    for (int i = 0; i < p.dim(); ++i)
      sum += kl_divergence(p.component(i), q.component(i), cfg);
    return sum;
  }
  return detail::integrate_pair(
      p, q,
      [](double pv, double qv) {
        if (pv <= kDensityFloor) return 0.0;
        if (qv <= kDensityFloor)
          throw AbsoluteContinuityViolation("q vanishes where p has mass");
        return pv * std::log(pv / qv);
      },
      cfg);
}

inline double shannon_cross_entropy(const ContinuousDensity& p,
                                    const ContinuousDensity& q,
                                    const QuadratureConfig& cfg = {}) {
  if (detail::factorizes_over_dims(p, q)) {
    double sum = 0.0;
    for (int i = 0; i < p.dim(); ++i)
      sum += shannon_cross_entropy(p.component(i), q.component(i), cfg);
    return sum;
  }
  return detail::integrate_pair(
      p, q,
      [](double pv, double qv) {
        if (pv <= kDensityFloor) return 0.0;
        if (qv <= kDensityFloor)
          throw AbsoluteContinuityViolation("q vanishes where p has mass");
        return -pv * std::log(qv);
      },
      cfg);
}

inline double pearson_vajda_measures(const std::function<double(double)>& p,
                                     const std::function<double(double)>& q,
                                     double k,
                                     std::span<const double> breakpoints,
                                     const QuadratureConfig& cfg = {}) {
  if (!(k >= 1.0)) throw OrderOutOfRange("Pearson-Vajda needs k >= 1");
  return integrate(
      [&](double x) { return detail::vajda_term(p(x), q(x), k); }, breakpoints,
      cfg);
}

inline double pearson_vajda(const ContinuousDensity& p,
                            const ContinuousDensity& q, Order k,
                            const QuadratureConfig& cfg = {}) {
  if (!(k.value() >= 1.0))
    throw OrderOutOfRange("Pearson-Vajda needs k >= 1");
  if (detail::factorizes_over_dims(p, q))
    throw UnsupportedDensity(
        "Pearson-Vajda does not factorize over dimensions");
  return detail::integrate_pair(
      p, q,
      [&](double pv, double qv) { return detail::vajda_term(pv, qv, k.value()); },
      cfg);
}

inline double renyi_divergence(const ContinuousDensity& p,
                               const ContinuousDensity& q, Order alpha,
                               const QuadratureConfig& cfg = {}) {
  const double a = Order::renyi(alpha.value()).value();
  if (detail::factorizes_over_dims(p, q)) {
    double sum = 0.0;
    for (int i = 0; i < p.dim(); ++i)
      sum += renyi_divergence(p.component(i), q.component(i), alpha, cfg);
    return sum;
  }
  const double integral = detail::integrate_pair(
      p, q,
      [a](double pv, double qv) {
        if (pv <= kDensityFloor) return 0.0;
        if (qv <= kDensityFloor) {
          if (a > 1.0)
            throw IntegralDiverges("q vanishes where p has mass (alpha > 1)");
          return 0.0;
        }
        return std::pow(pv, a) * std::pow(qv, 1.0 - a);
      },
      cfg);
  if (!(integral > 0.0) || !std::isfinite(integral))
    throw IntegralDiverges("Renyi divergence integral is degenerate");
  return std::log(integral) / (a - 1.0);
}

inline double renyi_cross_entropy(const ContinuousDensity& p,
                                  const ContinuousDensity& q, Order alpha,
                                  const QuadratureConfig& cfg = {}) {
  const double a = Order::renyi(alpha.value()).value();
  if (detail::factorizes_over_dims(p, q)) {
    double sum = 0.0;
    for (int i = 0; i < p.dim(); ++i)
      sum += renyi_cross_entropy(p.component(i), q.component(i), alpha, cfg);
    return sum;
  }
  const double integral = detail::integrate_pair(
      p, q,
      [a](double pv, double qv) {
        if (pv <= kDensityFloor) return 0.0;
        if (qv <= kDensityFloor) {
          if (a < 1.0)
            throw IntegralDiverges("q vanishes where p has mass (alpha < 1)");
          return 0.0;
        }
        return pv * std::pow(qv, a - 1.0);
      },
      cfg);
  if (!std::isfinite(integral))
    throw IntegralDiverges("cross-entropy integral diverged");
  if (!(integral > 0.0)) throw LogOfZero("integral of p q^(alpha-1) is zero");
  return std::log(integral) / (1.0 - a);
}

inline double renyi_cross_entropy_functional(
    const ContinuousDensity& p, const std::function<double(double)>& q_fn,
    Order alpha, const QuadratureConfig& cfg = {}) {
  const double a = Order::renyi(alpha.value()).value();
  if (p.kind() == DensityKind::GaussianDiag)
    throw UnsupportedDensity("functional form is 1-d only");
  std::vector<double> pts;
  p.append_breakpoints(pts);
  const double integral = integrate(
      [&](double x) {
        const double pv = p.pdf(x);
        const double qv = q_fn(x);
        if (qv < 0.0)
          throw NegativeFunctionValue("cross-entropy functional needs q >= 0");
        if (pv <= kDensityFloor) return 0.0;
        if (qv == 0.0) {
          if (a < 1.0)
            throw IntegralDiverges("q vanishes where p has mass (alpha < 1)");
          return 0.0;
        }
        return pv * std::pow(qv, a - 1.0);
      },
      std::span<const double>(pts), cfg);
  if (!std::isfinite(integral))
    throw IntegralDiverges("functional integral diverged");
  if (!(integral > 0.0)) throw LogOfZero("integral of p q^(alpha-1) is zero");
  return std::log(integral) / (1.0 - a);
}

inline double jensen_shannon(const ContinuousDensity& p,
                             const ContinuousDensity& q,
                             const QuadratureConfig& cfg = {}) {
  if (detail::factorizes_over_dims(p, q))
    throw UnsupportedDensity(
        "Jensen-Shannon does not factorize over dimensions");
  return detail::integrate_pair(
      p, q,
      [](double pv, double qv) {
        const double m = 0.5 * (pv + qv);
        if (m <= kDensityFloor) return 0.0;
        double t = 0.0;
        if (pv > kDensityFloor) t += 0.5 * pv * std::log(pv / m);
        if (qv > kDensityFloor) t += 0.5 * qv * std::log(qv / m);
        return t;
      },
      cfg);
}

inline double jensen_renyi(const ContinuousDensity& p,
                           const ContinuousDensity& q, Order alpha,
                           const QuadratureConfig& cfg = {}) {
  const double a = Order::renyi(alpha.value()).value();
  if (detail::factorizes_over_dims(p, q))
    throw UnsupportedDensity("Jensen-Renyi does not factorize over dimensions");
  auto half_term = [a](double pv, double mv) {
    if (pv <= kDensityFloor) return 0.0;
    return pv * std::pow(pv / mv, a - 1.0);
  };
  const double ip = detail::integrate_pair(
      p, q,
      [&](double pv, double qv) { return half_term(pv, 0.5 * (pv + qv)); },
      cfg);
  const double iq = detail::integrate_pair(
      p, q,
      [&](double pv, double qv) { return half_term(qv, 0.5 * (pv + qv)); },
      cfg);
  if (!(ip > 0.0) || !(iq > 0.0) || !std::isfinite(ip) || !std::isfinite(iq))
    throw IntegralDiverges("Jensen-Renyi integrals are degenerate");
  return 0.5 * (std::log(ip) + std::log(iq)) / (a - 1.0);
}

// ---------------------------------------------------------------------------
// alpha -> 1 limit helpers (the Shannon specializations, kept separate so the
// alpha = 1 rejection above stays strict)
// ---------------------------------------------------------------------------

inline double renyi_cross_entropy_limit(const DiscreteDist& p,
                                        const DiscreteDist& q) {
  return shannon_cross_entropy(p, q);
}

inline double renyi_cross_entropy_limit(const ContinuousDensity& p,
                                        const ContinuousDensity& q,
                                        const QuadratureConfig& cfg = {}) {
  return shannon_cross_entropy(p, q, cfg);
}

inline double renyi_divergence_limit(const DiscreteDist& p,
                                     const DiscreteDist& q) {
  return kl_divergence(p, q);
}

inline double jensen_renyi_limit(const DiscreteDist& p,
                                 const DiscreteDist& q) {
  return jensen_shannon(p, q);
}

}  // namespace rlab
