#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "rlab/losses.hpp"
#include "rlab/measures.hpp"

// Numerical certification of the analytic results: the optimal
// discriminators, the loss-equals-divergence identities, the alpha -> 1
// limits of the generator loss, and the condition-number stability boundary.
//
// Left-hand sides are computed by direct integration of the loss integrands;
// right-hand sides go through the measures module, so agreement between the
// two code paths is evidence rather than tautology.

namespace rlab {

struct IdentityReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double gap = 0.0;
};

// ---------------------------------------------------------------------------
// Optimal discriminators
// ---------------------------------------------------------------------------

// D*(x) = (a p_g(x) + b p_x(x)) / (p_g(x) + p_x(x))
inline double optimal_disc_lkgan_at(double px, double pg, double a, double b) {
  const double sum = px + pg;
  if (!(sum > 0.0))
    throw ZeroDensitySum("p_x + p_g vanishes at the evaluation point");
  return (a * pg + b * px) / sum;
}

inline std::vector<double> optimal_disc_lkgan(const DiscreteDist& p_x,
                                              const DiscreteDist& p_g,
                                              double a, double b) {
  if (p_x.size() != p_g.size())
    throw SupportMismatch("distributions differ in dimension");
  std::vector<double> d(p_x.size());
  for (std::size_t i = 0; i < d.size(); ++i)
    d[i] = optimal_disc_lkgan_at(p_x[i], p_g[i], a, b);
  return d;
}

inline std::function<double(double)> optimal_disc_lkgan(
    const ContinuousDensity& p_x, const ContinuousDensity& p_g, double a,
    double b) {
  return [p_x, p_g, a, b](double x) {
    return optimal_disc_lkgan_at(p_x.pdf(x), p_g.pdf(x), a, b);
  };
}

// Classical best response p_x / (p_x + p_g), the a = 0, b = 1 special case.
inline std::vector<double> optimal_disc_gan(const DiscreteDist& p_x,
                                            const DiscreteDist& p_g) {
  return optimal_disc_lkgan(p_x, p_g, 0.0, 1.0);
}

inline std::function<double(double)> optimal_disc_gan(
    const ContinuousDensity& p_x, const ContinuousDensity& p_g) {
  return optimal_disc_lkgan(p_x, p_g, 0.0, 1.0);
}

// ---------------------------------------------------------------------------
// Least-kth-order identity:
//   V_{k,g}(D*, g) = |c - b|^k |chi|^k(p_x + p_g || 2 p_g)
// under the constraint a - b = 2 (c - b).
// ---------------------------------------------------------------------------

namespace detail {

inline void require_lkgan_constraint(const LkganParams& p) {
  p.validate();
  if (std::abs((p.a - p.b) - 2.0 * (p.c - p.b)) > 1e-12)
    throw ConstraintViolated("identity requires a - b = 2 (c - b)");
}

}  // namespace detail

inline IdentityReport verify_lkgan_identity(const DiscreteDist& p_x,
                                            const DiscreteDist& p_g,
                                            const LkganParams& p) {
  detail::require_lkgan_constraint(p);
  if (p_x.size() != p_g.size())
    throw SupportMismatch("distributions differ in dimension");

  double lhs = 0.0;
  for (std::size_t i = 0; i < p_x.size(); ++i) {
    const double mass = p_x[i] + p_g[i];
    if (mass == 0.0) continue;
    const double d = optimal_disc_lkgan_at(p_x[i], p_g[i], p.a, p.b);
    lhs += mass * std::pow(std::abs(d - p.c), p.k);
  }

  std::vector<double> sum(p_x.size()), twice_g(p_x.size());
  for (std::size_t i = 0; i < p_x.size(); ++i) {
    sum[i] = p_x[i] + p_g[i];
    twice_g[i] = 2.0 * p_g[i];
  }
  const double rhs = std::pow(std::abs(p.c - p.b), p.k) *
                     pearson_vajda_measures(sum, twice_g, p.k);
  return {lhs, rhs, std::abs(lhs - rhs)};
}

inline IdentityReport verify_lkgan_identity(const ContinuousDensity& p_x,
                                            const ContinuousDensity& p_g,
                                            const LkganParams& p,
                                            const QuadratureConfig& cfg = {}) {
  detail::require_lkgan_constraint(p);
  const auto pts = merged_breakpoints(p_x, p_g);

  const double lhs = integrate(
      [&](double x) {
        const double px = p_x.pdf(x);
        const double pg = p_g.pdf(x);
        const double mass = px + pg;
        if (mass <= kDensityFloor) return 0.0;
        const double d = (p.a * pg + p.b * px) / mass;
        return mass * std::pow(std::abs(d - p.c), p.k);
      },
      std::span<const double>(pts), cfg);

  const double rhs =
      std::pow(std::abs(p.c - p.b), p.k) *
      pearson_vajda_measures(
          [&](double x) { return p_x.pdf(x) + p_g.pdf(x); },
          [&](double x) { return 2.0 * p_g.pdf(x); }, p.k, pts, cfg);
  return {lhs, rhs, std::abs(lhs - rhs)};
}

// ---------------------------------------------------------------------------
// Renyi identity:
//   V_{alpha,g}(D*, g) = 2 JR_alpha(p_x || p_g) - 2 log 2
// ---------------------------------------------------------------------------

inline IdentityReport verify_renyigan_identity(const DiscreteDist& p_x,
                                               const DiscreteDist& p_g,
                                               Order alpha) {
  const double a = Order::renyi(alpha.value()).value();
  if (p_x.size() != p_g.size())
    throw SupportMismatch("distributions differ in dimension");

  double sx = 0.0, sg = 0.0;
  for (std::size_t i = 0; i < p_x.size(); ++i) {
    const double mass = p_x[i] + p_g[i];
    if (mass == 0.0) continue;
    const double dstar = p_x[i] / mass;
    if (p_x[i] > 0.0) sx += p_x[i] * std::pow(dstar, a - 1.0);
    if (p_g[i] > 0.0) sg += p_g[i] * std::pow(1.0 - dstar, a - 1.0);
  }
  const double lhs = (std::log(sx) + std::log(sg)) / (a - 1.0);
  const double rhs =
      2.0 * jensen_renyi(p_x, p_g, alpha) - 2.0 * std::log(2.0);
  return {lhs, rhs, std::abs(lhs - rhs)};
}

inline IdentityReport verify_renyigan_identity(
    const ContinuousDensity& p_x, const ContinuousDensity& p_g, Order alpha,
    const QuadratureConfig& cfg = {}) {
  const double a = Order::renyi(alpha.value()).value();
  const auto pts = merged_breakpoints(p_x, p_g);

  const double sx = integrate(
      [&](double x) {
        const double px = p_x.pdf(x);
        if (px <= kDensityFloor) return 0.0;
        const double mass = px + p_g.pdf(x);
        return px * std::pow(px / mass, a - 1.0);
      },
      std::span<const double>(pts), cfg);
  const double sg = integrate(
      [&](double x) {
        const double pg = p_g.pdf(x);
        if (pg <= kDensityFloor) return 0.0;
        const double mass = p_x.pdf(x) + pg;
        return pg * std::pow(pg / mass, a - 1.0);
      },
      std::span<const double>(pts), cfg);

  const double lhs = (std::log(sx) + std::log(sg)) / (a - 1.0);
  const double rhs =
      2.0 * jensen_renyi(p_x, p_g, alpha, cfg) - 2.0 * std::log(2.0);
  return {lhs, rhs, std::abs(lhs - rhs)};
}

// ---------------------------------------------------------------------------
// Generator-loss limit: V_{alpha,g}(D, g) -> V(D, g) as alpha -> 1
// ---------------------------------------------------------------------------

namespace detail {

inline void require_interior(double d) {
  if (!(d >= 1e-3 && d <= 1.0 - 1e-3))
    throw SaturatedDiscriminator(
        "discriminator must stay in [1e-3, 1 - 1e-3]");
}

}  // namespace detail

inline double verify_generator_limit(std::span<const double> d_fn,
                                     const DiscreteDist& p_x,
                                     const DiscreteDist& p_g, double eps) {
  if (d_fn.size() != p_x.size() || p_x.size() != p_g.size())
    throw SupportMismatch("dimensions disagree");
  for (double d : d_fn) detail::require_interior(d);

  double v = 0.0;
  for (std::size_t i = 0; i < d_fn.size(); ++i) {
    v += p_x[i] * std::log(d_fn[i]) + p_g[i] * std::log(1.0 - d_fn[i]);
  }
  double gap = 0.0;
  for (double a : {1.0 - eps, 1.0 + eps}) {
    double sx = 0.0, sg = 0.0;
    for (std::size_t i = 0; i < d_fn.size(); ++i) {
      sx += p_x[i] * std::pow(d_fn[i], a - 1.0);
      sg += p_g[i] * std::pow(1.0 - d_fn[i], a - 1.0);
    }
    const double va = (std::log(sx) + std::log(sg)) / (a - 1.0);
    gap = std::max(gap, std::abs(va - v));
  }
  return gap;
}

inline double verify_generator_limit(const std::function<double(double)>& d_fn,
                                     const ContinuousDensity& p_x,
                                     const ContinuousDensity& p_g, double eps,
                                     const QuadratureConfig& cfg = {}) {
  const auto pts = merged_breakpoints(p_x, p_g);
  auto guarded = [&](double x) {
    const double d = d_fn(x);
    detail::require_interior(d);
    return d;
  };

  const double v = integrate(
      [&](double x) {
        const double px = p_x.pdf(x);
        const double pg = p_g.pdf(x);
        if (px <= kDensityFloor && pg <= kDensityFloor) return 0.0;
        const double d = guarded(x);
        double t = 0.0;
        if (px > kDensityFloor) t += px * std::log(d);
        if (pg > kDensityFloor) t += pg * std::log(1.0 - d);
        return t;
      },
      std::span<const double>(pts), cfg);

  double gap = 0.0;
  for (double a : {1.0 - eps, 1.0 + eps}) {
    const double sx = integrate(
        [&](double x) {
          const double px = p_x.pdf(x);
          if (px <= kDensityFloor) return 0.0;
          return px * std::pow(guarded(x), a - 1.0);
        },
        std::span<const double>(pts), cfg);
    const double sg = integrate(
        [&](double x) {
          const double pg = p_g.pdf(x);
          if (pg <= kDensityFloor) return 0.0;
          return pg * std::pow(1.0 - guarded(x), a - 1.0);
        },
        std::span<const double>(pts), cfg);
    const double va = (std::log(sx) + std::log(sg)) / (a - 1.0);
    gap = std::max(gap, std::abs(va - v));
  }
  return gap;
}

// ---------------------------------------------------------------------------
// Population generator objectives for a fixed discriminator function:
// V_alpha(D, g) and its L1-normalized form |V_alpha(D, g) + 2 log 2|, which
// folds both cross-entropy terms (the batch estimator used in training folds
// only the fake-sample term).
// ---------------------------------------------------------------------------

inline double renyigan_population_loss(const std::function<double(double)>& d_fn,
                                       const ContinuousDensity& p_x,
                                       const ContinuousDensity& p_g,
                                       Order alpha,
                                       const QuadratureConfig& cfg = {}) {
  const double a = Order::renyi(alpha.value()).value();
  const auto pts = merged_breakpoints(p_x, p_g);
  const double sx = integrate(
      [&](double x) {
        const double px = p_x.pdf(x);
        if (px <= kDensityFloor) return 0.0;
        return px * std::pow(d_fn(x), a - 1.0);
      },
      std::span<const double>(pts), cfg);
  const double sg = integrate(
      [&](double x) {
        const double pg = p_g.pdf(x);
        if (pg <= kDensityFloor) return 0.0;
        return pg * std::pow(1.0 - d_fn(x), a - 1.0);
      },
      std::span<const double>(pts), cfg);
  if (!(sx > 0.0) || !(sg > 0.0))
    throw LogOfZero("population loss integrals vanished");
  return (std::log(sx) + std::log(sg)) / (a - 1.0);
}

inline double l1_population_objective(const std::function<double(double)>& d_fn,
                                      const ContinuousDensity& p_x,
                                      const ContinuousDensity& p_g,
                                      Order alpha,
                                      const QuadratureConfig& cfg = {}) {
  return std::abs(renyigan_population_loss(d_fn, p_x, p_g, alpha, cfg) +
                  2.0 * std::log(2.0));
}

// ---------------------------------------------------------------------------
// Absolute condition number of the Renyi cross-entropy functional:
//   kappa = p(x0) q(x0)^(alpha-2) / integral(p q^(alpha-1))
// Bounded for alpha >= 2; diverges as q(x0) -> 0 for alpha < 2.
// ---------------------------------------------------------------------------

namespace detail {

inline double condition_number_from(double p_x0, double q_x0, double a,
                                    double denominator) {
  if (!(denominator > 0.0) || !std::isfinite(denominator))
    throw DegenerateDenominator("integral of p q^(alpha-1) must be positive");
  if (q_x0 < 0.0) throw NegativeFunctionValue("q(x0) must be >= 0");
  if (q_x0 == 0.0) {
    if (a < 2.0) return std::numeric_limits<double>::infinity();
    return a == 2.0 ? p_x0 / denominator : 0.0;
  }
  return p_x0 * std::pow(q_x0, a - 2.0) / denominator;
}

}  // namespace detail

inline double condition_number(const DiscreteDist& p,
                               std::span<const double> q_fn, Order alpha,
                               std::size_t x0) {
  const double a = Order::renyi(alpha.value()).value();
  if (q_fn.size() != p.size())
    throw SupportMismatch("function values differ in dimension");
  if (x0 >= p.size()) throw SupportMismatch("x0 outside the support");
  double denom = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (q_fn[i] < 0.0) throw NegativeFunctionValue("q must be >= 0");
    if (p[i] == 0.0 || q_fn[i] == 0.0) continue;
    denom += p[i] * std::pow(q_fn[i], a - 1.0);
  }
  return detail::condition_number_from(p[x0], q_fn[x0], a, denom);
}

inline double condition_number(const ContinuousDensity& p,
                               const std::function<double(double)>& q_fn,
                               Order alpha, double x0,
                               const QuadratureConfig& cfg = {}) {
  const double a = Order::renyi(alpha.value()).value();
  std::vector<double> pts;
  p.append_breakpoints(pts);
  const double denom = integrate(
      [&](double x) {
        const double pv = p.pdf(x);
        if (pv <= kDensityFloor) return 0.0;
        const double qv = q_fn(x);
        if (qv < 0.0) throw NegativeFunctionValue("q must be >= 0");
        if (qv == 0.0) return 0.0;
        return pv * std::pow(qv, a - 1.0);
      },
      std::span<const double>(pts), cfg);
  return detail::condition_number_from(p.pdf(x0), q_fn(x0), a, denom);
}

}  // namespace rlab
