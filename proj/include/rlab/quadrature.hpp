#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <span>
#include <vector>

#include "rlab/errors.hpp"

namespace rlab {

struct QuadratureConfig {
  double abs_tol = 1e-10;
  double rel_tol = 1e-8;
  int max_subdivisions = 2000;

  void validate() const {
    if (!(abs_tol > 0.0) || !(rel_tol > 0.0))
      throw ConfigInvalid("quadrature tolerances must be positive");
    if (max_subdivisions < 1)
      throw ConfigInvalid("quadrature max_subdivisions must be >= 1");
  }
};

namespace detail {

// 15-point Kronrod extension of the 7-point Gauss rule on [-1, 1].
inline constexpr double kKronrodNodes[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};

inline constexpr double kKronrodWeights[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};

// Gauss weights paired with the odd-indexed Kronrod nodes.
inline constexpr double kGaussWeights[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

struct Panel {
  double lo, hi;
  double integral;
  double error;

  bool operator<(const Panel& other) const { return error < other.error; }
};

// Single Gauss-Kronrod evaluation over [lo, hi].
template <typename F>
Panel gauss_kronrod_15(F&& f, double lo, double hi) {
  const double half = 0.5 * (hi - lo);
  const double center = 0.5 * (lo + hi);

  double fv[15];
  for (int i = 0; i < 7; ++i) {
    fv[i] = f(center - half * kKronrodNodes[i]);
    fv[14 - i] = f(center + half * kKronrodNodes[i]);
  }
  fv[7] = f(center);
  for (double v : fv) {
    if (!std::isfinite(v))
      throw IntegralDiverges("non-finite integrand value inside panel");
  }

  double resk = kKronrodWeights[7] * fv[7];
  double resg = kGaussWeights[3] * fv[7];
  double resabs = std::abs(resk);
  for (int i = 0; i < 7; ++i) {
    resk += kKronrodWeights[i] * (fv[i] + fv[14 - i]);
    resabs += kKronrodWeights[i] * (std::abs(fv[i]) + std::abs(fv[14 - i]));
  }
  for (int i = 0; i < 3; ++i) {
    resg += kGaussWeights[i] * (fv[2 * i + 1] + fv[13 - 2 * i]);
  }

  const double reskh = 0.5 * resk;
  double resasc = kKronrodWeights[7] * std::abs(fv[7] - reskh);
  for (int i = 0; i < 7; ++i) {
    resasc += kKronrodWeights[i] *
              (std::abs(fv[i] - reskh) + std::abs(fv[14 - i] - reskh));
  }

  double err = std::abs(resk - resg) * half;
  resasc *= half;
  resabs *= half;
  if (resasc != 0.0 && err != 0.0)
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  const double eps50 = 50.0 * std::numeric_limits<double>::epsilon();
  if (resabs > std::numeric_limits<double>::min() / eps50)
    err = std::max(eps50 * resabs, err);

  return Panel{lo, hi, resk * half, err};
}

}  // namespace detail

// Adaptive panel quadrature: repeatedly bisects the panel with the largest
// error estimate until the total estimate satisfies the tolerances.
// Breakpoints seed the initial panels; they must be sorted and contain at
// least the two interval ends.
template <typename F>
double integrate(F&& f, std::span<const double> breakpoints,
                 const QuadratureConfig& cfg = {}) {
  cfg.validate();
  if (breakpoints.size() < 2)
    throw ConfigInvalid("integration needs at least two breakpoints");

  std::priority_queue<detail::Panel> panels;
  double total = 0.0, total_err = 0.0;
  int used = 0;
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    if (!(breakpoints[i] < breakpoints[i + 1])) continue;
    auto p = detail::gauss_kronrod_15(f, breakpoints[i], breakpoints[i + 1]);
    total += p.integral;
    total_err += p.error;
    panels.push(p);
    ++used;
  }
  if (panels.empty()) throw ConfigInvalid("empty integration domain");

  while (total_err > std::max(cfg.abs_tol, cfg.rel_tol * std::abs(total))) {
    if (used >= cfg.max_subdivisions)
      throw QuadratureNonConvergence("subdivision limit reached");
    detail::Panel worst = panels.top();
    panels.pop();
    const double mid = 0.5 * (worst.lo + worst.hi);
    if (!(worst.lo < mid && mid < worst.hi))
      throw QuadratureNonConvergence("panel width below representable step");
    auto left = detail::gauss_kronrod_15(f, worst.lo, mid);
    auto right = detail::gauss_kronrod_15(f, mid, worst.hi);
    total += left.integral + right.integral - worst.integral;
    total_err += left.error + right.error - worst.error;
    panels.push(left);
    panels.push(right);
    ++used;
  }
  return total;
}

template <typename F>
double integrate(F&& f, double lo, double hi, const QuadratureConfig& cfg = {}) {
  const double pts[2] = {lo, hi};
  return integrate(std::forward<F>(f), std::span<const double>(pts), cfg);
}

}  // namespace rlab
