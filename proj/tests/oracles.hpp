#pragma once

// Closed-form Gaussian reference values. These are test-side oracles kept
// deliberately independent of the quadrature code paths they check.

#include <cmath>
#include <stdexcept>

namespace oracle {

inline constexpr double kPi = 3.14159265358979323846;

inline double gaussian_kl(double m1, double v1, double m2, double v2) {
  const double dm = m1 - m2;
  return 0.5 * std::log(v2 / v1) + (v1 + dm * dm) / (2.0 * v2) - 0.5;
}

inline double gaussian_entropy(double v) {
  return 0.5 * std::log(2.0 * kPi * std::exp(1.0) * v);
}

inline double gaussian_cross_entropy(double m1, double v1, double m2,
                                     double v2) {
  const double dm = m1 - m2;
  return 0.5 * std::log(2.0 * kPi * v2) + (v1 + dm * dm) / (2.0 * v2);
}

// Valid whenever alpha*v2 + (1-alpha)*v1 > 0.
inline double gaussian_renyi_divergence(double m1, double v1, double m2,
                                        double v2, double alpha) {
  const double va = alpha * v2 + (1.0 - alpha) * v1;
  if (!(va > 0.0)) throw std::invalid_argument("variance condition violated");
  const double dm = m1 - m2;
  return 0.5 * std::log(v2 / v1) + std::log(v2 / va) / (2.0 * (alpha - 1.0)) +
         alpha * dm * dm / (2.0 * va);
}

inline double gaussian_renyi_entropy(double v, double alpha) {
  return 0.5 * std::log(2.0 * kPi * v) +
         std::log(alpha) / (2.0 * (alpha - 1.0));
}

}  // namespace oracle
