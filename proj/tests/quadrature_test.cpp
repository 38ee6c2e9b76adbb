#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "rlab/quadrature.hpp"

using Catch::Matchers::WithinAbs;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("polynomials are integrated to machine precision") {
  auto cubic = [](double x) { return x * x * x + x * x + x - 1.0; };
  CHECK_THAT(rlab::integrate(cubic, 0.0, 1.0), WithinAbs(1.0 / 12.0, 1e-14));
}

TEST_CASE("smooth transcendental integrands") {
  CHECK_THAT(rlab::integrate([](double x) { return std::sin(x); }, 0.0, kPi),
             WithinAbs(2.0, 1e-12));
  CHECK_THAT(
      rlab::integrate([](double x) { return std::exp(-x * x); }, -8.0, 8.0),
      WithinAbs(std::sqrt(kPi), 1e-12));
}

TEST_CASE("kinked integrand converges via subdivision") {
  auto kink = [](double x) { return std::abs(x - 0.3141); };
  const double a = 0.3141;
  const double expected = 0.5 * (a * a + (1.0 - a) * (1.0 - a));
  CHECK_THAT(rlab::integrate(kink, 0.0, 1.0), WithinAbs(expected, 1e-9));
}

TEST_CASE("narrow peak requires adaptivity") {
  // Gaussian of width 1e-3 inside a unit interval.
  const double s = 1e-3;
  auto peak = [&](double x) {
    const double z = (x - 0.5) / s;
    return std::exp(-0.5 * z * z) / (s * std::sqrt(2.0 * kPi));
  };
  CHECK_THAT(rlab::integrate(peak, 0.0, 1.0), WithinAbs(1.0, 1e-9));
}

TEST_CASE("breakpoints make piecewise-constant integrands exact") {
  std::vector<double> pts = {0.0, 0.25, 0.5, 1.0};
  auto step = [](double x) { return x < 0.25 ? 2.0 : (x < 0.5 ? 0.0 : 1.0); };
  CHECK_THAT(rlab::integrate(step, std::span<const double>(pts)),
             WithinAbs(2.0 * 0.25 + 0.5, 1e-14));
}

TEST_CASE("subdivision limit reports non-convergence") {
  rlab::QuadratureConfig tight;
  tight.abs_tol = 1e-300;
  tight.rel_tol = 1e-16;
  tight.max_subdivisions = 4;
  auto wiggle = [](double x) { return std::sin(300.0 * x) / (1e-3 + x * x); };
  CHECK_THROWS_AS(rlab::integrate(wiggle, 0.0, 1.0, tight),
                  rlab::QuadratureNonConvergence);
}

TEST_CASE("non-finite integrand is reported as divergence") {
  auto bad = [](double x) { return std::exp(1000.0 / (x + 0.01)); };
  CHECK_THROWS_AS(rlab::integrate(bad, 0.0, 1.0),
                  rlab::IntegralDiverges);
}

TEST_CASE("invalid configuration is rejected") {
  rlab::QuadratureConfig cfg;
  cfg.abs_tol = 0.0;
  CHECK_THROWS_AS(rlab::integrate([](double) { return 1.0; }, 0.0, 1.0, cfg),
                  rlab::ConfigInvalid);
}
