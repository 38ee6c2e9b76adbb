#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "rlab/rng.hpp"
#include "rlab/theorems.hpp"

// Built-in deterministic check suite behind the `verify` command: every
// analytic identity evaluated on a fixed set of Gaussian, histogram and
// discrete pairs, reported as (name, lhs, rhs, gap) rows.

namespace rlab {

struct CheckResult {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double gap = 0.0;
};

namespace detail {

struct SuiteInputs {
  std::vector<std::pair<DiscreteDist, DiscreteDist>> discrete;
  std::vector<std::pair<ContinuousDensity, ContinuousDensity>> continuous;
};

inline DiscreteDist suite_discrete(Rng& rng, std::size_t dim, double floor) {
  std::vector<double> w(dim);
  double sum = 0.0;
  for (auto& x : w) {
    x = rng.uniform(floor, 1.0);
    sum += x;
  }
  for (auto& x : w) x /= sum;
  return DiscreteDist(w);
}

inline ContinuousDensity suite_histogram(Rng& rng) {
  std::vector<double> edges;
  for (int i = 0; i <= 12; ++i) edges.push_back(-3.0 + 0.5 * i);
  std::vector<double> masses(12);
  double sum = 0.0;
  for (auto& m : masses) {
    m = rng.uniform(0.1, 1.0);
    sum += m;
  }
  for (auto& m : masses) m /= sum;
  return ContinuousDensity::histogram(edges, masses);
}

inline SuiteInputs suite_inputs() {
  Rng rng(20240615);
  SuiteInputs in;
  for (int i = 0; i < 4; ++i)
    in.discrete.emplace_back(suite_discrete(rng, 8, 0.1),
                             suite_discrete(rng, 8, 0.1));
  in.continuous.emplace_back(ContinuousDensity::gaussian(0.0, 1.0),
                             ContinuousDensity::gaussian(1.0, 1.0));
  in.continuous.emplace_back(ContinuousDensity::gaussian(-0.5, 0.8),
                             ContinuousDensity::gaussian(0.7, 1.3));
  in.continuous.emplace_back(suite_histogram(rng), suite_histogram(rng));
  return in;
}

}  // namespace detail

inline std::vector<CheckResult> run_verify_suite(const std::string& only = "") {
  const auto inputs = detail::suite_inputs();
  std::vector<CheckResult> rows;
  auto wants = [&](const std::string& name) {
    return only.empty() || name.find(only) != std::string::npos;
  };
  auto add_worst = [&](const std::string& name, double lhs, double rhs,
                       CheckResult& acc) {
    const double gap = std::abs(lhs - rhs);
    if (gap >= acc.gap) acc = {name, lhs, rhs, gap};
  };

  // Shannon limits of the Renyi measures on exact (discrete) sums. The
  // off-by-eps orders keep numerical error below the identity tolerance.
  const double eps = 1e-6;
  if (wants("renyi-ce-shannon-limit")) {
    CheckResult acc{"renyi-ce-shannon-limit", 0, 0, 0};
    for (const auto& [p, q] : inputs.discrete) {
      const double h = renyi_cross_entropy_limit(p, q);
      for (double a : {1.0 - eps, 1.0 + eps})
        add_worst(acc.name, renyi_cross_entropy(p, q, Order::renyi(a)), h, acc);
    }
    rows.push_back(acc);
  }
  if (wants("renyi-div-kl-limit")) {
    CheckResult acc{"renyi-div-kl-limit", 0, 0, 0};
    for (const auto& [p, q] : inputs.discrete) {
      const double kl = kl_divergence(p, q);
      for (double a : {1.0 - eps, 1.0 + eps})
        add_worst(acc.name, renyi_divergence(p, q, Order::renyi(a)), kl, acc);
    }
    rows.push_back(acc);
  }
  if (wants("jensen-renyi-jsd-limit")) {
    CheckResult acc{"jensen-renyi-jsd-limit", 0, 0, 0};
    for (const auto& [p, q] : inputs.discrete) {
      const double jsd = jensen_shannon(p, q);
      for (double a : {1.0 - eps, 1.0 + eps})
        add_worst(acc.name, jensen_renyi(p, q, Order::renyi(a)), jsd, acc);
    }
    rows.push_back(acc);
  }

  if (wants("renyi-ce-monotonicity")) {
    const double grid[] = {0.1, 0.5, 0.9, 1.1, 2.0, 3.0, 5.0, 9.0};
    CheckResult acc{"renyi-ce-monotonicity", 0, 0, 0};
    for (const auto& [p, q] : inputs.discrete) {
      double prev = renyi_cross_entropy(p, q, Order::renyi(grid[0]));
      for (std::size_t i = 1; i < std::size(grid); ++i) {
        const double next = renyi_cross_entropy(p, q, Order::renyi(grid[i]));
        const double increase = std::max(0.0, next - prev);
        if (increase >= acc.gap) acc = {acc.name, prev, next, increase};
        prev = next;
      }
    }
    rows.push_back(acc);
  }

  for (const char* version : {"v1", "v2"}) {
    for (double k : {1.0, 2.0, 3.0}) {
      const std::string name =
          std::string("lk-identity-") + version + "-k" + std::to_string(int(k));
      if (!wants(name)) continue;
      const LkganParams params = version[1] == '1' ? LkganParams::v1(k)
                                                   : LkganParams::v2(k);
      CheckResult acc{name, 0, 0, 0};
      for (const auto& [px, pg] : inputs.continuous) {
        const auto r = verify_lkgan_identity(px, pg, params);
        add_worst(name, r.lhs, r.rhs, acc);
      }
      for (const auto& [px, pg] : inputs.discrete) {
        const auto r = verify_lkgan_identity(px, pg, params);
        add_worst(name, r.lhs, r.rhs, acc);
      }
      rows.push_back(acc);
    }
  }

  if (wants("lk-identity-equality")) {
    CheckResult acc{"lk-identity-equality", 0, 0, 0};
    const auto& g = inputs.continuous.front().first;
    const auto same = verify_lkgan_identity(g, g, LkganParams::v1(2.0));
    add_worst(acc.name, same.lhs, 0.0, acc);
    // c = b forces both sides to zero whatever the pair
    const auto& [px, pg] = inputs.continuous[1];
    const auto cb =
        verify_lkgan_identity(px, pg, LkganParams{2.0, 0.5, 0.5, 0.5});
    add_worst(acc.name, cb.lhs, 0.0, acc);
    add_worst(acc.name, cb.rhs, 0.0, acc);
    rows.push_back(acc);
  }

  for (double a : {0.5, 2.0, 3.0, 9.0}) {
    const std::string name = "renyi-identity-a" + std::to_string(a).substr(0, 3);
    if (!wants(name)) continue;
    CheckResult acc{name, 0, 0, 0};
    for (const auto& [px, pg] : inputs.continuous) {
      const auto r = verify_renyigan_identity(px, pg, Order::renyi(a));
      add_worst(name, r.lhs, r.rhs, acc);
    }
    for (const auto& [px, pg] : inputs.discrete) {
      const auto r = verify_renyigan_identity(px, pg, Order::renyi(a));
      add_worst(name, r.lhs, r.rhs, acc);
    }
    rows.push_back(acc);
  }

  if (wants("renyi-identity-equality")) {
    CheckResult acc{"renyi-identity-equality", 0, 0, 0};
    const auto& g = inputs.continuous.front().first;
    for (double a : {0.5, 2.0, 3.0, 9.0}) {
      const auto r = verify_renyigan_identity(g, g, Order::renyi(a));
      add_worst(acc.name, r.lhs, -2.0 * std::log(2.0), acc);
    }
    rows.push_back(acc);
  }

  if (wants("generator-loss-limit")) {
    CheckResult acc{"generator-loss-limit", 0, 0, 0};
    Rng rng(77001);
    for (const auto& [p, q] : inputs.discrete) {
      std::vector<double> d(p.size());
      for (auto& v : d) v = rng.uniform(0.05, 0.95);
      const double gap = verify_generator_limit(d, p, q, eps);
      if (gap >= acc.gap) acc = {acc.name, gap, 0.0, gap};
    }
    rows.push_back(acc);
  }

  if (wants("condition-number-bounded") || wants("condition-number-divergent")) {
    // Uniform p on [0, 1]; q is flat at 0.25 apart from a measure-zero dip
    // at x0 whose level sweeps towards zero.
    const auto p = ContinuousDensity::histogram({0.0, 1.0}, {1.0});
    const double x0 = 0.37;
    auto dipped = [&](double t) {
      return [t, x0](double x) { return x == x0 ? t : 0.25; };
    };
    if (wants("condition-number-bounded")) {
      CheckResult acc{"condition-number-bounded", 0, 0, 0};
      for (double a : {2.0, 3.0, 9.0}) {
        const double denom = std::pow(0.25, a - 1.0);
        const double bound = 1.0 * std::pow(0.25, a - 2.0) / denom;
        for (double t = 1e-2; t >= 1e-12; t *= 1e-2) {
          const double kappa =
              condition_number(p, dipped(t), Order::renyi(a), x0);
          const double excess = std::max(0.0, kappa - bound);
          if (excess >= acc.gap) acc = {acc.name, kappa, bound, excess};
        }
      }
      rows.push_back(acc);
    }
    if (wants("condition-number-divergent")) {
      CheckResult acc{"condition-number-divergent", 0, 1e6, 0};
      bool first = true;
      for (double a : {0.5, 1.5}) {
        double kappa_max = 0.0;
        for (double t = 1e-2; t >= 1e-12; t *= 1e-2)
          kappa_max = std::max(
              kappa_max, condition_number(p, dipped(t), Order::renyi(a), x0));
        const double shortfall = std::max(0.0, (1e6 - kappa_max) / 1e6);
        if (first || shortfall >= acc.gap)
          acc = {acc.name, kappa_max, 1e6, shortfall};
        first = false;
      }
      rows.push_back(acc);
    }
  }

  if (wants("log-inequality-bounds")) {
    CheckResult acc{"log-inequality-bounds", 0, 0, 0};
    Rng rng(11);
    for (int i = 0; i < 200; ++i) {
      const double x = rng.uniform(0.5 + 1e-9, 10.0);
      const double lx = std::log(x);
      const double low_violation = std::max(0.0, (x - 1.0) * (2.0 - x) - lx);
      const double high_violation = std::max(0.0, lx - (x - 1.0));
      const double v = std::max(low_violation, high_violation);
      if (v >= acc.gap) acc = {acc.name, (x - 1.0) * (2.0 - x), lx, v};
    }
    rows.push_back(acc);
  }

  return rows;
}

}  // namespace rlab
