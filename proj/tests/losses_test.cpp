#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "rlab/losses.hpp"
#include "rlab/rng.hpp"

using Catch::Matchers::WithinAbs;
using rlab::LkganParams;
using rlab::Order;
using rlab::Tape;
using rlab::Tensor;

namespace {

int batch_leaf(Tape<double>& t, std::vector<double> values) {
  const int m = static_cast<int>(values.size());
  return t.leaf(Tensor<double>(m, 1, std::move(values)));
}

double lk_disc(std::vector<double> real, std::vector<double> fake,
               const LkganParams& p) {
  Tape<double> t;
  return t.value(rlab::lkgan_disc_loss(t, batch_leaf(t, std::move(real)),
                                       batch_leaf(t, std::move(fake)), p))[0];
}

double lk_gen(std::vector<double> fake, const LkganParams& p) {
  Tape<double> t;
  return t.value(rlab::lkgan_gen_loss(t, batch_leaf(t, std::move(fake)), p))[0];
}

double gan_disc(std::vector<double> real, std::vector<double> fake) {
  Tape<double> t;
  return t.value(rlab::gan_disc_loss(t, batch_leaf(t, std::move(real)),
                                     batch_leaf(t, std::move(fake))))[0];
}

double renyi_gen(std::vector<double> fake, double alpha, bool l1) {
  Tape<double> t;
  return t.value(rlab::renyigan_gen_loss(t, batch_leaf(t, std::move(fake)),
                                         Order::renyi(alpha), l1))[0];
}

}  // namespace

TEST_CASE("named parameter versions") {
  const auto v1 = LkganParams::v1(1.0);
  CHECK(v1.a == 0.6);
  CHECK(v1.b == 0.4);
  CHECK(v1.c == 0.5);
  const auto v2 = LkganParams::v2(2.0);
  CHECK(v2.a == 1.0);
  CHECK(v2.b == 0.0);
  const auto v3 = LkganParams::v3(3.0);
  CHECK(v3.b == 1.0);
  CHECK(v3.c == 1.0);
  CHECK_THROWS_AS(LkganParams{0.5}.validate(), rlab::OrderOutOfRange);
  CHECK_THROWS_AS((LkganParams{2.0, 1.5, 0.0, 0.5}).validate(),
                  rlab::ConfigInvalid);
}

TEST_CASE("least-kth-order discriminator loss") {
  const auto v1 = LkganParams::v1(1.0);
  CHECK_THAT(lk_disc({v1.b, v1.b}, {v1.a, v1.a}, v1), WithinAbs(0.0, 1e-15));

  const auto v2 = LkganParams::v2(1.0);
  CHECK_THAT(lk_disc({0.5, 0.5}, {0.5, 0.5}, v2), WithinAbs(0.25, 1e-15));

  // per-sample hand summation: [((0-0)^2 + (0.2)^2)/2 + 0]/2 ... = 0.01
  CHECK_THAT(lk_disc({0.4, 0.6}, {0.6, 0.6}, v1), WithinAbs(0.01, 1e-15));

  Tape<double> t;
  CHECK_THROWS_AS(rlab::lkgan_disc_loss(t, batch_leaf(t, {0.5, 0.5}),
                                        batch_leaf(t, {0.5}), v1),
                  rlab::BatchLengthMismatch);
}

TEST_CASE("least-kth-order generator loss") {
  const auto v2k1 = LkganParams::v2(1.0);
  CHECK_THAT(lk_gen({v2k1.c, v2k1.c, v2k1.c}, v2k1), WithinAbs(0.0, 1e-15));
  CHECK_THAT(lk_gen({0.25, 0.75}, v2k1), WithinAbs(0.25, 1e-15));

  const auto v2k3 = LkganParams::v2(3.0);
  CHECK_THAT(lk_gen({0.25, 0.75}, v2k3), WithinAbs(0.015625, 1e-15));

  // k = 2 recovers the least-squares (mean squared error) objective
  rlab::Rng rng(5);
  const auto v2k2 = LkganParams::v2(2.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> fake(8);
    double mse = 0.0;
    for (auto& d : fake) {
      d = rng.uniform(0.01, 0.99);
      mse += (d - v2k2.c) * (d - v2k2.c);
    }
    mse /= static_cast<double>(fake.size());
    CHECK_THAT(lk_gen(fake, v2k2), WithinAbs(mse, 1e-15));
  }

  // real-sample term is computed (for logging) but not a tape node
  CHECK_THAT(rlab::lkgan_gen_real_term(Tensor<double>(2, 1, {0.25, 0.75}),
                                       v2k1),
             WithinAbs(0.25, 1e-15));
}

TEST_CASE("classical discriminator loss") {
  CHECK_THAT(gan_disc({0.5, 0.5}, {0.5, 0.5}),
             WithinAbs(2.0 * std::log(2.0), 1e-15));
  CHECK_THAT(gan_disc({1.0 - 1e-8}, {1e-8}), WithinAbs(0.0, 1e-6));
  CHECK_THAT(gan_disc({0.9}, {0.1}), WithinAbs(-2.0 * std::log(0.9), 1e-15));
  CHECK_THAT(gan_disc({0.9}, {0.1}), WithinAbs(0.210721, 1e-6));

  Tape<double> t;
  CHECK_THROWS_AS(
      rlab::gan_disc_loss(t, batch_leaf(t, {1e-310}), batch_leaf(t, {0.5})),
      rlab::SaturatedDiscriminator);
}

TEST_CASE("Renyi generator loss") {
  // equilibrium labelling 1/2 zeroes the L1 objective for any order
  for (double a : {0.5, 2.0, 3.0, 9.0}) {
    CHECK_THAT(renyi_gen({0.5, 0.5, 0.5}, a, true), WithinAbs(0.0, 1e-12));
  }

  CHECK_THAT(renyi_gen({0.5, 0.5}, 3.0, false),
             WithinAbs(-std::log(2.0), 1e-15));

  // (1/2) log((0.8^2 + 0.2^2)/2)
  CHECK_THAT(renyi_gen({0.2, 0.8}, 3.0, false),
             WithinAbs(0.5 * std::log(0.34), 1e-15));
  CHECK_THAT(renyi_gen({0.2, 0.8}, 3.0, false), WithinAbs(-0.539405, 1e-6));

  CHECK_THROWS_AS(renyi_gen({0.5}, 1.0, false), rlab::OrderOutOfRange);
  CHECK_THROWS_AS(renyi_gen({1.0}, 3.0, false), rlab::SaturatedDiscriminator);
}

TEST_CASE("Renyi generator loss approaches the log-mean as alpha -> 1",
          "[property]") {
  rlab::Rng rng(88);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> fake(16);
    double log_mean = 0.0;
    for (auto& d : fake) {
      d = rng.uniform(0.05, 0.95);
      log_mean += std::log(1.0 - d);
    }
    log_mean /= static_cast<double>(fake.size());
    for (double eps : {1e-4, -1e-4}) {
      CHECK_THAT(renyi_gen(fake, 1.0 + eps, false),
                 WithinAbs(log_mean, 1e-3));
    }
  }
}

TEST_CASE("loss gradients match finite differences", "[property]") {
  rlab::Rng rng(404);
  auto fd_check = [&](auto&& value_of, std::vector<double> d0) {
    Tape<double> t;
    const int leaf = batch_leaf(t, d0);
    const auto adj = t.backward(value_of(t, leaf));
    for (std::size_t j = 0; j < d0.size(); ++j) {
      const double h = 1e-6;
      auto up = d0, down = d0;
      up[j] += h;
      down[j] -= h;
      Tape<double> tu, td;
      const double fd = (tu.value(value_of(tu, batch_leaf(tu, up)))[0] -
                         td.value(value_of(td, batch_leaf(td, down)))[0]) /
                        (2.0 * h);
      CHECK_THAT(adj[leaf][j], WithinAbs(fd, 1e-6 + 1e-5 * std::abs(fd)));
    }
  };

  for (int trial = 0; trial < 8; ++trial) {
    std::vector<double> d(6);
    for (auto& x : d) x = rng.uniform(0.1, 0.9);

    const auto params = LkganParams::v1(1.0 + rng.uniform(0.0, 2.0));
    fd_check([&](Tape<double>& t, int leaf) {
      return rlab::lkgan_gen_loss(t, leaf, params);
    }, d);
    const double a = trial % 2 == 0 ? 3.0 : 0.5;
    fd_check([&](Tape<double>& t, int leaf) {
      return rlab::renyigan_gen_loss(t, leaf, Order::renyi(a), trial % 3 == 0);
    }, d);
    fd_check([&](Tape<double>& t, int leaf) {
      return rlab::gan_gen_loss(t, leaf);
    }, d);
  }
}

TEST_CASE("gradient penalty over a batch") {
  rlab::Rng rng(31);

  // linear logit D = sigmoid(w . x): penalty is coefficient * ||w||^2
  rlab::Mlp net({{2, 1, rlab::Activation::Sigmoid, 0.2, true}});
  net.params()[0].at(0, 0) = 1.0;
  net.params()[0].at(1, 0) = 2.0;
  Tensor<double> batch(5, 2);
  for (auto& v : batch.data) v = rng.uniform(-2.0, 2.0);
  rlab::PenaltyConfig cfg{true, 5.0};
  Tape<double> t;
  const auto leaves = rlab::register_params(t, net);
  const int p = rlab::gradient_penalty(t, leaves, net, batch, cfg);
  CHECK_THAT(t.value(p)[0], WithinAbs(25.0, 1e-10));

  // disabled penalties cannot be built
  Tape<double> t2;
  const auto leaves2 = rlab::register_params(t2, net);
  CHECK_THROWS_AS(
      rlab::gradient_penalty(t2, leaves2, net, batch, {false, 5.0}),
      rlab::ConfigInvalid);

  // random discriminator agrees with the finite-difference logit gradients
  rlab::Mlp rnd = rlab::Mlp::gaussian_init(rlab::discriminator_layers(2, 6, 2),
                                           rng, 0.4);
  Tensor<double> x(3, 2);
  for (auto& v : x.data) v = rng.uniform(-1.0, 1.0);
  Tape<double> t3;
  const auto leaves3 = rlab::register_params(t3, rnd);
  const int node = rlab::gradient_penalty(t3, leaves3, rnd, x, cfg);

  double fd_mean = 0.0;
  const double h = 1e-6;
  auto logit = [&](double x0, double x1) {
    const double d = rnd.eval_scalar({x0, x1});
    return std::log(d) - std::log(1.0 - d);
  };
  for (int r = 0; r < x.rows; ++r) {
    const double gx =
        (logit(x.at(r, 0) + h, x.at(r, 1)) - logit(x.at(r, 0) - h, x.at(r, 1))) /
        (2.0 * h);
    const double gy =
        (logit(x.at(r, 0), x.at(r, 1) + h) - logit(x.at(r, 0), x.at(r, 1) - h)) /
        (2.0 * h);
    fd_mean += gx * gx + gy * gy;
  }
  fd_mean = cfg.coefficient * fd_mean / x.rows;
  const double got = t3.value(node)[0];
  CHECK(std::abs(got - fd_mean) / std::max(std::abs(fd_mean), 1e-8) < 1e-4);
}

TEST_CASE("alpha schedule") {
  using rlab::AlphaSchedule;
  using rlab::schedule_alpha;

  // the positivity floor catches beta1 = 0 at epoch 0
  CHECK_THAT(schedule_alpha({0.0, 3.0}, 0, 250).value(),
             WithinAbs(1e-3, 1e-15));
  // sweeps start at beta1
  CHECK_THAT(schedule_alpha({1.1, 4.0}, 0, 250).value(),
             WithinAbs(1.1, 1e-15));
  // linear interpolation across epochs
  CHECK_THAT(schedule_alpha({0.0, 3.0}, 125, 250).value(),
             WithinAbs(3.0 * 125.0 / 249.0, 1e-12));
  // endpoint reaches beta2
  CHECK_THAT(schedule_alpha({0.0, 3.0}, 249, 250).value(),
             WithinAbs(3.0, 1e-15));
  // displacement around alpha = 1, preserving the side; exactly 1 goes up
  CHECK_THAT(schedule_alpha({0.0, 1.9999998}, 1, 3).value(),
             WithinAbs(1.0 - 1e-3, 1e-15));
  CHECK_THAT(schedule_alpha({0.0, 2.0000002}, 1, 3).value(),
             WithinAbs(1.0 + 1e-3, 1e-15));
  CHECK_THAT(schedule_alpha({0.0, 2.0}, 1, 3).value(),
             WithinAbs(1.0 + 1e-3, 1e-15));
  // single-epoch schedules sit at beta1
  CHECK_THAT(schedule_alpha({2.0, 3.0}, 0, 1).value(), WithinAbs(2.0, 1e-15));

  CHECK_THROWS_AS(schedule_alpha({2.0, 1.0}, 0, 10), rlab::InvalidInterval);
  CHECK_THROWS_AS(schedule_alpha({0.0, 3.0}, 10, 10), rlab::InvalidInterval);
}
