#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <vector>

#include "rlab/adam.hpp"
#include "rlab/mlp.hpp"
#include "rlab/penalty.hpp"
#include "rlab/rng.hpp"
#include "rlab/tape.hpp"

using Catch::Matchers::WithinAbs;
using rlab::Activation;
using rlab::LayerSpec;
using rlab::Mlp;
using rlab::Tape;
using rlab::Tensor;

namespace {

double rel_error(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-8});
}

// Central finite differences of a scalar function of the network parameters.
template <typename F>
std::vector<Tensor<double>> fd_param_gradient(Mlp& net, F&& loss, double h) {
  std::vector<Tensor<double>> grads;
  for (auto& p : net.params()) {
    Tensor<double> g(p.rows, p.cols);
    for (std::size_t j = 0; j < p.data.size(); ++j) {
      const double keep = p.data[j];
      p.data[j] = keep + h;
      const double up = loss(net);
      p.data[j] = keep - h;
      const double down = loss(net);
      p.data[j] = keep;
      g[j] = (up - down) / (2.0 * h);
    }
    grads.push_back(std::move(g));
  }
  return grads;
}

Mlp random_net(rlab::Rng& rng, std::vector<LayerSpec> specs,
               double scale = 0.6) {
  Mlp net(std::move(specs));
  for (auto& p : net.params())
    for (auto& w : p.data) w = rng.uniform(-scale, scale);
  return net;
}

}  // namespace

TEST_CASE("forward matches elementwise definitions") {
  // identity network passes the batch through
  Mlp id({{2, 2, Activation::Identity, 0.2, true}});
  id.params()[0].at(0, 0) = 1.0;
  id.params()[0].at(1, 1) = 1.0;
  const auto out = id.eval(Tensor<double>(1, 2, {1.0, 2.0}));
  CHECK(out[0] == 1.0);
  CHECK(out[1] == 2.0);

  // zero-weight sigmoid unit answers 1/2 everywhere
  Mlp half({{3, 1, Activation::Sigmoid, 0.2, true}});
  CHECK(half.eval(Tensor<double>(1, 3, {4.0, -7.0, 0.1}))[0] == 0.5);

  // leaky slope applies only on the negative side
  Mlp leaky({{2, 2, Activation::LeakyRelu, 0.2, true}});
  leaky.params()[0].at(0, 0) = 1.0;
  leaky.params()[0].at(1, 1) = 1.0;
  const auto lk = leaky.eval(Tensor<double>(1, 2, {-1.0, 3.0}));
  CHECK_THAT(lk[0], WithinAbs(-0.2, 1e-15));
  CHECK_THAT(lk[1], WithinAbs(3.0, 1e-15));

  CHECK_THROWS_AS(id.eval(Tensor<double>(1, 3, {1.0, 2.0, 3.0})),
                  rlab::ShapeMismatch);
}

TEST_CASE("backward on scalar compositions") {
  // d/dw w^2 at w = 3
  {
    Tape<double> t;
    const int w = t.leaf(Tensor<double>::scalar(3.0));
    const int y = t.abs_pow(w, 2.0);
    const auto adj = t.backward(y);
    CHECK_THAT(adj[w][0], WithinAbs(6.0, 1e-12));
  }
  // d/dw log(sigmoid(w)) at w = 0 is sigma'(0)/sigma(0) = 0.25/0.5
  {
    Tape<double> t;
    const int w = t.leaf(Tensor<double>::scalar(0.0));
    const int y = t.log(t.sigmoid(w));
    const auto adj = t.backward(y);
    CHECK_THAT(adj[w][0], WithinAbs(0.5, 1e-12));
  }
  // untouched leaves receive exact zeros
  {
    Tape<double> t;
    const int w = t.leaf(Tensor<double>::scalar(2.0));
    const int unused = t.leaf(Tensor<double>(2, 2));
    const auto adj = t.backward(t.abs_pow(w, 2.0));
    for (double v : adj[unused].data) CHECK(v == 0.0);
  }
  // non-scalar outputs are rejected
  {
    Tape<double> t;
    const int w = t.leaf(Tensor<double>(1, 2, {1.0, 2.0}));
    CHECK_THROWS_AS(t.backward(w), rlab::NonScalarOutput);
  }
}

TEST_CASE("reverse-mode gradients match finite differences", "[property]") {
  rlab::Rng rng(2024);
  const double h = 1e-5;
  int checked = 0;
  while (checked < 50) {
    const int in = 2 + static_cast<int>(rng.index(3));
    const int hidden = 3 + static_cast<int>(rng.index(5));
    const Activation acts[] = {Activation::Tanh, Activation::Sigmoid,
                               Activation::LeakyRelu};
    const Activation mid = acts[rng.index(3)];
    Mlp net = random_net(
        rng, {{in, hidden, mid, 0.2, true},
              {hidden, hidden, Activation::Tanh, 0.2, true},
              {hidden, 1, Activation::Sigmoid, 0.2, true}});

    Tensor<double> batch(3, in);
    for (auto& x : batch.data) x = rng.uniform(-1.0, 1.0);

    // keep leaky preactivations away from the kink so FD stays two-sided
    if (mid == Activation::LeakyRelu) {
      Tensor<double> pre(batch.rows, hidden);
      rlab::matmul_accumulate(batch, net.params()[0], pre);
      bool near_kink = false;
      for (int r = 0; r < pre.rows; ++r)
        for (int c = 0; c < pre.cols; ++c)
          if (std::abs(pre.at(r, c) + net.params()[1].at(0, c)) < 1e-3)
            near_kink = true;
      if (near_kink) continue;
    }

    auto loss = [&batch](const Mlp& m) {
      Tape<double> t;
      const auto leaves = rlab::register_params(t, m);
      const int out = rlab::mlp_forward(t, leaves, m, t.leaf(batch));
      return t.value(t.mean(t.abs_pow(t.add_const(out, -0.3), 2.0)))[0];
    };

    Tape<double> t;
    const auto leaves = rlab::register_params(t, net);
    const int out = rlab::mlp_forward(t, leaves, net, t.leaf(batch));
    const int l = t.mean(t.abs_pow(t.add_const(out, -0.3), 2.0));
    const auto adj = t.backward(l);
    const auto fd = fd_param_gradient(net, loss, h);

    for (std::size_t p = 0; p < fd.size(); ++p)
      for (std::size_t j = 0; j < fd[p].data.size(); ++j)
        CHECK(rel_error(adj[leaves[p]][j], fd[p][j]) < 1e-5);
    ++checked;
  }
}

TEST_CASE("input gradient norm of the logit") {
  // constant discriminator: zero penalty, finite parameter gradient
  {
    Mlp net({{2, 1, Activation::Sigmoid, 0.2, true}});
    Tape<double> t;
    const auto leaves = rlab::register_params(t, net);
    Tensor<double> x(1, 2, {0.3, -0.4});
    const int p = rlab::input_gradient_norm_sq(t, leaves, net, x);
    CHECK(t.value(p)[0] == 0.0);
    const auto adj = t.backward(p);
    for (int leaf : leaves)
      for (double v : adj[leaf].data) CHECK(std::isfinite(v));
  }
  // linear logit: the norm is ||w||^2 for every input
  {
    Mlp net({{2, 1, Activation::Sigmoid, 0.2, true}});
    net.params()[0].at(0, 0) = 3.0;
    net.params()[0].at(1, 0) = 4.0;
    Tape<double> t;
    const auto leaves = rlab::register_params(t, net);
    for (double ax : {-1.0, 0.0, 2.5}) {
      Tensor<double> x(1, 2, {ax, 0.5 * ax - 1.0});
      const int p = rlab::input_gradient_norm_sq(t, leaves, net, x);
      CHECK_THAT(t.value(p)[0], WithinAbs(25.0, 1e-10));
    }
  }
  // saturated discriminator is rejected
  {
    Mlp net({{1, 1, Activation::Sigmoid, 0.2, true}});
    net.params()[0].at(0, 0) = 100.0;
    Tape<double> t;
    const auto leaves = rlab::register_params(t, net);
    Tensor<double> x(1, 1, {1.0});
    CHECK_THROWS_AS(rlab::input_gradient_norm_sq(t, leaves, net, x),
                    rlab::SaturatedDiscriminator);
  }
}

TEST_CASE("penalty parameter gradient matches finite differences",
          "[property]") {
  rlab::Rng rng(515);
  for (int trial = 0; trial < 12; ++trial) {
    Mlp net = random_net(rng, rlab::discriminator_layers(2, 5, 2), 0.5);
    Tensor<double> x(4, 2);
    for (auto& v : x.data) v = rng.uniform(-1.5, 1.5);

    Tape<double> t;
    const auto leaves = rlab::register_params(t, net);
    const int p = rlab::input_gradient_norm_sq(t, leaves, net, x);
    const auto adj = t.backward(p);

    auto penalty_value = [&x](const Mlp& m) {
      return rlab::detail::logit_input_gradients(m, x).mean_norm_sq;
    };
    const auto fd = fd_param_gradient(net, penalty_value, 1e-5);
    for (std::size_t pi = 0; pi < fd.size(); ++pi)
      for (std::size_t j = 0; j < fd[pi].data.size(); ++j)
        CHECK(rel_error(adj[leaves[pi]][j], fd[pi][j]) < 1e-4);
  }
}

TEST_CASE("Adam optimizer") {
  // zero gradients leave parameters untouched
  {
    Mlp net({{2, 2, Activation::Identity, 0.2, true}});
    rlab::AdamState state({}, net.params());
    const auto before = net.params();
    std::vector<Tensor<double>> zeros{Tensor<double>(2, 2),
                                      Tensor<double>(1, 2)};
    rlab::adam_step(state, net.params(), zeros);
    for (std::size_t i = 0; i < before.size(); ++i)
      CHECK(net.params()[i].data == before[i].data);
  }
  // first step with unit gradient moves by ~lr
  {
    rlab::AdamConfig cfg;
    cfg.learning_rate = 0.1;
    std::vector<Tensor<double>> params{Tensor<double>::scalar(1.0)};
    rlab::AdamState state(cfg, params);
    std::vector<Tensor<double>> grads{Tensor<double>::scalar(1.0)};
    rlab::adam_step(state, params, grads);
    CHECK_THAT(params[0][0], WithinAbs(0.9, 1e-6));
  }
  // 100 steps on f(w) = w^2 converge towards 0
  {
    rlab::AdamConfig cfg;
    cfg.learning_rate = 0.1;
    std::vector<Tensor<double>> params{Tensor<double>::scalar(1.0)};
    rlab::AdamState state(cfg, params);
    for (int i = 0; i < 100; ++i) {
      std::vector<Tensor<double>> grads{
          Tensor<double>::scalar(2.0 * params[0][0])};
      rlab::adam_step(state, params, grads);
    }
    CHECK(std::abs(params[0][0]) < 0.05);
  }
  CHECK_THROWS_AS(
      [] {
        std::vector<Tensor<double>> params{Tensor<double>::scalar(1.0)};
        rlab::AdamState state({}, params);
        std::vector<Tensor<double>> bad{Tensor<double>(1, 2, {1.0, 2.0})};
        rlab::adam_step(state, params, bad);
      }(),
      rlab::ShapeMismatch);
}

TEST_CASE("parameter trajectories are reproducible") {
  auto run = [] {
    rlab::Rng rng(99);
    Mlp net = Mlp::gaussian_init(rlab::discriminator_layers(2, 8, 2), rng);
    rlab::AdamState state({}, net.params());
    Tensor<double> batch(4, 2);
    for (int step = 0; step < 20; ++step) {
      for (auto& v : batch.data) v = rng.normal();
      Tape<double> t;
      const auto leaves = rlab::register_params(t, net);
      const int out = rlab::mlp_forward(t, leaves, net, t.leaf(batch));
      const int loss = t.mean(t.abs_pow(t.add_const(out, -0.9), 2.0));
      const auto adj = t.backward(loss);
      std::vector<Tensor<double>> grads;
      for (int leaf : leaves) grads.push_back(adj[leaf]);
      rlab::adam_step(state, net.params(), grads);
    }
    return net;
  };
  const Mlp a = run();
  const Mlp b = run();
  for (std::size_t i = 0; i < a.params().size(); ++i)
    CHECK(a.params()[i].data == b.params()[i].data);
}

TEST_CASE("checkpoints round-trip bit exactly") {
  rlab::Rng rng(7);
  Mlp net = Mlp::gaussian_init(
      rlab::generator_layers(3, 2, 6, 2, Activation::Tanh), rng, 0.7);
  const auto path = std::filesystem::temp_directory_path() / "rlab_ckpt.json";
  net.save(path);
  const Mlp back = Mlp::load(path);
  REQUIRE(back.layers().size() == net.layers().size());
  for (std::size_t i = 0; i < net.params().size(); ++i) {
    REQUIRE(back.params()[i].data.size() == net.params()[i].data.size());
    for (std::size_t j = 0; j < net.params()[i].data.size(); ++j)
      CHECK(back.params()[i].data[j] == net.params()[i].data[j]);
  }
  std::filesystem::remove(path);
}

TEST_CASE("clamp counts saturated entries and gates gradients") {
  Tape<double> t;
  const int x = t.leaf(Tensor<double>(1, 4, {-0.5, 0.3, 0.9, 1.7}));
  const int c = t.clamp(x, 0.0, 1.0);
  CHECK(t.clamp_count(c) == 2);
  const auto adj = t.backward(t.sum(c));
  CHECK(adj[x].data == std::vector<double>{0.0, 1.0, 1.0, 0.0});
}
