#pragma once

#include <utility>
#include <vector>

#include "rlab/mlp.hpp"

// Squared input-gradient norm of the discriminator logit, differentiable
// w.r.t. the discriminator parameters. First derivatives come from a plain
// reverse pass over a nested tape; the parameter gradient of the penalty
// itself comes from a dual-number tangent pushed through the same reverse
// pass (forward-over-reverse), seeded with the input gradient.

namespace rlab {
namespace detail {

// log(D(x) / (1 - D(x))) with a saturation guard.
template <typename S>
int logit_node(Tape<S>& tape, const std::vector<int>& param_leaves,
               const Mlp& net, int x) {
  if (!net.is_discriminator())
    throw ShapeMismatch("logit needs a scalar sigmoid discriminator");
  const int d = mlp_forward(tape, param_leaves, net, x);
  for (const auto& v : tape.value(d).data) {
    const double dv = primal(v);
    if (dv <= 1e-12 || dv >= 1.0 - 1e-12)
      throw SaturatedDiscriminator(
          "discriminator output within 1e-12 of 0 or 1");
  }
  return tape.sub(tape.log(d), tape.log(tape.sub_from_const(1.0, d)));
}

struct LogitGradients {
  Tensor<double> grad_x;    // m x d, row i is the input gradient at sample i
  double mean_norm_sq = 0;  // (1/m) sum_i ||row_i||^2
};

// Rows of the batch pass through the network independently, so one reverse
// sweep from sum(logit) yields every per-sample input gradient at once.
inline LogitGradients logit_input_gradients(const Mlp& net,
                                            const Tensor<double>& x) {
  Tape<double> tape;
  const int xn = tape.leaf(x);
  const auto leaves = register_params(tape, net);
  const int total = tape.sum(logit_node(tape, leaves, net, xn));
  const auto adj = tape.backward(total);
  LogitGradients out;
  out.grad_x = adj[static_cast<std::size_t>(xn)];
  double s = 0.0;
  for (double v : out.grad_x.data) s += v * v;
  out.mean_norm_sq = s / x.rows;
  return out;
}

// Tangent part of the parameter adjoints when the inputs carry tangent u:
// the mixed second derivative (d/d theta)(u . grad_x logit), summed over the
// batch rows.
inline std::vector<Tensor<double>> logit_param_tangents(
    const Mlp& net, const Tensor<double>& x, const Tensor<double>& u) {
  Tape<Dual> tape;
  Tensor<Dual> seeded(x.rows, x.cols);
  for (std::size_t i = 0; i < x.data.size(); ++i)
    seeded[i] = Dual(x.data[i], u.data[i]);
  const int xn = tape.leaf(std::move(seeded));
  const auto leaves = register_params(tape, net);
  const int total = tape.sum(logit_node(tape, leaves, net, xn));
  const auto adj = tape.backward(total);
  std::vector<Tensor<double>> tangents;
  tangents.reserve(leaves.size());
  for (int leaf : leaves) {
    const auto& a = adj[static_cast<std::size_t>(leaf)];
    Tensor<double> t(a.rows, a.cols);
    for (std::size_t i = 0; i < a.data.size(); ++i) t[i] = a[i].t;
    tangents.push_back(std::move(t));
  }
  return tangents;
}

// Discriminator with parameters refreshed from the tape leaves.
inline Mlp snapshot_from_leaves(const Tape<double>& tape, const Mlp& net,
                                const std::vector<int>& param_leaves) {
  Mlp snap = net;
  for (std::size_t i = 0; i < param_leaves.size(); ++i)
    snap.params()[i] = tape.value(param_leaves[i]);
  return snap;
}

}  // namespace detail

// coefficient * (1/m) sum_i ||grad_x logit(D(x_i))||^2 as a scalar node whose
// reverse rule accumulates into the given parameter leaves.
inline int input_gradient_norm_sq(Tape<double>& tape,
                                  const std::vector<int>& param_leaves,
                                  const Mlp& net, const Tensor<double>& x,
                                  double coefficient = 1.0) {
  if (param_leaves.size() != net.params().size())
    throw ShapeMismatch("parameter leaves do not match the network");
  const Mlp snap = detail::snapshot_from_leaves(tape, net, param_leaves);
  auto fw = detail::logit_input_gradients(snap, x);
  const double value = coefficient * fw.mean_norm_sq;
  const int m = x.rows;
  return tape.custom(
      Tensor<double>::scalar(value),
      [param_leaves, net, x, u = std::move(fw.grad_x), coefficient, m](
          const Tape<double>& t, std::vector<Tensor<double>>& adj,
          const Tensor<double>& g) {
        const Mlp inner = detail::snapshot_from_leaves(t, net, param_leaves);
        const auto tangents = detail::logit_param_tangents(inner, x, u);
        const double scale = g[0] * coefficient * 2.0 / m;
        for (std::size_t i = 0; i < param_leaves.size(); ++i) {
          auto& dst = adj[static_cast<std::size_t>(param_leaves[i])];
          for (std::size_t j = 0; j < dst.data.size(); ++j)
            dst[j] += scale * tangents[i][j];
        }
      });
}

}  // namespace rlab
