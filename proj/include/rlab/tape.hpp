#pragma once

#include <cmath>
#include <functional>
#include <utility>
#include <vector>

#include "rlab/tensor.hpp"

namespace rlab {

enum class OpKind {
  Leaf,
  MatMul,
  AddRow,
  Add,
  Sub,
  Mul,
  Neg,
  AddConst,
  MulConst,
  SubFromConst,
  LeakyRelu,
  Tanh,
  Sigmoid,
  Log,
  PowConst,
  AbsPow,
  Clamp,
  Mean,
  Sum,
  Custom,
};

template <typename S>
S sigmoid_scalar(S x) {
  if (primal(x) >= 0.0) {
    const S e = exp(-x);
    return S(1.0) / (S(1.0) + e);
  }
  const S e = exp(x);
  return e / (S(1.0) + e);
}

// Append-only computation graph with cached primal values. Inputs always
// precede outputs, so the node list is already a topological order.
template <typename S = double>
class Tape {
 public:
  struct Node {
    OpKind kind;
    int a = -1, b = -1;
    double c0 = 0.0, c1 = 0.0;
    Tensor<S> value;
    long clamped = 0;
    std::function<void(const Tape&, std::vector<Tensor<S>>&, const Tensor<S>&)>
        custom_backward;
  };

  int leaf(Tensor<S> v) { return push(OpKind::Leaf, -1, -1, std::move(v)); }

  int matmul(int a, int b) {
    const auto& ta = value(a);
    const auto& tb = value(b);
    if (ta.cols != tb.rows)
      throw ShapeMismatch("matmul " + shape_string(ta.rows, ta.cols) + " * " +
                          shape_string(tb.rows, tb.cols));
    Tensor<S> out(ta.rows, tb.cols);
    matmul_accumulate(ta, tb, out);
    return push(OpKind::MatMul, a, b, std::move(out));
  }

  // Broadcast a 1 x n bias over every row.
  int add_row(int a, int bias) {
    const auto& ta = value(a);
    const auto& tb = value(bias);
    if (tb.rows != 1 || tb.cols != ta.cols)
      throw ShapeMismatch("bias must be 1 x cols");
    Tensor<S> out = ta;
    for (int i = 0; i < out.rows; ++i)
      for (int j = 0; j < out.cols; ++j) out.at(i, j) += tb.at(0, j);
    return push(OpKind::AddRow, a, bias, std::move(out));
  }

  int add(int a, int b) { return binary(OpKind::Add, a, b); }
  int sub(int a, int b) { return binary(OpKind::Sub, a, b); }
  int mul(int a, int b) { return binary(OpKind::Mul, a, b); }

  int neg(int a) {
    Tensor<S> out = value(a);
    for (auto& x : out.data) x = -x;
    return push(OpKind::Neg, a, -1, std::move(out));
  }

  int add_const(int a, double c) {
    Tensor<S> out = value(a);
    for (auto& x : out.data) x += S(c);
    return push(OpKind::AddConst, a, -1, std::move(out), c);
  }

  int mul_const(int a, double c) {
    Tensor<S> out = value(a);
    for (auto& x : out.data) x = x * S(c);
    return push(OpKind::MulConst, a, -1, std::move(out), c);
  }

  int sub_from_const(double c, int a) {
    Tensor<S> out = value(a);
    for (auto& x : out.data) x = S(c) - x;
    return push(OpKind::SubFromConst, a, -1, std::move(out), c);
  }

  int leaky_relu(int a, double slope) {
    Tensor<S> out = value(a);
    for (auto& x : out.data)
      if (primal(x) < 0.0) x = x * S(slope);
    return push(OpKind::LeakyRelu, a, -1, std::move(out), slope);
  }

  int tanh(int a) {
    Tensor<S> out = value(a);
    for (auto& x : out.data) x = rlab::tanh(x);
    return push(OpKind::Tanh, a, -1, std::move(out));
  }

  int sigmoid(int a) {
    Tensor<S> out = value(a);
    for (auto& x : out.data) x = sigmoid_scalar(x);
    return push(OpKind::Sigmoid, a, -1, std::move(out));
  }

  int log(int a) {
    Tensor<S> out = value(a);
    for (auto& x : out.data) {
      if (!(primal(x) > 1e-300))
        throw SaturatedDiscriminator("log argument at or below 1e-300");
      x = rlab::log(x);
    }
    return push(OpKind::Log, a, -1, std::move(out));
  }

  // x^e for strictly positive x (callers guarantee positivity).
  int pow_const(int a, double e) {
    Tensor<S> out = value(a);
    for (auto& x : out.data) x = rlab::pow(x, e);
    return push(OpKind::PowConst, a, -1, std::move(out), e);
  }

  // |x|^k for k >= 1; the derivative at 0 uses the positive-side convention.
  int abs_pow(int a, double k) {
    if (!(k >= 1.0)) throw OrderOutOfRange("abs_pow needs k >= 1");
    Tensor<S> out = value(a);
    for (auto& x : out.data)
      x = k == 1.0 ? rlab::abs(x) : rlab::pow(rlab::abs(x), k);
    return push(OpKind::AbsPow, a, -1, std::move(out), k);
  }

  int clamp(int a, double lo, double hi) {
    Tensor<S> out = value(a);
    long clamped = 0;
    for (auto& x : out.data) {
      if (primal(x) < lo) {
        x = S(lo);
        ++clamped;
      } else if (primal(x) > hi) {
        x = S(hi);
        ++clamped;
      }
    }
    const int id = push(OpKind::Clamp, a, -1, std::move(out), lo, hi);
    nodes_[static_cast<std::size_t>(id)].clamped = clamped;
    return id;
  }

  int mean(int a) {
    const auto& ta = value(a);
    S acc{};
    for (const auto& x : ta.data) acc += x;
    return push(OpKind::Mean, a, -1,
                Tensor<S>::scalar(acc * S(1.0 / ta.size())));
  }

  int sum(int a) {
    const auto& ta = value(a);
    S acc{};
    for (const auto& x : ta.data) acc += x;
    return push(OpKind::Sum, a, -1, Tensor<S>::scalar(acc));
  }

  // Node with an externally computed value and a bespoke reverse rule; the
  // callback receives the adjoint buffers and this node's adjoint.
  int custom(Tensor<S> v,
             std::function<void(const Tape&, std::vector<Tensor<S>>&,
                                const Tensor<S>&)>
                 backward_fn) {
    const int id = push(OpKind::Custom, -1, -1, std::move(v));
    nodes_[static_cast<std::size_t>(id)].custom_backward =
        std::move(backward_fn);
    return id;
  }

  const Tensor<S>& value(int id) const {
    return nodes_[static_cast<std::size_t>(id)].value;
  }
  long clamp_count(int id) const {
    return nodes_[static_cast<std::size_t>(id)].clamped;
  }
  std::size_t size() const { return nodes_.size(); }

  // Reverse sweep from a scalar output; returns one adjoint tensor per node
  // (exact zeros for nodes the output does not depend on).
  std::vector<Tensor<S>> backward(int output) const {
    const auto& out = value(output);
    if (out.rows != 1 || out.cols != 1)
      throw NonScalarOutput("backward needs a 1 x 1 output, got " +
                            shape_string(out.rows, out.cols));

    std::vector<Tensor<S>> adj(nodes_.size());
    for (std::size_t i = 0; i < nodes_.size(); ++i)
      adj[i] = Tensor<S>(nodes_[i].value.rows, nodes_[i].value.cols);
    adj[static_cast<std::size_t>(output)][0] = S(1.0);

    for (int i = output; i >= 0; --i) {
      const Node& n = nodes_[static_cast<std::size_t>(i)];
      const Tensor<S>& g = adj[static_cast<std::size_t>(i)];
      switch (n.kind) {
        case OpKind::Leaf:
          break;
        case OpKind::MatMul: {
          matmul_a_bt_accumulate(g, nodes_[n.b].value, adj[n.a]);
          matmul_at_b_accumulate(nodes_[n.a].value, g, adj[n.b]);
          break;
        }
        case OpKind::AddRow: {
          auto& ga = adj[n.a];
          for (std::size_t j = 0; j < g.data.size(); ++j) ga[j] += g[j];
          auto& gb = adj[n.b];
          for (int r = 0; r < g.rows; ++r)
            for (int c = 0; c < g.cols; ++c) gb.at(0, c) += g.at(r, c);
          break;
        }
        case OpKind::Add: {
          accumulate(adj[n.a], g);
          accumulate(adj[n.b], g);
          break;
        }
        case OpKind::Sub: {
          accumulate(adj[n.a], g);
          auto& gb = adj[n.b];
          for (std::size_t j = 0; j < g.data.size(); ++j) gb[j] -= g[j];
          break;
        }
        case OpKind::Mul: {
          auto& ga = adj[n.a];
          auto& gb = adj[n.b];
          const auto& va = nodes_[n.a].value;
          const auto& vb = nodes_[n.b].value;
          for (std::size_t j = 0; j < g.data.size(); ++j) {
            ga[j] += g[j] * vb[j];
            gb[j] += g[j] * va[j];
          }
          break;
        }
        case OpKind::Neg:
        case OpKind::SubFromConst: {
          auto& ga = adj[n.a];
          for (std::size_t j = 0; j < g.data.size(); ++j) ga[j] -= g[j];
          break;
        }
        case OpKind::AddConst:
          accumulate(adj[n.a], g);
          break;
        case OpKind::MulConst: {
          auto& ga = adj[n.a];
          for (std::size_t j = 0; j < g.data.size(); ++j)
            ga[j] += g[j] * S(n.c0);
          break;
        }
        case OpKind::LeakyRelu: {
          auto& ga = adj[n.a];
          const auto& va = nodes_[n.a].value;
          for (std::size_t j = 0; j < g.data.size(); ++j)
            ga[j] += g[j] * S(primal(va[j]) < 0.0 ? n.c0 : 1.0);
          break;
        }
        case OpKind::Tanh: {
          auto& ga = adj[n.a];
          for (std::size_t j = 0; j < g.data.size(); ++j) {
            const S y = n.value[j];
            ga[j] += g[j] * (S(1.0) - y * y);
          }
          break;
        }
        case OpKind::Sigmoid: {
          auto& ga = adj[n.a];
          for (std::size_t j = 0; j < g.data.size(); ++j) {
            const S y = n.value[j];
            ga[j] += g[j] * y * (S(1.0) - y);
          }
          break;
        }
        case OpKind::Log: {
          auto& ga = adj[n.a];
          const auto& va = nodes_[n.a].value;
          for (std::size_t j = 0; j < g.data.size(); ++j)
            ga[j] += g[j] / va[j];
          break;
        }
        case OpKind::PowConst: {
          auto& ga = adj[n.a];
          const auto& va = nodes_[n.a].value;
          for (std::size_t j = 0; j < g.data.size(); ++j)
            ga[j] += g[j] * S(n.c0) * rlab::pow(va[j], n.c0 - 1.0);
          break;
        }
        case OpKind::AbsPow: {
          auto& ga = adj[n.a];
          const auto& va = nodes_[n.a].value;
          for (std::size_t j = 0; j < g.data.size(); ++j) {
            const S x = va[j];
            const double sign = primal(x) < 0.0 ? -1.0 : 1.0;
            if (n.c0 == 1.0) {
              ga[j] += g[j] * S(sign);
            } else {
              ga[j] += g[j] * S(n.c0 * sign) * rlab::pow(rlab::abs(x), n.c0 - 1.0);
            }
          }
          break;
        }
        case OpKind::Clamp: {
          auto& ga = adj[n.a];
          const auto& va = nodes_[n.a].value;
          for (std::size_t j = 0; j < g.data.size(); ++j) {
            const double x = primal(va[j]);
            if (x > n.c0 && x < n.c1) ga[j] += g[j];
          }
          break;
        }
        case OpKind::Mean: {
          auto& ga = adj[n.a];
          const S s = g[0] * S(1.0 / ga.size());
          for (auto& x : ga.data) x += s;
          break;
        }
        case OpKind::Sum: {
          auto& ga = adj[n.a];
          for (auto& x : ga.data) x += g[0];
          break;
        }
        case OpKind::Custom:
          n.custom_backward(*this, adj, g);
          break;
      }
    }
    return adj;
  }

 private:
  int binary(OpKind kind, int a, int b) {
    const auto& ta = value(a);
    const auto& tb = value(b);
    if (!ta.same_shape(tb))
      throw ShapeMismatch("elementwise op on " +
                          shape_string(ta.rows, ta.cols) + " vs " +
                          shape_string(tb.rows, tb.cols));
    Tensor<S> out = ta;
    switch (kind) {
      case OpKind::Add:
        for (std::size_t j = 0; j < out.data.size(); ++j) out[j] += tb[j];
        break;
      case OpKind::Sub:
        for (std::size_t j = 0; j < out.data.size(); ++j) out[j] -= tb[j];
        break;
      case OpKind::Mul:
        for (std::size_t j = 0; j < out.data.size(); ++j)
          out[j] = out[j] * tb[j];
        break;
      default:
        break;
    }
    return push(kind, a, b, std::move(out));
  }

  static void accumulate(Tensor<S>& dst, const Tensor<S>& src) {
    for (std::size_t j = 0; j < src.data.size(); ++j) dst[j] += src[j];
  }

  int push(OpKind kind, int a, int b, Tensor<S> v, double c0 = 0.0,
           double c1 = 0.0) {
    nodes_.push_back(Node{kind, a, b, c0, c1, std::move(v), 0, nullptr});
    return static_cast<int>(nodes_.size()) - 1;
  }

  std::vector<Node> nodes_;
};

}  // namespace rlab
