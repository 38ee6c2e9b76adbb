#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "rlab/rng.hpp"
#include "rlab/tape.hpp"

namespace rlab {

enum class Activation { Identity, LeakyRelu, Tanh, Sigmoid };

inline std::string activation_name(Activation a) {
  switch (a) {
    case Activation::Identity: return "identity";
    case Activation::LeakyRelu: return "leaky_relu";
    case Activation::Tanh: return "tanh";
    case Activation::Sigmoid: return "sigmoid";
  }
  return "identity";
}

inline Activation activation_from_name(const std::string& s) {
  if (s == "identity") return Activation::Identity;
  if (s == "leaky_relu") return Activation::LeakyRelu;
  if (s == "tanh") return Activation::Tanh;
  if (s == "sigmoid") return Activation::Sigmoid;
  throw ConfigInvalid("unknown activation '" + s + "'");
}

struct LayerSpec {
  int in = 0;
  int out = 0;
  Activation act = Activation::Identity;
  double leaky_slope = 0.2;
  bool has_bias = true;
};

// Dense feed-forward network. Parameters are stored as [W0, b0, W1, b1, ...]
// with weights of shape in x out and biases 1 x out.
class Mlp {
 public:
  explicit Mlp(std::vector<LayerSpec> layers) : layers_(std::move(layers)) {
    if (layers_.empty()) throw ConfigInvalid("network needs at least a layer");
    for (std::size_t i = 0; i + 1 < layers_.size(); ++i) {
      if (layers_[i].out != layers_[i + 1].in)
        throw ShapeMismatch("layer dimensions do not chain: " +
                            std::to_string(layers_[i].out) + " -> " +
                            std::to_string(layers_[i + 1].in));
    }
    for (const auto& l : layers_) {
      if (l.in < 1 || l.out < 1) throw ConfigInvalid("layer dims must be >= 1");
      params_.emplace_back(l.in, l.out);
      if (l.has_bias) params_.emplace_back(1, l.out);
    }
  }

  static Mlp gaussian_init(std::vector<LayerSpec> layers, Rng& rng,
                           double stddev = 0.01) {
    Mlp net(std::move(layers));
    for (auto& p : net.params_)
      for (auto& w : p.data) w = rng.normal(0.0, stddev);
    return net;
  }

  int input_dim() const { return layers_.front().in; }
  int output_dim() const { return layers_.back().out; }
  const std::vector<LayerSpec>& layers() const { return layers_; }
  std::vector<Tensor<double>>& params() { return params_; }
  const std::vector<Tensor<double>>& params() const { return params_; }

  bool is_discriminator() const {
    return output_dim() == 1 && layers_.back().act == Activation::Sigmoid;
  }

  // Plain forward pass without a tape, for evaluation-only call sites.
  Tensor<double> eval(const Tensor<double>& batch) const {
    if (batch.cols != input_dim() || batch.rows < 1)
      throw ShapeMismatch("batch is " + shape_string(batch.rows, batch.cols) +
                          ", expected m x " + std::to_string(input_dim()));
    Tensor<double> cur = batch;
    std::size_t pi = 0;
    for (const auto& l : layers_) {
      const auto& w = params_[pi++];
      Tensor<double> next(cur.rows, l.out);
      matmul_accumulate(cur, w, next);
      if (l.has_bias) {
        const auto& b = params_[pi++];
        for (int r = 0; r < next.rows; ++r)
          for (int c = 0; c < next.cols; ++c) next.at(r, c) += b.at(0, c);
      }
      switch (l.act) {
        case Activation::Identity:
          break;
        case Activation::LeakyRelu:
          for (auto& x : next.data)
            if (x < 0.0) x *= l.leaky_slope;
          break;
        case Activation::Tanh:
          for (auto& x : next.data) x = std::tanh(x);
          break;
        case Activation::Sigmoid:
          for (auto& x : next.data) x = sigmoid_scalar(x);
          break;
      }
      cur = std::move(next);
    }
    return cur;
  }

  double eval_scalar(const std::vector<double>& x) const {
    Tensor<double> in(1, static_cast<int>(x.size()), x);
    return eval(in)[0];
  }

  nlohmann::json to_json() const {
    nlohmann::json layers = nlohmann::json::array();
    std::size_t pi = 0;
    for (const auto& l : layers_) {
      nlohmann::json layer{{"in", l.in},
                           {"out", l.out},
                           {"activation", activation_name(l.act)},
                           {"leaky_slope", l.leaky_slope}};
      layer["weights"] = params_[pi++].data;
      if (l.has_bias) layer["bias"] = params_[pi++].data;
      layers.push_back(std::move(layer));
    }
    return nlohmann::json{
        {"format", "rlab-mlp"}, {"version", 1}, {"layers", std::move(layers)}};
  }

  static Mlp from_json(const nlohmann::json& j) {
    if (!j.is_object() || j.value("format", "") != "rlab-mlp")
      throw ConfigInvalid("not an rlab-mlp checkpoint");
    if (j.value("version", 0) != 1)
      throw ConfigInvalid("unsupported checkpoint version");
    std::vector<LayerSpec> specs;
    for (const auto& layer : j.at("layers")) {
      LayerSpec l;
      l.in = layer.at("in").get<int>();
      l.out = layer.at("out").get<int>();
      l.act = activation_from_name(layer.at("activation").get<std::string>());
      l.leaky_slope = layer.value("leaky_slope", 0.2);
      l.has_bias = layer.contains("bias");
      specs.push_back(l);
    }
    Mlp net(std::move(specs));
    std::size_t pi = 0;
    for (const auto& layer : j.at("layers")) {
      auto w = layer.at("weights").get<std::vector<double>>();
      if (w.size() != net.params_[pi].data.size())
        throw ConfigInvalid("checkpoint weight count mismatch");
      net.params_[pi++].data = std::move(w);
      if (layer.contains("bias")) {
        auto b = layer.at("bias").get<std::vector<double>>();
        if (b.size() != net.params_[pi].data.size())
          throw ConfigInvalid("checkpoint bias count mismatch");
        net.params_[pi++].data = std::move(b);
      }
    }
    return net;
  }

  void save(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw ConfigInvalid("cannot write " + path.string());
    out << to_json().dump(2) << '\n';
  }

  static Mlp load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigInvalid("cannot read " + path.string());
    nlohmann::json j;
    in >> j;
    return from_json(j);
  }

 private:
  std::vector<LayerSpec> layers_;
  std::vector<Tensor<double>> params_;
};

// Registers every parameter as a tape leaf; returns the leaf ids in
// parameter order.
template <typename S>
std::vector<int> register_params(Tape<S>& tape, const Mlp& net) {
  std::vector<int> leaves;
  leaves.reserve(net.params().size());
  for (const auto& p : net.params()) {
    Tensor<S> v(p.rows, p.cols);
    for (std::size_t i = 0; i < p.data.size(); ++i) v[i] = S(p.data[i]);
    leaves.push_back(tape.leaf(std::move(v)));
  }
  return leaves;
}

// Builds the forward graph of `net` applied to the node `input`; the
// parameter leaves must come from register_params on the same tape.
template <typename S>
int mlp_forward(Tape<S>& tape, const std::vector<int>& param_leaves,
                const Mlp& net, int input) {
  if (tape.value(input).cols != net.input_dim() ||
      tape.value(input).rows < 1)
    throw ShapeMismatch("batch is " +
                        shape_string(tape.value(input).rows,
                                     tape.value(input).cols) +
                        ", expected m x " + std::to_string(net.input_dim()));
  int cur = input;
  std::size_t pi = 0;
  for (const auto& l : net.layers()) {
    cur = tape.matmul(cur, param_leaves[pi++]);
    if (l.has_bias) cur = tape.add_row(cur, param_leaves[pi++]);
    switch (l.act) {
      case Activation::Identity:
        break;
      case Activation::LeakyRelu:
        cur = tape.leaky_relu(cur, l.leaky_slope);
        break;
      case Activation::Tanh:
        cur = tape.tanh(cur);
        break;
      case Activation::Sigmoid:
        cur = tape.sigmoid(cur);
        break;
    }
  }
  return cur;
}

// Conventional builders for the toy experiments: leaky-relu hidden stack,
// sigmoid discriminator head, identity generator head for unbounded targets.
inline std::vector<LayerSpec> discriminator_layers(int input_dim,
                                                   int hidden_width,
                                                   int hidden_layers,
                                                   double slope = 0.2) {
  std::vector<LayerSpec> specs;
  int in = input_dim;
  for (int i = 0; i < hidden_layers; ++i) {
    specs.push_back({in, hidden_width, Activation::LeakyRelu, slope, true});
    in = hidden_width;
  }
  specs.push_back({in, 1, Activation::Sigmoid, slope, true});
  return specs;
}

inline std::vector<LayerSpec> generator_layers(int latent_dim, int out_dim,
                                               int hidden_width,
                                               int hidden_layers,
                                               Activation out_act,
                                               double slope = 0.2) {
  std::vector<LayerSpec> specs;
  int in = latent_dim;
  for (int i = 0; i < hidden_layers; ++i) {
    specs.push_back({in, hidden_width, Activation::LeakyRelu, slope, true});
    in = hidden_width;
  }
  specs.push_back({in, out_dim, out_act, slope, true});
  return specs;
}

}  // namespace rlab
