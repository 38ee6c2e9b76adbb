#pragma once

#include <chrono>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "rlab/config.hpp"
#include "rlab/fid.hpp"
#include "rlab/io.hpp"
#include "rlab/version.hpp"

// Alternating-update adversarial trainer on the synthetic targets: one
// discriminator descent per batch (optionally with the simplified gradient
// penalty on real samples), one generator descent every
// disc_steps_per_gen_step batches, alpha rescheduled per epoch, everything
// deterministic per (seed, config).

namespace rlab {

struct EpochRow {
  int epoch = 0;
  double alpha = 1.0;
  double disc_loss = 0.0;
  double gen_loss = 0.0;
  double penalty_value = 0.0;
  double fid = 0.0;
  bool fid_clipped = false;
  long clamp_activations = 0;
  double wall_ms = 0.0;
};

struct RunRecord {
  nlohmann::json config_echo;
  std::string version = kVersion;
  std::vector<EpochRow> rows;

  // Fixed column order; wall-clock stays out of the CSV so repeated runs are
  // byte-identical (timing lives in the JSON artifact).
  static constexpr const char* kCsvHeader =
      "epoch,alpha_in_effect,disc_loss,gen_loss,penalty_value,fid,"
      "clamp_activations";

  std::string to_csv() const {
    std::string out = std::string(kCsvHeader) + "\r\n";
    for (const auto& r : rows) {
      out += std::to_string(r.epoch) + ',' + format_double(r.alpha) + ',' +
             format_double(r.disc_loss) + ',' + format_double(r.gen_loss) +
             ',' + format_double(r.penalty_value) + ',' +
             format_double(r.fid) + ',' + std::to_string(r.clamp_activations) +
             "\r\n";
    }
    return out;
  }

  nlohmann::json to_json() const {
    nlohmann::json rows_json = nlohmann::json::array();
    for (const auto& r : rows) {
      rows_json.push_back({{"epoch", r.epoch},
                           {"alpha_in_effect", r.alpha},
                           {"disc_loss", r.disc_loss},
                           {"gen_loss", r.gen_loss},
                           {"penalty_value", r.penalty_value},
                           {"fid", r.fid},
                           {"fid_clipped", r.fid_clipped},
                           {"clamp_activations", r.clamp_activations},
                           {"wall_ms", r.wall_ms}});
    }
    return nlohmann::json{{"config", config_echo},
                          {"version", version},
                          {"rows", std::move(rows_json)}};
  }
};

struct TrainResult {
  RunRecord record;
  Mlp generator;
  Mlp discriminator;
  bool diverged = false;
  std::string divergence_message;
};

namespace detail {

inline constexpr double kClampLo = 1e-7;
inline constexpr double kClampHi = 1.0 - 1e-7;
inline constexpr double kDivergenceCutoff = 1e6;

struct BatchStats {
  double disc_loss = 0.0;
  double penalty = 0.0;
  long clamped = 0;
};

inline bool loss_is_bad(double v) {
  return !std::isfinite(v) || std::abs(v) > kDivergenceCutoff;
}

inline std::vector<Tensor<double>> collect(const Tape<double>& tape,
                                           const std::vector<Tensor<double>>& adj,
                                           const std::vector<int>& leaves) {
  (void)tape;
  std::vector<Tensor<double>> grads;
  grads.reserve(leaves.size());
  for (int leaf : leaves) grads.push_back(adj[static_cast<std::size_t>(leaf)]);
  return grads;
}

}  // namespace detail

inline TrainResult train(const TrainConfig& config) {
  config.validate();
  Rng rng(config.seed);

  const SyntheticDataset dataset(config.dataset);
  const Tensor<double> pool = dataset.sample(rng, config.pool_size);
  const GaussianFit pool_fit = fit_gaussian(pool);

  Mlp generator = Mlp::gaussian_init(
      generator_layers(config.latent_dim, dataset.dim(), config.hidden_width,
                       config.hidden_layers, Activation::Identity),
      rng);
  Mlp discriminator = Mlp::gaussian_init(
      discriminator_layers(dataset.dim(), config.hidden_width,
                           config.hidden_layers),
      rng);
  AdamState adam_g(config.optimizer, generator.params());
  AdamState adam_d(config.optimizer, discriminator.params());

  Mlp last_good_gen = generator;
  Mlp last_good_disc = discriminator;

  TrainResult result{.record = {config_to_json(config), kVersion, {}},
                     .generator = generator,
                     .discriminator = discriminator,
                     .diverged = false,
                     .divergence_message = {}};

  const bool logs_used = config.family != LossFamily::Lkgan;
  const int batches = config.pool_size / config.batch_size;
  const int m = config.batch_size;

  std::vector<int> order(static_cast<std::size_t>(config.pool_size));
  std::iota(order.begin(), order.end(), 0);

  auto sample_latents = [&](int n) {
    Tensor<double> z(n, config.latent_dim);
    for (auto& v : z.data) v = rng.normal();
    return z;
  };

  for (int epoch = 0; epoch < config.epochs && !result.diverged; ++epoch) {
    const auto t0 = std::chrono::steady_clock::now();
    EpochRow row;
    row.epoch = epoch;

    double alpha = 1.0;
    if (config.family == LossFamily::Renyigan) {
      alpha = config.renyigan->schedule
                  ? schedule_alpha(*config.renyigan->schedule, epoch,
                                   config.epochs)
                        .value()
                  : config.renyigan->alpha;
    } else if (config.family == LossFamily::Lkgan) {
      alpha = config.lkgan->k;
    }
    row.alpha = alpha;

    rng.shuffle(order);
    double disc_sum = 0.0, gen_sum = 0.0, penalty_sum = 0.0;
    int gen_steps = 0, disc_steps = 0;

    for (int b = 0; b < batches && !result.diverged; ++b) {
      Tensor<double> real(m, dataset.dim());
      for (int i = 0; i < m; ++i) {
        const int src = order[static_cast<std::size_t>(b * m + i)];
        real.at(i, 0) = pool.at(src, 0);
        real.at(i, 1) = pool.at(src, 1);
      }

      try {
      // discriminator step
      {
        const Tensor<double> fake = config.debug_fake_equals_real
                                        ? real
                                        : generator.eval(sample_latents(m));
        Tape<double> tape;
        const auto disc_leaves = register_params(tape, discriminator);
        int d_real = mlp_forward(tape, disc_leaves, discriminator,
                                 tape.leaf(real));
        int d_fake = mlp_forward(tape, disc_leaves, discriminator,
                                 tape.leaf(fake));
        if (logs_used) {
          d_real = tape.clamp(d_real, detail::kClampLo, detail::kClampHi);
          d_fake = tape.clamp(d_fake, detail::kClampLo, detail::kClampHi);
          row.clamp_activations +=
              tape.clamp_count(d_real) + tape.clamp_count(d_fake);
        }
        const int family_loss =
            config.family == LossFamily::Lkgan
                ? lkgan_disc_loss(tape, d_real, d_fake, *config.lkgan)
                : gan_disc_loss(tape, d_real, d_fake);
        int objective = family_loss;
        if (config.penalty.enabled) {
          const int pen = gradient_penalty(tape, disc_leaves, discriminator,
                                           real, config.penalty);
          penalty_sum += tape.value(pen)[0];
          objective = tape.add(objective, pen);
        }
        const double loss_value = tape.value(family_loss)[0];
        if (detail::loss_is_bad(loss_value) ||
            detail::loss_is_bad(tape.value(objective)[0])) {
          result.diverged = true;
          result.divergence_message =
              "discriminator loss diverged at epoch " + std::to_string(epoch);
          break;
        }
        disc_sum += loss_value;
        ++disc_steps;
        const auto adj = tape.backward(objective);
        auto grads = detail::collect(tape, adj, disc_leaves);
        adam_step(adam_d, discriminator.params(), grads);
      }

      // generator step
      if (b % config.disc_steps_per_gen_step == 0) {
        double gen_value = 0.0;
        if (config.debug_fake_equals_real) {
          // probe only: the L1 objective evaluated at D(real)
          Tape<double> probe;
          int d = mlp_forward(probe, register_params(probe, discriminator),
                              discriminator, probe.leaf(real));
          d = probe.clamp(d, detail::kClampLo, detail::kClampHi);
          gen_value = probe.value(
              renyigan_gen_loss(probe, d, Order::renyi(3.0), true))[0];
        } else {
          Tape<double> tape;
          const auto gen_leaves = register_params(tape, generator);
          const auto disc_leaves = register_params(tape, discriminator);
          const int fake = mlp_forward(tape, gen_leaves, generator,
                                       tape.leaf(sample_latents(m)));
          int d_fake = mlp_forward(tape, disc_leaves, discriminator, fake);
          if (logs_used) {
            d_fake = tape.clamp(d_fake, detail::kClampLo, detail::kClampHi);
            row.clamp_activations += tape.clamp_count(d_fake);
          }
          int loss = -1;
          switch (config.family) {
            case LossFamily::Lkgan:
              loss = lkgan_gen_loss(tape, d_fake, *config.lkgan);
              break;
            case LossFamily::Renyigan:
              loss = renyigan_gen_loss(tape, d_fake, Order::renyi(alpha),
                                       config.renyigan->l1_normalized);
              break;
            case LossFamily::DcganBaseline:
              loss = gan_gen_loss(tape, d_fake);
              break;
          }
          gen_value = tape.value(loss)[0];
          if (config.family == LossFamily::Lkgan) {
            // constant-in-generator term of the population objective, logged
            gen_value += lkgan_gen_real_term(discriminator.eval(real),
                                             *config.lkgan);
          }
          if (detail::loss_is_bad(gen_value)) {
            result.diverged = true;
            result.divergence_message =
                "generator loss diverged at epoch " + std::to_string(epoch);
            break;
          }
          const auto adj = tape.backward(loss);
          auto grads = detail::collect(tape, adj, gen_leaves);
          adam_step(adam_g, generator.params(), grads);
        }
        gen_sum += gen_value;
        ++gen_steps;
      }
      } catch (const Error& e) {
        // saturation or overflow inside a step counts as divergence; the
        // last epoch-end checkpoint is what the caller gets back
        result.diverged = true;
        result.divergence_message = std::string(e.what()) + " at epoch " +
                                    std::to_string(epoch);
      }
    }
    if (result.diverged) break;

    row.disc_loss = disc_sum / std::max(1, disc_steps);
    row.gen_loss = gen_sum / std::max(1, gen_steps);
    row.penalty_value = penalty_sum / std::max(1, disc_steps);

    const Tensor<double> generated =
        generator.eval(sample_latents(config.fid_samples));
    const GaussianFit fake_fit = fit_gaussian(generated);
    row.fid = frechet_distance(fake_fit, pool_fit, &row.fid_clipped);
    if (detail::loss_is_bad(row.fid)) {
      result.diverged = true;
      result.divergence_message =
          "fid diverged at epoch " + std::to_string(epoch);
      break;
    }

    row.wall_ms = std::chrono::duration<double, std::milli>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
    result.record.rows.push_back(row);
    last_good_gen = generator;
    last_good_disc = discriminator;
  }

  result.generator = result.diverged ? last_good_gen : generator;
  result.discriminator = result.diverged ? last_good_disc : discriminator;
  return result;
}

}  // namespace rlab
