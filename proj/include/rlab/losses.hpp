#pragma once

#include <cmath>
#include <optional>
#include <string>

#include "rlab/distributions.hpp"
#include "rlab/penalty.hpp"

// Batch estimators of the generalized generator/discriminator losses:
// least-kth-order (quadratic discriminator labels a/b, generator target c,
// error order k) and the Renyi generator loss with optional L1 normalization,
// plus the simplified gradient penalty and the per-epoch alpha schedule.

namespace rlab {

struct LkganParams {
  double k = 2.0;
  double a = 1.0;
  double b = 0.0;
  double c = 0.5;

  // The three parameter sets used in the experiments.
  static LkganParams v1(double k) { return {k, 0.6, 0.4, 0.5}; }
  static LkganParams v2(double k) { return {k, 1.0, 0.0, 0.5}; }
  static LkganParams v3(double k) { return {k, 0.0, 1.0, 1.0}; }

  void validate() const {
    if (!(k >= 1.0)) throw OrderOutOfRange("LkGAN order must satisfy k >= 1");
    for (double v : {a, b, c})
      if (!(v >= 0.0 && v <= 1.0))
        throw ConfigInvalid("LkGAN labels a, b, c must lie in [0, 1]");
  }
};

struct AlphaSchedule {
  double beta1 = 0.0;
  double beta2 = 3.0;

  void validate() const {
    if (!(beta1 >= 0.0) || !(beta1 < beta2))
      throw InvalidInterval("alpha schedule needs 0 <= beta1 < beta2");
  }
};

struct RenyiganParams {
  double alpha = 3.0;
  bool l1_normalized = false;
  std::optional<AlphaSchedule> schedule;

  void validate() const {
    if (!schedule) (void)Order::renyi(alpha);
    if (schedule) schedule->validate();
  }
};

struct PenaltyConfig {
  bool enabled = false;
  double coefficient = 5.0;

  void validate() const {
    if (!(coefficient >= 0.0))
      throw ConfigInvalid("penalty coefficient must be >= 0");
  }
};

namespace detail {

template <typename S>
void require_batch(const Tape<S>& tape, int node) {
  const auto& v = tape.value(node);
  if (v.size() < 1) throw EmptyBatch("loss over an empty batch");
  if (v.cols != 1)
    throw ShapeMismatch("discriminator batch must be m x 1, got " +
                        shape_string(v.rows, v.cols));
}

}  // namespace detail

// (1/m) sum [ (d_real - b)^2 / 2 + (d_fake - a)^2 / 2 ]
template <typename S>
int lkgan_disc_loss(Tape<S>& tape, int d_real, int d_fake,
                    const LkganParams& p) {
  p.validate();
  detail::require_batch(tape, d_real);
  detail::require_batch(tape, d_fake);
  if (tape.value(d_real).rows != tape.value(d_fake).rows)
    throw BatchLengthMismatch("real and fake batches differ in length");
  const int real_term =
      tape.mean(tape.abs_pow(tape.add_const(d_real, -p.b), 2.0));
  const int fake_term =
      tape.mean(tape.abs_pow(tape.add_const(d_fake, -p.a), 2.0));
  return tape.mul_const(tape.add(real_term, fake_term), 0.5);
}

// (1/m) sum |d_fake - c|^k — the only term the generator descends; the
// real-sample term is constant in the generator and logged separately.
template <typename S>
int lkgan_gen_loss(Tape<S>& tape, int d_fake, const LkganParams& p) {
  p.validate();
  detail::require_batch(tape, d_fake);
  return tape.mean(tape.abs_pow(tape.add_const(d_fake, -p.c), p.k));
}

// Real-sample term of the population generator objective, for logging.
inline double lkgan_gen_real_term(const Tensor<double>& d_real,
                                  const LkganParams& p) {
  p.validate();
  if (d_real.size() < 1) throw EmptyBatch("loss over an empty batch");
  double sum = 0.0;
  for (double v : d_real.data) sum += std::pow(std::abs(v - p.c), p.k);
  return sum / d_real.size();
}

// -(1/m) sum [ log d_real + log(1 - d_fake) ]
template <typename S>
int gan_disc_loss(Tape<S>& tape, int d_real, int d_fake) {
  detail::require_batch(tape, d_real);
  detail::require_batch(tape, d_fake);
  if (tape.value(d_real).rows != tape.value(d_fake).rows)
    throw BatchLengthMismatch("real and fake batches differ in length");
  const int real_term = tape.mean(tape.log(d_real));
  const int fake_term = tape.mean(tape.log(tape.sub_from_const(1.0, d_fake)));
  return tape.neg(tape.add(real_term, fake_term));
}

// Non-saturating direction of the classical generator objective:
// (1/m) sum log(1 - d_fake), descended as-is by the baseline.
template <typename S>
int gan_gen_loss(Tape<S>& tape, int d_fake) {
  detail::require_batch(tape, d_fake);
  return tape.mean(tape.log(tape.sub_from_const(1.0, d_fake)));
}

// (1/(alpha-1)) log[(1/m) sum (1 - d_fake)^(alpha-1)], optionally folded to
// |. + log 2| (the L1-normalized objective whose minimum sits at labels 1/2).
template <typename S>
int renyigan_gen_loss(Tape<S>& tape, int d_fake, Order alpha, bool l1) {
  const double a = Order::renyi(alpha.value()).value();
  detail::require_batch(tape, d_fake);
  const int one_minus = tape.sub_from_const(1.0, d_fake);
  for (const auto& v : tape.value(one_minus).data)
    if (!(primal(v) > 1e-300))
      throw SaturatedDiscriminator("1 - D(g(z)) at or below 1e-300");
  const int powered = tape.pow_const(one_minus, a - 1.0);
  const int base = tape.mul_const(tape.log(tape.mean(powered)), 1.0 / (a - 1.0));
  if (!l1) return base;
  return tape.abs_pow(tape.add_const(base, std::log(2.0)), 1.0);
}

// coefficient * (1/m) sum ||grad_x log(D(x)/(1-D(x)))||^2 at real samples.
inline int gradient_penalty(Tape<double>& tape,
                            const std::vector<int>& disc_leaves,
                            const Mlp& disc, const Tensor<double>& real_batch,
                            const PenaltyConfig& cfg) {
  cfg.validate();
  if (!cfg.enabled)
    throw ConfigInvalid("gradient_penalty called with penalty disabled");
  if (real_batch.rows < 1) throw EmptyBatch("penalty over an empty batch");
  return input_gradient_norm_sq(tape, disc_leaves, disc, real_batch,
                                cfg.coefficient);
}

// Deterministic linear sweep of alpha across epochs, with a positivity floor
// and a displacement window around alpha = 1.
inline Order schedule_alpha(const AlphaSchedule& schedule, int epoch,
                            int total_epochs) {
  schedule.validate();
  if (epoch < 0 || epoch >= total_epochs)
    throw InvalidInterval("epoch outside [0, total_epochs)");
  double alpha = schedule.beta1;
  if (total_epochs > 1)
    alpha += (schedule.beta2 - schedule.beta1) * epoch / (total_epochs - 1);
  if (alpha < 1e-3) alpha = 1e-3;
  if (std::abs(alpha - 1.0) <= 1e-6)
    alpha = alpha < 1.0 ? 1.0 - 1e-3 : 1.0 + 1e-3;
  return Order::renyi(alpha);
}

}  // namespace rlab
