#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "rlab/datasets.hpp"
#include "rlab/trainer.hpp"

using Catch::Matchers::WithinAbs;
using rlab::DatasetKind;
using rlab::DatasetSpec;
using rlab::LossFamily;
using rlab::SyntheticDataset;
using rlab::Tensor;
using rlab::TrainConfig;

namespace {

TrainConfig smoke_config() {
  TrainConfig cfg;
  cfg.family = LossFamily::DcganBaseline;
  cfg.epochs = 1;
  cfg.batch_size = 4;
  cfg.pool_size = 32;
  cfg.fid_samples = 32;
  cfg.hidden_width = 8;
  cfg.latent_dim = 4;
  cfg.dataset.kind = DatasetKind::SingleGaussian;
  cfg.seed = 7;
  return cfg;
}

}  // namespace

TEST_CASE("synthetic datasets") {
  DatasetSpec ring;
  ring.kind = DatasetKind::GaussianRing;
  ring.n_modes = 8;
  ring.radius = 2.0;
  ring.mode_std = 0.05;
  const SyntheticDataset ds(ring);
  REQUIRE(ds.modes().size() == 8);

  rlab::Rng rng(3);
  const auto samples = ds.sample(rng, 100000);

  // samples drawn from the true mixture hit every mode; the in-3-sigma mass
  // in two dimensions is 1 - exp(-9/2) ~= 0.9889
  const auto cov = rlab::mode_coverage(samples, ds);
  CHECK(cov.modes_hit == 8);
  CHECK(cov.high_quality_fraction > 0.985);
  CHECK(cov.high_quality_fraction < 0.992);

  // collapse onto a single mode center
  Tensor<double> collapsed(1000, 2);
  for (int i = 0; i < collapsed.rows; ++i) {
    collapsed.at(i, 0) = ds.modes()[0][0];
    collapsed.at(i, 1) = ds.modes()[0][1];
  }
  const auto one = rlab::mode_coverage(collapsed, ds);
  CHECK(one.modes_hit == 1);
  CHECK_THAT(one.high_quality_fraction, WithinAbs(1.0, 1e-12));

  // uniform noise far from every mode
  Tensor<double> noise(1000, 2);
  for (auto& v : noise.data) v = rng.uniform(50.0, 60.0);
  const auto far = rlab::mode_coverage(noise, ds);
  CHECK(far.modes_hit == 0);
  CHECK_THAT(far.high_quality_fraction, WithinAbs(0.0, 1e-12));

  DatasetSpec grid;
  grid.kind = DatasetKind::GridMixture;
  grid.rows = 2;
  grid.cols = 3;
  CHECK(SyntheticDataset(grid).modes().size() == 6);

  DatasetSpec single;
  single.kind = DatasetKind::SingleGaussian;
  const SyntheticDataset sg(single);
  CHECK_THROWS_AS(rlab::mode_coverage(samples, sg), rlab::WrongDatasetKind);
}

TEST_CASE("training smoke run") {
  const auto result = rlab::train(smoke_config());
  CHECK_FALSE(result.diverged);
  REQUIRE(result.record.rows.size() == 1);
  const auto& row = result.record.rows[0];
  CHECK(std::isfinite(row.disc_loss));
  CHECK(std::isfinite(row.gen_loss));
  CHECK(std::isfinite(row.fid));
  CHECK(row.epoch == 0);
  CHECK(row.penalty_value == 0.0);
}

TEST_CASE("training is deterministic per seed") {
  auto cfg = smoke_config();
  cfg.family = LossFamily::Renyigan;
  cfg.renyigan = rlab::RenyiganParams{3.0, true, std::nullopt};
  cfg.epochs = 3;
  cfg.seed = 123;

  const auto a = rlab::train(cfg);
  const auto b = rlab::train(cfg);
  CHECK(a.record.to_csv() == b.record.to_csv());
  for (std::size_t i = 0; i < a.generator.params().size(); ++i)
    CHECK(a.generator.params()[i].data == b.generator.params()[i].data);

  auto other = cfg;
  other.seed = 124;
  CHECK(rlab::train(other).record.to_csv() != a.record.to_csv());
}

TEST_CASE("every family runs all loss paths") {
  for (auto family : {LossFamily::Lkgan, LossFamily::Renyigan,
                      LossFamily::DcganBaseline}) {
    auto cfg = smoke_config();
    cfg.family = family;
    cfg.epochs = 2;
    if (family == LossFamily::Lkgan)
      cfg.lkgan = rlab::LkganParams::v1(1.0);
    if (family == LossFamily::Renyigan) {
      cfg.renyigan =
          rlab::RenyiganParams{3.0, true, rlab::AlphaSchedule{0.0, 3.0}};
    }
    const auto result = rlab::train(cfg);
    CHECK_FALSE(result.diverged);
    REQUIRE(result.record.rows.size() == 2);
    for (const auto& row : result.record.rows) {
      CHECK(std::isfinite(row.disc_loss));
      CHECK(std::isfinite(row.gen_loss));
      CHECK(std::isfinite(row.fid));
    }
    if (family == LossFamily::Renyigan) {
      // scheduled alpha starts at the floored beta1 and then moves
      CHECK_THAT(result.record.rows[0].alpha, WithinAbs(1e-3, 1e-15));
      CHECK(result.record.rows[1].alpha > result.record.rows[0].alpha);
    }
  }
}

TEST_CASE("penalty-enabled training records penalty values") {
  auto cfg = smoke_config();
  cfg.penalty.enabled = true;
  cfg.penalty.coefficient = 5.0;
  cfg.epochs = 1;
  const auto result = rlab::train(cfg);
  CHECK_FALSE(result.diverged);
  CHECK(result.record.rows[0].penalty_value > 0.0);
}

TEST_CASE("equilibrium probes with fake forced equal to real") {
  auto cfg = smoke_config();
  cfg.family = LossFamily::Renyigan;
  cfg.renyigan = rlab::RenyiganParams{3.0, true, std::nullopt};
  cfg.debug_fake_equals_real = true;
  cfg.epochs = 4;
  cfg.pool_size = 64;
  cfg.batch_size = 8;
  const auto result = rlab::train(cfg);
  CHECK_FALSE(result.diverged);
  const auto& last = result.record.rows.back();
  CHECK(last.disc_loss >= 2.0 * std::log(2.0) - 0.1);
  CHECK(last.gen_loss <= 0.1);
}

TEST_CASE("run records serialize with a fixed header and full config echo") {
  auto cfg = smoke_config();
  cfg.epochs = 2;
  const auto result = rlab::train(cfg);
  const std::string csv = result.record.to_csv();
  CHECK(csv.rfind("epoch,alpha_in_effect,disc_loss,gen_loss,penalty_value,"
                  "fid,clamp_activations\r\n",
                  0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);  // header + 2 rows

  const auto j = result.record.to_json();
  CHECK(j.at("version").get<std::string>() == rlab::kVersion);
  CHECK(j.at("config").at("family").get<std::string>() == "dcgan-baseline");
  CHECK(j.at("rows").size() == 2);
  CHECK(j.at("rows")[0].contains("wall_ms"));

  // the echo round-trips through the schema loader
  const auto cfg2 = rlab::config_from_json(j.at("config"));
  CHECK(cfg2.batch_size == cfg.batch_size);
  CHECK(cfg2.pool_size == cfg.pool_size);
}

TEST_CASE("exploding runs abort with the last good checkpoint") {
  auto cfg = smoke_config();
  cfg.epochs = 50;
  cfg.penalty.enabled = true;
  cfg.optimizer.learning_rate = 1e5;  // saturates the discriminator quickly,
                                      // making the penalty unevaluable
  const auto result = rlab::train(cfg);
  CHECK(result.diverged);
  CHECK_FALSE(result.divergence_message.empty());
  CHECK(result.record.rows.size() < 50);
  for (const auto& p : result.discriminator.params())
    for (double v : p.data) CHECK(std::isfinite(v));
}

TEST_CASE("invalid configurations are rejected") {
  auto cfg = smoke_config();
  cfg.epochs = 0;
  CHECK_THROWS_AS(rlab::train(cfg), rlab::ConfigInvalid);

  auto lk = smoke_config();
  lk.family = LossFamily::Lkgan;  // missing the lkgan block
  CHECK_THROWS_AS(rlab::train(lk), rlab::ConfigInvalid);
}
