#include <catch2/catch_amalgamated.hpp>

#include "rlab/config.hpp"

using nlohmann::json;
using rlab::config_from_json;

namespace {

json base() {
  return json{{"schema", 1},
              {"family", "renyigan"},
              {"seed", 123},
              {"epochs", 10},
              {"renyigan", {{"alpha", 3.0}, {"l1", true}}}};
}

}  // namespace

TEST_CASE("experiment files map onto training configs") {
  const auto cfg = config_from_json(base());
  CHECK(cfg.family == rlab::LossFamily::Renyigan);
  CHECK(cfg.seed == 123);
  CHECK(cfg.epochs == 10);
  REQUIRE(cfg.renyigan.has_value());
  CHECK(cfg.renyigan->alpha == 3.0);
  CHECK(cfg.renyigan->l1_normalized);
  // defaults fill the rest
  CHECK(cfg.batch_size == 64);
  CHECK(cfg.pool_size == 8192);
  CHECK(cfg.dataset.kind == rlab::DatasetKind::GaussianRing);
}

TEST_CASE("unknown keys are rejected by name") {
  auto j = base();
  j["learning_rat"] = 0.1;
  try {
    config_from_json(j);
    FAIL("expected ConfigInvalid");
  } catch (const rlab::ConfigInvalid& e) {
    CHECK(std::string(e.what()).find("learning_rat") != std::string::npos);
  }

  auto nested = base();
  nested["renyigan"]["alpa"] = 2.0;
  try {
    config_from_json(nested);
    FAIL("expected ConfigInvalid");
  } catch (const rlab::ConfigInvalid& e) {
    CHECK(std::string(e.what()).find("alpa") != std::string::npos);
  }
}

TEST_CASE("schema version and family are mandatory") {
  auto no_schema = base();
  no_schema.erase("schema");
  CHECK_THROWS_AS(config_from_json(no_schema), rlab::ConfigInvalid);

  auto bad_schema = base();
  bad_schema["schema"] = 2;
  CHECK_THROWS_AS(config_from_json(bad_schema), rlab::ConfigInvalid);

  auto no_family = base();
  no_family.erase("family");
  CHECK_THROWS_AS(config_from_json(no_family), rlab::ConfigInvalid);
}

TEST_CASE("family blocks are validated") {
  auto lk = json{{"schema", 1},
                 {"family", "lkgan"},
                 {"lkgan", {{"k", 1.0}, {"version", "v2"}}}};
  const auto cfg = config_from_json(lk);
  REQUIRE(cfg.lkgan.has_value());
  CHECK(cfg.lkgan->a == 1.0);
  CHECK(cfg.lkgan->b == 0.0);
  CHECK(cfg.lkgan->c == 0.5);

  auto both = lk;
  both["lkgan"]["a"] = 0.3;
  CHECK_THROWS_AS(config_from_json(both), rlab::ConfigInvalid);

  auto missing = json{{"schema", 1}, {"family", "lkgan"}};
  CHECK_THROWS_AS(config_from_json(missing), rlab::ConfigInvalid);

  auto sched = json{{"schema", 1},
                    {"family", "renyigan"},
                    {"renyigan", {{"schedule", {0.0, 3.0}}, {"l1", true}}}};
  const auto scfg = config_from_json(sched);
  REQUIRE(scfg.renyigan->schedule.has_value());
  CHECK(scfg.renyigan->schedule->beta2 == 3.0);

  auto conflict = sched;
  conflict["renyigan"]["alpha"] = 2.0;
  CHECK_THROWS_AS(config_from_json(conflict), rlab::ConfigInvalid);

  auto bad_interval = sched;
  bad_interval["renyigan"]["schedule"] = {3.0, 1.0};
  CHECK_THROWS_AS(config_from_json(bad_interval), rlab::InvalidInterval);
}

TEST_CASE("config echo round-trips") {
  auto j = base();
  j["dataset"] = {{"kind", "grid-mixture"}, {"rows", 4}, {"cols", 5},
                  {"mode_std", 0.1}};
  j["optimizer"] = {{"learning_rate", 1e-3}, {"beta1", 0.0}};
  j["penalty"] = {{"enabled", true}, {"coefficient", 5.0}};
  const auto cfg = config_from_json(j);
  const auto echo = rlab::config_to_json(cfg);
  const auto cfg2 = config_from_json(echo);
  CHECK(cfg2.dataset.kind == rlab::DatasetKind::GridMixture);
  CHECK(cfg2.dataset.rows == 4);
  CHECK(cfg2.dataset.cols == 5);
  CHECK(cfg2.optimizer.learning_rate == 1e-3);
  CHECK(cfg2.optimizer.beta1 == 0.0);
  CHECK(cfg2.penalty.enabled);
  CHECK(rlab::config_to_json(cfg2) == echo);
}
