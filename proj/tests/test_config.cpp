#include "doctest.h"

#include "ksos/config.hpp"

#include <filesystem>

using namespace ksos;

namespace {

const std::filesystem::path kConfigDir = KSOS_CONFIG_DIR;

}  // namespace

TEST_CASE("default experiments") {
  const ExperimentConfig logistic = default_experiment(SystemKind::kLogistic);
  CHECK(logistic.seeds.size() == 10);
  CHECK(logistic.seeds.front() == 0);
  CHECK(logistic.seeds.back() == 9);
  CHECK(logistic.budget == 200);
  CHECK(logistic.gd.steps == 200);
  CHECK(logistic.sos.n_samples == 200);
  CHECK(logistic.gammas == std::vector<double>{0.1, 0.25});
  CHECK(logistic.gd.learning_rate == 1e-3);
  CHECK(logistic.sos.trace_reg == 1e-5);
  CHECK(logistic.sos.sos_kernel_sigma == 0.1);
  CHECK(logistic.sos.barrier_eps == 1e-6);
  CHECK(logistic.sos.newton_steps == 100);
  CHECK(default_experiment(SystemKind::kHenon).gd.learning_rate == 1e-1);
  CHECK(default_experiment(SystemKind::kLorenz).gd.learning_rate == 0.5);
  for (auto kind : {SystemKind::kLogistic, SystemKind::kHenon, SystemKind::kLorenz}) {
    CHECK_NOTHROW(default_experiment(kind).validate());
  }
}

TEST_CASE("config JSON round-trips") {
  for (auto kind : {SystemKind::kLogistic, SystemKind::kHenon, SystemKind::kLorenz}) {
    const ExperimentConfig cfg = default_experiment(kind);
    const std::string text = config_to_json(cfg);
    CHECK(config_to_json(parse_config(text)) == text);
  }
  ExperimentConfig custom = default_experiment(SystemKind::kHenon);
  custom.seeds = {3, 17};
  custom.gd.domain.lower[4] = 0.5;
  custom.gd.init = KernelParams(ParamVector::LinSpaced(1.0, 2.0));
  const std::string text = config_to_json(custom);
  const ExperimentConfig back = parse_config(text);
  CHECK(back.seeds == custom.seeds);
  CHECK(back.gd.domain.lower == custom.gd.domain.lower);
  CHECK(back.gd.init == custom.gd.init);
  CHECK(config_to_json(back) == text);
}

TEST_CASE("missing keys take the system defaults") {
  const ExperimentConfig empty = parse_config("{}");
  CHECK(config_to_json(empty) == config_to_json(default_experiment(SystemKind::kLogistic)));
  const ExperimentConfig lorenz = parse_config(R"({"system": {"name": "lorenz"}})");
  CHECK(config_to_json(lorenz) == config_to_json(default_experiment(SystemKind::kLorenz)));
}

TEST_CASE("budget drives both optimizers") {
  const ExperimentConfig cfg = parse_config(R"({"budget": 37})");
  CHECK(cfg.budget == 37);
  CHECK(cfg.gd.steps == 37);
  CHECK(cfg.sos.n_samples == 37);
}

TEST_CASE("overrides use dotted paths") {
  const ExperimentConfig cfg =
      parse_config("{}", {"sos.barrier_eps=1e-8", "system.name=henon", "seeds=[4,5]", "domain.upper=5"});
  CHECK(cfg.sos.barrier_eps == 1e-8);
  CHECK(cfg.system.kind == SystemKind::kHenon);
  CHECK(cfg.seeds == std::vector<std::uint64_t>{4, 5});
  CHECK((cfg.gd.domain.upper.array() == 5.0).all());
  CHECK_THROWS_AS(parse_config("{}", {"sos.barrier_eps"}), ConfigError);
  CHECK_THROWS_AS(parse_config("{}", {"=3"}), ConfigError);
  CHECK_THROWS_AS(parse_config("{}", {"budget.x=3"}), ConfigError);
}

TEST_CASE("malformed configs are rejected") {
  CHECK_THROWS_AS(parse_config("not json"), ConfigError);
  CHECK_THROWS_AS(parse_config("[1, 2]"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"sedes": [1]})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"sos": {"sigma": 1}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"system": {"name": "rossler"}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"budget": "many"})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"domain": {"lower": [1, 2]}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"system": {"train_x0": ["a"]}})"), ConfigError);
  CHECK_THROWS_AS(load_config(kConfigDir / "does_not_exist.json"), ConfigError);
}

TEST_CASE("validation catches inconsistent experiments") {
  CHECK_THROWS_AS(parse_config(R"({"seeds": []})").validate(), DomainError);
  CHECK_THROWS_AS(parse_config(R"({"seeds": [1, 1]})").validate(), DomainError);
  CHECK_THROWS_AS(parse_config(R"({"budget": 1})").validate(), DomainError);
  CHECK_THROWS_AS(parse_config(R"({"gammas": [0]})").validate(), DomainError);
  CHECK_THROWS_AS(parse_config(R"({"system": {"n_steps": 1}})").validate(), DomainError);
  CHECK_THROWS_AS(parse_config(R"({"system": {"train_x0": [0.1, 0.2]}})").validate(), DomainError);
  ExperimentConfig mismatch = default_experiment(SystemKind::kLogistic);
  mismatch.gd.steps = 100;
  CHECK_THROWS_AS(mismatch.validate(), DomainError);
}

TEST_CASE("shipped configs") {
  const std::pair<const char*, SystemKind> files[] = {{"paper_logistic.json", SystemKind::kLogistic},
                                                      {"paper_henon.json", SystemKind::kHenon},
                                                      {"paper_lorenz.json", SystemKind::kLorenz}};
  for (const auto& [file, kind] : files) {
    CAPTURE(file);
    const ExperimentConfig cfg = load_config(kConfigDir / file);
    CHECK(config_to_json(cfg) == config_to_json(default_experiment(kind)));
  }
  const ExperimentConfig smoke = load_config(kConfigDir / "smoke.json");
  CHECK_NOTHROW(smoke.validate());
  CHECK(smoke.seeds.size() == 1);
  CHECK(smoke.budget < 200);
}
