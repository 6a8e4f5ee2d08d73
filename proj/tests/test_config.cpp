#include <doctest.h>

#include <stdexcept>

#include "msg/config.hpp"

using msg::RunConfig;

TEST_CASE("toml subset parses sections, scalars, and arrays") {
    auto table = msg::toml::parse(
        "# comment\n"
        "[schedule]\n"
        "beta_min = 0.2\n"
        "n_steps = 40  # trailing comment\n"
        "\n"
        "[ablate]\n"
        "strengths = [0.6, 0.7, 0.8]\n"
        "modes = [\"cfg\", \"msg\"]\n"
        "[transfer]\n"
        "target = \"swap\"\n"
        "save_motion = true\n");
    CHECK(table.at("schedule.beta_min").as_float("x") == doctest::Approx(0.2));
    CHECK(table.at("schedule.n_steps").as_integer("x") == 40);
    CHECK(table.at("ablate.strengths").as_float_array("x") ==
          std::vector<double>{0.6, 0.7, 0.8});
    CHECK(table.at("ablate.modes").as_string_array("x") ==
          std::vector<std::string>{"cfg", "msg"});
    CHECK(table.at("transfer.target").as_string("x") == "swap");
    CHECK(table.at("transfer.save_motion").as_boolean("x") == true);
}

TEST_CASE("toml subset rejects malformed input with line numbers") {
    CHECK_THROWS_WITH_AS(msg::toml::parse("key 0.5\n"), doctest::Contains("line 1"),
                         msg::toml::TomlError);
    CHECK_THROWS_WITH_AS(msg::toml::parse("a = 1\na = 2\n"),
                         doctest::Contains("duplicate key"), msg::toml::TomlError);
    CHECK_THROWS_AS(msg::toml::parse("a = \"unterminated\n"), msg::toml::TomlError);
    CHECK_THROWS_AS(msg::toml::parse("a = [1, 2\n"), msg::toml::TomlError);
    CHECK_THROWS_AS(msg::toml::parse("a = zzz\n"), msg::toml::TomlError);
}

TEST_CASE("defaults carry the shipped experimental setup") {
    RunConfig cfg = RunConfig::defaults();
    CHECK(cfg.schedule.n_steps == 50);
    CHECK(cfg.schedule.beta_min == 0.1);
    CHECK(cfg.schedule.beta_max == 20.0);
    CHECK(cfg.transfer.strength == 0.7);
    CHECK(cfg.transfer.window_ratio == 0.1);
    CHECK(cfg.guidance.msg_weight == 1.0);
    CHECK(cfg.guidance.mode == "msg");
    CHECK(cfg.ablate.strengths == std::vector<double>{0.6, 0.7, 0.8});
    CHECK(cfg.ablate.modes == std::vector<std::string>{"cfg", "usg", "msg"});
    CHECK(cfg.training.p_drop == 0.1);
    CHECK(cfg.data.single_count == 17);
    CHECK(cfg.data.multi_count == 13);
    CHECK(cfg.data.camera_count == 10);
}

TEST_CASE("config overrides take effect and unknown keys are rejected by path") {
    auto table = msg::toml::parse(
        "[schedule]\n"
        "n_steps = 30\n"
        "[transfer]\n"
        "strength = 0.8\n");
    RunConfig cfg = RunConfig::from_table(table);
    CHECK(cfg.schedule.n_steps == 30);
    CHECK(cfg.transfer.strength == 0.8);
    CHECK(cfg.schedule.beta_min == 0.1);  // untouched default

    auto typo = msg::toml::parse("[transfer]\nstrenght = 0.7\n");
    CHECK_THROWS_WITH_AS(RunConfig::from_table(typo),
                         doctest::Contains("transfer.strenght"), msg::ConfigError);

    auto bad_mode = msg::toml::parse("[guidance]\nmode = \"mgs\"\n");
    CHECK_THROWS_AS(RunConfig::from_table(bad_mode), std::invalid_argument);

    auto bad_target = msg::toml::parse("[transfer]\ntarget = \"blob\"\n");
    CHECK_THROWS_WITH_AS(RunConfig::from_table(bad_target),
                         doctest::Contains("transfer.target"), msg::ConfigError);
}

TEST_CASE("config materializes module configs with its values") {
    auto table = msg::toml::parse(
        "[data]\n"
        "frames = 4\n"
        "height = 8\n"
        "width = 8\n"
        "[model]\n"
        "hidden = [32, 32]\n"
        "[guidance]\n"
        "mode = \"usg\"\n");
    RunConfig cfg = RunConfig::from_table(table);
    CHECK(cfg.denoiser_config().shape == msg::LatentShape{4, 8, 8, 1});
    CHECK(cfg.denoiser_config().hidden == std::vector<int>{32, 32});
    CHECK(cfg.suite_config().frame_shape.height == 8);
    CHECK(cfg.transfer_config().mode == msg::GuidanceMode::Usg);
    CHECK(cfg.make_noise_schedule().n_steps() == 50);
}
