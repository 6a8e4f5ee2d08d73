#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "msg/denoiser.hpp"
#include "msg/guidance.hpp"
#include "msg/motion.hpp"
#include "msg/schedule.hpp"
#include "msg/synth.hpp"
#include "msg/toml.hpp"

namespace msg {

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Run configuration, one section per module. The shipped defaults are the
// module defaults; a config file overrides any subset. Unknown keys are
// rejected with their full path.
struct RunConfig {
    struct Schedule {
        double beta_min = 0.1;
        double beta_max = 20.0;
        int n_steps = 50;
    } schedule;

    struct Data {
        int frames = 8;
        int height = 16;
        int width = 16;
        int single_count = 17;
        int multi_count = 13;
        int camera_count = 10;
        double amplitude = 1.0;
        double blob_sigma = 1.5;
    } data;

    struct Model {
        std::vector<int> hidden = {256, 256};
        int time_features = 16;
        int cond_embed = 16;
    } model;

    struct Training {
        int steps = 1500;
        int batch_size = 16;
        double learning_rate = 2e-3;
        double p_drop = 0.1;
        double clip_norm = 10.0;
    } training;

    struct Guidance {
        std::string mode = "msg";
        double cfg_lambda = 2.0;
        double usg_weight = 1.0;
        double msg_weight = 1.0;
    } guidance;

    struct Transfer {
        double strength = 0.7;
        double window_ratio = 0.1;
        std::string target = "swap";  // "swap" or a category id
        int count = 0;                // 0 = every manifest clip
        bool save_motion = false;
    } transfer;

    struct Sample {
        int count = 4;
        int condition = -1;  // -1 = unconditional
    } sample;

    struct Eval {
        std::string outputs = "transfers";
    } eval;

    struct Ablate {
        std::vector<double> strengths = {0.6, 0.7, 0.8};
        std::vector<double> window_ratios = {0.1, 0.2};
        std::vector<std::string> modes = {"cfg", "usg", "msg"};
        int clip_count = 4;
    } ablate;

    struct Output {
        std::string dir = "out";
    } output;

    struct Seeds {
        std::uint64_t master = 42;
    } seeds;

    static RunConfig defaults() { return RunConfig{}; }
    static RunConfig from_file(const std::filesystem::path& path);
    static RunConfig from_table(const toml::Table& table);

    NoiseSchedule make_noise_schedule() const;
    SuiteConfig suite_config() const;
    DenoiserConfig denoiser_config() const;
    TrainingConfig training_config() const;
    TransferConfig transfer_config() const;
    GuidanceMode guidance_mode() const;
};

}  // namespace msg
