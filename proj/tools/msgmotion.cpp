#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "msg/commands.hpp"
#include "msg/config.hpp"
#include "msg/version.hpp"

namespace {

struct GlobalOptions {
    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    bool seed_set = false;
    bool out_set = false;
};

msg::RunConfig resolve_config(const GlobalOptions& opts) {
    msg::RunConfig config = opts.config_path.empty()
                                ? msg::RunConfig::defaults()
                                : msg::RunConfig::from_file(opts.config_path);
    if (opts.seed_set) config.seeds.master = opts.seed;
    if (opts.out_set) config.output.dir = opts.out_dir;
    return config;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Toy-scale motion transfer via score-guided diffusion sampling"};
    app.set_version_flag("--version", std::string("msgmotion ") + msg::kVersion);

    GlobalOptions opts;
    app.add_option("--config", opts.config_path, "Run configuration file (TOML)")
        ->check(CLI::ExistingFile);
    auto* seed_opt = app.add_option("--seed", opts.seed, "Master seed override");
    auto* out_opt = app.add_option("--out", opts.out_dir, "Output directory override");

    int (*command)(const msg::RunConfig&) = nullptr;
    app.add_subcommand("gen-data", "Generate the synthetic moving-shape suite")
        ->callback([&] { command = msg::cmd_gen_data; });
    app.add_subcommand("train", "Train the toy denoiser on the generated suite")
        ->callback([&] { command = msg::cmd_train; });
    app.add_subcommand("sample", "Generate clips from pure noise")
        ->callback([&] { command = msg::cmd_sample; });
    app.add_subcommand("transfer", "Run the two-phase motion transfer pipeline")
        ->callback([&] { command = msg::cmd_transfer; });
    app.add_subcommand("ablate", "Sweep strength / window ratio / guidance mode")
        ->callback([&] { command = msg::cmd_ablate; });
    app.add_subcommand("eval", "Evaluate transferred clips against the suite")
        ->callback([&] { command = msg::cmd_eval; });
    app.require_subcommand(0, 1);

    CLI11_PARSE(app, argc, argv);
    opts.seed_set = seed_opt->count() > 0;
    opts.out_set = out_opt->count() > 0;

    if (command == nullptr) {
        std::cerr << app.help() << "\n";
        return 1;
    }
    try {
        return command(resolve_config(opts));
    } catch (const std::exception& e) {
        // Config-parse failures land here, before any run.json exists.
        std::cerr << "msgmotion: " << e.what() << "\n";
        return 2;
    }
}
