#include "msg/commands.hpp"

#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>

#include <nlohmann/json.hpp>

#include "msg/metrics.hpp"
#include "msg/motion.hpp"
#include "msg/tensor_io.hpp"
#include "msg/version.hpp"

namespace msg {

namespace {

// Derived-seed salts per command so reruns of one stage never perturb
// another stage's stream.
constexpr std::uint64_t kTrainSalt = 11;
constexpr std::uint64_t kSampleSalt = 22;
constexpr std::uint64_t kTransferSalt = 33;
constexpr std::uint64_t kAblateSalt = 44;

struct CommandOutcome {
    std::string summary;
    std::vector<std::string> outputs;  // paths relative to the out dir
};

void write_run_json(const std::filesystem::path& out_dir, const std::string& command,
                    std::uint64_t seed, bool success, const std::string& error,
                    const std::vector<std::string>& outputs) {
    nlohmann::json j;
    j["command"] = command;
    j["status"] = success ? "success" : "failure";
    if (!success) j["error"] = error;
    j["seed"] = seed;
    j["version"] = kVersion;
    j["outputs"] = outputs;
    std::ofstream out(out_dir / "run.json", std::ios::trunc);
    out << j.dump(2) << "\n";
}

int run_command(const char* name, const RunConfig& config,
                const std::function<CommandOutcome()>& body) {
    std::filesystem::path out_dir(config.output.dir);
    try {
        std::filesystem::create_directories(out_dir);
        CommandOutcome outcome = body();
        write_run_json(out_dir, name, config.seeds.master, true, "", outcome.outputs);
        std::cout << name << ": " << outcome.summary << "\n";
        return 0;
    } catch (const std::exception& e) {
        std::error_code ec;
        if (std::filesystem::exists(out_dir, ec))
            write_run_json(out_dir, name, config.seeds.master, false, e.what(), {});
        std::cerr << name << ": error: " << e.what() << "\n";
        return 1;
    }
}

std::string zero_padded(const char* prefix, int id, const char* suffix) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%s%04d%s", prefix, id, suffix);
    return buf;
}

std::string format_metric(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

struct Dataset {
    std::vector<ManifestRow> rows;
    std::filesystem::path dir;

    VideoLatent clip(const ManifestRow& row) const { return load_tensor(dir / row.clip_path); }
    Trajectory trajectory(const ManifestRow& row) const {
        return load_trajectory_csv(dir / row.traj_path);
    }
};

Dataset load_dataset(const RunConfig& config) {
    Dataset ds;
    ds.dir = std::filesystem::path(config.output.dir) / "data";
    std::filesystem::path manifest = ds.dir / "manifest.csv";
    if (!std::filesystem::exists(manifest))
        throw std::runtime_error("missing " + manifest.string() + " (run gen-data first)");
    ds.rows = load_manifest(manifest);
    if (ds.rows.empty()) throw std::runtime_error("manifest has no clips");
    return ds;
}

DenoiserNet load_model(const RunConfig& config) {
    std::filesystem::path path = std::filesystem::path(config.output.dir) / "model.msga";
    if (!std::filesystem::exists(path))
        throw std::runtime_error("missing " + path.string() + " (run train first)");
    return DenoiserNet::load(path);
}

Condition target_condition(const RunConfig& config, const ManifestRow& row) {
    if (config.transfer.target == "swap") {
        ShapeKind other = row.shape_kind == ShapeKind::GaussianBlob ? ShapeKind::Square
                                                                    : ShapeKind::GaussianBlob;
        return shape_condition(other);
    }
    return Condition::category(std::stoi(config.transfer.target));
}

}  // namespace

int cmd_gen_data(const RunConfig& config) {
    return run_command("gen-data", config, [&] {
        auto rows = generate_suite(config.suite_config(),
                                   std::filesystem::path(config.output.dir) / "data",
                                   config.seeds.master);
        CommandOutcome outcome;
        outcome.summary = "wrote " + std::to_string(rows.size()) + " clips to " +
                          (std::filesystem::path(config.output.dir) / "data").string();
        outcome.outputs.push_back("data/manifest.csv");
        for (const auto& r : rows) {
            outcome.outputs.push_back("data/" + r.clip_path);
            outcome.outputs.push_back("data/" + r.traj_path);
        }
        return outcome;
    });
}

int cmd_train(const RunConfig& config) {
    return run_command("train", config, [&] {
        Dataset ds = load_dataset(config);
        std::vector<std::pair<VideoLatent, Condition>> data;
        for (const auto& row : ds.rows)
            data.emplace_back(ds.clip(row), shape_condition(row.shape_kind));

        NoiseSchedule schedule = config.make_noise_schedule();
        SeededRng init_rng(derive_seed(config.seeds.master, kTrainSalt));
        DenoiserNet net(config.denoiser_config(), init_rng);
        TrainingResult result =
            train_denoiser(net, data, schedule, config.training_config(), init_rng);

        std::filesystem::path out_dir(config.output.dir);
        net.save(out_dir / "model.msga");
        {
            std::ofstream loss_csv(out_dir / "loss.csv", std::ios::trunc);
            loss_csv << "step,loss\n";
            for (std::size_t i = 0; i < result.loss_curve.size(); ++i)
                loss_csv << i << "," << format_metric(result.loss_curve[i]) << "\n";
        }
        CommandOutcome outcome;
        outcome.summary = "trained " + std::to_string(config.training.steps) +
                          " steps, loss " + format_metric(result.initial_loss) + " -> " +
                          format_metric(result.final_loss);
        outcome.outputs = {"model.msga", "loss.csv"};
        return outcome;
    });
}

int cmd_sample(const RunConfig& config) {
    return run_command("sample", config, [&] {
        GuidanceMode mode = config.guidance_mode();
        if (mode == GuidanceMode::Msg || mode == GuidanceMode::Usg)
            throw std::runtime_error(
                "sample: guidance.mode msg/usg needs a reference clip; use the transfer "
                "command");
        DenoiserNet net = load_model(config);
        NoiseSchedule schedule = config.make_noise_schedule();
        LearnedScoreField field(net, schedule);

        GuidanceSpec guid;
        guid.mode = mode;
        guid.cfg_lambda = config.guidance.cfg_lambda;
        if (mode != GuidanceMode::Conditional)
            guid.window = window_steps(schedule, schedule.n_steps(),
                                       config.transfer.window_ratio);
        SamplerConfig sampler_cfg;  // pure-noise start

        std::filesystem::path dir = std::filesystem::path(config.output.dir) / "samples";
        std::filesystem::create_directories(dir);
        Condition y = config.sample.condition < 0
                          ? Condition::null()
                          : Condition::category(config.sample.condition);
        CommandOutcome outcome;
        for (int i = 0; i < config.sample.count; ++i) {
            SeededRng rng(derive_seed(derive_seed(config.seeds.master, kSampleSalt), i));
            VideoLatent clip = sample(field, guid, nullptr, sampler_cfg, schedule, y, rng);
            std::string name = zero_padded("sample_", i, ".msgt");
            save_tensor(dir / name, clip);
            export_frames(dir / zero_padded("sample_", i, ""), clip);
            outcome.outputs.push_back("samples/" + name);
        }
        outcome.summary = "wrote " + std::to_string(config.sample.count) + " samples to " +
                          dir.string();
        return outcome;
    });
}

int cmd_transfer(const RunConfig& config) {
    return run_command("transfer", config, [&] {
        Dataset ds = load_dataset(config);
        DenoiserNet net = load_model(config);
        NoiseSchedule schedule = config.make_noise_schedule();
        LearnedScoreField field(net, schedule);
        TransferConfig tc = config.transfer_config();
        tc.validate(schedule);

        std::size_t count = ds.rows.size();
        if (config.transfer.count > 0)
            count = std::min<std::size_t>(count, config.transfer.count);

        std::filesystem::path dir = std::filesystem::path(config.output.dir) / "transfers";
        std::filesystem::create_directories(dir);
        CommandOutcome outcome;
        for (std::size_t i = 0; i < count; ++i) {
            const ManifestRow& row = ds.rows[i];
            VideoLatent reference = ds.clip(row);
            Condition y_ref = shape_condition(row.shape_kind);
            Condition y_target = target_condition(config, row);
            std::uint64_t seed =
                derive_seed(derive_seed(config.seeds.master, kTransferSalt), row.id);

            VideoLatent result;
            if (tc.mode == GuidanceMode::Msg || tc.mode == GuidanceMode::Usg) {
                MotionRepresentation rep =
                    extract_motion(reference, y_ref, field, schedule, tc, seed);
                if (config.transfer.save_motion) {
                    std::string motion_name = zero_padded("motion_", row.id, ".msga");
                    rep.save(dir / motion_name);
                    outcome.outputs.push_back("transfers/" + motion_name);
                }
                result = generate_with_motion(reference, y_target, field, schedule, tc,
                                              &rep, seed);
            } else {
                result = generate_with_motion(reference, y_target, field, schedule, tc,
                                              nullptr, seed);
            }
            std::string name = zero_padded("transfer_", row.id, ".msgt");
            save_tensor(dir / name, result);
            export_frames(dir / zero_padded("transfer_", row.id, ""), result);
            outcome.outputs.push_back("transfers/" + name);
        }
        outcome.summary = "transferred " + std::to_string(count) + " clips (" +
                          config.guidance.mode + ") to " + dir.string();
        return outcome;
    });
}

int cmd_eval(const RunConfig& config) {
    return run_command("eval", config, [&] {
        Dataset ds = load_dataset(config);
        std::filesystem::path outputs_dir =
            std::filesystem::path(config.output.dir) / config.eval.outputs;
        if (!std::filesystem::exists(outputs_dir))
            throw std::runtime_error("missing outputs directory " + outputs_dir.string());
        MetricsReport report = eval_report(ds.rows, ds.dir, outputs_dir);
        std::filesystem::path csv = std::filesystem::path(config.output.dir) / "report.csv";
        write_report_csv(csv, report);

        std::string overall = "no clips evaluated";
        for (const auto& s : report.summaries)
            if (s.category == "overall")
                overall = "motion_fidelity " + format_metric(s.mean_motion_fidelity) +
                          ", temporal_consistency " +
                          format_metric(s.mean_temporal_consistency) + ", frechet " +
                          format_metric(s.frechet);
        CommandOutcome outcome;
        outcome.summary = std::to_string(report.rows.size()) + " clips (" +
                          std::to_string(report.warnings.size()) + " warnings): " + overall;
        outcome.outputs = {"report.csv"};
        return outcome;
    });
}

int cmd_ablate(const RunConfig& config) {
    return run_command("ablate", config, [&] {
        if (config.ablate.strengths.empty() || config.ablate.window_ratios.empty() ||
            config.ablate.modes.empty())
            throw std::runtime_error("ablate: sweep lists must be non-empty");
        Dataset ds = load_dataset(config);
        DenoiserNet net = load_model(config);
        NoiseSchedule schedule = config.make_noise_schedule();
        LearnedScoreField field(net, schedule);

        std::size_t clip_count = std::min<std::size_t>(
            ds.rows.size(), std::max(1, config.ablate.clip_count));

        std::filesystem::path csv_path =
            std::filesystem::path(config.output.dir) / "ablation.csv";
        std::ofstream csv(csv_path, std::ios::trunc);
        if (!csv) throw std::runtime_error("cannot write " + csv_path.string());
        csv << "strength,window_ratio,mode,clip,category,motion_fidelity,"
               "temporal_consistency,frechet,status\n";

        int cells = 0, failures = 0;
        std::uint64_t sweep_seed = derive_seed(config.seeds.master, kAblateSalt);
        for (double strength : config.ablate.strengths) {
            for (double ratio : config.ablate.window_ratios) {
                for (const std::string& mode_name : config.ablate.modes) {
                    TransferConfig tc = config.transfer_config();
                    tc.strength = strength;
                    tc.window_ratio = ratio;
                    tc.mode = guidance_mode_from_string(mode_name);

                    std::vector<VideoLatent> outputs, references;
                    std::vector<double> mf_values, tc_values;
                    for (std::size_t i = 0; i < clip_count; ++i) {
                        const ManifestRow& row = ds.rows[i];
                        ++cells;
                        std::string prefix = format_metric(strength) + "," +
                                             format_metric(ratio) + "," + mode_name + "," +
                                             std::to_string(row.id) + "," +
                                             to_string(row.category) + ",";
                        try {
                            VideoLatent reference = ds.clip(row);
                            std::uint64_t seed = derive_seed(sweep_seed, row.id);
                            VideoLatent out =
                                transfer(reference, shape_condition(row.shape_kind),
                                         target_condition(config, row), field, schedule,
                                         tc, seed);
                            double mf = motion_fidelity(centroid_track(out),
                                                        centroid_track(reference));
                            double tcons = temporal_consistency(out);
                            csv << prefix << format_metric(mf) << ","
                                << format_metric(tcons) << ",,ok\n";
                            mf_values.push_back(mf);
                            tc_values.push_back(tcons);
                            outputs.push_back(std::move(out));
                            references.push_back(ds.clip(row));
                        } catch (const std::exception& e) {
                            ++failures;
                            std::string reason = e.what();
                            for (char& ch : reason)
                                if (ch == ',' || ch == '\n') ch = ';';
                            csv << prefix << ",,," << "failed: " << reason << "\n";
                        }
                    }
                    if (outputs.size() >= 2) {
                        double mf_mean = 0, tc_mean = 0;
                        for (double v : mf_values) mf_mean += v;
                        for (double v : tc_values) tc_mean += v;
                        mf_mean /= mf_values.size();
                        tc_mean /= tc_values.size();
                        csv << format_metric(strength) << "," << format_metric(ratio) << ","
                            << mode_name << ",summary,-," << format_metric(mf_mean) << ","
                            << format_metric(tc_mean) << ","
                            << format_metric(frechet_gaussian(outputs, references))
                            << ",ok\n";
                    }
                }
            }
        }
        CommandOutcome outcome;
        outcome.summary = std::to_string(cells) + " sweep cells (" +
                          std::to_string(failures) + " failures) -> " + csv_path.string();
        outcome.outputs = {"ablation.csv"};
        return outcome;
    });
}

}  // namespace msg
