#include "msg/config.hpp"

#include <set>

namespace msg {

namespace {

// Tracks which keys were consumed so leftovers can be reported by path.
class Reader {
public:
    explicit Reader(const toml::Table& table) : table_(table) {}

    const toml::Value* find(const std::string& key) {
        consumed_.insert(key);
        auto it = table_.find(key);
        return it == table_.end() ? nullptr : &it->second;
    }

    void read(const std::string& key, double& out) {
        if (const auto* v = find(key)) out = v->as_float(key);
    }
    void read(const std::string& key, int& out) {
        if (const auto* v = find(key)) out = static_cast<int>(v->as_integer(key));
    }
    void read(const std::string& key, std::uint64_t& out) {
        if (const auto* v = find(key)) out = static_cast<std::uint64_t>(v->as_integer(key));
    }
    void read(const std::string& key, bool& out) {
        if (const auto* v = find(key)) out = v->as_boolean(key);
    }
    void read(const std::string& key, std::string& out) {
        if (const auto* v = find(key)) out = v->as_string(key);
    }
    void read(const std::string& key, std::vector<double>& out) {
        if (const auto* v = find(key)) out = v->as_float_array(key);
    }
    void read(const std::string& key, std::vector<std::string>& out) {
        if (const auto* v = find(key)) out = v->as_string_array(key);
    }
    void read(const std::string& key, std::vector<int>& out) {
        if (const auto* v = find(key)) {
            out.clear();
            for (double d : v->as_float_array(key)) out.push_back(static_cast<int>(d));
        }
    }

    void reject_unknown() const {
        for (const auto& [key, value] : table_) {
            if (!consumed_.count(key))
                throw ConfigError("unknown config key '" + key + "' (line " +
                                  std::to_string(value.line) + ")");
        }
    }

private:
    const toml::Table& table_;
    std::set<std::string> consumed_;
};

}  // namespace

RunConfig RunConfig::from_table(const toml::Table& table) {
    RunConfig cfg;
    Reader r(table);

    r.read("schedule.beta_min", cfg.schedule.beta_min);
    r.read("schedule.beta_max", cfg.schedule.beta_max);
    r.read("schedule.n_steps", cfg.schedule.n_steps);

    r.read("data.frames", cfg.data.frames);
    r.read("data.height", cfg.data.height);
    r.read("data.width", cfg.data.width);
    r.read("data.single_count", cfg.data.single_count);
    r.read("data.multi_count", cfg.data.multi_count);
    r.read("data.camera_count", cfg.data.camera_count);
    r.read("data.amplitude", cfg.data.amplitude);
    r.read("data.blob_sigma", cfg.data.blob_sigma);

    r.read("model.hidden", cfg.model.hidden);
    r.read("model.time_features", cfg.model.time_features);
    r.read("model.cond_embed", cfg.model.cond_embed);

    r.read("training.steps", cfg.training.steps);
    r.read("training.batch_size", cfg.training.batch_size);
    r.read("training.learning_rate", cfg.training.learning_rate);
    r.read("training.p_drop", cfg.training.p_drop);
    r.read("training.clip_norm", cfg.training.clip_norm);

    r.read("guidance.mode", cfg.guidance.mode);
    r.read("guidance.cfg_lambda", cfg.guidance.cfg_lambda);
    r.read("guidance.usg_weight", cfg.guidance.usg_weight);
    r.read("guidance.msg_weight", cfg.guidance.msg_weight);

    r.read("transfer.strength", cfg.transfer.strength);
    r.read("transfer.window_ratio", cfg.transfer.window_ratio);
    r.read("transfer.target", cfg.transfer.target);
    r.read("transfer.count", cfg.transfer.count);
    r.read("transfer.save_motion", cfg.transfer.save_motion);

    r.read("sample.count", cfg.sample.count);
    r.read("sample.condition", cfg.sample.condition);

    r.read("eval.outputs", cfg.eval.outputs);

    r.read("ablate.strengths", cfg.ablate.strengths);
    r.read("ablate.window_ratios", cfg.ablate.window_ratios);
    r.read("ablate.modes", cfg.ablate.modes);
    r.read("ablate.clip_count", cfg.ablate.clip_count);

    r.read("output.dir", cfg.output.dir);
    r.read("seeds.master", cfg.seeds.master);

    r.reject_unknown();

    // Cheap structural checks; numeric domains are enforced where used.
    guidance_mode_from_string(cfg.guidance.mode);
    for (const auto& m : cfg.ablate.modes) guidance_mode_from_string(m);
    if (cfg.transfer.target != "swap") {
        try {
            int id = std::stoi(cfg.transfer.target);
            if (id < 0) throw std::invalid_argument("negative");
        } catch (const std::exception&) {
            throw ConfigError("transfer.target must be \"swap\" or a category id, got '" +
                              cfg.transfer.target + "'");
        }
    }
    return cfg;
}

RunConfig RunConfig::from_file(const std::filesystem::path& path) {
    try {
        return from_table(toml::parse_file(path));
    } catch (const toml::TomlError& e) {
        throw ConfigError(e.what());
    }
}

NoiseSchedule RunConfig::make_noise_schedule() const {
    return NoiseSchedule(schedule.beta_min, schedule.beta_max, schedule.n_steps);
}

SuiteConfig RunConfig::suite_config() const {
    SuiteConfig cfg;
    cfg.single_count = data.single_count;
    cfg.multi_count = data.multi_count;
    cfg.camera_count = data.camera_count;
    cfg.frame_shape = LatentShape{data.frames, data.height, data.width, 1};
    cfg.amplitude = data.amplitude;
    cfg.blob_sigma = data.blob_sigma;
    return cfg;
}

DenoiserConfig RunConfig::denoiser_config() const {
    DenoiserConfig cfg;
    cfg.shape = LatentShape{data.frames, data.height, data.width, 1};
    cfg.n_categories = 2;
    cfg.hidden = model.hidden;
    cfg.time_features = model.time_features;
    cfg.cond_embed = model.cond_embed;
    return cfg;
}

TrainingConfig RunConfig::training_config() const {
    TrainingConfig cfg;
    cfg.steps = training.steps;
    cfg.batch_size = training.batch_size;
    cfg.learning_rate = training.learning_rate;
    cfg.p_drop = training.p_drop;
    cfg.clip_norm = training.clip_norm;
    return cfg;
}

GuidanceMode RunConfig::guidance_mode() const {
    return guidance_mode_from_string(guidance.mode);
}

TransferConfig RunConfig::transfer_config() const {
    TransferConfig cfg;
    cfg.strength = transfer.strength;
    cfg.window_ratio = transfer.window_ratio;
    cfg.mode = guidance_mode();
    cfg.msg_weight = guidance.msg_weight;
    cfg.usg_weight = guidance.usg_weight;
    cfg.cfg_lambda = guidance.cfg_lambda;
    return cfg;
}

}  // namespace msg
