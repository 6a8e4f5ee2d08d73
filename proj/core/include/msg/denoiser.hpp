#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <utility>
#include <vector>

#include "msg/latent.hpp"
#include "msg/rng.hpp"
#include "msg/schedule.hpp"
#include "msg/score_field.hpp"

namespace msg {

struct DenoiserConfig {
    LatentShape shape{8, 16, 16, 1};
    int n_categories = 2;
    std::vector<int> hidden = {256, 256};
    int time_features = 16;  // sinusoidal, must be even
    int cond_embed = 16;

    int input_dim() const {
        return static_cast<int>(shape.size()) + time_features + cond_embed;
    }
    void validate() const;
};

// Tiny conditional epsilon-prediction MLP over the flattened latent with
// sinusoidal time features and a learned condition embedding table (one
// extra row for the null condition). Parameters are kept float32
// representable; all arithmetic runs in double.
class DenoiserNet {
public:
    DenoiserNet(const DenoiserConfig& cfg, SeededRng& rng);  // Xavier init
    static DenoiserNet zeros(const DenoiserConfig& cfg);

    const DenoiserConfig& config() const { return cfg_; }

    VideoLatent predict_eps(const VideoLatent& z, double t, const Condition& y) const;
    // score = -eps_hat / sigma_step; step 0 is rejected (sigma = 0).
    VideoLatent score_at(const VideoLatent& z, int step, const NoiseSchedule& s,
                         const Condition& y) const;

    struct Batch {
        std::vector<VideoLatent> noisy;
        std::vector<double> times;
        std::vector<Condition> conditions;
        std::vector<VideoLatent> targets;

        std::size_t size() const { return noisy.size(); }
    };

    // Mean over the batch of the squared L2 residual |eps_hat - eps|^2
    // (summed over coordinates, so a zero net scores ~d on unit noise).
    double loss(const Batch& batch) const;
    double loss_and_gradients(const Batch& batch, std::vector<double>& grads) const;

    // Flat parameter view in a fixed order; used by SGD and the
    // finite-difference checks.
    std::size_t parameter_count() const;
    double get_parameter(std::size_t i) const;
    void set_parameter(std::size_t i, double v);
    // w -= lr * g after clipping g to the global norm bound, then
    // re-quantize to float32-representable values.
    void apply_update(const std::vector<double>& grads, double lr, double clip_norm);

    void save(const std::filesystem::path& path) const;
    static DenoiserNet load(const std::filesystem::path& path);

private:
    DenoiserNet() = default;

    Eigen::VectorXd encode_input(const VideoLatent& z, double t, const Condition& y) const;
    int condition_row(const Condition& y) const;
    void quantize_parameters();

    DenoiserConfig cfg_;
    std::vector<Eigen::MatrixXd> weights_;
    std::vector<Eigen::VectorXd> biases_;
    Eigen::MatrixXd cond_table_;  // (n_categories + 1) x cond_embed

    friend struct DenoiserParamWalk;
};

struct TrainingConfig {
    int steps = 1500;
    int batch_size = 16;
    double learning_rate = 2e-3;
    double p_drop = 0.1;  // classifier-free condition dropout
    double clip_norm = 10.0;
};

struct TrainingResult {
    std::vector<double> loss_curve;  // one entry per step
    double initial_loss = 0.0;
    double final_loss = 0.0;  // mean over the last 5% of steps
};

// Denoising score matching: regress the injected noise at uniformly drawn
// steps, dropping the condition with probability p_drop. Deterministic for
// a fixed rng; a non-finite loss aborts with the step index.
TrainingResult train_denoiser(DenoiserNet& net,
                              const std::vector<std::pair<VideoLatent, Condition>>& data,
                              const NoiseSchedule& schedule, const TrainingConfig& cfg,
                              SeededRng& rng);

class LearnedScoreField final : public ScoreField {
public:
    LearnedScoreField(const DenoiserNet& net, const NoiseSchedule& schedule)
        : net_(net), schedule_(schedule) {}

    LatentShape shape() const override { return net_.config().shape; }
    VideoLatent score(const VideoLatent& z, int step, const Condition& y) const override {
        return net_.score_at(z, step, schedule_, y);
    }

private:
    const DenoiserNet& net_;
    const NoiseSchedule& schedule_;
};

}  // namespace msg
