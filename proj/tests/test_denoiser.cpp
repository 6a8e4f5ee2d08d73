#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <stdexcept>

#include "msg/denoiser.hpp"
#include "msg/gaussian.hpp"
#include "msg/sampler.hpp"

using msg::Condition;
using msg::DenoiserConfig;
using msg::DenoiserNet;
using msg::LatentShape;
using msg::NoiseSchedule;
using msg::SeededRng;
using msg::VideoLatent;

namespace {

DenoiserConfig tiny_config() {
    DenoiserConfig cfg;
    cfg.shape = LatentShape{2, 4, 4, 1};  // d = 32
    cfg.hidden = {24, 24};
    cfg.time_features = 8;
    cfg.cond_embed = 4;
    cfg.n_categories = 2;
    return cfg;
}

DenoiserNet::Batch random_batch(const DenoiserConfig& cfg, const NoiseSchedule& s,
                                SeededRng& rng, int n) {
    DenoiserNet::Batch batch;
    for (int b = 0; b < n; ++b) {
        batch.noisy.push_back(msg::gaussian_like(rng, cfg.shape));
        batch.times.push_back(s.t_grid(1 + static_cast<int>(rng.below(s.n_steps()))));
        int pick = static_cast<int>(rng.below(3));
        batch.conditions.push_back(pick == 2 ? Condition::null() : Condition::category(pick));
        batch.targets.push_back(msg::gaussian_like(rng, cfg.shape));
    }
    return batch;
}

}  // namespace

TEST_CASE("zero-initialized net predicts zero and scores zero") {
    DenoiserConfig cfg = tiny_config();
    DenoiserNet net = DenoiserNet::zeros(cfg);
    NoiseSchedule s(0.1, 20.0, 50);
    SeededRng rng(3);
    VideoLatent z = msg::gaussian_like(rng, cfg.shape);
    VideoLatent eps = net.predict_eps(z, 0.5, Condition::null());
    for (float v : eps.values()) CHECK(v == 0.0f);
    VideoLatent score = net.score_at(z, 25, s, Condition::category(1));
    for (float v : score.values()) CHECK(v == 0.0f);
    CHECK_THROWS_AS(net.score_at(z, 0, s, Condition::null()), std::invalid_argument);
}

TEST_CASE("expected loss of a zero net on unit noise is the latent dimension") {
    DenoiserConfig cfg = tiny_config();
    DenoiserNet net = DenoiserNet::zeros(cfg);
    NoiseSchedule s(0.1, 20.0, 50);
    SeededRng rng(4);
    DenoiserNet::Batch batch = random_batch(cfg, s, rng, 512);
    double d = static_cast<double>(cfg.shape.size());
    CHECK(net.loss(batch) == doctest::Approx(d).epsilon(0.05));
}

TEST_CASE("prediction is deterministic and bit-stable") {
    DenoiserConfig cfg = tiny_config();
    SeededRng init(9);
    DenoiserNet net(cfg, init);
    SeededRng rng(10);
    VideoLatent z = msg::gaussian_like(rng, cfg.shape);
    VideoLatent a = net.predict_eps(z, 0.42, Condition::category(0));
    VideoLatent b = net.predict_eps(z, 0.42, Condition::category(0));
    CHECK(std::memcmp(a.data(), b.data(), a.size() * sizeof(float)) == 0);

    // null condition differs from a category condition on a random net
    VideoLatent c = net.predict_eps(z, 0.42, Condition::null());
    CHECK(std::memcmp(a.data(), c.data(), a.size() * sizeof(float)) != 0);
}

TEST_CASE("backprop matches central finite differences") {
    DenoiserConfig cfg = tiny_config();
    SeededRng init(11);
    DenoiserNet net(cfg, init);
    NoiseSchedule s(0.1, 20.0, 50);
    SeededRng rng(12);
    DenoiserNet::Batch batch = random_batch(cfg, s, rng, 4);

    std::vector<double> grads;
    net.loss_and_gradients(batch, grads);
    REQUIRE(grads.size() == net.parameter_count());

    const double h = 1e-3;
    SeededRng pick(13);
    int checked = 0;
    double worst = 0.0;
    while (checked < 25) {
        std::size_t i = pick.below(net.parameter_count());
        if (std::abs(grads[i]) < 1e-4) continue;  // avoid near-zero denominators
        double original = net.get_parameter(i);
        net.set_parameter(i, original + h);
        double up = net.loss(batch);
        net.set_parameter(i, original - h);
        double down = net.loss(batch);
        net.set_parameter(i, original);
        double fd = (up - down) / (2.0 * h);
        double rel = std::abs(fd - grads[i]) / std::max(std::abs(fd), std::abs(grads[i]));
        worst = std::max(worst, rel);
        CHECK(rel < 1e-3);
        ++checked;
    }
    INFO("worst relative error ", worst);
    CHECK(checked == 25);
}

TEST_CASE("gradient update respects the clip norm and quantizes to float32") {
    DenoiserConfig cfg = tiny_config();
    SeededRng init(14);
    DenoiserNet net(cfg, init);
    std::vector<double> grads(net.parameter_count(), 1.0);
    net.apply_update(grads, 0.1, 10.0);
    for (std::size_t i = 0; i < 32; ++i) {
        double p = net.get_parameter(i);
        CHECK(p == static_cast<double>(static_cast<float>(p)));
    }
}

TEST_CASE("training on N(0,I) data recovers score close to -z") {
    DenoiserConfig cfg;
    cfg.shape = LatentShape{1, 4, 4, 1};  // d = 16
    cfg.hidden = {64, 64};
    cfg.time_features = 8;
    cfg.cond_embed = 4;
    cfg.n_categories = 1;
    NoiseSchedule s(0.1, 20.0, 50);

    SeededRng data_rng(20);
    std::vector<std::pair<VideoLatent, Condition>> data;
    for (int i = 0; i < 256; ++i)
        data.emplace_back(msg::gaussian_like(data_rng, cfg.shape), Condition::category(0));

    SeededRng train_rng(21);
    DenoiserNet net(cfg, train_rng);
    msg::TrainingConfig tcfg;
    tcfg.steps = 4000;
    tcfg.batch_size = 32;
    tcfg.learning_rate = 4e-3;
    msg::TrainingResult result = msg::train_denoiser(net, data, s, tcfg, train_rng);

    CHECK(result.final_loss < 0.5 * result.initial_loss);

    // mean relative error of the learned score against the analytic -z
    SeededRng eval_rng(22);
    double acc = 0.0;
    const int n_eval = 64;
    for (int i = 0; i < n_eval; ++i) {
        int step = 5 + static_cast<int>(eval_rng.below(45));
        VideoLatent z0 = msg::gaussian_like(eval_rng, cfg.shape);
        VideoLatent z = msg::forward_noise(z0, step, s, eval_rng);
        VideoLatent score = net.score_at(z, step, s, Condition::category(0));
        double err = 0.0, norm = 0.0;
        for (std::size_t j = 0; j < z.size(); ++j) {
            double diff = score.data()[j] - (-z.data()[j]);
            err += diff * diff;
            norm += static_cast<double>(z.data()[j]) * z.data()[j];
        }
        acc += std::sqrt(err / norm);
    }
    CHECK(acc / n_eval < 0.15);
}

TEST_CASE("training rejects bad inputs") {
    DenoiserConfig cfg = tiny_config();
    SeededRng rng(30);
    DenoiserNet net(cfg, rng);
    NoiseSchedule s(0.1, 20.0, 50);
    msg::TrainingConfig tcfg;
    std::vector<std::pair<VideoLatent, Condition>> empty;
    CHECK_THROWS_AS(msg::train_denoiser(net, empty, s, tcfg, rng), std::invalid_argument);

    std::vector<std::pair<VideoLatent, Condition>> wrong_shape;
    wrong_shape.emplace_back(VideoLatent(LatentShape{1, 2, 2, 1}), Condition::category(0));
    CHECK_THROWS_AS(msg::train_denoiser(net, wrong_shape, s, tcfg, rng),
                    std::invalid_argument);

    tcfg.p_drop = 1.0;
    std::vector<std::pair<VideoLatent, Condition>> ok;
    ok.emplace_back(VideoLatent(cfg.shape, 0.1f), Condition::category(0));
    CHECK_THROWS_AS(msg::train_denoiser(net, ok, s, tcfg, rng), std::invalid_argument);
}

TEST_CASE("save/load round-trips the net bit-exactly") {
    auto path = std::filesystem::temp_directory_path() / "msg_denoiser_test.msga";
    DenoiserConfig cfg = tiny_config();
    SeededRng rng(40);
    DenoiserNet net(cfg, rng);
    net.save(path);
    DenoiserNet loaded = DenoiserNet::load(path);
    REQUIRE(loaded.parameter_count() == net.parameter_count());
    for (std::size_t i = 0; i < net.parameter_count(); ++i)
        CHECK(loaded.get_parameter(i) == net.get_parameter(i));

    VideoLatent z = msg::gaussian_like(rng, cfg.shape);
    VideoLatent a = net.predict_eps(z, 0.3, Condition::category(1));
    VideoLatent b = loaded.predict_eps(z, 0.3, Condition::category(1));
    CHECK(std::memcmp(a.data(), b.data(), a.size() * sizeof(float)) == 0);
}

TEST_CASE("condition ids outside the table are rejected") {
    DenoiserConfig cfg = tiny_config();
    SeededRng rng(50);
    DenoiserNet net(cfg, rng);
    VideoLatent z = msg::gaussian_like(rng, cfg.shape);
    CHECK_THROWS_AS(net.predict_eps(z, 0.1, Condition::category(5)), std::invalid_argument);
}
