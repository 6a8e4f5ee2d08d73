#include "msg/sampler.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace msg {

namespace {

void require_step_range(int step, int lo, int hi, const char* what) {
    if (step < lo || step > hi)
        throw std::invalid_argument(std::string(what) + ": step " + std::to_string(step) +
                                    " out of [" + std::to_string(lo) + ", " +
                                    std::to_string(hi) + "]");
}

void require_finite(const VideoLatent& z, const std::string& where) {
    if (!z.all_finite())
        throw std::runtime_error("diverged: non-finite state at " + where);
}

}  // namespace

VideoLatent forward_noise_with(const VideoLatent& z0, int step, const NoiseSchedule& s,
                               const VideoLatent& eps) {
    require_step_range(step, 0, s.n_steps(), "forward_noise");
    require_same_shape(z0, eps, "forward_noise");
    const double alpha = s.alpha(step);
    const double sigma = s.sigma(step);
    VideoLatent out(z0.shape());
    for (std::size_t i = 0; i < out.size(); ++i)
        out.data()[i] = static_cast<float>(alpha * z0.data()[i] + sigma * eps.data()[i]);
    return out;
}

VideoLatent forward_noise(const VideoLatent& z0, int step, const NoiseSchedule& s,
                          SeededRng& rng) {
    return forward_noise_with(z0, step, s, gaussian_like(rng, z0.shape()));
}

VideoLatent reverse_step_with(const VideoLatent& z, int step, const VideoLatent& score,
                              const NoiseSchedule& s, const SamplerConfig& cfg,
                              const VideoLatent& xi) {
    require_step_range(step, 1, s.n_steps(), "reverse_step");
    require_same_shape(z, score, "reverse_step");
    const double beta = s.beta_at(s.t_grid(step));
    const double dt = s.dt();
    VideoLatent out(z.shape());
    if (cfg.noise_mode == NoiseMode::Deterministic) {
        // Probability-flow drift: score coefficient halved, no noise.
        for (std::size_t i = 0; i < out.size(); ++i) {
            double zi = z.data()[i];
            out.data()[i] = static_cast<float>(
                zi + (0.5 * beta * zi + 0.5 * beta * score.data()[i]) * dt);
        }
        return out;
    }
    require_same_shape(z, xi, "reverse_step");
    const double noise_coef = std::sqrt(beta * dt);
    for (std::size_t i = 0; i < out.size(); ++i) {
        double zi = z.data()[i];
        out.data()[i] =
            static_cast<float>(zi + (0.5 * beta * zi + beta * score.data()[i]) * dt +
                               noise_coef * xi.data()[i]);
    }
    return out;
}

VideoLatent reverse_step(const VideoLatent& z, int step, const VideoLatent& score,
                         const NoiseSchedule& s, const SamplerConfig& cfg, SeededRng& rng) {
    if (cfg.noise_mode == NoiseMode::Deterministic)
        return reverse_step_with(z, step, score, s, cfg, VideoLatent());
    return reverse_step_with(z, step, score, s, cfg, gaussian_like(rng, z.shape()));
}

VideoLatent sample(const ScoreField& field, const GuidanceSpec& guid,
                   const ReferenceScores* refs, const SamplerConfig& cfg,
                   const NoiseSchedule& s, const Condition& y, SeededRng& rng,
                   const std::optional<VideoLatent>& init,
                   std::vector<StepTrace>* trace) {
    guid.validate();
    const int start = cfg.resolved_start(s);
    require_step_range(start, 1, s.n_steps(), "sample");

    VideoLatent z;
    if (init) {
        if (init->shape() != field.shape())
            throw std::invalid_argument("sample: init shape does not match score field");
        z = *init;
    } else {
        if (start < s.n_steps())
            throw std::invalid_argument(
                "sample: an inversion start (start_step < N) requires an init latent");
        z = gaussian_like(rng, field.shape());
    }

    for (int k = start; k >= 1; --k) {
        VideoLatent cond = field.score(z, k, y);
        const bool active = guid.mode != GuidanceMode::Conditional && guid.in_window(k);
        VideoLatent guided;
        if (!active) {
            guided = std::move(cond);
        } else if (guid.mode == GuidanceMode::Cfg) {
            VideoLatent uncond = field.score(z, k, Condition::null());
            guided = cfg_combine(uncond, cond, guid.cfg_lambda);
        } else {
            if (refs == nullptr)
                throw std::invalid_argument(
                    std::string("sample: mode ") + to_string(guid.mode) +
                    " requires reference scores inside the window");
            const auto& table =
                guid.mode == GuidanceMode::Msg ? refs->cond : refs->uncond;
            auto it = table.find(k);
            if (it == table.end())
                throw std::invalid_argument("sample: missing reference score for window step " +
                                            std::to_string(k));
            VideoLatent uncond = field.score(z, k, Condition::null());
            guided = guid.mode == GuidanceMode::Msg
                         ? msg_combine(cond, it->second, uncond, guid.msg_weight)
                         : usg_combine(cond, it->second, uncond, guid.usg_weight);
        }
        if (trace)
            trace->push_back({k, active ? guid.mode : GuidanceMode::Conditional, active,
                              rng.draws()});
        z = reverse_step(z, k, guided, s, cfg, rng);
        require_finite(z, "reverse step " + std::to_string(k));
    }
    return z;
}

void LangevinConfig::validate() const {
    if (!(step_size > 0.0))
        throw std::invalid_argument("LangevinConfig: step_size must be > 0");
    if (n_iters < 1) throw std::invalid_argument("LangevinConfig: n_iters must be >= 1");
    if (!(inverse_temperature > 0.0))
        throw std::invalid_argument("LangevinConfig: inverse_temperature must be > 0");
}

std::vector<VideoLatent> langevin_sample(
    const std::function<VideoLatent(const VideoLatent&)>& drift,
    const LangevinConfig& cfg, const VideoLatent& init, SeededRng& rng) {
    cfg.validate();
    const double eps = cfg.step_size;
    const double noise_coef = std::sqrt(eps / cfg.inverse_temperature);
    std::vector<VideoLatent> chain;
    chain.reserve(cfg.n_iters + 1);
    chain.push_back(init);
    VideoLatent z = init;
    for (int it = 1; it <= cfg.n_iters; ++it) {
        VideoLatent d = drift(z);
        require_same_shape(z, d, "langevin_sample");
        VideoLatent xi = gaussian_like(rng, z.shape());
        for (std::size_t i = 0; i < z.size(); ++i) {
            z.data()[i] = static_cast<float>(z.data()[i] + 0.5 * eps * d.data()[i] +
                                             noise_coef * xi.data()[i]);
        }
        require_finite(z, "langevin iteration " + std::to_string(it));
        chain.push_back(z);
    }
    return chain;
}

}  // namespace msg
