#pragma once

#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "msg/guidance.hpp"
#include "msg/latent.hpp"
#include "msg/rng.hpp"
#include "msg/schedule.hpp"
#include "msg/score_field.hpp"

namespace msg {

enum class NoiseMode { Stochastic, Deterministic };

struct SamplerConfig {
    int start_step = 0;  // 0 = start at step N (pure noise)
    NoiseMode noise_mode = NoiseMode::Stochastic;

    int resolved_start(const NoiseSchedule& s) const {
        return start_step == 0 ? s.n_steps() : start_step;
    }
};

// Per-step reference scores consumed by MSG/USG inside the guidance window.
struct ReferenceScores {
    std::map<int, VideoLatent> cond;    // step -> score of z*_step under y*
    std::map<int, VideoLatent> uncond;  // step -> score of z*_step under null
};

// Observer record for one reverse step; used to verify the stream contract.
struct StepTrace {
    int step = 0;
    GuidanceMode applied = GuidanceMode::Conditional;
    bool in_window = false;
    std::uint64_t rng_draws = 0;  // cumulative uniforms consumed before the step
};

// z*_t = alpha_t z0 + sigma_t eps with eps from rng. Always consumes one
// latent's worth of draws so the stream position is step-independent.
VideoLatent forward_noise(const VideoLatent& z0, int step, const NoiseSchedule& s,
                          SeededRng& rng);
// Test hook with the noise supplied by the caller.
VideoLatent forward_noise_with(const VideoLatent& z0, int step, const NoiseSchedule& s,
                               const VideoLatent& eps);

// One Euler-Maruyama step of the reverse VP-SDE at t = step / N:
//   stochastic:    z' = z + (beta/2 z + beta s) dt + sqrt(beta dt) xi
//   deterministic: z' = z + (beta/2 z + beta/2 s) dt          (probability flow)
VideoLatent reverse_step(const VideoLatent& z, int step, const VideoLatent& score,
                         const NoiseSchedule& s, const SamplerConfig& cfg, SeededRng& rng);
VideoLatent reverse_step_with(const VideoLatent& z, int step, const VideoLatent& score,
                              const NoiseSchedule& s, const SamplerConfig& cfg,
                              const VideoLatent& xi);

// Full reverse chain from cfg.resolved_start() down to step 1, querying the
// guidance dispatcher at every step. MSG/USG mix only on window steps and
// require reference scores there; everywhere else the plain conditional
// score drives the step. Scores never consume rng, so the draw sequence is
// identical across guidance modes.
VideoLatent sample(const ScoreField& field, const GuidanceSpec& guid,
                   const ReferenceScores* refs, const SamplerConfig& cfg,
                   const NoiseSchedule& s, const Condition& y, SeededRng& rng,
                   const std::optional<VideoLatent>& init = std::nullopt,
                   std::vector<StepTrace>* trace = nullptr);

struct LangevinConfig {
    double step_size = 0.01;
    int n_iters = 1;
    double inverse_temperature = 1.0;

    void validate() const;
};

// Unadjusted Langevin iterates
//   z_{k+1} = z_k + (eps/2) drift(z_k) + sqrt(eps / beta) xi_k
// returning the full chain including the initial state. Any non-finite state
// aborts with the offending iteration index.
std::vector<VideoLatent> langevin_sample(
    const std::function<VideoLatent(const VideoLatent&)>& drift,
    const LangevinConfig& cfg, const VideoLatent& init, SeededRng& rng);

}  // namespace msg
