#pragma once

#include <vector>

#include "msg/latent.hpp"

namespace msg {

enum class GuidanceMode { Conditional, Cfg, Usg, Msg };

const char* to_string(GuidanceMode mode);
GuidanceMode guidance_mode_from_string(const std::string& name);

// Guidance mode plus the reverse-process steps it is active on. Outside the
// window every mode falls back to the plain conditional score.
struct GuidanceSpec {
    GuidanceMode mode = GuidanceMode::Conditional;
    double cfg_lambda = 2.0;
    double usg_weight = 1.0;
    double msg_weight = 1.0;
    std::vector<int> window;

    bool in_window(int step) const;
    void validate() const;
};

// (1 - lambda) * uncond + lambda * cond, computed as
// cond + (lambda - 1) * (cond - uncond) so that cfg at lambda = 1 + w is
// bit-identical to msg_combine with the reference equal to cond.
VideoLatent cfg_combine(const VideoLatent& uncond, const VideoLatent& cond,
                        double lambda);

// cond + w * (ref_cond - uncond): conditional score of the current sample
// plus the weighted gap between the reference's conditional score and the
// current sample's unconditional score.
VideoLatent msg_combine(const VideoLatent& cond, const VideoLatent& ref_cond,
                        const VideoLatent& uncond, double w);

// cond + w * (ref_uncond - uncond): the ablation baseline that swaps the
// reference's unconditional score into the mixture slot.
VideoLatent usg_combine(const VideoLatent& cond, const VideoLatent& ref_uncond,
                        const VideoLatent& uncond, double w);

// Gradient of the mixed potential
//   U = U_content + w * (U_motion - U_prior)
// which is exactly the msg_combine mixture; kept as its own entry point so
// the Langevin sampler states its intent.
VideoLatent mixed_potential_drift(const VideoLatent& content_grad,
                                  const VideoLatent& motion_grad,
                                  const VideoLatent& prior_grad, double w);

}  // namespace msg
