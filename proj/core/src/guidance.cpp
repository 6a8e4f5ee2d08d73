#include "msg/guidance.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace msg {

const char* to_string(GuidanceMode mode) {
    switch (mode) {
        case GuidanceMode::Conditional: return "conditional";
        case GuidanceMode::Cfg: return "cfg";
        case GuidanceMode::Usg: return "usg";
        case GuidanceMode::Msg: return "msg";
    }
    return "?";
}

GuidanceMode guidance_mode_from_string(const std::string& name) {
    if (name == "conditional") return GuidanceMode::Conditional;
    if (name == "cfg") return GuidanceMode::Cfg;
    if (name == "usg") return GuidanceMode::Usg;
    if (name == "msg") return GuidanceMode::Msg;
    throw std::invalid_argument("unknown guidance mode '" + name +
                                "' (expected conditional|cfg|usg|msg)");
}

bool GuidanceSpec::in_window(int step) const {
    return std::find(window.begin(), window.end(), step) != window.end();
}

void GuidanceSpec::validate() const {
    if (usg_weight < 0.0) throw std::invalid_argument("usg weight must be >= 0");
    if (msg_weight < 0.0) throw std::invalid_argument("msg weight must be >= 0");
    if (mode != GuidanceMode::Conditional && window.empty())
        throw std::invalid_argument("guidance window must be non-empty for mode != conditional");
}

namespace {

// Shared kernel: base + coef * (a - b), elementwise. All three combinators
// go through this one expression so their algebraic identities hold bitwise.
VideoLatent affine_gap(const VideoLatent& base, double coef, const VideoLatent& a,
                       const VideoLatent& b, const char* what) {
    require_same_shape(base, a, what);
    require_same_shape(base, b, what);
    const float c = static_cast<float>(coef);
    VideoLatent out = base;
    for (std::size_t i = 0; i < out.size(); ++i)
        out.data()[i] += c * (a.data()[i] - b.data()[i]);
    return out;
}

}  // namespace

VideoLatent cfg_combine(const VideoLatent& uncond, const VideoLatent& cond,
                        double lambda) {
    if (lambda == 1.0) return cond;
    if (lambda == 0.0) {
        require_same_shape(uncond, cond, "cfg_combine");
        return uncond;
    }
    return affine_gap(cond, lambda - 1.0, cond, uncond, "cfg_combine");
}

VideoLatent msg_combine(const VideoLatent& cond, const VideoLatent& ref_cond,
                        const VideoLatent& uncond, double w) {
    if (w == 0.0) {
        require_same_shape(cond, ref_cond, "msg_combine");
        require_same_shape(cond, uncond, "msg_combine");
        return cond;
    }
    return affine_gap(cond, w, ref_cond, uncond, "msg_combine");
}

VideoLatent usg_combine(const VideoLatent& cond, const VideoLatent& ref_uncond,
                        const VideoLatent& uncond, double w) {
    if (w == 0.0) {
        require_same_shape(cond, ref_uncond, "usg_combine");
        require_same_shape(cond, uncond, "usg_combine");
        return cond;
    }
    return affine_gap(cond, w, ref_uncond, uncond, "usg_combine");
}

VideoLatent mixed_potential_drift(const VideoLatent& content_grad,
                                  const VideoLatent& motion_grad,
                                  const VideoLatent& prior_grad, double w) {
    return msg_combine(content_grad, motion_grad, prior_grad, w);
}

}  // namespace msg
