#pragma once

#include <filesystem>
#include <vector>

#include "msg/latent.hpp"
#include "msg/sampler.hpp"
#include "msg/schedule.hpp"
#include "msg/score_field.hpp"

namespace msg {

// One guidance-window step of the frozen motion descriptor: the re-noised
// reference latent and its scores at that step. The unconditional score
// rides along for the usg baseline.
struct MotionEntry {
    int step = 0;
    double time = 0.0;
    VideoLatent noised_reference;
    VideoLatent cond_score;
    VideoLatent uncond_score;
};

struct MotionRepresentation {
    std::vector<MotionEntry> entries;  // same order as the guidance window
    Condition reference_condition = Condition::null();
    std::uint64_t extraction_seed = 0;

    std::vector<int> window() const;
    ReferenceScores reference_scores() const;

    void save(const std::filesystem::path& path) const;
    static MotionRepresentation load(const std::filesystem::path& path);
};

struct TransferConfig {
    double strength = 0.7;
    double window_ratio = 0.1;
    GuidanceMode mode = GuidanceMode::Msg;
    double msg_weight = 1.0;
    double usg_weight = 1.0;
    double cfg_lambda = 2.0;
    NoiseMode noise_mode = NoiseMode::Stochastic;

    void validate(const NoiseSchedule& s) const;
    GuidanceSpec guidance_spec(const NoiseSchedule& s) const;
};

// Phase 1: noise the reference to each window step (independent eps per
// step, seed-derived) and record the field's scores there.
MotionRepresentation extract_motion(const VideoLatent& reference, const Condition& y_ref,
                                    const ScoreField& field, const NoiseSchedule& s,
                                    const TransferConfig& tc, std::uint64_t seed);

// Phase 2: reverse-sample from the strength-noised reference under the
// target condition, mixing the frozen reference scores inside the window.
// The phase-2 rng stream is derived independently of extraction, so a
// conditional regeneration from the same seed shares it draw for draw.
VideoLatent generate_with_motion(const VideoLatent& reference, const Condition& y_target,
                                 const ScoreField& field, const NoiseSchedule& s,
                                 const TransferConfig& tc, const MotionRepresentation* rep,
                                 std::uint64_t seed, std::vector<StepTrace>* trace = nullptr);

// extract_motion + generate_with_motion under one seed.
VideoLatent transfer(const VideoLatent& reference, const Condition& y_ref,
                     const Condition& y_target, const ScoreField& field,
                     const NoiseSchedule& s, const TransferConfig& tc, std::uint64_t seed,
                     std::vector<StepTrace>* trace = nullptr);

// Plain conditional regeneration from the same inversion start and phase-2
// stream; the w = 0 collapse baseline.
VideoLatent regenerate(const VideoLatent& reference, const Condition& y_target,
                       const ScoreField& field, const NoiseSchedule& s,
                       const TransferConfig& tc, std::uint64_t seed);

}  // namespace msg
