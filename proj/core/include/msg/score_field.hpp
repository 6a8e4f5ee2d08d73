#pragma once

#include <memory>

#include "msg/gaussian.hpp"
#include "msg/latent.hpp"
#include "msg/schedule.hpp"

namespace msg {

// Produces grad_z log p_t(z | y) at discrete schedule steps; y = null gives
// the unconditional score. Implementations are immutable once built and safe
// to share across threads.
class ScoreField {
public:
    virtual ~ScoreField() = default;
    virtual LatentShape shape() const = 0;
    virtual VideoLatent score(const VideoLatent& z, int step, const Condition& y) const = 0;
};

// Closed-form scores of a VP-diffused Gaussian mixture; the oracle backend.
class AnalyticScoreField final : public ScoreField {
public:
    AnalyticScoreField(MixtureModel model, const NoiseSchedule& schedule,
                       LatentShape shape);

    LatentShape shape() const override { return shape_; }
    VideoLatent score(const VideoLatent& z, int step, const Condition& y) const override;

    const MixtureModel& model() const { return model_; }

private:
    MixtureModel model_;
    const NoiseSchedule& schedule_;
    LatentShape shape_;
};

}  // namespace msg
