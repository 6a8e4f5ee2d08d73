#include "msg/score_field.hpp"

#include <stdexcept>

namespace msg {

AnalyticScoreField::AnalyticScoreField(MixtureModel model, const NoiseSchedule& schedule,
                                       LatentShape shape)
    : model_(std::move(model)), schedule_(schedule), shape_(shape) {
    if (static_cast<std::size_t>(model_.dim()) != shape.size())
        throw std::invalid_argument("AnalyticScoreField: model dimension does not match shape");
}

VideoLatent AnalyticScoreField::score(const VideoLatent& z, int step,
                                      const Condition& y) const {
    return analytic_score(model_, z, schedule_.t_grid(step), schedule_, y);
}

}  // namespace msg
