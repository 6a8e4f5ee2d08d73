#include "msg/schedule.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace msg {

NoiseSchedule::NoiseSchedule(double beta_min, double beta_max, int n_steps)
    : beta_min_(beta_min), beta_max_(beta_max), n_steps_(n_steps) {
    if (!(beta_min > 0.0))
        throw std::invalid_argument("NoiseSchedule: beta_min must be > 0");
    if (!(beta_max >= beta_min))
        throw std::invalid_argument("NoiseSchedule: beta_max must be >= beta_min");
    if (n_steps < 2)
        throw std::invalid_argument("NoiseSchedule: n_steps must be >= 2");
    t_grid_.resize(n_steps + 1);
    alpha_bar_.resize(n_steps + 1);
    alpha_.resize(n_steps + 1);
    sigma_.resize(n_steps + 1);
    for (int k = 0; k <= n_steps; ++k) {
        double t = static_cast<double>(k) / n_steps;
        t_grid_[k] = t;
        alpha_bar_[k] = alpha_bar_at(t);
        alpha_[k] = std::sqrt(alpha_bar_[k]);
        sigma_[k] = std::sqrt(1.0 - alpha_bar_[k]);
    }
    // t = 0 boundary exactly: alpha_bar(0) = exp(0) = 1.
    alpha_[0] = 1.0;
    sigma_[0] = 0.0;
}

int NoiseSchedule::check_index(int k) const {
    if (k < 0 || k > n_steps_)
        throw std::out_of_range("schedule index " + std::to_string(k) +
                                " out of [0, " + std::to_string(n_steps_) + "]");
    return k;
}

double NoiseSchedule::beta_at(double t) const {
    if (!(t >= 0.0 && t <= 1.0))
        throw std::invalid_argument("beta_at: t must be in [0, 1]");
    return beta_min_ + t * (beta_max_ - beta_min_);
}

double NoiseSchedule::alpha_bar_at(double t) const {
    if (!(t >= 0.0 && t <= 1.0))
        throw std::invalid_argument("alpha_bar_at: t must be in [0, 1]");
    return std::exp(-beta_min_ * t - 0.5 * (beta_max_ - beta_min_) * t * t);
}

double NoiseSchedule::alpha_at(double t) const { return std::sqrt(alpha_bar_at(t)); }

double NoiseSchedule::sigma_at(double t) const {
    return std::sqrt(1.0 - alpha_bar_at(t));
}

NoiseSchedule make_schedule(double beta_min, double beta_max, int n_steps) {
    return NoiseSchedule(beta_min, beta_max, n_steps);
}

int strength_to_step(const NoiseSchedule& s, double strength) {
    if (!(strength > 0.0 && strength <= 1.0))
        throw std::invalid_argument("strength must be in (0, 1]");
    long step = std::lround(strength * s.n_steps());
    if (step < 1) step = 1;
    if (step > s.n_steps()) step = s.n_steps();
    return static_cast<int>(step);
}

std::vector<int> window_steps(const NoiseSchedule& s, int start_step, double ratio) {
    if (start_step < 1 || start_step > s.n_steps())
        throw std::invalid_argument("window_steps: start_step out of [1, N]");
    if (!(ratio > 0.0 && ratio <= 1.0))
        throw std::invalid_argument("window_steps: ratio must be in (0, 1]");
    // Guard against 0.1 * 50 landing an ulp above the integer.
    int count = static_cast<int>(std::ceil(ratio * s.n_steps() - 1e-9));
    if (count < 1) count = 1;
    std::vector<int> steps;
    for (int k = start_step; k >= 1 && static_cast<int>(steps.size()) < count; --k)
        steps.push_back(k);
    return steps;
}

}  // namespace msg
