#pragma once

#include <vector>

namespace msg {

// Variance-preserving noise schedule with linear beta(t) on t in [0, 1].
//
//   beta(t)      = beta_min + t * (beta_max - beta_min)
//   alpha_bar(t) = exp(-beta_min * t - (beta_max - beta_min) * t^2 / 2)
//   alpha(t)     = sqrt(alpha_bar(t)),  sigma(t) = sqrt(1 - alpha_bar(t))
//
// alpha_bar is kept in closed form so coefficients are exact at any t, which
// the strength-based inversion start depends on. Tables are discretized on
// the uniform grid t_k = k / N, k = 0..N.
class NoiseSchedule {
public:
    NoiseSchedule(double beta_min, double beta_max, int n_steps);

    double beta_min() const { return beta_min_; }
    double beta_max() const { return beta_max_; }
    int n_steps() const { return n_steps_; }

    // Continuous evaluators, t in [0, 1].
    double beta_at(double t) const;
    double alpha_bar_at(double t) const;
    double alpha_at(double t) const;
    double sigma_at(double t) const;

    // Discrete tables, index k in [0, N].
    double t_grid(int k) const { return t_grid_[check_index(k)]; }
    double alpha_bar(int k) const { return alpha_bar_[check_index(k)]; }
    double alpha(int k) const { return alpha_[check_index(k)]; }
    double sigma(int k) const { return sigma_[check_index(k)]; }

    double dt() const { return 1.0 / n_steps_; }

private:
    int check_index(int k) const;

    double beta_min_;
    double beta_max_;
    int n_steps_;
    std::vector<double> t_grid_;
    std::vector<double> alpha_bar_;
    std::vector<double> alpha_;
    std::vector<double> sigma_;
};

NoiseSchedule make_schedule(double beta_min, double beta_max, int n_steps);

// round(strength * N), clamped to [1, N].
int strength_to_step(const NoiseSchedule& s, double strength);

// The first ceil(ratio * N) reverse-process steps descending from
// start_step, truncated at 1.
std::vector<int> window_steps(const NoiseSchedule& s, int start_step, double ratio);

}  // namespace msg
