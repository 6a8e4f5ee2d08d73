#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "msg/latent.hpp"
#include "msg/schedule.hpp"

namespace msg {

// Gaussian data component. Diagonal covariances take a fast path sized for
// latent-shaped models; dense covariances go through an LLT factorization.
class GaussianModel {
public:
    static GaussianModel diagonal(Eigen::VectorXd mean, Eigen::VectorXd variances);
    static GaussianModel dense(Eigen::VectorXd mean, Eigen::MatrixXd covariance);
    static GaussianModel isotropic(int dim, double mean, double variance);

    int dim() const { return static_cast<int>(mean_.size()); }
    const Eigen::VectorXd& mean() const { return mean_; }
    bool is_diagonal() const { return diagonal_; }
    const Eigen::VectorXd& diag_variances() const { return diag_; }
    const Eigen::MatrixXd& covariance() const { return cov_; }

private:
    GaussianModel() = default;
    Eigen::VectorXd mean_;
    Eigen::VectorXd diag_;  // diagonal path
    Eigen::MatrixXd cov_;   // dense path
    bool diagonal_ = true;
};

struct MixtureComponent {
    double weight = 1.0;
    GaussianModel gaussian;
    std::optional<int> label;  // Condition category; nullopt = unlabeled
};

// Mixture of Gaussians standing in for the data distribution. Conditioning
// on a category restricts to the matching components (weights renormalized);
// the null condition keeps all of them.
class MixtureModel {
public:
    explicit MixtureModel(std::vector<MixtureComponent> components);

    int dim() const;
    const std::vector<MixtureComponent>& components() const { return components_; }

private:
    std::vector<MixtureComponent> components_;
};

// Exact score of the VP-diffused mixture
//   p_t(z | y) = sum_i w_i N(z; alpha_t mu_i, alpha_t^2 Sigma_i + sigma_t^2 I)
// restricted to components matching y.
VideoLatent analytic_score(const MixtureModel& m, const VideoLatent& z, double t,
                           const NoiseSchedule& s, const Condition& y);

double analytic_log_density(const MixtureModel& m, const VideoLatent& z, double t,
                            const NoiseSchedule& s, const Condition& y);

// Flat-vector variants used by oracles and by the latent wrappers above.
Eigen::VectorXd analytic_score_vec(const MixtureModel& m, const Eigen::VectorXd& z,
                                   double t, const NoiseSchedule& s, const Condition& y);
double analytic_log_density_vec(const MixtureModel& m, const Eigen::VectorXd& z,
                                double t, const NoiseSchedule& s, const Condition& y);

}  // namespace msg
