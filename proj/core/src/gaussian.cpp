#include "msg/gaussian.hpp"

#include <cmath>
#include <stdexcept>

namespace msg {

namespace {
constexpr double kLog2Pi = 1.8378770664093454836;

Eigen::VectorXd latent_to_vec(const VideoLatent& z) {
    Eigen::VectorXd v(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) v[static_cast<Eigen::Index>(i)] = z.data()[i];
    return v;
}

VideoLatent vec_to_latent(const Eigen::VectorXd& v, const LatentShape& shape) {
    VideoLatent out(shape);
    for (std::size_t i = 0; i < out.size(); ++i)
        out.data()[i] = static_cast<float>(v[static_cast<Eigen::Index>(i)]);
    return out;
}

struct ComponentEval {
    double log_density;
    Eigen::VectorXd grad;  // of log N_i at z
};

// log N(z; m, C) and its gradient for the diffused component.
ComponentEval eval_component(const GaussianModel& g, const Eigen::VectorXd& z,
                             double alpha_bar) {
    const double a2 = alpha_bar;              // alpha_t^2
    const double s2 = 1.0 - alpha_bar;        // sigma_t^2
    const double alpha = std::sqrt(alpha_bar);
    const Eigen::Index d = g.mean().size();
    Eigen::VectorXd diff = z - alpha * g.mean();
    if (g.is_diagonal()) {
        Eigen::VectorXd var = (a2 * g.diag_variances()).array() + s2;
        double logdet = var.array().log().sum();
        Eigen::VectorXd solved = diff.array() / var.array();
        double quad = diff.dot(solved);
        return {-0.5 * (d * kLog2Pi + logdet + quad), -solved};
    }
    Eigen::MatrixXd cov = a2 * g.covariance();
    cov.diagonal().array() += s2;
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success)
        throw std::invalid_argument("analytic score: covariance is not positive definite");
    double logdet = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
    Eigen::VectorXd solved = llt.solve(diff);
    double quad = diff.dot(solved);
    return {-0.5 * (d * kLog2Pi + logdet + quad), -solved};
}

struct MixtureEval {
    double log_density;
    Eigen::VectorXd score;
};

MixtureEval eval_mixture(const MixtureModel& m, const Eigen::VectorXd& z, double t,
                         const NoiseSchedule& s, const Condition& y) {
    if (z.size() != m.dim())
        throw std::invalid_argument("analytic score: latent dimension " +
                                    std::to_string(z.size()) + " does not match model (" +
                                    std::to_string(m.dim()) + ")");
    const double alpha_bar = s.alpha_bar_at(t);

    std::vector<ComponentEval> evals;
    std::vector<double> log_terms;  // log w_i + log N_i over the active set
    double total_weight = 0.0;
    for (const auto& comp : m.components()) {
        if (!y.is_null() && (!comp.label || *comp.label != y.id())) continue;
        total_weight += comp.weight;
        evals.push_back(eval_component(comp.gaussian, z, alpha_bar));
        log_terms.push_back(std::log(comp.weight) + evals.back().log_density);
    }
    if (evals.empty())
        throw std::invalid_argument("analytic score: no mixture component matches condition");

    double max_log = log_terms[0];
    for (double v : log_terms) max_log = std::max(max_log, v);
    double sum = 0.0;
    for (double v : log_terms) sum += std::exp(v - max_log);
    // Conditioning renormalizes the restricted weights.
    double log_density = max_log + std::log(sum) - std::log(total_weight);

    Eigen::VectorXd score = Eigen::VectorXd::Zero(z.size());
    for (std::size_t i = 0; i < evals.size(); ++i) {
        double resp = std::exp(log_terms[i] - max_log) / sum;
        score += resp * evals[i].grad;
    }
    return {log_density, score};
}

}  // namespace

GaussianModel GaussianModel::diagonal(Eigen::VectorXd mean, Eigen::VectorXd variances) {
    if (mean.size() != variances.size())
        throw std::invalid_argument("GaussianModel: mean/variance size mismatch");
    if (!(variances.array() > 0.0).all())
        throw std::invalid_argument("GaussianModel: variances must be positive");
    GaussianModel g;
    g.mean_ = std::move(mean);
    g.diag_ = std::move(variances);
    g.diagonal_ = true;
    return g;
}

GaussianModel GaussianModel::dense(Eigen::VectorXd mean, Eigen::MatrixXd covariance) {
    if (covariance.rows() != covariance.cols() || covariance.rows() != mean.size())
        throw std::invalid_argument("GaussianModel: covariance shape mismatch");
    if (!covariance.isApprox(covariance.transpose(), 1e-10))
        throw std::invalid_argument("GaussianModel: covariance must be symmetric");
    Eigen::LLT<Eigen::MatrixXd> llt(covariance);
    if (llt.info() != Eigen::Success)
        throw std::invalid_argument("GaussianModel: covariance must be positive definite");
    GaussianModel g;
    g.mean_ = std::move(mean);
    g.cov_ = std::move(covariance);
    g.diagonal_ = false;
    return g;
}

GaussianModel GaussianModel::isotropic(int dim, double mean, double variance) {
    return diagonal(Eigen::VectorXd::Constant(dim, mean),
                    Eigen::VectorXd::Constant(dim, variance));
}

MixtureModel::MixtureModel(std::vector<MixtureComponent> components)
    : components_(std::move(components)) {
    if (components_.empty())
        throw std::invalid_argument("MixtureModel: needs at least one component");
    double sum = 0.0;
    for (const auto& c : components_) {
        if (!(c.weight > 0.0))
            throw std::invalid_argument("MixtureModel: weights must be positive");
        if (c.gaussian.dim() != components_.front().gaussian.dim())
            throw std::invalid_argument("MixtureModel: component dimensions differ");
        sum += c.weight;
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw std::invalid_argument("MixtureModel: weights must sum to 1");
}

int MixtureModel::dim() const { return components_.front().gaussian.dim(); }

Eigen::VectorXd analytic_score_vec(const MixtureModel& m, const Eigen::VectorXd& z,
                                   double t, const NoiseSchedule& s, const Condition& y) {
    return eval_mixture(m, z, t, s, y).score;
}

double analytic_log_density_vec(const MixtureModel& m, const Eigen::VectorXd& z,
                                double t, const NoiseSchedule& s, const Condition& y) {
    return eval_mixture(m, z, t, s, y).log_density;
}

VideoLatent analytic_score(const MixtureModel& m, const VideoLatent& z, double t,
                           const NoiseSchedule& s, const Condition& y) {
    return vec_to_latent(analytic_score_vec(m, latent_to_vec(z), t, s, y), z.shape());
}

double analytic_log_density(const MixtureModel& m, const VideoLatent& z, double t,
                            const NoiseSchedule& s, const Condition& y) {
    return analytic_log_density_vec(m, latent_to_vec(z), t, s, y);
}

}  // namespace msg
