#include "msg/denoiser.hpp"

#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "msg/sampler.hpp"
#include "msg/tensor_io.hpp"

namespace msg {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

void DenoiserConfig::validate() const {
    if (shape.size() == 0) throw std::invalid_argument("DenoiserConfig: empty shape");
    if (n_categories < 1) throw std::invalid_argument("DenoiserConfig: n_categories < 1");
    if (time_features <= 0 || time_features % 2 != 0)
        throw std::invalid_argument("DenoiserConfig: time_features must be even and > 0");
    if (cond_embed <= 0) throw std::invalid_argument("DenoiserConfig: cond_embed must be > 0");
    for (int h : hidden)
        if (h <= 0) throw std::invalid_argument("DenoiserConfig: hidden widths must be > 0");
}

// Fixed flat ordering over weights, biases, then the embedding table.
struct DenoiserParamWalk {
    DenoiserNet& net;

    template <typename Fn>
    void for_each(Fn&& fn) {
        for (auto& w : net.weights_)
            for (Eigen::Index i = 0; i < w.size(); ++i) fn(w.data()[i]);
        for (auto& b : net.biases_)
            for (Eigen::Index i = 0; i < b.size(); ++i) fn(b.data()[i]);
        for (Eigen::Index i = 0; i < net.cond_table_.size(); ++i)
            fn(net.cond_table_.data()[i]);
    }
};

DenoiserNet::DenoiserNet(const DenoiserConfig& cfg, SeededRng& rng) {
    cfg.validate();
    cfg_ = cfg;
    const int d = static_cast<int>(cfg.shape.size());
    std::vector<int> dims;
    dims.push_back(cfg.input_dim());
    for (int h : cfg.hidden) dims.push_back(h);
    dims.push_back(d);
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
        const int fan_in = dims[l], fan_out = dims[l + 1];
        const double limit = std::sqrt(6.0 / (fan_in + fan_out));
        Eigen::MatrixXd w(fan_out, fan_in);
        for (Eigen::Index i = 0; i < w.size(); ++i)
            w.data()[i] = limit * (2.0 * rng.uniform() - 1.0);
        weights_.push_back(std::move(w));
        biases_.push_back(Eigen::VectorXd::Zero(fan_out));
    }
    cond_table_ = Eigen::MatrixXd::Zero(cfg.n_categories + 1, cfg.cond_embed);
    for (Eigen::Index i = 0; i < cond_table_.size(); ++i)
        cond_table_.data()[i] = 0.1 * (2.0 * rng.uniform() - 1.0);
    quantize_parameters();
}

DenoiserNet DenoiserNet::zeros(const DenoiserConfig& cfg) {
    cfg.validate();
    DenoiserNet net;
    net.cfg_ = cfg;
    const int d = static_cast<int>(cfg.shape.size());
    std::vector<int> dims;
    dims.push_back(cfg.input_dim());
    for (int h : cfg.hidden) dims.push_back(h);
    dims.push_back(d);
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
        net.weights_.push_back(Eigen::MatrixXd::Zero(dims[l + 1], dims[l]));
        net.biases_.push_back(Eigen::VectorXd::Zero(dims[l + 1]));
    }
    net.cond_table_ = Eigen::MatrixXd::Zero(cfg.n_categories + 1, cfg.cond_embed);
    return net;
}

int DenoiserNet::condition_row(const Condition& y) const {
    if (y.is_null()) return cfg_.n_categories;
    if (y.id() >= cfg_.n_categories)
        throw std::invalid_argument("DenoiserNet: condition id " + std::to_string(y.id()) +
                                    " outside the embedding table");
    return y.id();
}

Eigen::VectorXd DenoiserNet::encode_input(const VideoLatent& z, double t,
                                          const Condition& y) const {
    if (z.shape() != cfg_.shape)
        throw std::invalid_argument("DenoiserNet: latent shape mismatch");
    const int d = static_cast<int>(cfg_.shape.size());
    Eigen::VectorXd x(cfg_.input_dim());
    for (int i = 0; i < d; ++i) x[i] = z.data()[i];
    for (int i = 0; i < cfg_.time_features / 2; ++i) {
        const double w = kPi * std::pow(2.0, i);
        x[d + 2 * i] = std::sin(w * t);
        x[d + 2 * i + 1] = std::cos(w * t);
    }
    x.tail(cfg_.cond_embed) = cond_table_.row(condition_row(y)).transpose();
    return x;
}

VideoLatent DenoiserNet::predict_eps(const VideoLatent& z, double t,
                                     const Condition& y) const {
    Eigen::VectorXd a = encode_input(z, t, y);
    for (std::size_t l = 0; l < weights_.size(); ++l) {
        a = (weights_[l] * a + biases_[l]).eval();
        if (l + 1 < weights_.size()) a = a.array().tanh();
    }
    VideoLatent out(cfg_.shape);
    for (std::size_t i = 0; i < out.size(); ++i)
        out.data()[i] = static_cast<float>(a[static_cast<Eigen::Index>(i)]);
    return out;
}

VideoLatent DenoiserNet::score_at(const VideoLatent& z, int step, const NoiseSchedule& s,
                                  const Condition& y) const {
    if (step < 1)
        throw std::invalid_argument("DenoiserNet score: step must be >= 1 (sigma_0 = 0)");
    const double sigma = s.sigma(step);
    VideoLatent eps = predict_eps(z, s.t_grid(step), y);
    VideoLatent out(cfg_.shape);
    for (std::size_t i = 0; i < out.size(); ++i)
        out.data()[i] = static_cast<float>(-static_cast<double>(eps.data()[i]) / sigma);
    return out;
}

namespace {

struct ForwardPass {
    Eigen::MatrixXd input;                     // in_dim x B
    std::vector<Eigen::MatrixXd> activations;  // post-tanh per hidden layer
    Eigen::MatrixXd output;                    // d x B
};

}  // namespace

double DenoiserNet::loss(const Batch& batch) const {
    std::vector<double> discard;
    return loss_and_gradients(batch, discard);
}

double DenoiserNet::loss_and_gradients(const Batch& batch, std::vector<double>& grads) const {
    if (batch.size() == 0) throw std::invalid_argument("DenoiserNet: empty batch");
    const int B = static_cast<int>(batch.size());
    const int d = static_cast<int>(cfg_.shape.size());
    const std::size_t n_layers = weights_.size();

    ForwardPass fp;
    fp.input.resize(cfg_.input_dim(), B);
    for (int b = 0; b < B; ++b)
        fp.input.col(b) = encode_input(batch.noisy[b], batch.times[b], batch.conditions[b]);

    Eigen::MatrixXd a = fp.input;
    for (std::size_t l = 0; l < n_layers; ++l) {
        Eigen::MatrixXd z = (weights_[l] * a).colwise() + biases_[l];
        if (l + 1 < n_layers) {
            a = z.array().tanh();
            fp.activations.push_back(a);
        } else {
            fp.output = std::move(z);
        }
    }

    Eigen::MatrixXd target(d, B);
    for (int b = 0; b < B; ++b)
        for (int i = 0; i < d; ++i) target(i, b) = batch.targets[b].data()[i];

    Eigen::MatrixXd residual = fp.output - target;
    double loss_value = residual.squaredNorm() / B;

    // Backward pass.
    std::vector<Eigen::MatrixXd> grad_w(n_layers);
    std::vector<Eigen::VectorXd> grad_b(n_layers);
    Eigen::MatrixXd g = (2.0 / B) * residual;  // dL/d(pre-activation of last layer)
    for (std::size_t l = n_layers; l-- > 0;) {
        const Eigen::MatrixXd& below = l == 0 ? fp.input : fp.activations[l - 1];
        grad_w[l] = g * below.transpose();
        grad_b[l] = g.rowwise().sum();
        if (l > 0) {
            g = (weights_[l].transpose() * g).eval();
            g.array() *= 1.0 - fp.activations[l - 1].array().square();
        } else {
            g = weights_[0].transpose() * g;  // gradient w.r.t. the input encoding
        }
    }
    Eigen::MatrixXd grad_embed = Eigen::MatrixXd::Zero(cond_table_.rows(), cond_table_.cols());
    for (int b = 0; b < B; ++b)
        grad_embed.row(condition_row(batch.conditions[b])) +=
            g.col(b).tail(cfg_.cond_embed).transpose();

    grads.clear();
    grads.reserve(parameter_count());
    for (const auto& w : grad_w)
        grads.insert(grads.end(), w.data(), w.data() + w.size());
    for (const auto& b : grad_b)
        grads.insert(grads.end(), b.data(), b.data() + b.size());
    grads.insert(grads.end(), grad_embed.data(), grad_embed.data() + grad_embed.size());
    return loss_value;
}

std::size_t DenoiserNet::parameter_count() const {
    std::size_t n = 0;
    for (const auto& w : weights_) n += w.size();
    for (const auto& b : biases_) n += b.size();
    n += cond_table_.size();
    return n;
}

double DenoiserNet::get_parameter(std::size_t i) const {
    double value = 0.0;
    std::size_t k = 0;
    DenoiserParamWalk{const_cast<DenoiserNet&>(*this)}.for_each([&](double& p) {
        if (k++ == i) value = p;
    });
    if (i >= k) throw std::out_of_range("DenoiserNet: parameter index out of range");
    return value;
}

void DenoiserNet::set_parameter(std::size_t i, double v) {
    std::size_t k = 0;
    bool hit = false;
    DenoiserParamWalk{*this}.for_each([&](double& p) {
        if (k++ == i) {
            p = static_cast<double>(static_cast<float>(v));
            hit = true;
        }
    });
    if (!hit) throw std::out_of_range("DenoiserNet: parameter index out of range");
}

void DenoiserNet::quantize_parameters() {
    DenoiserParamWalk{*this}.for_each(
        [](double& p) { p = static_cast<double>(static_cast<float>(p)); });
}

void DenoiserNet::apply_update(const std::vector<double>& grads, double lr,
                               double clip_norm) {
    if (grads.size() != parameter_count())
        throw std::invalid_argument("DenoiserNet: gradient size mismatch");
    double sq = 0.0;
    for (double g : grads) sq += g * g;
    double norm = std::sqrt(sq);
    double factor = (clip_norm > 0.0 && norm > clip_norm) ? clip_norm / norm : 1.0;
    std::size_t k = 0;
    DenoiserParamWalk{*this}.for_each([&](double& p) { p -= lr * factor * grads[k++]; });
    quantize_parameters();
}

void DenoiserNet::save(const std::filesystem::path& path) const {
    TensorArchive archive;
    auto push_matrix = [&](const std::string& name, const Eigen::MatrixXd& m) {
        TensorBlob t;
        t.dims = {static_cast<std::uint32_t>(m.rows()), static_cast<std::uint32_t>(m.cols())};
        t.data.resize(m.size());
        // Row-major on disk.
        for (Eigen::Index r = 0; r < m.rows(); ++r)
            for (Eigen::Index c = 0; c < m.cols(); ++c)
                t.data[static_cast<std::size_t>(r) * m.cols() + c] =
                    static_cast<float>(m(r, c));
        archive.entries.emplace_back(name, std::move(t));
    };
    auto push_vector = [&](const std::string& name, const Eigen::VectorXd& v) {
        TensorBlob t;
        t.dims = {static_cast<std::uint32_t>(v.size())};
        t.data.resize(v.size());
        for (Eigen::Index i = 0; i < v.size(); ++i) t.data[i] = static_cast<float>(v[i]);
        archive.entries.emplace_back(name, std::move(t));
    };
    for (std::size_t l = 0; l < weights_.size(); ++l) {
        push_matrix("w" + std::to_string(l), weights_[l]);
        push_vector("b" + std::to_string(l), biases_[l]);
    }
    push_matrix("cond_embed", cond_table_);

    nlohmann::json meta;
    meta["kind"] = "denoiser";
    meta["shape"] = {cfg_.shape.frames, cfg_.shape.height, cfg_.shape.width,
                     cfg_.shape.channels};
    meta["n_categories"] = cfg_.n_categories;
    meta["hidden"] = cfg_.hidden;
    meta["time_features"] = cfg_.time_features;
    meta["cond_embed"] = cfg_.cond_embed;
    archive.meta = meta.dump();
    save_archive(path, archive);
}

DenoiserNet DenoiserNet::load(const std::filesystem::path& path) {
    TensorArchive archive = load_archive(path);
    nlohmann::json meta;
    try {
        meta = nlohmann::json::parse(archive.meta);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path.string() + ": bad archive meta: " + e.what());
    }
    if (meta.value("kind", "") != "denoiser")
        throw ParseError(path.string() + ": archive is not a denoiser");
    DenoiserConfig cfg;
    auto shape = meta.at("shape");
    cfg.shape = {shape.at(0).get<int>(), shape.at(1).get<int>(), shape.at(2).get<int>(),
                 shape.at(3).get<int>()};
    cfg.n_categories = meta.at("n_categories").get<int>();
    cfg.hidden = meta.at("hidden").get<std::vector<int>>();
    cfg.time_features = meta.at("time_features").get<int>();
    cfg.cond_embed = meta.at("cond_embed").get<int>();

    DenoiserNet net = DenoiserNet::zeros(cfg);
    auto pull_matrix = [&](const std::string& name, Eigen::MatrixXd& m) {
        const TensorBlob* t = archive.find(name);
        if (!t) throw ParseError(path.string() + ": missing tensor " + name);
        if (t->dims.size() != 2 || static_cast<Eigen::Index>(t->dims[0]) != m.rows() ||
            static_cast<Eigen::Index>(t->dims[1]) != m.cols())
            throw ParseError(path.string() + ": tensor " + name + " has unexpected shape");
        for (Eigen::Index r = 0; r < m.rows(); ++r)
            for (Eigen::Index c = 0; c < m.cols(); ++c)
                m(r, c) = t->data[static_cast<std::size_t>(r) * m.cols() + c];
    };
    auto pull_vector = [&](const std::string& name, Eigen::VectorXd& v) {
        const TensorBlob* t = archive.find(name);
        if (!t) throw ParseError(path.string() + ": missing tensor " + name);
        if (t->dims.size() != 1 || static_cast<Eigen::Index>(t->dims[0]) != v.size())
            throw ParseError(path.string() + ": tensor " + name + " has unexpected shape");
        for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = t->data[i];
    };
    for (std::size_t l = 0; l < net.weights_.size(); ++l) {
        pull_matrix("w" + std::to_string(l), net.weights_[l]);
        pull_vector("b" + std::to_string(l), net.biases_[l]);
    }
    pull_matrix("cond_embed", net.cond_table_);
    return net;
}

TrainingResult train_denoiser(DenoiserNet& net,
                              const std::vector<std::pair<VideoLatent, Condition>>& data,
                              const NoiseSchedule& schedule, const TrainingConfig& cfg,
                              SeededRng& rng) {
    if (data.empty()) throw std::invalid_argument("train_denoiser: empty dataset");
    if (cfg.steps < 1 || cfg.batch_size < 1)
        throw std::invalid_argument("train_denoiser: steps and batch_size must be >= 1");
    if (!(cfg.p_drop >= 0.0 && cfg.p_drop < 1.0))
        throw std::invalid_argument("train_denoiser: p_drop must be in [0, 1)");
    for (const auto& [clip, label] : data)
        if (clip.shape() != net.config().shape)
            throw std::invalid_argument("train_denoiser: clip shape does not match the net");

    TrainingResult result;
    std::vector<double> grads;
    for (int step = 0; step < cfg.steps; ++step) {
        DenoiserNet::Batch batch;
        for (int b = 0; b < cfg.batch_size; ++b) {
            const auto& [clip, label] = data[rng.below(data.size())];
            int k = 1 + static_cast<int>(rng.below(schedule.n_steps()));
            Condition y = rng.uniform() < cfg.p_drop ? Condition::null() : label;
            VideoLatent eps = gaussian_like(rng, clip.shape());
            batch.noisy.push_back(forward_noise_with(clip, k, schedule, eps));
            batch.times.push_back(schedule.t_grid(k));
            batch.conditions.push_back(y);
            batch.targets.push_back(std::move(eps));
        }
        double loss = net.loss_and_gradients(batch, grads);
        if (!std::isfinite(loss))
            throw std::runtime_error("train_denoiser: non-finite loss at step " +
                                     std::to_string(step));
        net.apply_update(grads, cfg.learning_rate, cfg.clip_norm);
        result.loss_curve.push_back(loss);
    }
    result.initial_loss = result.loss_curve.front();
    const std::size_t tail = std::max<std::size_t>(1, result.loss_curve.size() / 20);
    double acc = 0.0;
    for (std::size_t i = result.loss_curve.size() - tail; i < result.loss_curve.size(); ++i)
        acc += result.loss_curve[i];
    result.final_loss = acc / static_cast<double>(tail);
    return result;
}

}  // namespace msg
