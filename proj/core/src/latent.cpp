#include "msg/latent.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace msg {

Condition::Condition(int id) : id_(id) {
    if (id < 0) throw std::invalid_argument("Condition: category id must be >= 0");
}

VideoLatent::VideoLatent(LatentShape shape, float fill) : shape_(shape) {
    if (shape.frames <= 0 || shape.height <= 0 || shape.width <= 0 ||
        shape.channels <= 0) {
        throw std::invalid_argument("VideoLatent: all dimensions must be positive");
    }
    data_.assign(shape.size(), fill);
}

bool VideoLatent::all_finite() const {
    for (float v : data_) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

void require_same_shape(const VideoLatent& a, const VideoLatent& b,
                        const char* what) {
    if (a.shape() != b.shape()) {
        throw std::invalid_argument(std::string(what) + ": shape mismatch");
    }
}

VideoLatent add(const VideoLatent& a, const VideoLatent& b) {
    require_same_shape(a, b, "add");
    VideoLatent out = a;
    for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] += b.data()[i];
    return out;
}

VideoLatent sub(const VideoLatent& a, const VideoLatent& b) {
    require_same_shape(a, b, "sub");
    VideoLatent out = a;
    for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] -= b.data()[i];
    return out;
}

VideoLatent scale(const VideoLatent& a, float c) {
    VideoLatent out = a;
    for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] *= c;
    return out;
}

VideoLatent axpy(const VideoLatent& a, float c, const VideoLatent& b) {
    require_same_shape(a, b, "axpy");
    VideoLatent out = a;
    for (std::size_t i = 0; i < out.size(); ++i)
        out.data()[i] += c * b.data()[i];
    return out;
}

double dot(const VideoLatent& a, const VideoLatent& b) {
    require_same_shape(a, b, "dot");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        acc += static_cast<double>(a.data()[i]) * static_cast<double>(b.data()[i]);
    return acc;
}

double l2_norm(const VideoLatent& a) { return std::sqrt(dot(a, a)); }

VideoLatent gaussian_like(SeededRng& rng, const LatentShape& shape) {
    if (shape.size() == 0) {
        throw std::invalid_argument("gaussian_like: zero-sized shape");
    }
    VideoLatent out(shape);
    for (std::size_t i = 0; i < out.size(); ++i)
        out.data()[i] = static_cast<float>(rng.gaussian());
    return out;
}

}  // namespace msg
