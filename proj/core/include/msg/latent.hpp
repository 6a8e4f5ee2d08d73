#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "msg/rng.hpp"

namespace msg {

// Conditioning label: a small category id or the distinguished null token
// (the unconditional branch).
class Condition {
public:
    static Condition null() { return Condition(); }
    static Condition category(int id) { return Condition(id); }

    bool is_null() const { return id_ < 0; }
    int id() const { return id_; }

    bool operator==(const Condition& o) const { return id_ == o.id_; }
    bool operator!=(const Condition& o) const { return id_ != o.id_; }

private:
    Condition() : id_(-1) {}
    explicit Condition(int id);
    int id_;
};

struct LatentShape {
    int frames = 0;
    int height = 0;
    int width = 0;
    int channels = 0;

    std::size_t size() const {
        return static_cast<std::size_t>(frames) * height * width * channels;
    }
    bool operator==(const LatentShape& o) const {
        return frames == o.frames && height == o.height && width == o.width &&
               channels == o.channels;
    }
    bool operator!=(const LatentShape& o) const { return !(*this == o); }
};

// A clip or its noisy latent: frames x height x width x channels, 32-bit
// floats in frame-major order.
class VideoLatent {
public:
    VideoLatent() = default;
    VideoLatent(LatentShape shape, float fill = 0.0f);

    const LatentShape& shape() const { return shape_; }
    int frames() const { return shape_.frames; }
    int height() const { return shape_.height; }
    int width() const { return shape_.width; }
    int channels() const { return shape_.channels; }
    std::size_t size() const { return data_.size(); }

    float* data() { return data_.data(); }
    const float* data() const { return data_.data(); }
    std::vector<float>& values() { return data_; }
    const std::vector<float>& values() const { return data_; }

    float& at(int f, int r, int c, int ch = 0) {
        return data_[index(f, r, c, ch)];
    }
    float at(int f, int r, int c, int ch = 0) const {
        return data_[index(f, r, c, ch)];
    }

    std::size_t index(int f, int r, int c, int ch) const {
        return ((static_cast<std::size_t>(f) * shape_.height + r) * shape_.width + c) *
                   shape_.channels +
               ch;
    }

    bool all_finite() const;

private:
    LatentShape shape_;
    std::vector<float> data_;
};

// Elementwise helpers. Reductions accumulate in double.
VideoLatent add(const VideoLatent& a, const VideoLatent& b);
VideoLatent sub(const VideoLatent& a, const VideoLatent& b);
VideoLatent scale(const VideoLatent& a, float c);
// out = a + c * b
VideoLatent axpy(const VideoLatent& a, float c, const VideoLatent& b);
double dot(const VideoLatent& a, const VideoLatent& b);
double l2_norm(const VideoLatent& a);

// i.i.d. standard normal entries drawn from rng in index order.
VideoLatent gaussian_like(SeededRng& rng, const LatentShape& shape);

void require_same_shape(const VideoLatent& a, const VideoLatent& b,
                        const char* what);

}  // namespace msg
