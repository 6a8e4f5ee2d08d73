#include <doctest.h>

#include <cstring>
#include <stdexcept>

#include "msg/guidance.hpp"
#include "msg/rng.hpp"

using msg::Condition;
using msg::GuidanceMode;
using msg::GuidanceSpec;
using msg::LatentShape;
using msg::SeededRng;
using msg::VideoLatent;

namespace {

VideoLatent scalar_latent(float v) {
    VideoLatent out(LatentShape{1, 1, 1, 1});
    out.data()[0] = v;
    return out;
}

bool bitwise_equal(const VideoLatent& a, const VideoLatent& b) {
    return a.shape() == b.shape() &&
           std::memcmp(a.data(), b.data(), a.size() * sizeof(float)) == 0;
}

}  // namespace

TEST_CASE("cfg_combine endpoints and arithmetic") {
    VideoLatent u = scalar_latent(1.0f), c = scalar_latent(3.0f);
    CHECK(msg::cfg_combine(u, c, 1.0).data()[0] == 3.0f);
    CHECK(msg::cfg_combine(u, c, 0.0).data()[0] == 1.0f);
    CHECK(msg::cfg_combine(u, c, 2.0).data()[0] == 5.0f);
}

TEST_CASE("msg_combine examples") {
    VideoLatent c = scalar_latent(2.0f), r = scalar_latent(5.0f), u = scalar_latent(1.0f);
    CHECK(msg::msg_combine(c, r, u, 0.0).data()[0] == 2.0f);
    CHECK(msg::msg_combine(c, r, u, 1.0).data()[0] == 6.0f);
}

TEST_CASE("usg_combine examples") {
    VideoLatent c = scalar_latent(2.0f), ru = scalar_latent(4.0f), u = scalar_latent(1.0f);
    CHECK(msg::usg_combine(c, ru, u, 0.0).data()[0] == 2.0f);
    CHECK(msg::usg_combine(c, ru, u, 0.5).data()[0] == 3.5f);
    CHECK(msg::usg_combine(c, u, u, 2.0).data()[0] == 2.0f);  // null direction
}

TEST_CASE("shape mismatches are rejected") {
    VideoLatent a(LatentShape{1, 2, 2, 1});
    VideoLatent b(LatentShape{1, 2, 3, 1});
    CHECK_THROWS_AS(msg::cfg_combine(a, b, 2.0), std::invalid_argument);
    CHECK_THROWS_AS(msg::msg_combine(a, a, b, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(msg::usg_combine(a, b, a, 1.0), std::invalid_argument);
}

TEST_CASE("msg equals cfg at lambda = 1 + w when the reference is the sample") {
    SeededRng rng(2024);
    LatentShape shape{2, 4, 4, 1};
    for (int trial = 0; trial < 200; ++trial) {
        VideoLatent c = msg::gaussian_like(rng, shape);
        VideoLatent u = msg::gaussian_like(rng, shape);
        float w = static_cast<float>(rng.uniform() * 4.0);
        VideoLatent via_msg = msg::msg_combine(c, c, u, w);
        VideoLatent via_cfg = msg::cfg_combine(u, c, 1.0 + static_cast<double>(w));
        CHECK(bitwise_equal(via_msg, via_cfg));
    }
}

TEST_CASE("mixed_potential_drift is bitwise msg_combine") {
    SeededRng rng(77);
    LatentShape shape{2, 4, 4, 1};
    for (int trial = 0; trial < 50; ++trial) {
        VideoLatent c = msg::gaussian_like(rng, shape);
        VideoLatent m = msg::gaussian_like(rng, shape);
        VideoLatent p = msg::gaussian_like(rng, shape);
        double w = rng.uniform() * 3.0;
        CHECK(bitwise_equal(msg::mixed_potential_drift(c, m, p, w),
                            msg::msg_combine(c, m, p, w)));
    }
    VideoLatent c = msg::gaussian_like(rng, shape);
    VideoLatent m = msg::gaussian_like(rng, shape);
    VideoLatent p = msg::gaussian_like(rng, shape);
    CHECK(bitwise_equal(msg::mixed_potential_drift(c, m, p, 0.0), c));
}

TEST_CASE("combinators are affine in each argument") {
    SeededRng rng(31);
    LatentShape shape{1, 4, 4, 1};
    VideoLatent c = msg::gaussian_like(rng, shape);
    VideoLatent r = msg::gaussian_like(rng, shape);
    VideoLatent u = msg::gaussian_like(rng, shape);
    const double w = 0.75;
    const float k = 3.0f;
    // scaling all inputs scales the output
    VideoLatent scaled = msg::msg_combine(msg::scale(c, k), msg::scale(r, k),
                                          msg::scale(u, k), w);
    VideoLatent base = msg::msg_combine(c, r, u, w);
    for (std::size_t i = 0; i < base.size(); ++i)
        CHECK(scaled.data()[i] ==
              doctest::Approx(k * base.data()[i]).epsilon(1e-5));
}

TEST_CASE("guidance spec validation") {
    GuidanceSpec spec;
    spec.mode = GuidanceMode::Msg;
    CHECK_THROWS_AS(spec.validate(), std::invalid_argument);  // empty window
    spec.window = {35, 34};
    CHECK_NOTHROW(spec.validate());
    CHECK(spec.in_window(34));
    CHECK(!spec.in_window(33));
    spec.msg_weight = -1.0;
    CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
}

TEST_CASE("guidance mode names round-trip") {
    for (auto mode : {GuidanceMode::Conditional, GuidanceMode::Cfg, GuidanceMode::Usg,
                      GuidanceMode::Msg})
        CHECK(msg::guidance_mode_from_string(msg::to_string(mode)) == mode);
    CHECK_THROWS_AS(msg::guidance_mode_from_string("mgs"), std::invalid_argument);
}
