#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "msg/metrics.hpp"
#include "msg/synth.hpp"
#include "msg/tensor_io.hpp"

using msg::ClipSpec;
using msg::LatentShape;
using msg::LinearPath;
using msg::ShapeKind;
using msg::Trajectory;

namespace {

std::filesystem::path fresh_dir(const char* name) {
    auto dir = std::filesystem::temp_directory_path() / name;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

ClipSpec blob_moving_right() {
    ClipSpec spec;
    spec.shape_kind = ShapeKind::GaussianBlob;
    LinearPath path;
    path.start_row = 8.0;
    path.start_col = 4.0;
    path.v_col = 1.0;
    spec.trajectory = path;
    return spec;
}

}  // namespace

TEST_CASE("linear blob trajectory columns advance by the velocity") {
    ClipSpec spec = blob_moving_right();
    auto [clip, traj, label] = msg::generate_clip(spec);
    REQUIRE(traj.size() == 8);
    for (int f = 0; f < 8; ++f) {
        CHECK(traj.points[f][0] == doctest::Approx(8.0));
        CHECK(traj.points[f][1] == doctest::Approx(4.0 + f));
    }
    CHECK(label.id() == 0);
    for (float v : clip.values()) {
        CHECK(v >= 0.0f);
        CHECK(v <= 1.0f);
    }
}

TEST_CASE("zero-velocity blob renders identical frames") {
    ClipSpec spec = blob_moving_right();
    spec.trajectory = LinearPath{8.0, 8.0, 0.0, 0.0};
    auto [clip, traj, label] = msg::generate_clip(spec);
    for (int f = 1; f < clip.frames(); ++f)
        for (int r = 0; r < clip.height(); ++r)
            for (int c = 0; c < clip.width(); ++c)
                CHECK(clip.at(f, r, c) == clip.at(0, r, c));
    CHECK(msg::temporal_consistency(clip) == doctest::Approx(1.0));
}

TEST_CASE("circular trajectory stays on its radius") {
    ClipSpec spec;
    spec.shape_kind = ShapeKind::Square;
    msg::CircularPath circ;
    circ.center_row = 7.5;
    circ.center_col = 7.5;
    circ.radius = 3.0;
    circ.angular_rate = 0.5;
    spec.trajectory = circ;
    Trajectory traj = msg::analytic_trajectory(spec);
    for (const auto& p : traj.points) {
        double dist = std::hypot(p[0] - 7.5, p[1] - 7.5);
        CHECK(std::abs(dist - 3.0) < 1e-6);
    }
}

TEST_CASE("trajectories leaving the frame are rejected with a diagnostic") {
    ClipSpec spec = blob_moving_right();
    spec.trajectory = LinearPath{8.0, 12.0, 0.0, 1.0};  // exits on the right
    CHECK_THROWS_WITH_AS(msg::generate_clip(spec),
                         doctest::Contains("leaves the frame"), std::invalid_argument);
}

TEST_CASE("spec validation") {
    ClipSpec spec = blob_moving_right();
    spec.amplitude = 0.0;
    CHECK_THROWS_AS(msg::generate_clip(spec), std::invalid_argument);
    spec = blob_moving_right();
    spec.blob_sigma = -1.0;
    CHECK_THROWS_AS(msg::generate_clip(spec), std::invalid_argument);
    spec = blob_moving_right();
    spec.object_count = 3;
    CHECK_THROWS_AS(msg::generate_clip(spec), std::invalid_argument);
}

TEST_CASE("pan camera shifts every centroid by the pan velocity") {
    ClipSpec spec = blob_moving_right();
    Trajectory base = msg::analytic_trajectory(spec);
    spec.camera = msg::CameraPan{0.5, 0.0};
    auto [clip, panned, label] = msg::generate_clip(spec);
    REQUIRE(base.size() == panned.size());
    for (std::size_t f = 0; f < base.size(); ++f) {
        CHECK(panned.points[f][0] == doctest::Approx(base.points[f][0] + 0.5 * f));
        CHECK(panned.points[f][1] == doctest::Approx(base.points[f][1]));
    }
    // and the rendered centroid follows
    Trajectory tracked = msg::centroid_track(clip);
    for (std::size_t f = 0; f < tracked.size(); ++f) {
        CHECK(std::abs(tracked.points[f][0] - panned.points[f][0]) < 0.25);
        CHECK(std::abs(tracked.points[f][1] - panned.points[f][1]) < 0.25);
    }
}

TEST_CASE("zoom camera scales positions about the frame center") {
    ClipSpec spec;
    spec.shape_kind = ShapeKind::GaussianBlob;
    spec.trajectory = LinearPath{5.0, 7.5, 0.0, 0.0};
    spec.camera = msg::CameraZoom{0.04};
    Trajectory traj = msg::analytic_trajectory(spec);
    for (int f = 0; f < 8; ++f) {
        double scale = std::pow(1.04, f);
        CHECK(traj.points[f][0] == doctest::Approx(7.5 + (5.0 - 7.5) * scale));
        CHECK(traj.points[f][1] == doctest::Approx(7.5));
    }
}

TEST_CASE("two-object clips track the combined centroid") {
    ClipSpec spec = blob_moving_right();
    spec.object_count = 2;
    spec.second_offset_row = 4.0;
    spec.trajectory = LinearPath{5.0, 4.0, 0.0, 1.0};
    auto [clip, traj, label] = msg::generate_clip(spec);
    for (int f = 0; f < 8; ++f) {
        CHECK(traj.points[f][0] == doctest::Approx(7.0));  // midpoint of 5 and 9
        CHECK(traj.points[f][1] == doctest::Approx(4.0 + f));
    }
    Trajectory tracked = msg::centroid_track(clip);
    for (std::size_t f = 0; f < tracked.size(); ++f) {
        CHECK(std::abs(tracked.points[f][0] - traj.points[f][0]) < 0.25);
        CHECK(std::abs(tracked.points[f][1] - traj.points[f][1]) < 0.25);
    }
}

TEST_CASE("suite generation writes clips, trajectories, and a manifest") {
    auto dir = fresh_dir("msg_suite_test");
    msg::SuiteConfig cfg;
    cfg.single_count = 4;
    cfg.multi_count = 3;
    cfg.camera_count = 2;
    auto rows = msg::generate_suite(cfg, dir, 42);
    REQUIRE(rows.size() == 9);

    auto loaded = msg::load_manifest(dir / "manifest.csv");
    REQUIRE(loaded.size() == rows.size());
    int singles = 0, multis = 0, cameras = 0;
    for (const auto& row : loaded) {
        switch (row.category) {
            case msg::MotionCategory::SingleObject: ++singles; break;
            case msg::MotionCategory::MultiObject: ++multis; break;
            case msg::MotionCategory::Camera: ++cameras; break;
        }
        CHECK(std::filesystem::exists(dir / row.clip_path));
        CHECK(std::filesystem::exists(dir / row.traj_path));
        // ground truth recovered by the tracker within tolerance
        msg::VideoLatent clip = msg::load_tensor(dir / row.clip_path);
        Trajectory truth = msg::load_trajectory_csv(dir / row.traj_path);
        Trajectory tracked = msg::centroid_track(clip);
        REQUIRE(tracked.size() == truth.size());
        for (std::size_t f = 0; f < truth.size(); ++f) {
            CHECK(std::abs(tracked.points[f][0] - truth.points[f][0]) < 0.25);
            CHECK(std::abs(tracked.points[f][1] - truth.points[f][1]) < 0.25);
        }
    }
    CHECK(singles == 4);
    CHECK(multis == 3);
    CHECK(cameras == 2);
}

TEST_CASE("suite generation is byte-identical for a fixed seed") {
    auto dir_a = fresh_dir("msg_suite_det_a");
    auto dir_b = fresh_dir("msg_suite_det_b");
    msg::SuiteConfig cfg;
    cfg.single_count = 2;
    cfg.multi_count = 1;
    cfg.camera_count = 1;
    msg::generate_suite(cfg, dir_a, 7);
    msg::generate_suite(cfg, dir_b, 7);

    for (const auto& entry : std::filesystem::directory_iterator(dir_a)) {
        auto read = [](const std::filesystem::path& p) {
            std::ifstream in(p, std::ios::binary);
            return std::string((std::istreambuf_iterator<char>(in)),
                               std::istreambuf_iterator<char>());
        };
        CHECK(read(entry.path()) == read(dir_b / entry.path().filename()));
    }
}

TEST_CASE("default suite counts keep the benchmark category mix") {
    msg::SuiteConfig cfg;
    double total = cfg.single_count + cfg.multi_count + cfg.camera_count;
    CHECK(cfg.single_count / total == doctest::Approx(0.425));
    CHECK(cfg.multi_count / total == doctest::Approx(0.325));
    CHECK(cfg.camera_count / total == doctest::Approx(0.25));
}
