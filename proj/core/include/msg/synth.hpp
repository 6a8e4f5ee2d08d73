#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "msg/latent.hpp"
#include "msg/rng.hpp"

namespace msg {

enum class ShapeKind { GaussianBlob, Square };
enum class MotionCategory { SingleObject, MultiObject, Camera };

const char* to_string(ShapeKind k);
const char* to_string(MotionCategory c);
ShapeKind shape_kind_from_string(const std::string& s);
MotionCategory motion_category_from_string(const std::string& s);

// Content label used for conditioning: blob = 0, square = 1.
Condition shape_condition(ShapeKind k);

struct LinearPath {
    double start_row = 0, start_col = 0;
    double v_row = 0, v_col = 0;  // cells per frame
};
struct CircularPath {
    double center_row = 0, center_col = 0;
    double radius = 0;
    double angular_rate = 0;  // radians per frame
    double phase = 0;
};
struct SinusoidalPath {
    double start_row = 0, start_col = 0;
    double amplitude = 0;      // cells, applied to the row axis
    double period = 4;         // frames
    double drift_col = 1;      // cells per frame along the column axis
};
using TrajectorySpec = std::variant<LinearPath, CircularPath, SinusoidalPath>;

struct CameraNone {};
struct CameraPan {
    double v_row = 0, v_col = 0;  // cells per frame
};
struct CameraZoom {
    double rate = 0;  // scale change per frame; cumulative (1 + rate)^f
};
using CameraSpec = std::variant<CameraNone, CameraPan, CameraZoom>;

const char* camera_kind_name(const CameraSpec& c);
const char* trajectory_kind_name(const TrajectorySpec& t);

// Ground-truth centroid path of the rendered intensity, one (row, col)
// point per frame, after the camera transform.
struct Trajectory {
    std::vector<std::array<double, 2>> points;

    std::size_t size() const { return points.size(); }
};

struct ClipSpec {
    ShapeKind shape_kind = ShapeKind::GaussianBlob;
    TrajectorySpec trajectory;
    CameraSpec camera = CameraNone{};
    int object_count = 1;  // 1 or 2
    // Placement of the second object relative to the first.
    double second_offset_row = 4.0;
    double second_offset_col = 0.0;
    double amplitude = 1.0;   // peak intensity, in (0, 1]
    double blob_sigma = 1.5;  // blob sigma / square half-side, in cells
    LatentShape frame_shape{8, 16, 16, 1};

    Condition label() const { return shape_condition(shape_kind); }
};

struct GeneratedClip {
    VideoLatent clip;
    Trajectory trajectory;
    Condition label;
};

// Renders the spec. Blobs are sampled Gaussians; squares use exact
// box-coverage per cell, so the analytic centroid matches the render.
// Throws if the trajectory (any object, any frame) leaves the frame.
GeneratedClip generate_clip(const ClipSpec& spec);

// Analytic combined-intensity centroid path for the spec (the ground truth
// that generate_clip also returns).
Trajectory analytic_trajectory(const ClipSpec& spec);

struct SuiteConfig {
    // Default counts keep the 42.5 / 32.5 / 25 percent category mix.
    int single_count = 17;
    int multi_count = 13;
    int camera_count = 10;
    LatentShape frame_shape{8, 16, 16, 1};
    double amplitude = 1.0;
    double blob_sigma = 1.5;
};

struct ManifestRow {
    int id = 0;
    MotionCategory category = MotionCategory::SingleObject;
    ShapeKind shape_kind = ShapeKind::GaussianBlob;
    std::string trajectory_kind;
    std::string camera_kind;
    std::string clip_path;  // relative to the manifest directory
    std::string traj_path;
};

// Writes clip_####.msgt + traj_####.csv per clip and manifest.csv into
// out_dir. Deterministic for a fixed seed, byte for byte.
std::vector<ManifestRow> generate_suite(const SuiteConfig& cfg,
                                        const std::filesystem::path& out_dir,
                                        std::uint64_t seed);

std::vector<ManifestRow> load_manifest(const std::filesystem::path& manifest_csv);
Trajectory load_trajectory_csv(const std::filesystem::path& path);
void save_trajectory_csv(const std::filesystem::path& path, const Trajectory& t);

}  // namespace msg
