#include "msg/synth.hpp"

#include "msg/tensor_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace msg {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::array<double, 2> base_position(const TrajectorySpec& t, int frame) {
    if (const auto* lin = std::get_if<LinearPath>(&t)) {
        return {lin->start_row + lin->v_row * frame, lin->start_col + lin->v_col * frame};
    }
    if (const auto* circ = std::get_if<CircularPath>(&t)) {
        double a = circ->phase + circ->angular_rate * frame;
        return {circ->center_row + circ->radius * std::sin(a),
                circ->center_col + circ->radius * std::cos(a)};
    }
    const auto& sin_path = std::get<SinusoidalPath>(t);
    return {sin_path.start_row + sin_path.amplitude * std::sin(2.0 * kPi * frame / sin_path.period),
            sin_path.start_col + sin_path.drift_col * frame};
}

struct CameraState {
    double shift_row = 0, shift_col = 0;
    double scale = 1.0;
};

CameraState camera_at(const CameraSpec& c, int frame, double center_row, double center_col) {
    CameraState st;
    if (const auto* pan = std::get_if<CameraPan>(&c)) {
        st.shift_row = pan->v_row * frame;
        st.shift_col = pan->v_col * frame;
    } else if (const auto* zoom = std::get_if<CameraZoom>(&c)) {
        st.scale = std::pow(1.0 + zoom->rate, frame);
        st.shift_row = center_row * (1.0 - st.scale);
        st.shift_col = center_col * (1.0 - st.scale);
    }
    return st;
}

std::array<double, 2> apply_camera(const CameraState& st, std::array<double, 2> p) {
    return {st.scale * p[0] + st.shift_row, st.scale * p[1] + st.shift_col};
}

// 1D overlap of the unit cell around integer r with [center-h, center+h].
double box_coverage(double cell, double center, double half) {
    double lo = std::max(cell - 0.5, center - half);
    double hi = std::min(cell + 0.5, center + half);
    return std::max(0.0, hi - lo);
}

void render_object(VideoLatent& clip, int frame, ShapeKind kind,
                   std::array<double, 2> pos, double size, double amplitude) {
    const int h = clip.height(), w = clip.width();
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            double value;
            if (kind == ShapeKind::GaussianBlob) {
                double dr = r - pos[0], dc = c - pos[1];
                value = amplitude * std::exp(-(dr * dr + dc * dc) / (2.0 * size * size));
            } else {
                value = amplitude * box_coverage(r, pos[0], size) * box_coverage(c, pos[1], size);
            }
            float& px = clip.at(frame, r, c);
            px = std::min(1.0f, px + static_cast<float>(value));
        }
    }
}

void check_in_frame(const ClipSpec& spec, std::array<double, 2> pos, double size,
                    int frame, int object) {
    const double margin =
        spec.shape_kind == ShapeKind::GaussianBlob ? 2.0 * size : size + 0.5;
    const double h = spec.frame_shape.height, w = spec.frame_shape.width;
    if (pos[0] - margin < -0.5 || pos[0] + margin > h - 0.5 || pos[1] - margin < -0.5 ||
        pos[1] + margin > w - 0.5) {
        std::ostringstream msg;
        msg << "trajectory leaves the frame: object " << object << " frame " << frame
            << " at (" << pos[0] << ", " << pos[1] << ") with margin " << margin << " in "
            << h << "x" << w;
        throw std::invalid_argument(msg.str());
    }
}

void validate_spec(const ClipSpec& spec) {
    if (!(spec.amplitude > 0.0 && spec.amplitude <= 1.0))
        throw std::invalid_argument("ClipSpec: amplitude must be in (0, 1]");
    if (!(spec.blob_sigma > 0.0))
        throw std::invalid_argument("ClipSpec: blob_sigma must be > 0");
    if (spec.object_count != 1 && spec.object_count != 2)
        throw std::invalid_argument("ClipSpec: object_count must be 1 or 2");
    if (spec.frame_shape.channels != 1)
        throw std::invalid_argument("ClipSpec: only single-channel clips are generated");
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

}  // namespace

const char* to_string(ShapeKind k) {
    return k == ShapeKind::GaussianBlob ? "gaussian_blob" : "square";
}

const char* to_string(MotionCategory c) {
    switch (c) {
        case MotionCategory::SingleObject: return "single_object";
        case MotionCategory::MultiObject: return "multi_object";
        case MotionCategory::Camera: return "camera";
    }
    return "?";
}

ShapeKind shape_kind_from_string(const std::string& s) {
    if (s == "gaussian_blob") return ShapeKind::GaussianBlob;
    if (s == "square") return ShapeKind::Square;
    throw std::invalid_argument("unknown shape kind '" + s + "'");
}

MotionCategory motion_category_from_string(const std::string& s) {
    if (s == "single_object") return MotionCategory::SingleObject;
    if (s == "multi_object") return MotionCategory::MultiObject;
    if (s == "camera") return MotionCategory::Camera;
    throw std::invalid_argument("unknown motion category '" + s + "'");
}

Condition shape_condition(ShapeKind k) {
    return Condition::category(k == ShapeKind::GaussianBlob ? 0 : 1);
}

const char* camera_kind_name(const CameraSpec& c) {
    if (std::holds_alternative<CameraNone>(c)) return "none";
    if (std::holds_alternative<CameraPan>(c)) return "pan";
    return "zoom";
}

const char* trajectory_kind_name(const TrajectorySpec& t) {
    if (std::holds_alternative<LinearPath>(t)) return "linear";
    if (std::holds_alternative<CircularPath>(t)) return "circular";
    return "sinusoidal";
}

Trajectory analytic_trajectory(const ClipSpec& spec) {
    validate_spec(spec);
    const double center_r = (spec.frame_shape.height - 1) / 2.0;
    const double center_c = (spec.frame_shape.width - 1) / 2.0;
    Trajectory traj;
    for (int f = 0; f < spec.frame_shape.frames; ++f) {
        CameraState cam = camera_at(spec.camera, f, center_r, center_c);
        std::array<double, 2> p0 = apply_camera(cam, base_position(spec.trajectory, f));
        if (spec.object_count == 1) {
            traj.points.push_back(p0);
        } else {
            std::array<double, 2> base = base_position(spec.trajectory, f);
            std::array<double, 2> p1 = apply_camera(
                cam, {base[0] + spec.second_offset_row, base[1] + spec.second_offset_col});
            // Equal shapes and amplitudes: combined centroid is the midpoint.
            traj.points.push_back({(p0[0] + p1[0]) / 2.0, (p0[1] + p1[1]) / 2.0});
        }
    }
    return traj;
}

GeneratedClip generate_clip(const ClipSpec& spec) {
    validate_spec(spec);
    const double center_r = (spec.frame_shape.height - 1) / 2.0;
    const double center_c = (spec.frame_shape.width - 1) / 2.0;
    VideoLatent clip(spec.frame_shape, 0.0f);
    for (int f = 0; f < spec.frame_shape.frames; ++f) {
        CameraState cam = camera_at(spec.camera, f, center_r, center_c);
        const double size = spec.blob_sigma * cam.scale;
        for (int obj = 0; obj < spec.object_count; ++obj) {
            std::array<double, 2> base = base_position(spec.trajectory, f);
            if (obj == 1) {
                base[0] += spec.second_offset_row;
                base[1] += spec.second_offset_col;
            }
            std::array<double, 2> pos = apply_camera(cam, base);
            check_in_frame(spec, pos, size, f, obj);
            render_object(clip, f, spec.shape_kind, pos, size, spec.amplitude);
        }
    }
    return {std::move(clip), analytic_trajectory(spec), spec.label()};
}

void save_trajectory_csv(const std::filesystem::path& path, const Trajectory& t) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << "frame,row,col\n";
    for (std::size_t f = 0; f < t.points.size(); ++f)
        out << f << "," << format_double(t.points[f][0]) << ","
            << format_double(t.points[f][1]) << "\n";
    if (!out) throw std::runtime_error("short write to " + path.string());
}

Trajectory load_trajectory_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line) || line != "frame,row,col")
        throw std::runtime_error(path.string() + ": bad trajectory header");
    Trajectory t;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string frame, row, col;
        if (!std::getline(ss, frame, ',') || !std::getline(ss, row, ',') ||
            !std::getline(ss, col))
            throw std::runtime_error(path.string() + ": malformed row '" + line + "'");
        t.points.push_back({std::stod(row), std::stod(col)});
    }
    return t;
}

namespace {

// Suite randomization. Specs are drawn inside conservative bounds so the
// frame-containment check cannot fire for the default geometry.
struct SpecSampler {
    const SuiteConfig& cfg;
    SeededRng& rng;

    double uniform(double lo, double hi) { return lo + (hi - lo) * rng.uniform(); }
    double signed_uniform(double lo, double hi) {
        double v = uniform(lo, hi);
        return rng.uniform() < 0.5 ? -v : v;
    }

    // Feasible linear path for `frames` frames inside [lo, hi] per axis.
    LinearPath linear_path(double lo_r, double hi_r, double lo_c, double hi_c) {
        const int last = cfg.frame_shape.frames - 1;
        LinearPath p;
        p.v_col = signed_uniform(0.5, 1.1);
        p.v_row = signed_uniform(0.0, 0.4);
        auto pick_start = [&](double v, double lo, double hi) {
            double travel = v * last;
            double a = lo - std::min(0.0, travel);
            double b = hi - std::max(0.0, travel);
            return uniform(a, b);
        };
        // Keep the column travel inside the band by construction.
        double max_col_travel = (hi_c - lo_c) / last;
        if (std::abs(p.v_col) > max_col_travel) p.v_col = std::copysign(max_col_travel, p.v_col);
        double max_row_travel = (hi_r - lo_r) / last;
        if (std::abs(p.v_row) > max_row_travel) p.v_row = std::copysign(max_row_travel, p.v_row);
        p.start_row = pick_start(p.v_row, lo_r, hi_r);
        p.start_col = pick_start(p.v_col, lo_c, hi_c);
        return p;
    }

    CircularPath circular_path(double lo_r, double hi_r, double lo_c, double hi_c) {
        CircularPath p;
        double max_radius = std::min({(hi_r - lo_r) / 2.0, (hi_c - lo_c) / 2.0, 3.5});
        p.radius = uniform(std::min(2.0, max_radius), max_radius);
        p.center_row = uniform(lo_r + p.radius, hi_r - p.radius);
        p.center_col = uniform(lo_c + p.radius, hi_c - p.radius);
        p.angular_rate = signed_uniform(2.0 * kPi / 16.0, 2.0 * kPi / 8.0);
        p.phase = uniform(0.0, 2.0 * kPi);
        return p;
    }

    SinusoidalPath sinusoidal_path(double lo_r, double hi_r, double lo_c, double hi_c) {
        const int last = cfg.frame_shape.frames - 1;
        SinusoidalPath p;
        p.amplitude = uniform(1.0, std::min(2.5, (hi_r - lo_r) / 2.0));
        p.period = uniform(4.0, 8.0);
        p.drift_col = signed_uniform(0.6, (hi_c - lo_c) / last);
        p.start_row = uniform(lo_r + p.amplitude, hi_r - p.amplitude);
        p.start_col = p.drift_col > 0 ? lo_c : hi_c;
        return p;
    }

    TrajectorySpec trajectory(int kind, double lo_r, double hi_r, double lo_c, double hi_c) {
        switch (kind) {
            case 0: return linear_path(lo_r, hi_r, lo_c, hi_c);
            case 1: return circular_path(lo_r, hi_r, lo_c, hi_c);
            default: return sinusoidal_path(lo_r, hi_r, lo_c, hi_c);
        }
    }

    ClipSpec sample(MotionCategory category) {
        ClipSpec spec;
        spec.frame_shape = cfg.frame_shape;
        spec.amplitude = cfg.amplitude;
        spec.blob_sigma = cfg.blob_sigma;
        spec.shape_kind = rng.uniform() < 0.5 ? ShapeKind::GaussianBlob : ShapeKind::Square;

        const double margin = 2.0 * spec.blob_sigma + 0.5;
        double lo_r = margin, hi_r = cfg.frame_shape.height - 1 - margin;
        double lo_c = margin, hi_c = cfg.frame_shape.width - 1 - margin;
        if (hi_r - lo_r < 1.0 || hi_c - lo_c < 1.0)
            throw std::invalid_argument(
                "generate_suite: frame too small for blob_sigma (no room to move)");

        if (category == MotionCategory::MultiObject) {
            spec.object_count = 2;
            double max_offset = std::min(4.5, hi_r - lo_r);
            double offset = uniform(std::min(3.5, max_offset), max_offset);
            spec.second_offset_row = rng.uniform() < 0.5 ? offset : -offset;
            spec.second_offset_col = 0.0;
            // Shrink the first object's band so the offset twin stays inside.
            if (spec.second_offset_row > 0)
                hi_r -= spec.second_offset_row;
            else
                lo_r -= spec.second_offset_row;
            spec.trajectory = trajectory(static_cast<int>(rng.below(3)), lo_r, hi_r, lo_c, hi_c);
        } else if (category == MotionCategory::Camera) {
            if (rng.uniform() < 0.5) {
                CameraPan pan;
                double max_pan = std::min(0.8, (hi_c - lo_c) / (cfg.frame_shape.frames - 1));
                if (rng.uniform() < 0.5)
                    pan.v_col = signed_uniform(std::min(0.4, max_pan), max_pan);
                else
                    pan.v_row = signed_uniform(std::min(0.4, max_pan), max_pan);
                spec.camera = pan;
                const int last = cfg.frame_shape.frames - 1;
                double shift_r = pan.v_row * last, shift_c = pan.v_col * last;
                LinearPath still;
                still.start_row = uniform(lo_r - std::min(0.0, shift_r), hi_r - std::max(0.0, shift_r));
                still.start_col = uniform(lo_c - std::min(0.0, shift_c), hi_c - std::max(0.0, shift_c));
                spec.trajectory = still;
            } else {
                CameraZoom zoom;
                zoom.rate = signed_uniform(0.03, 0.05);
                const double center_r = (cfg.frame_shape.height - 1) / 2.0;
                const double center_c = (cfg.frame_shape.width - 1) / 2.0;
                // Off-center placement so the zoom produces visible motion;
                // the end-of-clip scale bounds the reach. Tight frames fall
                // back to zoom-out, which only pulls positions inward.
                double end_scale = std::pow(1.0 + std::max(zoom.rate, 0.0),
                                            cfg.frame_shape.frames - 1);
                double reach = std::min((hi_r - center_r), (hi_c - center_c)) / end_scale - 1.0;
                if (reach < 1.6 && zoom.rate > 0) {
                    zoom.rate = -zoom.rate;
                    end_scale = 1.0;
                    reach = std::min(hi_r - center_r, hi_c - center_c) - 1.0;
                }
                spec.camera = zoom;
                double hi_off = std::max(1.0, std::min(1.6, reach));
                LinearPath still;
                still.start_row = center_r + signed_uniform(std::min(1.0, hi_off), hi_off);
                still.start_col = center_c + signed_uniform(std::min(1.0, hi_off), hi_off);
                spec.trajectory = still;
            }
        } else {
            spec.trajectory = trajectory(static_cast<int>(rng.below(3)), lo_r, hi_r, lo_c, hi_c);
        }
        return spec;
    }
};

}  // namespace

std::vector<ManifestRow> generate_suite(const SuiteConfig& cfg,
                                        const std::filesystem::path& out_dir,
                                        std::uint64_t seed) {
    if (cfg.single_count < 1 || cfg.multi_count < 1 || cfg.camera_count < 1)
        throw std::invalid_argument("generate_suite: all category counts must be >= 1");
    std::filesystem::create_directories(out_dir);

    std::vector<MotionCategory> plan;
    for (int i = 0; i < cfg.single_count; ++i) plan.push_back(MotionCategory::SingleObject);
    for (int i = 0; i < cfg.multi_count; ++i) plan.push_back(MotionCategory::MultiObject);
    for (int i = 0; i < cfg.camera_count; ++i) plan.push_back(MotionCategory::Camera);

    std::vector<ManifestRow> rows;
    for (std::size_t id = 0; id < plan.size(); ++id) {
        SeededRng clip_rng(derive_seed(seed, id));
        SpecSampler sampler{cfg, clip_rng};
        ClipSpec spec = sampler.sample(plan[id]);
        GeneratedClip generated = generate_clip(spec);

        char clip_name[32], traj_name[32];
        std::snprintf(clip_name, sizeof(clip_name), "clip_%04zu.msgt", id);
        std::snprintf(traj_name, sizeof(traj_name), "traj_%04zu.csv", id);
        save_tensor(out_dir / clip_name, generated.clip);
        save_trajectory_csv(out_dir / traj_name, generated.trajectory);

        ManifestRow row;
        row.id = static_cast<int>(id);
        row.category = plan[id];
        row.shape_kind = spec.shape_kind;
        row.trajectory_kind = trajectory_kind_name(spec.trajectory);
        row.camera_kind = camera_kind_name(spec.camera);
        row.clip_path = clip_name;
        row.traj_path = traj_name;
        rows.push_back(row);
    }

    std::ofstream out(out_dir / "manifest.csv", std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write manifest.csv in " + out_dir.string());
    out << "id,category,shape_kind,trajectory,camera,clip_path,traj_path\n";
    for (const auto& r : rows)
        out << r.id << "," << to_string(r.category) << "," << to_string(r.shape_kind) << ","
            << r.trajectory_kind << "," << r.camera_kind << "," << r.clip_path << ","
            << r.traj_path << "\n";
    if (!out) throw std::runtime_error("short write to manifest.csv");
    return rows;
}

std::vector<ManifestRow> load_manifest(const std::filesystem::path& manifest_csv) {
    std::ifstream in(manifest_csv);
    if (!in) throw std::runtime_error("cannot open " + manifest_csv.string());
    std::string line;
    if (!std::getline(in, line) ||
        line != "id,category,shape_kind,trajectory,camera,clip_path,traj_path")
        throw std::runtime_error(manifest_csv.string() + ": bad manifest header");
    std::vector<ManifestRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::array<std::string, 7> f;
        for (std::size_t i = 0; i < f.size(); ++i) {
            if (!std::getline(ss, f[i], i + 1 < f.size() ? ',' : '\n'))
                throw std::runtime_error(manifest_csv.string() + ": malformed row '" + line + "'");
        }
        ManifestRow r;
        r.id = std::stoi(f[0]);
        r.category = motion_category_from_string(f[1]);
        r.shape_kind = shape_kind_from_string(f[2]);
        r.trajectory_kind = f[3];
        r.camera_kind = f[4];
        r.clip_path = f[5];
        r.traj_path = f[6];
        rows.push_back(r);
    }
    return rows;
}

}  // namespace msg
