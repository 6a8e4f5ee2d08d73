#include "msg/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <stdexcept>

#include "msg/tensor_io.hpp"

namespace msg {

namespace {

constexpr int kPoolBins = 4;

double cosine_with_zero_rule(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    double na = a.norm(), nb = b.norm();
    if (na == 0.0 && nb == 0.0) return 1.0;
    if (na == 0.0 || nb == 0.0) return 0.0;
    return a.dot(b) / (na * nb);
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

// tr(sqrt(M)) for symmetric PSD M, clamping numeric dust.
double trace_sqrt_psd(const Eigen::MatrixXd& m, const char* what) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m);
    if (eig.info() != Eigen::Success)
        throw std::runtime_error(std::string(what) + ": eigendecomposition failed");
    double acc = 0.0;
    for (Eigen::Index i = 0; i < eig.eigenvalues().size(); ++i) {
        double v = eig.eigenvalues()[i];
        if (v < 0.0) {
            if (v <= -1e-8)
                throw std::runtime_error(std::string(what) +
                                         ": matrix has a significantly negative eigenvalue");
            v = 0.0;
        }
        acc += std::sqrt(v);
    }
    return acc;
}

Eigen::MatrixXd sqrt_psd(const Eigen::MatrixXd& m, const char* what) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m);
    if (eig.info() != Eigen::Success)
        throw std::runtime_error(std::string(what) + ": eigendecomposition failed");
    Eigen::VectorXd vals = eig.eigenvalues();
    for (Eigen::Index i = 0; i < vals.size(); ++i) {
        if (vals[i] < 0.0) {
            if (vals[i] <= -1e-8)
                throw std::runtime_error(std::string(what) +
                                         ": matrix has a significantly negative eigenvalue");
            vals[i] = 0.0;
        }
        vals[i] = std::sqrt(vals[i]);
    }
    return eig.eigenvectors() * vals.asDiagonal() * eig.eigenvectors().transpose();
}

struct Moments {
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;
};

Moments fit_moments(const std::vector<Eigen::VectorXd>& features) {
    const Eigen::Index d = features.front().size();
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(d);
    for (const auto& f : features) mean += f;
    mean /= static_cast<double>(features.size());
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(d, d);
    for (const auto& f : features) {
        Eigen::VectorXd c = f - mean;
        cov += c * c.transpose();
    }
    cov /= static_cast<double>(features.size());
    return {std::move(mean), std::move(cov)};
}

Eigen::VectorXd normalized_clip_features(const VideoLatent& v) {
    Eigen::VectorXd f = clip_features(v);
    double n = f.norm();
    if (n > 0.0) f /= n;
    return f;
}

}  // namespace

Trajectory centroid_track(const VideoLatent& v) {
    if (v.channels() != 1)
        throw std::invalid_argument("centroid_track: requires channels == 1");
    Trajectory t;
    for (int f = 0; f < v.frames(); ++f) {
        double mass = 0.0, mr = 0.0, mc = 0.0;
        for (int r = 0; r < v.height(); ++r) {
            for (int c = 0; c < v.width(); ++c) {
                double w = std::max(0.0f, v.at(f, r, c));
                mass += w;
                mr += w * r;
                mc += w * c;
            }
        }
        if (mass <= 0.0)
            throw std::invalid_argument("centroid_track: frame " + std::to_string(f) +
                                        " has no positive mass");
        t.points.push_back({mr / mass, mc / mass});
    }
    return t;
}

double motion_fidelity(const Trajectory& a, const Trajectory& b) {
    if (a.size() != b.size())
        throw std::invalid_argument("motion_fidelity: trajectory lengths differ");
    if (a.size() < 2)
        throw std::invalid_argument("motion_fidelity: needs at least 2 frames");
    double acc = 0.0;
    const std::size_t n = a.size() - 1;
    for (std::size_t i = 0; i < n; ++i) {
        Eigen::Vector2d da(a.points[i + 1][0] - a.points[i][0],
                           a.points[i + 1][1] - a.points[i][1]);
        Eigen::Vector2d db(b.points[i + 1][0] - b.points[i][0],
                           b.points[i + 1][1] - b.points[i][1]);
        acc += cosine_with_zero_rule(da, db);
    }
    return acc / static_cast<double>(n);
}

Eigen::VectorXd pooled_frame_features(const VideoLatent& v, int frame) {
    if (v.height() < kPoolBins || v.width() < kPoolBins)
        throw std::invalid_argument("pooled features: frame smaller than the 4x4 pool grid");
    Eigen::VectorXd out(kPoolBins * kPoolBins * v.channels());
    Eigen::Index idx = 0;
    for (int ch = 0; ch < v.channels(); ++ch) {
        for (int br = 0; br < kPoolBins; ++br) {
            int r0 = br * v.height() / kPoolBins;
            int r1 = (br + 1) * v.height() / kPoolBins;
            for (int bc = 0; bc < kPoolBins; ++bc) {
                int c0 = bc * v.width() / kPoolBins;
                int c1 = (bc + 1) * v.width() / kPoolBins;
                double acc = 0.0;
                for (int r = r0; r < r1; ++r)
                    for (int c = c0; c < c1; ++c) acc += v.at(frame, r, c, ch);
                out[idx++] = acc / ((r1 - r0) * (c1 - c0));
            }
        }
    }
    return out;
}

Eigen::VectorXd clip_features(const VideoLatent& v) {
    Eigen::VectorXd acc = pooled_frame_features(v, 0);
    for (int f = 1; f < v.frames(); ++f) acc += pooled_frame_features(v, f);
    return acc / static_cast<double>(v.frames());
}

double temporal_consistency(const VideoLatent& v) {
    if (v.frames() < 2)
        throw std::invalid_argument("temporal_consistency: needs at least 2 frames");
    double acc = 0.0;
    Eigen::VectorXd prev = pooled_frame_features(v, 0);
    for (int f = 1; f < v.frames(); ++f) {
        Eigen::VectorXd cur = pooled_frame_features(v, f);
        acc += cosine_with_zero_rule(prev, cur);
        prev = std::move(cur);
    }
    return acc / static_cast<double>(v.frames() - 1);
}

double frechet_from_moments(const Eigen::VectorXd& mu1, const Eigen::MatrixXd& s1,
                            const Eigen::VectorXd& mu2, const Eigen::MatrixXd& s2) {
    if (mu1.size() != mu2.size() || s1.rows() != mu1.size() || s2.rows() != mu2.size() ||
        s1.rows() != s1.cols() || s2.rows() != s2.cols())
        throw std::invalid_argument("frechet_from_moments: dimension mismatch");
    // tr((S1 S2)^(1/2)) = tr((A S2 A)^(1/2)) with A = S1^(1/2).
    Eigen::MatrixXd a = sqrt_psd(s1, "frechet");
    Eigen::MatrixXd inner = a * s2 * a;
    inner = 0.5 * (inner + inner.transpose());
    double cross = trace_sqrt_psd(inner, "frechet");
    double value = (mu1 - mu2).squaredNorm() + s1.trace() + s2.trace() - 2.0 * cross;
    return std::max(0.0, value);
}

double frechet_gaussian(const std::vector<VideoLatent>& set_a,
                        const std::vector<VideoLatent>& set_b) {
    if (set_a.size() < 2 || set_b.size() < 2)
        throw std::invalid_argument("frechet_gaussian: each set needs at least 2 clips");
    std::vector<Eigen::VectorXd> fa, fb;
    for (const auto& v : set_a) fa.push_back(normalized_clip_features(v));
    for (const auto& v : set_b) fb.push_back(normalized_clip_features(v));
    if (fa.front().size() != fb.front().size())
        throw std::invalid_argument("frechet_gaussian: feature dimensions differ");
    Moments ma = fit_moments(fa), mb = fit_moments(fb);
    return frechet_from_moments(ma.mean, ma.cov, mb.mean, mb.cov);
}

MetricsReport eval_report(const std::vector<ManifestRow>& manifest,
                          const std::filesystem::path& data_dir,
                          const std::filesystem::path& outputs_dir) {
    MetricsReport report;
    struct Bucket {
        std::vector<double> mf, tc;
        std::vector<VideoLatent> refs, outs;
    };
    std::map<std::string, Bucket> buckets;
    Bucket overall;

    for (const auto& row : manifest) {
        char name[32];
        std::snprintf(name, sizeof(name), "transfer_%04d.msgt", row.id);
        std::filesystem::path out_path = outputs_dir / name;
        if (!std::filesystem::exists(out_path)) {
            report.warnings.push_back("missing output for id " + std::to_string(row.id) +
                                      " (" + out_path.filename().string() + ")");
            continue;
        }
        VideoLatent output = load_tensor(out_path);
        VideoLatent reference = load_tensor(data_dir / row.clip_path);

        ClipMetricsRow r;
        r.id = std::to_string(row.id);
        r.category = to_string(row.category);
        // Tracklets of input vs output, so an identity transfer scores 1.
        r.motion_fidelity = motion_fidelity(centroid_track(output), centroid_track(reference));
        r.temporal_consistency = temporal_consistency(output);
        report.rows.push_back(r);

        Bucket& b = buckets[r.category];
        b.mf.push_back(r.motion_fidelity);
        b.tc.push_back(r.temporal_consistency);
        b.refs.push_back(reference);
        b.outs.push_back(output);
        overall.mf.push_back(r.motion_fidelity);
        overall.tc.push_back(r.temporal_consistency);
        overall.refs.push_back(std::move(reference));
        overall.outs.push_back(std::move(output));
    }

    auto summarize = [](const std::string& name, const Bucket& b) {
        CategorySummary s;
        s.category = name;
        s.count = static_cast<int>(b.mf.size());
        for (double v : b.mf) s.mean_motion_fidelity += v;
        for (double v : b.tc) s.mean_temporal_consistency += v;
        if (s.count > 0) {
            s.mean_motion_fidelity /= s.count;
            s.mean_temporal_consistency /= s.count;
        }
        s.frechet = b.outs.size() >= 2 ? frechet_gaussian(b.outs, b.refs) : 0.0;
        return s;
    };
    for (const auto& [name, bucket] : buckets)
        report.summaries.push_back(summarize(name, bucket));
    if (!overall.mf.empty()) report.summaries.push_back(summarize("overall", overall));
    return report;
}

void write_report_csv(const std::filesystem::path& path, const MetricsReport& report) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << "id,category,motion_fidelity,temporal_consistency,frechet\n";
    for (const auto& r : report.rows)
        out << r.id << "," << r.category << "," << format_double(r.motion_fidelity) << ","
            << format_double(r.temporal_consistency) << ",\n";
    for (const auto& w : report.warnings) out << "warning," << w << ",,,\n";
    for (const auto& s : report.summaries)
        out << "summary," << s.category << "," << format_double(s.mean_motion_fidelity)
            << "," << format_double(s.mean_temporal_consistency) << ","
            << format_double(s.frechet) << "\n";
    if (!out) throw std::runtime_error("short write to " + path.string());
}

}  // namespace msg
