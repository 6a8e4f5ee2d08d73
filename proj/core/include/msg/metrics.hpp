#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <string>
#include <vector>

#include "msg/latent.hpp"
#include "msg/synth.hpp"

namespace msg {

// Per-frame intensity-weighted center of mass (negatives clamped to zero
// first). Throws naming the frame if a frame carries no mass.
Trajectory centroid_track(const VideoLatent& v);

// Mean cosine similarity of per-frame displacement vectors. A zero
// displacement paired with a zero displacement contributes 1; zero paired
// with non-zero contributes 0. Symmetric, in [-1, 1].
double motion_fidelity(const Trajectory& a, const Trajectory& b);

// Mean cosine similarity of consecutive frames' pooled features, in [-1, 1].
// Two zero-norm frames in a row contribute 1, a zero/non-zero pair 0.
double temporal_consistency(const VideoLatent& v);

// 4x4 average-pooled features: the shared toy embedding behind
// temporal_consistency, the Frechet proxy, and the category classifier.
Eigen::VectorXd pooled_frame_features(const VideoLatent& v, int frame);
// Frame-averaged pooled features of a whole clip (unnormalized).
Eigen::VectorXd clip_features(const VideoLatent& v);

// Closed-form Frechet distance between N(mu1, S1) and N(mu2, S2):
//   |mu1 - mu2|^2 + tr(S1 + S2 - 2 (S1 S2)^(1/2)).
// Matrix square roots via symmetric eigendecomposition; eigenvalues in
// (-1e-8, 0) are clamped to zero, anything lower throws.
double frechet_from_moments(const Eigen::VectorXd& mu1, const Eigen::MatrixXd& s1,
                            const Eigen::VectorXd& mu2, const Eigen::MatrixXd& s2);

// Frechet distance between Gaussians fitted to the clips' pooled features.
// Per-clip features are unit-normalized so the distance is invariant to a
// common positive intensity rescaling of both sets.
double frechet_gaussian(const std::vector<VideoLatent>& set_a,
                        const std::vector<VideoLatent>& set_b);

struct ClipMetricsRow {
    std::string id;
    std::string category;
    double motion_fidelity = 0.0;
    double temporal_consistency = 0.0;
};

struct CategorySummary {
    std::string category;
    int count = 0;
    double mean_motion_fidelity = 0.0;
    double mean_temporal_consistency = 0.0;
    double frechet = 0.0;
};

struct MetricsReport {
    std::vector<ClipMetricsRow> rows;
    std::vector<std::string> warnings;  // missing outputs etc.
    std::vector<CategorySummary> summaries;  // per category plus "overall"
};

// Evaluates transferred outputs against the reference suite: motion
// fidelity against the manifest ground-truth trajectories, temporal
// consistency of the outputs, and the Frechet proxy between output and
// reference feature distributions. Missing outputs become warnings, the
// run continues.
MetricsReport eval_report(const std::vector<ManifestRow>& manifest,
                          const std::filesystem::path& data_dir,
                          const std::filesystem::path& outputs_dir);

void write_report_csv(const std::filesystem::path& path, const MetricsReport& report);

}  // namespace msg
