#include "msg/motion.hpp"

#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "msg/tensor_io.hpp"

namespace msg {

namespace {
// Extraction and generation use disjoint derived streams so that phase 2 is
// reproducible without re-running phase 1.
constexpr std::uint64_t kExtractSalt = 0x9a1f;
constexpr std::uint64_t kGenerateSalt = 0x51b2;
}  // namespace

void TransferConfig::validate(const NoiseSchedule& s) const {
    if (!(strength > 0.0 && strength <= 1.0))
        throw std::invalid_argument("TransferConfig: strength must be in (0, 1]");
    if (!(window_ratio > 0.0 && window_ratio <= 1.0))
        throw std::invalid_argument("TransferConfig: window_ratio must be in (0, 1]");
    if (window_ratio * s.n_steps() < 1.0 - 1e-9)
        throw std::invalid_argument("TransferConfig: window_ratio * N must be >= 1");
    if (msg_weight < 0.0 || usg_weight < 0.0)
        throw std::invalid_argument("TransferConfig: guidance weights must be >= 0");
}

GuidanceSpec TransferConfig::guidance_spec(const NoiseSchedule& s) const {
    GuidanceSpec spec;
    spec.mode = mode;
    spec.cfg_lambda = cfg_lambda;
    spec.usg_weight = usg_weight;
    spec.msg_weight = msg_weight;
    spec.window = window_steps(s, strength_to_step(s, strength), window_ratio);
    return spec;
}

std::vector<int> MotionRepresentation::window() const {
    std::vector<int> steps;
    steps.reserve(entries.size());
    for (const auto& e : entries) steps.push_back(e.step);
    return steps;
}

ReferenceScores MotionRepresentation::reference_scores() const {
    ReferenceScores refs;
    for (const auto& e : entries) {
        refs.cond.emplace(e.step, e.cond_score);
        refs.uncond.emplace(e.step, e.uncond_score);
    }
    return refs;
}

MotionRepresentation extract_motion(const VideoLatent& reference, const Condition& y_ref,
                                    const ScoreField& field, const NoiseSchedule& s,
                                    const TransferConfig& tc, std::uint64_t seed) {
    tc.validate(s);
    if (reference.shape() != field.shape())
        throw std::invalid_argument("extract_motion: reference shape does not match field");

    const int start = strength_to_step(s, tc.strength);
    const std::vector<int> window = window_steps(s, start, tc.window_ratio);
    const std::uint64_t extract_seed = derive_seed(seed, kExtractSalt);

    MotionRepresentation rep;
    rep.reference_condition = y_ref;
    rep.extraction_seed = extract_seed;
    for (int k : window) {
        // Independent noise per window step, keyed by the step index so the
        // entries can be computed in any order.
        SeededRng step_rng(derive_seed(extract_seed, static_cast<std::uint64_t>(k)));
        MotionEntry entry;
        entry.step = k;
        entry.time = s.t_grid(k);
        entry.noised_reference = forward_noise(reference, k, s, step_rng);
        entry.cond_score = field.score(entry.noised_reference, k, y_ref);
        entry.uncond_score = field.score(entry.noised_reference, k, Condition::null());
        rep.entries.push_back(std::move(entry));
    }
    return rep;
}

VideoLatent generate_with_motion(const VideoLatent& reference, const Condition& y_target,
                                 const ScoreField& field, const NoiseSchedule& s,
                                 const TransferConfig& tc, const MotionRepresentation* rep,
                                 std::uint64_t seed, std::vector<StepTrace>* trace) {
    tc.validate(s);
    GuidanceSpec guid = tc.guidance_spec(s);
    if (rep != nullptr) {
        if (rep->window() != guid.window)
            throw std::invalid_argument(
                "generate_with_motion: motion representation window does not match the "
                "transfer window");
        for (const auto& e : rep->entries)
            if (e.cond_score.shape() != field.shape())
                throw std::invalid_argument(
                    "generate_with_motion: reference score shape does not match field");
    }

    SamplerConfig cfg;
    cfg.start_step = strength_to_step(s, tc.strength);
    cfg.noise_mode = tc.noise_mode;

    SeededRng rng(derive_seed(seed, kGenerateSalt));
    VideoLatent init = forward_noise(reference, cfg.start_step, s, rng);

    ReferenceScores refs;
    const ReferenceScores* refs_ptr = nullptr;
    if (rep != nullptr) {
        refs = rep->reference_scores();
        refs_ptr = &refs;
    }
    return sample(field, guid, refs_ptr, cfg, s, y_target, rng, init, trace);
}

VideoLatent transfer(const VideoLatent& reference, const Condition& y_ref,
                     const Condition& y_target, const ScoreField& field,
                     const NoiseSchedule& s, const TransferConfig& tc, std::uint64_t seed,
                     std::vector<StepTrace>* trace) {
    const bool needs_reference =
        tc.mode == GuidanceMode::Msg || tc.mode == GuidanceMode::Usg;
    if (!needs_reference)
        return generate_with_motion(reference, y_target, field, s, tc, nullptr, seed, trace);
    MotionRepresentation rep = extract_motion(reference, y_ref, field, s, tc, seed);
    return generate_with_motion(reference, y_target, field, s, tc, &rep, seed, trace);
}

VideoLatent regenerate(const VideoLatent& reference, const Condition& y_target,
                       const ScoreField& field, const NoiseSchedule& s,
                       const TransferConfig& tc, std::uint64_t seed) {
    TransferConfig plain = tc;
    plain.mode = GuidanceMode::Conditional;
    return generate_with_motion(reference, y_target, field, s, plain, nullptr, seed);
}

void MotionRepresentation::save(const std::filesystem::path& path) const {
    TensorArchive archive;
    nlohmann::json meta;
    meta["kind"] = "motion_representation";
    meta["extraction_seed"] = extraction_seed;
    meta["reference_condition"] =
        reference_condition.is_null() ? -1 : reference_condition.id();
    std::vector<int> steps;
    std::vector<double> times;
    for (const auto& e : entries) {
        steps.push_back(e.step);
        times.push_back(e.time);
        const std::string suffix = std::to_string(e.step);
        archive.entries.emplace_back("z_" + suffix, to_blob(e.noised_reference));
        archive.entries.emplace_back("s_" + suffix, to_blob(e.cond_score));
        archive.entries.emplace_back("u_" + suffix, to_blob(e.uncond_score));
    }
    meta["steps"] = steps;
    meta["times"] = times;
    archive.meta = meta.dump();
    save_archive(path, archive);
}

MotionRepresentation MotionRepresentation::load(const std::filesystem::path& path) {
    TensorArchive archive = load_archive(path);
    nlohmann::json meta;
    try {
        meta = nlohmann::json::parse(archive.meta);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path.string() + ": bad archive meta: " + e.what());
    }
    if (meta.value("kind", "") != "motion_representation")
        throw ParseError(path.string() + ": archive is not a motion representation");
    MotionRepresentation rep;
    rep.extraction_seed = meta.at("extraction_seed").get<std::uint64_t>();
    int cond = meta.at("reference_condition").get<int>();
    rep.reference_condition = cond < 0 ? Condition::null() : Condition::category(cond);
    auto steps = meta.at("steps").get<std::vector<int>>();
    auto times = meta.at("times").get<std::vector<double>>();
    if (steps.size() != times.size())
        throw ParseError(path.string() + ": steps/times size mismatch");
    for (std::size_t i = 0; i < steps.size(); ++i) {
        const std::string suffix = std::to_string(steps[i]);
        MotionEntry e;
        e.step = steps[i];
        e.time = times[i];
        auto need = [&](const std::string& name) -> const TensorBlob& {
            const TensorBlob* t = archive.find(name);
            if (!t) throw ParseError(path.string() + ": missing tensor " + name);
            return *t;
        };
        e.noised_reference = to_latent(need("z_" + suffix));
        e.cond_score = to_latent(need("s_" + suffix));
        e.uncond_score = to_latent(need("u_" + suffix));
        rep.entries.push_back(std::move(e));
    }
    return rep;
}

}  // namespace msg
