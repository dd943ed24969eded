#include "deskmon/challenge/dataset.hpp"

#include <optional>

namespace deskmon::challenge {
namespace {

std::optional<std::string> missing_input(const sync::SyncedSession& s, const ChallengeSpec& spec,
                                         features::FeatureSet level)
{
    const auto& m = s.manifest;
    auto need = [&](StreamKind k) -> std::optional<std::string> {
        if (!m.first_of_kind(k)) return "missing " + std::string(to_string(k)) + " stream";
        return std::nullopt;
    };
    std::vector<StreamKind> required;
    switch (spec.target) {
    case TargetSource::eeg_attention: required = {StreamKind::eeg_band, StreamKind::keyboard, StreamKind::mouse}; break;
    case TargetSource::anomaly_labels: required = {StreamKind::keyboard, StreamKind::mouse}; break;
    case TargetSource::task_accuracy:
        required = {StreamKind::keyboard, StreamKind::mouse};
        if (level == features::FeatureSet::advanced) {
            required.push_back(StreamKind::eeg_band);
            required.push_back(StreamKind::smartwatch);
        }
        break;
    case TargetSource::user_identity: required = {StreamKind::keyboard}; break;
    case TargetSource::smartwatch_pulse: required = {StreamKind::smartwatch}; break;
    }
    for (auto k : required) {
        if (auto why = need(k)) return why;
    }
    if (spec.target == TargetSource::user_identity && !m.user_id) return std::string("missing user_id");
    if ((spec.target == TargetSource::task_accuracy || spec.target == TargetSource::user_identity) && m.tasks.empty()) {
        return std::string("no task records");
    }
    return std::nullopt;
}

bool overlaps_label(const SessionManifest& m, SessionTime start, SessionTime end)
{
    for (const auto& l : m.anomaly_labels) {
        if (l.start < end && l.end > start) return true;
    }
    return false;
}

}  // namespace

Dataset build_challenge_dataset(std::span<const sync::SyncedSession> sessions, const ChallengeSpec& spec,
                                const DatasetConfig& config)
{
    Dataset ds;
    for (const auto& s : sessions) {
        const auto& m = s.manifest;
        if (auto why = missing_input(s, spec, config.level)) {
            ds.skipped.push_back(m.session_id + ": " + *why);
            continue;
        }
        auto base = [&](std::string unit, SessionTime start, SessionTime end, features::FeatureSet level) {
            Example ex;
            ex.session_id = m.session_id;
            ex.user_id = m.user_id.value_or(0);
            ex.unit = std::move(unit);
            ex.start = start;
            ex.end = end;
            ex.features = features::summarize_interval(s, start, end, level, config.summary);
            return ex;
        };

        if (spec.target == TargetSource::task_accuracy || spec.target == TargetSource::user_identity) {
            for (const auto& t : m.tasks) {
                const auto level = spec.target == TargetSource::task_accuracy ? config.level : features::FeatureSet::basic;
                Example ex = base(t.task_id, t.start, t.end, level);
                ex.target = spec.target == TargetSource::task_accuracy ? t.accuracy : static_cast<double>(*m.user_id);
                ds.examples.push_back(std::move(ex));
            }
            continue;
        }

        const auto bounds = sync::window_bounds(m.session_end(), config.windowing.window_s, config.windowing.hop_s);
        const auto* eeg = first_samples<EEGSample>(m, StreamKind::eeg_band);
        const auto* wear = first_samples<WearableSample>(m, StreamKind::smartwatch);
        for (std::size_t i = 0; i < bounds.size(); ++i) {
            const auto [start, end] = bounds[i];
            const std::string unit = "w" + std::to_string(i);
            if (spec.target == TargetSource::anomaly_labels) {
                Example ex = base(unit, start, end, features::FeatureSet::basic);
                ex.target = overlaps_label(m, start, end) ? 1.0 : 0.0;
                ds.examples.push_back(std::move(ex));
            } else if (spec.target == TargetSource::eeg_attention) {
                const auto agg = features::physio_aggregate(sync::slice(*eeg, start, end), {}, start, end);
                if (!agg.mean_attention) continue;
                Example ex = base(unit, start, end, features::FeatureSet::basic);
                ex.target = *agg.mean_attention;
                ds.examples.push_back(std::move(ex));
            } else {
                const auto agg = features::physio_aggregate({}, sync::slice(*wear, start, end), start, end);
                if (!agg.mean_hr_bpm) continue;
                // Camera-based pulse inputs are external; face-stream summaries stand in.
                Example ex;
                ex.session_id = m.session_id;
                ex.user_id = m.user_id.value_or(0);
                ex.unit = unit;
                ex.start = start;
                ex.end = end;
                const auto full = features::summarize_interval(s, start, end, features::FeatureSet::basic,
                                                               config.summary);
                ex.features.add("face_present_fraction", full.get("face_present_fraction"));
                ex.features.add("face_mean_size_px", full.get("face_mean_size_px"));
                ex.target = *agg.mean_hr_bpm;
                ds.examples.push_back(std::move(ex));
            }
        }
    }
    return ds;
}

}  // namespace deskmon::challenge
