#include "deskmon/challenge/anomaly.hpp"

#include <algorithm>
#include <stdexcept>

namespace deskmon::challenge {
namespace {

DetectionInterval make_detection(std::int64_t start, std::int64_t end, double threshold_us, AnomalyRule rule)
{
    const double duration = static_cast<double>(end - start);
    return DetectionInterval{SessionTime{start}, SessionTime{end}, 1.0 - threshold_us / duration, {rule}};
}

/// Runs of consecutive samples satisfying `pred`, kept when longer than the sustain time.
template <class Sample, class Pred>
void sustained_runs(const std::vector<Sample>& samples, Pred pred, const AnomalyConfig& config, AnomalyRule rule,
                    std::vector<DetectionInterval>& out)
{
    const double sustain_us = config.sustain_s * 1e6;
    const double max_gap_us = config.max_sample_gap_s * 1e6;
    bool in_run = false;
    std::int64_t run_start = 0;
    std::int64_t run_last = 0;
    auto close = [&] {
        if (in_run && static_cast<double>(run_last - run_start) > sustain_us) {
            out.push_back(make_detection(run_start, run_last, sustain_us, rule));
        }
        in_run = false;
    };
    for (const auto& s : samples) {
        const std::int64_t t = s.raw_ts.micros;
        if (in_run && static_cast<double>(t - run_last) > max_gap_us) close();
        if (pred(s)) {
            if (!in_run) {
                in_run = true;
                run_start = t;
            }
            run_last = t;
        } else {
            close();
        }
    }
    close();
}

}  // namespace

std::string_view to_string(AnomalyRule rule)
{
    switch (rule) {
    case AnomalyRule::inactivity: return "inactivity";
    case AnomalyRule::head_pose: return "head_pose";
    case AnomalyRule::face_absence: return "face_absence";
    }
    return "?";
}

AnomalyRule parse_rule(std::string_view text)
{
    for (auto r : {AnomalyRule::inactivity, AnomalyRule::head_pose, AnomalyRule::face_absence}) {
        if (to_string(r) == text) return r;
    }
    throw std::invalid_argument("unknown anomaly rule '" + std::string(text) + "'");
}

std::vector<DetectionInterval> merge_detections(std::vector<DetectionInterval> detections)
{
    std::sort(detections.begin(), detections.end(), [](const auto& a, const auto& b) {
        return a.start != b.start ? a.start < b.start : a.end < b.end;
    });
    std::vector<DetectionInterval> merged;
    for (auto& d : detections) {
        if (!merged.empty() && d.start <= merged.back().end) {
            auto& m = merged.back();
            m.end = std::max(m.end, d.end);
            m.confidence = std::max(m.confidence, d.confidence);
            m.rules.insert(m.rules.end(), d.rules.begin(), d.rules.end());
            std::sort(m.rules.begin(), m.rules.end());
            m.rules.erase(std::unique(m.rules.begin(), m.rules.end()), m.rules.end());
            continue;
        }
        merged.push_back(std::move(d));
    }
    return merged;
}

DetectionReport detect_anomalies(const sync::SyncedSession& session, const AnomalyConfig& config)
{
    const auto& m = session.manifest;
    DetectionReport report;
    std::vector<DetectionInterval> raw;

    const auto* keys = first_samples<KeyEvent>(m, StreamKind::keyboard);
    const auto* mouse = first_samples<MouseEvent>(m, StreamKind::mouse);
    if (!keys && !mouse) {
        report.notes.push_back("inactivity rule disabled: no keyboard or mouse stream");
    } else {
        std::vector<std::int64_t> activity;
        if (keys) {
            for (const auto& k : *keys) activity.push_back(k.raw_ts.micros);
        }
        if (mouse) {
            for (const auto& e : *mouse) activity.push_back(e.raw_ts.micros);
        }
        std::sort(activity.begin(), activity.end());
        const double threshold_us = config.inactivity_s * 1e6;
        for (const auto& task : m.tasks) {
            if (task.group != TaskGroup::writing) continue;
            std::int64_t prev = task.start.micros;
            auto it = std::lower_bound(activity.begin(), activity.end(), task.start.micros);
            for (; it != activity.end() && *it <= task.end.micros; ++it) {
                if (static_cast<double>(*it - prev) > threshold_us) {
                    raw.push_back(make_detection(prev, *it, threshold_us, AnomalyRule::inactivity));
                }
                prev = *it;
            }
            if (static_cast<double>(task.end.micros - prev) > threshold_us) {
                raw.push_back(make_detection(prev, task.end.micros, threshold_us, AnomalyRule::inactivity));
            }
        }
    }

    if (const auto* pose = first_samples<HeadPoseSample>(m, StreamKind::head_pose)) {
        sustained_runs(
            *pose, [&](const HeadPoseSample& p) { return std::abs(p.yaw) > config.yaw_deg; }, config,
            AnomalyRule::head_pose, raw);
    } else {
        report.notes.push_back("head-pose rule disabled: no head_pose stream");
    }

    if (const auto* face = first_samples<FaceSample>(m, StreamKind::face_biometrics)) {
        sustained_runs(
            *face, [](const FaceSample& f) { return !f.face_present; }, config, AnomalyRule::face_absence, raw);
    } else {
        report.notes.push_back("face-absence rule disabled: no face_biometrics stream");
    }

    report.detections = merge_detections(std::move(raw));
    return report;
}

}  // namespace deskmon::challenge
