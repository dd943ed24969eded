#pragma once

#include "deskmon/challenge/metrics.hpp"
#include "deskmon/sync/sync.hpp"

#include <string>
#include <vector>

namespace deskmon::challenge {

enum class AnomalyRule { inactivity, head_pose, face_absence };

std::string_view to_string(AnomalyRule rule);
AnomalyRule parse_rule(std::string_view text);

struct DetectionInterval {
    SessionTime start;
    SessionTime end;
    double confidence = 0.0;
    /// Rules that fired inside the (merged) interval, sorted, unique.
    std::vector<AnomalyRule> rules;

    bool operator==(const DetectionInterval&) const = default;
    Interval interval() const { return {start, end}; }
};

struct AnomalyConfig {
    /// No key or mouse event for longer than this during a writing task.
    double inactivity_s = 10.0;
    double yaw_deg = 45.0;
    double sustain_s = 5.0;
    /// Head-pose and face runs are broken by sample gaps longer than this.
    double max_sample_gap_s = 1.0;
};

struct DetectionReport {
    std::vector<DetectionInterval> detections;
    /// Rules disabled for lack of input streams.
    std::vector<std::string> notes;
};

/// Union of the inactivity, head-pose and face-absence rules, with
/// overlapping or touching detections merged. Deterministic.
DetectionReport detect_anomalies(const sync::SyncedSession& session, const AnomalyConfig& config = {});

/// Sorts by start and merges overlapping or touching intervals; rules are
/// unioned and the highest confidence kept.
std::vector<DetectionInterval> merge_detections(std::vector<DetectionInterval> detections);

}  // namespace deskmon::challenge
