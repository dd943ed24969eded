#pragma once

#include "deskmon/challenge/anomaly.hpp"
#include "deskmon/challenge/metrics.hpp"
#include "deskmon/session/json.hpp"
#include "deskmon/sync/sync.hpp"

#include <string>
#include <vector>

namespace deskmon::report {

struct ReportConfig {
    /// IoU threshold for the ground-truth block.
    double iou_min = 0.3;
};

struct SessionReport {
    std::string text;
    Json json;
    /// Set when the session carries anomaly labels.
    std::optional<challenge::IntervalScores> scores;
};

/// Plain-text report plus JSON sidecar: metadata, task timeline, detections
/// with their rules, gaps and, for labelled sessions, precision/recall/F1.
SessionReport generate_report(const sync::SyncedSession& session, const challenge::DetectionReport& detections,
                              const ReportConfig& config = {});

/// Detections read back from a JSON sidecar.
std::vector<challenge::DetectionInterval> detections_from_json(const Json& sidecar);

}  // namespace deskmon::report
