#pragma once

#include "deskmon/challenge/anomaly.hpp"
#include "deskmon/challenge/dataset.hpp"
#include "deskmon/challenge/metrics.hpp"
#include "deskmon/challenge/verify.hpp"
#include "deskmon/session/json.hpp"

#include <span>
#include <string>
#include <vector>

namespace deskmon::challenge {

struct SessionValue {
    std::string session_id;
    double value = 0.0;
};

struct EvalResult {
    int challenge = 0;
    /// One of "eer", "mae", "interval_f1", "accuracy".
    std::string metric;
    double value = 0.0;
    std::vector<SessionValue> per_session;
    /// Metric-specific extras (threshold, counts, protocol notes).
    Json details = Json::object();
};

struct EvalConfig {
    DatasetConfig dataset;
    AnomalyConfig anomaly;
    double iou_min = 0.3;
    VerifyConfig verify;
};

struct Evaluation {
    EvalResult result;
    /// Filled for the authentication challenge.
    std::vector<DetPoint> det;
    ScoreSet scores;
    std::vector<std::string> skipped;
};

/// Challenges 1, 3, 5: leave-one-session-out constant baseline, MAE.
/// Challenge 2: rule detectors against anomaly labels, pooled interval F1.
/// Challenge 4: enroll on the enrollment task, probe with every writing
/// task of every session, EER.
Evaluation evaluate_challenge(std::span<const sync::SyncedSession> sessions, int challenge_id,
                              const EvalConfig& config = {});

/// Verification scores of the authentication protocol.
ScoreSet authentication_scores(std::span<const sync::SyncedSession> sessions, const VerifyConfig& config,
                               std::vector<std::string>* notes = nullptr);

Json to_json(const EvalResult& r);

}  // namespace deskmon::challenge
