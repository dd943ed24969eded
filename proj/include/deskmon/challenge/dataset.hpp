#pragma once

#include "deskmon/challenge/spec.hpp"
#include "deskmon/features/summary.hpp"
#include "deskmon/sync/sync.hpp"

#include <span>
#include <string>
#include <vector>

namespace deskmon::challenge {

struct Windowing {
    double window_s = 10.0;
    double hop_s = 5.0;
};

/// One (input, target) pair. Identity targets hold the numeric user id.
struct Example {
    std::string session_id;
    std::uint64_t user_id = 0;
    /// Window index ("w12") or task id.
    std::string unit;
    SessionTime start;
    SessionTime end;
    features::FeatureVector features;
    double target = 0.0;
};

struct Dataset {
    std::vector<Example> examples;
    /// One entry per skipped session, naming the missing input.
    std::vector<std::string> skipped;
};

struct DatasetConfig {
    Windowing windowing;
    features::FeatureSet level = features::FeatureSet::basic;
    features::SummaryConfig summary;
};

/// Challenge 1, 2 and 5 produce one example per window, 3 and 4 one per task.
Dataset build_challenge_dataset(std::span<const sync::SyncedSession> sessions, const ChallengeSpec& spec,
                                const DatasetConfig& config = {});

}  // namespace deskmon::challenge
