#pragma once

#include "deskmon/features/keystroke.hpp"
#include "deskmon/features/mouse.hpp"
#include "deskmon/features/physio.hpp"
#include "deskmon/sync/sync.hpp"

#include <string>
#include <vector>

namespace deskmon::features {

/// Named scalar features for one interval. Missing inputs are NaN.
struct FeatureVector {
    std::vector<std::string> names;
    std::vector<double> values;

    void add(std::string name, double value);
    double get(std::string_view name) const;
};

enum class FeatureSet {
    /// Keyboard, mouse and webcam-derived (head pose, face) features.
    basic,
    /// basic plus EEG and smartwatch aggregates.
    advanced,
};

struct SummaryConfig {
    MouseConfig mouse;
    PhysioConfig physio;
};

/// Summarizes the synchronized session's streams over [start, end).
FeatureVector summarize_interval(const sync::SyncedSession& session, SessionTime start, SessionTime end,
                                 FeatureSet set, const SummaryConfig& config = {});

}  // namespace deskmon::features
