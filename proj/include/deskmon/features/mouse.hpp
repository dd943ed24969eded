#pragma once

#include "deskmon/session/types.hpp"

#include <span>
#include <vector>

namespace deskmon::features {

struct TimedRate {
    SessionTime t;
    double value = 0.0;

    bool operator==(const TimedRate&) const = default;
};

struct MouseDiagnostics {
    std::size_t dropped_zero_dt = 0;
    std::size_t orphan_releases = 0;

    bool operator==(const MouseDiagnostics&) const = default;
};

struct MouseConfig {
    double idle_threshold_ms = 2000.0;
    /// Points closer than this to the previous kept point are merged before curvature.
    double curvature_merge_px = 2.0;
};

struct MouseFeatures {
    /// px/s, stamped at the later of the two positions.
    std::vector<TimedRate> velocities;
    /// px/s^2, stamped at the later velocity sample.
    std::vector<TimedRate> accelerations;
    double path_length = 0.0;
    /// Absolute heading change per unit arc length (radians per px).
    double mean_curvature = 0.0;
    std::vector<double> click_durations_ms;
    std::size_t wheel_events = 0;
    double idle_fraction = 0.0;
    MouseDiagnostics diagnostics;

    bool operator==(const MouseFeatures&) const = default;
};

/// Move and drag events are positional samples; press/release pair per button.
MouseFeatures mouse_features(std::span<const MouseEvent> events, const MouseConfig& config = {});

}  // namespace deskmon::features
