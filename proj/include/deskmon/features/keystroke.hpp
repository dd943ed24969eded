#pragma once

#include "deskmon/session/types.hpp"

#include <span>
#include <string>
#include <utility>
#include <vector>

namespace deskmon::features {

struct HoldTime {
    std::string key;
    double ms = 0.0;

    bool operator==(const HoldTime&) const = default;
};

struct DigraphLatency {
    std::string first;
    std::string second;
    double ms = 0.0;

    bool operator==(const DigraphLatency&) const = default;
};

struct KeystrokeDiagnostics {
    std::size_t orphan_releases = 0;
    std::size_t unmatched_presses = 0;

    bool operator==(const KeystrokeDiagnostics&) const = default;
};

struct KeystrokeFeatures {
    /// In release order.
    std::vector<HoldTime> hold_times;
    /// Press-to-press latency of consecutive presses, in occurrence order.
    std::vector<DigraphLatency> digraph_pp;
    /// Next press minus the first key's release; negative under rollover.
    std::vector<DigraphLatency> digraph_rp;
    double keys_per_second = 0.0;
    double backspace_rate = 0.0;
    std::size_t presses = 0;
    KeystrokeDiagnostics diagnostics;

    bool operator==(const KeystrokeFeatures&) const = default;
};

inline constexpr std::string_view kBackspace = "Backspace";
inline constexpr std::string_view kSpace = "Space";

/// Events must be time ordered. A key has at most one open press: the first
/// press after its last release. Repeated presses while open still count as
/// presses (latencies, rates) but do not start a new hold.
KeystrokeFeatures keystroke_features(std::span<const KeyEvent> events);

}  // namespace deskmon::features
