#pragma once

#include "deskmon/session/time.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

namespace deskmon::ingest {

/// Offset that maps a device clock onto the session timeline: session = raw + offset.
struct ClockEstimate {
    std::int64_t offset_micros = 0;
    std::int64_t rtt_micros = 0;
    int n_probes = 0;

    bool operator==(const ClockEstimate&) const = default;
};

class ClockProbeError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Four-timestamp exchange: t0 client send, t1 server receive, t2 server send, t3 client receive.
/// offset = ((t1 - t0) + (t2 - t3)) / 2 truncated toward zero, rtt = (t3 - t0) - (t2 - t1).
/// Throws ClockProbeError when the computed rtt is negative.
ClockEstimate estimate_clock_offset(RawTime t0, SessionTime t1, SessionTime t2, RawTime t3);

/// Accumulates probes for one stream and keeps the minimal-rtt estimate.
class ClockEstimator {
public:
    /// Returns false (and discards the probe) when it is inconsistent.
    bool add_probe(RawTime t0, SessionTime t1, SessionTime t2, RawTime t3);

    std::optional<ClockEstimate> best() const;
    int accepted() const { return accepted_; }
    int discarded() const { return discarded_; }
    /// t0 of the first accepted probe; origin for drift correction.
    std::optional<RawTime> reference_raw() const { return reference_; }

private:
    std::optional<ClockEstimate> best_;
    std::optional<RawTime> reference_;
    int accepted_ = 0;
    int discarded_ = 0;
};

}  // namespace deskmon::ingest
