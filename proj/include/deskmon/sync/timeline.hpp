#pragma once

#include "deskmon/ingest/clock.hpp"
#include "deskmon/session/types.hpp"

namespace deskmon::sync {

struct MappedTime {
    SessionTime time;
    bool clamped = false;

    bool operator==(const MappedTime&) const = default;
};

/// t = raw + offset + drift_ppm * 1e-6 * (raw - raw_at_hello), clamped to >= 0.
MappedTime to_session_time(RawTime raw, const ingest::ClockEstimate& est, double drift_ppm,
                           RawTime raw_at_hello = {});

/// Same mapping using the clock fields stored in a stream descriptor.
MappedTime to_session_time(RawTime raw, const StreamDescriptor& descriptor);

/// True when the descriptor's mapping is the identity (offset and drift both zero).
bool has_identity_clock(const StreamDescriptor& descriptor);

}  // namespace deskmon::sync
