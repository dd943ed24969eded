#include "deskmon/ingest/clock.hpp"

#include <string>

namespace deskmon::ingest {

ClockEstimate estimate_clock_offset(RawTime t0, SessionTime t1, SessionTime t2, RawTime t3)
{
    if (t3 < t0 || t2 < t1) {
        throw ClockProbeError("clock probe discarded: timestamps run backwards");
    }
    const std::int64_t rtt = (t3.micros - t0.micros) - (t2.micros - t1.micros);
    if (rtt < 0) {
        throw ClockProbeError("clock probe discarded: negative round trip " + std::to_string(rtt) + " us");
    }
    // Integer division truncates toward zero.
    const std::int64_t offset = ((t1.micros - t0.micros) + (t2.micros - t3.micros)) / 2;
    return ClockEstimate{offset, rtt, 1};
}

bool ClockEstimator::add_probe(RawTime t0, SessionTime t1, SessionTime t2, RawTime t3)
{
    ClockEstimate e;
    try {
        e = estimate_clock_offset(t0, t1, t2, t3);
    } catch (const ClockProbeError&) {
        ++discarded_;
        return false;
    }
    ++accepted_;
    if (!reference_) reference_ = t0;
    if (!best_ || e.rtt_micros < best_->rtt_micros) best_ = e;
    best_->n_probes = accepted_;
    return true;
}

std::optional<ClockEstimate> ClockEstimator::best() const
{
    return best_;
}

}  // namespace deskmon::ingest
