#include "deskmon/sync/timeline.hpp"

#include <cmath>

namespace deskmon::sync {

MappedTime to_session_time(RawTime raw, const ingest::ClockEstimate& est, double drift_ppm, RawTime raw_at_hello)
{
    std::int64_t t = raw.micros + est.offset_micros;
    if (drift_ppm != 0.0) {
        const double elapsed = static_cast<double>(raw.micros - raw_at_hello.micros);
        t += static_cast<std::int64_t>(std::llround(drift_ppm * 1e-6 * elapsed));
    }
    if (t < 0) return MappedTime{SessionTime{0}, true};
    return MappedTime{SessionTime{t}, false};
}

MappedTime to_session_time(RawTime raw, const StreamDescriptor& descriptor)
{
    return to_session_time(raw, ingest::ClockEstimate{descriptor.clock_offset_micros, 0, 1},
                           descriptor.clock_drift_ppm, RawTime{descriptor.clock_reference_raw_micros});
}

bool has_identity_clock(const StreamDescriptor& descriptor)
{
    return descriptor.clock_offset_micros == 0 && descriptor.clock_drift_ppm == 0.0;
}

}  // namespace deskmon::sync
