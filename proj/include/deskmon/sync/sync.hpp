#pragma once

#include "deskmon/session/types.hpp"
#include "deskmon/sync/timeline.hpp"

#include <algorithm>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace deskmon::sync {

struct Gap {
    std::string stream_id;
    SessionTime start;
    SessionTime end;

    bool operator==(const Gap&) const = default;
};

/// Raised by detect_gaps for event streams; those need activity-based gap
/// detection (see challenge::detect_anomalies) instead.
class NoNominalRate : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A Gap for every inter-sample interval longer than k / nominal_rate_hz.
/// `times` must be in session-time order.
std::vector<Gap> detect_gaps(std::span<const SessionTime> times, const StreamDescriptor& descriptor,
                             double k = 3.0);

/// Gap detection over a synchronized stream's own samples.
std::vector<Gap> detect_gaps(const Stream& stream, double k = 3.0);

struct TimedValue {
    SessionTime t;
    double value = 0.0;
};

enum class Interpolation {
    linear,
    /// Degrees; interpolates along the shortest arc and wraps into [-180, 180).
    angle_degrees,
};

struct ResampledSeries {
    std::vector<double> values;
    /// Grid points outside [first_t, last_t] take the nearest endpoint value.
    std::vector<bool> extrapolated;
};

class ResampleError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Samples `series` (strictly increasing t, at least 2 points) at
/// grid_start + i / grid_rate_hz for i in [0, grid_len).
ResampledSeries resample_uniform(std::span<const TimedValue> series, SessionTime grid_start, double grid_rate_hz,
                                 std::size_t grid_len, Interpolation mode = Interpolation::linear);

struct SyncConfig {
    double gap_k = 3.0;
};

/// A session whose samples carry session time in raw_ts and whose
/// descriptors hold the identity clock mapping.
struct SyncedSession {
    SessionManifest manifest;
    std::vector<Gap> gaps;
    std::size_t clamped_samples = 0;
};

/// Maps every inline sample onto the session timeline and detects gaps in
/// the fixed-rate streams. Idempotent on an already synchronized session.
SyncedSession synchronize(const SessionManifest& manifest, const SyncConfig& config = {});

struct ResampledChannels {
    std::vector<std::string> names;
    std::vector<ResampledSeries> series;

    const ResampledSeries* find(std::string_view name) const;
};

using WindowStreamData = std::variant<SampleSeries, ResampledChannels>;

struct AlignedWindow {
    SessionTime start;
    SessionTime end;
    std::map<std::string, WindowStreamData> per_stream;
    /// Gaps overlapping [start, end); non-empty means reduced quality.
    std::vector<Gap> gaps;

    bool quality_flag() const { return !gaps.empty(); }
};

struct WindowConfig {
    double grid_rate_hz = 1.0;
};

/// Half-open windows [k*hop, k*hop + window) for every start before the session end.
/// Continuous streams are resampled onto the grid, event streams are bucketed.
std::vector<AlignedWindow> window_session(const SyncedSession& session, double window_s, double hop_s,
                                          const WindowConfig& config = {});

/// Window start times only (same tiling as window_session).
std::vector<std::pair<SessionTime, SessionTime>> window_bounds(SessionTime session_end, double window_s, double hop_s);

/// Samples with start <= t < end from a time-ordered vector.
template <class Sample>
std::vector<Sample> slice(const std::vector<Sample>& samples, SessionTime start, SessionTime end)
{
    auto lo = std::lower_bound(samples.begin(), samples.end(), start.micros,
                               [](const Sample& s, std::int64_t t) { return s.raw_ts.micros < t; });
    auto hi = std::lower_bound(lo, samples.end(), end.micros,
                               [](const Sample& s, std::int64_t t) { return s.raw_ts.micros < t; });
    return std::vector<Sample>(lo, hi);
}

}  // namespace deskmon::sync
