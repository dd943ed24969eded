#include "deskmon/sync/sync.hpp"

#include <cmath>

namespace deskmon::sync {
namespace {

template <class Sample>
std::vector<SessionTime> times_of(const std::vector<Sample>& samples)
{
    std::vector<SessionTime> out;
    out.reserve(samples.size());
    for (const auto& s : samples) out.push_back(SessionTime{s.raw_ts.micros});
    return out;
}

double wrap_degrees(double a)
{
    return a - 360.0 * std::floor((a + 180.0) / 360.0);
}

struct Channel {
    std::string name;
    Interpolation mode = Interpolation::linear;
    std::vector<TimedValue> points;
};

void push_point(Channel& c, std::int64_t t, double v)
{
    // resample_uniform needs strictly increasing times; the first sample at a timestamp wins.
    if (!c.points.empty() && c.points.back().t.micros >= t) return;
    c.points.push_back({SessionTime{t}, v});
}

std::vector<Channel> channels_of(const Stream& s, const std::array<std::string, 5>& band_labels)
{
    std::vector<Channel> out;
    auto make = [&](std::vector<std::string> names, Interpolation mode = Interpolation::linear) {
        for (auto& n : names) out.push_back(Channel{std::move(n), mode, {}});
    };
    if (const auto* eeg = samples_of<EEGSample>(s)) {
        make({band_labels[0], band_labels[1], band_labels[2], band_labels[3], band_labels[4], "attention",
              "meditation"});
        for (const auto& e : *eeg) {
            for (std::size_t b = 0; b < 5; ++b) push_point(out[b], e.raw_ts.micros, e.band_power[b]);
            push_point(out[5], e.raw_ts.micros, e.attention);
            push_point(out[6], e.raw_ts.micros, e.meditation);
        }
    } else if (const auto* wear = samples_of<WearableSample>(s)) {
        make({"heart_rate_bpm", "accel_x", "accel_y", "accel_z", "gyro_x", "gyro_y", "gyro_z", "mag_x", "mag_y",
              "mag_z"});
        for (const auto& w : *wear) {
            const auto t = w.raw_ts.micros;
            if (w.heart_rate_bpm) push_point(out[0], t, *w.heart_rate_bpm);
            const double vals[] = {w.accel.x, w.accel.y, w.accel.z, w.gyro.x, w.gyro.y,
                                   w.gyro.z,  w.mag.x,   w.mag.y,   w.mag.z};
            for (std::size_t i = 0; i < 9; ++i) push_point(out[i + 1], t, vals[i]);
        }
    } else if (const auto* pose = samples_of<HeadPoseSample>(s)) {
        make({"pitch", "roll", "yaw"}, Interpolation::angle_degrees);
        for (const auto& p : *pose) {
            push_point(out[0], p.raw_ts.micros, p.pitch);
            push_point(out[1], p.raw_ts.micros, p.roll);
            push_point(out[2], p.raw_ts.micros, p.yaw);
        }
    } else if (const auto* face = samples_of<FaceSample>(s)) {
        make({"face_size_px", "auth_score", "face_present"});
        for (const auto& f : *face) {
            push_point(out[0], f.raw_ts.micros, f.face_size_px);
            push_point(out[1], f.raw_ts.micros, f.auth_score);
            push_point(out[2], f.raw_ts.micros, f.face_present ? 1.0 : 0.0);
        }
    }
    return out;
}

bool is_continuous(const Stream& s)
{
    return s.descriptor.payload == PayloadKind::inline_samples && !is_event_kind(s.descriptor.kind);
}

}  // namespace

std::vector<Gap> detect_gaps(std::span<const SessionTime> times, const StreamDescriptor& descriptor, double k)
{
    if (is_event_kind(descriptor.kind) || !descriptor.nominal_rate_hz) {
        throw NoNominalRate("stream '" + descriptor.stream_id +
                            "' is an event stream; use activity-based gap detection instead");
    }
    const double threshold_us = k / *descriptor.nominal_rate_hz * 1e6;
    std::vector<Gap> gaps;
    for (std::size_t i = 1; i < times.size(); ++i) {
        if (static_cast<double>(times[i].micros - times[i - 1].micros) > threshold_us) {
            gaps.push_back(Gap{descriptor.stream_id, times[i - 1], times[i]});
        }
    }
    return gaps;
}

std::vector<Gap> detect_gaps(const Stream& stream, double k)
{
    const auto times = std::visit(
        [](const auto& v) -> std::vector<SessionTime> {
            if constexpr (std::is_same_v<std::decay_t<decltype(v)>, std::monostate>) {
                return {};
            } else {
                return times_of(v);
            }
        },
        stream.samples);
    return detect_gaps(times, stream.descriptor, k);
}

ResampledSeries resample_uniform(std::span<const TimedValue> series, SessionTime grid_start, double grid_rate_hz,
                                 std::size_t grid_len, Interpolation mode)
{
    if (series.size() < 2) throw ResampleError("resampling needs at least 2 points");
    if (!(grid_rate_hz > 0)) throw ResampleError("grid rate must be > 0");
    for (std::size_t i = 1; i < series.size(); ++i) {
        if (series[i].t <= series[i - 1].t) throw ResampleError("series times must be strictly increasing");
    }
    ResampledSeries out;
    out.values.resize(grid_len);
    out.extrapolated.resize(grid_len);
    const double first = static_cast<double>(series.front().t.micros);
    const double last = static_cast<double>(series.back().t.micros);
    const double step = 1e6 / grid_rate_hz;
    std::size_t seg = 0;
    bool located = false;
    for (std::size_t i = 0; i < grid_len; ++i) {
        const double g = static_cast<double>(grid_start.micros) + static_cast<double>(i) * step;
        if (g <= first) {
            out.values[i] = series.front().value;
            out.extrapolated[i] = g < first;
            continue;
        }
        if (g >= last) {
            out.values[i] = series.back().value;
            out.extrapolated[i] = g > last;
            continue;
        }
        if (!located) {
            auto it = std::upper_bound(series.begin(), series.end(), g, [](double v, const TimedValue& p) {
                return v < static_cast<double>(p.t.micros);
            });
            seg = static_cast<std::size_t>(it - series.begin()) - 1;
            located = true;
        }
        // Grid times increase, so the segment index only moves forward.
        while (static_cast<double>(series[seg + 1].t.micros) <= g) ++seg;
        const double t0 = static_cast<double>(series[seg].t.micros);
        const double t1 = static_cast<double>(series[seg + 1].t.micros);
        const double v0 = series[seg].value;
        const double v1 = series[seg + 1].value;
        if (g == t0) {
            out.values[i] = v0;
            continue;
        }
        const double frac = (g - t0) / (t1 - t0);
        if (mode == Interpolation::angle_degrees) {
            out.values[i] = wrap_degrees(v0 + frac * wrap_degrees(v1 - v0));
        } else {
            out.values[i] = v0 + frac * (v1 - v0);
        }
    }
    return out;
}

SyncedSession synchronize(const SessionManifest& manifest, const SyncConfig& config)
{
    SyncedSession out;
    out.manifest = manifest;
    for (auto& s : out.manifest.streams) {
        const StreamDescriptor original = s.descriptor;
        std::visit(
            [&](auto& v) {
                if constexpr (!std::is_same_v<std::decay_t<decltype(v)>, std::monostate>) {
                    for (auto& sample : v) {
                        const MappedTime m = to_session_time(sample.raw_ts, original);
                        if (m.clamped) ++out.clamped_samples;
                        sample.raw_ts.micros = m.time.micros;
                    }
                }
            },
            s.samples);
        s.descriptor.clock_offset_micros = 0;
        s.descriptor.clock_drift_ppm = 0.0;
        s.descriptor.clock_reference_raw_micros = 0;
        if (is_continuous(s) && s.descriptor.nominal_rate_hz) {
            auto gaps = detect_gaps(s, config.gap_k);
            out.gaps.insert(out.gaps.end(), gaps.begin(), gaps.end());
        }
    }
    return out;
}

const ResampledSeries* ResampledChannels::find(std::string_view name) const
{
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (names[i] == name) return &series[i];
    }
    return nullptr;
}

std::vector<std::pair<SessionTime, SessionTime>> window_bounds(SessionTime session_end, double window_s, double hop_s)
{
    if (!(window_s > 0) || !(hop_s > 0)) throw std::invalid_argument("window and hop must be > 0");
    std::vector<std::pair<SessionTime, SessionTime>> out;
    const std::int64_t width = seconds_to_micros(window_s);
    for (std::int64_t k = 0;; ++k) {
        const std::int64_t start = seconds_to_micros(static_cast<double>(k) * hop_s);
        if (start >= session_end.micros) break;
        out.emplace_back(SessionTime{start}, SessionTime{start + width});
    }
    return out;
}

std::vector<AlignedWindow> window_session(const SyncedSession& session, double window_s, double hop_s,
                                          const WindowConfig& config)
{
    const auto& m = session.manifest;
    const auto bounds = window_bounds(m.session_end(), window_s, hop_s);

    struct Prepared {
        const Stream* stream;
        std::vector<Channel> channels;
    };
    std::vector<Prepared> prepared;
    for (const auto& s : m.streams) {
        if (s.descriptor.payload != PayloadKind::inline_samples) continue;
        prepared.push_back({&s, is_continuous(s) ? channels_of(s, m.eeg_band_labels) : std::vector<Channel>{}});
    }

    std::vector<AlignedWindow> windows;
    windows.reserve(bounds.size());
    for (const auto& [start, end] : bounds) {
        AlignedWindow w;
        w.start = start;
        w.end = end;
        const auto grid_len = static_cast<std::size_t>(
            std::llround(static_cast<double>(end.micros - start.micros) * 1e-6 * config.grid_rate_hz));
        for (const auto& p : prepared) {
            const auto& id = p.stream->descriptor.stream_id;
            if (!is_continuous(*p.stream)) {
                w.per_stream.emplace(id, std::visit(
                                             [&](const auto& v) -> SampleSeries {
                                                 if constexpr (std::is_same_v<std::decay_t<decltype(v)>,
                                                                              std::monostate>) {
                                                     return std::monostate{};
                                                 } else {
                                                     return slice(v, start, end);
                                                 }
                                             },
                                             p.stream->samples));
                continue;
            }
            ResampledChannels rc;
            for (const auto& c : p.channels) {
                if (c.points.size() < 2) continue;
                rc.names.push_back(c.name);
                rc.series.push_back(resample_uniform(c.points, start, config.grid_rate_hz, grid_len, c.mode));
            }
            w.per_stream.emplace(id, std::move(rc));
        }
        for (const auto& g : session.gaps) {
            if (g.start < end && g.end > start) w.gaps.push_back(g);
        }
        windows.push_back(std::move(w));
    }
    return windows;
}

}  // namespace deskmon::sync
