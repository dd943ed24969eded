#include "deskmon/features/physio.hpp"

#include <cmath>

namespace deskmon::features {
namespace {

bool inside(RawTime t, SessionTime start, SessionTime end)
{
    return t.micros >= start.micros && t.micros < end.micros;
}

}  // namespace

PhysioAggregate physio_aggregate(std::span<const EEGSample> eeg, std::span<const WearableSample> wear,
                                 SessionTime start, SessionTime end, const PhysioConfig& config)
{
    PhysioAggregate a;
    double attention = 0, meditation = 0;
    std::array<double, 5> bands{};
    std::size_t blinks = 0;
    for (const auto& s : eeg) {
        if (!inside(s.raw_ts, start, end)) continue;
        ++a.eeg_samples;
        attention += s.attention;
        meditation += s.meditation;
        for (std::size_t b = 0; b < 5; ++b) bands[b] += s.band_power[b];
        if (s.blink_strength && *s.blink_strength > config.blink_threshold) ++blinks;
    }
    if (a.eeg_samples > 0) {
        const auto n = static_cast<double>(a.eeg_samples);
        a.mean_attention = attention / n;
        a.mean_meditation = meditation / n;
        for (auto& b : bands) b /= n;
        a.band_power_means = bands;
        a.blink_count = blinks;
    }

    double sum = 0;
    for (const auto& w : wear) {
        if (!inside(w.raw_ts, start, end) || !w.heart_rate_bpm) continue;
        ++a.hr_samples;
        sum += *w.heart_rate_bpm;
    }
    if (a.hr_samples > 0) {
        const double mean = sum / static_cast<double>(a.hr_samples);
        double sq = 0;
        for (const auto& w : wear) {
            if (!inside(w.raw_ts, start, end) || !w.heart_rate_bpm) continue;
            sq += (*w.heart_rate_bpm - mean) * (*w.heart_rate_bpm - mean);
        }
        a.mean_hr_bpm = mean;
        a.std_hr_bpm = std::sqrt(sq / static_cast<double>(a.hr_samples));
    }
    return a;
}

}  // namespace deskmon::features
