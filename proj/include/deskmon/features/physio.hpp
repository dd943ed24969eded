#pragma once

#include "deskmon/session/types.hpp"

#include <array>
#include <optional>
#include <span>

namespace deskmon::features {

/// Aggregates over one window. Absent values are empty optionals, never zeros.
struct PhysioAggregate {
    std::optional<double> mean_attention;
    std::optional<double> mean_meditation;
    std::optional<std::array<double, 5>> band_power_means;
    /// Absent when the window holds no EEG samples.
    std::optional<std::size_t> blink_count;
    std::optional<double> mean_hr_bpm;
    /// Population standard deviation.
    std::optional<double> std_hr_bpm;
    std::size_t eeg_samples = 0;
    std::size_t hr_samples = 0;

    bool operator==(const PhysioAggregate&) const = default;
};

struct PhysioConfig {
    double blink_threshold = 50.0;
};

/// Only samples with start <= t < end are used.
PhysioAggregate physio_aggregate(std::span<const EEGSample> eeg, std::span<const WearableSample> wear,
                                 SessionTime start, SessionTime end, const PhysioConfig& config = {});

}  // namespace deskmon::features
