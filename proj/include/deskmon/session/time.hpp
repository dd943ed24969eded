#pragma once

#include <compare>
#include <cstdint>

namespace deskmon {

/// Microseconds on a sensor's own clock, as transmitted by the device.
struct RawTime {
    std::int64_t micros = 0;
    auto operator<=>(const RawTime&) const = default;
};

/// Microseconds since the session epoch (the manifest's start time).
struct SessionTime {
    std::int64_t micros = 0;
    auto operator<=>(const SessionTime&) const = default;

    double seconds() const { return static_cast<double>(micros) * 1e-6; }
};

constexpr std::int64_t kMicrosPerSecond = 1'000'000;

constexpr std::int64_t seconds_to_micros(double s)
{
    return static_cast<std::int64_t>(s * 1e6 + (s >= 0 ? 0.5 : -0.5));
}

}  // namespace deskmon
