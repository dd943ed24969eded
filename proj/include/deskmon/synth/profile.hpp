#pragma once

#include "deskmon/session/json.hpp"

#include <array>
#include <cstdint>

namespace deskmon::synth {

struct DigraphTiming {
    double mean_pp_ms = 0.0;
    double sd_pp_ms = 0.0;

    bool operator==(const DigraphTiming&) const = default;
};

inline constexpr std::size_t kDigraphClasses = 3;

struct UserBehaviorProfile {
    std::uint64_t seed = 0;
    double mean_hold_ms = 0.0;
    double sd_hold_ms = 0.0;
    std::array<DigraphTiming, kDigraphClasses> digraph{};
    double mouse_speed_px_s = 0.0;
    double sd_mouse_speed_px_s = 0.0;
    double baseline_attention = 0.0;
    double sd_attention = 0.0;
    double baseline_hr_bpm = 0.0;
    double sd_hr_bpm = 0.0;
    double error_rate = 0.0;
    /// Mean task accuracy in [0, 1].
    double mean_accuracy = 0.0;

    bool operator==(const UserBehaviorProfile&) const = default;
};

/// Stratified hold-time means. With k > 0 the [hold_lo, hold_hi] range is
/// cut into `strata` bands, seed s lands in band (7 s) mod strata, and
/// sd_hold = 0.8 * band_width / k, so profiles in distinct bands have means
/// at least k * sd apart. k = 0 draws the mean freely.
struct SeparationConfig {
    double k = 3.0;
    int strata = 20;
    double hold_lo_ms = 40.0;
    double hold_hi_ms = 400.0;
};

UserBehaviorProfile generate_profile(std::uint64_t seed, const SeparationConfig& separation = {});

/// Stratum used for `seed` (meaningful when k > 0).
int profile_stratum(std::uint64_t seed, const SeparationConfig& separation);

/// Physical-range and sd >= 0 checks.
bool profile_valid(const UserBehaviorProfile& p);

/// Digraph timing class of a key pair.
std::size_t digraph_class(std::string_view first_key, std::string_view second_key);

/// Truncation bounds for hold-time draws: mean +- 4 sd, floored at 1 ms.
std::pair<double, double> hold_bounds(const UserBehaviorProfile& p);

void to_json(Json& j, const UserBehaviorProfile& p);
void from_json(const Json& j, UserBehaviorProfile& p);
void to_json(Json& j, const SeparationConfig& c);
void from_json(const Json& j, SeparationConfig& c);

}  // namespace deskmon::synth
