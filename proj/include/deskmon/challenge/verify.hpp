#pragma once

#include "deskmon/features/fixed_text.hpp"
#include "deskmon/features/keystroke.hpp"

#include <compare>
#include <map>
#include <span>
#include <stdexcept>
#include <string>

namespace deskmon::challenge {

enum class TimingFamily { hold, press_press, release_press, fixed_position };

struct TimingKey {
    TimingFamily family = TimingFamily::hold;
    std::string first;
    std::string second;

    auto operator<=>(const TimingKey&) const = default;
};

struct TimingStats {
    double mean = 0.0;
    /// Spread used to scale distances against this dimension (ms).
    double dispersion = 0.0;
    std::size_t count = 0;
};

/// Per-dimension timing statistics of one user sample (enrollment or probe).
struct TimingProfile {
    std::map<TimingKey, TimingStats> dims;
};

struct ProfileConfig {
    /// Dimensions with fewer occurrences borrow the pooled dispersion of their family.
    std::size_t min_count_for_own_dispersion = 5;
    double min_dispersion_ms = 1.0;
};

TimingProfile timing_profile(const features::KeystrokeFeatures& features, const ProfileConfig& config = {});
/// Templates must share one reference text; entries are keyed by position.
TimingProfile timing_profile(std::span<const features::FixedTextTemplate> templates, const ProfileConfig& config = {});

class InsufficientOverlap : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct VerifyConfig {
    std::size_t min_overlap = 5;
    ProfileConfig profile;
};

/// Mean over shared dimensions of |probe mean - enrolled mean| / enrolled
/// dispersion. Throws InsufficientOverlap below config.min_overlap shared dimensions.
double scaled_manhattan(const TimingProfile& enrolled, const TimingProfile& probe, const VerifyConfig& config = {});

/// score = 1 / (1 + scaled_manhattan), in (0, 1].
double verify_keystroke(const TimingProfile& enrolled, const TimingProfile& probe, const VerifyConfig& config = {});
double verify_keystroke(const features::KeystrokeFeatures& enrolled, const features::KeystrokeFeatures& probe,
                        const VerifyConfig& config = {});
double verify_keystroke(const features::FixedTextTemplate& enrolled, const features::FixedTextTemplate& probe,
                        const VerifyConfig& config = {});

}  // namespace deskmon::challenge
