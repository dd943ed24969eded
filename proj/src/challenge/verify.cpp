#include "deskmon/challenge/verify.hpp"

#include <cmath>
#include <vector>

namespace deskmon::challenge {
namespace {

using Samples = std::map<TimingKey, std::vector<double>>;

double mean_of(const std::vector<double>& v)
{
    double s = 0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double sample_sd(const std::vector<double>& v, double mean)
{
    if (v.size() < 2) return 0.0;
    double sq = 0;
    for (double x : v) sq += (x - mean) * (x - mean);
    return std::sqrt(sq / static_cast<double>(v.size() - 1));
}

TimingProfile build(const Samples& samples, const ProfileConfig& config)
{
    // Pooled within-dimension variance per family, from dimensions with >= 2 values.
    std::map<TimingFamily, std::pair<double, double>> pooled;  // sum (n-1)s^2, sum (n-1)
    std::map<TimingFamily, std::vector<double>> family_values;
    for (const auto& [key, values] : samples) {
        auto& fv = family_values[key.family];
        fv.insert(fv.end(), values.begin(), values.end());
        if (values.size() < 2) continue;
        const double sd = sample_sd(values, mean_of(values));
        auto& [num, den] = pooled[key.family];
        num += static_cast<double>(values.size() - 1) * sd * sd;
        den += static_cast<double>(values.size() - 1);
    }
    std::map<TimingFamily, double> fallback;
    for (const auto& [family, values] : family_values) {
        auto it = pooled.find(family);
        if (it != pooled.end() && it->second.second > 0) {
            fallback[family] = std::sqrt(it->second.first / it->second.second);
        } else {
            // Single-occurrence dimensions only: spread across the family.
            fallback[family] = sample_sd(values, mean_of(values));
        }
    }

    TimingProfile p;
    for (const auto& [key, values] : samples) {
        TimingStats st;
        st.count = values.size();
        st.mean = mean_of(values);
        st.dispersion = values.size() >= config.min_count_for_own_dispersion ? sample_sd(values, st.mean)
                                                                               : fallback[key.family];
        st.dispersion = std::max(st.dispersion, config.min_dispersion_ms);
        p.dims.emplace(key, st);
    }
    return p;
}

}  // namespace

TimingProfile timing_profile(const features::KeystrokeFeatures& f, const ProfileConfig& config)
{
    Samples samples;
    for (const auto& h : f.hold_times) samples[{TimingFamily::hold, h.key, {}}].push_back(h.ms);
    for (const auto& d : f.digraph_pp) samples[{TimingFamily::press_press, d.first, d.second}].push_back(d.ms);
    for (const auto& d : f.digraph_rp) samples[{TimingFamily::release_press, d.first, d.second}].push_back(d.ms);
    return build(samples, config);
}

TimingProfile timing_profile(std::span<const features::FixedTextTemplate> templates, const ProfileConfig& config)
{
    Samples samples;
    for (const auto& t : templates) {
        if (t.reference_text != templates.front().reference_text) {
            throw std::invalid_argument("templates must share one reference text");
        }
        for (std::size_t i = 0; i < t.digraph_ms.size(); ++i) {
            if (t.mask[i]) continue;
            const std::string chars{t.reference_text[i], t.reference_text[i + 1]};
            samples[{TimingFamily::fixed_position, std::to_string(i), chars}].push_back(t.digraph_ms[i]);
        }
    }
    return build(samples, config);
}

double scaled_manhattan(const TimingProfile& enrolled, const TimingProfile& probe, const VerifyConfig& config)
{
    double sum = 0;
    std::size_t shared = 0;
    for (const auto& [key, e] : enrolled.dims) {
        auto it = probe.dims.find(key);
        if (it == probe.dims.end()) continue;
        sum += std::abs(it->second.mean - e.mean) / e.dispersion;
        ++shared;
    }
    if (shared < config.min_overlap || shared == 0) {
        throw InsufficientOverlap("insufficient overlap: " + std::to_string(shared) + " shared timing entries, need " +
                                  std::to_string(config.min_overlap));
    }
    return sum / static_cast<double>(shared);
}

double verify_keystroke(const TimingProfile& enrolled, const TimingProfile& probe, const VerifyConfig& config)
{
    return 1.0 / (1.0 + scaled_manhattan(enrolled, probe, config));
}

double verify_keystroke(const features::KeystrokeFeatures& enrolled, const features::KeystrokeFeatures& probe,
                        const VerifyConfig& config)
{
    return verify_keystroke(timing_profile(enrolled, config.profile), timing_profile(probe, config.profile), config);
}

double verify_keystroke(const features::FixedTextTemplate& enrolled, const features::FixedTextTemplate& probe,
                        const VerifyConfig& config)
{
    return verify_keystroke(timing_profile(std::span(&enrolled, 1), config.profile),
                            timing_profile(std::span(&probe, 1), config.profile), config);
}

}  // namespace deskmon::challenge
