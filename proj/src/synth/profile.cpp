#include "deskmon/synth/profile.hpp"

#include "deskmon/synth/rng.hpp"

#include <algorithm>
#include <cmath>

namespace deskmon::synth {

int profile_stratum(std::uint64_t seed, const SeparationConfig& separation)
{
    const auto strata = static_cast<std::uint64_t>(std::max(1, separation.strata));
    return static_cast<int>((seed % strata) * 7 % strata);
}

UserBehaviorProfile generate_profile(std::uint64_t seed, const SeparationConfig& separation)
{
    Rng rng(mix_seed(seed, 0x70f11e));
    UserBehaviorProfile p;
    p.seed = seed;
    if (separation.k > 0) {
        const double width = (separation.hold_hi_ms - separation.hold_lo_ms) / std::max(1, separation.strata);
        const int stratum = profile_stratum(seed, separation);
        // Jitter within +-10% of the band keeps neighbours >= 0.8 * width apart.
        p.mean_hold_ms = separation.hold_lo_ms + width * (stratum + 0.5 + rng.uniform(-0.1, 0.1));
        p.sd_hold_ms = 0.8 * width / separation.k;
    } else {
        p.mean_hold_ms = rng.uniform(60.0, 250.0);
        p.sd_hold_ms = p.mean_hold_ms * rng.uniform(0.08, 0.2);
    }
    for (auto& d : p.digraph) {
        d.mean_pp_ms = rng.uniform(110.0, 260.0);
        d.sd_pp_ms = d.mean_pp_ms * rng.uniform(0.1, 0.2);
    }
    p.mouse_speed_px_s = rng.uniform(400.0, 1200.0);
    p.sd_mouse_speed_px_s = 0.15 * p.mouse_speed_px_s;
    p.baseline_attention = rng.uniform(45.0, 75.0);
    p.sd_attention = rng.uniform(5.0, 12.0);
    p.baseline_hr_bpm = rng.uniform(60.0, 90.0);
    p.sd_hr_bpm = rng.uniform(2.0, 6.0);
    p.error_rate = rng.uniform(0.01, 0.05);
    p.mean_accuracy = rng.uniform(0.5, 0.95);
    return p;
}

bool profile_valid(const UserBehaviorProfile& p)
{
    auto nonneg = [](double v) { return std::isfinite(v) && v >= 0; };
    if (!(p.mean_hold_ms >= 40 && p.mean_hold_ms <= 400) || !nonneg(p.sd_hold_ms)) return false;
    for (const auto& d : p.digraph) {
        if (!(d.mean_pp_ms > 0) || !nonneg(d.sd_pp_ms)) return false;
    }
    if (!(p.mouse_speed_px_s > 0) || !nonneg(p.sd_mouse_speed_px_s)) return false;
    if (!(p.baseline_attention >= 0 && p.baseline_attention <= 100) || !nonneg(p.sd_attention)) return false;
    if (!(p.baseline_hr_bpm >= 40 && p.baseline_hr_bpm <= 180) || !nonneg(p.sd_hr_bpm)) return false;
    if (!(p.error_rate >= 0 && p.error_rate <= 1)) return false;
    return p.mean_accuracy >= 0 && p.mean_accuracy <= 1;
}

std::size_t digraph_class(std::string_view first_key, std::string_view second_key)
{
    std::uint64_t h = 1469598103934665603ULL;
    for (char c : first_key) h = (h ^ static_cast<unsigned char>(c)) * 1099511628211ULL;
    h = (h ^ 0xff) * 1099511628211ULL;
    for (char c : second_key) h = (h ^ static_cast<unsigned char>(c)) * 1099511628211ULL;
    return static_cast<std::size_t>(h % kDigraphClasses);
}

std::pair<double, double> hold_bounds(const UserBehaviorProfile& p)
{
    return {std::max(1.0, p.mean_hold_ms - 4 * p.sd_hold_ms), p.mean_hold_ms + 4 * p.sd_hold_ms};
}

void to_json(Json& j, const UserBehaviorProfile& p)
{
    Json digraphs = Json::array();
    for (const auto& d : p.digraph) digraphs.push_back({{"mean_pp_ms", d.mean_pp_ms}, {"sd_pp_ms", d.sd_pp_ms}});
    j = Json{{"seed", p.seed},
             {"mean_hold_ms", p.mean_hold_ms},
             {"sd_hold_ms", p.sd_hold_ms},
             {"digraph", digraphs},
             {"mouse_speed_px_s", p.mouse_speed_px_s},
             {"sd_mouse_speed_px_s", p.sd_mouse_speed_px_s},
             {"baseline_attention", p.baseline_attention},
             {"sd_attention", p.sd_attention},
             {"baseline_hr_bpm", p.baseline_hr_bpm},
             {"sd_hr_bpm", p.sd_hr_bpm},
             {"error_rate", p.error_rate},
             {"mean_accuracy", p.mean_accuracy}};
}

void from_json(const Json& j, UserBehaviorProfile& p)
{
    p.seed = j.at("seed").get<std::uint64_t>();
    p.mean_hold_ms = j.at("mean_hold_ms").get<double>();
    p.sd_hold_ms = j.at("sd_hold_ms").get<double>();
    const auto& d = j.at("digraph");
    if (!d.is_array() || d.size() != kDigraphClasses) throw SchemaError("digraph must have 3 classes");
    for (std::size_t i = 0; i < kDigraphClasses; ++i) {
        p.digraph[i] = {d[i].at("mean_pp_ms").get<double>(), d[i].at("sd_pp_ms").get<double>()};
    }
    p.mouse_speed_px_s = j.at("mouse_speed_px_s").get<double>();
    p.sd_mouse_speed_px_s = j.at("sd_mouse_speed_px_s").get<double>();
    p.baseline_attention = j.at("baseline_attention").get<double>();
    p.sd_attention = j.at("sd_attention").get<double>();
    p.baseline_hr_bpm = j.at("baseline_hr_bpm").get<double>();
    p.sd_hr_bpm = j.at("sd_hr_bpm").get<double>();
    p.error_rate = j.at("error_rate").get<double>();
    p.mean_accuracy = j.at("mean_accuracy").get<double>();
}

void to_json(Json& j, const SeparationConfig& c)
{
    j = Json{{"k", c.k}, {"strata", c.strata}, {"hold_lo_ms", c.hold_lo_ms}, {"hold_hi_ms", c.hold_hi_ms}};
}

void from_json(const Json& j, SeparationConfig& c)
{
    c.k = j.value("k", c.k);
    c.strata = j.value("strata", c.strata);
    c.hold_lo_ms = j.value("hold_lo_ms", c.hold_lo_ms);
    c.hold_hi_ms = j.value("hold_hi_ms", c.hold_hi_ms);
}

}  // namespace deskmon::synth
