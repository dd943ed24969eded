#include "deskmon/features/keystroke.hpp"

#include <optional>
#include <unordered_map>

namespace deskmon::features {
namespace {

double to_ms(std::int64_t micros) { return static_cast<double>(micros) / 1000.0; }

struct PressRecord {
    std::string key;
    std::int64_t t = 0;
    std::optional<std::int64_t> release_t;
};

}  // namespace

KeystrokeFeatures keystroke_features(std::span<const KeyEvent> events)
{
    KeystrokeFeatures f;
    std::vector<PressRecord> presses;
    std::unordered_map<std::string, std::size_t> open;  // key -> index into presses
    std::size_t backspaces = 0;

    for (const auto& e : events) {
        if (e.action == KeyAction::press) {
            presses.push_back({e.key_code, e.raw_ts.micros, std::nullopt});
            if (e.key_code == kBackspace) ++backspaces;
            open.try_emplace(e.key_code, presses.size() - 1);
            continue;
        }
        auto it = open.find(e.key_code);
        if (it == open.end()) {
            ++f.diagnostics.orphan_releases;
            continue;
        }
        PressRecord& p = presses[it->second];
        p.release_t = e.raw_ts.micros;
        f.hold_times.push_back({e.key_code, to_ms(e.raw_ts.micros - p.t)});
        open.erase(it);
    }

    for (std::size_t i = 1; i < presses.size(); ++i) {
        const auto& a = presses[i - 1];
        const auto& b = presses[i];
        f.digraph_pp.push_back({a.key, b.key, to_ms(b.t - a.t)});
        if (a.release_t) f.digraph_rp.push_back({a.key, b.key, to_ms(b.t - *a.release_t)});
    }

    f.presses = presses.size();
    f.diagnostics.unmatched_presses = open.size();
    if (!presses.empty()) f.backspace_rate = static_cast<double>(backspaces) / static_cast<double>(presses.size());
    if (events.size() >= 2) {
        const auto span_us = events.back().raw_ts.micros - events.front().raw_ts.micros;
        if (span_us > 0) f.keys_per_second = static_cast<double>(presses.size()) / (static_cast<double>(span_us) * 1e-6);
    }
    return f;
}

}  // namespace deskmon::features
