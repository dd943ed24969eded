#include "deskmon/features/fixed_text.hpp"

#include "deskmon/features/keystroke.hpp"

#include <cctype>

namespace deskmon::features {
namespace {

struct Typed {
    char c;
    std::int64_t press_t;
};

char fold(char c) { return static_cast<char>(std::tolower(static_cast<unsigned char>(c))); }

}  // namespace

std::optional<char> printable_char(std::string_view key_code)
{
    if (key_code == kSpace) return ' ';
    if (key_code.size() == 1) {
        const auto ch = static_cast<unsigned char>(key_code[0]);
        if (ch > 0x20 && ch < 0x7f) return key_code[0];
    }
    return std::nullopt;
}

std::string key_code_for(char c)
{
    if (c == ' ') return std::string(kSpace);
    return std::string(1, c);
}

FixedTextTemplate fixed_text_template(std::span<const KeyEvent> events, std::string_view reference_text,
                                      const AlignmentConfig& config)
{
    FixedTextTemplate tpl;
    tpl.reference_text = std::string(reference_text);

    std::vector<Typed> typed;
    for (const auto& e : events) {
        if (e.action != KeyAction::press) continue;
        if (e.key_code == kBackspace) {
            if (!typed.empty()) {
                typed.pop_back();
                ++tpl.corrections;
            }
            continue;
        }
        if (auto c = printable_char(e.key_code)) typed.push_back({*c, e.raw_ts.micros});
    }

    const std::size_t n = reference_text.size();
    std::vector<std::optional<std::int64_t>> aligned(n);
    std::size_t next = 0;
    for (const auto& t : typed) {
        if (next >= n) break;
        const std::size_t limit = std::min(n, next + config.lookahead + 1);
        for (std::size_t p = next; p < limit; ++p) {
            if (fold(reference_text[p]) == fold(t.c)) {
                aligned[p] = t.press_t;
                next = p + 1;
                ++tpl.matched_positions;
                break;
            }
        }
    }

    if (n == 0 || static_cast<double>(tpl.matched_positions) < config.min_match_fraction * static_cast<double>(n)) {
        throw UnusableEntry("only " + std::to_string(tpl.matched_positions) + " of " + std::to_string(n) +
                            " reference characters matched; entry unusable for verification");
    }

    const std::size_t len = n - 1;
    tpl.digraph_ms.assign(len, 0.0);
    tpl.mask.assign(len, true);
    for (std::size_t i = 0; i < len; ++i) {
        if (aligned[i] && aligned[i + 1]) {
            tpl.digraph_ms[i] = static_cast<double>(*aligned[i + 1] - *aligned[i]) / 1000.0;
            tpl.mask[i] = false;
        }
    }
    return tpl;
}

}  // namespace deskmon::features
