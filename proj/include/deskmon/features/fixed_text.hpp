#pragma once

#include "deskmon/session/types.hpp"

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace deskmon::features {

/// Press-to-press latencies aligned to consecutive reference characters.
struct FixedTextTemplate {
    std::string reference_text;
    /// Entry i is the latency from reference char i to char i + 1 (ms).
    std::vector<double> digraph_ms;
    /// true = entry missing (one of its characters was not matched).
    std::vector<bool> mask;
    std::size_t matched_positions = 0;
    std::size_t corrections = 0;

    bool operator==(const FixedTextTemplate&) const = default;
};

class UnusableEntry : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct AlignmentConfig {
    /// How far ahead in the reference a typed character may match.
    std::size_t lookahead = 3;
    double min_match_fraction = 0.5;
};

/// Character typed by a printable key code ("a", "Space" -> ' '), if any.
std::optional<char> printable_char(std::string_view key_code);
/// Inverse of printable_char for the characters the generator types.
std::string key_code_for(char c);

/// Backspaces remove the last surviving character, then typed characters are
/// greedily aligned left to right against the reference. Throws
/// UnusableEntry when fewer than min_match_fraction of positions match.
FixedTextTemplate fixed_text_template(std::span<const KeyEvent> events, std::string_view reference_text,
                                      const AlignmentConfig& config = {});

}  // namespace deskmon::features
