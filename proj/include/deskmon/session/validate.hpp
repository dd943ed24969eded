#pragma once

#include "deskmon/session/types.hpp"

#include <optional>
#include <string>
#include <vector>

namespace deskmon {

struct Violation {
    std::string where;    ///< e.g. "streams[eeg].samples[3]"
    std::string message;  ///< e.g. "attention out of [0,100]"

    bool operator==(const Violation&) const = default;
};

struct ValidationReport {
    std::vector<Violation> violations;

    bool ok() const { return violations.empty(); }
    std::string to_string() const;
};

/// Checks every invariant of the manifest and everything it contains.
/// Violations are collected, never thrown.
ValidationReport validate_manifest(const SessionManifest& manifest);

struct SampleCheckOptions {
    /// Mouse positions are checked against the screen when known.
    std::optional<ScreenResolution> screen;
    /// Release-without-press checks; off for partial series such as one batch.
    bool check_pairing = true;
    /// Reject samples whose mapped session time is negative.
    bool check_clock = true;
};

/// Per-sample checks of one series against its descriptor.
ValidationReport validate_series(const StreamDescriptor& descriptor, const SampleSeries& samples,
                                 const SampleCheckOptions& options = {});

/// Stream ids are used in file names: [A-Za-z0-9_.-]+, not starting with '.'.
bool is_valid_stream_id(std::string_view id);
/// Six colon-separated hexadecimal octets.
bool is_valid_mac(std::string_view mac);

}  // namespace deskmon
