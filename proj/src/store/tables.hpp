#pragma once

#include "deskmon/session/types.hpp"

#include <array>
#include <string>

namespace deskmon::store::detail {

/// CSV body (header + rows, LF terminated) for a fixed-rate series.
std::string series_to_csv(const SampleSeries& series, const std::array<std::string, 5>& band_labels);
SampleSeries series_from_csv(StreamKind kind, std::string_view text, const std::array<std::string, 5>& band_labels);

/// One JSON object per line.
std::string series_to_ndjson(const SampleSeries& series);
SampleSeries series_from_ndjson(StreamKind kind, std::string_view text);

bool uses_csv(StreamKind kind);

}  // namespace deskmon::store::detail
