#pragma once

// On-disk session layout:
//
//   <root>/manifest.json            manifest without samples; each stream has
//                                   "data_file" (inline) or "media_file"
//   <root>/events.<id>.ndjson       keyboard, mouse and context streams
//   <root>/samples.<id>.csv         EEG, smartwatch, head pose, face streams
//   <root>/media/...                copied media files (optional)
//   <root>/checksums.txt            "<sha256>  <relative path>" for every other file

#include "deskmon/session/types.hpp"

#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace deskmon::store {

namespace fs = std::filesystem;

enum class StoreErrorCode {
    target_exists,
    validation_failed,
    checksum_mismatch,
    missing_file,
    schema_violation,
    not_anonymized,
    io,
};

std::string_view to_string(StoreErrorCode code);

class StoreError : public std::runtime_error {
public:
    StoreError(StoreErrorCode code, const std::string& what, std::string file = {});

    StoreErrorCode code() const { return code_; }
    /// Relative path of the offending file, when there is one.
    const std::string& file() const { return file_; }

private:
    StoreErrorCode code_;
    std::string file_;
};

struct SaveOptions {
    /// When set, media_file references of external streams are resolved
    /// against this directory and copied into <root>/media/.
    std::optional<fs::path> media_source;
};

/// Validates, then writes the layout into a temporary sibling directory and
/// renames it onto `root`. Returns the manifest path.
fs::path save_session(const SessionManifest& session, const fs::path& root, const SaveOptions& options = {});

/// Verifies checksums, parses and validates.
SessionManifest load_session(const fs::path& root);

/// Checksums only; returns the list of problems (empty when intact).
std::vector<std::string> verify_layout(const fs::path& root);

/// Session directories below `root` (or `root` itself), sorted by path.
std::vector<fs::path> find_session_dirs(const fs::path& root);

struct ExportSummary {
    std::size_t users = 0;
    std::size_t sessions = 0;
    fs::path index;
};

/// Writes <out>/<user_id>/<session_id>/ for every session plus <out>/index.json.
/// Refuses (before writing anything) when any session is not anonymized.
ExportSummary export_dataset(std::span<const SessionManifest> sessions, const fs::path& out_root);

std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const fs::path& path);

/// Stream data file name for an inline stream ("events.kbd.ndjson", ...).
std::string data_file_name(const StreamDescriptor& descriptor);

}  // namespace deskmon::store
