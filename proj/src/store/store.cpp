#include "deskmon/store/store.hpp"

#include "deskmon/session/anonymize.hpp"
#include "deskmon/session/json.hpp"
#include "deskmon/session/validate.hpp"
#include "tables.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <fstream>
#include <map>
#include <memory>
#include <random>
#include <set>
#include <sstream>

namespace deskmon::store {
namespace {

constexpr const char* kManifest = "manifest.json";
constexpr const char* kChecksums = "checksums.txt";

std::string read_file(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw StoreError(StoreErrorCode::io, "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return std::move(ss).str();
}

void write_file(const fs::path& path, std::string_view bytes)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.close();
    if (!out) throw StoreError(StoreErrorCode::io, "cannot write " + path.string());
}

fs::path temp_sibling(const fs::path& root)
{
    static thread_local std::mt19937_64 rng(std::random_device{}());
    const auto parent = root.has_parent_path() ? root.parent_path() : fs::path(".");
    for (int attempt = 0; attempt < 16; ++attempt) {
        auto candidate = parent / ("." + root.filename().string() + ".tmp-" + std::to_string(rng() % 1000000000));
        if (!fs::exists(candidate)) return candidate;
    }
    throw StoreError(StoreErrorCode::io, "cannot allocate temporary directory next to " + root.string());
}

/// Removes the temporary tree unless released.
struct TempDirGuard {
    fs::path path;
    bool armed = true;
    ~TempDirGuard()
    {
        if (!armed) return;
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

std::vector<std::string> relative_files(const fs::path& root)
{
    std::vector<std::string> files;
    for (const auto& entry : fs::recursive_directory_iterator(root)) {
        if (!entry.is_regular_file()) continue;
        auto rel = fs::relative(entry.path(), root).generic_string();
        if (rel != kChecksums) files.push_back(std::move(rel));
    }
    std::sort(files.begin(), files.end());
    return files;
}

std::map<std::string, std::string> read_checksums(const fs::path& root)
{
    const auto path = root / kChecksums;
    if (!fs::exists(path)) throw StoreError(StoreErrorCode::missing_file, "missing " + std::string(kChecksums), kChecksums);
    std::map<std::string, std::string> sums;
    std::istringstream in(read_file(path));
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto sep = line.find("  ");
        if (sep != 64) {
            throw StoreError(StoreErrorCode::schema_violation, "malformed checksum line '" + line + "'", kChecksums);
        }
        sums[line.substr(sep + 2)] = line.substr(0, sep);
    }
    return sums;
}

bool is_printable_label(const std::string& s)
{
    return !s.empty() && s.find_first_of(",\n\r") == std::string::npos;
}

}  // namespace

std::string_view to_string(StoreErrorCode code)
{
    switch (code) {
    case StoreErrorCode::target_exists: return "target_exists";
    case StoreErrorCode::validation_failed: return "validation_failed";
    case StoreErrorCode::checksum_mismatch: return "checksum_mismatch";
    case StoreErrorCode::missing_file: return "missing_file";
    case StoreErrorCode::schema_violation: return "schema_violation";
    case StoreErrorCode::not_anonymized: return "not_anonymized";
    case StoreErrorCode::io: return "io";
    }
    return "?";
}

StoreError::StoreError(StoreErrorCode code, const std::string& what, std::string file)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code), file_(std::move(file))
{
}

std::string sha256_hex(std::string_view bytes)
{
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
        throw StoreError(StoreErrorCode::io, "SHA-256 failed");
    }
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xf];
    }
    return out;
}

std::string sha256_file(const fs::path& path)
{
    return sha256_hex(read_file(path));
}

std::string data_file_name(const StreamDescriptor& d)
{
    return detail::uses_csv(d.kind) ? "samples." + d.stream_id + ".csv" : "events." + d.stream_id + ".ndjson";
}

fs::path save_session(const SessionManifest& session, const fs::path& root, const SaveOptions& options)
{
    if (fs::exists(root)) throw StoreError(StoreErrorCode::target_exists, root.string() + " already exists");
    const auto report = validate_manifest(session);
    if (!report.ok()) throw StoreError(StoreErrorCode::validation_failed, report.to_string());
    for (const auto& label : session.eeg_band_labels) {
        if (!is_printable_label(label)) {
            throw StoreError(StoreErrorCode::validation_failed, "EEG band label '" + label + "' cannot be a CSV column");
        }
    }

    if (root.has_parent_path()) fs::create_directories(root.parent_path());
    TempDirGuard tmp{temp_sibling(root)};
    fs::create_directory(tmp.path);

    Json manifest = manifest_to_json(session, false);
    for (std::size_t i = 0; i < session.streams.size(); ++i) {
        const auto& s = session.streams[i];
        if (s.descriptor.payload == PayloadKind::external_file) {
            if (options.media_source && s.descriptor.media_file) {
                const auto src = *options.media_source / *s.descriptor.media_file;
                if (fs::exists(src)) {
                    const auto dst = tmp.path / "media" / *s.descriptor.media_file;
                    fs::create_directories(dst.parent_path());
                    fs::copy_file(src, dst);
                }
            }
            continue;
        }
        const auto name = data_file_name(s.descriptor);
        const auto body = detail::uses_csv(s.descriptor.kind)
                              ? detail::series_to_csv(s.samples, session.eeg_band_labels)
                              : detail::series_to_ndjson(s.samples);
        write_file(tmp.path / name, body);
        manifest["streams"][i]["data_file"] = name;
    }
    write_file(tmp.path / kManifest, manifest.dump(2) + "\n");

    std::string sums;
    for (const auto& rel : relative_files(tmp.path)) {
        sums += sha256_file(tmp.path / rel) + "  " + rel + "\n";
    }
    write_file(tmp.path / kChecksums, sums);

    std::error_code ec;
    fs::rename(tmp.path, root, ec);
    if (ec) throw StoreError(StoreErrorCode::io, "rename onto " + root.string() + " failed: " + ec.message());
    tmp.armed = false;
    return root / kManifest;
}

std::vector<std::string> verify_layout(const fs::path& root)
{
    std::vector<std::string> problems;
    std::map<std::string, std::string> sums;
    try {
        sums = read_checksums(root);
    } catch (const StoreError& e) {
        return {e.what()};
    }
    for (const auto& [rel, expected] : sums) {
        const auto path = root / rel;
        if (!fs::exists(path)) {
            problems.push_back("missing file " + rel);
        } else if (sha256_file(path) != expected) {
            problems.push_back("checksum mismatch in " + rel);
        }
    }
    for (const auto& rel : relative_files(root)) {
        if (!sums.count(rel)) problems.push_back("file not covered by checksums: " + rel);
    }
    return problems;
}

SessionManifest load_session(const fs::path& root)
{
    if (!fs::is_directory(root)) throw StoreError(StoreErrorCode::missing_file, root.string() + " is not a directory");
    const auto sums = read_checksums(root);
    if (!sums.count(kManifest) && !fs::exists(root / kManifest)) {
        throw StoreError(StoreErrorCode::missing_file, "missing manifest.json", kManifest);
    }

    Json manifest_json;
    try {
        manifest_json = Json::parse(read_file(root / kManifest));
    } catch (const Json::parse_error& e) {
        throw StoreError(StoreErrorCode::schema_violation, std::string("manifest.json: ") + e.what(), kManifest);
    }
    // Every stream file the manifest names must be present before checksums are compared,
    // so that a missing file is reported as such.
    if (manifest_json.contains("streams") && manifest_json["streams"].is_array()) {
        for (const auto& js : manifest_json["streams"]) {
            if (auto it = js.find("data_file"); it != js.end() && it->is_string()) {
                const auto rel = it->get<std::string>();
                if (!fs::exists(root / rel)) throw StoreError(StoreErrorCode::missing_file, "missing stream file " + rel, rel);
            }
        }
    }
    for (const auto& [rel, expected] : sums) {
        const auto path = root / rel;
        if (!fs::exists(path)) throw StoreError(StoreErrorCode::missing_file, "missing file " + rel, rel);
        if (sha256_file(path) != expected) throw StoreError(StoreErrorCode::checksum_mismatch, "checksum mismatch in " + rel, rel);
    }
    for (const auto& rel : relative_files(root)) {
        if (!sums.count(rel)) {
            throw StoreError(StoreErrorCode::checksum_mismatch, "file not covered by checksums: " + rel, rel);
        }
    }

    SessionManifest m;
    try {
        m = manifest_from_json(manifest_json);
    } catch (const SchemaError& e) {
        throw StoreError(StoreErrorCode::schema_violation, e.what(), kManifest);
    }
    for (std::size_t i = 0; i < m.streams.size(); ++i) {
        auto& s = m.streams[i];
        if (s.descriptor.payload == PayloadKind::external_file) continue;
        const auto& js = manifest_json["streams"][i];
        const auto it = js.find("data_file");
        if (it == js.end() || !it->is_string()) {
            throw StoreError(StoreErrorCode::schema_violation, "stream " + s.descriptor.stream_id + " has no data_file",
                             kManifest);
        }
        const auto rel = it->get<std::string>();
        if (!sums.count(rel)) throw StoreError(StoreErrorCode::checksum_mismatch, rel + " is not covered by checksums", rel);
        const auto text = read_file(root / rel);
        try {
            s.samples = detail::uses_csv(s.descriptor.kind)
                            ? detail::series_from_csv(s.descriptor.kind, text, m.eeg_band_labels)
                            : detail::series_from_ndjson(s.descriptor.kind, text);
        } catch (const SchemaError& e) {
            throw StoreError(StoreErrorCode::schema_violation, rel + ": " + e.what(), rel);
        }
    }
    const auto report = validate_manifest(m);
    if (!report.ok()) throw StoreError(StoreErrorCode::validation_failed, report.to_string());
    return m;
}

std::vector<fs::path> find_session_dirs(const fs::path& root)
{
    if (fs::exists(root / kManifest)) return {root};
    std::vector<fs::path> dirs;
    if (!fs::is_directory(root)) return dirs;
    for (const auto& entry : fs::recursive_directory_iterator(root)) {
        if (entry.is_regular_file() && entry.path().filename() == kManifest) dirs.push_back(entry.path().parent_path());
    }
    std::sort(dirs.begin(), dirs.end());
    return dirs;
}

ExportSummary export_dataset(std::span<const SessionManifest> sessions, const fs::path& out_root)
{
    for (const auto& s : sessions) {
        if (!is_anonymized(s)) {
            throw StoreError(StoreErrorCode::not_anonymized, "session " + s.session_id + " carries identity fields");
        }
    }
    if (fs::exists(out_root) && !fs::is_empty(out_root)) {
        throw StoreError(StoreErrorCode::target_exists, out_root.string() + " exists and is not empty");
    }
    fs::create_directories(out_root);

    std::map<std::uint64_t, std::vector<const SessionManifest*>> by_user;
    for (const auto& s : sessions) by_user[*s.user_id].push_back(&s);

    Json users = Json::array();
    ExportSummary summary;
    for (const auto& [uid, list] : by_user) {
        Json user{{"user_id", uid}, {"demographics", list.front()->demographics}, {"sessions", Json::array()}};
        for (const auto* s : list) {
            save_session(*s, out_root / std::to_string(uid) / s->session_id);
            Json tasks = Json::array();
            for (const auto& t : s->tasks) {
                tasks.push_back({{"task_id", t.task_id},
                                 {"group", to_string(t.group)},
                                 {"accuracy", t.accuracy},
                                 {"time_s", t.duration_s}});
            }
            user["sessions"].push_back({{"session_id", s->session_id},
                                        {"path", std::to_string(uid) + "/" + s->session_id},
                                        {"cheater_flag", s->cheater_flag},
                                        {"tasks", tasks}});
            ++summary.sessions;
        }
        users.push_back(std::move(user));
    }
    summary.users = by_user.size();
    summary.index = out_root / "index.json";
    write_file(summary.index,
               Json{{"format", "deskmon-dataset"}, {"format_version", 1}, {"n_users", summary.users}, {"users", users}}
                       .dump(2) +
                   "\n");
    return summary;
}

}  // namespace deskmon::store
