#include "tables.hpp"

#include "deskmon/session/json.hpp"

#include <charconv>
#include <cmath>
#include <system_error>

namespace deskmon::store::detail {
namespace {

void put(std::string& out, double v)
{
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    out.append(buf, end);
}

void put(std::string& out, std::int64_t v)
{
    char buf[24];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    out.append(buf, end);
}

void put(std::string& out, const std::optional<double>& v)
{
    if (v) put(out, *v);
}

std::vector<std::string_view> split(std::string_view line)
{
    std::vector<std::string_view> cells;
    std::size_t pos = 0;
    while (true) {
        const auto comma = line.find(',', pos);
        if (comma == std::string_view::npos) {
            cells.push_back(line.substr(pos));
            return cells;
        }
        cells.push_back(line.substr(pos, comma - pos));
        pos = comma + 1;
    }
}

double to_double(std::string_view cell, std::size_t row)
{
    double v = 0;
    auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (ec != std::errc{} || ptr != cell.data() + cell.size()) {
        throw SchemaError("row " + std::to_string(row) + ": bad number '" + std::string(cell) + "'");
    }
    return v;
}

std::optional<double> to_opt_double(std::string_view cell, std::size_t row)
{
    if (cell.empty()) return std::nullopt;
    return to_double(cell, row);
}

RawTime to_raw(std::string_view cell, std::size_t row)
{
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (ec != std::errc{} || ptr != cell.data() + cell.size()) {
        throw SchemaError("row " + std::to_string(row) + ": bad timestamp '" + std::string(cell) + "'");
    }
    return RawTime{v};
}

std::vector<std::string> header_for(StreamKind kind, const std::array<std::string, 5>& bands)
{
    switch (kind) {
    case StreamKind::eeg_band: {
        std::vector<std::string> h{"raw_ts"};
        h.insert(h.end(), bands.begin(), bands.end());
        h.insert(h.end(), {"attention", "meditation", "blink_strength"});
        return h;
    }
    case StreamKind::smartwatch:
        return {"raw_ts", "heart_rate_bpm", "accel_x", "accel_y", "accel_z", "gyro_x", "gyro_y", "gyro_z",
                "mag_x", "mag_y", "mag_z"};
    case StreamKind::head_pose: return {"raw_ts", "pitch", "roll", "yaw"};
    case StreamKind::face_biometrics: return {"raw_ts", "face_size_px", "auth_score", "face_present"};
    default: throw SchemaError("stream kind " + std::string(to_string(kind)) + " has no CSV form");
    }
}

void put_row(std::string& out, const EEGSample& s)
{
    put(out, s.raw_ts.micros);
    for (double b : s.band_power) {
        out += ',';
        put(out, b);
    }
    out += ',';
    put(out, s.attention);
    out += ',';
    put(out, s.meditation);
    out += ',';
    put(out, s.blink_strength);
}

void put_vec(std::string& out, const Vec3& v)
{
    for (double c : {v.x, v.y, v.z}) {
        out += ',';
        put(out, c);
    }
}

void put_row(std::string& out, const WearableSample& s)
{
    put(out, s.raw_ts.micros);
    out += ',';
    put(out, s.heart_rate_bpm);
    put_vec(out, s.accel);
    put_vec(out, s.gyro);
    put_vec(out, s.mag);
}

void put_row(std::string& out, const HeadPoseSample& s)
{
    put(out, s.raw_ts.micros);
    for (double a : {s.pitch, s.roll, s.yaw}) {
        out += ',';
        put(out, a);
    }
}

void put_row(std::string& out, const FaceSample& s)
{
    put(out, s.raw_ts.micros);
    out += ',';
    put(out, s.face_size_px);
    out += ',';
    put(out, s.auth_score);
    out += s.face_present ? ",1" : ",0";
}

template <class Sample>
std::string rows_to_csv(const std::vector<Sample>& samples, const std::vector<std::string>& header)
{
    std::string out;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i) out += ',';
        out += header[i];
    }
    out += '\n';
    for (const auto& s : samples) {
        put_row(out, s);
        out += '\n';
    }
    return out;
}

Vec3 vec_at(const std::vector<std::string_view>& c, std::size_t i, std::size_t row)
{
    return {to_double(c[i], row), to_double(c[i + 1], row), to_double(c[i + 2], row)};
}

}  // namespace

bool uses_csv(StreamKind kind)
{
    return kind == StreamKind::eeg_band || kind == StreamKind::smartwatch || kind == StreamKind::head_pose ||
           kind == StreamKind::face_biometrics;
}

std::string series_to_csv(const SampleSeries& series, const std::array<std::string, 5>& band_labels)
{
    if (const auto* v = std::get_if<std::vector<EEGSample>>(&series)) {
        return rows_to_csv(*v, header_for(StreamKind::eeg_band, band_labels));
    }
    if (const auto* v = std::get_if<std::vector<WearableSample>>(&series)) {
        return rows_to_csv(*v, header_for(StreamKind::smartwatch, band_labels));
    }
    if (const auto* v = std::get_if<std::vector<HeadPoseSample>>(&series)) {
        return rows_to_csv(*v, header_for(StreamKind::head_pose, band_labels));
    }
    if (const auto* v = std::get_if<std::vector<FaceSample>>(&series)) {
        return rows_to_csv(*v, header_for(StreamKind::face_biometrics, band_labels));
    }
    throw SchemaError("series of type " + std::string(sample_type_name(series)) + " has no CSV form");
}

SampleSeries series_from_csv(StreamKind kind, std::string_view text, const std::array<std::string, 5>& band_labels)
{
    const auto header = header_for(kind, band_labels);
    std::vector<std::vector<std::string_view>> rows;
    std::size_t pos = 0;
    bool first = true;
    while (pos < text.size()) {
        auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos) throw SchemaError("CSV file does not end with a newline");
        const auto line = text.substr(pos, nl - pos);
        pos = nl + 1;
        auto cells = split(line);
        if (first) {
            if (cells.size() != header.size() || !std::equal(cells.begin(), cells.end(), header.begin())) {
                throw SchemaError("unexpected CSV header '" + std::string(line) + "'");
            }
            first = false;
            continue;
        }
        if (cells.size() != header.size()) {
            throw SchemaError("row " + std::to_string(rows.size() + 1) + ": expected " +
                              std::to_string(header.size()) + " cells, got " + std::to_string(cells.size()));
        }
        rows.push_back(std::move(cells));
    }
    if (first) throw SchemaError("CSV file has no header");

    switch (kind) {
    case StreamKind::eeg_band: {
        std::vector<EEGSample> out;
        out.reserve(rows.size());
        for (std::size_t r = 0; r < rows.size(); ++r) {
            const auto& c = rows[r];
            EEGSample s;
            s.raw_ts = to_raw(c[0], r + 1);
            for (std::size_t b = 0; b < 5; ++b) s.band_power[b] = to_double(c[1 + b], r + 1);
            s.attention = to_double(c[6], r + 1);
            s.meditation = to_double(c[7], r + 1);
            s.blink_strength = to_opt_double(c[8], r + 1);
            out.push_back(s);
        }
        return out;
    }
    case StreamKind::smartwatch: {
        std::vector<WearableSample> out;
        out.reserve(rows.size());
        for (std::size_t r = 0; r < rows.size(); ++r) {
            const auto& c = rows[r];
            WearableSample s;
            s.raw_ts = to_raw(c[0], r + 1);
            s.heart_rate_bpm = to_opt_double(c[1], r + 1);
            s.accel = vec_at(c, 2, r + 1);
            s.gyro = vec_at(c, 5, r + 1);
            s.mag = vec_at(c, 8, r + 1);
            out.push_back(s);
        }
        return out;
    }
    case StreamKind::head_pose: {
        std::vector<HeadPoseSample> out;
        out.reserve(rows.size());
        for (std::size_t r = 0; r < rows.size(); ++r) {
            const auto& c = rows[r];
            out.push_back({to_raw(c[0], r + 1), to_double(c[1], r + 1), to_double(c[2], r + 1),
                           to_double(c[3], r + 1)});
        }
        return out;
    }
    case StreamKind::face_biometrics: {
        std::vector<FaceSample> out;
        out.reserve(rows.size());
        for (std::size_t r = 0; r < rows.size(); ++r) {
            const auto& c = rows[r];
            if (c[3] != "0" && c[3] != "1") throw SchemaError("row " + std::to_string(r + 1) + ": face_present must be 0 or 1");
            out.push_back({to_raw(c[0], r + 1), to_double(c[1], r + 1), to_double(c[2], r + 1), c[3] == "1"});
        }
        return out;
    }
    default: break;
    }
    throw SchemaError("stream kind " + std::string(to_string(kind)) + " has no CSV form");
}

std::string series_to_ndjson(const SampleSeries& series)
{
    std::string out;
    for (const auto& item : series_to_json(series)) {
        out += item.dump();
        out += '\n';
    }
    return out;
}

SampleSeries series_from_ndjson(StreamKind kind, std::string_view text)
{
    Json items = Json::array();
    std::size_t pos = 0;
    std::size_t line_no = 0;
    while (pos < text.size()) {
        auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos) throw SchemaError("NDJSON file does not end with a newline");
        ++line_no;
        try {
            items.push_back(Json::parse(text.substr(pos, nl - pos)));
        } catch (const Json::parse_error& e) {
            throw SchemaError("line " + std::to_string(line_no) + ": " + e.what());
        }
        pos = nl + 1;
    }
    return series_from_json(sample_type_name(empty_series_for(kind)), items);
}

}  // namespace deskmon::store::detail
