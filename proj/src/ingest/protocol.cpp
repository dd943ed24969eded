#include "deskmon/ingest/protocol.hpp"

#include <array>

namespace deskmon::ingest {
namespace {

template <class T>
std::optional<T> opt_field(const Json& j, const char* key)
{
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return std::nullopt;
    return it->get<T>();
}

template <class T>
Json opt_json(const std::optional<T>& v)
{
    return v ? Json(*v) : Json(nullptr);
}

struct ToJson {
    Json operator()(const Hello& m) const { return {{"descriptor", m.descriptor}, {"protocol_version", m.protocol_version}}; }
    Json operator()(const ClockProbe& m) const { return {{"t0", m.t0.micros}}; }
    Json operator()(const ClockReply& m) const { return {{"t0", m.t0.micros}, {"t1", m.t1.micros}, {"t2", m.t2.micros}}; }
    Json operator()(const ClockDone& m) const { return {{"t0", m.t0.micros}, {"t3", m.t3.micros}}; }
    Json operator()(const SampleBatch& m) const
    {
        return {{"stream_id", m.stream_id},
                {"batch_seq", m.batch_seq},
                {"sample_type", sample_type_name(m.samples)},
                {"samples", series_to_json(m.samples)}};
    }
    Json operator()(const ContextMessage& m) const { return {{"context", m.context}}; }
    Json operator()(const TaskEvent& m) const
    {
        Json j{{"task_id", m.task_id}};
        j["group"] = m.group ? Json(to_string(*m.group)) : Json(nullptr);
        j["start_raw"] = m.start_raw ? Json(m.start_raw->micros) : Json(nullptr);
        j["end_raw"] = m.end_raw ? Json(m.end_raw->micros) : Json(nullptr);
        j["accuracy"] = opt_json(m.accuracy);
        j["answer"] = opt_json(m.answer);
        return j;
    }
    Json operator()(const Bye& m) const { return {{"stream_id", m.stream_id}}; }
    Json operator()(const Ack& m) const { return {{"batch_seq", m.batch_seq}}; }
    Json operator()(const Err& m) const { return {{"code", m.code}, {"detail", m.detail}}; }
};

Message from_typed(std::string_view type, const Json& j)
{
    if (type == "hello") return Hello{j.at("descriptor").get<StreamDescriptor>(), j.at("protocol_version").get<std::string>()};
    if (type == "clock_probe") return ClockProbe{RawTime{j.at("t0").get<std::int64_t>()}};
    if (type == "clock_reply") {
        return ClockReply{RawTime{j.at("t0").get<std::int64_t>()}, SessionTime{j.at("t1").get<std::int64_t>()},
                          SessionTime{j.at("t2").get<std::int64_t>()}};
    }
    if (type == "clock_done") return ClockDone{RawTime{j.at("t0").get<std::int64_t>()}, RawTime{j.at("t3").get<std::int64_t>()}};
    if (type == "sample_batch") {
        SampleBatch b;
        b.stream_id = j.at("stream_id").get<std::string>();
        b.batch_seq = j.at("batch_seq").get<std::uint64_t>();
        b.samples = series_from_json(j.at("sample_type").get<std::string>(), j.at("samples"));
        return b;
    }
    if (type == "context") return ContextMessage{j.at("context").get<ContextSnapshot>()};
    if (type == "task_event") {
        TaskEvent t;
        t.task_id = j.at("task_id").get<std::string>();
        if (auto g = opt_field<std::string>(j, "group")) t.group = parse_enum<TaskGroup>(*g);
        if (auto s = opt_field<std::int64_t>(j, "start_raw")) t.start_raw = RawTime{*s};
        if (auto e = opt_field<std::int64_t>(j, "end_raw")) t.end_raw = RawTime{*e};
        t.accuracy = opt_field<double>(j, "accuracy");
        t.answer = opt_field<std::string>(j, "answer");
        return t;
    }
    if (type == "bye") return Bye{j.at("stream_id").get<std::string>()};
    if (type == "ack") return Ack{j.at("batch_seq").get<std::uint64_t>()};
    if (type == "err") return Err{j.at("code").get<std::string>(), j.value("detail", std::string{})};
    throw FrameError(FrameErrorCode::unknown_type, "unknown message type '" + std::string(type) + "'");
}

}  // namespace

std::string_view message_type(const Message& m)
{
    static constexpr std::array<std::string_view, std::variant_size_v<Message>> names{
        "hello", "clock_probe", "clock_reply", "clock_done", "sample_batch", "context", "task_event", "bye", "ack", "err"};
    return names[m.index()];
}

std::string_view to_string(FrameErrorCode code)
{
    switch (code) {
    case FrameErrorCode::truncated: return "truncated";
    case FrameErrorCode::too_large: return "too_large";
    case FrameErrorCode::unknown_type: return "unknown_type";
    case FrameErrorCode::malformed: return "malformed";
    }
    return "?";
}

FrameError::FrameError(FrameErrorCode code, const std::string& detail)
    : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code)
{
}

Json message_to_json(const Message& m)
{
    Json j = std::visit(ToJson{}, m);
    j["type"] = message_type(m);
    return j;
}

Message message_from_json(const Json& j)
{
    if (!j.is_object()) throw FrameError(FrameErrorCode::malformed, "message must be a JSON object");
    auto it = j.find("type");
    if (it == j.end() || !it->is_string()) throw FrameError(FrameErrorCode::malformed, "missing \"type\"");
    const auto type = it->get<std::string>();
    try {
        return from_typed(type, j);
    } catch (const FrameError&) {
        throw;
    } catch (const std::exception& e) {
        throw FrameError(FrameErrorCode::malformed, type + ": " + e.what());
    }
}

std::string encode_body(const Message& m)
{
    return message_to_json(m).dump();
}

Message decode_body(std::string_view body)
{
    Json j;
    try {
        j = Json::parse(body);
    } catch (const Json::parse_error& e) {
        throw FrameError(FrameErrorCode::malformed, e.what());
    }
    return message_from_json(j);
}

std::string encode_frame(const Message& m)
{
    const auto body = encode_body(m);
    const auto n = static_cast<std::uint32_t>(body.size());
    std::string out;
    out.reserve(4 + body.size());
    out += static_cast<char>((n >> 24) & 0xff);
    out += static_cast<char>((n >> 16) & 0xff);
    out += static_cast<char>((n >> 8) & 0xff);
    out += static_cast<char>(n & 0xff);
    out += body;
    return out;
}

namespace {

std::uint32_t read_length(std::string_view bytes)
{
    std::uint32_t n = 0;
    for (int i = 0; i < 4; ++i) n = (n << 8) | static_cast<unsigned char>(bytes[static_cast<std::size_t>(i)]);
    return n;
}

}  // namespace

Message decode_frame(std::string_view bytes, std::size_t max_frame_bytes)
{
    if (bytes.size() < 4) throw FrameError(FrameErrorCode::truncated, "frame shorter than its length prefix");
    const auto n = read_length(bytes);
    if (n > max_frame_bytes) {
        throw FrameError(FrameErrorCode::too_large,
                         "declared length " + std::to_string(n) + " exceeds " + std::to_string(max_frame_bytes));
    }
    if (bytes.size() - 4 < n) {
        throw FrameError(FrameErrorCode::truncated,
                         "declared length " + std::to_string(n) + ", got " + std::to_string(bytes.size() - 4) + " bytes");
    }
    if (bytes.size() - 4 > n) throw FrameError(FrameErrorCode::malformed, "trailing bytes after frame body");
    return decode_body(bytes.substr(4));
}

Message decode_frame(std::span<const std::byte> bytes, std::size_t max_frame_bytes)
{
    return decode_frame(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()), max_frame_bytes);
}

std::optional<Message> FrameReader::next()
{
    if (buffer_.size() < 4) return std::nullopt;
    const auto n = read_length(buffer_);
    if (n > max_) {
        throw FrameError(FrameErrorCode::too_large,
                         "declared length " + std::to_string(n) + " exceeds " + std::to_string(max_));
    }
    if (buffer_.size() - 4 < n) return std::nullopt;
    const std::string body = buffer_.substr(4, n);
    buffer_.erase(0, 4 + static_cast<std::size_t>(n));
    return decode_body(body);
}

}  // namespace deskmon::ingest
