#pragma once

// Gateway wire protocol. Every message is a JSON object with a "type" field.
// Raw TCP wraps each body in a 4-byte big-endian length prefix; WebSocket
// carries the same bodies as text frames.

#include "deskmon/session/json.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>

namespace deskmon::ingest {

inline constexpr std::string_view kProtocolVersion = "1";
inline constexpr std::size_t kDefaultMaxFrameBytes = 1 << 20;
inline constexpr std::size_t kMaxBatchSamples = 4096;

struct Hello {
    StreamDescriptor descriptor;
    std::string protocol_version{kProtocolVersion};

    bool operator==(const Hello&) const = default;
};

struct ClockProbe {
    RawTime t0;

    bool operator==(const ClockProbe&) const = default;
};

struct ClockReply {
    RawTime t0;
    SessionTime t1;
    SessionTime t2;

    bool operator==(const ClockReply&) const = default;
};

/// Completes the probe started with t0; the server pairs it with its own t1, t2.
struct ClockDone {
    RawTime t0;
    RawTime t3;

    bool operator==(const ClockDone&) const = default;
};

struct SampleBatch {
    std::string stream_id;
    std::uint64_t batch_seq = 0;
    SampleSeries samples;

    bool operator==(const SampleBatch&) const = default;
};

struct ContextMessage {
    ContextSnapshot context;

    bool operator==(const ContextMessage&) const = default;
};

/// Fragment of a task record. Times are in the sender's raw clock and are
/// mapped with the connection's clock estimate. Fragments merge by task_id.
struct TaskEvent {
    std::string task_id;
    std::optional<TaskGroup> group;
    std::optional<RawTime> start_raw;
    std::optional<RawTime> end_raw;
    std::optional<double> accuracy;
    std::optional<std::string> answer;

    bool operator==(const TaskEvent&) const = default;
};

struct Bye {
    std::string stream_id;

    bool operator==(const Bye&) const = default;
};

struct Ack {
    std::uint64_t batch_seq = 0;

    bool operator==(const Ack&) const = default;
};

namespace err {
inline constexpr std::string_view unknown_stream = "unknown_stream";
inline constexpr std::string_view seq_gap = "seq_gap";
inline constexpr std::string_view invalid_sample = "invalid_sample";
inline constexpr std::string_view no_clock = "no_clock";
inline constexpr std::string_view stream_owned = "stream_owned";
inline constexpr std::string_view bad_version = "bad_version";
inline constexpr std::string_view bad_request = "bad_request";
inline constexpr std::string_view batch_too_large = "batch_too_large";
}  // namespace err

struct Err {
    std::string code;
    std::string detail;

    bool operator==(const Err&) const = default;
};

using Message = std::variant<Hello, ClockProbe, ClockReply, ClockDone, SampleBatch, ContextMessage, TaskEvent, Bye, Ack, Err>;

/// "hello", "clock_probe", "clock_reply", "clock_done", "sample_batch",
/// "context", "task_event", "bye", "ack", "err".
std::string_view message_type(const Message& m);

enum class FrameErrorCode { truncated, too_large, unknown_type, malformed };

std::string_view to_string(FrameErrorCode code);

class FrameError : public std::runtime_error {
public:
    FrameError(FrameErrorCode code, const std::string& detail);
    FrameErrorCode code() const { return code_; }

private:
    FrameErrorCode code_;
};

Json message_to_json(const Message& m);
/// Throws FrameError (unknown_type or malformed).
Message message_from_json(const Json& j);

/// JSON text of the message (WebSocket text frame payload).
std::string encode_body(const Message& m);
Message decode_body(std::string_view body);

/// 4-byte big-endian length followed by the body.
std::string encode_frame(const Message& m);
/// Decodes exactly one frame occupying all of `bytes`.
Message decode_frame(std::span<const std::byte> bytes, std::size_t max_frame_bytes = kDefaultMaxFrameBytes);
Message decode_frame(std::string_view bytes, std::size_t max_frame_bytes = kDefaultMaxFrameBytes);

/// Incremental splitter for a TCP byte stream.
class FrameReader {
public:
    explicit FrameReader(std::size_t max_frame_bytes = kDefaultMaxFrameBytes) : max_(max_frame_bytes) {}

    void feed(std::string_view bytes) { buffer_.append(bytes); }
    /// Next complete message, or nullopt when more bytes are needed.
    /// Throws FrameError for oversized or undecodable frames.
    std::optional<Message> next();
    std::size_t buffered() const { return buffer_.size(); }

private:
    std::size_t max_;
    std::string buffer_;
};

}  // namespace deskmon::ingest
