#pragma once

#include "deskmon/ingest/clock.hpp"
#include "deskmon/ingest/protocol.hpp"

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <vector>

namespace deskmon::ingest {

/// In-progress session fed by gateway connections. Appends to different
/// streams run concurrently; appends to one stream are serialized.
class IngestSession {
public:
    /// `base` supplies session id, user and demographics for snapshots.
    explicit IngestSession(SessionManifest base);

    IngestSession(const IngestSession&) = delete;
    IngestSession& operator=(const IngestSession&) = delete;

    /// Registers (or re-claims after a disconnect) a stream for `owner`.
    /// Returns an Err when another owner holds it or the kind changed.
    std::optional<Err> register_stream(const StreamDescriptor& descriptor, std::uint64_t owner);
    /// Drops ownership of every stream held by `owner`; samples stay.
    void release_owner(std::uint64_t owner);
    void release_stream(const std::string& stream_id, std::uint64_t owner);

    void set_clock(const std::string& stream_id, const ClockEstimate& estimate, RawTime reference_raw);

    /// Ack for appended or duplicate batches, Err otherwise. A rejected
    /// batch leaves the stream untouched.
    Message ingest_batch(const SampleBatch& batch);

    void set_context(const ContextSnapshot& context);
    /// Merges a task fragment whose times are already on the session timeline.
    void apply_task(const std::string& task_id, std::optional<TaskGroup> group, std::optional<SessionTime> start,
                    std::optional<SessionTime> end, std::optional<double> accuracy, std::optional<std::string> answer);

    /// Consistent per-stream prefix of everything appended so far. Streams in
    /// registration order; tasks with start, end and group only.
    SessionManifest snapshot() const;

    std::vector<std::string> stream_ids() const;
    std::uint64_t last_seq(const std::string& stream_id) const;
    std::size_t sample_count(const std::string& stream_id) const;

private:
    struct StreamState {
        mutable std::mutex mu;
        StreamDescriptor descriptor;
        SampleSeries samples;
        std::uint64_t last_seq = 0;
        bool has_clock = false;
        std::optional<RawTime> last_raw;
        std::optional<std::uint64_t> owner;
    };
    struct TaskFragment {
        std::optional<TaskGroup> group;
        std::optional<SessionTime> start;
        std::optional<SessionTime> end;
        std::optional<double> accuracy;
        std::optional<std::string> answer;
    };

    StreamState* find(const std::string& stream_id) const;

    SessionManifest base_;
    mutable std::shared_mutex streams_mu_;
    std::map<std::string, std::unique_ptr<StreamState>> streams_;
    std::vector<std::string> order_;

    mutable std::mutex meta_mu_;
    std::optional<ContextSnapshot> context_;
    std::map<std::string, TaskFragment> tasks_;
    std::vector<std::string> task_order_;
};

/// Transport-independent message handling for one connection.
class ConnectionHandler {
public:
    using ServerClock = std::function<SessionTime()>;

    ConnectionHandler(IngestSession& session, ServerClock clock);
    ~ConnectionHandler();

    ConnectionHandler(const ConnectionHandler&) = delete;
    ConnectionHandler& operator=(const ConnectionHandler&) = delete;

    /// Reply for the message, if the protocol defines one.
    std::optional<Message> handle(const Message& message);

    std::optional<ClockEstimate> clock_estimate() const { return estimator_.best(); }
    std::uint64_t id() const { return id_; }

private:
    IngestSession& session_;
    ServerClock clock_;
    std::uint64_t id_;
    ClockEstimator estimator_;
    std::map<std::int64_t, std::pair<SessionTime, SessionTime>> pending_probes_;
    std::vector<std::string> owned_;
};

/// Session clock that starts at zero on construction.
ConnectionHandler::ServerClock steady_session_clock();

}  // namespace deskmon::ingest
