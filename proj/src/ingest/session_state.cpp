#include "deskmon/ingest/session_state.hpp"

#include "deskmon/session/validate.hpp"
#include "deskmon/sync/timeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>

namespace deskmon::ingest {
namespace {

Err make_err(std::string_view code, std::string detail)
{
    return Err{std::string(code), std::move(detail)};
}

template <class Sample>
std::optional<RawTime> first_raw(const std::vector<Sample>& v)
{
    return v.empty() ? std::nullopt : std::optional<RawTime>(v.front().raw_ts);
}

std::optional<RawTime> series_first(const SampleSeries& s)
{
    return std::visit(
        [](const auto& v) -> std::optional<RawTime> {
            if constexpr (std::is_same_v<std::decay_t<decltype(v)>, std::monostate>) {
                return std::nullopt;
            } else {
                return first_raw(v);
            }
        },
        s);
}

std::optional<RawTime> series_last(const SampleSeries& s)
{
    return std::visit(
        [](const auto& v) -> std::optional<RawTime> {
            if constexpr (std::is_same_v<std::decay_t<decltype(v)>, std::monostate>) {
                return std::nullopt;
            } else {
                return v.empty() ? std::nullopt : std::optional<RawTime>(v.back().raw_ts);
            }
        },
        s);
}

/// Index of the first sample whose raw_ts decreases, or nullopt.
std::optional<std::size_t> first_disorder(const SampleSeries& s)
{
    return std::visit(
        [](const auto& v) -> std::optional<std::size_t> {
            if constexpr (!std::is_same_v<std::decay_t<decltype(v)>, std::monostate>) {
                for (std::size_t i = 1; i < v.size(); ++i) {
                    if (v[i].raw_ts < v[i - 1].raw_ts) return i;
                }
            }
            return std::nullopt;
        },
        s);
}

void append(SampleSeries& into, const SampleSeries& from)
{
    std::visit(
        [&](auto& dst) {
            using V = std::decay_t<decltype(dst)>;
            if constexpr (!std::is_same_v<V, std::monostate>) {
                const auto& src = std::get<V>(from);
                dst.insert(dst.end(), src.begin(), src.end());
            }
        },
        into);
}

std::atomic<std::uint64_t> g_next_connection{1};

}  // namespace

IngestSession::IngestSession(SessionManifest base) : base_(std::move(base))
{
    base_.streams.clear();
    base_.tasks.clear();
}

IngestSession::StreamState* IngestSession::find(const std::string& stream_id) const
{
    std::shared_lock lock(streams_mu_);
    auto it = streams_.find(stream_id);
    return it == streams_.end() ? nullptr : it->second.get();
}

std::optional<Err> IngestSession::register_stream(const StreamDescriptor& descriptor, std::uint64_t owner)
{
    if (!is_valid_stream_id(descriptor.stream_id)) {
        return make_err(err::bad_request, "invalid stream_id '" + descriptor.stream_id + "'");
    }
    if (is_external_kind(descriptor.kind)) {
        return make_err(err::bad_request, "media streams are not ingested over the gateway");
    }
    std::unique_lock lock(streams_mu_);
    auto it = streams_.find(descriptor.stream_id);
    if (it == streams_.end()) {
        auto st = std::make_unique<StreamState>();
        st->descriptor = descriptor;
        st->descriptor.payload = PayloadKind::inline_samples;
        st->descriptor.media_file.reset();
        st->descriptor.clock_offset_micros = 0;
        st->descriptor.clock_reference_raw_micros = 0;
        st->samples = empty_series_for(descriptor.kind);
        st->owner = owner;
        streams_.emplace(descriptor.stream_id, std::move(st));
        order_.push_back(descriptor.stream_id);
        return std::nullopt;
    }
    auto& st = *it->second;
    std::lock_guard slock(st.mu);
    if (st.owner && *st.owner != owner) {
        return make_err(err::stream_owned, "stream '" + descriptor.stream_id + "' is owned by another connection");
    }
    if (st.descriptor.kind != descriptor.kind) {
        return make_err(err::bad_request, "stream '" + descriptor.stream_id + "' was registered with another kind");
    }
    st.owner = owner;
    return std::nullopt;
}

void IngestSession::release_owner(std::uint64_t owner)
{
    std::shared_lock lock(streams_mu_);
    for (auto& [id, st] : streams_) {
        std::lock_guard slock(st->mu);
        if (st->owner == owner) st->owner.reset();
    }
}

void IngestSession::release_stream(const std::string& stream_id, std::uint64_t owner)
{
    if (auto* st = find(stream_id)) {
        std::lock_guard lock(st->mu);
        if (st->owner == owner) st->owner.reset();
    }
}

void IngestSession::set_clock(const std::string& stream_id, const ClockEstimate& estimate, RawTime reference_raw)
{
    if (auto* st = find(stream_id)) {
        std::lock_guard lock(st->mu);
        st->descriptor.clock_offset_micros = estimate.offset_micros;
        st->descriptor.clock_reference_raw_micros = reference_raw.micros;
        st->has_clock = true;
    }
}

Message IngestSession::ingest_batch(const SampleBatch& batch)
{
    auto* st = find(batch.stream_id);
    if (!st) return make_err(err::unknown_stream, "stream '" + batch.stream_id + "' has not sent hello");
    std::lock_guard lock(st->mu);
    if (!st->has_clock) return make_err(err::no_clock, "no clock estimate for '" + batch.stream_id + "'");
    if (batch.batch_seq == 0) return make_err(err::bad_request, "batch_seq starts at 1");
    if (batch.batch_seq <= st->last_seq) return Ack{batch.batch_seq};
    if (batch.batch_seq > st->last_seq + 1) {
        return make_err(err::seq_gap, "expected batch_seq " + std::to_string(st->last_seq + 1) + ", got " +
                                          std::to_string(batch.batch_seq));
    }
    const auto n = series_size(batch.samples);
    if (n > kMaxBatchSamples) {
        return make_err(err::batch_too_large, std::to_string(n) + " samples exceed " + std::to_string(kMaxBatchSamples));
    }
    if (n > 0) {
        if (batch.samples.index() != st->samples.index()) {
            return make_err(err::invalid_sample, std::string("sample type ") + std::string(sample_type_name(batch.samples)) +
                                                     " does not match stream kind " +
                                                     std::string(to_string(st->descriptor.kind)));
        }
        if (auto i = first_disorder(batch.samples)) {
            return make_err(err::invalid_sample, "raw_ts decreases at sample " + std::to_string(*i));
        }
        if (st->last_raw && *series_first(batch.samples) < *st->last_raw) {
            return make_err(err::invalid_sample, "batch starts before the last appended sample");
        }
        SampleCheckOptions opts;
        opts.check_pairing = false;
        {
            std::lock_guard meta(meta_mu_);
            if (context_) opts.screen = context_->screen_resolution;
        }
        const auto report = validate_series(st->descriptor, batch.samples, opts);
        if (!report.ok()) return make_err(err::invalid_sample, report.violations.front().where + ": " + report.violations.front().message);
        append(st->samples, batch.samples);
        st->last_raw = series_last(batch.samples);
    }
    st->last_seq = batch.batch_seq;
    return Ack{batch.batch_seq};
}

void IngestSession::set_context(const ContextSnapshot& context)
{
    std::lock_guard lock(meta_mu_);
    context_ = context;
}

void IngestSession::apply_task(const std::string& task_id, std::optional<TaskGroup> group,
                               std::optional<SessionTime> start, std::optional<SessionTime> end,
                               std::optional<double> accuracy, std::optional<std::string> answer)
{
    std::lock_guard lock(meta_mu_);
    auto [it, fresh] = tasks_.try_emplace(task_id);
    if (fresh) task_order_.push_back(task_id);
    auto& f = it->second;
    if (group) f.group = group;
    if (start) f.start = start;
    if (end) f.end = end;
    if (accuracy) f.accuracy = accuracy;
    if (answer) f.answer = std::move(answer);
}

SessionManifest IngestSession::snapshot() const
{
    SessionManifest m = base_;
    {
        std::shared_lock lock(streams_mu_);
        for (const auto& id : order_) {
            const auto& st = *streams_.at(id);
            std::lock_guard slock(st.mu);
            m.streams.push_back({st.descriptor, st.samples});
        }
    }
    std::lock_guard lock(meta_mu_);
    if (context_) m.context = *context_;
    for (const auto& id : task_order_) {
        const auto& f = tasks_.at(id);
        if (f.answer) {
            auto a = std::find_if(m.context.answers.begin(), m.context.answers.end(),
                                  [&](const TaskAnswer& x) { return x.task_id == id; });
            if (a == m.context.answers.end()) {
                m.context.answers.push_back({id, *f.answer});
            } else {
                a->text = *f.answer;
            }
        }
        if (!f.group || !f.start || !f.end) continue;
        m.tasks.push_back(make_task(id, *f.group, *f.start, *f.end, f.accuracy.value_or(0.0)));
    }
    return m;
}

std::vector<std::string> IngestSession::stream_ids() const
{
    std::shared_lock lock(streams_mu_);
    return order_;
}

std::uint64_t IngestSession::last_seq(const std::string& stream_id) const
{
    auto* st = find(stream_id);
    if (!st) return 0;
    std::lock_guard lock(st->mu);
    return st->last_seq;
}

std::size_t IngestSession::sample_count(const std::string& stream_id) const
{
    auto* st = find(stream_id);
    if (!st) return 0;
    std::lock_guard lock(st->mu);
    return series_size(st->samples);
}

ConnectionHandler::ConnectionHandler(IngestSession& session, ServerClock clock)
    : session_(session), clock_(std::move(clock)), id_(g_next_connection.fetch_add(1))
{
}

ConnectionHandler::~ConnectionHandler()
{
    session_.release_owner(id_);
}

std::optional<Message> ConnectionHandler::handle(const Message& message)
{
    if (const auto* hello = std::get_if<Hello>(&message)) {
        if (hello->protocol_version != kProtocolVersion) {
            return make_err(err::bad_version, "protocol_version must be \"1\", got \"" + hello->protocol_version + "\"");
        }
        if (auto e = session_.register_stream(hello->descriptor, id_)) return *e;
        owned_.push_back(hello->descriptor.stream_id);
        if (auto best = estimator_.best()) session_.set_clock(hello->descriptor.stream_id, *best, *estimator_.reference_raw());
        return Ack{0};
    }
    if (const auto* probe = std::get_if<ClockProbe>(&message)) {
        const SessionTime t1 = clock_();
        const SessionTime t2 = clock_();
        pending_probes_[probe->t0.micros] = {t1, t2};
        return ClockReply{probe->t0, t1, t2};
    }
    if (const auto* done = std::get_if<ClockDone>(&message)) {
        auto it = pending_probes_.find(done->t0.micros);
        if (it == pending_probes_.end()) return make_err(err::bad_request, "clock_done without matching probe");
        const auto [t1, t2] = it->second;
        pending_probes_.erase(it);
        if (!estimator_.add_probe(done->t0, t1, t2, done->t3)) return make_err(err::bad_request, "inconsistent clock probe");
        const auto best = *estimator_.best();
        for (const auto& id : owned_) session_.set_clock(id, best, *estimator_.reference_raw());
        return std::nullopt;
    }
    if (const auto* batch = std::get_if<SampleBatch>(&message)) {
        if (std::find(owned_.begin(), owned_.end(), batch->stream_id) == owned_.end()) {
            return make_err(err::unknown_stream, "stream '" + batch->stream_id + "' is not registered on this connection");
        }
        return session_.ingest_batch(*batch);
    }
    if (const auto* ctx = std::get_if<ContextMessage>(&message)) {
        session_.set_context(ctx->context);
        return Ack{0};
    }
    if (const auto* task = std::get_if<TaskEvent>(&message)) {
        std::optional<SessionTime> start, end;
        if (task->start_raw || task->end_raw) {
            const auto best = estimator_.best();
            if (!best) return make_err(err::no_clock, "task times need a clock estimate");
            const auto ref = *estimator_.reference_raw();
            if (task->start_raw) start = sync::to_session_time(*task->start_raw, *best, 0.0, ref).time;
            if (task->end_raw) end = sync::to_session_time(*task->end_raw, *best, 0.0, ref).time;
        }
        session_.apply_task(task->task_id, task->group, start, end, task->accuracy, task->answer);
        return Ack{0};
    }
    if (const auto* bye = std::get_if<Bye>(&message)) {
        session_.release_stream(bye->stream_id, id_);
        owned_.erase(std::remove(owned_.begin(), owned_.end(), bye->stream_id), owned_.end());
        return Ack{0};
    }
    return make_err(err::bad_request, std::string(message_type(message)) + " is a server-to-client message");
}

ConnectionHandler::ServerClock steady_session_clock()
{
    const auto epoch = std::chrono::steady_clock::now();
    return [epoch] {
        return SessionTime{
            std::chrono::duration_cast<std::chrono::microseconds>(std::chrono::steady_clock::now() - epoch).count()};
    };
}

}  // namespace deskmon::ingest
