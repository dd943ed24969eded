#include "deskmon/ingest/gateway.hpp"
#include "deskmon/session/json.hpp"
#include "deskmon/session/validate.hpp"
#include "deskmon/sync/sync.hpp"

#include "support/fixtures.hpp"

#include <doctest.h>

#include <chrono>
#include <random>
#include <thread>

using namespace deskmon;
using namespace deskmon::ingest;

namespace {

SessionManifest base_manifest()
{
    SessionManifest m;
    m.session_id = "live";
    m.demographics.age = 30;
    return m;
}

std::vector<EEGSample> eeg_run(std::int64_t first_raw, int n)
{
    std::vector<EEGSample> out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        out[static_cast<std::size_t>(i)].raw_ts = RawTime{first_raw + i * 1'000'000LL};
        out[static_cast<std::size_t>(i)].attention = 50 + i % 10;
        out[static_cast<std::size_t>(i)].meditation = 40;
    }
    return out;
}

const StreamDescriptor kEeg{"eeg", StreamKind::eeg_band, 1.0};

/// Session with one registered, clocked EEG stream (identity clock).
struct Registered {
    IngestSession session{base_manifest()};
    Registered()
    {
        REQUIRE_FALSE(session.register_stream(kEeg, 1));
        session.set_clock("eeg", ClockEstimate{0, 0, 1}, RawTime{0});
    }
};

std::string code_of(const Message& m)
{
    if (const auto* e = std::get_if<Err>(&m)) return e->code;
    return "";
}

bool is_ack(const Message& m, std::uint64_t seq)
{
    const auto* a = std::get_if<Ack>(&m);
    return a && a->batch_seq == seq;
}

std::function<RawTime()> shifted_client_clock(std::int64_t shift)
{
    return [shift] {
        return RawTime{std::chrono::duration_cast<std::chrono::microseconds>(
                           std::chrono::steady_clock::now().time_since_epoch())
                           .count() +
                       shift};
    };
}

}  // namespace

TEST_SUITE("ingest-session")
{
    TEST_CASE("in-order batches are appended")
    {
        Registered r;
        for (std::uint64_t seq = 1; seq <= 3; ++seq) {
            CHECK(is_ack(r.session.ingest_batch({"eeg", seq, eeg_run(static_cast<std::int64_t>(seq) * 10'000'000, 5)}), seq));
        }
        CHECK(r.session.sample_count("eeg") == 15);
        CHECK(r.session.last_seq("eeg") == 3);
    }

    TEST_CASE("a resent batch is acked without re-appending")
    {
        Registered r;
        r.session.ingest_batch({"eeg", 1, eeg_run(0, 5)});
        r.session.ingest_batch({"eeg", 2, eeg_run(10'000'000, 5)});
        const auto before = manifest_to_json(r.session.snapshot(), true).dump();
        CHECK(is_ack(r.session.ingest_batch({"eeg", 2, eeg_run(10'000'000, 5)}), 2));
        CHECK(manifest_to_json(r.session.snapshot(), true).dump() == before);
    }

    TEST_CASE("a sequence gap is rejected")
    {
        Registered r;
        for (std::uint64_t seq = 1; seq <= 3; ++seq) r.session.ingest_batch({"eeg", seq, eeg_run(static_cast<std::int64_t>(seq) * 10'000'000, 1)});
        const auto before = manifest_to_json(r.session.snapshot(), true).dump();
        CHECK(code_of(r.session.ingest_batch({"eeg", 5, eeg_run(90'000'000, 1)})) == err::seq_gap);
        CHECK(manifest_to_json(r.session.snapshot(), true).dump() == before);
    }

    TEST_CASE("rejections leave the session byte-identical")
    {
        Registered r;
        r.session.ingest_batch({"eeg", 1, eeg_run(0, 5)});
        const auto before = manifest_to_json(r.session.snapshot(), true).dump();
        auto bad = eeg_run(10'000'000, 5);
        bad[3].attention = 150;
        CHECK(code_of(r.session.ingest_batch({"eeg", 2, bad})) == err::invalid_sample);
        CHECK(code_of(r.session.ingest_batch({"eeg", 2, eeg_run(1'000'000, 5)})) == err::invalid_sample);
        CHECK(code_of(r.session.ingest_batch({"eeg", 2, std::vector<KeyEvent>{{RawTime{20'000'000}, "a", KeyAction::press}}})) ==
              err::invalid_sample);
        CHECK(code_of(r.session.ingest_batch({"eeg", 2, eeg_run(20'000'000, 4097)})) == err::batch_too_large);
        CHECK(code_of(r.session.ingest_batch({"eeg", 0, eeg_run(20'000'000, 1)})) == err::bad_request);
        CHECK(manifest_to_json(r.session.snapshot(), true).dump() == before);
        CHECK(is_ack(r.session.ingest_batch({"eeg", 2, eeg_run(20'000'000, 4096)}), 2));
    }

    TEST_CASE("unknown stream and missing clock")
    {
        IngestSession s(base_manifest());
        CHECK(code_of(s.ingest_batch({"eeg", 1, eeg_run(0, 1)})) == err::unknown_stream);
        REQUIRE_FALSE(s.register_stream(kEeg, 1));
        CHECK(code_of(s.ingest_batch({"eeg", 1, eeg_run(0, 1)})) == err::no_clock);
    }

    TEST_CASE("ownership")
    {
        IngestSession s(base_manifest());
        CHECK_FALSE(s.register_stream(kEeg, 1));
        CHECK(s.register_stream(kEeg, 2)->code == err::stream_owned);
        s.release_owner(1);
        CHECK_FALSE(s.register_stream(kEeg, 2));
        StreamDescriptor other = kEeg;
        other.kind = StreamKind::smartwatch;
        s.release_owner(2);
        CHECK(s.register_stream(other, 3)->code == err::bad_request);
        StreamDescriptor media{"cam", StreamKind::front_camera, 30.0, PayloadKind::external_file, 0, 0.0, 0, "a.mp4"};
        CHECK(s.register_stream(media, 3)->code == err::bad_request);
    }

    TEST_CASE("samples mapping before the epoch are rejected")
    {
        IngestSession s(base_manifest());
        REQUIRE_FALSE(s.register_stream(kEeg, 1));
        s.set_clock("eeg", ClockEstimate{-5'000'000, 0, 1}, RawTime{0});
        CHECK(code_of(s.ingest_batch({"eeg", 1, eeg_run(1'000'000, 6)})) == err::invalid_sample);
        CHECK(s.sample_count("eeg") == 0);
        CHECK(is_ack(s.ingest_batch({"eeg", 1, eeg_run(6'000'000, 2)}), 1));
    }

    TEST_CASE("concurrent appends keep the acked order per stream")
    {
        IngestSession s(base_manifest());
        const int streams = 4, batches = 50;
        std::vector<std::thread> threads;
        for (int k = 0; k < streams; ++k) {
            const std::string id = "eeg" + std::to_string(k);
            REQUIRE_FALSE(s.register_stream({id, StreamKind::eeg_band, 1.0}, 10 + k));
            s.set_clock(id, ClockEstimate{0, 0, 1}, RawTime{0});
        }
        std::vector<std::vector<EEGSample>> acked(streams);
        for (int k = 0; k < streams; ++k) {
            threads.emplace_back([&, k] {
                std::mt19937_64 g(static_cast<std::uint64_t>(k));
                const std::string id = "eeg" + std::to_string(k);
                for (int b = 1; b <= batches; ++b) {
                    const auto run = eeg_run(static_cast<std::int64_t>(b) * 100'000'000, 1 + static_cast<int>(g() % 20));
                    if (is_ack(s.ingest_batch({id, static_cast<std::uint64_t>(b), run}), static_cast<std::uint64_t>(b))) {
                        acked[static_cast<std::size_t>(k)].insert(acked[static_cast<std::size_t>(k)].end(), run.begin(), run.end());
                    }
                    // Duplicates now and then.
                    if (g() % 4 == 0) s.ingest_batch({id, static_cast<std::uint64_t>(b), run});
                    if (g() % 8 == 0) (void)s.snapshot();
                }
            });
        }
        for (auto& t : threads) t.join();
        const auto snap = s.snapshot();
        REQUIRE(snap.streams.size() == streams);
        for (int k = 0; k < streams; ++k) {
            CHECK(std::get<std::vector<EEGSample>>(snap.streams[static_cast<std::size_t>(k)].samples) == acked[static_cast<std::size_t>(k)]);
        }
    }
}

TEST_SUITE("connection-handler")
{
    struct FakeClock {
        std::int64_t now = 1'000'000;
        ConnectionHandler::ServerClock fn()
        {
            return [this] { return SessionTime{now += 10}; };
        }
    };

    TEST_CASE("hello, clock exchange, batch and task event")
    {
        IngestSession session(base_manifest());
        FakeClock clock;
        ConnectionHandler h(session, clock.fn());
        CHECK(h.handle(Hello{kEeg}) == std::optional<Message>(Ack{0}));

        // Client clock is session + 7 s.
        const auto reply = h.handle(ClockProbe{RawTime{7'000'000 + 1'000'000}});
        const auto* r = std::get_if<ClockReply>(&*reply);
        REQUIRE(r);
        CHECK_FALSE(h.handle(ClockDone{r->t0, RawTime{r->t2.micros + 7'000'000 + 5}}).has_value());
        REQUIRE(h.clock_estimate());
        CHECK(std::llabs(h.clock_estimate()->offset_micros + 7'000'000) <= 10);

        CHECK(h.handle(SampleBatch{"eeg", 1, eeg_run(8'000'000, 3)}) == std::optional<Message>(Ack{1}));
        CHECK(h.handle(TaskEvent{"enroll", TaskGroup::enrollment, RawTime{9'000'000}, RawTime{19'000'000}, 1.0, "maria"}) ==
              std::optional<Message>(Ack{0}));
        const auto snap = session.snapshot();
        REQUIRE(snap.tasks.size() == 1);
        CHECK(std::llabs(snap.tasks[0].start.micros - 2'000'000) <= 10);
        CHECK(snap.tasks[0].duration_s == doctest::Approx(10.0));
    }

    TEST_CASE("protocol errors")
    {
        IngestSession session(base_manifest());
        FakeClock clock;
        ConnectionHandler a(session, clock.fn());
        ConnectionHandler b(session, clock.fn());
        CHECK(code_of(*a.handle(Hello{kEeg, "2"})) == err::bad_version);
        CHECK(a.handle(Hello{kEeg}) == std::optional<Message>(Ack{0}));
        CHECK(code_of(*b.handle(Hello{kEeg})) == err::stream_owned);
        CHECK(code_of(*b.handle(SampleBatch{"eeg", 1, eeg_run(0, 1)})) == err::unknown_stream);
        CHECK(code_of(*a.handle(SampleBatch{"eeg", 1, eeg_run(0, 1)})) == err::no_clock);
        CHECK(code_of(*a.handle(TaskEvent{"t", TaskGroup::writing, RawTime{1}})) == err::no_clock);
        CHECK(code_of(*a.handle(Ack{1})) == err::bad_request);
        CHECK(code_of(*a.handle(ClockDone{RawTime{5}, RawTime{6}})) == err::bad_request);
    }

    TEST_CASE("a closed connection releases its streams")
    {
        IngestSession session(base_manifest());
        FakeClock clock;
        {
            ConnectionHandler a(session, clock.fn());
            a.handle(Hello{kEeg});
        }
        ConnectionHandler b(session, clock.fn());
        CHECK(b.handle(Hello{kEeg}) == std::optional<Message>(Ack{0}));
    }

    TEST_CASE("bye releases one stream")
    {
        IngestSession session(base_manifest());
        FakeClock clock;
        ConnectionHandler a(session, clock.fn());
        ConnectionHandler b(session, clock.fn());
        a.handle(Hello{kEeg});
        CHECK(a.handle(Bye{"eeg"}) == std::optional<Message>(Ack{0}));
        CHECK(b.handle(Hello{kEeg}) == std::optional<Message>(Ack{0}));
    }
}

TEST_SUITE("gateway")
{
    GatewayConfig local()
    {
        GatewayConfig c;
        c.tcp_port = 0;
        c.ws_port = 0;
        return c;
    }

    void stream_through(GatewayConnection& client, const StreamDescriptor& d, std::int64_t shift, int batches)
    {
        REQUIRE(client.request(Hello{d}) == Message{Ack{0}});
        const auto clock = shifted_client_clock(shift);
        const auto est = client.sync_clock(clock);
        CHECK(est.n_probes >= 1);
        for (int b = 1; b <= batches; ++b) {
            const auto reply = client.request(SampleBatch{d.stream_id, static_cast<std::uint64_t>(b), eeg_run(clock().micros + b * 2'000'000, 2)});
            CHECK(reply == Message{Ack{static_cast<std::uint64_t>(b)}});
            std::this_thread::sleep_for(std::chrono::milliseconds(1));
        }
    }

    TEST_CASE("tcp and websocket clients feed one session")
    {
        IngestSession session(base_manifest());
        GatewayServer server(session, local());
        server.start();
        REQUIRE(server.ws_port());
        {
            TcpGatewayClient tcp("127.0.0.1", server.tcp_port());
            WsGatewayClient ws("127.0.0.1", *server.ws_port());
            stream_through(tcp, {"eeg_a", StreamKind::eeg_band, 1.0}, 3'000'000'000, 3);
            stream_through(ws, {"eeg_b", StreamKind::eeg_band, 1.0}, -1'000'000, 3);
        }
        server.stop();
        CHECK(session.sample_count("eeg_a") == 6);
        CHECK(session.sample_count("eeg_b") == 6);
        CHECK(server.connections_accepted() == 2);
        // Mapped times land near the session clock regardless of the client offset.
        const auto synced = sync::synchronize(session.snapshot());
        for (const auto& s : synced.manifest.streams) {
            for (const auto& e : std::get<std::vector<EEGSample>>(s.samples)) CHECK(e.raw_ts.micros < 60'000'000);
        }
    }

    TEST_CASE("malformed frames get errors and the connection survives")
    {
        IngestSession session(base_manifest());
        GatewayServer server(session, local());
        server.start();
        TcpGatewayClient tcp("127.0.0.1", server.tcp_port());
        const std::string junk = "{oops";
        std::string frame(4, '\0');
        frame[3] = static_cast<char>(junk.size());
        tcp.send_bytes(frame + junk);
        const auto r1 = tcp.receive();
        CHECK(code_of(r1) == "frame_malformed");
        const std::string nope = R"({"type":"nope"})";
        frame[3] = static_cast<char>(nope.size());
        tcp.send_bytes(frame + nope);
        CHECK(code_of(tcp.receive()) == "frame_unknown_type");
        CHECK(tcp.request(Hello{kEeg}) == Message{Ack{0}});
        server.stop();
    }

    TEST_CASE("oversized frames close the connection")
    {
        IngestSession session(base_manifest());
        auto cfg = local();
        cfg.max_frame_bytes = 256;
        GatewayServer server(session, cfg);
        server.start();
        TcpGatewayClient tcp("127.0.0.1", server.tcp_port());
        tcp.send_bytes(std::string("\x00\x10\x00\x00", 4));
        CHECK(code_of(tcp.receive()) == "frame_too_large");
        CHECK_THROWS(tcp.receive());
        server.stop();
    }

    TEST_CASE("websocket malformed body")
    {
        IngestSession session(base_manifest());
        GatewayServer server(session, local());
        server.start();
        WsGatewayClient ws("127.0.0.1", *server.ws_port());
        CHECK(code_of(ws.request(ClockReply{})) == err::bad_request);
        server.stop();
    }

    TEST_CASE("stop with idle clients connected")
    {
        IngestSession session(base_manifest());
        GatewayServer server(session, local());
        server.start();
        TcpGatewayClient a("127.0.0.1", server.tcp_port());
        WsGatewayClient b("127.0.0.1", *server.ws_port());
        std::this_thread::sleep_for(std::chrono::milliseconds(20));
        server.stop();
        CHECK_THROWS(a.receive());
    }
}

TEST_SUITE("task-ui interface")
{
    // The browser UI speaks the WebSocket transport: keyboard and mouse
    // streams, the enrollment context and one TaskEvent per task.
    TEST_CASE("a scripted UI session over websocket")
    {
        IngestSession session(base_manifest());
        GatewayConfig cfg;
        cfg.ws_port = 0;
        GatewayServer server(session, cfg);
        server.start();
        {
            WsGatewayClient ui("127.0.0.1", *server.ws_port());
            REQUIRE(ui.request(Hello{{"kbd", StreamKind::keyboard, 12.0}}) == Message{Ack{0}});
            REQUIRE(ui.request(Hello{{"mouse", StreamKind::mouse, 895.0}}) == Message{Ack{0}});
            // performance.now()-style clock: milliseconds since page load, in microseconds.
            const auto clock = shifted_client_clock(-1'000);
            ui.sync_clock(clock);

            const auto start = clock();
            std::vector<KeyEvent> keys;
            std::int64_t t = start.micros;
            for (char c : std::string("maria")) {
                keys.push_back({RawTime{t}, std::string(1, c), KeyAction::press});
                keys.push_back({RawTime{t + 80'000}, std::string(1, c), KeyAction::release});
                t += 150'000;
            }
            CHECK(ui.request(SampleBatch{"kbd", 1, keys}) == Message{Ack{1}});
            const std::vector<MouseEvent> mouse{{RawTime{t}, MouseKind::move, 10, 10},
                                                {RawTime{t + 1200}, MouseKind::move, 12, 11},
                                                {RawTime{t + 5000}, MouseKind::press, 12, 11, MouseButton::left},
                                                {RawTime{t + 90'000}, MouseKind::release, 12, 11, MouseButton::left}};
            CHECK(ui.request(SampleBatch{"mouse", 1, mouse}) == Message{Ack{1}});

            ContextSnapshot ctx = fixture::small_session().context;
            CHECK(ui.request(ContextMessage{ctx}) == Message{Ack{0}});
            CHECK(ui.request(TaskEvent{"enroll", TaskGroup::enrollment, start, RawTime{t + 100'000}, 1.0, "maria"}) ==
                  Message{Ack{0}});
            CHECK(ui.request(TaskEvent{"mc1", TaskGroup::multiple_choice, RawTime{t + 200'000}, std::nullopt, std::nullopt,
                                       std::nullopt}) == Message{Ack{0}});
            CHECK(ui.request(TaskEvent{"mc1", std::nullopt, std::nullopt, RawTime{t + 900'000}, 0.0, "B"}) == Message{Ack{0}});
            CHECK(ui.request(Bye{"kbd"}) == Message{Ack{0}});
        }
        server.stop();

        const auto snap = session.snapshot();
        REQUIRE(snap.streams.size() == 2);
        CHECK(series_size(snap.streams[0].samples) == 10);
        CHECK(series_size(snap.streams[1].samples) == 4);
        REQUIRE(snap.tasks.size() == 2);
        CHECK(snap.tasks[0].task_id == "enroll");
        CHECK(snap.tasks[1].task_id == "mc1");
        CHECK(snap.tasks[1].duration_s == doctest::Approx(0.7).epsilon(1e-6));
        bool answered = false;
        for (const auto& a : snap.context.answers) answered |= a.task_id == "mc1" && a.text == "B";
        CHECK(answered);
        CHECK(snap.context.mac == "02:00:00:00:00:01");
    }
}
