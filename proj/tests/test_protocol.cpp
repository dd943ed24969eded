#include "deskmon/ingest/protocol.hpp"

#include "support/fixtures.hpp"

#include <doctest.h>

using namespace deskmon;
using namespace deskmon::ingest;

namespace {

std::vector<Message> sample_messages()
{
    const auto m = fixture::small_session();
    std::vector<Message> out;
    out.push_back(Hello{m.streams[0].descriptor});
    out.push_back(Hello{m.streams[6].descriptor, "1"});
    out.push_back(ClockProbe{RawTime{123}});
    out.push_back(ClockReply{RawTime{123}, SessionTime{150}, SessionTime{152}});
    out.push_back(ClockDone{RawTime{123}, RawTime{-5}});
    for (const auto& s : m.streams) {
        if (s.descriptor.payload == PayloadKind::inline_samples) out.push_back(SampleBatch{s.descriptor.stream_id, 7, s.samples});
    }
    out.push_back(SampleBatch{"ctx", 1, std::vector<ContextRecord>{{RawTime{5}, m.context}}});
    out.push_back(ContextMessage{m.context});
    out.push_back(TaskEvent{"write1", TaskGroup::writing, RawTime{10}, RawTime{20}, 0.5, "answer"});
    out.push_back(TaskEvent{"mc1", std::nullopt, std::nullopt, RawTime{99}, std::nullopt, std::nullopt});
    out.push_back(Bye{"kbd"});
    out.push_back(Ack{42});
    out.push_back(Err{std::string(err::seq_gap), "expected 3"});
    return out;
}

std::string prefix(std::uint32_t n)
{
    std::string p(4, '\0');
    p[0] = static_cast<char>(n >> 24);
    p[1] = static_cast<char>(n >> 16);
    p[2] = static_cast<char>(n >> 8);
    p[3] = static_cast<char>(n);
    return p;
}

FrameErrorCode decode_error(std::string_view bytes, std::size_t max = kDefaultMaxFrameBytes)
{
    try {
        decode_frame(bytes, max);
    } catch (const FrameError& e) {
        return e.code();
    }
    FAIL("no FrameError");
    return FrameErrorCode::malformed;
}

}  // namespace

TEST_SUITE("protocol")
{
    TEST_CASE("every message round-trips through frames and bodies")
    {
        for (const auto& m : sample_messages()) {
            INFO(message_type(m));
            CHECK(decode_frame(encode_frame(m)) == m);
            CHECK(decode_body(encode_body(m)) == m);
            CHECK(message_from_json(message_to_json(m)) == m);
        }
    }

    TEST_CASE("bye frame prefix equals the body length")
    {
        const auto frame = encode_frame(Bye{"s"});
        const auto body = encode_body(Bye{"s"});
        CHECK(frame.size() == body.size() + 4);
        CHECK(frame.substr(0, 4) == prefix(static_cast<std::uint32_t>(body.size())));
        CHECK(frame.substr(4) == body);
        CHECK(Json::parse(body).at("type") == "bye");
    }

    TEST_CASE("batch body keeps sample order")
    {
        const std::vector<KeyEvent> keys{{RawTime{1}, "a", KeyAction::press}, {RawTime{2}, "b", KeyAction::press},
                                          {RawTime{3}, "a", KeyAction::release}};
        const auto j = Json::parse(encode_body(SampleBatch{"kbd", 1, keys}));
        REQUIRE(j.at("samples").size() == 3);
        CHECK(j.at("samples")[1].at("key_code") == "b");
        CHECK(j.at("sample_type") == "key");
    }

    TEST_CASE("message type names")
    {
        const std::vector<std::string> names{"hello", "hello", "clock_probe", "clock_reply", "clock_done"};
        const auto ms = sample_messages();
        for (std::size_t i = 0; i < names.size(); ++i) CHECK(message_type(ms[i]) == names[i]);
        CHECK(message_type(Message{TaskEvent{"x"}}) == "task_event");
        CHECK(message_type(Message{ContextMessage{}}) == "context");
    }

    TEST_CASE("distinct decode errors")
    {
        CHECK(decode_error(prefix(10) + "12345") == FrameErrorCode::truncated);
        CHECK(decode_error("\x00\x00") == FrameErrorCode::truncated);
        CHECK(decode_error(prefix(2'000'000) + "{}") == FrameErrorCode::too_large);
        const std::string nope = R"({"type":"nope"})";
        CHECK(decode_error(prefix(static_cast<std::uint32_t>(nope.size())) + nope) == FrameErrorCode::unknown_type);
        const std::string junk = "{not json";
        CHECK(decode_error(prefix(static_cast<std::uint32_t>(junk.size())) + junk) == FrameErrorCode::malformed);
        const std::string missing = R"({"type":"ack"})";
        CHECK(decode_error(prefix(static_cast<std::uint32_t>(missing.size())) + missing) == FrameErrorCode::malformed);
        CHECK(decode_error(encode_frame(Ack{1}) + "x") == FrameErrorCode::malformed);
        CHECK(decode_error(encode_frame(Ack{1}), 4) == FrameErrorCode::too_large);
    }

    TEST_CASE("hello requires a version string")
    {
        auto j = message_to_json(Hello{fixture::small_session().streams[0].descriptor});
        j.erase("protocol_version");
        CHECK_THROWS_AS(message_from_json(j), FrameError);
    }

    TEST_CASE("frame reader splits a byte stream fed in arbitrary chunks")
    {
        const auto ms = sample_messages();
        std::string stream;
        for (const auto& m : ms) stream += encode_frame(m);
        for (std::size_t chunk : {1UL, 3UL, 7UL, 64UL, 100000UL}) {
            FrameReader r;
            std::vector<Message> got;
            for (std::size_t i = 0; i < stream.size(); i += chunk) {
                r.feed(std::string_view(stream).substr(i, chunk));
                while (auto m = r.next()) got.push_back(*m);
            }
            CHECK(got == ms);
            CHECK(r.buffered() == 0);
        }
    }

    TEST_CASE("frame reader rejects oversized prefixes without waiting for the body")
    {
        FrameReader r(1000);
        r.feed(prefix(5000));
        CHECK_THROWS_AS(r.next(), FrameError);
    }

    TEST_CASE("byte-span decoding")
    {
        const auto f = encode_frame(Ack{9});
        const std::span<const std::byte> bytes(reinterpret_cast<const std::byte*>(f.data()), f.size());
        CHECK(decode_frame(bytes) == Message{Ack{9}});
    }
}
