#include "deskmon/session/anonymize.hpp"
#include "deskmon/session/json.hpp"
#include "deskmon/session/validate.hpp"

#include "support/fixtures.hpp"

#include <doctest.h>

#include <random>

using namespace deskmon;
using fixture::sec;
using fixture::small_session;

namespace {

bool has_violation(const ValidationReport& r, std::string_view message)
{
    for (const auto& v : r.violations) {
        if (v.message == message) return true;
    }
    return false;
}

template <class Sample>
std::vector<Sample>& samples(SessionManifest& m, std::string_view id)
{
    for (auto& s : m.streams) {
        if (s.descriptor.stream_id == id) return std::get<std::vector<Sample>>(s.samples);
    }
    throw std::out_of_range(std::string(id));
}

}  // namespace

TEST_SUITE("session-model")
{
    TEST_CASE("enum names round-trip")
    {
        for (auto k : {StreamKind::front_camera, StreamKind::keyboard, StreamKind::eeg_band, StreamKind::face_biometrics}) {
            CHECK(parse_enum<StreamKind>(to_string(k)) == k);
        }
        CHECK(parse_enum<MouseKind>("drag") == MouseKind::drag);
        CHECK_THROWS_AS(parse_enum<TaskGroup>("quiz"), UnknownEnumValue);
    }

    TEST_CASE("consistent manifest validates cleanly")
    {
        const auto r = validate_manifest(small_session());
        INFO(r.to_string());
        CHECK(r.ok());
    }

    TEST_CASE("attention 101 gives exactly one violation")
    {
        auto m = small_session();
        samples<EEGSample>(m, "eeg")[4].attention = 101;
        const auto r = validate_manifest(m);
        REQUIRE(r.violations.size() == 1);
        CHECK(r.violations[0].message == "attention out of [0,100]");
        CHECK(r.violations[0].where == "streams[eeg].samples[4]");
    }

    TEST_CASE("overlapping tasks give exactly one violation")
    {
        auto m = small_session();
        m.tasks[1] = make_task("write1", TaskGroup::writing, sec(20), sec(52), 0.75);
        const auto r = validate_manifest(m);
        REQUIRE(r.violations.size() == 1);
        CHECK(r.violations[0].message == "overlapping tasks");
    }

    TEST_CASE("each invariant is reported")
    {
        auto m = small_session();
        m.session_id.clear();
        m.demographics.age = 0;
        m.context.mac = "zz";
        m.tasks[0].accuracy = 1.5;
        m.tasks[0].duration_s = 3;
        samples<KeyEvent>(m, "kbd")[0].key_code.clear();
        samples<MouseEvent>(m, "mouse")[0].x = 5000;
        samples<WearableSample>(m, "watch")[2].heart_rate_bpm = 300;
        samples<HeadPoseSample>(m, "pose")[1].yaw = 190;
        samples<FaceSample>(m, "face")[1].auth_score = -0.5;
        m.anomaly_labels.push_back({sec(10), sec(5), AnomalyKind::other});
        const auto r = validate_manifest(m);
        for (auto msg : {"session_id must not be empty", "age must be > 0", "MAC must be 6 colon-separated hex octets",
                         "accuracy out of [0,1]", "duration does not equal end - start", "empty key_code",
                         "mouse position outside screen", "heart rate out of (20,250)",
                         "head pose angle out of [-180,180]", "auth_score out of [0,1]", "label end must be after start",
                         "cheater_flag must be true exactly when anomaly labels exist"}) {
            INFO(msg);
            CHECK(has_violation(r, msg));
        }
    }

    TEST_CASE("pairing and ordering are checked per stream")
    {
        auto m = small_session();
        auto& keys = samples<KeyEvent>(m, "kbd");
        keys.insert(keys.begin(), KeyEvent{fixture::raw_sec(1.0), "z", KeyAction::release});
        auto& mouse = samples<MouseEvent>(m, "mouse");
        std::swap(mouse[0].raw_ts, mouse[1].raw_ts);
        const auto r = validate_manifest(m);
        CHECK(has_violation(r, "key release without prior press of 'z'"));
        CHECK(has_violation(r, "raw_ts decreases within stream"));
    }

    TEST_CASE("validation is pure")
    {
        auto m = small_session();
        samples<EEGSample>(m, "eeg")[0].meditation = -1;
        CHECK(validate_manifest(m).violations == validate_manifest(m).violations);
    }

    TEST_CASE("stream and payload rules")
    {
        auto m = small_session();
        m.streams[6].descriptor.payload = PayloadKind::inline_samples;
        m.streams[0].descriptor.stream_id = "bad id";
        m.streams[2].descriptor.nominal_rate_hz = 0;
        const auto r = validate_manifest(m);
        CHECK(has_violation(r, "media kinds must use an external_file payload"));
        CHECK(has_violation(r, "stream_id must match [A-Za-z0-9_.-]+"));
        CHECK(has_violation(r, "nominal_rate_hz must be > 0"));
    }

    TEST_CASE("manifest JSON round-trip is field-exact")
    {
        const auto m = small_session();
        const auto j = manifest_to_json(m, true);
        CHECK(manifest_from_json(Json::parse(j.dump())) == m);
        CHECK(manifest_to_json(manifest_from_json(j), true).dump() == j.dump());
    }

    TEST_CASE("every sample type round-trips through JSON on random values")
    {
        std::mt19937_64 g(11);
        std::uniform_real_distribution<double> u(-1e6, 1e6);
        for (int i = 0; i < 200; ++i) {
            EEGSample e{RawTime{static_cast<std::int64_t>(g() >> 2)}, {u(g), u(g), u(g), u(g), u(g)}, u(g), u(g), std::nullopt};
            if (i % 2) e.blink_strength = u(g);
            CHECK(Json(e).get<EEGSample>() == e);
            CHECK(Json::parse(Json(e).dump()).get<EEGSample>() == e);
            WearableSample w{RawTime{i}, std::nullopt, {u(g), u(g), u(g)}, {u(g), u(g), u(g)}, {u(g), u(g), u(g)}};
            if (i % 3) w.heart_rate_bpm = u(g);
            CHECK(Json::parse(Json(w).dump()).get<WearableSample>() == w);
            HeadPoseSample h{RawTime{-i}, u(g), u(g), u(g)};
            CHECK(Json::parse(Json(h).dump()).get<HeadPoseSample>() == h);
            FaceSample f{RawTime{i}, u(g), u(g), i % 2 == 0};
            CHECK(Json::parse(Json(f).dump()).get<FaceSample>() == f);
            MouseEvent me{RawTime{i}, MouseKind::wheel, i, -i, MouseButton::middle, 120};
            CHECK(Json::parse(Json(me).dump()).get<MouseEvent>() == me);
            KeyEvent ke{RawTime{i}, "Key\"" + std::to_string(i), KeyAction::release};
            CHECK(Json::parse(Json(ke).dump()).get<KeyEvent>() == ke);
        }
    }

    TEST_CASE("schema errors name the field")
    {
        auto j = manifest_to_json(small_session(), true);
        j["streams"][0]["kind"] = "hologram";
        CHECK_THROWS(manifest_from_json(j));
        auto j2 = manifest_to_json(small_session(), true);
        j2.erase("session_id");
        CHECK_THROWS(manifest_from_json(j2));
    }
}

TEST_SUITE("anonymize")
{
    TEST_CASE("same identity maps to the same user id across sessions")
    {
        IdentityMap map{{"ID123", 7}};
        auto a = small_session("a");
        auto b = small_session("b");
        a.user_id.reset();
        b.user_id.reset();
        a.identity = b.identity = Identity{"X", "x@example.org", "ID123"};
        const auto aa = anonymize(a, map);
        const auto bb = anonymize(b, map);
        CHECK(aa.user_id == std::optional<std::uint64_t>(7));
        CHECK(bb.user_id == std::optional<std::uint64_t>(7));
        CHECK_FALSE(aa.identity.has_value());
        CHECK(is_anonymized(aa));
        CHECK_FALSE(is_anonymized(a));
    }

    TEST_CASE("anonymized manifest is unchanged")
    {
        const auto m = small_session();
        CHECK(anonymize(m, {}) == m);
        CHECK(anonymize(anonymize(m, {}), {}) == m);
    }

    TEST_CASE("unknown identity is an error")
    {
        auto m = small_session();
        m.identity = Identity{"Y", "y@example.org", "ID999"};
        CHECK_THROWS_AS(anonymize(m, {{"ID123", 7}}), UnknownIdentity);
    }

    TEST_CASE("identity strings are redacted from answers")
    {
        auto m = small_session();
        m.identity = Identity{"Maria Lopez", "maria@example.org", "ID555"};
        m.context.answers.push_back({"enroll", "Maria Lopez maria@example.org"});
        const auto a = anonymize(m, {{"ID555", 1}});
        for (const auto& ans : a.context.answers) {
            CHECK(ans.text.find("Maria Lopez") == std::string::npos);
            CHECK(ans.text.find("maria@example.org") == std::string::npos);
        }
    }

    TEST_CASE("hashed key codes keep digraph identity")
    {
        const auto h1 = hash_key_code("a", "secret");
        CHECK(h1 == hash_key_code("a", "secret"));
        CHECK(h1 != hash_key_code("b", "secret"));
        CHECK(h1 != hash_key_code("a", "other"));
        CHECK(h1.rfind("h:", 0) == 0);
        CHECK(h1.size() == 18);
        const auto m = hash_key_codes(small_session(), "secret");
        const auto& keys = std::get<std::vector<KeyEvent>>(m.streams[0].samples);
        CHECK(keys[0].key_code == hash_key_code("m", "secret"));
        CHECK(keys[0].key_code == keys[1].key_code);
        CHECK(validate_manifest(m).ok());
    }
}
