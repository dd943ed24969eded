#include "deskmon/session/json.hpp"
#include "deskmon/store/store.hpp"

#include "support/fixtures.hpp"

#include <doctest.h>

#include <fstream>
#include <sstream>

using namespace deskmon;
using namespace deskmon::store;
using fixture::TempDir;

namespace {

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void spit(const fs::path& p, const std::string& bytes)
{
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    out << bytes;
}

std::map<std::string, std::string> tree(const fs::path& root)
{
    std::map<std::string, std::string> out;
    for (const auto& e : fs::recursive_directory_iterator(root)) {
        if (e.is_regular_file()) out[fs::relative(e.path(), root).string()] = slurp(e.path());
    }
    return out;
}

StoreErrorCode code_of(const std::function<void()>& f)
{
    try {
        f();
    } catch (const StoreError& e) {
        return e.code();
    }
    FAIL("no StoreError thrown");
    return StoreErrorCode::io;
}

}  // namespace

TEST_SUITE("store")
{
    TEST_CASE("layout of a saved session")
    {
        TempDir dir;
        const auto m = fixture::small_session();
        const auto manifest = save_session(m, dir / "s");
        CHECK(manifest == dir / "s" / "manifest.json");
        const auto files = tree(dir / "s");
        for (auto name : {"manifest.json", "checksums.txt", "events.kbd.ndjson", "events.mouse.ndjson",
                          "samples.eeg.csv", "samples.watch.csv", "samples.pose.csv", "samples.face.csv"}) {
            INFO(name);
            CHECK(files.count(name) == 1);
        }
        CHECK(files.size() == 8);
        CHECK(files.at("samples.eeg.csv").rfind("raw_ts,delta,theta,alpha,beta,gamma,attention,meditation,blink_strength\n", 0) == 0);
        // Checksums cover every other file, sorted.
        std::istringstream cs(files.at("checksums.txt"));
        std::string line, prev;
        std::size_t n = 0;
        while (std::getline(cs, line)) {
            const auto name = line.substr(66);
            CHECK(line.substr(0, 64) == sha256_hex(files.at(name)));
            CHECK(name > prev);
            prev = name;
            ++n;
        }
        CHECK(n == 7);
    }

    TEST_CASE("round-trip and repeated saves are byte-identical")
    {
        TempDir dir;
        const auto m = fixture::small_session();
        save_session(m, dir / "a");
        const auto loaded = load_session(dir / "a");
        CHECK(loaded == m);
        save_session(loaded, dir / "b");
        CHECK(tree(dir / "a") == tree(dir / "b"));
    }

    TEST_CASE("synthetic session round-trip")
    {
        TempDir dir;
        const auto m = synth::generate_session(synth::generate_profile(4), fixture::short_plan(),
                                               {{{AnomalyKind::absence, 60.0, 30.0}}}, 4);
        save_session(m, dir / "x");
        CHECK(load_session(dir / "x") == m);
    }

    TEST_CASE("target exists")
    {
        TempDir dir;
        save_session(fixture::small_session(), dir / "s");
        CHECK(code_of([&] { save_session(fixture::small_session(), dir / "s"); }) == StoreErrorCode::target_exists);
    }

    TEST_CASE("invalid session creates no files")
    {
        TempDir dir;
        auto m = fixture::small_session();
        m.demographics.age = -1;
        CHECK(code_of([&] { save_session(m, dir / "bad"); }) == StoreErrorCode::validation_failed);
        CHECK(fs::is_empty(dir.path()));
    }

    TEST_CASE("a flipped byte names the file")
    {
        TempDir dir;
        save_session(fixture::small_session(), dir / "s");
        auto bytes = slurp(dir / "s" / "samples.eeg.csv");
        bytes[bytes.size() / 2] ^= 0x01;
        spit(dir / "s" / "samples.eeg.csv", bytes);
        try {
            load_session(dir / "s");
            FAIL("expected a checksum error");
        } catch (const StoreError& e) {
            CHECK(e.code() == StoreErrorCode::checksum_mismatch);
            CHECK(e.file() == "samples.eeg.csv");
            CHECK(std::string(e.what()).find("samples.eeg.csv") != std::string::npos);
        }
        CHECK(verify_layout(dir / "s").size() == 1);
    }

    TEST_CASE("manifest referencing an absent stream file")
    {
        TempDir dir;
        save_session(fixture::small_session(), dir / "s");
        fs::remove(dir / "s" / "events.mouse.ndjson");
        CHECK(code_of([&] { load_session(dir / "s"); }) == StoreErrorCode::missing_file);
    }

    TEST_CASE("unlisted files are rejected")
    {
        TempDir dir;
        save_session(fixture::small_session(), dir / "s");
        spit(dir / "s" / "extra.txt", "hello");
        CHECK(code_of([&] { load_session(dir / "s"); }) == StoreErrorCode::checksum_mismatch);
    }

    TEST_CASE("schema violations")
    {
        TempDir dir;
        save_session(fixture::small_session(), dir / "s");
        // Rewrite the manifest with a bad field and fix up its checksum.
        auto j = Json::parse(slurp(dir / "s" / "manifest.json"));
        j["streams"][0]["kind"] = "hologram";
        const auto text = j.dump(2) + "\n";
        spit(dir / "s" / "manifest.json", text);
        auto cs = slurp(dir / "s" / "checksums.txt");
        const auto pos = cs.find("  manifest.json");
        cs.replace(pos - 64, 64, sha256_hex(text));
        spit(dir / "s" / "checksums.txt", cs);
        CHECK(code_of([&] { load_session(dir / "s"); }) == StoreErrorCode::schema_violation);
    }

    TEST_CASE("media files are copied and checksummed when a source is given")
    {
        TempDir dir;
        fs::create_directories(dir / "src");
        spit(dir / "src" / "front.mp4", std::string(1000, '\x42'));
        save_session(fixture::small_session(), dir / "s", SaveOptions{dir / "src"});
        CHECK(fs::exists(dir / "s" / "media" / "front.mp4"));
        CHECK(slurp(dir / "s" / "checksums.txt").find("media/front.mp4") != std::string::npos);
        CHECK(load_session(dir / "s") == fixture::small_session());
    }

    TEST_CASE("sha256 known answers")
    {
        CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
        CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    }

    TEST_CASE("session discovery")
    {
        TempDir dir;
        save_session(fixture::small_session("b"), dir / "x" / "b");
        save_session(fixture::small_session("a"), dir / "x" / "a");
        const auto found = find_session_dirs(dir.path());
        REQUIRE(found.size() == 2);
        CHECK(found[0].filename() == "a");
        CHECK(find_session_dirs(dir / "x" / "a").size() == 1);
    }
}

TEST_SUITE("export")
{
    TEST_CASE("one directory per user plus an index")
    {
        TempDir dir;
        synth::CohortConfig cfg;
        cfg.n_users = 20;
        cfg.n_cheaters = 10;
        cfg.plan = fixture::short_plan();
        cfg.session.with_smartwatch = false;
        const auto cohort = synth::generate_cohort(cfg);
        const auto summary = export_dataset(cohort.sessions, dir / "out");
        CHECK(summary.users == 20);
        CHECK(summary.sessions == 20);
        std::size_t dirs = 0;
        for (const auto& e : fs::directory_iterator(dir / "out")) dirs += e.is_directory() ? 1 : 0;
        CHECK(dirs == 20);
        const auto index = Json::parse(slurp(summary.index));
        CHECK(index.at("users").size() == 20);
        std::size_t flagged = 0;
        for (const auto& u : index.at("users")) {
            CHECK(u.contains("demographics"));
            REQUIRE(u.at("sessions").size() == 1);
            const auto& s = u.at("sessions")[0];
            flagged += s.at("cheater_flag").get<bool>() ? 1 : 0;
            CHECK(s.at("tasks").size() == 4);
            CHECK(s.at("tasks")[0].contains("accuracy"));
            CHECK(s.at("tasks")[0].contains("time_s"));
            CHECK(fs::exists(dir / "out" / s.at("path").get<std::string>() / "manifest.json"));
        }
        CHECK(flagged == 10);
    }

    TEST_CASE("real identity is refused")
    {
        TempDir dir;
        auto m = fixture::small_session();
        m.identity = Identity{"X", "x@example.org", "ID1"};
        const std::vector<SessionManifest> v{m};
        CHECK(code_of([&] { export_dataset(v, dir / "out"); }) == StoreErrorCode::not_anonymized);
        CHECK_FALSE(fs::exists(dir / "out" / "3"));
    }

    TEST_CASE("empty list")
    {
        TempDir dir;
        const auto summary = export_dataset({}, dir / "out");
        CHECK(summary.users == 0);
        const auto index = Json::parse(slurp(summary.index));
        CHECK(index.at("users").empty());
        std::size_t entries = 0;
        for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir / "out")) ++entries;
        CHECK(entries == 1);
    }
}
