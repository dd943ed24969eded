#include "deskmon/store/store.hpp"

#include "support/fixtures.hpp"

#include <doctest.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <sys/wait.h>

using fixture::TempDir;

namespace {

struct Run {
    int status;
    std::string output;
};

Run run(const std::string& args)
{
    const std::string cmd = std::string(DESKMON_CLI) + " " + args + " 2>&1";
    Run r{-1, {}};
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p);
    std::array<char, 4096> buf{};
    while (auto n = fread(buf.data(), 1, buf.size(), p)) r.output.append(buf.data(), n);
    const int raw = pclose(p);
    r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    return r;
}

}  // namespace

TEST_SUITE("cli")
{
    TEST_CASE("help and usage errors")
    {
        CHECK(run("--help").status == 0);
        CHECK(run("synth --help").status == 0);
        CHECK(run("").status == 2);
        CHECK(run("synth --no-such-flag").status == 2);
        CHECK(run("evaluate --challenge 9 --data .").status == 2);
    }

    TEST_CASE("validate names a corrupted file")
    {
        TempDir dir;
        deskmon::store::save_session(fixture::small_session(), dir / "s");
        {
            std::fstream f(dir / "s" / "samples.pose.csv", std::ios::in | std::ios::out | std::ios::binary);
            f.seekp(40);
            f.put('#');
        }
        const auto r = run("validate " + (dir / "s").string());
        CHECK(r.status != 0);
        CHECK(r.output.find("samples.pose.csv") != std::string::npos);
    }

    TEST_CASE("validate accepts an intact session")
    {
        TempDir dir;
        deskmon::store::save_session(fixture::small_session(), dir / "s");
        const auto r = run("validate " + (dir / "s").string());
        CHECK(r.status == 0);
        CHECK(r.output.find("ok") != std::string::npos);
    }

    TEST_CASE("synth refuses a non-empty output directory")
    {
        TempDir dir;
        std::ofstream(dir / "junk") << "x";
        CHECK(run("synth --users 4 --cheaters 1 --out " + dir.path().string()).status == 1);
    }
}
