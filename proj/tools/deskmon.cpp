// deskmon: synth, sync, extract, evaluate, report, validate and serve.

#include "deskmon/challenge/evaluate.hpp"
#include "deskmon/ingest/gateway.hpp"
#include "deskmon/report/report.hpp"
#include "deskmon/session/validate.hpp"
#include "deskmon/store/store.hpp"
#include "deskmon/synth/cohort.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <csignal>
#include <fstream>
#include <iostream>
#include <thread>

namespace fs = std::filesystem;
using namespace deskmon;

namespace {

/// Domain failure: reported and mapped to exit code 1.
class CommandError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

void write_text(const fs::path& path, std::string_view text)
{
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw CommandError("cannot write " + path.string());
}

Json read_json(const fs::path& path)
{
    std::ifstream in(path);
    if (!in) throw CommandError("cannot open " + path.string());
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw CommandError(path.string() + ": " + e.what());
    }
}

/// Runs fn(i) for i in [0, n) on up to hardware_concurrency threads. The first
/// exception is rethrown after all workers finish.
template <class Fn>
void parallel_for(std::size_t n, Fn fn)
{
    const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(n, std::thread::hardware_concurrency()));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mu;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i; (i = next.fetch_add(1)) < n;) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(error_mu);
                    if (!error) error = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

std::vector<fs::path> session_dirs(const fs::path& data)
{
    auto dirs = store::find_session_dirs(data);
    if (dirs.empty()) throw CommandError("no sessions found under " + data.string());
    return dirs;
}

std::vector<sync::SyncedSession> load_synced(const fs::path& data, double gap_k)
{
    const auto dirs = session_dirs(data);
    std::vector<sync::SyncedSession> out(dirs.size());
    parallel_for(dirs.size(), [&](std::size_t i) { out[i] = sync::synchronize(store::load_session(dirs[i]), {gap_k}); });
    return out;
}

features::FeatureSet parse_level(const std::string& level)
{
    if (level == "basic") return features::FeatureSet::basic;
    if (level == "advanced") return features::FeatureSet::advanced;
    throw CommandError("level must be basic or advanced");
}

std::string csv_number(double v)
{
    return std::isfinite(v) ? fmt::format("{}", v) : std::string();
}

// ---- synth ----------------------------------------------------------------

struct SynthArgs {
    int users = 20;
    int cheaters = 10;
    std::uint64_t seed = 7;
    double k = 3.0;
    std::string cohort_config;
    std::string out;
};

int run_synth(const SynthArgs& a, const CLI::App& cmd)
{
    synth::CohortConfig cfg;
    if (!a.cohort_config.empty()) cfg = read_json(a.cohort_config).get<synth::CohortConfig>();
    // Flags given explicitly override the cohort file.
    if (cmd.count("--users") || a.cohort_config.empty()) cfg.n_users = a.users;
    if (cmd.count("--cheaters") || a.cohort_config.empty()) cfg.n_cheaters = a.cheaters;
    if (cmd.count("--seed") || a.cohort_config.empty()) cfg.seed = a.seed;
    if (cmd.count("--separation") || a.cohort_config.empty()) cfg.separation.k = a.k;

    const fs::path out(a.out);
    if (fs::exists(out) && !fs::is_empty(out)) throw CommandError(out.string() + " exists and is not empty");
    const auto cohort = synth::generate_cohort(cfg);
    parallel_for(cohort.sessions.size(), [&](std::size_t i) {
        store::save_session(cohort.sessions[i], out / cohort.sessions[i].session_id);
    });
    write_text(out / "cohort.json", Json(cfg).dump(2) + "\n");
    std::size_t flagged = 0;
    for (const auto& s : cohort.sessions) flagged += s.cheater_flag ? 1 : 0;
    fmt::print("wrote {} sessions ({} flagged) to {}\n", cohort.sessions.size(), flagged, out.string());
    return 0;
}

// ---- sync -----------------------------------------------------------------

int run_sync(const std::string& data, const std::string& out_dir, double gap_k)
{
    const fs::path out(out_dir);
    const auto dirs = session_dirs(data);
    std::vector<sync::SyncedSession> synced(dirs.size());
    parallel_for(dirs.size(), [&](std::size_t i) {
        synced[i] = sync::synchronize(store::load_session(dirs[i]), {gap_k});
        store::save_session(synced[i].manifest, out / synced[i].manifest.session_id);
    });
    Json summary = Json::array();
    for (const auto& s : synced) {
        Json gaps = Json::array();
        for (const auto& g : s.gaps) gaps.push_back({{"stream_id", g.stream_id}, {"start_us", g.start.micros}, {"end_us", g.end.micros}});
        summary.push_back({{"session_id", s.manifest.session_id}, {"clamped_samples", s.clamped_samples}, {"gaps", gaps}});
    }
    write_text(out / "sync_summary.json", Json{{"gap_k", gap_k}, {"sessions", summary}}.dump(2) + "\n");
    fmt::print("synchronized {} sessions into {}\n", synced.size(), out.string());
    return 0;
}

// ---- extract --------------------------------------------------------------

int run_extract(const std::string& data, const std::string& out_dir, double window, double hop, const std::string& level)
{
    const auto set = parse_level(level);
    const auto sessions = load_synced(data, 3.0);
    const fs::path out(out_dir);
    fs::create_directories(out);
    parallel_for(sessions.size(), [&](std::size_t i) {
        const auto& s = sessions[i];
        const auto& m = s.manifest;
        auto write_rows = [&](const fs::path& path, const std::vector<std::tuple<std::string, SessionTime, SessionTime>>& units) {
            std::string csv;
            bool header = false;
            for (const auto& [unit, start, end] : units) {
                const auto fv = features::summarize_interval(s, start, end, set);
                if (!header) {
                    csv += "session_id,unit,start_s,end_s";
                    for (const auto& n : fv.names) csv += "," + n;
                    csv += "\n";
                    header = true;
                }
                csv += fmt::format("{},{},{},{}", m.session_id, unit, start.seconds(), end.seconds());
                for (double v : fv.values) csv += "," + csv_number(v);
                csv += "\n";
            }
            write_text(path, csv);
        };
        std::vector<std::tuple<std::string, SessionTime, SessionTime>> windows, tasks;
        const auto bounds = sync::window_bounds(m.session_end(), window, hop);
        for (std::size_t w = 0; w < bounds.size(); ++w) windows.emplace_back("w" + std::to_string(w), bounds[w].first, bounds[w].second);
        for (const auto& t : m.tasks) tasks.emplace_back(t.task_id, t.start, t.end);
        write_rows(out / (m.session_id + ".windows.csv"), windows);
        write_rows(out / (m.session_id + ".tasks.csv"), tasks);
    });
    fmt::print("extracted features for {} sessions into {}\n", sessions.size(), out.string());
    return 0;
}

// ---- evaluate -------------------------------------------------------------

struct EvaluateArgs {
    int challenge = 0;
    std::string data;
    std::string out = "results";
    std::string level = "basic";
    double window = 10.0;
    double hop = 5.0;
    double iou = 0.3;
    double inactivity = 10.0;
};

int run_evaluate(const EvaluateArgs& a)
{
    const auto sessions = load_synced(a.data, 3.0);
    challenge::EvalConfig cfg;
    cfg.dataset.level = parse_level(a.level);
    cfg.dataset.windowing = {a.window, a.hop};
    cfg.iou_min = a.iou;
    cfg.anomaly.inactivity_s = a.inactivity;
    const auto ev = challenge::evaluate_challenge(sessions, a.challenge, cfg);

    Json j = challenge::to_json(ev.result);
    j["skipped"] = ev.skipped;
    j["sessions"] = sessions.size();
    j["level"] = a.level;
    const fs::path out(a.out);
    const auto path = out / fmt::format("challenge{}.json", a.challenge);
    write_text(path, j.dump(2) + "\n");
    if (!ev.det.empty()) write_text(out / fmt::format("challenge{}_det.csv", a.challenge), challenge::det_to_csv(ev.det));
    fmt::print("challenge {} ({}): {} = {}\n", a.challenge, j["details"].value("name", std::string()), ev.result.metric,
               csv_number(ev.result.value).empty() ? "n/a" : csv_number(ev.result.value));
    for (const auto& s : ev.skipped) fmt::print("  skipped {}\n", s);
    fmt::print("results written to {}\n", path.string());
    return 0;
}

// ---- report ---------------------------------------------------------------

int run_report(const std::string& data, const std::string& out_dir, const std::string& only, double inactivity, double iou)
{
    auto sessions = load_synced(data, 3.0);
    if (!only.empty()) {
        std::erase_if(sessions, [&](const auto& s) { return s.manifest.session_id != only; });
        if (sessions.empty()) throw CommandError("no session with id " + only);
    }
    challenge::AnomalyConfig acfg;
    acfg.inactivity_s = inactivity;
    const fs::path out(out_dir);
    std::vector<std::string> lines(sessions.size());
    parallel_for(sessions.size(), [&](std::size_t i) {
        const auto det = challenge::detect_anomalies(sessions[i], acfg);
        const auto rep = report::generate_report(sessions[i], det, {iou});
        const auto& id = sessions[i].manifest.session_id;
        write_text(out / (id + ".report.txt"), rep.text);
        write_text(out / (id + ".report.json"), rep.json.dump(2) + "\n");
        lines[i] = fmt::format("{}: {} detection(s){}", id, det.detections.size(),
                               rep.scores ? fmt::format(", f1 {:.3f}", rep.scores->f1) : std::string());
    });
    for (const auto& l : lines) fmt::print("{}\n", l);
    fmt::print("reports written to {}\n", out.string());
    return 0;
}

// ---- validate -------------------------------------------------------------

int run_validate(const std::string& path)
{
    const auto dirs = store::find_session_dirs(path);
    if (dirs.empty()) throw CommandError("no sessions found under " + path);
    int failures = 0;
    for (const auto& d : dirs) {
        try {
            const auto m = store::load_session(d);
            fmt::print("{}: ok ({} streams, {} tasks)\n", d.string(), m.streams.size(), m.tasks.size());
        } catch (const store::StoreError& e) {
            ++failures;
            fmt::print(stderr, "{}: {}\n", d.string(), e.what());
        }
    }
    return failures ? 1 : 0;
}

// ---- serve ----------------------------------------------------------------

std::atomic<bool> g_stop{false};

extern "C" void on_signal(int)
{
    g_stop = true;
}

struct ServeArgs {
    std::string address = "127.0.0.1";
    unsigned short tcp_port = 7070;
    int ws_port = 7071;
    std::string session_id = "live";
    std::string out;
    double duration = 0.0;
    int age = 0;
    std::string gender;
};

int run_serve(const ServeArgs& a)
{
    SessionManifest base;
    base.session_id = a.session_id;
    base.demographics.age = a.age;
    base.demographics.gender = a.gender;
    ingest::IngestSession session(base);
    ingest::GatewayConfig cfg;
    cfg.address = a.address;
    cfg.tcp_port = a.tcp_port;
    cfg.ws_port = a.ws_port < 0 ? std::nullopt : std::optional<unsigned short>(static_cast<unsigned short>(a.ws_port));
    ingest::GatewayServer server(session, cfg);
    server.start();
    fmt::print("gateway listening on {} tcp:{}", a.address, server.tcp_port());
    if (auto ws = server.ws_port()) fmt::print(" ws:{}", *ws);
    fmt::print("\n");
    std::fflush(stdout);

    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    const auto started = std::chrono::steady_clock::now();
    while (!g_stop) {
        std::this_thread::sleep_for(std::chrono::milliseconds(100));
        if (a.duration > 0 && std::chrono::steady_clock::now() - started > std::chrono::duration<double>(a.duration)) break;
    }
    server.stop();

    auto m = session.snapshot();
    if (m.context.finish_time == m.context.start_time) {
        // No context message: the session spans until the last sample.
        std::int64_t last = 0;
        for (const auto& s : m.streams) {
            std::visit(
                [&](const auto& v) {
                    if constexpr (!std::is_same_v<std::decay_t<decltype(v)>, std::monostate>) {
                        for (const auto& x : v) last = std::max(last, sync::to_session_time(x.raw_ts, s.descriptor).time.micros);
                    }
                },
                s.samples);
        }
        m.context.finish_time = m.context.start_time + last + 1;
    }
    fmt::print("received {} streams, {} tasks\n", m.streams.size(), m.tasks.size());
    if (a.out.empty()) return 0;
    const auto report = validate_manifest(m);
    if (!report.ok()) {
        const fs::path partial = fs::path(a.out).string() + ".partial.json";
        write_text(partial, manifest_to_json(m, true).dump() + "\n");
        throw CommandError("session does not validate, raw snapshot written to " + partial.string() + "\n" + report.to_string());
    }
    store::save_session(m, a.out);
    fmt::print("session saved to {}\n", a.out);
    return 0;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"deskmon: multimodal desk-session capture, synchronization and proctoring analysis"};
    app.set_config("--config", "", "Configuration file (TOML/INI); flags given on the command line win");
    app.require_subcommand(1);

    SynthArgs synth_args;
    auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic cohort");
    synth_cmd->add_option("--users", synth_args.users, "Number of users")->capture_default_str();
    synth_cmd->add_option("--cheaters", synth_args.cheaters, "Users with an injected anomaly")->capture_default_str();
    synth_cmd->add_option("--seed", synth_args.seed, "Cohort seed")->capture_default_str();
    synth_cmd->add_option("--separation", synth_args.k, "Hold-time separation k (0 = none)")->capture_default_str();
    synth_cmd->add_option("--cohort-config", synth_args.cohort_config, "Cohort config JSON");
    synth_cmd->add_option("--out", synth_args.out, "Output directory")->required();

    std::string data, out;
    double gap_k = 3.0;
    auto* sync_cmd = app.add_subcommand("sync", "Apply clock mapping and gap detection to stored sessions");
    sync_cmd->add_option("--data", data, "Session directory or tree")->required();
    sync_cmd->add_option("--out", out, "Output directory")->required();
    sync_cmd->add_option("--gap-k", gap_k, "Gap threshold in nominal periods")->capture_default_str();

    double window = 10.0, hop = 5.0;
    std::string level = "basic";
    auto* extract_cmd = app.add_subcommand("extract", "Write per-window and per-task feature CSV files");
    extract_cmd->add_option("--data", data, "Session directory or tree")->required();
    extract_cmd->add_option("--out", out, "Output directory")->required();
    extract_cmd->add_option("--window", window, "Window length (s)")->capture_default_str();
    extract_cmd->add_option("--hop", hop, "Window hop (s)")->capture_default_str();
    extract_cmd->add_option("--level", level, "basic or advanced")->capture_default_str();

    EvaluateArgs eval_args;
    auto* eval_cmd = app.add_subcommand("evaluate", "Build a challenge dataset, run its baseline, write the result");
    eval_cmd->add_option("--challenge", eval_args.challenge, "Challenge 1..5")->required()->check(CLI::Range(1, 5));
    eval_cmd->add_option("--data", eval_args.data, "Session directory or tree")->required();
    eval_cmd->add_option("--out", eval_args.out, "Results directory")->capture_default_str();
    eval_cmd->add_option("--level", eval_args.level, "basic or advanced")->capture_default_str();
    eval_cmd->add_option("--window", eval_args.window, "Window length (s)")->capture_default_str();
    eval_cmd->add_option("--hop", eval_args.hop, "Window hop (s)")->capture_default_str();
    eval_cmd->add_option("--iou", eval_args.iou, "IoU threshold for interval matching")->capture_default_str();
    eval_cmd->add_option("--inactivity", eval_args.inactivity, "Inactivity threshold (s)")->capture_default_str();

    std::string only;
    double inactivity = 10.0, iou = 0.3;
    auto* report_cmd = app.add_subcommand("report", "Detect anomalies and write per-session reports");
    report_cmd->add_option("--data", data, "Session directory or tree")->required();
    report_cmd->add_option("--out", out, "Output directory")->required();
    report_cmd->add_option("--session", only, "Only this session id");
    report_cmd->add_option("--inactivity", inactivity, "Inactivity threshold (s)")->capture_default_str();
    report_cmd->add_option("--iou", iou, "IoU threshold for the ground-truth block")->capture_default_str();

    std::string validate_path;
    auto* validate_cmd = app.add_subcommand("validate", "Check checksums and manifest invariants");
    validate_cmd->add_option("path", validate_path, "Session directory or tree")->required();

    ServeArgs serve_args;
    auto* serve_cmd = app.add_subcommand("serve", "Run the ingest gateway");
    serve_cmd->add_option("--address", serve_args.address, "Listen address")->capture_default_str();
    serve_cmd->add_option("--tcp-port", serve_args.tcp_port, "TCP port (0 = ephemeral)")->capture_default_str();
    serve_cmd->add_option("--ws-port", serve_args.ws_port, "WebSocket port (-1 disables)")->capture_default_str();
    serve_cmd->add_option("--session-id", serve_args.session_id, "Session id")->capture_default_str();
    serve_cmd->add_option("--out", serve_args.out, "Save the session here on shutdown");
    serve_cmd->add_option("--duration", serve_args.duration, "Stop after this many seconds (0 = until signal)");
    serve_cmd->add_option("--age", serve_args.age, "Participant age");
    serve_cmd->add_option("--gender", serve_args.gender, "Participant gender");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*synth_cmd) return run_synth(synth_args, *synth_cmd);
        if (*sync_cmd) return run_sync(data, out, gap_k);
        if (*extract_cmd) return run_extract(data, out, window, hop, level);
        if (*eval_cmd) return run_evaluate(eval_args);
        if (*report_cmd) return run_report(data, out, only, inactivity, iou);
        if (*validate_cmd) return run_validate(validate_path);
        if (*serve_cmd) return run_serve(serve_args);
    } catch (const std::exception& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return 1;
    }
    return 2;
}
