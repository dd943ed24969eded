#include "deskmon/report/report.hpp"

#include <fmt/format.h>

#include <ctime>

namespace deskmon::report {
namespace {

double secs(SessionTime t)
{
    return t.seconds();
}

std::string utc(std::int64_t wall_micros)
{
    const std::time_t s = static_cast<std::time_t>(wall_micros / kMicrosPerSecond);
    std::tm tm{};
    gmtime_r(&s, &tm);
    return fmt::format("{:04}-{:02}-{:02}T{:02}:{:02}:{:02}Z", tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday, tm.tm_hour,
                       tm.tm_min, tm.tm_sec);
}

const TaskRecord* task_at(const SessionManifest& m, SessionTime t)
{
    for (const auto& task : m.tasks) {
        if (task.start <= t && t < task.end) return &task;
    }
    return nullptr;
}

std::string rule_list(const std::vector<challenge::AnomalyRule>& rules)
{
    std::string out;
    for (auto r : rules) {
        if (!out.empty()) out += "+";
        out += challenge::to_string(r);
    }
    return out;
}

}  // namespace

SessionReport generate_report(const sync::SyncedSession& session, const challenge::DetectionReport& detections,
                              const ReportConfig& config)
{
    const auto& m = session.manifest;
    SessionReport r;
    std::string& t = r.text;

    t += fmt::format("Session report: {}\n", m.session_id);
    t += fmt::format("user_id: {}\n", m.user_id ? std::to_string(*m.user_id) : std::string("(none)"));
    t += fmt::format("cheater_flag: {}\n", m.cheater_flag ? "yes" : "no");
    t += fmt::format("started: {}  duration: {:.1f} s\n", utc(m.context.start_time), secs(m.session_end()));

    Json streams = Json::array();
    t += "\nStreams:\n";
    for (const auto& s : m.streams) {
        const auto n = series_size(s.samples);
        t += fmt::format("  {:<14} {:<16} {:>8} samples\n", s.descriptor.stream_id, to_string(s.descriptor.kind), n);
        streams.push_back({{"stream_id", s.descriptor.stream_id}, {"kind", to_string(s.descriptor.kind)}, {"samples", n}});
    }

    Json tasks = Json::array();
    t += "\nTasks:\n";
    if (m.tasks.empty()) t += "  (none)\n";
    for (const auto& task : m.tasks) {
        t += fmt::format("  {:<10} {:<16} {:>8.1f} s to {:>8.1f} s ({:.1f} s)  accuracy {:.2f}\n", task.task_id,
                         to_string(task.group), secs(task.start), secs(task.end), task.duration_s, task.accuracy);
        tasks.push_back({{"task_id", task.task_id},
                         {"group", to_string(task.group)},
                         {"start_us", task.start.micros},
                         {"end_us", task.end.micros},
                         {"duration_s", task.duration_s},
                         {"accuracy", task.accuracy}});
    }

    Json dets = Json::array();
    t += fmt::format("\nDetections: {}\n", detections.detections.size());
    if (detections.detections.empty()) t += "  No detections.\n";
    for (std::size_t i = 0; i < detections.detections.size(); ++i) {
        const auto& d = detections.detections[i];
        const auto* task = task_at(m, d.start);
        t += fmt::format("  [{}] {:.1f} s to {:.1f} s ({:.1f} s)  rule: {}  confidence {:.2f}{}\n", i + 1, secs(d.start),
                         secs(d.end), secs(d.end) - secs(d.start), rule_list(d.rules), d.confidence,
                         task ? "  during " + task->task_id : std::string());
        Json rules = Json::array();
        for (auto rule : d.rules) rules.push_back(challenge::to_string(rule));
        dets.push_back({{"start_us", d.start.micros},
                        {"end_us", d.end.micros},
                        {"duration_s", secs(d.end) - secs(d.start)},
                        {"confidence", d.confidence},
                        {"rules", rules},
                        {"task_id", task ? Json(task->task_id) : Json(nullptr)}});
    }
    for (const auto& note : detections.notes) t += "  note: " + note + "\n";

    Json gaps = Json::array();
    t += fmt::format("\nGaps: {}\n", session.gaps.size());
    for (const auto& g : session.gaps) {
        t += fmt::format("  {:<14} {:.3f} s to {:.3f} s ({:.3f} s)\n", g.stream_id, secs(g.start), secs(g.end),
                         secs(g.end) - secs(g.start));
        gaps.push_back({{"stream_id", g.stream_id}, {"start_us", g.start.micros}, {"end_us", g.end.micros}});
    }

    Json evaluation = nullptr;
    if (!m.anomaly_labels.empty()) {
        std::vector<challenge::Interval> pred, truth;
        for (const auto& d : detections.detections) pred.push_back(d.interval());
        for (const auto& l : m.anomaly_labels) truth.push_back({l.start, l.end});
        const auto sc = challenge::interval_f1(pred, truth, config.iou_min);
        r.scores = sc;
        t += fmt::format("\nGround truth ({} labels, IoU >= {}):\n", truth.size(), config.iou_min);
        for (const auto& l : m.anomaly_labels) {
            t += fmt::format("  {:<14} {:.1f} s to {:.1f} s\n", to_string(l.kind), secs(l.start), secs(l.end));
        }
        t += fmt::format("  precision {:.3f}  recall {:.3f}  f1 {:.3f}  ({} matched, {} predicted, {} labelled)\n",
                         sc.precision, sc.recall, sc.f1, sc.matches, sc.predicted, sc.truth);
        evaluation = {{"iou_min", config.iou_min},
                      {"precision", sc.precision},
                      {"recall", sc.recall},
                      {"f1", sc.f1},
                      {"matches", sc.matches},
                      {"predicted", sc.predicted},
                      {"truth", sc.truth}};
    }

    r.json = Json{{"format", "deskmon-report"},
                  {"format_version", 1},
                  {"session",
                   {{"session_id", m.session_id},
                    {"user_id", m.user_id ? Json(*m.user_id) : Json(nullptr)},
                    {"cheater_flag", m.cheater_flag},
                    {"start_time_us", m.context.start_time},
                    {"duration_s", secs(m.session_end())},
                    {"streams", streams}}},
                  {"tasks", tasks},
                  {"detections", dets},
                  {"notes", detections.notes},
                  {"gaps", gaps},
                  {"evaluation", evaluation}};
    return r;
}

std::vector<challenge::DetectionInterval> detections_from_json(const Json& sidecar)
{
    std::vector<challenge::DetectionInterval> out;
    for (const auto& d : sidecar.at("detections")) {
        challenge::DetectionInterval det;
        det.start = SessionTime{d.at("start_us").get<std::int64_t>()};
        det.end = SessionTime{d.at("end_us").get<std::int64_t>()};
        det.confidence = d.at("confidence").get<double>();
        for (const auto& rule : d.at("rules")) det.rules.push_back(challenge::parse_rule(rule.get<std::string>()));
        out.push_back(std::move(det));
    }
    return out;
}

}  // namespace deskmon::report
