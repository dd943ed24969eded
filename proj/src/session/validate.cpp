#include "deskmon/session/validate.hpp"

#include "deskmon/sync/timeline.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

namespace deskmon {
namespace {

class Collector {
public:
    explicit Collector(std::vector<Violation>& out) : out_(out) {}

    void add(std::string where, std::string message) { out_.push_back({std::move(where), std::move(message)}); }

private:
    std::vector<Violation>& out_;
};

bool finite(double v) { return std::isfinite(v); }

std::string at(const std::string& base, std::size_t i)
{
    return base + ".samples[" + std::to_string(i) + "]";
}

struct StreamCheck {
    Collector& c;
    const StreamDescriptor& d;
    std::string base;
    SampleCheckOptions opt;

    template <class Sample>
    void timing(const std::vector<Sample>& samples)
    {
        for (std::size_t i = 0; i < samples.size(); ++i) {
            if (i > 0 && samples[i].raw_ts < samples[i - 1].raw_ts) {
                c.add(at(base, i), "raw_ts decreases within stream");
            }
            if (opt.check_clock && sync::to_session_time(samples[i].raw_ts, d).clamped) {
                c.add(at(base, i), "sample maps before session epoch");
            }
        }
    }

    void operator()(const std::monostate&) {}

    void operator()(const std::vector<KeyEvent>& ev)
    {
        timing(ev);
        std::map<std::string, int> open;
        for (std::size_t i = 0; i < ev.size(); ++i) {
            if (ev[i].key_code.empty()) c.add(at(base, i), "empty key_code");
            if (ev[i].action == KeyAction::press) {
                ++open[ev[i].key_code];
            } else if (open[ev[i].key_code] > 0) {
                open[ev[i].key_code] = 0;
            } else if (opt.check_pairing) {
                c.add(at(base, i), "key release without prior press of '" + ev[i].key_code + "'");
            }
        }
    }

    void operator()(const std::vector<MouseEvent>& ev)
    {
        timing(ev);
        std::map<MouseButton, bool> down;
        for (std::size_t i = 0; i < ev.size(); ++i) {
            const auto& e = ev[i];
            const auto& screen = opt.screen;
            if (screen && (e.x < 0 || e.y < 0 || e.x >= screen->width || e.y >= screen->height)) {
                c.add(at(base, i), "mouse position outside screen");
            }
            if ((e.wheel_delta != 0) != (e.kind == MouseKind::wheel)) {
                c.add(at(base, i), "wheel_delta must be non-zero exactly for wheel events");
            }
            const bool needs_button =
                e.kind == MouseKind::press || e.kind == MouseKind::release || e.kind == MouseKind::drag;
            if ((e.button != MouseButton::none) != needs_button) {
                c.add(at(base, i), "button must be set exactly for press, release and drag events");
            }
            if (e.kind == MouseKind::press && e.button != MouseButton::none) down[e.button] = true;
            if (e.kind == MouseKind::release && e.button != MouseButton::none) {
                if (!down[e.button] && opt.check_pairing) c.add(at(base, i), "mouse release without prior press");
                down[e.button] = false;
            }
        }
    }

    void operator()(const std::vector<EEGSample>& ev)
    {
        timing(ev);
        for (std::size_t i = 0; i < ev.size(); ++i) {
            const auto& e = ev[i];
            for (double p : e.band_power) {
                if (!finite(p) || p < 0) {
                    c.add(at(base, i), "band power must be finite and >= 0");
                    break;
                }
            }
            if (!finite(e.attention) || e.attention < 0 || e.attention > 100) {
                c.add(at(base, i), "attention out of [0,100]");
            }
            if (!finite(e.meditation) || e.meditation < 0 || e.meditation > 100) {
                c.add(at(base, i), "meditation out of [0,100]");
            }
            if (e.blink_strength && (!finite(*e.blink_strength) || *e.blink_strength < 0)) {
                c.add(at(base, i), "blink_strength must be >= 0");
            }
        }
    }

    void operator()(const std::vector<WearableSample>& ev)
    {
        timing(ev);
        for (std::size_t i = 0; i < ev.size(); ++i) {
            const auto& e = ev[i];
            if (e.heart_rate_bpm && !(*e.heart_rate_bpm > 20 && *e.heart_rate_bpm < 250)) {
                c.add(at(base, i), "heart rate out of (20,250)");
            }
            for (const Vec3* v : {&e.accel, &e.gyro, &e.mag}) {
                if (!finite(v->x) || !finite(v->y) || !finite(v->z)) {
                    c.add(at(base, i), "inertial value not finite");
                    break;
                }
            }
        }
    }

    void operator()(const std::vector<HeadPoseSample>& ev)
    {
        timing(ev);
        for (std::size_t i = 0; i < ev.size(); ++i) {
            for (double a : {ev[i].pitch, ev[i].roll, ev[i].yaw}) {
                if (!finite(a) || a < -180 || a > 180) {
                    c.add(at(base, i), "head pose angle out of [-180,180]");
                    break;
                }
            }
        }
    }

    void operator()(const std::vector<FaceSample>& ev)
    {
        timing(ev);
        for (std::size_t i = 0; i < ev.size(); ++i) {
            if (!finite(ev[i].face_size_px) || ev[i].face_size_px < 0) c.add(at(base, i), "face size must be >= 0");
            if (!finite(ev[i].auth_score) || ev[i].auth_score < 0 || ev[i].auth_score > 1) {
                c.add(at(base, i), "auth_score out of [0,1]");
            }
        }
    }

    void operator()(const std::vector<ContextRecord>& ev) { timing(ev); }
};

void check_context(Collector& c, const ContextSnapshot& ctx)
{
    if (ctx.finish_time < ctx.start_time) c.add("context", "finish_time before start_time");
    if (ctx.free_memory > ctx.main_memory) c.add("context", "free_memory exceeds main_memory");
    if (!is_valid_mac(ctx.mac)) c.add("context.mac", "MAC must be 6 colon-separated hex octets");
    if (ctx.screen_resolution.width <= 0 || ctx.screen_resolution.height <= 0) {
        c.add("context.screen_resolution", "screen resolution must be positive");
    }
}

void check_streams(Collector& c, const SessionManifest& m)
{
    std::set<std::string> ids;
    for (const auto& s : m.streams) {
        const auto& d = s.descriptor;
        const std::string base = "streams[" + d.stream_id + "]";
        if (!is_valid_stream_id(d.stream_id)) c.add(base, "stream_id must match [A-Za-z0-9_.-]+");
        if (!ids.insert(d.stream_id).second) c.add(base, "duplicate stream_id");
        if (d.nominal_rate_hz && !(*d.nominal_rate_hz > 0)) c.add(base, "nominal_rate_hz must be > 0");
        if (!finite(d.clock_drift_ppm)) c.add(base, "clock_drift_ppm not finite");

        if (is_external_kind(d.kind)) {
            if (d.payload != PayloadKind::external_file) c.add(base, "media kinds must use an external_file payload");
            if (!d.media_file || d.media_file->empty()) c.add(base, "external_file payload needs a media_file");
            if (!std::holds_alternative<std::monostate>(s.samples)) c.add(base, "media stream carries inline samples");
            continue;
        }
        if (d.payload != PayloadKind::inline_samples) c.add(base, "sensor kinds must use inline samples");
        if (d.media_file) c.add(base, "inline stream must not reference a media file");
        if (s.samples.index() != empty_series_for(d.kind).index()) {
            c.add(base, "sample type does not match stream kind");
            continue;
        }
        std::visit(StreamCheck{c, d, base, {m.context.screen_resolution, true, true}}, s.samples);
    }
}

}  // namespace

ValidationReport validate_series(const StreamDescriptor& descriptor, const SampleSeries& samples,
                                 const SampleCheckOptions& options)
{
    ValidationReport report;
    Collector c(report.violations);
    const std::string base = "streams[" + descriptor.stream_id + "]";
    if (samples.index() != empty_series_for(descriptor.kind).index()) {
        c.add(base, "sample type does not match stream kind");
        return report;
    }
    std::visit(StreamCheck{c, descriptor, base, options}, samples);
    return report;
}

namespace {

void check_tasks(Collector& c, const SessionManifest& m)
{
    std::set<std::string> ids;
    for (const auto& t : m.tasks) {
        const std::string base = "tasks[" + t.task_id + "]";
        if (!ids.insert(t.task_id).second) c.add(base, "duplicate task_id");
        if (!(t.end > t.start)) c.add(base, "task end must be after start");
        const double expected = static_cast<double>(t.end.micros - t.start.micros) * 1e-6;
        if (!finite(t.duration_s) || std::abs(t.duration_s - expected) > 1e-6) {
            c.add(base, "duration does not equal end - start");
        }
        if (!finite(t.accuracy) || t.accuracy < 0 || t.accuracy > 1) c.add(base, "accuracy out of [0,1]");
    }
    std::vector<const TaskRecord*> sorted;
    for (const auto& t : m.tasks) sorted.push_back(&t);
    std::stable_sort(sorted.begin(), sorted.end(), [](auto* a, auto* b) { return a->start < b->start; });
    for (std::size_t i = 1; i < sorted.size(); ++i) {
        if (sorted[i]->start < sorted[i - 1]->end) {
            c.add("tasks[" + sorted[i]->task_id + "]", "overlapping tasks");
        }
    }
}

void check_labels(Collector& c, const SessionManifest& m)
{
    const SessionTime end = m.session_end();
    for (std::size_t i = 0; i < m.anomaly_labels.size(); ++i) {
        const auto& l = m.anomaly_labels[i];
        const std::string base = "anomaly_labels[" + std::to_string(i) + "]";
        if (!(l.end > l.start)) c.add(base, "label end must be after start");
        if (l.start.micros < 0 || l.end > end) c.add(base, "label outside session bounds");
    }
    if (m.cheater_flag != !m.anomaly_labels.empty()) {
        c.add("cheater_flag", "cheater_flag must be true exactly when anomaly labels exist");
    }
}

}  // namespace

bool is_valid_stream_id(std::string_view id)
{
    if (id.empty() || id.front() == '.') return false;
    return std::all_of(id.begin(), id.end(), [](unsigned char ch) {
        return std::isalnum(ch) || ch == '_' || ch == '-' || ch == '.';
    });
}

bool is_valid_mac(std::string_view mac)
{
    if (mac.size() != 17) return false;
    for (std::size_t i = 0; i < mac.size(); ++i) {
        const unsigned char ch = static_cast<unsigned char>(mac[i]);
        if (i % 3 == 2) {
            if (ch != ':') return false;
        } else if (!std::isxdigit(ch)) {
            return false;
        }
    }
    return true;
}

std::string ValidationReport::to_string() const
{
    std::ostringstream os;
    for (const auto& v : violations) os << v.where << ": " << v.message << '\n';
    return os.str();
}

ValidationReport validate_manifest(const SessionManifest& m)
{
    ValidationReport report;
    Collector c(report.violations);
    if (m.session_id.empty()) c.add("session_id", "session_id must not be empty");
    if (m.demographics.age <= 0) c.add("demographics.age", "age must be > 0");
    for (const auto& label : m.eeg_band_labels) {
        if (label.empty()) c.add("eeg_band_labels", "band labels must not be empty");
    }
    check_context(c, m.context);
    check_streams(c, m);
    check_tasks(c, m);
    check_labels(c, m);
    return report;
}

}  // namespace deskmon
