#include "deskmon/synth/session_gen.hpp"

#include "deskmon/features/fixed_text.hpp"
#include "deskmon/features/keystroke.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <map>

namespace deskmon::synth {
namespace {

using Micros = std::int64_t;

constexpr Micros kMs = 1000;
constexpr Micros kSec = kMicrosPerSecond;

Micros us(double seconds)
{
    return seconds_to_micros(seconds);
}

constexpr std::array<std::string_view, 48> kWords{
    "the",    "exam",  "answer", "question", "student", "online",  "course",  "teacher", "write",  "about",
    "because", "there", "which",  "would",    "their",   "other",   "after",   "first",   "these",  "think",
    "where",  "being", "every",  "great",    "might",   "shall",   "still",   "those",   "while",  "water",
    "light",  "house", "world",  "school",   "people",  "number",  "system",  "program", "during", "result",
    "data",   "time",  "year",   "work",     "learn",   "study",   "simple",  "common"};

/// Anomaly intervals in micros, used to keep input out of them.
class Blocks {
public:
    explicit Blocks(const AnomalyPlan& plan)
    {
        for (const auto& a : plan.intervals) spans_.push_back({us(a.start_s), us(a.start_s + a.duration_s)});
        std::sort(spans_.begin(), spans_.end());
    }

    /// End of the first blocked span touching [from, to], if any.
    std::optional<Micros> hit(Micros from, Micros to) const
    {
        for (const auto& [a, b] : spans_) {
            if (a <= to && b >= from) return b;
        }
        return std::nullopt;
    }

    const AnomalyInterval* find(const AnomalyPlan& plan, Micros t) const
    {
        for (const auto& a : plan.intervals) {
            if (t >= us(a.start_s) && t < us(a.start_s + a.duration_s)) return &a;
        }
        return nullptr;
    }

private:
    std::vector<std::pair<Micros, Micros>> spans_;
};

struct Keystroke {
    std::string key;
    Micros press = 0;
    Micros release = 0;
};

class Typist {
public:
    Typist(const UserBehaviorProfile& p, Rng& rng) : p_(p), rng_(rng), hold_(hold_bounds(p)) {}

    /// Key codes for `text` with occasional wrong letters corrected by Backspace.
    std::vector<std::string> keys_for(std::string_view text)
    {
        std::vector<std::string> keys;
        for (char c : text) {
            if (c >= 'a' && c <= 'z' && rng_.bernoulli(p_.error_rate)) {
                char wrong = static_cast<char>('a' + rng_.uniform_int(0, 25));
                if (wrong == c) wrong = c == 'z' ? 'a' : static_cast<char>(c + 1);
                keys.push_back(features::key_code_for(wrong));
                keys.emplace_back(features::kBackspace);
            }
            keys.push_back(features::key_code_for(c));
        }
        return keys;
    }

    /// Plans the keys; the first press is at `start`, or one digraph latency
    /// after the previous press when `start` is unset.
    std::vector<Keystroke> plan(const std::vector<std::string>& keys, std::optional<Micros> start)
    {
        std::vector<Keystroke> out;
        std::map<std::string, Micros> releases = last_release_;
        std::string prev = prev_key_;
        Micros prev_press = last_press_;
        for (std::size_t i = 0; i < keys.size(); ++i) {
            const auto& key = keys[i];
            Micros press;
            if (i == 0 && start) {
                press = *start;
            } else {
                const auto& d = p_.digraph[digraph_class(prev, key)];
                const double pp = rng_.truncated_normal(d.mean_pp_ms, d.sd_pp_ms, std::max(20.0, d.mean_pp_ms - 4 * d.sd_pp_ms),
                                                        d.mean_pp_ms + 4 * d.sd_pp_ms);
                press = prev_press + us(pp / 1000.0);
            }
            if (auto it = releases.find(key); it != releases.end()) press = std::max(press, it->second + 5 * kMs);
            const double hold = rng_.truncated_normal(p_.mean_hold_ms, p_.sd_hold_ms, hold_.first, hold_.second);
            const Micros release = press + std::max<Micros>(1, us(hold / 1000.0));
            out.push_back({key, press, release});
            releases[key] = release;
            prev = key;
            prev_press = press;
        }
        return out;
    }

    void commit(const std::vector<Keystroke>& strokes, std::vector<KeyEvent>& events)
    {
        for (const auto& s : strokes) {
            events.push_back({RawTime{s.press}, s.key, KeyAction::press});
            events.push_back({RawTime{s.release}, s.key, KeyAction::release});
            last_release_[s.key] = s.release;
            prev_key_ = s.key;
            last_press_ = s.press;
        }
    }

    Micros last_press() const { return last_press_; }

private:
    const UserBehaviorProfile& p_;
    Rng& rng_;
    std::pair<double, double> hold_;
    std::map<std::string, Micros> last_release_;
    std::string prev_key_;
    Micros last_press_ = 0;
};

Micros span_end(const std::vector<Keystroke>& strokes)
{
    Micros end = 0;
    for (const auto& s : strokes) end = std::max(end, s.release);
    return end;
}

class Pointer {
public:
    Pointer(const UserBehaviorProfile& p, Rng& rng, ScreenResolution screen)
        : p_(p), rng_(rng), screen_(screen), x_(screen.width / 2), y_(screen.height / 2)
    {
    }

    Micros move_duration(int x1, int y1)
    {
        const double dist = std::hypot(x1 - x_, y1 - y_);
        const double speed = rng_.truncated_normal(p_.mouse_speed_px_s, p_.sd_mouse_speed_px_s,
                                                   0.25 * p_.mouse_speed_px_s, 2.0 * p_.mouse_speed_px_s);
        return us(std::clamp(dist / speed, 0.15, 1.2));
    }

    /// Minimum-jerk segment sampled no faster than the mouse rate; only
    /// position changes are emitted. Returns the end time.
    Micros move_to(int x1, int y1, Micros start, Micros duration, std::vector<MouseEvent>& out)
    {
        const Micros step = static_cast<Micros>(std::ceil(1e6 / kMouseRateHz));
        const int x0 = x_, y0 = y_;
        Micros t = std::max(start, last_ + step);
        const Micros t_begin = t;
        while (true) {
            const double tau = std::min(1.0, static_cast<double>(t - t_begin) / static_cast<double>(duration));
            const double s = tau * tau * tau * (10 - 15 * tau + 6 * tau * tau);
            const int x = clamp_x(static_cast<int>(std::lround(x0 + (x1 - x0) * s)));
            const int y = clamp_y(static_cast<int>(std::lround(y0 + (y1 - y0) * s)));
            if (x != x_ || y != y_) {
                out.push_back({RawTime{t}, MouseKind::move, x, y, MouseButton::none, 0});
                x_ = x;
                y_ = y;
                last_ = t;
            }
            if (tau >= 1.0) break;
            t += step;
        }
        return std::max(t, last_);
    }

    Micros click(Micros at, std::vector<MouseEvent>& out)
    {
        const Micros press = std::max(at, last_ + kMs);
        const Micros release = press + us(rng_.uniform(0.06, 0.14));
        out.push_back({RawTime{press}, MouseKind::press, x_, y_, MouseButton::left, 0});
        out.push_back({RawTime{release}, MouseKind::release, x_, y_, MouseButton::left, 0});
        last_ = release;
        return release;
    }

    Micros wheel(Micros at, std::vector<MouseEvent>& out)
    {
        const Micros t = std::max(at, last_ + kMs);
        out.push_back({RawTime{t}, MouseKind::wheel, x_, y_, MouseButton::none, rng_.bernoulli(0.5) ? 120 : -120});
        last_ = t;
        return t;
    }

    Micros last() const { return last_; }

    int clamp_x(int x) const { return std::clamp(x, 0, screen_.width - 1); }
    int clamp_y(int y) const { return std::clamp(y, 0, screen_.height - 1); }

private:
    const UserBehaviorProfile& p_;
    Rng& rng_;
    ScreenResolution screen_;
    int x_;
    int y_;
    Micros last_ = -kSec;
};

struct Generator {
    const UserBehaviorProfile& profile;
    const TaskPlan& plan;
    const AnomalyPlan& anomalies;
    const SessionOptions& options;
    Rng rng;
    Blocks blocks;
    ScreenResolution screen{1920, 1080};
    std::vector<KeyEvent> keys;
    std::vector<MouseEvent> mouse;
    Typist typist;
    Pointer pointer;

    Generator(const UserBehaviorProfile& p, const TaskPlan& tp, const AnomalyPlan& ap, const SessionOptions& o,
              std::uint64_t seed)
        : profile(p), plan(tp), anomalies(ap), options(o), rng(mix_seed(seed, 0x5e55)), blocks(ap),
          typist(p, rng), pointer(p, rng, screen)
    {
    }

    /// Moves to (x, y) and clicks, starting no earlier than `at`, skipping past
    /// anomalies. Returns the end time, or nullopt when it would pass `limit`.
    std::optional<Micros> point_and_click(int x, int y, Micros at, Micros limit)
    {
        for (int attempt = 0; attempt < 8; ++attempt) {
            const Micros duration = pointer.move_duration(x, y);
            const Micros begin = std::max(at, pointer.last() + kMs);
            const Micros end = begin + duration + 300 * kMs;
            if (end >= limit) return std::nullopt;
            if (auto b = blocks.hit(begin, end)) {
                at = *b + us(rng.uniform(0.5, 1.5));
                continue;
            }
            const Micros arrived = pointer.move_to(x, y, begin, duration, mouse);
            return pointer.click(arrived + us(rng.uniform(0.05, 0.15)), mouse);
        }
        return std::nullopt;
    }

    /// Types words until `limit`; returns the typed text.
    std::string type_text(const std::vector<std::string>& chunks, Micros start, Micros limit, bool* stopped)
    {
        std::string typed;
        bool first = true;
        for (const auto& chunk : chunks) {
            auto strokes = typist.plan(typist.keys_for(chunk), first ? std::optional<Micros>(start) : std::nullopt);
            for (int attempt = 0; attempt < 8; ++attempt) {
                if (strokes.empty()) break;
                const Micros first = strokes.front().press;
                const Micros last = span_end(strokes);
                if (last >= limit) {
                    *stopped = true;
                    return typed;
                }
                const auto b = blocks.hit(first, last);
                if (!b) break;
                strokes = typist.plan(typist.keys_for(chunk), *b + us(rng.uniform(0.5, 1.5)));
            }
            typist.commit(strokes, keys);
            typed += chunk;
            first = false;
        }
        *stopped = false;
        return typed;
    }

    std::vector<std::string> sentence()
    {
        const auto n = rng.uniform_int(5, 12);
        std::vector<std::string> chunks;
        for (std::int64_t i = 0; i < n; ++i) {
            std::string w(kWords[static_cast<std::size_t>(rng.uniform_int(0, kWords.size() - 1))]);
            w += i + 1 == n ? ". " : " ";
            chunks.push_back(std::move(w));
        }
        return chunks;
    }

    std::string writing_task(Micros start, Micros end)
    {
        const Micros limit = end - kSec;
        auto clicked = point_and_click(900 + static_cast<int>(rng.uniform_int(-50, 50)), 500, start + 200 * kMs, limit);
        Micros t = clicked.value_or(start) + us(rng.uniform(0.3, 1.0));
        std::string answer;
        while (true) {
            bool stopped = false;
            answer += type_text(sentence(), t, limit, &stopped);
            if (stopped) break;
            t = std::max(typist.last_press(), pointer.last()) + us(rng.uniform(0.5, options.max_writing_pause_s));
        }
        while (!answer.empty() && answer.back() == ' ') answer.pop_back();
        return answer;
    }

    std::string enrollment_task(Micros start, Micros end)
    {
        const Micros limit = end - kSec;
        Micros t = start + 200 * kMs;
        std::vector<std::string> chunks;
        std::string_view text = kEnrollmentText;
        for (std::size_t pos = 0; pos < text.size();) {
            auto sp = text.find(' ', pos);
            const auto stop = sp == std::string_view::npos ? text.size() : sp + 1;
            chunks.emplace_back(text.substr(pos, stop - pos));
            pos = stop;
        }
        std::string answer;
        while (true) {
            auto clicked = point_and_click(700, 300 + static_cast<int>(rng.uniform_int(0, 300)), t, limit);
            if (!clicked) break;
            bool stopped = false;
            const auto typed = type_text(chunks, *clicked + us(rng.uniform(0.3, 0.8)), limit, &stopped);
            if (!typed.empty()) answer = typed;
            if (stopped) break;
            t = typist.last_press() + us(rng.uniform(1.0, 2.0));
        }
        return answer;
    }

    std::string multiple_choice_task(Micros start, Micros end)
    {
        const Micros limit = end - kSec;
        Micros t = start + 200 * kMs;
        std::string answers;
        while (true) {
            const double think = rng.uniform(1.0, 4.0);
            const auto wheels = rng.uniform_int(0, 3);
            for (std::int64_t w = 0; w < wheels; ++w) {
                const Micros at = t + us(think * static_cast<double>(w + 1) / static_cast<double>(wheels + 2));
                if (at < limit && !blocks.hit(at, at)) pointer.wheel(at, mouse);
            }
            const auto choice = rng.uniform_int(0, 3);
            auto done = point_and_click(800 + static_cast<int>(rng.uniform_int(-40, 40)),
                                        350 + 120 * static_cast<int>(choice), t + us(think), limit);
            if (!done) break;
            answers += static_cast<char>('A' + choice);
            t = *done;
        }
        return answers;
    }
};

void check_plan(const TaskPlan& plan, const AnomalyPlan& anomalies)
{
    if (plan.tasks.empty()) throw PlanError("task plan is empty");
    for (const auto& t : plan.tasks) {
        if (!(t.duration_s > 0)) throw PlanError("task " + t.task_id + " has non-positive duration");
    }
    auto sorted = anomalies.intervals;
    std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.start_s < b.start_s; });
    const double length = plan.session_length_s();
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const auto& a = sorted[i];
        if (!(a.duration_s > 0) || a.start_s < 0 || a.start_s + a.duration_s > length) {
            throw PlanError(fmt::format("anomaly interval [{}, {}] outside the session", a.start_s, a.start_s + a.duration_s));
        }
        if (i > 0 && a.start_s < sorted[i - 1].start_s + sorted[i - 1].duration_s) {
            throw PlanError(fmt::format("overlapping anomaly intervals at {} s", a.start_s));
        }
    }
}

/// Sorts and makes timestamps strictly increasing.
template <class Sample>
void finalize(std::vector<Sample>& samples)
{
    std::stable_sort(samples.begin(), samples.end(), [](const Sample& a, const Sample& b) { return a.raw_ts < b.raw_ts; });
    for (std::size_t i = 1; i < samples.size(); ++i) {
        if (samples[i].raw_ts.micros <= samples[i - 1].raw_ts.micros) samples[i].raw_ts.micros = samples[i - 1].raw_ts.micros + 1;
    }
}

double ar_step(double x, double phi, double sd, Rng& rng)
{
    return phi * x + rng.normal(0.0, sd * std::sqrt(1 - phi * phi));
}

}  // namespace

TaskPlan TaskPlan::default_plan()
{
    TaskPlan p;
    p.tasks.push_back({"enroll", TaskGroup::enrollment, 40.0});
    for (int i = 1; i <= 4; ++i) p.tasks.push_back({"write" + std::to_string(i), TaskGroup::writing, 50.0});
    for (int i = 1; i <= 3; ++i) p.tasks.push_back({"mc" + std::to_string(i), TaskGroup::multiple_choice, 30.0});
    return p;
}

double TaskPlan::task_start_s(std::size_t i) const
{
    double t = lead_s;
    for (std::size_t j = 0; j < i && j < tasks.size(); ++j) t += tasks[j].duration_s + transition_s;
    return t;
}

double TaskPlan::session_length_s() const
{
    return task_start_s(tasks.size());
}

AnomalyInterval place_in_writing_task(const TaskPlan& plan, AnomalyKind kind, double duration_s, Rng& rng,
                                      double margin_s)
{
    std::vector<std::size_t> candidates;
    for (std::size_t i = 0; i < plan.tasks.size(); ++i) {
        if (plan.tasks[i].group == TaskGroup::writing && plan.tasks[i].duration_s >= duration_s + 2 * margin_s) {
            candidates.push_back(i);
        }
    }
    if (candidates.empty()) throw PlanError("no writing task long enough for the anomaly interval");
    const auto i = candidates[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(candidates.size()) - 1))];
    const double slack = plan.tasks[i].duration_s - duration_s - 2 * margin_s;
    return {kind, plan.task_start_s(i) + margin_s + rng.uniform(0.0, slack), duration_s};
}

std::vector<EEGSample> generate_eeg(const UserBehaviorProfile& profile, double duration_s, const AnomalyPlan& anomalies,
                                    double attention_drop, Rng& rng)
{
    const Blocks blocks(anomalies);
    static constexpr std::array<double, 5> kBandMeans{120000.0, 60000.0, 30000.0, 20000.0, 8000.0};
    std::vector<EEGSample> out;
    const auto n = static_cast<std::size_t>(std::ceil(duration_s * kEegRateHz));
    out.reserve(n);
    double att = 0, med = 0;
    for (std::size_t k = 0; k < n; ++k) {
        const Micros t = static_cast<Micros>(k) * kSec + rng.uniform_int(0, 5000);
        if (t >= us(duration_s)) break;
        att = ar_step(att, 0.8, profile.sd_attention, rng);
        med = ar_step(med, 0.8, profile.sd_attention, rng);
        EEGSample s;
        s.raw_ts = RawTime{t};
        double a = profile.baseline_attention + att;
        if (blocks.find(anomalies, t)) a -= attention_drop;
        s.attention = std::clamp(a, 0.0, 100.0);
        s.meditation = std::clamp(100.0 - profile.baseline_attention + med, 0.0, 100.0);
        for (std::size_t b = 0; b < 5; ++b) s.band_power[b] = kBandMeans[b] * std::exp(rng.normal(0.0, 0.3));
        if (rng.bernoulli(0.2)) s.blink_strength = rng.uniform(30.0, 90.0);
        out.push_back(s);
    }
    return out;
}

SessionManifest generate_session(const UserBehaviorProfile& profile, const TaskPlan& plan, const AnomalyPlan& anomalies,
                                 std::uint64_t seed, const SessionOptions& options)
{
    check_plan(plan, anomalies);
    Generator g(profile, plan, anomalies, options, seed);
    Rng& rng = g.rng;
    const double length_s = plan.session_length_s();
    const Micros length = us(length_s);

    SessionManifest m;
    m.session_id = options.session_id;
    m.identity = options.identity;
    if (options.demographics) {
        m.demographics = *options.demographics;
    } else {
        m.demographics.age = static_cast<int>(rng.uniform_int(18, 35));
        m.demographics.gender = rng.bernoulli(0.5) ? "female" : "male";
        m.demographics.handedness = rng.bernoulli(0.9) ? Handedness::right : Handedness::left;
    }

    auto& ctx = m.context;
    ctx.computer_name = fmt::format("desk-{:04}", seed % 10000);
    ctx.private_ip = fmt::format("192.168.{}.{}", rng.uniform_int(0, 9), rng.uniform_int(2, 254));
    ctx.public_ip = fmt::format("203.0.113.{}", rng.uniform_int(1, 254));
    ctx.mac = fmt::format("02:{:02x}:{:02x}:{:02x}:{:02x}:{:02x}", rng.uniform_int(0, 255), rng.uniform_int(0, 255),
                          rng.uniform_int(0, 255), rng.uniform_int(0, 255), rng.uniform_int(0, 255));
    ctx.os = "Windows 10";
    ctx.architecture = "x86_64";
    ctx.keyboard_language = "en-US";
    ctx.screen_resolution = g.screen;
    ctx.main_memory = 16ULL << 30;
    ctx.free_memory = static_cast<std::uint64_t>(rng.uniform_int(2, 10)) << 30;
    ctx.start_time = 1'700'000'000'000'000 + rng.uniform_int(0, 30'000'000) * kSec;
    ctx.finish_time = ctx.start_time + length;

    // Input streams, task by task.
    for (std::size_t i = 0; i < plan.tasks.size(); ++i) {
        const auto& spec = plan.tasks[i];
        const Micros start = us(plan.task_start_s(i));
        const Micros end = start + us(spec.duration_s);
        std::string answer;
        switch (spec.group) {
        case TaskGroup::enrollment: answer = g.enrollment_task(start, end); break;
        case TaskGroup::writing: answer = g.writing_task(start, end); break;
        case TaskGroup::multiple_choice: answer = g.multiple_choice_task(start, end); break;
        }
        const double accuracy = spec.group == TaskGroup::enrollment
                                    ? 1.0
                                    : std::clamp(rng.normal(profile.mean_accuracy, 0.1), 0.0, 1.0);
        m.tasks.push_back(make_task(spec.task_id, spec.group, SessionTime{start}, SessionTime{end}, accuracy));
        ctx.per_task_time.push_back({spec.task_id, spec.duration_s});
        ctx.answers.push_back({spec.task_id, answer});
        // Transition: the "next" button.
        g.point_and_click(1700, 1000, end + 100 * kMs, end + us(plan.transition_s));
    }
    finalize(g.keys);
    finalize(g.mouse);

    for (const auto& a : anomalies.intervals) {
        m.anomaly_labels.push_back({SessionTime{us(a.start_s)}, SessionTime{us(a.start_s + a.duration_s)}, a.kind});
    }
    std::sort(m.anomaly_labels.begin(), m.anomaly_labels.end(),
              [](const auto& a, const auto& b) { return a.start < b.start; });
    m.cheater_flag = !m.anomaly_labels.empty();

    auto add_stream = [&](std::string id, StreamKind kind, std::optional<double> rate, SampleSeries samples) {
        Stream s;
        s.descriptor.stream_id = std::move(id);
        s.descriptor.kind = kind;
        s.descriptor.nominal_rate_hz = rate;
        s.samples = std::move(samples);
        m.streams.push_back(std::move(s));
    };

    add_stream("keyboard", StreamKind::keyboard, kKeyboardRateHz, std::move(g.keys));
    add_stream("mouse", StreamKind::mouse, kMouseRateHz, std::move(g.mouse));

    if (options.with_eeg) {
        Rng eeg_rng = rng.fork(1);
        add_stream("eeg", StreamKind::eeg_band, kEegRateHz,
                   generate_eeg(profile, length_s, anomalies, options.attention_drop, eeg_rng));
    }
    if (options.with_smartwatch) {
        Rng r = rng.fork(2);
        std::vector<WearableSample> out;
        const Micros step = kSec / 200;
        out.reserve(static_cast<std::size_t>(length / step) + 1);
        double hr = 0;
        for (Micros t = 0; t < length; t += step) {
            hr = ar_step(hr, 0.999, profile.sd_hr_bpm, r);
            WearableSample s;
            s.raw_ts = RawTime{t};
            s.heart_rate_bpm = std::clamp(profile.baseline_hr_bpm + hr, 40.0, 180.0);
            s.accel = {r.normal(0, 0.05), r.normal(0, 0.05), 9.81 + r.normal(0, 0.05)};
            s.gyro = {r.normal(0, 0.01), r.normal(0, 0.01), r.normal(0, 0.01)};
            s.mag = {30 + r.normal(0, 0.5), 5 + r.normal(0, 0.5), -40 + r.normal(0, 0.5)};
            out.push_back(s);
        }
        add_stream("smartwatch", StreamKind::smartwatch, kSmartwatchRateHz, std::move(out));
    }
    const Micros cam_step = kSec / 25;
    if (options.with_head_pose) {
        Rng r = rng.fork(3);
        std::vector<HeadPoseSample> out;
        double pitch = 0, yaw = 0;
        std::map<const AnomalyInterval*, double> yaw_sign;
        for (Micros t = 0; t < length; t += cam_step) {
            pitch = ar_step(pitch, 0.95, 3.0, r);
            yaw = ar_step(yaw, 0.95, 6.0, r);
            HeadPoseSample s{RawTime{t}, -5.0 + pitch, r.normal(0, 2.0), std::clamp(yaw, -30.0, 30.0)};
            if (const auto* a = g.blocks.find(anomalies, t)) {
                if (a->kind == AnomalyKind::absence) continue;
                if (a->kind == AnomalyKind::phone_use) s.pitch = -40.0 + pitch;
                if (a->kind == AnomalyKind::resource_use) {
                    auto [it, fresh] = yaw_sign.try_emplace(a, 0.0);
                    if (fresh) it->second = r.bernoulli(0.5) ? 1.0 : -1.0;
                    s.yaw = it->second * 60.0 + std::clamp(yaw, -10.0, 10.0);
                }
            }
            out.push_back(s);
        }
        add_stream("head_pose", StreamKind::head_pose, kCameraTrackRateHz, std::move(out));
    }
    if (options.with_face) {
        Rng r = rng.fork(4);
        std::vector<FaceSample> out;
        for (Micros t = 0; t < length; t += cam_step) {
            const auto* a = g.blocks.find(anomalies, t);
            if (a && a->kind == AnomalyKind::absence) {
                out.push_back({RawTime{t}, 0.0, 0.0, false});
            } else {
                out.push_back({RawTime{t}, std::max(0.0, r.normal(180.0, 5.0)), r.uniform(0.85, 0.99), true});
            }
        }
        add_stream("face", StreamKind::face_biometrics, kCameraTrackRateHz, std::move(out));
    }
    if (options.with_context_probe) {
        ContextSnapshot snap = ctx;
        snap.per_task_time.clear();
        snap.answers.clear();
        snap.finish_time = snap.start_time;
        add_stream("context", StreamKind::context_probe, std::nullopt,
                   std::vector<ContextRecord>{{RawTime{500 * kMs}, snap}});
    }

    for (auto& s : m.streams) {
        if (!options.random_clock_offsets) continue;
        const Micros base = rng.uniform_int(1'000'000'000, 100'000'000'000);
        s.descriptor.clock_offset_micros = -base;
        s.descriptor.clock_reference_raw_micros = base;
        std::visit(
            [base](auto& v) {
                if constexpr (!std::is_same_v<std::decay_t<decltype(v)>, std::monostate>) {
                    for (auto& x : v) x.raw_ts.micros += base;
                }
            },
            s.samples);
    }
    return m;
}

void to_json(Json& j, const TaskPlan& p)
{
    Json tasks = Json::array();
    for (const auto& t : p.tasks) {
        tasks.push_back({{"task_id", t.task_id}, {"group", to_string(t.group)}, {"duration_s", t.duration_s}});
    }
    j = Json{{"tasks", tasks}, {"lead_s", p.lead_s}, {"transition_s", p.transition_s}};
}

void from_json(const Json& j, TaskPlan& p)
{
    p.tasks.clear();
    for (const auto& t : j.at("tasks")) {
        p.tasks.push_back({t.at("task_id").get<std::string>(), parse_enum<TaskGroup>(t.at("group").get<std::string>()),
                           t.at("duration_s").get<double>()});
    }
    p.lead_s = j.value("lead_s", 2.0);
    p.transition_s = j.value("transition_s", 2.0);
}

}  // namespace deskmon::synth
