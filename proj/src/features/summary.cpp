#include "deskmon/features/summary.hpp"

#include <cmath>
#include <limits>
#include <numeric>

namespace deskmon::features {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

template <class T, class F>
double mean_of(const std::vector<T>& v, F field)
{
    if (v.empty()) return kNaN;
    double s = 0;
    for (const auto& x : v) s += field(x);
    return s / static_cast<double>(v.size());
}

template <class Sample>
std::vector<Sample> window_slice(const sync::SyncedSession& s, StreamKind kind, SessionTime start, SessionTime end,
                                 bool& present)
{
    const auto* all = first_samples<Sample>(s.manifest, kind);
    present = all != nullptr;
    return all ? sync::slice(*all, start, end) : std::vector<Sample>{};
}

}  // namespace

void FeatureVector::add(std::string name, double value)
{
    names.push_back(std::move(name));
    values.push_back(value);
}

double FeatureVector::get(std::string_view name) const
{
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (names[i] == name) return values[i];
    }
    return kNaN;
}

FeatureVector summarize_interval(const sync::SyncedSession& session, SessionTime start, SessionTime end,
                                 FeatureSet set, const SummaryConfig& config)
{
    FeatureVector fv;
    const double width_s = static_cast<double>(end.micros - start.micros) * 1e-6;

    bool have_keys = false;
    const auto keys = window_slice<KeyEvent>(session, StreamKind::keyboard, start, end, have_keys);
    const auto kf = keystroke_features(keys);
    fv.add("key_press_rate", have_keys ? static_cast<double>(kf.presses) / width_s : kNaN);
    fv.add("key_mean_hold_ms", mean_of(kf.hold_times, [](const HoldTime& h) { return h.ms; }));
    fv.add("key_mean_pp_ms", mean_of(kf.digraph_pp, [](const DigraphLatency& d) { return d.ms; }));
    fv.add("key_backspace_rate", have_keys ? kf.backspace_rate : kNaN);

    bool have_mouse = false;
    const auto mouse = window_slice<MouseEvent>(session, StreamKind::mouse, start, end, have_mouse);
    const auto mf = mouse_features(mouse, config.mouse);
    fv.add("mouse_mean_speed_px_s", mean_of(mf.velocities, [](const TimedRate& r) { return r.value; }));
    fv.add("mouse_path_length_px", have_mouse ? mf.path_length : kNaN);
    fv.add("mouse_idle_fraction", have_mouse ? mf.idle_fraction : kNaN);
    fv.add("mouse_clicks", have_mouse ? static_cast<double>(mf.click_durations_ms.size()) : kNaN);
    fv.add("mouse_wheel_events", have_mouse ? static_cast<double>(mf.wheel_events) : kNaN);
    fv.add("mouse_mean_curvature", have_mouse ? mf.mean_curvature : kNaN);

    bool have_pose = false;
    const auto pose = window_slice<HeadPoseSample>(session, StreamKind::head_pose, start, end, have_pose);
    fv.add("head_mean_pitch_deg", mean_of(pose, [](const HeadPoseSample& p) { return p.pitch; }));
    fv.add("head_mean_abs_yaw_deg", mean_of(pose, [](const HeadPoseSample& p) { return std::abs(p.yaw); }));

    bool have_face = false;
    const auto face = window_slice<FaceSample>(session, StreamKind::face_biometrics, start, end, have_face);
    fv.add("face_present_fraction", mean_of(face, [](const FaceSample& f) { return f.face_present ? 1.0 : 0.0; }));
    std::vector<FaceSample> present;
    for (const auto& f : face) {
        if (f.face_present) present.push_back(f);
    }
    fv.add("face_mean_size_px", mean_of(present, [](const FaceSample& f) { return f.face_size_px; }));

    if (set == FeatureSet::advanced) {
        bool have_eeg = false, have_wear = false;
        const auto eeg = window_slice<EEGSample>(session, StreamKind::eeg_band, start, end, have_eeg);
        const auto wear = window_slice<WearableSample>(session, StreamKind::smartwatch, start, end, have_wear);
        const auto pa = physio_aggregate(eeg, wear, start, end, config.physio);
        fv.add("eeg_mean_attention", pa.mean_attention.value_or(kNaN));
        fv.add("eeg_mean_meditation", pa.mean_meditation.value_or(kNaN));
        for (std::size_t b = 0; b < 5; ++b) {
            fv.add("eeg_" + session.manifest.eeg_band_labels[b] + "_mean",
                   pa.band_power_means ? (*pa.band_power_means)[b] : kNaN);
        }
        fv.add("eeg_blinks", pa.blink_count ? static_cast<double>(*pa.blink_count) : kNaN);
        fv.add("hr_mean_bpm", pa.mean_hr_bpm.value_or(kNaN));
        fv.add("hr_std_bpm", pa.std_hr_bpm.value_or(kNaN));
    }
    return fv;
}

}  // namespace deskmon::features
