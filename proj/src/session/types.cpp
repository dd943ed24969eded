#include "deskmon/session/types.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace deskmon {
namespace {

template <class E, std::size_t N>
using NameTable = std::array<std::pair<E, std::string_view>, N>;

constexpr NameTable<Handedness, 2> kHandedness{{{Handedness::left, "left"}, {Handedness::right, "right"}}};

constexpr NameTable<KeyAction, 2> kKeyAction{{{KeyAction::press, "press"}, {KeyAction::release, "release"}}};

constexpr NameTable<MouseKind, 5> kMouseKind{{{MouseKind::move, "move"},
                                              {MouseKind::press, "press"},
                                              {MouseKind::release, "release"},
                                              {MouseKind::wheel, "wheel"},
                                              {MouseKind::drag, "drag"}}};

constexpr NameTable<MouseButton, 4> kMouseButton{{{MouseButton::none, "none"},
                                                  {MouseButton::left, "left"},
                                                  {MouseButton::right, "right"},
                                                  {MouseButton::middle, "middle"}}};

constexpr NameTable<TaskGroup, 3> kTaskGroup{{{TaskGroup::enrollment, "enrollment"},
                                              {TaskGroup::writing, "writing"},
                                              {TaskGroup::multiple_choice, "multiple_choice"}}};

constexpr NameTable<AnomalyKind, 4> kAnomalyKind{{{AnomalyKind::phone_use, "phone_use"},
                                                  {AnomalyKind::resource_use, "resource_use"},
                                                  {AnomalyKind::absence, "absence"},
                                                  {AnomalyKind::other, "other"}}};

constexpr NameTable<PayloadKind, 2> kPayloadKind{
    {{PayloadKind::inline_samples, "inline_samples"}, {PayloadKind::external_file, "external_file"}}};

constexpr NameTable<StreamKind, 14> kStreamKind{{{StreamKind::front_camera, "front_camera"},
                                                 {StreamKind::side_camera, "side_camera"},
                                                 {StreamKind::cenital_camera, "cenital_camera"},
                                                 {StreamKind::nir_camera, "nir_camera"},
                                                 {StreamKind::depth_camera, "depth_camera"},
                                                 {StreamKind::desktop_capture, "desktop_capture"},
                                                 {StreamKind::microphone, "microphone"},
                                                 {StreamKind::keyboard, "keyboard"},
                                                 {StreamKind::mouse, "mouse"},
                                                 {StreamKind::eeg_band, "eeg_band"},
                                                 {StreamKind::smartwatch, "smartwatch"},
                                                 {StreamKind::context_probe, "context_probe"},
                                                 {StreamKind::head_pose, "head_pose"},
                                                 {StreamKind::face_biometrics, "face_biometrics"}}};

template <class E, std::size_t N>
std::string_view lookup(const NameTable<E, N>& table, E v)
{
    for (const auto& [e, name] : table) {
        if (e == v) return name;
    }
    return "?";
}

template <class E, std::size_t N>
E reverse_lookup(const NameTable<E, N>& table, std::string_view text, std::string_view what)
{
    for (const auto& [e, name] : table) {
        if (name == text) return e;
    }
    throw UnknownEnumValue("unknown " + std::string(what) + " '" + std::string(text) + "'");
}

}  // namespace

std::string_view to_string(Handedness v) { return lookup(kHandedness, v); }
std::string_view to_string(KeyAction v) { return lookup(kKeyAction, v); }
std::string_view to_string(MouseKind v) { return lookup(kMouseKind, v); }
std::string_view to_string(MouseButton v) { return lookup(kMouseButton, v); }
std::string_view to_string(TaskGroup v) { return lookup(kTaskGroup, v); }
std::string_view to_string(AnomalyKind v) { return lookup(kAnomalyKind, v); }
std::string_view to_string(PayloadKind v) { return lookup(kPayloadKind, v); }
std::string_view to_string(StreamKind v) { return lookup(kStreamKind, v); }

template <>
Handedness parse_enum<Handedness>(std::string_view t) { return reverse_lookup(kHandedness, t, "handedness"); }
template <>
KeyAction parse_enum<KeyAction>(std::string_view t) { return reverse_lookup(kKeyAction, t, "key action"); }
template <>
MouseKind parse_enum<MouseKind>(std::string_view t) { return reverse_lookup(kMouseKind, t, "mouse kind"); }
template <>
MouseButton parse_enum<MouseButton>(std::string_view t) { return reverse_lookup(kMouseButton, t, "mouse button"); }
template <>
TaskGroup parse_enum<TaskGroup>(std::string_view t) { return reverse_lookup(kTaskGroup, t, "task group"); }
template <>
AnomalyKind parse_enum<AnomalyKind>(std::string_view t) { return reverse_lookup(kAnomalyKind, t, "anomaly kind"); }
template <>
PayloadKind parse_enum<PayloadKind>(std::string_view t) { return reverse_lookup(kPayloadKind, t, "payload kind"); }
template <>
StreamKind parse_enum<StreamKind>(std::string_view t) { return reverse_lookup(kStreamKind, t, "stream kind"); }

bool is_external_kind(StreamKind kind)
{
    switch (kind) {
    case StreamKind::front_camera:
    case StreamKind::side_camera:
    case StreamKind::cenital_camera:
    case StreamKind::nir_camera:
    case StreamKind::depth_camera:
    case StreamKind::desktop_capture:
    case StreamKind::microphone:
        return true;
    default:
        return false;
    }
}

bool is_event_kind(StreamKind kind)
{
    return kind == StreamKind::keyboard || kind == StreamKind::mouse || kind == StreamKind::context_probe;
}

std::string_view sample_type_name(const SampleSeries& series)
{
    struct Visitor {
        std::string_view operator()(const std::monostate&) const { return "none"; }
        std::string_view operator()(const std::vector<KeyEvent>&) const { return "key"; }
        std::string_view operator()(const std::vector<MouseEvent>&) const { return "mouse"; }
        std::string_view operator()(const std::vector<EEGSample>&) const { return "eeg"; }
        std::string_view operator()(const std::vector<WearableSample>&) const { return "wearable"; }
        std::string_view operator()(const std::vector<HeadPoseSample>&) const { return "head_pose"; }
        std::string_view operator()(const std::vector<FaceSample>&) const { return "face"; }
        std::string_view operator()(const std::vector<ContextRecord>&) const { return "context"; }
    };
    return std::visit(Visitor{}, series);
}

SampleSeries empty_series_for(StreamKind kind)
{
    switch (kind) {
    case StreamKind::keyboard: return std::vector<KeyEvent>{};
    case StreamKind::mouse: return std::vector<MouseEvent>{};
    case StreamKind::eeg_band: return std::vector<EEGSample>{};
    case StreamKind::smartwatch: return std::vector<WearableSample>{};
    case StreamKind::head_pose: return std::vector<HeadPoseSample>{};
    case StreamKind::face_biometrics: return std::vector<FaceSample>{};
    case StreamKind::context_probe: return std::vector<ContextRecord>{};
    default: return std::monostate{};
    }
}

std::size_t series_size(const SampleSeries& series)
{
    return std::visit(
        [](const auto& v) -> std::size_t {
            if constexpr (std::is_same_v<std::decay_t<decltype(v)>, std::monostate>) {
                return 0;
            } else {
                return v.size();
            }
        },
        series);
}

TaskRecord make_task(std::string task_id, TaskGroup group, SessionTime start, SessionTime end,
                     double accuracy)
{
    TaskRecord t;
    t.task_id = std::move(task_id);
    t.group = group;
    t.start = start;
    t.end = end;
    t.accuracy = accuracy;
    t.duration_s = static_cast<double>(end.micros - start.micros) * 1e-6;
    return t;
}

std::string Identity::key() const
{
    if (!id_number.empty()) return id_number;
    if (!email.empty()) return email;
    return name;
}

const Stream* SessionManifest::find_stream(std::string_view stream_id) const
{
    auto it = std::find_if(streams.begin(), streams.end(),
                           [&](const Stream& s) { return s.descriptor.stream_id == stream_id; });
    return it == streams.end() ? nullptr : &*it;
}

const Stream* SessionManifest::first_of_kind(StreamKind kind) const
{
    auto it = std::find_if(streams.begin(), streams.end(),
                           [&](const Stream& s) { return s.descriptor.kind == kind; });
    return it == streams.end() ? nullptr : &*it;
}

}  // namespace deskmon
