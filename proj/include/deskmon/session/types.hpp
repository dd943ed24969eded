#pragma once

#include "deskmon/session/time.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace deskmon {

enum class Handedness { left, right };
enum class KeyAction { press, release };
enum class MouseKind { move, press, release, wheel, drag };
enum class MouseButton { none, left, right, middle };
enum class TaskGroup { enrollment, writing, multiple_choice };
enum class AnomalyKind { phone_use, resource_use, absence, other };
enum class PayloadKind { inline_samples, external_file };

enum class StreamKind {
    front_camera,
    side_camera,
    cenital_camera,
    nir_camera,
    depth_camera,
    desktop_capture,
    microphone,
    keyboard,
    mouse,
    eeg_band,
    smartwatch,
    context_probe,
    head_pose,
    face_biometrics,
};

/// Thrown when a textual enum value has no matching enumerator.
class UnknownEnumValue : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

std::string_view to_string(Handedness v);
std::string_view to_string(KeyAction v);
std::string_view to_string(MouseKind v);
std::string_view to_string(MouseButton v);
std::string_view to_string(TaskGroup v);
std::string_view to_string(AnomalyKind v);
std::string_view to_string(PayloadKind v);
std::string_view to_string(StreamKind v);

template <class E>
E parse_enum(std::string_view text);

template <> Handedness parse_enum<Handedness>(std::string_view);
template <> KeyAction parse_enum<KeyAction>(std::string_view);
template <> MouseKind parse_enum<MouseKind>(std::string_view);
template <> MouseButton parse_enum<MouseButton>(std::string_view);
template <> TaskGroup parse_enum<TaskGroup>(std::string_view);
template <> AnomalyKind parse_enum<AnomalyKind>(std::string_view);
template <> PayloadKind parse_enum<PayloadKind>(std::string_view);
template <> StreamKind parse_enum<StreamKind>(std::string_view);

/// Media kinds are opaque MP4/WAV files referenced by the manifest.
bool is_external_kind(StreamKind kind);
/// Keyboard and mouse carry irregular events; their nominal rate is a descriptor only.
bool is_event_kind(StreamKind kind);

struct Demographics {
    int age = 0;
    std::string gender;
    Handedness handedness = Handedness::right;

    bool operator==(const Demographics&) const = default;
};

struct ScreenResolution {
    int width = 0;
    int height = 0;

    bool operator==(const ScreenResolution&) const = default;
};

struct TaskDuration {
    std::string task_id;
    double seconds = 0.0;

    bool operator==(const TaskDuration&) const = default;
};

struct TaskAnswer {
    std::string task_id;
    std::string text;

    bool operator==(const TaskAnswer&) const = default;
};

/// Computer and test context. Wall-clock times are microseconds since the Unix epoch.
struct ContextSnapshot {
    std::string computer_name;
    std::string private_ip;
    std::string public_ip;
    std::string mac;
    std::string os;
    std::string architecture;
    std::string keyboard_language;
    ScreenResolution screen_resolution;
    std::uint64_t free_memory = 0;
    std::uint64_t main_memory = 0;
    std::int64_t start_time = 0;
    std::int64_t finish_time = 0;
    std::vector<TaskDuration> per_task_time;
    std::vector<TaskAnswer> answers;

    bool operator==(const ContextSnapshot&) const = default;
};

struct KeyEvent {
    RawTime raw_ts;
    std::string key_code;
    KeyAction action = KeyAction::press;

    bool operator==(const KeyEvent&) const = default;
};

struct MouseEvent {
    RawTime raw_ts;
    MouseKind kind = MouseKind::move;
    int x = 0;
    int y = 0;
    MouseButton button = MouseButton::none;
    int wheel_delta = 0;

    bool operator==(const MouseEvent&) const = default;
};

struct EEGSample {
    RawTime raw_ts;
    std::array<double, 5> band_power{};
    double attention = 0.0;
    double meditation = 0.0;
    std::optional<double> blink_strength;

    bool operator==(const EEGSample&) const = default;
};

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    bool operator==(const Vec3&) const = default;
};

struct WearableSample {
    RawTime raw_ts;
    std::optional<double> heart_rate_bpm;
    Vec3 accel;
    Vec3 gyro;
    Vec3 mag;

    bool operator==(const WearableSample&) const = default;
};

struct HeadPoseSample {
    RawTime raw_ts;
    double pitch = 0.0;
    double roll = 0.0;
    double yaw = 0.0;

    bool operator==(const HeadPoseSample&) const = default;
};

struct FaceSample {
    RawTime raw_ts;
    double face_size_px = 0.0;
    double auth_score = 0.0;
    bool face_present = false;

    bool operator==(const FaceSample&) const = default;
};

/// A context snapshot taken by a probe at a point in the session.
struct ContextRecord {
    RawTime raw_ts;
    ContextSnapshot snapshot;

    bool operator==(const ContextRecord&) const = default;
};

using SampleSeries = std::variant<std::monostate,
                                  std::vector<KeyEvent>,
                                  std::vector<MouseEvent>,
                                  std::vector<EEGSample>,
                                  std::vector<WearableSample>,
                                  std::vector<HeadPoseSample>,
                                  std::vector<FaceSample>,
                                  std::vector<ContextRecord>>;

/// Sample series type name used on the wire and in the store ("key", "mouse", ...).
std::string_view sample_type_name(const SampleSeries& series);
SampleSeries empty_series_for(StreamKind kind);
std::size_t series_size(const SampleSeries& series);

template <class Sample>
RawTime sample_time(const Sample& s)
{
    return s.raw_ts;
}

struct StreamDescriptor {
    std::string stream_id;
    StreamKind kind = StreamKind::keyboard;
    std::optional<double> nominal_rate_hz;
    PayloadKind payload = PayloadKind::inline_samples;
    std::int64_t clock_offset_micros = 0;
    double clock_drift_ppm = 0.0;
    /// Raw device time at which the clock estimate was taken; origin of drift correction.
    std::int64_t clock_reference_raw_micros = 0;
    /// Set for external_file payloads.
    std::optional<std::string> media_file;

    bool operator==(const StreamDescriptor&) const = default;
};

struct Stream {
    StreamDescriptor descriptor;
    SampleSeries samples;

    bool operator==(const Stream&) const = default;
};

struct TaskRecord {
    std::string task_id;
    TaskGroup group = TaskGroup::writing;
    SessionTime start;
    SessionTime end;
    double accuracy = 0.0;
    double duration_s = 0.0;

    bool operator==(const TaskRecord&) const = default;
};

TaskRecord make_task(std::string task_id, TaskGroup group, SessionTime start, SessionTime end,
                     double accuracy);

struct AnomalyLabel {
    SessionTime start;
    SessionTime end;
    AnomalyKind kind = AnomalyKind::other;

    bool operator==(const AnomalyLabel&) const = default;
};

/// Real-world identity fields captured by the enrollment form; removed by anonymize().
struct Identity {
    std::string name;
    std::string email;
    std::string id_number;

    bool operator==(const Identity&) const = default;

    /// Lookup key for identity maps: ID number, else email, else name.
    std::string key() const;
};

inline const std::array<std::string, 5> kDefaultEegBandLabels{"delta", "theta", "alpha", "beta",
                                                              "gamma"};

struct SessionManifest {
    std::string session_id;
    std::optional<std::uint64_t> user_id;
    std::optional<Identity> identity;
    Demographics demographics;
    ContextSnapshot context;
    std::array<std::string, 5> eeg_band_labels = kDefaultEegBandLabels;
    std::vector<Stream> streams;
    std::vector<TaskRecord> tasks;
    std::vector<AnomalyLabel> anomaly_labels;
    bool cheater_flag = false;

    bool operator==(const SessionManifest&) const = default;

    /// Session duration derived from the context start/finish wall-clock times.
    SessionTime session_end() const { return SessionTime{context.finish_time - context.start_time}; }

    const Stream* find_stream(std::string_view stream_id) const;
    const Stream* first_of_kind(StreamKind kind) const;
};

template <class Sample>
const std::vector<Sample>* samples_of(const Stream& s)
{
    return std::get_if<std::vector<Sample>>(&s.samples);
}

/// Samples of the first inline stream of the given kind, or nullptr.
template <class Sample>
const std::vector<Sample>* first_samples(const SessionManifest& m, StreamKind kind)
{
    const Stream* s = m.first_of_kind(kind);
    return s ? samples_of<Sample>(*s) : nullptr;
}

}  // namespace deskmon
