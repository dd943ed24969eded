#pragma once

#include "deskmon/synth/cohort.hpp"
#include "deskmon/sync/sync.hpp"

#include <atomic>
#include <filesystem>
#include <string>

#include <unistd.h>

namespace fixture {

using namespace deskmon;

inline SessionTime sec(double s)
{
    return SessionTime{seconds_to_micros(s)};
}

inline RawTime raw_sec(double s)
{
    return RawTime{seconds_to_micros(s)};
}

/// 60 s hand-built session with identity clocks: keyboard, mouse, EEG,
/// smartwatch, head pose, face and one external video reference.
inline SessionManifest small_session(std::string id = "s1")
{
    SessionManifest m;
    m.session_id = std::move(id);
    m.user_id = 3;
    m.demographics = {29, "female", Handedness::left};
    m.context.computer_name = "lab-01";
    m.context.private_ip = "10.0.0.5";
    m.context.public_ip = "203.0.113.9";
    m.context.mac = "02:00:00:00:00:01";
    m.context.os = "linux";
    m.context.architecture = "x86_64";
    m.context.keyboard_language = "es-ES";
    m.context.screen_resolution = {1920, 1080};
    m.context.free_memory = 4'000'000'000ULL;
    m.context.main_memory = 16'000'000'000ULL;
    m.context.start_time = 1'700'000'000'000'000;
    m.context.finish_time = m.context.start_time + 60 * kMicrosPerSecond;
    m.context.per_task_time = {{"enroll", 20.0}, {"write1", 30.0}};
    m.context.answers = {{"write1", "a short answer, with \"quotes\"\nand a newline"}};

    Stream kbd{{"kbd", StreamKind::keyboard, 12.0}, {}};
    std::vector<KeyEvent> keys;
    const char* word = "maria";
    for (int i = 0; word[i]; ++i) {
        keys.push_back({raw_sec(2.0 + 0.2 * i), std::string(1, word[i]), KeyAction::press});
        keys.push_back({raw_sec(2.1 + 0.2 * i), std::string(1, word[i]), KeyAction::release});
    }
    kbd.samples = keys;

    Stream mouse{{"mouse", StreamKind::mouse, 895.0}, {}};
    std::vector<MouseEvent> mv;
    for (int i = 0; i < 20; ++i) mv.push_back({raw_sec(25.0 + 0.01 * i), MouseKind::move, 100 + 3 * i, 200 + 4 * i});
    mv.push_back({raw_sec(25.5), MouseKind::press, 157, 276, MouseButton::left});
    mv.push_back({raw_sec(25.6), MouseKind::release, 157, 276, MouseButton::left});
    mv.push_back({raw_sec(26.0), MouseKind::wheel, 157, 276, MouseButton::none, -120});
    mouse.samples = mv;

    Stream eeg{{"eeg", StreamKind::eeg_band, 1.0}, {}};
    std::vector<EEGSample> es;
    for (int i = 0; i < 60; ++i) {
        EEGSample s;
        s.raw_ts = raw_sec(i);
        s.band_power = {1.5 + i, 0.25, 3.0e-7, 12.125, 0.1};
        s.attention = 40 + i % 20;
        s.meditation = 55.5;
        if (i % 7 == 0) s.blink_strength = 60.0 + i;
        es.push_back(s);
    }
    eeg.samples = es;

    Stream watch{{"watch", StreamKind::smartwatch, 200.0}, {}};
    std::vector<WearableSample> ws;
    for (int i = 0; i < 400; ++i) {
        WearableSample s;
        s.raw_ts = RawTime{i * 5000};
        if (i % 50 != 3) s.heart_rate_bpm = 71.0 + 0.01 * i;
        s.accel = {0.1, -9.81, 0.3333333333333333};
        s.gyro = {1e-9, 0.0, -2.5};
        s.mag = {30.0, 31.0, 32.0};
        ws.push_back(s);
    }
    watch.samples = ws;

    Stream pose{{"pose", StreamKind::head_pose, 25.0}, {}};
    std::vector<HeadPoseSample> ps;
    for (int i = 0; i < 50; ++i) ps.push_back({RawTime{i * 40'000}, -3.5, 0.5, 179.75 - i});
    pose.samples = ps;

    Stream face{{"face", StreamKind::face_biometrics, 25.0}, {}};
    std::vector<FaceSample> fs;
    for (int i = 0; i < 50; ++i) fs.push_back({RawTime{i * 40'000}, 180.5, 0.93, i % 10 != 0});
    face.samples = fs;

    Stream video{{"front", StreamKind::front_camera, 30.0, PayloadKind::external_file}, {}};
    video.descriptor.media_file = "front.mp4";

    m.streams = {kbd, mouse, eeg, watch, pose, face, video};
    m.tasks = {make_task("enroll", TaskGroup::enrollment, sec(1), sec(21), 1.0),
               make_task("write1", TaskGroup::writing, sec(22), sec(52), 0.75)};
    return m;
}

/// Short plan: enrollment, two writing tasks, one multiple-choice task.
inline synth::TaskPlan short_plan()
{
    synth::TaskPlan p;
    p.tasks = {{"enroll", TaskGroup::enrollment, 40.0},
               {"write1", TaskGroup::writing, 50.0},
               {"write2", TaskGroup::writing, 50.0},
               {"mc1", TaskGroup::multiple_choice, 20.0}};
    return p;
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    TempDir()
    {
        static std::atomic<int> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("deskmon-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir()
    {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& s) const { return path_ / s; }

private:
    std::filesystem::path path_;
};

}  // namespace fixture
