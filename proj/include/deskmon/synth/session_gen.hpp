#pragma once

#include "deskmon/synth/profile.hpp"
#include "deskmon/synth/rng.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace deskmon::synth {

struct TaskSpec {
    std::string task_id;
    TaskGroup group = TaskGroup::writing;
    double duration_s = 0.0;

    bool operator==(const TaskSpec&) const = default;
};

struct TaskPlan {
    std::vector<TaskSpec> tasks;
    double lead_s = 2.0;
    double transition_s = 2.0;

    /// 1 enrollment form (40 s), 4 writing questions (50 s), 3 multiple choice (30 s).
    static TaskPlan default_plan();

    /// Session-time start of task i.
    double task_start_s(std::size_t i) const;
    double session_length_s() const;
};

struct AnomalyInterval {
    AnomalyKind kind = AnomalyKind::phone_use;
    double start_s = 0.0;
    double duration_s = 30.0;

    bool operator==(const AnomalyInterval&) const = default;
};

struct AnomalyPlan {
    std::vector<AnomalyInterval> intervals;
};

class PlanError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// One interval of `duration_s` placed inside a random writing task, at least
/// `margin_s` from both task boundaries.
AnomalyInterval place_in_writing_task(const TaskPlan& plan, AnomalyKind kind, double duration_s, Rng& rng,
                                      double margin_s = 5.0);

struct SessionOptions {
    std::string session_id = "session";
    std::optional<Identity> identity;
    std::optional<Demographics> demographics;
    /// Attention drop applied during anomaly intervals.
    double attention_drop = 30.0;
    /// Longest idle pause between sentences in writing tasks.
    double max_writing_pause_s = 4.0;
    /// Each stream gets an independent device clock (raw = session + base).
    bool random_clock_offsets = true;
    bool with_eeg = true;
    bool with_smartwatch = true;
    bool with_head_pose = true;
    bool with_face = true;
    bool with_context_probe = true;
};

inline constexpr double kKeyboardRateHz = 12.0;
inline constexpr double kMouseRateHz = 895.0;
inline constexpr double kEegRateHz = 1.0;
inline constexpr double kSmartwatchRateHz = 200.0;
inline constexpr double kCameraTrackRateHz = 25.0;

/// Fixed text of the enrollment form.
inline constexpr std::string_view kEnrollmentText = "the quick brown fox jumps over the lazy dog";

/// Throws PlanError for overlapping anomaly intervals or intervals outside the session.
SessionManifest generate_session(const UserBehaviorProfile& profile, const TaskPlan& plan,
                                 const AnomalyPlan& anomalies, std::uint64_t seed, const SessionOptions& options = {});

/// EEG stream alone at 1 Hz over [0, duration_s).
std::vector<EEGSample> generate_eeg(const UserBehaviorProfile& profile, double duration_s,
                                    const AnomalyPlan& anomalies, double attention_drop, Rng& rng);

void to_json(Json& j, const TaskPlan& p);
void from_json(const Json& j, TaskPlan& p);

}  // namespace deskmon::synth
