#pragma once

#include "deskmon/session/types.hpp"

#include <optional>
#include <set>
#include <string_view>

namespace deskmon::challenge {

enum class ChallengeName { attention, anomaly, performance, authentication, pulse };

/// What the model must predict.
enum class TargetSource {
    eeg_attention,
    anomaly_labels,
    task_accuracy,
    user_identity,
    smartwatch_pulse,
};

struct ChallengeSpec {
    int id = 0;
    ChallengeName name = ChallengeName::attention;
    TargetSource target = TargetSource::eeg_attention;
    /// Stream carrying the ground truth, when the target comes from a sensor.
    std::optional<StreamKind> target_stream;
    std::set<StreamKind> input_kinds_basic;
    std::set<StreamKind> input_kinds_advanced;
};

std::string_view to_string(ChallengeName name);

/// The five monitoring challenges; throws std::out_of_range outside 1..5.
const ChallengeSpec& challenge_spec(int id);

}  // namespace deskmon::challenge
