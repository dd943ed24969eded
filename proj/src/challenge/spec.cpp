#include "deskmon/challenge/spec.hpp"

#include <array>
#include <stdexcept>
#include <string>

namespace deskmon::challenge {
namespace {

using K = StreamKind;

const std::array<ChallengeSpec, 5>& specs()
{
    static const std::array<ChallengeSpec, 5> table{{
        {1, ChallengeName::attention, TargetSource::eeg_attention, K::eeg_band,
         {K::front_camera, K::mouse, K::keyboard},
         {K::front_camera, K::mouse, K::keyboard}},
        {2, ChallengeName::anomaly, TargetSource::anomaly_labels, std::nullopt,
         {K::front_camera, K::microphone, K::mouse, K::keyboard},
         {K::front_camera, K::microphone, K::mouse, K::keyboard}},
        {3, ChallengeName::performance, TargetSource::task_accuracy, std::nullopt,
         {K::front_camera, K::mouse, K::keyboard},
         {K::front_camera, K::mouse, K::keyboard, K::smartwatch, K::eeg_band}},
        {4, ChallengeName::authentication, TargetSource::user_identity, std::nullopt,
         {K::front_camera, K::mouse, K::keyboard},
         {K::nir_camera, K::smartwatch, K::eeg_band}},
        {5, ChallengeName::pulse, TargetSource::smartwatch_pulse, K::smartwatch,
         {K::front_camera},
         {K::nir_camera}},
    }};
    return table;
}

}  // namespace

std::string_view to_string(ChallengeName name)
{
    switch (name) {
    case ChallengeName::attention: return "attention";
    case ChallengeName::anomaly: return "anomaly";
    case ChallengeName::performance: return "performance";
    case ChallengeName::authentication: return "authentication";
    case ChallengeName::pulse: return "pulse";
    }
    return "?";
}

const ChallengeSpec& challenge_spec(int id)
{
    if (id < 1 || id > 5) throw std::out_of_range("challenge id must be 1..5, got " + std::to_string(id));
    return specs()[static_cast<std::size_t>(id - 1)];
}

}  // namespace deskmon::challenge
