#pragma once

#include "deskmon/session/anonymize.hpp"
#include "deskmon/synth/session_gen.hpp"

#include <vector>

namespace deskmon::synth {

/// Every parameter of a synthetic cohort; serialized as the cohort config file.
struct CohortConfig {
    int n_users = 20;
    int n_cheaters = 10;
    std::uint64_t seed = 7;
    SeparationConfig separation;
    TaskPlan plan = TaskPlan::default_plan();
    double anomaly_duration_s = 30.0;
    /// Cycled over the cheaters.
    std::vector<AnomalyKind> anomaly_kinds{AnomalyKind::phone_use, AnomalyKind::absence, AnomalyKind::resource_use};
    SessionOptions session;
    bool anonymize = true;
};

struct Cohort {
    std::vector<UserBehaviorProfile> profiles;
    std::vector<SessionManifest> sessions;
    /// Identity key -> user id used for anonymization.
    IdentityMap identity_map;
};

/// Users get profile seeds seed * 1000 + 1 .. + n. Cheaters are a seeded
/// choice of n_cheaters users; each gets one anomaly inside a writing task.
/// Throws PlanError when n_cheaters > n_users.
Cohort generate_cohort(const CohortConfig& config);

/// Shorthand with default config.
std::vector<SessionManifest> generate_cohort(int n_users, int n_cheaters, std::uint64_t seed);

void to_json(Json& j, const CohortConfig& c);
/// Missing keys keep their defaults.
void from_json(const Json& j, CohortConfig& c);

}  // namespace deskmon::synth
