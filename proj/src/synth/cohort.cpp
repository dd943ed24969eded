#include "deskmon/synth/cohort.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <numeric>

namespace deskmon::synth {

Cohort generate_cohort(const CohortConfig& config)
{
    if (config.n_users < 0 || config.n_cheaters < 0) throw PlanError("user counts must be non-negative");
    if (config.n_cheaters > config.n_users) throw PlanError("more cheaters than users");
    if (config.n_cheaters > 0 && config.anomaly_kinds.empty()) throw PlanError("no anomaly kinds configured");

    SeparationConfig separation = config.separation;
    // Strata must cover every user and stay coprime with the stride 7.
    separation.strata = std::max(separation.strata, config.n_users);
    while (separation.strata % 7 == 0) ++separation.strata;

    Rng rng(mix_seed(config.seed, 0xc0407));
    std::vector<int> order(static_cast<std::size_t>(config.n_users));
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t i = order.size(); i > 1; --i) {
        std::swap(order[i - 1], order[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(i) - 1))]);
    }
    std::vector<bool> cheater(order.size(), false);
    for (int i = 0; i < config.n_cheaters; ++i) cheater[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])] = true;

    Cohort cohort;
    std::size_t next_kind = 0;
    for (int i = 0; i < config.n_users; ++i) {
        const std::uint64_t profile_seed = config.seed * 1000 + static_cast<std::uint64_t>(i) + 1;
        auto profile = generate_profile(profile_seed, separation);
        Rng user_rng(mix_seed(config.seed, profile_seed));

        AnomalyPlan anomalies;
        if (cheater[static_cast<std::size_t>(i)]) {
            const auto kind = config.anomaly_kinds[next_kind++ % config.anomaly_kinds.size()];
            anomalies.intervals.push_back(place_in_writing_task(config.plan, kind, config.anomaly_duration_s, user_rng));
        }

        SessionOptions opts = config.session;
        opts.session_id = fmt::format("session-{:03}", i + 1);
        Identity identity{fmt::format("Synthetic User {}", i + 1), fmt::format("user{}@example.org", i + 1),
                          fmt::format("ID{:06}", profile_seed)};
        opts.identity = identity;
        const auto user_id = static_cast<std::uint64_t>(i + 1);
        cohort.identity_map[identity.key()] = user_id;

        auto session = generate_session(profile, config.plan, anomalies, user_rng.next(), opts);
        if (config.anonymize) session = anonymize(session, cohort.identity_map);
        cohort.sessions.push_back(std::move(session));
        cohort.profiles.push_back(profile);
    }
    return cohort;
}

std::vector<SessionManifest> generate_cohort(int n_users, int n_cheaters, std::uint64_t seed)
{
    CohortConfig c;
    c.n_users = n_users;
    c.n_cheaters = n_cheaters;
    c.seed = seed;
    return generate_cohort(c).sessions;
}

void to_json(Json& j, const CohortConfig& c)
{
    Json kinds = Json::array();
    for (auto k : c.anomaly_kinds) kinds.push_back(to_string(k));
    j = Json{{"n_users", c.n_users},
             {"n_cheaters", c.n_cheaters},
             {"seed", c.seed},
             {"separation", c.separation},
             {"plan", c.plan},
             {"anomaly_duration_s", c.anomaly_duration_s},
             {"anomaly_kinds", kinds},
             {"attention_drop", c.session.attention_drop},
             {"max_writing_pause_s", c.session.max_writing_pause_s},
             {"random_clock_offsets", c.session.random_clock_offsets},
             {"with_eeg", c.session.with_eeg},
             {"with_smartwatch", c.session.with_smartwatch},
             {"with_head_pose", c.session.with_head_pose},
             {"with_face", c.session.with_face},
             {"with_context_probe", c.session.with_context_probe},
             {"anonymize", c.anonymize}};
}

void from_json(const Json& j, CohortConfig& c)
{
    c.n_users = j.value("n_users", c.n_users);
    c.n_cheaters = j.value("n_cheaters", c.n_cheaters);
    c.seed = j.value("seed", c.seed);
    if (j.contains("separation")) c.separation = j.at("separation").get<SeparationConfig>();
    if (j.contains("plan")) c.plan = j.at("plan").get<TaskPlan>();
    c.anomaly_duration_s = j.value("anomaly_duration_s", c.anomaly_duration_s);
    if (j.contains("anomaly_kinds")) {
        c.anomaly_kinds.clear();
        for (const auto& k : j.at("anomaly_kinds")) c.anomaly_kinds.push_back(parse_enum<AnomalyKind>(k.get<std::string>()));
    }
    auto& s = c.session;
    s.attention_drop = j.value("attention_drop", s.attention_drop);
    s.max_writing_pause_s = j.value("max_writing_pause_s", s.max_writing_pause_s);
    s.random_clock_offsets = j.value("random_clock_offsets", s.random_clock_offsets);
    s.with_eeg = j.value("with_eeg", s.with_eeg);
    s.with_smartwatch = j.value("with_smartwatch", s.with_smartwatch);
    s.with_head_pose = j.value("with_head_pose", s.with_head_pose);
    s.with_face = j.value("with_face", s.with_face);
    s.with_context_probe = j.value("with_context_probe", s.with_context_probe);
    c.anonymize = j.value("anonymize", c.anonymize);
}

}  // namespace deskmon::synth
