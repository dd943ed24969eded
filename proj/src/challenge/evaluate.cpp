#include "deskmon/challenge/evaluate.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <set>

namespace deskmon::challenge {
namespace {

std::vector<KeyEvent> keys_in(const sync::SyncedSession& s, const TaskRecord& task)
{
    const auto* keys = first_samples<KeyEvent>(s.manifest, StreamKind::keyboard);
    return keys ? sync::slice(*keys, task.start, task.end) : std::vector<KeyEvent>{};
}

Evaluation regression(const Dataset& ds, int id)
{
    Evaluation ev;
    ev.skipped = ds.skipped;
    ev.result.challenge = id;
    ev.result.metric = "mae";

    std::map<std::string, std::vector<const Example*>> by_session;
    for (const auto& ex : ds.examples) by_session[ex.session_id].push_back(&ex);
    if (by_session.empty()) {
        ev.result.value = std::numeric_limits<double>::quiet_NaN();
        ev.result.details["note"] = "no examples";
        return ev;
    }

    std::vector<double> all_pred, all_truth;
    const bool loso = by_session.size() > 1;
    for (const auto& [sid, examples] : by_session) {
        std::vector<double> train;
        for (const auto& ex : ds.examples) {
            if (!loso || ex.session_id != sid) train.push_back(ex.target);
        }
        const ConstantBaseline model(train);
        std::vector<double> pred, truth;
        for (const auto* ex : examples) {
            pred.push_back(model.predict(ex->features));
            truth.push_back(ex->target);
        }
        ev.result.per_session.push_back({sid, mae(pred, truth)});
        all_pred.insert(all_pred.end(), pred.begin(), pred.end());
        all_truth.insert(all_truth.end(), truth.begin(), truth.end());
    }
    ev.result.value = mae(all_pred, all_truth);
    ev.result.details["model"] = "constant";
    ev.result.details["protocol"] = loso ? "leave-one-session-out" : "in-sample (single session)";
    ev.result.details["examples"] = all_truth.size();
    return ev;
}

Evaluation anomaly(std::span<const sync::SyncedSession> sessions, const Dataset& ds, const EvalConfig& config)
{
    Evaluation ev;
    ev.skipped = ds.skipped;
    ev.result.challenge = 2;
    ev.result.metric = "interval_f1";
    std::size_t matches = 0, predicted = 0, truth = 0;
    for (const auto& s : sessions) {
        const auto report = detect_anomalies(s, config.anomaly);
        std::vector<Interval> pred, labels;
        for (const auto& d : report.detections) pred.push_back(d.interval());
        for (const auto& l : s.manifest.anomaly_labels) labels.push_back({l.start, l.end});
        const auto sc = interval_f1(pred, labels, config.iou_min);
        matches += sc.matches;
        predicted += sc.predicted;
        truth += sc.truth;
        ev.result.per_session.push_back({s.manifest.session_id, sc.f1});
    }
    const auto pooled = scores_from_counts(matches, predicted, truth);
    ev.result.value = pooled.f1;
    ev.result.details["precision"] = pooled.precision;
    ev.result.details["recall"] = pooled.recall;
    ev.result.details["matches"] = matches;
    ev.result.details["predicted"] = predicted;
    ev.result.details["truth"] = truth;
    ev.result.details["iou_min"] = config.iou_min;
    std::size_t positives = 0;
    for (const auto& ex : ds.examples) positives += ex.target > 0.5 ? 1 : 0;
    ev.result.details["windows"] = ds.examples.size();
    ev.result.details["windows_in_anomaly"] = positives;
    return ev;
}

}  // namespace

ScoreSet authentication_scores(std::span<const sync::SyncedSession> sessions, const VerifyConfig& config,
                               std::vector<std::string>* notes)
{
    struct Enrolled {
        std::uint64_t user;
        TimingProfile profile;
    };
    std::vector<Enrolled> enrolled;
    for (const auto& s : sessions) {
        if (!s.manifest.user_id) continue;
        for (const auto& t : s.manifest.tasks) {
            if (t.group != TaskGroup::enrollment) continue;
            const auto keys = keys_in(s, t);
            if (keys.empty()) continue;
            enrolled.push_back({*s.manifest.user_id, timing_profile(features::keystroke_features(keys), config.profile)});
            break;
        }
    }

    ScoreSet scores;
    std::size_t insufficient = 0;
    for (const auto& s : sessions) {
        if (!s.manifest.user_id) continue;
        for (const auto& t : s.manifest.tasks) {
            if (t.group != TaskGroup::writing) continue;
            const auto keys = keys_in(s, t);
            if (keys.empty()) continue;
            const auto probe = timing_profile(features::keystroke_features(keys), config.profile);
            for (const auto& e : enrolled) {
                double score = 0;
                try {
                    score = verify_keystroke(e.profile, probe, config);
                } catch (const InsufficientOverlap&) {
                    ++insufficient;
                    continue;
                }
                (e.user == *s.manifest.user_id ? scores.genuine : scores.impostor).push_back(score);
            }
        }
    }
    if (notes && insufficient > 0) {
        notes->push_back(std::to_string(insufficient) + " probe/enrollment pairs skipped for insufficient overlap");
    }
    return scores;
}

Evaluation evaluate_challenge(std::span<const sync::SyncedSession> sessions, int challenge_id,
                              const EvalConfig& config)
{
    const auto& spec = challenge_spec(challenge_id);
    const Dataset ds = build_challenge_dataset(sessions, spec, config.dataset);
    Evaluation ev;
    switch (spec.target) {
    case TargetSource::eeg_attention:
    case TargetSource::task_accuracy:
    case TargetSource::smartwatch_pulse:
        ev = regression(ds, challenge_id);
        break;
    case TargetSource::anomaly_labels:
        ev = anomaly(sessions, ds, config);
        break;
    case TargetSource::user_identity: {
        ev.skipped = ds.skipped;
        ev.result.challenge = 4;
        ev.result.metric = "eer";
        std::vector<std::string> notes;
        ev.scores = authentication_scores(sessions, config.verify, &notes);
        for (auto& n : notes) ev.skipped.push_back(std::move(n));
        std::set<std::uint64_t> identities;
        for (const auto& ex : ds.examples) identities.insert(ex.user_id);
        ev.result.details["identities"] = identities.size();
        ev.result.details["protocol"] = "enroll on enrollment form, probe with writing tasks";
        if (ev.scores.genuine.empty() || ev.scores.impostor.empty()) {
            ev.result.value = std::numeric_limits<double>::quiet_NaN();
            ev.result.details["note"] = "not enough genuine or impostor scores";
            break;
        }
        const auto eer = compute_eer(ev.scores);
        ev.det = det_curve(ev.scores);
        ev.result.value = eer.eer;
        ev.result.details["threshold"] = eer.threshold;
        ev.result.details["genuine_scores"] = ev.scores.genuine.size();
        ev.result.details["impostor_scores"] = ev.scores.impostor.size();
        break;
    }
    }
    ev.result.details["name"] = std::string(to_string(spec.name));
    return ev;
}

Json to_json(const EvalResult& r)
{
    Json per = Json::array();
    for (const auto& p : r.per_session) {
        per.push_back({{"session_id", p.session_id}, {"value", std::isfinite(p.value) ? Json(p.value) : Json(nullptr)}});
    }
    return Json{{"challenge", r.challenge},
                {"metric", r.metric},
                {"value", std::isfinite(r.value) ? Json(r.value) : Json(nullptr)},
                {"per_session", per},
                {"details", r.details}};
}

}  // namespace deskmon::challenge
