#include "deskmon/challenge/dataset.hpp"
#include "deskmon/challenge/evaluate.hpp"

#include "support/fixtures.hpp"
#include "support/oracles.hpp"

#include <doctest.h>

#include <set>

using namespace deskmon;
using namespace deskmon::challenge;
using fixture::sec;

namespace {

std::vector<Interval> to_intervals(const std::vector<oracle::Span>& s)
{
    std::vector<Interval> out;
    for (const auto& x : s) out.push_back({SessionTime{x.start}, SessionTime{x.end}});
    return out;
}

std::vector<oracle::Span> random_spans(std::mt19937_64& g, std::size_t max_n)
{
    std::vector<oracle::Span> out(g() % (max_n + 1));
    for (auto& s : out) {
        s.start = static_cast<std::int64_t>(g() % 200) * 1'000'000;
        s.end = s.start + (1 + static_cast<std::int64_t>(g() % 40)) * 1'000'000;
    }
    return out;
}

sync::SyncedSession synthetic(std::uint64_t seed, const synth::AnomalyPlan& anomalies = {})
{
    synth::SessionOptions opt;
    opt.session_id = "syn-" + std::to_string(seed);
    auto m = synth::generate_session(synth::generate_profile(seed), fixture::short_plan(), anomalies, seed, opt);
    m.user_id = seed;
    return sync::synchronize(m);
}

}  // namespace

TEST_SUITE("eer")
{
    TEST_CASE("perfect separation")
    {
        const auto r = compute_eer({{0.9, 0.8}, {0.1, 0.2}});
        CHECK(r.eer == 0.0);
    }

    TEST_CASE("interleaved scores give one third")
    {
        const auto r = compute_eer({{0.4, 0.6, 0.8}, {0.3, 0.5, 0.7}});
        CHECK(std::abs(r.eer - 1.0 / 3.0) <= 1e-9);
        CHECK(r.threshold == doctest::Approx(0.55));
    }

    TEST_CASE("identical lists give one half")
    {
        const std::vector<double> s{0.1, 0.4, 0.4, 0.7, 0.9};
        CHECK(compute_eer({s, s}).eer == doctest::Approx(0.5));
    }

    TEST_CASE("distance scores")
    {
        const auto r = compute_eer({{1.0, 2.0}, {8.0, 9.0}, false});
        CHECK(r.eer == 0.0);
        CHECK(r.threshold > 2.0);
        CHECK(r.threshold < 8.0);
    }

    TEST_CASE("empty lists are rejected")
    {
        CHECK_THROWS_AS(compute_eer({{}, {0.5}}), std::invalid_argument);
        CHECK_THROWS_AS(det_curve({{0.5}, {}}), std::invalid_argument);
    }

    TEST_CASE("matches the exhaustive sweep oracle")
    {
        std::mt19937_64 g(41);
        for (int trial = 0; trial < 200; ++trial) {
            ScoreSet s;
            s.higher_is_genuine = trial % 3 != 0;
            const std::size_t ng = 1 + g() % 400, ni = 1 + g() % 500;
            // Coarse grid values create ties.
            for (std::size_t i = 0; i < ng; ++i) s.genuine.push_back(static_cast<double>(g() % 60 + (s.higher_is_genuine ? 20 : 0)) / 100.0);
            for (std::size_t i = 0; i < ni; ++i) s.impostor.push_back(static_cast<double>(g() % 60 + (s.higher_is_genuine ? 0 : 20)) / 100.0);
            const auto r = compute_eer(s);
            const auto [eer, thr] = oracle::eer_by_sweep(s.genuine, s.impostor, s.higher_is_genuine);
            CHECK(r.eer == eer);
            CHECK(r.threshold == doctest::Approx(thr).epsilon(1e-12));
        }
    }

    TEST_CASE("DET curve endpoints and CSV")
    {
        const auto pts = det_curve({{0.4, 0.6, 0.8}, {0.3, 0.5, 0.7}});
        REQUIRE(pts.size() == 7);
        CHECK(pts.front().far == 1.0);
        CHECK(pts.front().frr == 0.0);
        CHECK(pts.back().far == 0.0);
        CHECK(pts.back().frr == 1.0);
        const auto csv = det_to_csv(pts);
        CHECK(csv.rfind("threshold,far,frr\n", 0) == 0);
        CHECK(std::count(csv.begin(), csv.end(), '\n') == 8);
    }
}

TEST_SUITE("interval-f1")
{
    TEST_CASE("examples")
    {
        const std::vector<Interval> a{{sec(10), sec(20)}};
        CHECK(interval_f1(a, a).f1 == 1.0);
        const auto none = interval_f1({}, a);
        CHECK(none.recall == 0.0);
        CHECK(none.f1 == 0.0);
        const std::vector<Interval> t{{sec(14), sec(24)}};
        CHECK(iou(a[0], t[0]) == doctest::Approx(6.0 / 14.0));
        CHECK(interval_f1(a, t, 0.3).f1 == 1.0);
        CHECK(interval_f1(a, t, 0.5).f1 == 0.0);
        CHECK(interval_f1({}, {}).f1 == 1.0);
    }

    TEST_CASE("matching is one-to-one")
    {
        const std::vector<Interval> pred{{sec(0), sec(10)}, {sec(1), sec(10)}};
        const std::vector<Interval> truth{{sec(0), sec(10)}};
        const auto s = interval_f1(pred, truth);
        CHECK(s.matches == 1);
        CHECK(s.precision == 0.5);
        CHECK(s.recall == 1.0);
    }

    TEST_CASE("matches the brute-force matcher")
    {
        std::mt19937_64 g(42);
        for (int trial = 0; trial < 300; ++trial) {
            const auto p = random_spans(g, 12), t = random_spans(g, 12);
            const double iou_min = static_cast<double>(g() % 10) / 10.0;
            const auto got = interval_f1(to_intervals(p), to_intervals(t), iou_min);
            const auto want = oracle::greedy_match(p, t, iou_min);
            CHECK(got.matches == want.matches);
            CHECK(got.precision == want.precision);
            CHECK(got.recall == want.recall);
            CHECK(got.f1 == want.f1);
        }
    }
}

TEST_SUITE("regression metrics")
{
    TEST_CASE("mae examples")
    {
        const std::vector<double> a{1, 2, 3};
        CHECK(mae(a, a) == 0.0);
        CHECK(mae(std::vector<double>{70}, std::vector<double>{75}) == 5.0);
        CHECK(mae(std::vector<double>{0, 10}, std::vector<double>{10, 0}) == 10.0);
        CHECK_THROWS_AS(mae(std::vector<double>{1}, std::vector<double>{1, 2}), std::invalid_argument);
    }

    TEST_CASE("constant baseline")
    {
        CHECK(ConstantBaseline(std::vector<double>{50, 70}).predict() == 60.0);
        CHECK(ConstantBaseline(std::vector<double>{80}).predict(std::string("anything")) == 80.0);
        CHECK_THROWS_AS(ConstantBaseline(std::vector<double>{}), std::invalid_argument);
        // In-sample MAE equals the mean absolute deviation.
        const std::vector<double> t{3, 9, 4, 11, 8};
        const ConstantBaseline b(t);
        std::vector<double> pred(t.size(), b.predict());
        double mad = 0;
        for (double v : t) mad += std::abs(v - 7.0);
        CHECK(mae(pred, t) == doctest::Approx(mad / 5));
    }
}

TEST_SUITE("verification")
{
    TEST_CASE("identical probe scores one")
    {
        const auto s = synthetic(3);
        const auto* kbd = s.manifest.first_of_kind(StreamKind::keyboard);
        REQUIRE(kbd);
        const auto f = features::keystroke_features(std::get<std::vector<KeyEvent>>(kbd->samples));
        CHECK(verify_keystroke(f, f) == 1.0);
    }

    TEST_CASE("one shared dimension at one dispersion scores one half")
    {
        TimingProfile e, p;
        e.dims[{TimingFamily::hold, "a", ""}] = {100.0, 20.0, 10};
        p.dims[{TimingFamily::hold, "a", ""}] = {120.0, 5.0, 10};
        p.dims[{TimingFamily::hold, "b", ""}] = {500.0, 5.0, 10};
        VerifyConfig cfg;
        cfg.min_overlap = 1;
        CHECK(scaled_manhattan(e, p, cfg) == 1.0);
        CHECK(verify_keystroke(e, p, cfg) == 0.5);
    }

    TEST_CASE("disjoint keys are insufficient overlap")
    {
        TimingProfile e, p;
        e.dims[{TimingFamily::hold, "a", ""}] = {100.0, 20.0, 10};
        p.dims[{TimingFamily::hold, "b", ""}] = {100.0, 20.0, 10};
        CHECK_THROWS_AS(verify_keystroke(e, p), InsufficientOverlap);
    }

    TEST_CASE("fixed-text templates verify by position")
    {
        std::vector<KeyEvent> ev;
        double t = 0;
        for (char c : std::string("maria lopez")) {
            ev.push_back({RawTime{static_cast<std::int64_t>(t * 1000)}, features::key_code_for(c), KeyAction::press});
            ev.push_back({RawTime{static_cast<std::int64_t>((t + 80) * 1000)}, features::key_code_for(c), KeyAction::release});
            t += 140 + (c == ' ' ? 60 : 0);
        }
        const auto tmpl = features::fixed_text_template(ev, "maria lopez");
        CHECK(verify_keystroke(tmpl, tmpl) == 1.0);
    }
}

TEST_SUITE("anomaly")
{
    TEST_CASE("injected no-input gap gives one covering interval")
    {
        synth::AnomalyPlan plan;
        plan.intervals.push_back({AnomalyKind::phone_use, 55.0, 30.0});
        const auto s = synthetic(5, plan);
        AnomalyConfig cfg;
        cfg.inactivity_s = 10;
        const auto det = detect_anomalies(s, cfg);
        REQUIRE(det.detections.size() == 1);
        const Interval truth{sec(55), sec(85)};
        CHECK(iou(det.detections[0].interval(), truth) >= 0.3);
        CHECK(det.detections[0].start <= sec(59));
        CHECK(det.detections[0].end >= sec(81));
        CHECK(det.detections[0].confidence > 0);
        CHECK(det.detections[0].confidence <= 1);
    }

    TEST_CASE("fully active session has no detections")
    {
        for (std::uint64_t seed : {1, 2, 3, 4}) CHECK(detect_anomalies(synthetic(seed)).detections.empty());
    }

    TEST_CASE("overlapping detections merge")
    {
        const auto merged = merge_detections({{sec(10), sec(20), 0.5, {AnomalyRule::inactivity}},
                                              {sec(15), sec(30), 0.9, {AnomalyRule::face_absence}}});
        REQUIRE(merged.size() == 1);
        CHECK(merged[0].start == sec(10));
        CHECK(merged[0].end == sec(30));
        CHECK(merged[0].rules.size() == 2);
    }

    TEST_CASE("absence and head turn fire the camera rules")
    {
        synth::AnomalyPlan plan;
        plan.intervals.push_back({AnomalyKind::absence, 50.0, 30.0});
        plan.intervals.push_back({AnomalyKind::resource_use, 100.0, 30.0});
        const auto det = detect_anomalies(synthetic(6, plan));
        std::set<AnomalyRule> rules;
        for (const auto& d : det.detections) rules.insert(d.rules.begin(), d.rules.end());
        CHECK(rules.count(AnomalyRule::face_absence) == 1);
        CHECK(rules.count(AnomalyRule::head_pose) == 1);
    }

    TEST_CASE("missing streams disable rules with a note")
    {
        auto m = synthetic(7).manifest;
        std::erase_if(m.streams, [](const Stream& s) {
            return s.descriptor.kind == StreamKind::head_pose || s.descriptor.kind == StreamKind::face_biometrics;
        });
        const auto det = detect_anomalies(sync::synchronize(m));
        CHECK(det.notes.size() == 2);
    }

    TEST_CASE("rule names round-trip")
    {
        for (auto r : {AnomalyRule::inactivity, AnomalyRule::head_pose, AnomalyRule::face_absence}) {
            CHECK(parse_rule(to_string(r)) == r);
        }
    }
}

TEST_SUITE("datasets")
{
    TEST_CASE("challenge table")
    {
        for (int i = 1; i <= 5; ++i) CHECK(challenge_spec(i).id == i);
        CHECK(challenge_spec(4).name == ChallengeName::authentication);
        CHECK_THROWS_AS(challenge_spec(6), std::out_of_range);
    }

    TEST_CASE("windows overlapping a label are positive")
    {
        synth::AnomalyPlan plan;
        plan.intervals.push_back({AnomalyKind::phone_use, 100.0, 30.0});
        const auto s = synthetic(8, plan);
        const std::vector<sync::SyncedSession> v{s};
        const auto ds = build_challenge_dataset(v, challenge_spec(2));
        REQUIRE_FALSE(ds.examples.empty());
        for (const auto& e : ds.examples) {
            const bool overlaps = e.start < sec(130) && e.end > sec(100);
            CHECK((e.target == 1.0) == overlaps);
        }
    }

    TEST_CASE("per-task examples")
    {
        synth::SessionOptions opt;
        auto m = synth::generate_session(synth::generate_profile(9), synth::TaskPlan::default_plan(), {}, 9, opt);
        const std::vector<sync::SyncedSession> v{sync::synchronize(m)};
        CHECK(v[0].manifest.tasks.size() == 8);
        CHECK(build_challenge_dataset(v, challenge_spec(3)).examples.size() == 8);
    }

    TEST_CASE("authentication labels cover every user")
    {
        synth::CohortConfig cfg;
        cfg.plan = fixture::short_plan();
        cfg.n_cheaters = 0;
        const auto cohort = synth::generate_cohort(cfg);
        std::vector<sync::SyncedSession> v;
        for (const auto& m : cohort.sessions) v.push_back(sync::synchronize(m));
        const auto ds = build_challenge_dataset(v, challenge_spec(4));
        std::set<double> ids;
        for (const auto& e : ds.examples) ids.insert(e.target);
        CHECK(ids.size() == 20);
    }

    TEST_CASE("missing target stream skips the session")
    {
        auto m = synthetic(10).manifest;
        std::erase_if(m.streams, [](const Stream& s) { return s.descriptor.kind == StreamKind::smartwatch; });
        const std::vector<sync::SyncedSession> v{sync::synchronize(m), synthetic(11)};
        const auto ds = build_challenge_dataset(v, challenge_spec(5));
        CHECK(ds.skipped.size() == 1);
        for (const auto& e : ds.examples) CHECK(e.session_id == "syn-11");
    }

    TEST_CASE("evaluation results serialize")
    {
        const std::vector<sync::SyncedSession> v{synthetic(12), synthetic(13)};
        const auto ev = evaluate_challenge(v, 1);
        CHECK(ev.result.metric == "mae");
        CHECK(ev.result.per_session.size() == 2);
        const auto j = to_json(ev.result);
        CHECK(j.at("challenge") == 1);
        CHECK(j.at("value").is_number());
        CHECK_THROWS(evaluate_challenge(v, 0));
    }
}
