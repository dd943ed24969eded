#include "deskmon/challenge/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <tuple>

#include <fmt/format.h>

namespace deskmon::challenge {
namespace {

double ratio(std::size_t num, std::size_t den, bool both_empty)
{
    if (den == 0) return both_empty ? 1.0 : 0.0;
    return static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

std::vector<DetPoint> det_curve(const ScoreSet& scores)
{
    if (scores.genuine.empty() || scores.impostor.empty()) {
        throw std::invalid_argument("EER needs non-empty genuine and impostor score lists");
    }
    const double sign = scores.higher_is_genuine ? 1.0 : -1.0;
    std::vector<double> gen, imp;
    for (double s : scores.genuine) gen.push_back(sign * s);
    for (double s : scores.impostor) imp.push_back(sign * s);
    std::sort(gen.begin(), gen.end());
    std::sort(imp.begin(), imp.end());

    std::vector<double> all(gen);
    all.insert(all.end(), imp.begin(), imp.end());
    std::sort(all.begin(), all.end());
    all.erase(std::unique(all.begin(), all.end()), all.end());

    std::vector<double> thresholds;
    thresholds.reserve(all.size() + 1);
    thresholds.push_back(all.front() - 1.0);
    for (std::size_t i = 1; i < all.size(); ++i) thresholds.push_back((all[i - 1] + all[i]) / 2.0);
    thresholds.push_back(all.back() + 1.0);

    const double n_gen = static_cast<double>(gen.size());
    const double n_imp = static_cast<double>(imp.size());
    std::vector<DetPoint> points;
    points.reserve(thresholds.size());
    std::size_t gen_below = 0, imp_below = 0;
    for (double t : thresholds) {
        while (gen_below < gen.size() && gen[gen_below] < t) ++gen_below;
        while (imp_below < imp.size() && imp[imp_below] < t) ++imp_below;
        const double far = static_cast<double>(imp.size() - imp_below) / n_imp;
        const double frr = static_cast<double>(gen_below) / n_gen;
        points.push_back({sign * t, far, frr});
    }
    return points;
}

EerResult compute_eer(const ScoreSet& scores)
{
    const auto points = det_curve(scores);
    for (std::size_t k = 0; k < points.size(); ++k) {
        const double d = points[k].far - points[k].frr;
        if (d > 0) continue;
        if (d == 0 || k == 0) return {points[k].far, points[k].threshold};
        const auto& a = points[k - 1];
        const auto& b = points[k];
        const double da = a.far - a.frr;
        const double lambda = da / (da - d);
        return {a.far + lambda * (b.far - a.far), a.threshold + lambda * (b.threshold - a.threshold)};
    }
    // Unreachable: the last threshold has FAR 0 and FRR 1.
    return {points.back().far, points.back().threshold};
}

std::string det_to_csv(std::span<const DetPoint> points)
{
    std::string out = "threshold,far,frr\n";
    for (const auto& p : points) out += fmt::format("{},{},{}\n", p.threshold, p.far, p.frr);
    return out;
}

double iou(const Interval& a, const Interval& b)
{
    const auto inter = std::min(a.end.micros, b.end.micros) - std::max(a.start.micros, b.start.micros);
    if (inter <= 0) return 0.0;
    const auto uni = std::max(a.end.micros, b.end.micros) - std::min(a.start.micros, b.start.micros);
    return static_cast<double>(inter) / static_cast<double>(uni);
}

IntervalScores scores_from_counts(std::size_t matches, std::size_t predicted, std::size_t truth)
{
    IntervalScores s;
    s.matches = matches;
    s.predicted = predicted;
    s.truth = truth;
    const bool both_empty = predicted == 0 && truth == 0;
    s.precision = ratio(matches, predicted, both_empty);
    s.recall = ratio(matches, truth, both_empty);
    s.f1 = (s.precision + s.recall) > 0 ? 2 * s.precision * s.recall / (s.precision + s.recall) : 0.0;
    return s;
}

IntervalScores interval_f1(std::span<const Interval> pred, std::span<const Interval> truth, double iou_min)
{
    struct Pair {
        double iou;
        std::size_t p, t;
    };
    std::vector<Pair> pairs;
    for (std::size_t p = 0; p < pred.size(); ++p) {
        for (std::size_t t = 0; t < truth.size(); ++t) {
            const double v = iou(pred[p], truth[t]);
            if (v > 0 && v >= iou_min) pairs.push_back({v, p, t});
        }
    }
    std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
        return std::tie(b.iou, a.p, a.t) < std::tie(a.iou, b.p, b.t);
    });
    std::vector<bool> pred_used(pred.size()), truth_used(truth.size());
    std::size_t matches = 0;
    for (const auto& pr : pairs) {
        if (pred_used[pr.p] || truth_used[pr.t]) continue;
        pred_used[pr.p] = truth_used[pr.t] = true;
        ++matches;
    }
    return scores_from_counts(matches, pred.size(), truth.size());
}

double mae(std::span<const double> pred, std::span<const double> truth)
{
    if (pred.empty() || pred.size() != truth.size()) {
        throw std::invalid_argument("mae needs equal-length, non-empty series");
    }
    double sum = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) sum += std::abs(pred[i] - truth[i]);
    return sum / static_cast<double>(pred.size());
}

ConstantBaseline::ConstantBaseline(std::span<const double> train_targets)
{
    if (train_targets.empty()) throw std::invalid_argument("constant baseline needs at least one training target");
    mean_ = std::accumulate(train_targets.begin(), train_targets.end(), 0.0) /
            static_cast<double>(train_targets.size());
}

}  // namespace deskmon::challenge
