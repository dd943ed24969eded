#pragma once

#include "deskmon/session/time.hpp"

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace deskmon::challenge {

struct ScoreSet {
    std::vector<double> genuine;
    std::vector<double> impostor;
    bool higher_is_genuine = true;
};

struct DetPoint {
    double threshold = 0.0;
    double far = 0.0;
    double frr = 0.0;

    bool operator==(const DetPoint&) const = default;
};

struct EerResult {
    double eer = 0.0;
    double threshold = 0.0;
};

/// FAR and FRR at every candidate threshold: one below all scores, the
/// midpoints of the sorted distinct scores, and one above all scores.
/// A score is on the genuine side when it is >= the threshold (<= when
/// higher_is_genuine is false). Throws std::invalid_argument on empty lists.
std::vector<DetPoint> det_curve(const ScoreSet& scores);

/// First threshold where FAR <= FRR; linear interpolation of FAR/FRR against
/// the previous threshold when the crossing is not exact.
EerResult compute_eer(const ScoreSet& scores);

/// CSV with header "threshold,far,frr".
std::string det_to_csv(std::span<const DetPoint> points);

struct Interval {
    SessionTime start;
    SessionTime end;

    bool operator==(const Interval&) const = default;
    double seconds() const { return static_cast<double>(end.micros - start.micros) * 1e-6; }
};

double iou(const Interval& a, const Interval& b);

struct IntervalScores {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::size_t matches = 0;
    std::size_t predicted = 0;
    std::size_t truth = 0;
};

/// Greedy one-to-one matching by descending IoU (ties by prediction then
/// truth index); a pair matches when IoU >= iou_min. A ratio with an empty
/// denominator is 1 when both sets are empty and 0 otherwise.
IntervalScores interval_f1(std::span<const Interval> pred, std::span<const Interval> truth, double iou_min = 0.3);

/// Scores from pooled match counts, same empty-set conventions as interval_f1.
IntervalScores scores_from_counts(std::size_t matches, std::size_t predicted, std::size_t truth);

/// Mean absolute error. Throws std::invalid_argument on empty or mismatched input.
double mae(std::span<const double> pred, std::span<const double> truth);

/// Predicts the training mean for every input.
class ConstantBaseline {
public:
    /// Throws std::invalid_argument when `train_targets` is empty.
    explicit ConstantBaseline(std::span<const double> train_targets);

    double predict() const { return mean_; }
    template <class Input>
    double predict(const Input&) const
    {
        return mean_;
    }

private:
    double mean_ = 0.0;
};

}  // namespace deskmon::challenge
