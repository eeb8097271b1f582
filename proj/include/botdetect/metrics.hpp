#pragma once

#include <cstddef>
#include <vector>

namespace botdetect {

/// Robot is the positive class.
struct Confusion {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t tn = 0;
    std::size_t fn = 0;

    bool operator==(const Confusion&) const = default;
};

/// Ratios with a zero denominator are reported as 0.
struct Metrics {
    double precision = 0.0;
    double recall = 0.0;  // true-positive rate
    double specificity = 0.0;  // true-negative rate
    double f_measure = 0.0;
    double balanced_accuracy = 0.0;
    double g_mean = 0.0;
    Confusion confusion;
};

Metrics metrics_from_confusion(const Confusion& c);

/// Throws LengthMismatch when the vectors differ in length or are empty.
Metrics evaluate(const std::vector<bool>& predicted_robot, const std::vector<bool>& truth_robot);

}  // namespace botdetect
