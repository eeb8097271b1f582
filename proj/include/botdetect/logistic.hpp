#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "botdetect/dataset.hpp"

namespace botdetect {

struct LogisticParams {
    double l2 = 1e-3;
    std::size_t max_iterations = 50;
    double tolerance = 1e-10;

    bool operator==(const LogisticParams&) const = default;
};

/// L2-regularized logistic regression on standardized features, fit by
/// Newton's method. Baseline for the boosted trees.
struct LogisticModel {
    std::vector<std::string> feature_names;
    std::vector<double> mean;
    std::vector<double> scale;
    std::vector<double> weights;
    double bias = 0.0;
    LogisticParams params;

    double decision_function(std::span<const double> x) const;
    double predict_proba(std::span<const double> x) const;
    bool predict(std::span<const double> x) const { return predict_proba(x) >= 0.5; }

    /// `botdetect-logreg v1`, then one `name<TAB>mean<TAB>scale<TAB>weight`
    /// line per feature, `bias=<b>` and `end`.
    void save(std::ostream& out) const;
    static LogisticModel load(std::istream& in);

    bool operator==(const LogisticModel&) const = default;
};

LogisticModel train_logistic(const LabeledDataset& train, const LogisticParams& params = {});

}  // namespace botdetect
