#pragma once

#include <span>
#include <string>
#include <vector>

#include "botdetect/dataset.hpp"

namespace botdetect {

struct FeatureScore {
    std::string name;
    double score = 0.0;
};

/// One-way ANOVA F between the robot and human groups: between-group mean
/// square over within-group mean square. A feature that is constant overall
/// scores 0; one that is constant within each group but differs between
/// them scores +infinity.
double anova_f_statistic(std::span<const double> values, const std::vector<bool>& robot);

/// Frequency-style chi-square: per-class sums of the feature against the
/// sums expected if the feature were spread in proportion to class sizes.
/// Throws std::domain_error on a negative value; chi2_scores reports the same
/// condition as NegativeFeature with the feature's name.
double chi2_statistic(std::span<const double> values, const std::vector<bool>& robot);

/// Sorted by descending score; ties keep feature order. Throw
/// SingleClassInput unless both classes are present.
std::vector<FeatureScore> anova_f_scores(const LabeledDataset& ds);
/// Also throws NegativeFeature(name) if any value is negative.
std::vector<FeatureScore> chi2_scores(const LabeledDataset& ds);

}  // namespace botdetect
