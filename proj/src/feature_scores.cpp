#include "botdetect/feature_scores.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

#include "botdetect/errors.hpp"

namespace botdetect {

namespace {

void require_both_classes(const std::vector<bool>& robot) {
    const auto pos = std::count(robot.begin(), robot.end(), true);
    if (pos == 0 || pos == static_cast<std::ptrdiff_t>(robot.size())) {
        throw SingleClassInput("feature scoring needs both robot and human rows");
    }
}

std::vector<FeatureScore> sorted(std::vector<FeatureScore> scores) {
    std::stable_sort(scores.begin(), scores.end(),
                     [](const FeatureScore& a, const FeatureScore& b) { return a.score > b.score; });
    return scores;
}

}  // namespace

double anova_f_statistic(std::span<const double> values, const std::vector<bool>& robot) {
    if (values.size() != robot.size()) throw LengthMismatch("values and labels differ in length");
    require_both_classes(robot);
    double sum[2] = {0.0, 0.0};
    double count[2] = {0.0, 0.0};
    for (std::size_t i = 0; i < values.size(); ++i) {
        sum[robot[i]] += values[i];
        count[robot[i]] += 1.0;
    }
    const double n = count[0] + count[1];
    const double mean[2] = {sum[0] / count[0], sum[1] / count[1]};
    const double grand = (sum[0] + sum[1]) / n;
    double within = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double d = values[i] - mean[robot[i]];
        within += d * d;
    }
    double between = 0.0;
    for (int g = 0; g < 2; ++g) between += count[g] * (mean[g] - grand) * (mean[g] - grand);
    // Two groups: df_between = 1, df_within = n - 2.
    const double ms_between = between;
    const double ms_within = n > 2.0 ? within / (n - 2.0) : 0.0;
    if (ms_within <= 0.0) return ms_between > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    return ms_between / ms_within;
}

double chi2_statistic(std::span<const double> values, const std::vector<bool>& robot) {
    if (values.size() != robot.size()) throw LengthMismatch("values and labels differ in length");
    require_both_classes(robot);
    double observed[2] = {0.0, 0.0};
    double count[2] = {0.0, 0.0};
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (values[i] < 0.0) throw std::domain_error("negative feature value");
        observed[robot[i]] += values[i];
        count[robot[i]] += 1.0;
    }
    const double n = count[0] + count[1];
    const double total = observed[0] + observed[1];
    double chi2 = 0.0;
    for (int g = 0; g < 2; ++g) {
        const double expected = total * count[g] / n;
        if (expected > 0.0) chi2 += (observed[g] - expected) * (observed[g] - expected) / expected;
    }
    return chi2;
}

std::vector<FeatureScore> anova_f_scores(const LabeledDataset& ds) {
    const auto y = ds.labels();
    require_both_classes(y);
    std::vector<FeatureScore> out;
    for (std::size_t j = 0; j < ds.dim(); ++j) out.push_back({ds.feature_names[j], anova_f_statistic(ds.column(j), y)});
    return sorted(std::move(out));
}

std::vector<FeatureScore> chi2_scores(const LabeledDataset& ds) {
    const auto y = ds.labels();
    require_both_classes(y);
    std::vector<FeatureScore> out;
    for (std::size_t j = 0; j < ds.dim(); ++j) {
        const auto col = ds.column(j);
        if (std::any_of(col.begin(), col.end(), [](double v) { return v < 0.0; })) {
            throw NegativeFeature(ds.feature_names[j]);
        }
        out.push_back({ds.feature_names[j], chi2_statistic(col, y)});
    }
    return sorted(std::move(out));
}

}  // namespace botdetect
