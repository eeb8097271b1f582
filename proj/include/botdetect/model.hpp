#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "botdetect/dataset.hpp"
#include "botdetect/gbdt.hpp"
#include "botdetect/logistic.hpp"
#include "botdetect/metrics.hpp"

namespace botdetect {

/// Stable sort by start timestamp; the first ceil(train_frac * N) rows
/// train, the rest test. Throws EmptyDataset, InvalidConfig.
std::pair<LabeledDataset, LabeledDataset> time_ordered_split(const LabeledDataset& ds, double train_frac = 0.7);

/// The same split on a feature table, counting only labeled rows. Unlabeled
/// rows are dropped.
std::pair<FeatureTable, FeatureTable> time_ordered_split(const FeatureTable& table, double train_frac = 0.7);

enum class Algorithm { Gbdt, Logistic };
Algorithm parse_algorithm(std::string_view name);
std::string_view to_string(Algorithm a);

/// A trained model of either kind.
class Classifier {
public:
    Classifier(GbdtModel m) : model_(std::move(m)) {}
    Classifier(LogisticModel m) : model_(std::move(m)) {}

    Algorithm algorithm() const noexcept;
    const std::vector<std::string>& feature_names() const;
    double predict_proba(std::span<const double> x) const;
    bool predict(std::span<const double> x) const { return predict_proba(x) >= 0.5; }
    std::vector<bool> predict(const LabeledDataset& ds) const;

    void save(std::ostream& out) const;
    /// Dispatches on the container's magic line.
    static Classifier load(std::istream& in);
    static Classifier load(const std::filesystem::path& path);

    const GbdtModel* gbdt() const noexcept { return std::get_if<GbdtModel>(&model_); }
    const LogisticModel* logistic() const noexcept { return std::get_if<LogisticModel>(&model_); }

private:
    std::variant<GbdtModel, LogisticModel> model_;
};

struct TrainParams {
    Algorithm algorithm = Algorithm::Gbdt;
    GbdtParams gbdt;
    LogisticParams logistic;
};

Classifier train_classifier(const LabeledDataset& train, const TrainParams& params = {});

/// Projects the dataset onto the model's features by name, so a model
/// trained on a subset can score a table holding all features. Throws
/// DimensionMismatch when a feature is unavailable.
LabeledDataset align_features(const LabeledDataset& ds, const std::vector<std::string>& names);

Metrics evaluate_model(const Classifier& model, const LabeledDataset& ds);

struct CurvePoint {
    double fraction = 0.0;
    std::size_t train_rows = 0;
    double train_metric = 0.0;  // balanced accuracy on the training prefix
    double test_metric = 0.0;   // balanced accuracy on the fixed test set
};

struct LearningCurve {
    std::vector<CurvePoint> points;
    std::vector<std::string> warnings;
};

std::vector<double> default_curve_fractions();

/// Trains on growing time-ordered prefixes of `train`. Prefixes holding a
/// single class are skipped with a warning.
LearningCurve learning_curve(const LabeledDataset& train, const LabeledDataset& test, const TrainParams& params,
                             const std::vector<double>& fractions = default_curve_fractions());

/// Splits first, then as above.
LearningCurve learning_curve(const LabeledDataset& ds, const TrainParams& params, double train_frac = 0.7,
                             const std::vector<double>& fractions = default_curve_fractions());

}  // namespace botdetect
