#include "botdetect/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <sstream>

#include "botdetect/errors.hpp"
#include "botdetect/text.hpp"

namespace botdetect {

namespace {

std::size_t train_count(std::size_t n, double train_frac) {
    if (!(train_frac > 0.0 && train_frac < 1.0)) {
        throw InvalidConfig("train fraction must lie strictly between 0 and 1, got " + text::format_double(train_frac));
    }
    if (n == 0) throw EmptyDataset("cannot split an empty dataset");
    return std::min(n, static_cast<std::size_t>(std::ceil(train_frac * static_cast<double>(n))));
}

template <typename Row>
std::vector<std::size_t> time_order(const std::vector<Row>& rows) {
    std::vector<std::size_t> idx(rows.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return rows[a].timestamp < rows[b].timestamp; });
    return idx;
}

}  // namespace

std::pair<LabeledDataset, LabeledDataset> time_ordered_split(const LabeledDataset& ds, double train_frac) {
    const std::size_t cut = train_count(ds.rows.size(), train_frac);
    const auto idx = time_order(ds.rows);
    LabeledDataset train{ds.feature_names, {}}, test{ds.feature_names, {}};
    for (std::size_t i = 0; i < idx.size(); ++i) (i < cut ? train : test).rows.push_back(ds.rows[idx[i]]);
    return {std::move(train), std::move(test)};
}

std::pair<FeatureTable, FeatureTable> time_ordered_split(const FeatureTable& table, double train_frac) {
    FeatureTable labeled;
    for (const auto& r : table.rows) {
        if (r.label != Verdict::Unlabeled) labeled.rows.push_back(r);
    }
    const std::size_t cut = train_count(labeled.rows.size(), train_frac);
    const auto idx = time_order(labeled.rows);
    FeatureTable train, test;
    for (std::size_t i = 0; i < idx.size(); ++i) (i < cut ? train : test).rows.push_back(labeled.rows[idx[i]]);
    return {std::move(train), std::move(test)};
}

Algorithm parse_algorithm(std::string_view name) {
    if (name == "gbdt" || name == "gb") return Algorithm::Gbdt;
    if (name == "logistic" || name == "logreg") return Algorithm::Logistic;
    throw InvalidConfig("unknown algorithm '" + std::string(name) + "' (expected gbdt or logistic)");
}

std::string_view to_string(Algorithm a) { return a == Algorithm::Gbdt ? "gbdt" : "logistic"; }

Algorithm Classifier::algorithm() const noexcept {
    return std::holds_alternative<GbdtModel>(model_) ? Algorithm::Gbdt : Algorithm::Logistic;
}

const std::vector<std::string>& Classifier::feature_names() const {
    return std::visit([](const auto& m) -> const std::vector<std::string>& { return m.feature_names; }, model_);
}

double Classifier::predict_proba(std::span<const double> x) const {
    return std::visit([&](const auto& m) { return m.predict_proba(x); }, model_);
}

std::vector<bool> Classifier::predict(const LabeledDataset& ds) const {
    const auto aligned = align_features(ds, feature_names());
    std::vector<bool> out;
    out.reserve(aligned.rows.size());
    for (const auto& r : aligned.rows) out.push_back(predict(r.x));
    return out;
}

void Classifier::save(std::ostream& out) const {
    std::visit([&](const auto& m) { m.save(out); }, model_);
}

Classifier Classifier::load(std::istream& in) {
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string body = buf.str();
    std::istringstream src(body);
    if (text::starts_with(body, "botdetect-gbdt ")) return Classifier(GbdtModel::load(src));
    if (text::starts_with(body, "botdetect-logreg ")) return Classifier(LogisticModel::load(src));
    throw FormatError("not a model file (unknown magic line)");
}

Classifier Classifier::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open model '" + path.string() + "'");
    return load(in);
}

Classifier train_classifier(const LabeledDataset& train, const TrainParams& params) {
    if (params.algorithm == Algorithm::Logistic) return Classifier(train_logistic(train, params.logistic));
    return Classifier(train_gbdt(train, params.gbdt));
}

LabeledDataset align_features(const LabeledDataset& ds, const std::vector<std::string>& names) {
    if (ds.feature_names == names) return ds;
    std::vector<std::size_t> idx;
    for (const auto& n : names) {
        const auto it = std::find(ds.feature_names.begin(), ds.feature_names.end(), n);
        if (it == ds.feature_names.end()) throw DimensionMismatch("dataset lacks feature '" + n + "'");
        idx.push_back(static_cast<std::size_t>(it - ds.feature_names.begin()));
    }
    LabeledDataset out;
    out.feature_names = names;
    out.rows.reserve(ds.rows.size());
    for (const auto& r : ds.rows) {
        Sample s{r.session_id, r.timestamp, {}, r.robot, {}};
        for (auto j : idx) {
            s.x.push_back(r.x[j]);
            s.missing.push_back(j < r.missing.size() && r.missing[j]);
        }
        out.rows.push_back(std::move(s));
    }
    return out;
}

Metrics evaluate_model(const Classifier& model, const LabeledDataset& ds) {
    return evaluate(model.predict(ds), ds.labels());
}

std::vector<double> default_curve_fractions() {
    std::vector<double> f;
    for (int i = 1; i <= 10; ++i) f.push_back(i / 10.0);
    return f;
}

LearningCurve learning_curve(const LabeledDataset& train, const LabeledDataset& test, const TrainParams& params,
                             const std::vector<double>& fractions) {
    if (train.rows.empty()) throw EmptyDataset("learning curve needs a non-empty training set");
    if (test.rows.empty()) throw EmptyDataset("learning curve needs a non-empty test set");
    std::vector<std::size_t> idx(train.rows.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return train.rows[a].timestamp < train.rows[b].timestamp; });

    LearningCurve curve;
    for (double f : fractions) {
        if (!(f > 0.0 && f <= 1.0)) throw InvalidConfig("curve fraction must lie in (0, 1]");
        const auto n = std::max<std::size_t>(
            1, std::min(idx.size(), static_cast<std::size_t>(std::ceil(f * static_cast<double>(idx.size())))));
        LabeledDataset prefix{train.feature_names, {}};
        for (std::size_t i = 0; i < n; ++i) prefix.rows.push_back(train.rows[idx[i]]);
        const auto robots = prefix.robots();
        if (robots == 0 || robots == n) {
            curve.warnings.push_back("fraction " + text::format_double(f) + ": " + std::to_string(n) +
                                     " training rows hold a single class, point skipped");
            continue;
        }
        const auto model = train_classifier(prefix, params);
        curve.points.push_back(CurvePoint{f, n, evaluate_model(model, prefix).balanced_accuracy,
                                          evaluate_model(model, test).balanced_accuracy});
    }
    return curve;
}

LearningCurve learning_curve(const LabeledDataset& ds, const TrainParams& params, double train_frac,
                             const std::vector<double>& fractions) {
    const auto [train, test] = time_ordered_split(ds, train_frac);
    return learning_curve(train, test, params, fractions);
}

}  // namespace botdetect
