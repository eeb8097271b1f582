#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "botdetect/dataset.hpp"

namespace botdetect {

struct GbdtParams {
    std::size_t n_trees = 200;
    std::size_t max_depth = 3;
    double learning_rate = 0.1;
    std::size_t min_leaf = 5;
    /// Fraction of rows each tree is fit on; 1 uses every row and makes the
    /// seed irrelevant.
    double subsample = 1.0;
    std::uint64_t seed = 1;

    void validate() const;
    bool operator==(const GbdtParams&) const = default;
};

/// Axis-aligned binary regression tree. Rows with x[feature] <= threshold go
/// left. Node 0 is the root.
struct RegressionTree {
    struct Node {
        int feature = -1;  // -1 marks a leaf
        double threshold = 0.0;
        double value = 0.0;  // leaf output
        int left = -1;
        int right = -1;

        bool is_leaf() const noexcept { return feature < 0; }
        bool operator==(const Node&) const = default;
    };

    std::vector<Node> nodes;

    double predict(std::span<const double> x) const;
    std::size_t depth() const;
    bool operator==(const RegressionTree&) const = default;
};

/// Binary logistic boosting model:
/// p(robot | x) = sigmoid(base_score + learning_rate * sum of tree outputs).
struct GbdtModel {
    std::vector<std::string> feature_names;
    double base_score = 0.0;  // prior log-odds
    GbdtParams params;
    std::vector<RegressionTree> trees;

    double decision_function(std::span<const double> x) const;
    /// Throws DimensionMismatch.
    double predict_proba(std::span<const double> x) const;
    /// Robot iff probability >= 0.5.
    bool predict(std::span<const double> x) const { return predict_proba(x) >= 0.5; }

    /// Text container, `botdetect-gbdt v1`: header lines with the feature
    /// names and parameters, then per tree a `tree <i> <nodes>` line followed
    /// by the nodes in preorder, `S <feature> <threshold>` for splits and
    /// `L <value>` for leaves, then `end`.
    void save(std::ostream& out) const;
    static GbdtModel load(std::istream& in);

    bool operator==(const GbdtModel&) const = default;
};

/// Stagewise fit of regression trees to the logistic-loss gradient. Splits
/// maximize squared-gradient reduction; each leaf takes a Newton step scaled
/// by the learning rate, halved until that leaf's training loss does not go
/// up, so the training loss never increases from one tree to the next.
/// loss_trace, when given, receives the training loss of the base score
/// followed by the loss after each tree. Throws SingleClassInput,
/// EmptyDataset.
GbdtModel train_gbdt(const LabeledDataset& train, const GbdtParams& params = {},
                     std::vector<double>* loss_trace = nullptr);

/// Mean binary log-loss of the model on a dataset.
double log_loss(const GbdtModel& model, const LabeledDataset& ds);

}  // namespace botdetect
