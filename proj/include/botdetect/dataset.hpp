#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "botdetect/labeling.hpp"
#include "botdetect/semantic_features.hpp"
#include "botdetect/simple_features.hpp"

namespace botdetect {

inline constexpr std::size_t kSimpleFeatureCount = 13;
inline constexpr std::size_t kSemanticFeatureCount = 5;
inline constexpr std::size_t kFeatureCount = kSimpleFeatureCount + kSemanticFeatureCount;

/// Column order of every feature table and model: the 13 simple features,
/// then the 5 semantic ones.
const std::array<std::string_view, kFeatureCount>& feature_names();

inline constexpr std::size_t kPageSimilarityIndex = kSimpleFeatureCount + 2;

enum class FeatureSet { Simple, Semantic, All };
FeatureSet parse_feature_set(std::string_view name);
std::string_view to_string(FeatureSet set);
std::vector<std::string> feature_set_names(FeatureSet set);

using FeatureVector = std::array<double, kFeatureCount>;

FeatureVector make_feature_vector(const SimpleFeatures& simple, const SemanticFeatures& semantic);

/// One session of the feature table, labeled or not.
struct FeatureRow {
    std::string session_id;
    std::int64_t timestamp = 0;  // session start, UTC seconds
    FeatureVector values{};
    bool page_similarity_missing = false;
    double coverage = 0.0;
    Verdict label = Verdict::Unlabeled;
    LabelStage stage = LabelStage::None;
    std::string evidence = "-";
};

/// Tab-separated, `# botdetect-features v1` first, then the header row
///
///     session_id  <18 feature names>  label  label_stage  label_evidence  timestamp  coverage
///
/// A missing page_similarity is written as `NA`.
struct FeatureTable {
    std::vector<FeatureRow> rows;

    void write(std::ostream& out) const;
    static FeatureTable read(std::istream& in);
};

struct Sample {
    std::string session_id;
    std::int64_t timestamp = 0;
    std::vector<double> x;
    bool robot = false;
    std::vector<bool> missing;  // per feature, true where the value was imputed
};

/// Binary-labeled feature matrix the model stage works on. Robot is the
/// positive class.
struct LabeledDataset {
    std::vector<std::string> feature_names;
    std::vector<Sample> rows;

    std::size_t dim() const noexcept { return feature_names.size(); }
    std::size_t robots() const;
    std::size_t humans() const { return rows.size() - robots(); }
    std::vector<bool> labels() const;
    std::vector<double> column(std::size_t j) const;
};

/// Keeps the robot/human rows, projects onto `features` and imputes a
/// missing page_similarity with `ps_impute`.
LabeledDataset to_labeled(const FeatureTable& table, const std::vector<std::string>& features,
                          double ps_impute = 1.0);

}  // namespace botdetect
