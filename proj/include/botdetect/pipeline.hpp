#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "botdetect/corpus.hpp"
#include "botdetect/dataset.hpp"
#include "botdetect/log_entry.hpp"
#include "botdetect/model.hpp"
#include "botdetect/sessionize.hpp"
#include "botdetect/simple_features.hpp"
#include "botdetect/topic_model.hpp"

namespace botdetect {

namespace fs = std::filesystem;

/// An error raised while running a named pipeline stage.
class StageError : public std::runtime_error {
public:
    StageError(std::string stage, const std::string& message)
        : std::runtime_error(stage + ": " + message), stage_(std::move(stage)) {}
    const std::string& stage() const noexcept { return stage_; }

private:
    std::string stage_;
};

/// Label resources; unset paths fall back to the built-in defaults.
struct LabelResources {
    std::optional<fs::path> ua_patterns;
    std::vector<fs::path> robot_lists;
    std::optional<fs::path> robot_exclusions;
    std::optional<fs::path> manual_labels;
};

/// Everything the `pipeline` subcommand needs. Loaded from JSON; every key is
/// optional and unknown keys are rejected.
struct PipelineConfig {
    fs::path logs;
    fs::path corpus;
    fs::path output_dir = "botdetect-out";
    std::optional<fs::path> resource_rules;
    LabelResources labels;

    LogDialect dialect = LogDialect::CombinedApp;
    SessionizeParams sessionize;
    std::size_t min_token_length = 3;
    std::size_t min_document_frequency = 2;
    LdaParams lda;
    std::size_t top_m = 10;
    SimpleFeatureOptions simple;
    double ps_impute = 1.0;
    double train_fraction = 0.7;
    TrainParams train;
    std::vector<double> curve_fractions = default_curve_fractions();
    std::uint64_t seed = 1;

    /// Copies the seed into every stochastic stage.
    void apply_seed(std::uint64_t s);
    /// Throws InvalidConfig.
    void validate() const;

    static PipelineConfig from_json_text(const std::string& text);
    static PipelineConfig load(const fs::path& path);
    std::string to_json_text() const;
};

/// Throws StageError naming the artifact when `path` does not exist.
void require_artifact(const std::string& stage, const std::string& artifact, const fs::path& path);

struct IngestStageOutput {
    fs::path entries;
    fs::path report;
};
IngestStageOutput run_ingest(const fs::path& logs, LogDialect dialect, const std::optional<fs::path>& rules,
                             const fs::path& out_entries, const fs::path& out_report);

/// Writes the sessions file and, when `out_stats` is set, summary statistics.
void run_sessionize(const fs::path& entries, const SessionizeParams& params, const fs::path& out_sessions,
                    const std::optional<fs::path>& out_stats = std::nullopt);

void run_lda_train(const fs::path& corpus, const PreprocessOptions& preprocess, const LdaParams& params,
                   const fs::path& out_model);

void run_topics_export(const fs::path& model, std::size_t top_m, const fs::path& out_topics);

void run_features(const fs::path& entries, const fs::path& sessions, const fs::path& topics,
                  const SimpleFeatureOptions& options, const fs::path& out_features);

/// Fills the label columns of a feature table; `out_report` receives the
/// per-stage counts.
void run_label(const fs::path& entries, const fs::path& sessions, const fs::path& features,
               const LabelResources& resources, const fs::path& out_dataset,
               const std::optional<fs::path>& out_report = std::nullopt);

void run_split(const fs::path& dataset, double train_fraction, const fs::path& out_train, const fs::path& out_test);

void run_train(const fs::path& train, FeatureSet features, const TrainParams& params, double ps_impute,
               const fs::path& out_model);

/// key=value text plus a JSON twin.
Metrics run_evaluate(const fs::path& model, const fs::path& test, double ps_impute, const fs::path& out_text,
                     const std::optional<fs::path>& out_json = std::nullopt);

void run_score_features(const fs::path& dataset, FeatureSet features, double ps_impute, const fs::path& out);

LearningCurve run_learning_curve(const fs::path& train, const fs::path& test, FeatureSet features,
                                 const TrainParams& params, const std::vector<double>& fractions, double ps_impute,
                                 const fs::path& out);

struct PipelineResult {
    fs::path output_dir;
    fs::path metrics;
    Metrics simple;
    Metrics semantic;
    Metrics all;
};

/// Runs every stage in order, training and evaluating one model per feature
/// set. Artifacts go to config.output_dir.
PipelineResult run_pipeline(const PipelineConfig& config);

void write_metrics(std::ostream& out, const Metrics& m, const std::string& prefix = {});
void write_metrics_json(std::ostream& out, const std::vector<std::pair<std::string, Metrics>>& runs);

}  // namespace botdetect
