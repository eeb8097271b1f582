// botdetect: command-line front end for the robot detection pipeline.

#include <cstring>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "botdetect/errors.hpp"
#include "botdetect/pipeline.hpp"
#include "botdetect/synth.hpp"

namespace {

using namespace botdetect;

// The config file supplies the starting values of every flag, so it has to
// be read before the parser is built.
std::optional<std::string> find_config(int argc, char** argv) {
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if (a == "--config" && i + 1 < argc) return std::string(argv[i + 1]);
        if (a.rfind("--config=", 0) == 0) return a.substr(9);
    }
    return std::nullopt;
}


std::optional<fs::path> opt_path(const std::string& s) {
    if (s.empty()) return std::nullopt;
    return fs::path(s);
}

void add_gbdt_flags(CLI::App* cmd, PipelineConfig& c, std::string& algorithm) {
    cmd->add_option("--algo", algorithm, "Classifier: gbdt or logistic")->capture_default_str();
    cmd->add_option("--n-trees", c.train.gbdt.n_trees, "Boosting rounds")->capture_default_str();
    cmd->add_option("--max-depth", c.train.gbdt.max_depth, "Maximum tree depth")->capture_default_str();
    cmd->add_option("--learning-rate", c.train.gbdt.learning_rate, "Shrinkage per tree")->capture_default_str();
    cmd->add_option("--min-leaf", c.train.gbdt.min_leaf, "Minimum rows per leaf")->capture_default_str();
    cmd->add_option("--subsample", c.train.gbdt.subsample, "Row fraction per tree")->capture_default_str();
    cmd->add_option("--l2", c.train.logistic.l2, "Logistic-regression L2 penalty")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
    PipelineConfig cfg;
    std::string config_path;
    try {
        if (const auto p = find_config(argc, argv)) {
            config_path = *p;
            cfg = PipelineConfig::load(*p);
        }
    } catch (const std::exception& e) {
        std::cerr << "botdetect: config: " << e.what() << '\n';
        return 2;
    }

    CLI::App app{"Offline web-robot detection for access logs of content sites"};
    app.require_subcommand(1);
    app.add_option("--config", config_path, "JSON pipeline config; its values become the flag defaults");
    std::uint64_t seed = cfg.seed;
    app.add_option("--seed", seed, "Seed for every stochastic stage")->capture_default_str();
    std::string algorithm(to_string(cfg.train.algorithm));
    std::string dialect(to_string(cfg.dialect));
    std::string feature_set = "all";
    std::string out;

    // ingest
    auto* ingest_cmd = app.add_subcommand("ingest", "Parse a log, keep article requests");
    std::string logs = cfg.logs.string(), rules = cfg.resource_rules ? cfg.resource_rules->string() : "";
    std::string report;
    ingest_cmd->add_option("--logs", logs, "Access log, plain or gzip");
    ingest_cmd->add_option("--dialect", dialect, "combined or combined+app")->capture_default_str();
    ingest_cmd->add_option("--rules", rules, "Resource rules file (default: built-in)");
    ingest_cmd->add_option("--out", out, "Entries file to write")->required();
    ingest_cmd->add_option("--report", report, "Ingest report to write (default: <out>.report)");

    // sessionize
    auto* sess_cmd = app.add_subcommand("sessionize", "Group entries into sessions per (IP, user-agent)");
    std::string entries, stats;
    sess_cmd->add_option("--entries", entries, "Entries file from ingest");
    sess_cmd->add_option("--timeout-secs", cfg.sessionize.timeout_seconds, "Inactivity timeout in seconds")
        ->capture_default_str();
    sess_cmd->add_option("--min-requests", cfg.sessionize.min_requests, "Drop shorter sessions")
        ->capture_default_str();
    sess_cmd->add_option("--out", out, "Sessions file to write")->required();
    sess_cmd->add_option("--stats", stats, "Summary statistics to write");

    // lda-train
    auto* lda_cmd = app.add_subcommand("lda-train", "Fit LDA to the document corpus");
    std::string corpus = cfg.corpus.string();
    double alpha = cfg.lda.alpha.value_or(0.0);
    lda_cmd->add_option("--corpus", corpus, "Corpus file, doc_id<TAB>text per line");
    lda_cmd->add_option("--k", cfg.lda.k, "Number of topics")->capture_default_str();
    lda_cmd->add_option("--alpha", alpha, "Document-topic prior (default 50/k)");
    lda_cmd->add_option("--beta", cfg.lda.beta, "Topic-word prior")->capture_default_str();
    lda_cmd->add_option("--iterations", cfg.lda.iterations, "Gibbs sweeps")->capture_default_str();
    lda_cmd->add_option("--min-token-length", cfg.min_token_length, "Shorter tokens are dropped")
        ->capture_default_str();
    lda_cmd->add_option("--min-df", cfg.min_document_frequency, "Drop terms in fewer documents")
        ->capture_default_str();
    lda_cmd->add_option("--out", out, "Model file to write")->required();

    // topics-export
    auto* topics_cmd = app.add_subcommand("topics-export", "Write top-m topic vectors per document");
    std::string lda_model;
    topics_cmd->add_option("--model", lda_model, "LDA model file");
    topics_cmd->add_option("--top-m", cfg.top_m, "Topics kept per document")->capture_default_str();
    topics_cmd->add_option("--out", out, "Topics file to write")->required();

    // features
    auto* feat_cmd = app.add_subcommand("features", "Compute simple and semantic session features");
    std::string sessions, topics;
    feat_cmd->add_option("--entries", entries, "Entries file");
    feat_cmd->add_option("--sessions", sessions, "Sessions file");
    feat_cmd->add_option("--topics", topics, "Topics file");
    bool ignore_query = !cfg.simple.repeated_includes_query;
    feat_cmd->add_flag("--repeated-ignore-query", ignore_query,
                       "Treat paths differing only in the query string as the same page");
    feat_cmd->add_option("--out", out, "Feature table to write")->required();

    // label
    auto* label_cmd = app.add_subcommand("label", "Label sessions robot, human or unlabeled");
    std::string features, ua_patterns, exclusions, manual;
    std::vector<std::string> robot_lists;
    if (cfg.labels.ua_patterns) ua_patterns = cfg.labels.ua_patterns->string();
    if (cfg.labels.robot_exclusions) exclusions = cfg.labels.robot_exclusions->string();
    if (cfg.labels.manual_labels) manual = cfg.labels.manual_labels->string();
    for (const auto& p : cfg.labels.robot_lists) robot_lists.push_back(p.string());
    label_cmd->add_option("--entries", entries, "Entries file");
    label_cmd->add_option("--sessions", sessions, "Sessions file");
    label_cmd->add_option("--features", features, "Feature table");
    label_cmd->add_option("--ua-patterns", ua_patterns, "User-agent class database (default: built-in)");
    label_cmd->add_option("--robot-list", robot_lists, "Robot regex list, repeatable (default: built-in)");
    label_cmd->add_option("--robot-exclusions", exclusions, "Patterns dropped from the robot lists");
    label_cmd->add_option("--manual-labels", manual, "ua<TAB>robot|human verdicts for unknown user-agents");
    label_cmd->add_option("--report", report, "Label counts to write");
    label_cmd->add_option("--out", out, "Labeled feature table to write")->required();

    // split
    auto* split_cmd = app.add_subcommand("split", "Time-ordered train/test split");
    std::string dataset, train_out, test_out;
    split_cmd->add_option("--dataset", dataset, "Labeled feature table");
    split_cmd->add_option("--train-fraction", cfg.train_fraction, "Share of rows for training")
        ->capture_default_str();
    split_cmd->add_option("--train-out", train_out, "Training table to write")->required();
    split_cmd->add_option("--test-out", test_out, "Test table to write")->required();

    // train
    auto* train_cmd = app.add_subcommand("train", "Train a classifier");
    std::string train_path;
    train_cmd->add_option("--features", train_path, "Training feature table (from split)");
    train_cmd->add_option("--feature-set", feature_set, "simple, semantic or all")->capture_default_str();
    add_gbdt_flags(train_cmd, cfg, algorithm);
    train_cmd->add_option("--out", out, "Model file to write")->required();

    // evaluate
    auto* eval_cmd = app.add_subcommand("evaluate", "Score a model on a test table");
    std::string model, test_path, json_out;
    eval_cmd->add_option("--model", model, "Model file");
    eval_cmd->add_option("--test", test_path, "Test feature table");
    eval_cmd->add_option("--out", out, "Metrics report (key=value) to write")->required();
    eval_cmd->add_option("--json", json_out, "Metrics report (JSON) to write");

    // score-features
    auto* score_cmd = app.add_subcommand("score-features", "ANOVA F and chi-square feature scores");
    score_cmd->add_option("--dataset", dataset, "Labeled feature table");
    score_cmd->add_option("--feature-set", feature_set, "simple, semantic or all")->capture_default_str();
    score_cmd->add_option("--out", out, "Scores table to write")->required();

    // learning-curve
    auto* curve_cmd = app.add_subcommand("learning-curve", "Balanced accuracy over growing training prefixes");
    curve_cmd->add_option("--train", train_path, "Training feature table");
    curve_cmd->add_option("--test", test_path, "Test feature table");
    curve_cmd->add_option("--feature-set", feature_set, "simple, semantic or all")->capture_default_str();
    curve_cmd->add_option("--fractions", cfg.curve_fractions, "Training fractions")->capture_default_str();
    add_gbdt_flags(curve_cmd, cfg, algorithm);
    curve_cmd->add_option("--out", out, "Curve table to write")->required();

    // synth
    auto* synth_cmd = app.add_subcommand("synth", "Generate a labeled synthetic corpus and access log");
    SynthConfig sc;
    std::string out_dir;
    synth_cmd->add_option("--out-dir", out_dir, "Directory for corpus.tsv, access.log, truth.tsv")->required();
    synth_cmd->add_option("--docs", sc.n_docs, "Documents")->capture_default_str();
    synth_cmd->add_option("--vocab", sc.vocab_size, "Vocabulary size")->capture_default_str();
    synth_cmd->add_option("--clusters", sc.n_clusters, "Topical clusters")->capture_default_str();
    synth_cmd->add_option("--humans", sc.n_human_sessions, "Human sessions")->capture_default_str();
    synth_cmd->add_option("--bots", sc.n_bot_sessions, "Robot sessions")->capture_default_str();
    synth_cmd->add_option("--stickiness", sc.human_cluster_stickiness, "Human in-cluster probability")
        ->capture_default_str();
    synth_cmd->add_option("--bot-uniformity", sc.bot_uniformity, "Robot site-wide page probability")
        ->capture_default_str();
    synth_cmd->add_option("--logged-in-fraction", sc.logged_in_fraction, "Humans with a username")
        ->capture_default_str();
    synth_cmd->add_option("--bot-human-timing", sc.bot_human_timing_fraction, "Robots with human pacing")
        ->capture_default_str();
    synth_cmd->add_option("--session-length-mean", sc.session_length_mean, "Mean article requests per session")
        ->capture_default_str();
    synth_cmd->add_option("--days", sc.days, "Length of the log in days")->capture_default_str();
    synth_cmd->add_flag("--mask-bots", sc.mask_bots, "Give robots browser user-agents");

    // pipeline
    auto* pipe_cmd = app.add_subcommand("pipeline", "Run every stage and evaluate all three feature sets");
    std::string pipe_out = cfg.output_dir.string();
    pipe_cmd->add_option("--logs", logs, "Access log");
    pipe_cmd->add_option("--corpus", corpus, "Corpus file");
    pipe_cmd->add_option("--out-dir", pipe_out, "Directory for every artifact")->capture_default_str();
    pipe_cmd->add_option("--dialect", dialect, "combined or combined+app")->capture_default_str();
    pipe_cmd->add_option("--timeout-secs", cfg.sessionize.timeout_seconds, "Inactivity timeout in seconds")
        ->capture_default_str();
    pipe_cmd->add_option("--min-requests", cfg.sessionize.min_requests, "Drop shorter sessions")
        ->capture_default_str();
    pipe_cmd->add_option("--k", cfg.lda.k, "Number of topics")->capture_default_str();
    pipe_cmd->add_option("--iterations", cfg.lda.iterations, "Gibbs sweeps")->capture_default_str();
    pipe_cmd->add_option("--top-m", cfg.top_m, "Topics kept per document")->capture_default_str();
    pipe_cmd->add_option("--train-fraction", cfg.train_fraction, "Share of rows for training")
        ->capture_default_str();
    add_gbdt_flags(pipe_cmd, cfg, algorithm);

    CLI11_PARSE(app, argc, argv);

    std::string stage = app.get_subcommands().front()->get_name();
    try {
        cfg.apply_seed(seed);
        cfg.train.algorithm = parse_algorithm(algorithm);
        const auto dia = parse_dialect(dialect);
        const auto set = parse_feature_set(feature_set);

        if (*ingest_cmd) {
            const auto res = run_ingest(logs, dia, opt_path(rules), out, report.empty() ? out + ".report" : report);
            std::cerr << "ingest: wrote " << res.entries.string() << '\n';
        } else if (*sess_cmd) {
            run_sessionize(entries, cfg.sessionize, out, opt_path(stats));
        } else if (*lda_cmd) {
            if (lda_cmd->count("--alpha") > 0 || cfg.lda.alpha) cfg.lda.alpha = alpha;
            PreprocessOptions pre;
            pre.min_token_length = cfg.min_token_length;
            pre.min_document_frequency = cfg.min_document_frequency;
            run_lda_train(corpus, pre, cfg.lda, out);
        } else if (*topics_cmd) {
            run_topics_export(lda_model, cfg.top_m, out);
        } else if (*feat_cmd) {
            cfg.simple.repeated_includes_query = !ignore_query;
            run_features(entries, sessions, topics, cfg.simple, out);
        } else if (*label_cmd) {
            LabelResources res;
            res.ua_patterns = opt_path(ua_patterns);
            for (const auto& p : robot_lists) res.robot_lists.emplace_back(p);
            res.robot_exclusions = opt_path(exclusions);
            res.manual_labels = opt_path(manual);
            run_label(entries, sessions, features, res, out, opt_path(report));
        } else if (*split_cmd) {
            run_split(dataset, cfg.train_fraction, train_out, test_out);
        } else if (*train_cmd) {
            cfg.validate();
            run_train(train_path, set, cfg.train, cfg.ps_impute, out);
        } else if (*eval_cmd) {
            const auto m = run_evaluate(model, test_path, cfg.ps_impute, out, opt_path(json_out));
            write_metrics(std::cout, m);
        } else if (*score_cmd) {
            run_score_features(dataset, set, cfg.ps_impute, out);
        } else if (*curve_cmd) {
            cfg.validate();
            const auto curve =
                run_learning_curve(train_path, test_path, set, cfg.train, cfg.curve_fractions, cfg.ps_impute, out);
            for (const auto& w : curve.warnings) std::cerr << "learning-curve: warning: " << w << '\n';
        } else if (*synth_cmd) {
            sc.seed = seed;
            const auto files = write_synth(generate(sc), out_dir);
            std::cerr << "synth: wrote " << files.corpus.string() << ", " << files.log.string() << ", "
                      << files.truth.string() << '\n';
        } else if (*pipe_cmd) {
            cfg.logs = logs;
            cfg.corpus = corpus;
            cfg.output_dir = pipe_out;
            cfg.dialect = dia;
            const auto result = run_pipeline(cfg);
            write_metrics(std::cout, result.all, "all.");
            std::cerr << "pipeline: metrics in " << result.metrics.string() << '\n';
        }
    } catch (const StageError& e) {
        std::cerr << "botdetect: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "botdetect: " << stage << ": " << e.what() << '\n';
        return 1;
    }
    return 0;
}
