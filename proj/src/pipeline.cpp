#include "botdetect/pipeline.hpp"

#include <fstream>
#include <functional>
#include <iomanip>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "botdetect/errors.hpp"
#include "botdetect/feature_scores.hpp"
#include "botdetect/ingest.hpp"
#include "botdetect/labeling.hpp"
#include "botdetect/defaults.hpp"
#include "botdetect/semantic_features.hpp"
#include "botdetect/text.hpp"

namespace botdetect {

namespace {

using json = nlohmann::ordered_json;

template <typename F>
auto in_stage(const std::string& stage, F&& body) {
    try {
        return body();
    } catch (const StageError&) {
        throw;
    } catch (const std::exception& e) {
        throw StageError(stage, e.what());
    }
}

std::ifstream open_in(const std::string& stage, const std::string& artifact, const fs::path& path) {
    require_artifact(stage, artifact, path);
    std::ifstream in(path, std::ios::binary);
    if (!in) throw StageError(stage, "cannot read " + artifact + " '" + path.string() + "'");
    return in;
}

std::ofstream open_out(const std::string& stage, const fs::path& path) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw StageError(stage, "cannot write '" + path.string() + "'");
    return out;
}

std::string slurp(const std::string& stage, const std::string& artifact, const fs::path& path) {
    auto in = open_in(stage, artifact, path);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::vector<ClassifiedEntry> load_entries(const std::string& stage, const fs::path& path) {
    auto in = open_in(stage, "entries file", path);
    return read_entries(in);
}

std::vector<Session> load_sessions(const std::string& stage, const fs::path& path,
                                   const std::vector<ClassifiedEntry>& entries) {
    auto in = open_in(stage, "sessions file", path);
    return read_sessions(in, entries);
}

FeatureTable load_table(const std::string& stage, const std::string& artifact, const fs::path& path) {
    auto in = open_in(stage, artifact, path);
    return FeatureTable::read(in);
}

LabeledDataset load_labeled(const std::string& stage, const std::string& artifact, const fs::path& path,
                            const std::vector<std::string>& features, double ps_impute) {
    return to_labeled(load_table(stage, artifact, path), features, ps_impute);
}

json metrics_json(const Metrics& m) {
    return json{{"precision", m.precision},
                {"recall", m.recall},
                {"specificity", m.specificity},
                {"f_measure", m.f_measure},
                {"balanced_accuracy", m.balanced_accuracy},
                {"g_mean", m.g_mean},
                {"tp", m.confusion.tp},
                {"fp", m.confusion.fp},
                {"tn", m.confusion.tn},
                {"fn", m.confusion.fn}};
}

// Strict JSON object reader: each key must be consumed by a handler.
void read_object(const json& obj, const std::string& where,
                 const std::unordered_map<std::string, std::function<void(const json&)>>& handlers) {
    if (!obj.is_object()) throw InvalidConfig(where + " must be an object");
    for (const auto& [key, value] : obj.items()) {
        const auto it = handlers.find(key);
        if (it == handlers.end()) throw InvalidConfig("unknown config key '" + where + "." + key + "'");
        try {
            it->second(value);
        } catch (const json::exception& e) {
            throw InvalidConfig("config key '" + where + "." + key + "': " + e.what());
        }
    }
}

template <typename T>
std::function<void(const json&)> set(T& target) {
    return [&target](const json& v) {
        if constexpr (std::is_same_v<T, bool>) {
            if (!v.is_boolean()) throw InvalidConfig("expected true or false, got " + v.dump());
        } else if constexpr (std::is_unsigned_v<T>) {
            if (!v.is_number_unsigned()) throw InvalidConfig("expected a non-negative integer, got " + v.dump());
        }
        target = v.get<T>();
    };
}

std::function<void(const json&)> set_path(fs::path& target, const fs::path& base) {
    return [&target, base](const json& v) { target = base / fs::path(v.get<std::string>()); };
}

std::function<void(const json&)> set_opt_path(std::optional<fs::path>& target, const fs::path& base) {
    return [&target, base](const json& v) { target = base / fs::path(v.get<std::string>()); };
}

PipelineConfig parse_config(const std::string& text, const fs::path& base) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw InvalidConfig(std::string("config is not valid JSON: ") + e.what());
    }
    PipelineConfig c;
    std::optional<double> alpha;
    bool seed_given = false;
    read_object(
        doc, "config",
        {
            {"logs", set_path(c.logs, base)},
            {"corpus", set_path(c.corpus, base)},
            {"output_dir", set_path(c.output_dir, base)},
            {"resource_rules", set_opt_path(c.resource_rules, base)},
            {"ua_patterns", set_opt_path(c.labels.ua_patterns, base)},
            {"robot_lists",
             [&](const json& v) {
                 c.labels.robot_lists.clear();
                 for (const auto& p : v) c.labels.robot_lists.push_back(base / fs::path(p.get<std::string>()));
             }},
            {"robot_exclusions", set_opt_path(c.labels.robot_exclusions, base)},
            {"manual_labels", set_opt_path(c.labels.manual_labels, base)},
            {"dialect", [&](const json& v) { c.dialect = parse_dialect(v.get<std::string>()); }},
            {"seed",
             [&](const json& v) {
                 set(c.seed)(v);
                 seed_given = true;
             }},
            {"sessionize",
             [&](const json& v) {
                 read_object(v, "sessionize",
                             {{"timeout_secs", set(c.sessionize.timeout_seconds)},
                              {"min_requests", set(c.sessionize.min_requests)}});
             }},
            {"corpus_preprocess",
             [&](const json& v) {
                 read_object(v, "corpus_preprocess",
                             {{"min_token_length", set(c.min_token_length)},
                              {"min_document_frequency", set(c.min_document_frequency)}});
             }},
            {"lda",
             [&](const json& v) {
                 read_object(v, "lda",
                             {{"k", set(c.lda.k)},
                              {"alpha",
                               [&](const json& a) {
                                   if (!a.is_null()) alpha = a.get<double>();
                               }},
                              {"beta", set(c.lda.beta)},
                              {"iterations", set(c.lda.iterations)},
                              {"top_m", set(c.top_m)}});
             }},
            {"features",
             [&](const json& v) {
                 read_object(v, "features",
                             {{"repeated_includes_query", set(c.simple.repeated_includes_query)},
                              {"ps_impute", set(c.ps_impute)}});
             }},
            {"split", [&](const json& v) { read_object(v, "split", {{"train_fraction", set(c.train_fraction)}}); }},
            {"model",
             [&](const json& v) {
                 read_object(v, "model",
                             {{"algorithm",
                               [&](const json& a) { c.train.algorithm = parse_algorithm(a.get<std::string>()); }},
                              {"n_trees", set(c.train.gbdt.n_trees)},
                              {"max_depth", set(c.train.gbdt.max_depth)},
                              {"learning_rate", set(c.train.gbdt.learning_rate)},
                              {"min_leaf", set(c.train.gbdt.min_leaf)},
                              {"subsample", set(c.train.gbdt.subsample)},
                              {"l2", set(c.train.logistic.l2)},
                              {"logistic_iterations", set(c.train.logistic.max_iterations)}});
             }},
            {"learning_curve",
             [&](const json& v) {
                 read_object(v, "learning_curve", {{"fractions", set(c.curve_fractions)}});
             }},
        });
    c.lda.alpha = alpha;
    c.apply_seed(seed_given ? c.seed : 1);
    c.validate();
    return c;
}

std::string default_or(const std::optional<fs::path>& p) { return p ? p->string() : std::string("(built-in)"); }

}  // namespace

void PipelineConfig::apply_seed(std::uint64_t s) {
    seed = s;
    lda.seed = s;
    train.gbdt.seed = s;
}

void PipelineConfig::validate() const {
    if (sessionize.timeout_seconds <= 0) throw InvalidConfig("sessionize.timeout_secs must be positive");
    if (sessionize.min_requests < 1) throw InvalidConfig("sessionize.min_requests must be at least 1");
    if (top_m < 1) throw InvalidConfig("lda.top_m must be at least 1");
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
        throw InvalidConfig("split.train_fraction must lie strictly between 0 and 1");
    }
    if (!(ps_impute >= 0.0 && ps_impute <= 1.0)) throw InvalidConfig("features.ps_impute must lie in [0, 1]");
    for (double f : curve_fractions) {
        if (!(f > 0.0 && f <= 1.0)) throw InvalidConfig("learning_curve.fractions must lie in (0, 1]");
    }
    if (curve_fractions.empty()) throw InvalidConfig("learning_curve.fractions must not be empty");
    try {
        lda.validate();
        train.gbdt.validate();
    } catch (const Error& e) {
        throw InvalidConfig(e.what());
    }
    if (!(train.logistic.l2 >= 0.0)) throw InvalidConfig("model.l2 must be non-negative");
}

PipelineConfig PipelineConfig::from_json_text(const std::string& text) { return parse_config(text, {}); }

PipelineConfig PipelineConfig::load(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw InvalidConfig("cannot open config '" + path.string() + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), path.parent_path());
}

std::string PipelineConfig::to_json_text() const {
    json lists = json::array();
    for (const auto& p : labels.robot_lists) lists.push_back(p.string());
    json doc{
        {"logs", logs.string()},
        {"corpus", corpus.string()},
        {"output_dir", output_dir.string()},
        {"resource_rules", default_or(resource_rules)},
        {"ua_patterns", default_or(labels.ua_patterns)},
        {"robot_lists", lists},
        {"robot_exclusions", default_or(labels.robot_exclusions)},
        {"manual_labels", labels.manual_labels ? labels.manual_labels->string() : std::string("(none)")},
        {"dialect", std::string(to_string(dialect))},
        {"seed", seed},
        {"sessionize", {{"timeout_secs", sessionize.timeout_seconds}, {"min_requests", sessionize.min_requests}}},
        {"corpus_preprocess",
         {{"min_token_length", min_token_length}, {"min_document_frequency", min_document_frequency}}},
        {"lda",
         {{"k", lda.k},
          {"alpha", lda.resolved_alpha()},
          {"beta", lda.beta},
          {"iterations", lda.iterations},
          {"top_m", top_m}}},
        {"features", {{"repeated_includes_query", simple.repeated_includes_query}, {"ps_impute", ps_impute}}},
        {"split", {{"train_fraction", train_fraction}}},
        {"model",
         {{"algorithm", std::string(to_string(train.algorithm))},
          {"n_trees", train.gbdt.n_trees},
          {"max_depth", train.gbdt.max_depth},
          {"learning_rate", train.gbdt.learning_rate},
          {"min_leaf", train.gbdt.min_leaf},
          {"subsample", train.gbdt.subsample},
          {"l2", train.logistic.l2},
          {"logistic_iterations", train.logistic.max_iterations}}},
        {"learning_curve", {{"fractions", curve_fractions}}},
    };
    return doc.dump(2) + "\n";
}

void require_artifact(const std::string& stage, const std::string& artifact, const fs::path& path) {
    if (path.empty()) throw StageError(stage, "no path given for the " + artifact);
    if (!fs::exists(path)) throw StageError(stage, "missing " + artifact + " '" + path.string() + "'");
}

IngestStageOutput run_ingest(const fs::path& logs, LogDialect dialect, const std::optional<fs::path>& rules,
                             const fs::path& out_entries, const fs::path& out_report) {
    const std::string stage = "ingest";
    return in_stage(stage, [&] {
        require_artifact(stage, "log file", logs);
        if (rules) require_artifact(stage, "resource rules", *rules);
        const auto rule_set = rules ? ResourceRuleSet::load(*rules) : ResourceRuleSet::defaults();
        const auto result = ingest_file(logs, dialect, rule_set);
        if (!result.report.io_error.empty()) throw Error("reading '" + logs.string() + "': " + result.report.io_error);
        {
            auto out = open_out(stage, out_entries);
            write_entries(out, result.entries);
        }
        {
            auto out = open_out(stage, out_report);
            out << "dialect=" << to_string(dialect) << '\n';
            write_report(out, result.report);
        }
        return IngestStageOutput{out_entries, out_report};
    });
}

void run_sessionize(const fs::path& entries_path, const SessionizeParams& params, const fs::path& out_sessions,
                    const std::optional<fs::path>& out_stats) {
    const std::string stage = "sessionize";
    in_stage(stage, [&] {
        if (params.timeout_seconds <= 0) throw InvalidConfig("timeout must be positive");
        if (params.min_requests < 1) throw InvalidConfig("min_requests must be at least 1");
        const auto entries = load_entries(stage, entries_path);
        const auto sessions = sessionize(entries, params);
        {
            auto out = open_out(stage, out_sessions);
            write_sessions(out, sessions, params);
        }
        if (out_stats) {
            auto out = open_out(stage, *out_stats);
            if (sessions.empty()) {
                out << "sessions=0\n";
            } else {
                write_stats(out, session_stats(sessions));
            }
        }
    });
}

void run_lda_train(const fs::path& corpus_path, const PreprocessOptions& preprocess, const LdaParams& params,
                   const fs::path& out_model) {
    const std::string stage = "lda-train";
    in_stage(stage, [&] {
        params.validate();
        auto in = open_in(stage, "corpus file", corpus_path);
        const auto raw = read_raw_corpus(in);
        const auto corpus = build_corpus(raw, preprocess);
        const auto model = train_lda(corpus, params);
        auto out = open_out(stage, out_model);
        save_model(out, model);
    });
}

void run_topics_export(const fs::path& model_path, std::size_t top_m, const fs::path& out_topics) {
    const std::string stage = "topics-export";
    in_stage(stage, [&] {
        if (top_m < 1) throw InvalidConfig("top-m must be at least 1");
        auto in = open_in(stage, "LDA model", model_path);
        const auto model = load_model(in);
        auto out = open_out(stage, out_topics);
        TopicTable::from_model(model, top_m).write(out);
    });
}

void run_features(const fs::path& entries_path, const fs::path& sessions_path, const fs::path& topics_path,
                  const SimpleFeatureOptions& options, const fs::path& out_features) {
    const std::string stage = "features";
    in_stage(stage, [&] {
        const auto entries = load_entries(stage, entries_path);
        const auto sessions = load_sessions(stage, sessions_path, entries);
        auto tin = open_in(stage, "topics file", topics_path);
        const auto topics = TopicTable::read(tin);
        FeatureTable table;
        table.rows.reserve(sessions.size());
        for (const auto& s : sessions) {
            const auto simple = extract_simple(s, options);
            const auto semantic = extract_semantic(s, topics);
            FeatureRow row;
            row.session_id = s.id;
            row.timestamp = s.start();
            row.values = make_feature_vector(simple, semantic);
            row.page_similarity_missing = !semantic.page_similarity.has_value();
            row.coverage = semantic.coverage;
            table.rows.push_back(std::move(row));
        }
        auto out = open_out(stage, out_features);
        table.write(out);
    });
}

void run_label(const fs::path& entries_path, const fs::path& sessions_path, const fs::path& features_path,
               const LabelResources& res, const fs::path& out_dataset, const std::optional<fs::path>& out_report) {
    const std::string stage = "label";
    in_stage(stage, [&] {
        const auto entries = load_entries(stage, entries_path);
        const auto sessions = load_sessions(stage, sessions_path, entries);
        auto table = load_table(stage, "features file", features_path);

        const auto db = res.ua_patterns ? UAPatternDB::parse(slurp(stage, "ua pattern db", *res.ua_patterns))
                                        : UAPatternDB::defaults();
        RobotLists lists;
        if (res.robot_lists.empty() && !res.robot_exclusions) {
            lists = RobotLists::defaults();
        } else {
            std::vector<std::pair<std::string, std::string>> named;
            if (res.robot_lists.empty()) {
                named = {{"counter", std::string(defaults::robots_counter())},
                         {"matomo", std::string(defaults::robots_matomo())}};
            }
            for (const auto& p : res.robot_lists) named.emplace_back(p.stem().string(), slurp(stage, "robot list", p));
            const std::string excl = res.robot_exclusions ? slurp(stage, "robot exclusions", *res.robot_exclusions)
                                                          : std::string(defaults::robot_exclusions());
            lists = RobotLists::build(named, excl);
        }
        const auto manual = res.manual_labels ? parse_manual_labels(slurp(stage, "manual labels", *res.manual_labels))
                                              : ManualLabels{};

        LabelReport report;
        const auto labels = label_sessions(sessions, db, lists, manual, &report);
        std::unordered_map<std::string, std::size_t> by_id;
        for (std::size_t i = 0; i < sessions.size(); ++i) by_id.emplace(sessions[i].id, i);
        for (auto& row : table.rows) {
            const auto it = by_id.find(row.session_id);
            if (it == by_id.end()) throw Error("feature row '" + row.session_id + "' has no session in the sessions file");
            const auto& l = labels[it->second];
            row.label = l.verdict;
            row.stage = l.stage;
            row.evidence = l.evidence.empty() ? "-" : l.evidence;
        }
        {
            auto out = open_out(stage, out_dataset);
            table.write(out);
        }
        if (out_report) {
            auto out = open_out(stage, *out_report);
            out << "robot=" << report.robot << '\n'
                << "human=" << report.human << '\n'
                << "unlabeled=" << report.unlabeled << '\n'
                << "conflicts=" << report.conflicts << '\n'
                << "by_ua_classifier=" << report.by_ua_classifier << '\n'
                << "by_robot_list=" << report.by_robot_list << '\n'
                << "by_manual_list=" << report.by_manual_list << '\n'
                << "excluded_patterns=" << lists.excluded() << '\n';
        }
    });
}

void run_split(const fs::path& dataset, double train_fraction, const fs::path& out_train, const fs::path& out_test) {
    const std::string stage = "split";
    in_stage(stage, [&] {
        const auto table = load_table(stage, "dataset file", dataset);
        const auto [train, test] = time_ordered_split(table, train_fraction);
        {
            auto out = open_out(stage, out_train);
            train.write(out);
        }
        auto out = open_out(stage, out_test);
        test.write(out);
    });
}

void run_train(const fs::path& train_path, FeatureSet features, const TrainParams& params, double ps_impute,
               const fs::path& out_model) {
    const std::string stage = "train";
    in_stage(stage, [&] {
        const auto train = load_labeled(stage, "training features file", train_path, feature_set_names(features),
                                        ps_impute);
        const auto model = train_classifier(train, params);
        auto out = open_out(stage, out_model);
        model.save(out);
    });
}

void write_metrics(std::ostream& out, const Metrics& m, const std::string& prefix) {
    out << prefix << "precision=" << text::format_double(m.precision) << '\n'
        << prefix << "recall=" << text::format_double(m.recall) << '\n'
        << prefix << "specificity=" << text::format_double(m.specificity) << '\n'
        << prefix << "f_measure=" << text::format_double(m.f_measure) << '\n'
        << prefix << "balanced_accuracy=" << text::format_double(m.balanced_accuracy) << '\n'
        << prefix << "g_mean=" << text::format_double(m.g_mean) << '\n'
        << prefix << "tp=" << m.confusion.tp << '\n'
        << prefix << "fp=" << m.confusion.fp << '\n'
        << prefix << "tn=" << m.confusion.tn << '\n'
        << prefix << "fn=" << m.confusion.fn << '\n';
}

void write_metrics_json(std::ostream& out, const std::vector<std::pair<std::string, Metrics>>& runs) {
    json doc = json::object();
    for (const auto& [name, m] : runs) doc[name] = metrics_json(m);
    out << doc.dump(2) << '\n';
}

Metrics run_evaluate(const fs::path& model_path, const fs::path& test_path, double ps_impute,
                     const fs::path& out_text, const std::optional<fs::path>& out_json) {
    const std::string stage = "evaluate";
    return in_stage(stage, [&] {
        require_artifact(stage, "model file", model_path);
        const auto model = Classifier::load(model_path);
        const auto test = load_labeled(stage, "test features file", test_path, model.feature_names(), ps_impute);
        if (test.rows.empty()) throw EmptyDataset("test set has no labeled rows");
        const auto m = evaluate_model(model, test);
        {
            auto out = open_out(stage, out_text);
            out << "algorithm=" << to_string(model.algorithm()) << '\n' << "rows=" << test.rows.size() << '\n';
            write_metrics(out, m);
        }
        if (out_json) {
            auto out = open_out(stage, *out_json);
            write_metrics_json(out, {{"test", m}});
        }
        return m;
    });
}

void run_score_features(const fs::path& dataset, FeatureSet features, double ps_impute, const fs::path& out_path) {
    const std::string stage = "score-features";
    in_stage(stage, [&] {
        const auto ds = load_labeled(stage, "dataset file", dataset, feature_set_names(features), ps_impute);
        const auto f = anova_f_scores(ds);
        const auto c = chi2_scores(ds);
        std::unordered_map<std::string, std::pair<std::size_t, double>> chi;
        for (std::size_t i = 0; i < c.size(); ++i) chi.emplace(c[i].name, std::pair{i + 1, c[i].score});
        auto out = open_out(stage, out_path);
        out << "# botdetect-scores v1 rows=" << ds.rows.size() << " robots=" << ds.robots() << '\n'
            << "f_rank\tfeature\tanova_f\tchi2_rank\tchi2\n";
        for (std::size_t i = 0; i < f.size(); ++i) {
            const auto& [rank, score] = chi.at(f[i].name);
            out << i + 1 << '\t' << f[i].name << '\t' << text::format_double(f[i].score) << '\t' << rank << '\t'
                << text::format_double(score) << '\n';
        }
    });
}

LearningCurve run_learning_curve(const fs::path& train_path, const fs::path& test_path, FeatureSet features,
                                 const TrainParams& params, const std::vector<double>& fractions, double ps_impute,
                                 const fs::path& out_path) {
    const std::string stage = "learning-curve";
    return in_stage(stage, [&] {
        const auto names = feature_set_names(features);
        const auto train = load_labeled(stage, "training features file", train_path, names, ps_impute);
        const auto test = load_labeled(stage, "test features file", test_path, names, ps_impute);
        auto curve = learning_curve(train, test, params, fractions);
        auto out = open_out(stage, out_path);
        out << "# botdetect-learning-curve v1 features=" << to_string(features)
            << " algorithm=" << to_string(params.algorithm) << " metric=balanced_accuracy\n";
        for (const auto& w : curve.warnings) out << "# warning: " << w << '\n';
        out << "fraction\ttrain_rows\ttrain_metric\ttest_metric\n";
        for (const auto& p : curve.points) {
            out << text::format_double(p.fraction) << '\t' << p.train_rows << '\t'
                << text::format_double(p.train_metric) << '\t' << text::format_double(p.test_metric) << '\n';
        }
        return curve;
    });
}

PipelineResult run_pipeline(const PipelineConfig& cfg) {
    cfg.validate();
    const fs::path dir = cfg.output_dir;
    in_stage("pipeline", [&] { fs::create_directories(dir); });
    {
        auto out = open_out("pipeline", dir / "config.json");
        out << cfg.to_json_text();
    }

    run_ingest(cfg.logs, cfg.dialect, cfg.resource_rules, dir / "entries.tsv", dir / "ingest_report.txt");
    run_sessionize(dir / "entries.tsv", cfg.sessionize, dir / "sessions.tsv", dir / "session_stats.txt");
    PreprocessOptions pre;
    pre.min_token_length = cfg.min_token_length;
    pre.min_document_frequency = cfg.min_document_frequency;
    run_lda_train(cfg.corpus, pre, cfg.lda, dir / "lda_model.txt");
    run_topics_export(dir / "lda_model.txt", cfg.top_m, dir / "topics.tsv");
    run_features(dir / "entries.tsv", dir / "sessions.tsv", dir / "topics.tsv", cfg.simple, dir / "features.tsv");
    run_label(dir / "entries.tsv", dir / "sessions.tsv", dir / "features.tsv", cfg.labels, dir / "dataset.tsv",
              dir / "label_report.txt");
    run_split(dir / "dataset.tsv", cfg.train_fraction, dir / "train.tsv", dir / "test.tsv");
    run_score_features(dir / "dataset.tsv", FeatureSet::All, cfg.ps_impute, dir / "scores.tsv");

    PipelineResult result;
    result.output_dir = dir;
    std::vector<std::pair<std::string, Metrics>> runs;
    for (auto set : {FeatureSet::Simple, FeatureSet::Semantic, FeatureSet::All}) {
        const std::string name(to_string(set));
        const auto model = dir / ("model_" + name + ".txt");
        run_train(dir / "train.tsv", set, cfg.train, cfg.ps_impute, model);
        const auto m = run_evaluate(model, dir / "test.tsv", cfg.ps_impute, dir / ("metrics_" + name + ".txt"));
        runs.emplace_back(name, m);
        (set == FeatureSet::Simple ? result.simple : set == FeatureSet::Semantic ? result.semantic : result.all) = m;
    }
    run_learning_curve(dir / "train.tsv", dir / "test.tsv", FeatureSet::All, cfg.train, cfg.curve_fractions,
                       cfg.ps_impute, dir / "learning_curve.tsv");

    result.metrics = dir / "metrics.txt";
    {
        auto out = open_out("pipeline", result.metrics);
        for (const auto& [name, m] : runs) write_metrics(out, m, name + ".");
    }
    {
        auto out = open_out("pipeline", dir / "metrics.json");
        write_metrics_json(out, runs);
    }
    return result;
}

}  // namespace botdetect
