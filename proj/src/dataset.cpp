#include "botdetect/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>

#include "botdetect/errors.hpp"
#include "botdetect/text.hpp"

namespace botdetect {

namespace {

constexpr std::string_view kFeaturesHeader = "# botdetect-features v1";
constexpr std::array<std::string_view, 5> kTrailingColumns = {"label", "label_stage", "label_evidence", "timestamp",
                                                              "coverage"};

}  // namespace

const std::array<std::string_view, kFeatureCount>& feature_names() {
    static constexpr std::array<std::string_view, kFeatureCount> kNames = {
        "total_requests", "session_duration", "avg_time",     "std_time",          "repeated_requests",
        "http_2xx",       "http_3xx",         "http_4xx",     "http_5xx",          "pdf_requests",
        "unique_content", "multiple_countries", "web_service", "total_topics",     "unique_topics",
        "page_similarity", "page_variance",   "boolean_page_variance",
    };
    return kNames;
}

FeatureSet parse_feature_set(std::string_view name) {
    if (name == "simple") return FeatureSet::Simple;
    if (name == "semantic") return FeatureSet::Semantic;
    if (name == "all" || name == "simple+semantic") return FeatureSet::All;
    throw InvalidConfig("unknown feature set '" + std::string(name) + "' (expected simple, semantic or all)");
}

std::string_view to_string(FeatureSet set) {
    switch (set) {
        case FeatureSet::Simple: return "simple";
        case FeatureSet::Semantic: return "semantic";
        case FeatureSet::All: return "all";
    }
    return "all";
}

std::vector<std::string> feature_set_names(FeatureSet set) {
    const auto& names = feature_names();
    const std::size_t begin = set == FeatureSet::Semantic ? kSimpleFeatureCount : 0;
    const std::size_t end = set == FeatureSet::Simple ? kSimpleFeatureCount : kFeatureCount;
    return {names.begin() + static_cast<std::ptrdiff_t>(begin), names.begin() + static_cast<std::ptrdiff_t>(end)};
}

FeatureVector make_feature_vector(const SimpleFeatures& s, const SemanticFeatures& m) {
    return FeatureVector{
        static_cast<double>(s.total_requests),
        s.session_duration,
        s.avg_time,
        s.std_time,
        s.repeated_requests,
        s.http_2xx,
        s.http_3xx,
        s.http_4xx,
        s.http_5xx,
        s.pdf_requests,
        static_cast<double>(s.unique_content),
        s.multiple_countries ? 1.0 : 0.0,
        s.web_service ? 1.0 : 0.0,
        static_cast<double>(m.total_topics),
        static_cast<double>(m.unique_topics),
        m.page_similarity.value_or(0.0),
        m.page_variance,
        m.boolean_page_variance,
    };
}

void FeatureTable::write(std::ostream& out) const {
    out << kFeaturesHeader << " rows=" << rows.size() << '\n';
    out << "session_id";
    for (auto n : feature_names()) out << '\t' << n;
    for (auto n : kTrailingColumns) out << '\t' << n;
    out << '\n';
    for (const auto& r : rows) {
        out << r.session_id;
        for (std::size_t j = 0; j < kFeatureCount; ++j) {
            out << '\t';
            if (j == kPageSimilarityIndex && r.page_similarity_missing) {
                out << "NA";
            } else {
                out << text::format_double(r.values[j]);
            }
        }
        out << '\t' << to_string(r.label) << '\t' << to_string(r.stage) << '\t'
            << (r.evidence.empty() ? std::string("-") : text::tsv_safe(r.evidence)) << '\t' << r.timestamp << '\t'
            << text::format_double(r.coverage) << '\n';
    }
}

FeatureTable FeatureTable::read(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || !text::starts_with(line, kFeaturesHeader)) {
        throw FormatError("not a feature table (missing '" + std::string(kFeaturesHeader) + "' header)");
    }
    if (!std::getline(in, line)) throw FormatError("feature table has no header row");
    {
        const auto cols = text::split(line, '\t');
        const std::size_t expected = 1 + kFeatureCount + kTrailingColumns.size();
        bool ok = cols.size() == expected && cols[0] == "session_id";
        for (std::size_t j = 0; ok && j < kFeatureCount; ++j) ok = cols[1 + j] == feature_names()[j];
        for (std::size_t j = 0; ok && j < kTrailingColumns.size(); ++j) ok = cols[1 + kFeatureCount + j] == kTrailingColumns[j];
        if (!ok) throw FormatError("feature table header row does not match this version's column layout");
    }

    FeatureTable table;
    std::size_t line_no = 2;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto where = "feature table line " + std::to_string(line_no);
        const auto cols = text::split(line, '\t');
        if (cols.size() != 1 + kFeatureCount + kTrailingColumns.size()) throw FormatError(where + ": wrong column count");
        FeatureRow r;
        r.session_id = std::string(cols[0]);
        for (std::size_t j = 0; j < kFeatureCount; ++j) {
            const auto cell = cols[1 + j];
            if (j == kPageSimilarityIndex && cell == "NA") {
                r.page_similarity_missing = true;
                r.values[j] = 0.0;
                continue;
            }
            const auto v = text::parse_double(cell);
            if (!v || !std::isfinite(*v)) throw FormatError(where + ": bad value for " + std::string(feature_names()[j]));
            r.values[j] = *v;
        }
        const std::size_t t = 1 + kFeatureCount;
        try {
            r.label = parse_verdict(cols[t]);
            r.stage = parse_label_stage(cols[t + 1]);
        } catch (const Error& e) {
            throw FormatError(where + ": " + e.what());
        }
        r.evidence = std::string(cols[t + 2]);
        const auto ts = text::parse_int(cols[t + 3]);
        const auto cov = text::parse_double(cols[t + 4]);
        if (!ts || !cov) throw FormatError(where + ": bad timestamp or coverage");
        r.timestamp = *ts;
        r.coverage = *cov;
        table.rows.push_back(std::move(r));
    }
    return table;
}

std::size_t LabeledDataset::robots() const {
    return static_cast<std::size_t>(std::count_if(rows.begin(), rows.end(), [](const Sample& s) { return s.robot; }));
}

std::vector<bool> LabeledDataset::labels() const {
    std::vector<bool> y;
    y.reserve(rows.size());
    for (const auto& r : rows) y.push_back(r.robot);
    return y;
}

std::vector<double> LabeledDataset::column(std::size_t j) const {
    std::vector<double> c;
    c.reserve(rows.size());
    for (const auto& r : rows) c.push_back(r.x.at(j));
    return c;
}

LabeledDataset to_labeled(const FeatureTable& table, const std::vector<std::string>& features, double ps_impute) {
    const auto& names = feature_names();
    std::vector<std::size_t> idx;
    for (const auto& f : features) {
        const auto it = std::find(names.begin(), names.end(), f);
        if (it == names.end()) throw InvalidConfig("unknown feature '" + f + "'");
        idx.push_back(static_cast<std::size_t>(it - names.begin()));
    }
    LabeledDataset ds;
    ds.feature_names = features;
    for (const auto& r : table.rows) {
        if (r.label == Verdict::Unlabeled) continue;
        Sample s;
        s.session_id = r.session_id;
        s.timestamp = r.timestamp;
        s.robot = r.label == Verdict::Robot;
        s.x.reserve(idx.size());
        s.missing.reserve(idx.size());
        for (auto j : idx) {
            const bool missing = j == kPageSimilarityIndex && r.page_similarity_missing;
            s.x.push_back(missing ? ps_impute : r.values[j]);
            s.missing.push_back(missing);
        }
        ds.rows.push_back(std::move(s));
    }
    return ds;
}

}  // namespace botdetect
