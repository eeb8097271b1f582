#include "botdetect/topic_model.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>

#include "botdetect/errors.hpp"
#include "botdetect/text.hpp"

namespace botdetect {

namespace {

constexpr std::string_view kModelMagic = "botdetect-lda v1";
constexpr std::string_view kTopicsHeader = "# botdetect-topics v1";

std::size_t sample_index(std::span<const double> cumulative, double u) {
    const double target = u * cumulative.back();
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), target);
    return std::min(static_cast<std::size_t>(it - cumulative.begin()), cumulative.size() - 1);
}

}  // namespace

void LdaParams::validate() const {
    if (k < 1) throw InvalidHyperparameter("k must be >= 1");
    if (!(resolved_alpha() > 0.0)) throw InvalidHyperparameter("alpha must be > 0");
    if (!(beta > 0.0)) throw InvalidHyperparameter("beta must be > 0");
    if (iterations < 1) throw InvalidHyperparameter("iterations must be >= 1");
}

GibbsSampler::GibbsSampler(const Corpus& corpus, std::size_t k, double alpha, double beta, std::uint64_t seed)
    : corpus_(corpus),
      k_(k),
      v_(corpus.vocabulary.size()),
      alpha_(alpha),
      beta_(beta),
      rng_(seed),
      word_topic_(v_ * k, 0),
      doc_topic_(corpus.documents.size() * k, 0),
      topic_total_(k, 0),
      prob_(k, 0.0) {
    z_.resize(corpus.documents.size());
    for (std::size_t d = 0; d < corpus.documents.size(); ++d) {
        const auto& tokens = corpus.documents[d].tokens;
        z_[d].resize(tokens.size());
        for (std::size_t i = 0; i < tokens.size(); ++i) {
            const auto t = static_cast<std::uint32_t>(std::min<std::size_t>(
                static_cast<std::size_t>(uniform01(rng_) * static_cast<double>(k_)), k_ - 1));
            z_[d][i] = t;
            ++word_topic_[tokens[i] * k_ + t];
            ++doc_topic_[d * k_ + t];
            ++topic_total_[t];
        }
    }
}

void GibbsSampler::sweep() {
    const double vbeta = static_cast<double>(v_) * beta_;
    for (std::size_t d = 0; d < corpus_.documents.size(); ++d) {
        const auto& tokens = corpus_.documents[d].tokens;
        std::uint32_t* nd = doc_topic_.data() + d * k_;
        for (std::size_t i = 0; i < tokens.size(); ++i) {
            const std::uint32_t w = tokens[i];
            std::uint32_t* nw = word_topic_.data() + static_cast<std::size_t>(w) * k_;
            const std::uint32_t old = z_[d][i];
            --nw[old];
            --nd[old];
            --topic_total_[old];

            double acc = 0.0;
            for (std::size_t t = 0; t < k_; ++t) {
                acc += (nd[t] + alpha_) * (nw[t] + beta_) / (topic_total_[t] + vbeta);
                prob_[t] = acc;
            }
            const auto t = static_cast<std::uint32_t>(sample_index(prob_, uniform01(rng_)));

            z_[d][i] = t;
            ++nw[t];
            ++nd[t];
            ++topic_total_[t];
        }
    }
}

double GibbsSampler::log_likelihood() const {
    const double vbeta = static_cast<double>(v_) * beta_;
    const double kalpha = static_cast<double>(k_) * alpha_;
    const double lg_beta = std::lgamma(beta_);
    const double lg_alpha = std::lgamma(alpha_);
    double ll = 0.0;
    for (std::size_t t = 0; t < k_; ++t) ll += std::lgamma(vbeta) - std::lgamma(topic_total_[t] + vbeta);
    for (std::uint32_t c : word_topic_) {
        if (c) ll += std::lgamma(c + beta_) - lg_beta;
    }
    for (std::size_t d = 0; d < corpus_.documents.size(); ++d) {
        ll += std::lgamma(kalpha) - std::lgamma(static_cast<double>(corpus_.documents[d].tokens.size()) + kalpha);
        for (std::size_t t = 0; t < k_; ++t) {
            const std::uint32_t c = doc_topic_[d * k_ + t];
            if (c) ll += std::lgamma(c + alpha_) - lg_alpha;
        }
    }
    return ll;
}

bool GibbsSampler::counts_consistent() const {
    std::vector<std::uint32_t> wt(word_topic_.size(), 0), dt(doc_topic_.size(), 0), tt(k_, 0);
    for (std::size_t d = 0; d < z_.size(); ++d) {
        const auto& tokens = corpus_.documents[d].tokens;
        for (std::size_t i = 0; i < tokens.size(); ++i) {
            const auto t = z_[d][i];
            if (t >= k_) return false;
            ++wt[tokens[i] * k_ + t];
            ++dt[d * k_ + t];
            ++tt[t];
        }
    }
    return wt == word_topic_ && dt == doc_topic_ && tt == topic_total_ &&
           topic_word_total() == corpus_.token_count();
}

std::uint64_t GibbsSampler::topic_word_total() const {
    std::uint64_t s = 0;
    for (auto c : word_topic_) s += c;
    return s;
}

TopicModel GibbsSampler::snapshot(std::size_t iterations, std::uint64_t seed) const {
    TopicModel m;
    m.k = k_;
    m.alpha = alpha_;
    m.beta = beta_;
    m.seed = seed;
    m.iterations = iterations;
    m.vocabulary = corpus_.vocabulary;
    const std::size_t n_docs = corpus_.documents.size();
    m.doc_ids.reserve(n_docs);
    for (const auto& d : corpus_.documents) m.doc_ids.push_back(d.id);

    const double vbeta = static_cast<double>(v_) * beta_;
    m.topic_word.assign(k_ * v_, 0.0);
    for (std::size_t t = 0; t < k_; ++t) {
        const double denom = topic_total_[t] + vbeta;
        for (std::size_t w = 0; w < v_; ++w) m.topic_word[t * v_ + w] = (word_topic_[w * k_ + t] + beta_) / denom;
    }
    const double kalpha = static_cast<double>(k_) * alpha_;
    m.doc_topic.assign(n_docs * k_, 0.0);
    for (std::size_t d = 0; d < n_docs; ++d) {
        const double denom = static_cast<double>(corpus_.documents[d].tokens.size()) + kalpha;
        for (std::size_t t = 0; t < k_; ++t) m.doc_topic[d * k_ + t] = (doc_topic_[d * k_ + t] + alpha_) / denom;
    }
    return m;
}

TopicModel train_lda(const Corpus& corpus, const LdaParams& params,
                     const std::function<void(const SweepInfo&)>& observer) {
    params.validate();
    if (corpus.documents.empty()) throw EmptyCorpus("cannot train a topic model on an empty corpus");
    corpus.validate();

    GibbsSampler sampler(corpus, params.k, params.resolved_alpha(), params.beta, params.seed);
    const std::uint64_t tokens = corpus.token_count();
    for (std::size_t it = 1; it <= params.iterations; ++it) {
        sampler.sweep();
        if (observer) {
            observer(SweepInfo{it, sampler.log_likelihood(), sampler.topic_word_total(), tokens,
                               sampler.counts_consistent()});
        }
    }
    return sampler.snapshot(params.iterations, params.seed);
}

std::vector<double> infer_doc_topics(const TopicModel& model, std::span<const std::uint32_t> tokens,
                                     const InferenceParams& params) {
    if (tokens.empty()) throw EmptyDocument("cannot infer topics of an empty document");
    const std::size_t k = model.k;
    const std::size_t v = model.vocab_size();
    for (auto w : tokens) {
        if (w >= v) throw DimensionMismatch("token index outside the model vocabulary");
    }
    if (params.burn_in >= params.iterations) throw InvalidHyperparameter("burn_in must be < iterations");

    std::mt19937_64 rng(params.seed);
    std::vector<std::uint32_t> z(tokens.size());
    std::vector<std::uint32_t> nd(k, 0);
    std::vector<double> cumulative(k);
    auto draw = [&](std::uint32_t w) {
        double acc = 0.0;
        for (std::size_t t = 0; t < k; ++t) {
            acc += (nd[t] + model.alpha) * model.topic_word[t * v + w];
            cumulative[t] = acc;
        }
        return static_cast<std::uint32_t>(sample_index(cumulative, uniform01(rng)));
    };
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        z[i] = draw(tokens[i]);
        ++nd[z[i]];
    }

    std::vector<double> theta(k, 0.0);
    const double denom = static_cast<double>(tokens.size()) + static_cast<double>(k) * model.alpha;
    std::size_t samples = 0;
    for (std::size_t it = 0; it < params.iterations; ++it) {
        for (std::size_t i = 0; i < tokens.size(); ++i) {
            --nd[z[i]];
            z[i] = draw(tokens[i]);
            ++nd[z[i]];
        }
        if (it >= params.burn_in) {
            for (std::size_t t = 0; t < k; ++t) theta[t] += (nd[t] + model.alpha) / denom;
            ++samples;
        }
    }
    double total = 0.0;
    for (double& x : theta) {
        x /= static_cast<double>(samples);
        total += x;
    }
    for (double& x : theta) x /= total;
    return theta;
}

SparseTopicVector truncate_top_m(std::span<const double> theta, std::size_t m) {
    std::vector<TopicWeight> nz;
    for (std::size_t t = 0; t < theta.size(); ++t) {
        if (theta[t] > 0.0) nz.push_back({static_cast<std::uint32_t>(t), theta[t]});
    }
    const auto by_prob = [](const TopicWeight& a, const TopicWeight& b) {
        return a.probability != b.probability ? a.probability > b.probability : a.topic < b.topic;
    };
    const std::size_t keep = std::min(m, nz.size());
    std::partial_sort(nz.begin(), nz.begin() + static_cast<std::ptrdiff_t>(keep), nz.end(), by_prob);
    nz.resize(keep);
    return SparseTopicVector{std::move(nz)};
}

void save_model(std::ostream& out, const TopicModel& m) {
    out << kModelMagic << '\n'
        << "k=" << m.k << " alpha=" << text::format_double(m.alpha) << " beta=" << text::format_double(m.beta)
        << " seed=" << m.seed << " iterations=" << m.iterations << " V=" << m.vocab_size()
        << " D=" << m.doc_ids.size() << '\n';
    out << "vocabulary\n";
    for (const auto& w : m.vocabulary) out << w << '\n';
    out << "topic_word\n";
    for (std::size_t t = 0; t < m.k; ++t) {
        const auto row = m.topic_row(t);
        for (std::size_t w = 0; w < row.size(); ++w) {
            if (w) out << ' ';
            out << text::format_double(row[w]);
        }
        out << '\n';
    }
    out << "doc_topic\n";
    for (std::size_t d = 0; d < m.doc_ids.size(); ++d) {
        out << m.doc_ids[d] << '\t';
        const auto row = m.doc_row(d);
        for (std::size_t t = 0; t < row.size(); ++t) {
            if (t) out << ' ';
            out << text::format_double(row[t]);
        }
        out << '\n';
    }
    out << "end\n";
}

TopicModel load_model(std::istream& in) {
    std::string line;
    auto next = [&](const char* what) -> std::string& {
        if (!std::getline(in, line)) throw FormatError(std::string("topic model truncated before ") + what);
        return line;
    };
    if (next("magic") != kModelMagic) throw FormatError("not a topic model (bad magic line)");

    TopicModel m;
    std::size_t v = 0, d = 0;
    bool have_k = false, have_v = false, have_d = false;
    for (auto kv : text::split_whitespace(next("header"))) {
        const auto eq = kv.find('=');
        if (eq == std::string_view::npos) throw FormatError("bad topic model header field");
        const auto key = kv.substr(0, eq), val = kv.substr(eq + 1);
        const auto num = text::parse_double(val);
        const auto uint = text::parse_uint(val);
        if (key == "k" && uint) m.k = *uint, have_k = true;
        else if (key == "alpha" && num) m.alpha = *num;
        else if (key == "beta" && num) m.beta = *num;
        else if (key == "seed" && uint) m.seed = *uint;
        else if (key == "iterations" && uint) m.iterations = *uint;
        else if (key == "V" && uint) v = *uint, have_v = true;
        else if (key == "D" && uint) d = *uint, have_d = true;
        else throw FormatError("bad topic model header field '" + std::string(kv) + "'");
    }
    if (!have_k || !have_v || !have_d || m.k == 0) throw FormatError("topic model header misses k, V or D");

    if (next("vocabulary") != "vocabulary") throw FormatError("expected 'vocabulary' section");
    m.vocabulary.reserve(v);
    for (std::size_t i = 0; i < v; ++i) m.vocabulary.push_back(next("vocabulary entries"));

    auto read_row = [](std::string_view s, std::size_t expect, std::vector<double>& dst) {
        const auto parts = text::split_whitespace(s);
        if (parts.size() != expect) throw FormatError("topic model row has the wrong length");
        for (auto p : parts) {
            const auto x = text::parse_double(p);
            if (!x) throw FormatError("topic model row has a non-numeric value");
            dst.push_back(*x);
        }
    };
    if (next("topic_word") != "topic_word") throw FormatError("expected 'topic_word' section");
    m.topic_word.reserve(m.k * v);
    for (std::size_t t = 0; t < m.k; ++t) read_row(next("topic_word rows"), v, m.topic_word);

    if (next("doc_topic") != "doc_topic") throw FormatError("expected 'doc_topic' section");
    m.doc_topic.reserve(d * m.k);
    for (std::size_t i = 0; i < d; ++i) {
        const auto& row = next("doc_topic rows");
        const auto tab = row.find('\t');
        if (tab == std::string::npos) throw FormatError("doc_topic row without doc id");
        m.doc_ids.push_back(row.substr(0, tab));
        read_row(std::string_view(row).substr(tab + 1), m.k, m.doc_topic);
    }
    if (next("end") != "end") throw FormatError("expected 'end' marker");
    return m;
}

TopicTable TopicTable::from_model(const TopicModel& model, std::size_t m) {
    TopicTable table;
    table.k_ = model.k;
    table.m_ = m;
    for (std::size_t d = 0; d < model.doc_ids.size(); ++d) table.insert(model.doc_ids[d], truncate_top_m(model.doc_row(d), m));
    return table;
}

void TopicTable::insert(std::string doc_id, SparseTopicVector v) {
    for (const auto& e : v.entries) k_ = std::max<std::size_t>(k_, e.topic + 1);
    m_ = std::max(m_, v.entries.size());
    auto [it, inserted] = vectors_.insert_or_assign(doc_id, std::move(v));
    if (inserted) order_.push_back(std::move(doc_id));
}

const SparseTopicVector* TopicTable::find(const std::string& doc_id) const {
    const auto it = vectors_.find(doc_id);
    return it == vectors_.end() ? nullptr : &it->second;
}

void TopicTable::write(std::ostream& out) const {
    out << kTopicsHeader << " k=" << k_ << " m=" << m_ << '\n';
    for (const auto& id : order_) {
        out << id << '\t';
        const auto& v = vectors_.at(id);
        for (std::size_t i = 0; i < v.entries.size(); ++i) {
            if (i) out << ',';
            out << v.entries[i].topic << ':' << text::format_double(v.entries[i].probability);
        }
        out << '\n';
    }
}

TopicTable TopicTable::read(std::istream& in) {
    TopicTable table;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line.front() == '#') {
            for (auto kv : text::split_whitespace(line)) {
                if (text::starts_with(kv, "k=")) {
                    if (auto k = text::parse_uint(kv.substr(2))) table.k_ = std::max<std::size_t>(table.k_, *k);
                }
            }
            continue;
        }
        const auto where = "topics line " + std::to_string(line_no);
        const auto tab = line.find('\t');
        if (tab == std::string::npos) throw FormatError(where + ": expected 'doc_id<TAB>topic:prob,...'");
        SparseTopicVector v;
        const auto body = std::string_view(line).substr(tab + 1);
        if (!body.empty()) {
            for (auto pair : text::split(body, ',')) {
                const auto colon = pair.find(':');
                const auto t = colon == std::string_view::npos ? std::nullopt : text::parse_uint(pair.substr(0, colon));
                const auto p = colon == std::string_view::npos ? std::nullopt : text::parse_double(pair.substr(colon + 1));
                if (!t || !p || *p < 0.0 || *p > 1.0) throw FormatError(where + ": bad topic:prob pair");
                v.entries.push_back({static_cast<std::uint32_t>(*t), *p});
            }
        }
        table.insert(line.substr(0, tab), std::move(v));
    }
    return table;
}

}  // namespace botdetect
