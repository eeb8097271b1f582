#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "botdetect/corpus.hpp"

namespace botdetect {

struct LdaParams {
    std::size_t k = 50;
    /// Symmetric document-topic prior; 50/k when unset.
    std::optional<double> alpha;
    double beta = 0.01;
    std::size_t iterations = 500;
    std::uint64_t seed = 1;

    double resolved_alpha() const { return alpha.value_or(50.0 / static_cast<double>(k)); }
    /// Throws InvalidHyperparameter.
    void validate() const;
};

/// A trained LDA model. Both matrices are row-major and every row is a
/// probability distribution.
struct TopicModel {
    std::size_t k = 0;
    double alpha = 0.0;
    double beta = 0.0;
    std::uint64_t seed = 0;
    std::size_t iterations = 0;
    std::vector<std::string> vocabulary;
    std::vector<std::string> doc_ids;
    std::vector<double> topic_word;  // k x V
    std::vector<double> doc_topic;   // D x k

    std::size_t vocab_size() const noexcept { return vocabulary.size(); }
    std::span<const double> topic_row(std::size_t t) const {
        return {topic_word.data() + t * vocab_size(), vocab_size()};
    }
    std::span<const double> doc_row(std::size_t d) const { return {doc_topic.data() + d * k, k}; }

    bool operator==(const TopicModel&) const = default;
};

/// Uniform double in [0, 1) from the top 53 bits, so draws do not depend on
/// the standard library's distribution implementation.
inline double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

struct SweepInfo {
    std::size_t sweep = 0;  // 1-based
    double log_likelihood = 0.0;
    std::uint64_t topic_word_total = 0;
    std::uint64_t tokens = 0;
    bool counts_consistent = false;
};

/// Collapsed Gibbs sampler for LDA. Each sweep resamples every token's topic
/// from p(z = t) proportional to (n_dt + alpha)(n_wt + beta)/(n_t + V beta)
/// with the token's own assignment removed from the counts.
class GibbsSampler {
public:
    GibbsSampler(const Corpus& corpus, std::size_t k, double alpha, double beta, std::uint64_t seed);

    void sweep();

    /// Joint log p(w, z) of the current state.
    double log_likelihood() const;
    /// Recounts from the assignments and compares against the running counts.
    bool counts_consistent() const;
    std::uint64_t topic_word_total() const;

    const std::vector<std::vector<std::uint32_t>>& assignments() const noexcept { return z_; }

    /// Smoothed point estimates from the current counts.
    TopicModel snapshot(std::size_t iterations, std::uint64_t seed) const;

private:
    const Corpus& corpus_;
    std::size_t k_;
    std::size_t v_;
    double alpha_;
    double beta_;
    std::mt19937_64 rng_;
    std::vector<std::vector<std::uint32_t>> z_;
    std::vector<std::uint32_t> word_topic_;  // V x k
    std::vector<std::uint32_t> doc_topic_;   // D x k
    std::vector<std::uint32_t> topic_total_;
    std::vector<double> prob_;
};

/// Trains with `iterations` full sweeps. The observer, if given, runs after
/// every sweep.
TopicModel train_lda(const Corpus& corpus, const LdaParams& params,
                     const std::function<void(const SweepInfo&)>& observer = {});

struct InferenceParams {
    std::size_t iterations = 100;
    std::size_t burn_in = 50;
    std::uint64_t seed = 1;
};

/// Fold-in Gibbs sampling of a new document against fixed topic-word
/// distributions. Returns theta averaged over the post-burn-in sweeps.
std::vector<double> infer_doc_topics(const TopicModel& model, std::span<const std::uint32_t> tokens,
                                     const InferenceParams& params = {});

struct TopicWeight {
    std::uint32_t topic = 0;
    double probability = 0.0;

    bool operator==(const TopicWeight&) const = default;
};

/// At most m (topic, probability) pairs sorted by descending probability.
/// Topics outside the list have probability zero. Not renormalized.
struct SparseTopicVector {
    std::vector<TopicWeight> entries;

    bool operator==(const SparseTopicVector&) const = default;
};

/// Top-m nonzero entries by probability; ties go to the lower topic id.
SparseTopicVector truncate_top_m(std::span<const double> theta, std::size_t m = 10);

/// Model container (text, `botdetect-lda v1`):
///
///     botdetect-lda v1
///     k=<k> alpha=<a> beta=<b> seed=<s> iterations=<i> V=<V> D=<D>
///     vocabulary            followed by V lines, one term each
///     topic_word            followed by k lines of V space-separated probabilities
///     doc_topic             followed by D lines `doc_id<TAB>k probabilities`
///     end
///
/// Numbers use the shortest round-trip decimal form, so save/load is exact.
void save_model(std::ostream& out, const TopicModel& model);
TopicModel load_model(std::istream& in);

/// Per-article truncated topic vectors, keyed by article (document) id.
class TopicTable {
public:
    TopicTable() = default;
    static TopicTable from_model(const TopicModel& model, std::size_t m = 10);

    void insert(std::string doc_id, SparseTopicVector v);
    const SparseTopicVector* find(const std::string& doc_id) const;
    std::size_t size() const noexcept { return order_.size(); }
    std::size_t k() const noexcept { return k_; }

    /// `# botdetect-topics v1 k=<k> m=<m>` header, then one
    /// `doc_id<TAB>topic:prob,topic:prob,...` line per document.
    void write(std::ostream& out) const;
    static TopicTable read(std::istream& in);

private:
    std::size_t k_ = 0;
    std::size_t m_ = 0;
    std::vector<std::string> order_;
    std::unordered_map<std::string, SparseTopicVector> vectors_;
};

}  // namespace botdetect
