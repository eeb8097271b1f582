#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "botdetect/corpus.hpp"

namespace botdetect {

/// Knobs of the synthetic publisher. Documents belong to topical clusters
/// with mostly disjoint vocabularies; humans browse within a cluster, robots
/// across the whole site.
struct SynthConfig {
    std::size_t n_docs = 1000;
    std::size_t vocab_size = 2000;
    std::size_t n_clusters = 5;
    std::size_t subtopics_per_cluster = 4;
    std::size_t doc_length_min = 60;
    std::size_t doc_length_max = 100;
    /// Share of each document's tokens drawn from words common to all clusters.
    double shared_word_rate = 0.1;

    std::size_t n_human_sessions = 500;
    std::size_t n_bot_sessions = 500;
    /// Probability a human's next article stays in the user's cluster.
    double human_cluster_stickiness = 0.9;
    /// Probability a robot's next article is drawn from the whole site
    /// rather than the current article's cluster.
    double bot_uniformity = 1.0;
    /// Probability a human's next request is another format of the current
    /// article.
    double same_article_prob = 0.3;
    double logged_in_fraction = 0.8;
    /// Share of robots pacing their requests like humans and reading several
    /// formats of an article.
    double bot_human_timing_fraction = 0.3;
    /// Probability that a user comes back for a second session.
    double return_visit_prob = 0.25;

    /// Session lengths are 3 + a geometric count with this mean, capped.
    double session_length_mean = 10.0;
    std::size_t session_length_max = 60;
    /// Human gaps are lognormal with this median (seconds) and log-scale
    /// sigma, capped below the session timeout.
    double human_gap_median = 60.0;
    double human_gap_sigma = 1.0;
    std::int64_t human_gap_max = 1500;
    /// Robot gaps sit at a per-robot base drawn from [min, max] seconds with
    /// relative jitter.
    double bot_gap_min = 2.0;
    double bot_gap_max = 20.0;
    double bot_gap_jitter = 0.1;
    /// Non-article requests (home page, search, static files) per article
    /// request.
    double noise_rate = 0.15;
    std::size_t days = 30;

    /// Robots present browser user-agents, so labeling leaves them unlabeled.
    bool mask_bots = false;
    std::uint64_t seed = 1;

    /// Throws InvalidConfig.
    void validate() const;
};

struct TruthRow {
    std::string session_id;
    std::string ip;
    std::string user_agent;
    std::int64_t start = 0;  // UTC seconds of the first article request
    bool robot = false;
    bool logged_in = false;
    std::size_t requests = 0;  // article requests
};

struct SynthOutput {
    std::vector<RawDocument> corpus;
    /// Combined+app dialect, chronological.
    std::string log;
    std::vector<TruthRow> truth;
};

SynthOutput generate(const SynthConfig& cfg);

/// `# botdetect-truth v1 count=<n>` then
/// `session_id<TAB>ip<TAB>user_agent<TAB>start<TAB>robot|human<TAB>logged_in<TAB>requests`.
void write_truth(std::ostream& out, const std::vector<TruthRow>& truth);
std::vector<TruthRow> read_truth(std::istream& in);

struct SynthFiles {
    std::filesystem::path corpus;
    std::filesystem::path log;
    std::filesystem::path truth;
};

/// Writes corpus.tsv, access.log and truth.tsv into `dir`, creating it.
SynthFiles write_synth(const SynthOutput& out, const std::filesystem::path& dir);

}  // namespace botdetect
