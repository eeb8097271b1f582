#pragma once

#include <cstddef>
#include <optional>
#include <span>

#include "botdetect/sessionize.hpp"
#include "botdetect/topic_model.hpp"

namespace botdetect {

/// Semantic-coherence features of a session, computed from the truncated
/// topic vectors of the documents its requests point at.
struct SemanticFeatures {
    std::size_t total_topics = 0;           // TT: nonzero (request, topic) pairs
    std::size_t unique_topics = 0;          // UT: topics nonzero in at least one request
    std::optional<double> page_similarity;  // PS = UT / TT; absent when TT = 0
    double page_variance = 0.0;             // PV: mean distance to the mean topic vector
    double boolean_page_variance = 0.0;     // PV over vectors with every nonzero entry set to 1
    double coverage = 0.0;                  // fraction of requests that had a topic vector
};

/// One vector per mapped request. Coverage is 1 for a non-empty list and 0
/// otherwise; use the overload below to account for unmapped requests.
SemanticFeatures extract_semantic(std::span<const SparseTopicVector> vectors);

/// Same, with coverage = vectors.size() / total_requests.
SemanticFeatures extract_semantic(std::span<const SparseTopicVector> vectors, std::size_t total_requests);

/// Looks up every request's article id in the table. Requests whose article
/// has no topic vector are skipped and only lower coverage.
SemanticFeatures extract_semantic(const Session& session, const TopicTable& table);

}  // namespace botdetect
