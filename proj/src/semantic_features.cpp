#include "botdetect/semantic_features.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace botdetect {

namespace {

// Mean Euclidean distance of the rows of a dense n x u matrix to their mean.
// The mean is accumulated as offsets from the first row, so identical rows
// give exactly zero.
double mean_distance_to_centroid(const std::vector<double>& rows, std::size_t n, std::size_t u) {
    std::vector<double> offset(u, 0.0);
    for (std::size_t i = 1; i < n; ++i) {
        for (std::size_t j = 0; j < u; ++j) offset[j] += rows[i * u + j] - rows[j];
    }
    std::vector<double> mean(u);
    for (std::size_t j = 0; j < u; ++j) mean[j] = rows[j] + offset[j] / static_cast<double>(n);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double ss = 0.0;
        for (std::size_t j = 0; j < u; ++j) {
            const double d = rows[i * u + j] - mean[j];
            ss += d * d;
        }
        total += std::sqrt(ss);
    }
    return total / static_cast<double>(n);
}

}  // namespace

SemanticFeatures extract_semantic(std::span<const SparseTopicVector> vectors) {
    SemanticFeatures f;
    const std::size_t n = vectors.size();
    if (n == 0) return f;
    f.coverage = 1.0;

    std::vector<std::uint32_t> support;
    for (const auto& v : vectors) {
        for (const auto& e : v.entries) {
            if (e.probability != 0.0) {
                ++f.total_topics;
                support.push_back(e.topic);
            }
        }
    }
    std::sort(support.begin(), support.end());
    support.erase(std::unique(support.begin(), support.end()), support.end());
    f.unique_topics = support.size();
    if (f.total_topics == 0) return f;
    f.page_similarity = static_cast<double>(f.unique_topics) / static_cast<double>(f.total_topics);

    const std::size_t u = support.size();
    std::vector<double> dense(n * u, 0.0), boolean(n * u, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (const auto& e : vectors[i].entries) {
            if (e.probability == 0.0) continue;
            const auto j = static_cast<std::size_t>(std::lower_bound(support.begin(), support.end(), e.topic) -
                                                    support.begin());
            dense[i * u + j] = e.probability;
            boolean[i * u + j] = 1.0;
        }
    }
    f.page_variance = mean_distance_to_centroid(dense, n, u);
    f.boolean_page_variance = mean_distance_to_centroid(boolean, n, u);
    return f;
}

SemanticFeatures extract_semantic(std::span<const SparseTopicVector> vectors, std::size_t total_requests) {
    SemanticFeatures f = extract_semantic(vectors);
    f.coverage = total_requests ? static_cast<double>(vectors.size()) / static_cast<double>(total_requests) : 0.0;
    return f;
}

SemanticFeatures extract_semantic(const Session& session, const TopicTable& table) {
    std::vector<SparseTopicVector> vectors;
    vectors.reserve(session.size());
    for (const auto& r : session.requests) {
        if (!r.resource.article_id) continue;
        if (const auto* v = table.find(*r.resource.article_id)) vectors.push_back(*v);
    }
    return extract_semantic(vectors, session.size());
}

}  // namespace botdetect
