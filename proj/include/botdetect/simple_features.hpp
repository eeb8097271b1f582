#pragma once

#include <cstddef>

#include "botdetect/sessionize.hpp"

namespace botdetect {

/// The classical per-session features. Fractions are over the session's
/// request count n; timing statistics are over its n-1 consecutive gaps.
struct SimpleFeatures {
    std::size_t total_requests = 0;
    double session_duration = 0.0;   // seconds, last minus first
    double avg_time = 0.0;           // mean gap
    double std_time = 0.0;           // population standard deviation of the gaps
    double repeated_requests = 0.0;  // re-occurrences of an earlier (path, method) / n
    double http_2xx = 0.0;
    double http_3xx = 0.0;
    double http_4xx = 0.0;
    double http_5xx = 0.0;
    double pdf_requests = 0.0;
    std::size_t unique_content = 0;  // distinct article ids
    bool multiple_countries = false;
    bool web_service = false;
};

struct SimpleFeatureOptions {
    /// Whether two requests that differ only in their query string count as
    /// the same page for repeated_requests.
    bool repeated_includes_query = true;
};

SimpleFeatures extract_simple(const Session& session, const SimpleFeatureOptions& options = {});

}  // namespace botdetect
