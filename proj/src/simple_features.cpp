#include "botdetect/simple_features.hpp"

#include <cmath>
#include <set>
#include <string>
#include <utility>

namespace botdetect {

SimpleFeatures extract_simple(const Session& session, const SimpleFeatureOptions& options) {
    SimpleFeatures f;
    const auto& reqs = session.requests;
    const std::size_t n = reqs.size();
    f.total_requests = n;
    if (n == 0) return f;

    f.session_duration = static_cast<double>(session.duration());

    if (n > 1) {
        const double gaps = static_cast<double>(n - 1);
        double sum = 0.0;
        for (std::size_t i = 1; i < n; ++i) {
            sum += static_cast<double>(reqs[i].entry.timestamp.utc_seconds - reqs[i - 1].entry.timestamp.utc_seconds);
        }
        f.avg_time = sum / gaps;
        double ss = 0.0;
        for (std::size_t i = 1; i < n; ++i) {
            const double d =
                static_cast<double>(reqs[i].entry.timestamp.utc_seconds - reqs[i - 1].entry.timestamp.utc_seconds) -
                f.avg_time;
            ss += d * d;
        }
        f.std_time = std::sqrt(ss / gaps);
    }

    std::set<std::pair<std::string, std::string>> seen;
    std::set<std::string> articles;
    std::set<std::string> countries;
    std::size_t repeated = 0, s2 = 0, s3 = 0, s4 = 0, s5 = 0, pdf = 0;
    for (const auto& r : reqs) {
        const auto& e = r.entry;
        std::string page = options.repeated_includes_query ? e.path : e.path.substr(0, e.path.find('?'));
        if (!seen.emplace(std::move(page), e.method).second) ++repeated;
        switch (e.status / 100) {
            case 2: ++s2; break;
            case 3: ++s3; break;
            case 4: ++s4; break;
            case 5: ++s5; break;
            default: break;
        }
        if (r.resource.kind == ResourceKind::FullTextPdf) ++pdf;
        if (r.resource.article_id) articles.insert(*r.resource.article_id);
        if (e.country) countries.insert(*e.country);
        if (e.via_web_service) f.web_service = true;
    }
    const double dn = static_cast<double>(n);
    f.repeated_requests = static_cast<double>(repeated) / dn;
    f.http_2xx = static_cast<double>(s2) / dn;
    f.http_3xx = static_cast<double>(s3) / dn;
    f.http_4xx = static_cast<double>(s4) / dn;
    f.http_5xx = static_cast<double>(s5) / dn;
    f.pdf_requests = static_cast<double>(pdf) / dn;
    f.unique_content = articles.size();
    f.multiple_countries = countries.size() > 1;
    return f;
}

}  // namespace botdetect
