#include "botdetect/sessionize.hpp"

#include <algorithm>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <unordered_map>

#include "botdetect/errors.hpp"
#include "botdetect/text.hpp"

namespace botdetect {

namespace {

constexpr std::string_view kSessionsHeader = "# botdetect-sessions v1";

struct KeyHash {
    std::size_t operator()(const UserKey& k) const noexcept {
        return std::hash<std::string>{}(k.ip) * 31 + std::hash<std::string>{}(k.user_agent);
    }
};

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

std::string session_id(const UserKey& key, std::int64_t first_timestamp) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&h](std::string_view s) {
        for (unsigned char c : s) {
            h ^= c;
            h *= 0x100000001b3ULL;
        }
        h ^= 0xff;
        h *= 0x100000001b3ULL;
    };
    mix(key.ip);
    mix(key.user_agent);
    mix(std::to_string(first_timestamp));
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::vector<Session> sessionize(std::span<const ClassifiedEntry> entries, const SessionizeParams& params) {
    std::unordered_map<UserKey, std::vector<std::size_t>, KeyHash> buckets;
    for (std::size_t i = 0; i < entries.size(); ++i) buckets[UserKey::of(entries[i].entry)].push_back(i);

    std::vector<const UserKey*> keys;
    keys.reserve(buckets.size());
    for (const auto& [key, _] : buckets) keys.push_back(&key);
    std::sort(keys.begin(), keys.end(), [](const UserKey* a, const UserKey* b) { return *a < *b; });

    std::vector<Session> out;
    for (const UserKey* key : keys) {
        auto& idx = buckets.at(*key);
        std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
            return entries[a].entry.timestamp.utc_seconds < entries[b].entry.timestamp.utc_seconds;
        });

        auto flush = [&](std::size_t begin, std::size_t end) {
            if (end - begin < params.min_requests) return;
            Session s;
            s.key = *key;
            for (std::size_t j = begin; j < end; ++j) {
                s.requests.push_back(entries[idx[j]]);
                s.ordinals.push_back(idx[j]);
            }
            s.id = session_id(s.key, s.start());
            out.push_back(std::move(s));
        };

        std::size_t begin = 0;
        for (std::size_t j = 1; j < idx.size(); ++j) {
            const auto gap = entries[idx[j]].entry.timestamp.utc_seconds - entries[idx[j - 1]].entry.timestamp.utc_seconds;
            if (gap > params.timeout_seconds) {
                flush(begin, j);
                begin = j;
            }
        }
        flush(begin, idx.size());
    }
    return out;
}

SummaryStats session_stats(std::span<const Session> sessions) {
    if (sessions.empty()) throw EmptyInput("session_stats needs at least one session");
    SummaryStats st;
    st.sessions = sessions.size();
    std::vector<double> counts, durations;
    double gap_sum = 0.0;
    std::size_t gaps = 0;
    std::set<std::string> articles;
    for (const auto& s : sessions) {
        counts.push_back(static_cast<double>(s.size()));
        durations.push_back(s.requests.empty() ? 0.0 : static_cast<double>(s.duration()));
        for (std::size_t i = 1; i < s.requests.size(); ++i) {
            gap_sum += static_cast<double>(s.requests[i].entry.timestamp.utc_seconds -
                                           s.requests[i - 1].entry.timestamp.utc_seconds);
            ++gaps;
        }
        for (const auto& r : s.requests) {
            if (r.resource.article_id) articles.insert(*r.resource.article_id);
        }
    }
    const double n = static_cast<double>(sessions.size());
    for (double c : counts) st.mean_requests += c / n;
    for (double d : durations) st.mean_duration += d / n;
    st.median_requests = median(counts);
    st.median_duration = median(durations);
    st.mean_gap = gaps ? gap_sum / static_cast<double>(gaps) : 0.0;
    st.unique_articles = articles.size();
    return st;
}

void write_stats(std::ostream& out, const SummaryStats& s) {
    out << "sessions=" << s.sessions << '\n'
        << "mean_requests=" << text::format_double(s.mean_requests) << '\n'
        << "median_requests=" << text::format_double(s.median_requests) << '\n'
        << "mean_duration_s=" << text::format_double(s.mean_duration) << '\n'
        << "median_duration_s=" << text::format_double(s.median_duration) << '\n'
        << "mean_gap_s=" << text::format_double(s.mean_gap) << '\n'
        << "unique_articles=" << s.unique_articles << '\n';
}

void write_sessions(std::ostream& out, std::span<const Session> sessions, const SessionizeParams& params) {
    out << kSessionsHeader << " timeout_secs=" << params.timeout_seconds << " min_requests=" << params.min_requests
        << " count=" << sessions.size() << '\n';
    for (const auto& s : sessions) {
        out << s.id << '\t' << s.key.ip << '\t' << text::tsv_safe(s.key.user_agent) << '\t';
        for (std::size_t i = 0; i < s.ordinals.size(); ++i) {
            if (i) out << ',';
            out << s.ordinals[i];
        }
        out << '\n';
    }
}

std::vector<Session> read_sessions(std::istream& in, std::span<const ClassifiedEntry> entries) {
    std::string line;
    if (!std::getline(in, line) || !text::starts_with(line, kSessionsHeader)) {
        throw FormatError("not a sessions file (missing '" + std::string(kSessionsHeader) + "' header)");
    }
    std::vector<Session> out;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto cols = text::split(line, '\t');
        const auto where = "sessions line " + std::to_string(line_no);
        if (cols.size() != 4) throw FormatError(where + ": expected 4 columns");
        Session s;
        s.id = std::string(cols[0]);
        for (auto part : text::split(cols[3], ',')) {
            const auto v = text::parse_uint(part);
            if (!v || *v >= entries.size()) throw FormatError(where + ": entry index out of range");
            s.ordinals.push_back(static_cast<std::size_t>(*v));
            s.requests.push_back(entries[static_cast<std::size_t>(*v)]);
        }
        s.key = UserKey::of(s.requests.front().entry);
        if (s.key.ip != cols[1]) throw FormatError(where + ": session key does not match its entries");
        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace botdetect
