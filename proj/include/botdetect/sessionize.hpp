#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "botdetect/ingest.hpp"

namespace botdetect {

/// A user is an (IP, user-agent) pair; an absent user-agent is the empty
/// string. Ordering is lexicographic on (ip, user_agent).
struct UserKey {
    std::string ip;
    std::string user_agent;

    auto operator<=>(const UserKey&) const = default;
    bool operator==(const UserKey&) const = default;

    static UserKey of(const LogEntry& e) { return {e.ip, e.user_agent.value_or(std::string{})}; }
};

struct Session {
    std::string id;
    UserKey key;
    std::vector<ClassifiedEntry> requests;  // time-ordered
    std::vector<std::size_t> ordinals;      // positions of the requests in the ingest output

    std::size_t size() const noexcept { return requests.size(); }
    std::int64_t start() const { return requests.front().entry.timestamp.utc_seconds; }
    std::int64_t end() const { return requests.back().entry.timestamp.utc_seconds; }
    std::int64_t duration() const { return end() - start(); }
};

struct SessionizeParams {
    std::int64_t timeout_seconds = 1800;
    std::size_t min_requests = 3;
};

/// 16 hex digits of FNV-1a over ip, user-agent and first timestamp.
std::string session_id(const UserKey& key, std::int64_t first_timestamp);

/// Buckets entries by UserKey, sorts each bucket by time (stable on ties),
/// starts a new session whenever a gap is strictly greater than the timeout,
/// then drops sessions shorter than min_requests. Output is ordered by
/// (key, first timestamp).
std::vector<Session> sessionize(std::span<const ClassifiedEntry> entries, const SessionizeParams& params = {});

struct SummaryStats {
    std::size_t sessions = 0;
    double mean_requests = 0.0;
    double median_requests = 0.0;
    double mean_duration = 0.0;
    double median_duration = 0.0;
    /// Pooled over every consecutive-request gap of every session.
    double mean_gap = 0.0;
    std::size_t unique_articles = 0;
};

/// Throws EmptyInput on an empty list.
SummaryStats session_stats(std::span<const Session> sessions);
void write_stats(std::ostream& out, const SummaryStats& stats);

/// Sessions file: a `# botdetect-sessions v1` header carrying the parameters,
/// then `id<TAB>ip<TAB>user_agent<TAB>i,j,k` rows where the indexes point into
/// the entries file the sessions were built from.
void write_sessions(std::ostream& out, std::span<const Session> sessions, const SessionizeParams& params);
std::vector<Session> read_sessions(std::istream& in, std::span<const ClassifiedEntry> entries);

}  // namespace botdetect
