#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace botdetect {

/// An absolute instant with one-second resolution. The offset the record was
/// written with is kept so the line can be rendered back unchanged; ordering
/// and gaps only ever look at `utc_seconds`.
struct Timestamp {
    std::int64_t utc_seconds = 0;
    int offset_minutes = 0;

    bool operator==(const Timestamp&) const = default;
};

/// ISO-8601 UTC rendering, e.g. "2014-01-05T08:00:00Z".
std::string format_utc(std::int64_t utc_seconds);

/// Seconds since the epoch for a proleptic Gregorian UTC date-time.
std::int64_t utc_from_civil(int year, unsigned month, unsigned day, int hour, int minute, int second);

/// One access-log record.
struct LogEntry {
    std::string ip;
    Timestamp timestamp;
    std::string method;
    std::string path;       // request target, query string included
    std::string protocol;   // empty for HTTP/0.9 style request lines
    int status = 0;
    std::optional<std::uint64_t> bytes;
    std::optional<std::string> referer;
    std::optional<std::string> user_agent;
    std::optional<std::string> country;
    std::optional<std::string> username;
    bool via_web_service = false;

    bool operator==(const LogEntry&) const = default;
};

/// Line grammar of an access log.
///
/// `Combined` is the Apache/nginx combined format
///
///     ip ident authuser [dd/Mon/yyyy:HH:MM:SS +zzzz] "request" status bytes "referer" "user-agent"
///
/// where `authuser` populates `username`. `CombinedApp` appends three
/// application columns, ` country "username" web_service`, with country an
/// ISO-3166 alpha-2 code or `-` and web_service `0` or `1`; the authuser
/// column is ignored in that dialect.
enum class LogDialect { Combined, CombinedApp };

LogDialect parse_dialect(std::string_view name);
std::string_view to_string(LogDialect dialect);

/// Parses one record. Throws MalformedLine naming the offending column.
LogEntry parse_line(std::string_view line, LogDialect dialect);

/// Inverse of parse_line: parse_line(render_line(e, d), d) == e for every
/// entry parse_line can produce.
std::string render_line(const LogEntry& entry, LogDialect dialect);

}  // namespace botdetect
