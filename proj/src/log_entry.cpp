#include "botdetect/log_entry.hpp"

#include <arpa/inet.h>

#include <array>
#include <cctype>
#include <cstdio>

#include "botdetect/errors.hpp"
#include "botdetect/text.hpp"

namespace botdetect {

namespace {

constexpr std::array<std::string_view, 12> kMonths = {"Jan", "Feb", "Mar", "Apr", "May", "Jun",
                                                      "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};

// Howard Hinnant's days_from_civil / civil_from_days.
std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

struct Civil {
    std::int64_t year;
    unsigned month;
    unsigned day;
};

Civil civil_from_days(std::int64_t z) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    const unsigned d = doy - (153 * mp + 2) / 5 + 1;
    const unsigned m = mp < 10 ? mp + 3 : mp - 9;
    return {y + (m <= 2), m, d};
}

unsigned days_in_month(std::int64_t y, unsigned m) {
    static constexpr unsigned kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (m == 2) {
        const bool leap = (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
        return leap ? 29 : 28;
    }
    return kDays[m - 1];
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

class Cursor {
public:
    explicit Cursor(std::string_view s) : s_(s) {}

    bool done() const { return pos_ >= s_.size(); }

    void expect_space(const char* column) {
        if (done() || s_[pos_] != ' ') throw MalformedLine(column, "missing field");
        while (!done() && s_[pos_] == ' ') ++pos_;
    }

    std::string_view token(const char* column) {
        const std::size_t start = pos_;
        while (!done() && s_[pos_] != ' ') ++pos_;
        if (pos_ == start) throw MalformedLine(column, "empty field");
        return s_.substr(start, pos_ - start);
    }

    std::string_view bracketed(const char* column) {
        if (done() || s_[pos_] != '[') throw MalformedLine(column, "expected '['");
        const auto close = s_.find(']', pos_);
        if (close == std::string_view::npos) throw MalformedLine(column, "unterminated '['");
        const auto inner = s_.substr(pos_ + 1, close - pos_ - 1);
        pos_ = close + 1;
        return inner;
    }

    std::string quoted(const char* column) {
        if (done() || s_[pos_] != '"') throw MalformedLine(column, "expected '\"'");
        ++pos_;
        std::string out;
        while (true) {
            if (done()) throw MalformedLine(column, "unterminated quoted field");
            const char c = s_[pos_++];
            if (c == '"') return out;
            if (c == '\\' && !done() && (s_[pos_] == '"' || s_[pos_] == '\\')) {
                out += s_[pos_++];
                continue;
            }
            out += c;
        }
    }

private:
    std::string_view s_;
    std::size_t pos_ = 0;
};

bool all_digits(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s) {
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    }
    return true;
}

unsigned to_uint(std::string_view s) {
    unsigned v = 0;
    for (char c : s) v = v * 10 + static_cast<unsigned>(c - '0');
    return v;
}

// dd/Mon/yyyy:HH:MM:SS +zzzz
Timestamp parse_time(std::string_view s) {
    constexpr const char* kCol = "timestamp";
    if (s.size() != 26 || s[2] != '/' || s[6] != '/' || s[11] != ':' || s[14] != ':' || s[17] != ':' ||
        s[20] != ' ' || (s[21] != '+' && s[21] != '-')) {
        throw MalformedLine(kCol, "expected dd/Mon/yyyy:HH:MM:SS +zzzz");
    }
    const auto day_s = s.substr(0, 2), mon_s = s.substr(3, 3), year_s = s.substr(7, 4);
    const auto hh_s = s.substr(12, 2), mm_s = s.substr(15, 2), ss_s = s.substr(18, 2);
    const auto oh_s = s.substr(22, 2), om_s = s.substr(24, 2);
    for (auto part : {day_s, year_s, hh_s, mm_s, ss_s, oh_s, om_s}) {
        if (!all_digits(part)) throw MalformedLine(kCol, "non-numeric component");
    }
    unsigned month = 0;
    for (unsigned i = 0; i < kMonths.size(); ++i) {
        if (kMonths[i] == mon_s) month = i + 1;
    }
    if (month == 0) throw MalformedLine(kCol, "unknown month");
    const unsigned year = to_uint(year_s), day = to_uint(day_s);
    const unsigned hh = to_uint(hh_s), mm = to_uint(mm_s), ss = to_uint(ss_s);
    const unsigned oh = to_uint(oh_s), om = to_uint(om_s);
    if (day < 1 || day > days_in_month(year, month) || hh > 23 || mm > 59 || ss > 60 || oh > 23 || om > 59) {
        throw MalformedLine(kCol, "component out of range");
    }
    const int offset = (s[21] == '-' ? -1 : 1) * static_cast<int>(oh * 60 + om);
    const std::int64_t local = utc_from_civil(static_cast<int>(year), month, day, static_cast<int>(hh),
                                              static_cast<int>(mm), static_cast<int>(ss));
    return Timestamp{local - static_cast<std::int64_t>(offset) * 60, offset};
}

std::string render_time(const Timestamp& ts) {
    const std::int64_t local = ts.utc_seconds + static_cast<std::int64_t>(ts.offset_minutes) * 60;
    const std::int64_t days = floor_div(local, 86400);
    const std::int64_t secs = local - days * 86400;
    const Civil c = civil_from_days(days);
    const int off = ts.offset_minutes < 0 ? -ts.offset_minutes : ts.offset_minutes;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%02u/%s/%04lld:%02d:%02d:%02d %c%02d%02d", c.day,
                  std::string(kMonths[c.month - 1]).c_str(), static_cast<long long>(c.year),
                  static_cast<int>(secs / 3600), static_cast<int>(secs / 60 % 60), static_cast<int>(secs % 60),
                  ts.offset_minutes < 0 ? '-' : '+', off / 60, off % 60);
    return buf;
}

bool is_ip(std::string_view s) {
    const std::string z(s);
    unsigned char buf[16];
    return inet_pton(AF_INET, z.c_str(), buf) == 1 || inet_pton(AF_INET6, z.c_str(), buf) == 1;
}

bool is_method_token(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s) {
        const auto u = static_cast<unsigned char>(c);
        if (u <= 32 || u >= 127 || c == '"' || c == '(' || c == ')' || c == ',' || c == '/' || c == ':' ||
            c == ';' || c == '<' || c == '=' || c == '>' || c == '?' || c == '@' || c == '[' || c == '\\' ||
            c == ']' || c == '{' || c == '}') {
            return false;
        }
    }
    return true;
}

void parse_request(std::string_view req, LogEntry& e) {
    const auto first = req.find(' ');
    if (first == std::string_view::npos || first == 0) throw MalformedLine("request", "missing method or target");
    const auto method = req.substr(0, first);
    if (!is_method_token(method)) throw MalformedLine("request", "invalid method token");
    auto rest = req.substr(first + 1);
    const auto last = rest.rfind(' ');
    if (last != std::string_view::npos && text::starts_with(rest.substr(last + 1), "HTTP/")) {
        e.protocol = std::string(rest.substr(last + 1));
        rest = rest.substr(0, last);
    }
    if (rest.empty()) throw MalformedLine("request", "empty target");
    e.method = std::string(method);
    e.path = std::string(rest);
}

std::optional<std::string> dash_absent(std::string v) {
    if (v == "-") return std::nullopt;
    return v;
}

std::string quote(std::string_view s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    out += '"';
    return out;
}

}  // namespace

std::int64_t utc_from_civil(int year, unsigned month, unsigned day, int hour, int minute, int second) {
    return days_from_civil(year, month, day) * 86400 + hour * 3600 + minute * 60 + second;
}

std::string format_utc(std::int64_t utc_seconds) {
    const std::int64_t days = floor_div(utc_seconds, 86400);
    const std::int64_t secs = utc_seconds - days * 86400;
    const Civil c = civil_from_days(days);
    char buf[48];
    std::snprintf(buf, sizeof buf, "%04lld-%02u-%02uT%02d:%02d:%02dZ", static_cast<long long>(c.year), c.month,
                  c.day, static_cast<int>(secs / 3600), static_cast<int>(secs / 60 % 60),
                  static_cast<int>(secs % 60));
    return buf;
}

LogDialect parse_dialect(std::string_view name) {
    if (name == "combined") return LogDialect::Combined;
    if (name == "combined+app") return LogDialect::CombinedApp;
    throw InvalidConfig("unknown log dialect '" + std::string(name) + "' (expected combined or combined+app)");
}

std::string_view to_string(LogDialect dialect) {
    return dialect == LogDialect::Combined ? "combined" : "combined+app";
}

LogEntry parse_line(std::string_view line, LogDialect dialect) {
    while (!line.empty() && (line.back() == '\r' || line.back() == '\n' || line.back() == ' ')) line.remove_suffix(1);
    if (line.empty()) throw MalformedLine("line", "empty");

    LogEntry e;
    Cursor cur(line);

    const auto ip = cur.token("ip");
    if (!is_ip(ip)) throw MalformedLine("ip", "not an IP address");
    e.ip = std::string(ip);
    cur.expect_space("ident");
    cur.token("ident");
    cur.expect_space("authuser");
    const auto authuser = cur.token("authuser");
    cur.expect_space("timestamp");
    e.timestamp = parse_time(cur.bracketed("timestamp"));
    cur.expect_space("request");
    parse_request(cur.quoted("request"), e);
    cur.expect_space("status");
    const auto status = cur.token("status");
    if (!all_digits(status) || status.size() > 3) throw MalformedLine("status", "not a number");
    e.status = static_cast<int>(to_uint(status));
    if (e.status < 100 || e.status > 599) throw MalformedLine("status", "out of range");
    cur.expect_space("bytes");
    const auto bytes = cur.token("bytes");
    if (bytes != "-") {
        const auto v = text::parse_uint(bytes);
        if (!v) throw MalformedLine("bytes", "not a non-negative integer");
        e.bytes = *v;
    }
    cur.expect_space("referer");
    e.referer = dash_absent(cur.quoted("referer"));
    cur.expect_space("user_agent");
    e.user_agent = dash_absent(cur.quoted("user_agent"));

    if (dialect == LogDialect::Combined) {
        if (authuser != "-") e.username = std::string(authuser);
    } else {
        cur.expect_space("country");
        const auto country = cur.token("country");
        if (country != "-") {
            if (country.size() != 2 || !std::isupper(static_cast<unsigned char>(country[0])) ||
                !std::isupper(static_cast<unsigned char>(country[1]))) {
                throw MalformedLine("country", "not an ISO-3166 alpha-2 code");
            }
            e.country = std::string(country);
        }
        cur.expect_space("username");
        e.username = dash_absent(cur.quoted("username"));
        cur.expect_space("web_service");
        const auto ws = cur.token("web_service");
        if (ws != "0" && ws != "1") throw MalformedLine("web_service", "expected 0 or 1");
        e.via_web_service = ws == "1";
    }
    if (!cur.done()) throw MalformedLine("line", "trailing data");
    return e;
}

std::string render_line(const LogEntry& e, LogDialect dialect) {
    std::string out;
    out.reserve(160);
    out += e.ip;
    out += " - ";
    out += (dialect == LogDialect::Combined && e.username) ? *e.username : "-";
    out += " [";
    out += render_time(e.timestamp);
    out += "] ";
    std::string request = e.method + " " + e.path;
    if (!e.protocol.empty()) request += " " + e.protocol;
    out += quote(request);
    out += ' ';
    out += std::to_string(e.status);
    out += ' ';
    out += e.bytes ? std::to_string(*e.bytes) : "-";
    out += ' ';
    out += quote(e.referer ? *e.referer : "-");
    out += ' ';
    out += quote(e.user_agent ? *e.user_agent : "-");
    if (dialect == LogDialect::CombinedApp) {
        out += ' ';
        out += e.country ? *e.country : "-";
        out += ' ';
        out += quote(e.username ? *e.username : "-");
        out += e.via_web_service ? " 1" : " 0";
    }
    return out;
}

}  // namespace botdetect
