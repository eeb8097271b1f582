#include <doctest.h>

#include <regex>
#include <sstream>

#include <zlib.h>

#include "botdetect/errors.hpp"
#include "botdetect/ingest.hpp"
#include "support.hpp"

using namespace botdetect;

namespace {

const std::string kExample =
    R"(10.0.0.1 - - [05/Jan/2014:10:00:00 +0200] "GET /doi/abs/10.1/j.1 HTTP/1.1" 200 5120 "-" "Mozilla/5.0")";

// Reference parser: one regex per dialect plus a day-counting clock, written
// without reuse of the production grammar.
struct OracleEntry {
    std::string ip, method, path, protocol;
    std::int64_t utc = 0;
    int offset = 0;
    int status = 0;
    std::optional<std::uint64_t> bytes;
    std::optional<std::string> referer, ua, country, username;
    bool ws = false;
};

std::int64_t oracle_days(int y, int m, int d) {
    static const int kMonth[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    auto leap = [](int yy) { return (yy % 4 == 0 && yy % 100 != 0) || yy % 400 == 0; };
    std::int64_t days = 0;
    for (int yy = 1970; yy < y; ++yy) days += leap(yy) ? 366 : 365;
    for (int mm = 1; mm < m; ++mm) days += kMonth[mm - 1] + (mm == 2 && leap(y) ? 1 : 0);
    return days + d - 1;
}

std::string unescape(const std::string& s) {
    std::string out;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '\\' && i + 1 < s.size() && (s[i + 1] == '"' || s[i + 1] == '\\')) ++i;
        out += s[i];
    }
    return out;
}

std::optional<OracleEntry> oracle_parse(const std::string& line, bool app) {
    static const std::string q = R"re("((?:[^"\\]|\\.)*)")re";
    static const std::regex base_re(R"re(^(\S+) \S+ (\S+) \[(\d\d)/(\w{3})/(\d{4}):(\d\d):(\d\d):(\d\d) ([+-])(\d\d)(\d\d)\] )re" +
                                    q + R"re( (\d{3}) (\d+|-) )re" + q + " " + q);
    static const std::regex app_re(R"re(^ ([A-Z]{2}|-) )re" + q + R"re( ([01])$)re");
    static const std::vector<std::string> months = {"Jan", "Feb", "Mar", "Apr", "May", "Jun",
                                                    "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};
    std::smatch m;
    if (!std::regex_search(line, m, base_re, std::regex_constants::match_continuous)) return std::nullopt;
    const std::string tail = m.suffix().str();
    OracleEntry e;
    e.ip = m[1];
    const int month = static_cast<int>(std::find(months.begin(), months.end(), m[4].str()) - months.begin()) + 1;
    const std::int64_t local = oracle_days(std::stoi(m[5]), month, std::stoi(m[3])) * 86400 +
                               std::stoi(m[6]) * 3600 + std::stoi(m[7]) * 60 + std::stoi(m[8]);
    e.offset = (m[9] == "-" ? -1 : 1) * (std::stoi(m[10]) * 60 + std::stoi(m[11]));
    e.utc = local - e.offset * 60;
    std::istringstream req(unescape(m[12]));
    std::vector<std::string> toks;
    for (std::string t; req >> t;) toks.push_back(t);
    e.method = toks.at(0);
    if (toks.size() >= 3 && toks.back().rfind("HTTP/", 0) == 0) {
        e.protocol = toks.back();
        toks.pop_back();
    }
    e.path = toks.at(1);
    e.status = std::stoi(m[13]);
    if (m[14] != "-") e.bytes = std::stoull(m[14]);
    auto dash = [](std::string v) -> std::optional<std::string> {
        if (v == "-") return std::nullopt;
        return v;
    };
    e.referer = dash(unescape(m[15]));
    e.ua = dash(unescape(m[16]));
    if (app) {
        std::smatch a;
        if (!std::regex_match(tail, a, app_re)) return std::nullopt;
        e.country = dash(a[1]);
        e.username = dash(unescape(a[2]));
        e.ws = a[3] == "1";
    } else {
        if (!tail.empty()) return std::nullopt;
        if (m[2] != "-") e.username = m[2];
    }
    return e;
}

std::string quote_field(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out + "\"";
}

std::string two(int v) { return (v < 10 ? "0" : "") + std::to_string(v); }

std::string random_line(testsupport::Gen& g, bool app) {
    static const std::vector<std::string> months = {"Jan", "Feb", "Mar", "Apr", "May", "Jun",
                                                    "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};
    static const std::vector<std::string> methods = {"GET", "HEAD", "POST", "OPTIONS"};
    static const std::vector<std::string> agents = {"Mozilla/5.0 (X11; Linux) Firefox/30.0", "curl/7.35.0",
                                                    "odd \"quoted\" agent", "back\\slash", "-", "Googlebot/2.1"};
    std::string ip = g.coin(0.8) ? std::to_string(g.between(1, 223)) + "." + std::to_string(g.between(0, 255)) + "." +
                                       std::to_string(g.between(0, 255)) + "." + std::to_string(g.between(1, 254))
                                 : "2001:db8::" + std::to_string(g.between(1, 9999));
    std::string user = g.coin(0.3) ? "user" + std::to_string(g.below(100)) : "-";
    std::string time = two(static_cast<int>(g.between(1, 28))) + "/" + g.pick(months) + "/" +
                       std::to_string(g.between(1990, 2035)) + ":" + two(static_cast<int>(g.between(0, 23))) + ":" +
                       two(static_cast<int>(g.between(0, 59))) + ":" + two(static_cast<int>(g.between(0, 59))) + " " +
                       (g.coin() ? "+" : "-") + two(static_cast<int>(g.between(0, 14))) +
                       (g.coin() ? "00" : "30");
    std::string path = "/doi/" + std::string(g.coin() ? "abs" : "pdf") + "/10." + std::to_string(g.below(9999)) +
                       "/j." + std::to_string(g.below(999)) + (g.coin(0.2) ? "?utm=x" + std::to_string(g.below(9)) : "");
    std::string request = g.pick(methods) + " " + path + (g.coin(0.9) ? (g.coin() ? " HTTP/1.1" : " HTTP/1.0") : "");
    std::string bytes = g.coin(0.2) ? "-" : std::to_string(g.below(10000000));
    std::string referer = g.coin(0.5) ? "-" : "https://example.org/p?q=\"" + std::to_string(g.below(50)) + "\"";
    std::string line = ip + " - " + (app ? "-" : user) + " [" + time + "] " + quote_field(request) + " " +
                       std::to_string(g.between(100, 599)) + " " + bytes + " " + quote_field(referer) + " " +
                       quote_field(g.pick(agents));
    if (app) {
        line += " " + std::string(g.coin(0.2) ? "-" : (g.coin() ? "DE" : "US")) + " " +
                quote_field(g.coin(0.5) ? "-" : "reader " + std::to_string(g.below(9))) + " " + (g.coin(0.1) ? "1" : "0");
    }
    return line;
}

void check_against_oracle(const LogEntry& e, const OracleEntry& o) {
    CHECK(e.ip == o.ip);
    CHECK(e.timestamp.utc_seconds == o.utc);
    CHECK(e.timestamp.offset_minutes == o.offset);
    CHECK(e.method == o.method);
    CHECK(e.path == o.path);
    CHECK(e.protocol == o.protocol);
    CHECK(e.status == o.status);
    CHECK(e.bytes == o.bytes);
    CHECK(e.referer == o.referer);
    CHECK(e.user_agent == o.ua);
    CHECK(e.username == o.username);
    CHECK(e.country == o.country);
    CHECK(e.via_web_service == o.ws);
}

std::string gzip(const std::string& data) {
    uLongf cap = compressBound(static_cast<uLong>(data.size())) + 32;
    std::string out(cap, '\0');
    z_stream zs{};
    deflateInit2(&zs, Z_DEFAULT_COMPRESSION, Z_DEFLATED, 15 + 16, 8, Z_DEFAULT_STRATEGY);
    zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(data.data()));
    zs.avail_in = static_cast<uInt>(data.size());
    zs.next_out = reinterpret_cast<Bytef*>(out.data());
    zs.avail_out = static_cast<uInt>(cap);
    deflate(&zs, Z_FINISH);
    out.resize(zs.total_out);
    deflateEnd(&zs);
    return out;
}

}  // namespace

TEST_CASE("parse_line reads the worked combined-format example") {
    const auto e = parse_line(kExample, LogDialect::Combined);
    CHECK(e.ip == "10.0.0.1");
    CHECK(format_utc(e.timestamp.utc_seconds) == "2014-01-05T08:00:00Z");
    CHECK(e.timestamp.offset_minutes == 120);
    CHECK(e.method == "GET");
    CHECK(e.path == "/doi/abs/10.1/j.1");
    CHECK(e.protocol == "HTTP/1.1");
    CHECK(e.status == 200);
    CHECK(e.bytes == 5120u);
    CHECK_FALSE(e.referer.has_value());
    CHECK(e.user_agent == "Mozilla/5.0");
    CHECK_FALSE(e.username.has_value());
}

TEST_CASE("a dash byte count is absent, not zero") {
    std::string line = kExample;
    line.replace(line.find("5120"), 4, "-");
    CHECK_FALSE(parse_line(line, LogDialect::Combined).bytes.has_value());
    line.replace(line.find(" - \"-\""), 3, " 0 ");
    CHECK(parse_line(line, LogDialect::Combined).bytes == 0u);
}

TEST_CASE("status outside 100..599 is malformed with the column named") {
    std::string line = kExample;
    line.replace(line.find(" 200 "), 5, " 700 ");
    try {
        parse_line(line, LogDialect::Combined);
        FAIL("expected MalformedLine");
    } catch (const MalformedLine& e) {
        CHECK(e.column() == "status");
        CHECK(e.reason() == "out of range");
    }
}

TEST_CASE("malformed inputs name their column") {
    const std::vector<std::pair<std::string, std::string>> cases = {
        {"not-an-ip - - [05/Jan/2014:10:00:00 +0200] \"GET / HTTP/1.1\" 200 1 \"-\" \"-\"", "ip"},
        {"10.0.0.1 - - [05/Foo/2014:10:00:00 +0200] \"GET / HTTP/1.1\" 200 1 \"-\" \"-\"", "timestamp"},
        {"10.0.0.1 - - [31/Feb/2014:10:00:00 +0200] \"GET / HTTP/1.1\" 200 1 \"-\" \"-\"", "timestamp"},
        {"10.0.0.1 - - [05/Jan/2014:10:00:00 +0200] \"GET\" 200 1 \"-\" \"-\"", "request"},
        {"10.0.0.1 - - [05/Jan/2014:10:00:00 +0200] \"GET / HTTP/1.1\" 2x0 1 \"-\" \"-\"", "status"},
        {"10.0.0.1 - - [05/Jan/2014:10:00:00 +0200] \"GET / HTTP/1.1\" 200 -5 \"-\" \"-\"", "bytes"},
        {"10.0.0.1 - - [05/Jan/2014:10:00:00 +0200] \"GET / HTTP/1.1\" 200 1 \"-\" \"unterminated", "user_agent"},
        {"10.0.0.1 - - [05/Jan/2014:10:00:00 +0200] \"GET / HTTP/1.1\" 200 1 \"-\" \"-\" extra", "line"},
    };
    for (const auto& [line, column] : cases) {
        CAPTURE(line);
        try {
            parse_line(line, LogDialect::Combined);
            FAIL("expected MalformedLine");
        } catch (const MalformedLine& e) {
            CHECK(e.column() == column);
        }
    }
}

TEST_CASE("combined+app reads the application columns") {
    const auto e = parse_line(kExample + R"( GR "alice" 1)", LogDialect::CombinedApp);
    CHECK(e.country == "GR");
    CHECK(e.username == "alice");
    CHECK(e.via_web_service);
    CHECK_THROWS_AS(parse_line(kExample + R"( Gr "alice" 1)", LogDialect::CombinedApp), MalformedLine);
    CHECK_THROWS_AS(parse_line(kExample + R"( GR "alice" 2)", LogDialect::CombinedApp), MalformedLine);
    CHECK_THROWS_AS(parse_line(kExample, LogDialect::CombinedApp), MalformedLine);
}

TEST_CASE("parse_line agrees with an independent regex oracle on generated lines") {
    testsupport::Gen g(20140105);
    for (int i = 0; i < 1200; ++i) {
        const bool app = i % 2 == 1;
        const auto line = random_line(g, app);
        CAPTURE(line);
        const auto o = oracle_parse(line, app);
        REQUIRE(o.has_value());
        const auto dialect = app ? LogDialect::CombinedApp : LogDialect::Combined;
        const auto e = parse_line(line, dialect);
        check_against_oracle(e, *o);
    }
}

TEST_CASE("render then parse is the identity on parsed entries") {
    testsupport::Gen g(7);
    for (int i = 0; i < 1000; ++i) {
        const auto dialect = i % 2 ? LogDialect::CombinedApp : LogDialect::Combined;
        const auto e = parse_line(random_line(g, i % 2 == 1), dialect);
        const auto again = parse_line(render_line(e, dialect), dialect);
        CHECK(again == e);
    }
}

TEST_CASE("classify_resource: first matching rule and query handling") {
    const auto rules = ResourceRuleSet::defaults();
    const auto abs = classify_resource("/doi/abs/10.1/j.1", rules);
    CHECK(abs.kind == ResourceKind::AbstractHtml);
    CHECK(abs.article_id == "10.1/j.1");
    const auto pdf = classify_resource("/doi/pdf/10.1/j.2", rules);
    CHECK(pdf.kind == ResourceKind::FullTextPdf);
    CHECK(pdf.article_id == "10.1/j.2");
    CHECK(classify_resource("/doi/pdf/10.1/j.2?download=true", rules).article_id == "10.1/j.2");
    const auto other = classify_resource("/search?q=x", rules);
    CHECK(other.kind == ResourceKind::Other);
    CHECK_FALSE(other.article_id.has_value());
    CHECK(classify_resource("/", rules).kind == ResourceKind::Other);
    CHECK(classify_resource("/doi/abs/", rules).kind == ResourceKind::Other);

    const auto custom = ResourceRuleSet::parse("/a/{id}/x\tabstract\n/a/{id}\tfulltext-pdf\n");
    CHECK(classify_resource("/a/7/x", custom).kind == ResourceKind::AbstractHtml);
    CHECK(classify_resource("/a/7", custom).kind == ResourceKind::FullTextPdf);
    CHECK_THROWS_AS(ResourceRuleSet::parse("/a/b\tabstract\n"), InvalidRule);
    CHECK_THROWS_AS(ResourceRuleSet::parse("/a/{id}\tnonsense\n"), InvalidRule);
}

TEST_CASE("classification is a function of the path") {
    const auto rules = ResourceRuleSet::defaults();
    testsupport::Gen g(3);
    for (int i = 0; i < 200; ++i) {
        const std::string p = "/doi/" + std::string(g.coin() ? "full" : "ref") + "/x" + std::to_string(g.below(50));
        const auto a = classify_resource(p, rules), b = classify_resource(p, rules);
        CHECK(a == b);
        CHECK(a.article_id.has_value() == (a.kind != ResourceKind::Other));
    }
}

TEST_CASE("ingest counts kept, dropped and malformed lines") {
    const auto rules = ResourceRuleSet::defaults();
    auto line = [](const std::string& path) {
        return "10.0.0.1 - - [05/Jan/2014:10:00:00 +0200] \"GET " + path + " HTTP/1.1\" 200 1 \"-\" \"ua\"\n";
    };
    {
        std::istringstream in(line("/doi/abs/a") + line("/") + line("/doi/pdf/b") + line("/search?q=x") +
                              line("/doi/full/c"));
        const auto r = ingest(in, LogDialect::Combined, rules);
        CHECK(r.entries.size() == 3);
        CHECK(r.report.read == 5);
        CHECK(r.report.kept == 3);
        CHECK(r.report.dropped == 2);
        CHECK(r.report.malformed == 0);
        CHECK(r.entries[1].resource.article_id == "b");
    }
    {
        std::istringstream in("");
        const auto r = ingest(in, LogDialect::Combined, rules);
        CHECK(r.entries.empty());
        CHECK(r.report == IngestReport{});
    }
    {
        std::istringstream in(line("/doi/abs/a") + "garbage line\n" + line("/doi/abs/b") + line("/doi/abs/c"));
        const auto r = ingest(in, LogDialect::Combined, rules);
        CHECK(r.entries.size() == 3);
        CHECK(r.report.malformed == 1);
        REQUIRE(r.report.samples.size() == 1);
        CHECK(r.report.samples[0].find("line 2") != std::string::npos);
    }
}

TEST_CASE("ingest totals always add up") {
    const auto rules = ResourceRuleSet::defaults();
    testsupport::Gen g(11);
    for (int round = 0; round < 30; ++round) {
        std::string text;
        for (int i = 0; i < 40; ++i) {
            std::string l = random_line(g, false);
            if (g.coin(0.2)) l = l.substr(0, g.below(l.size()));
            if (const auto at = l.find("/doi/"); at != std::string::npos && g.coin(0.2)) l.replace(at, 5, "/xyz/");
            text += l + "\n";
        }
        std::istringstream in(text);
        const auto r = ingest(in, LogDialect::Combined, rules);
        CHECK(r.report.kept + r.report.dropped + r.report.malformed == r.report.read);
        CHECK(r.entries.size() == r.report.kept);
    }
}

TEST_CASE("gzip input is detected by its magic bytes") {
    const auto dir = testsupport::scratch_dir("gzip");
    const std::string body = kExample + "\n" + kExample + "\n";
    {
        std::ofstream(dir / "plain.log", std::ios::binary) << body;
        std::ofstream(dir / "packed.log", std::ios::binary) << gzip(body);
    }
    const auto rules = ResourceRuleSet::defaults();
    const auto plain = ingest_file(dir / "plain.log", LogDialect::Combined, rules);
    const auto packed = ingest_file(dir / "packed.log", LogDialect::Combined, rules);
    CHECK_FALSE(plain.report.compressed);
    CHECK(packed.report.compressed);
    CHECK(packed.entries == plain.entries);
    CHECK(packed.entries.size() == 2);
}

TEST_CASE("entries file round-trips") {
    std::istringstream in(kExample + "\n" + kExample + R"(x)" + "\n");
    const auto r = ingest(in, LogDialect::Combined, ResourceRuleSet::defaults());
    std::ostringstream out;
    write_entries(out, r.entries);
    std::istringstream back(out.str());
    CHECK(read_entries(back) == r.entries);
    std::istringstream bad("wrong header\n");
    CHECK_THROWS_AS(read_entries(bad), FormatError);
}
