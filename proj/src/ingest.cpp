#include "botdetect/ingest.hpp"

#include <zlib.h>

#include <algorithm>
#include <array>
#include <fstream>
#include <istream>
#include <ostream>

#include "botdetect/errors.hpp"
#include "botdetect/text.hpp"

namespace botdetect {

namespace {

constexpr std::string_view kEntriesHeader = "# botdetect-entries v1";
constexpr std::size_t kMaxSamples = 10;

class StreamSource : public LineSource {
public:
    explicit StreamSource(std::istream& in) : in_(in) {}

    bool next(std::string& line) override { return static_cast<bool>(std::getline(in_, line)); }

    std::string error() const override { return in_.bad() ? "stream read error" : std::string{}; }

private:
    std::istream& in_;
};

class GzipSource : public LineSource {
public:
    explicit GzipSource(const std::filesystem::path& path) : file_(gzopen(path.c_str(), "rb")) {
        if (!file_) throw Error("cannot open '" + path.string() + "'");
    }
    ~GzipSource() override {
        if (file_) gzclose(file_);
    }
    GzipSource(const GzipSource&) = delete;
    GzipSource& operator=(const GzipSource&) = delete;

    bool next(std::string& line) override {
        line.clear();
        while (true) {
            if (pos_ == len_) {
                if (eof_) return !line.empty();
                const int n = gzread(file_, buf_.data(), static_cast<unsigned>(buf_.size()));
                if (n < 0) {
                    int code = 0;
                    error_ = gzerror(file_, &code);
                    eof_ = true;
                    return false;
                }
                if (n == 0) {
                    eof_ = true;
                    return !line.empty();
                }
                pos_ = 0;
                len_ = static_cast<std::size_t>(n);
            }
            const char* begin = buf_.data() + pos_;
            const char* end = buf_.data() + len_;
            const char* nl = std::find(begin, end, '\n');
            line.append(begin, nl);
            pos_ = static_cast<std::size_t>(nl - buf_.data());
            if (nl != end) {
                ++pos_;
                return true;
            }
        }
    }

    std::string error() const override { return error_; }

private:
    gzFile file_;
    std::array<char, 1 << 16> buf_{};
    std::size_t pos_ = 0;
    std::size_t len_ = 0;
    bool eof_ = false;
    std::string error_;
};

bool has_gzip_magic(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path.string() + "'");
    unsigned char magic[2] = {0, 0};
    in.read(reinterpret_cast<char*>(magic), 2);
    return in.gcount() == 2 && magic[0] == 0x1f && magic[1] == 0x8b;
}

}  // namespace

IngestResult ingest(LineSource& source, LogDialect dialect, const ResourceRuleSet& rules) {
    IngestResult result;
    auto& rep = result.report;
    std::string line;
    while (source.next(line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (text::trim(line).empty()) continue;
        ++rep.read;
        try {
            LogEntry entry = parse_line(line, dialect);
            ResourceClass cls = classify_resource(entry.path, rules);
            if (cls.kind == ResourceKind::Other) {
                ++rep.dropped;
                continue;
            }
            ++rep.kept;
            result.entries.push_back(ClassifiedEntry{std::move(entry), std::move(cls)});
        } catch (const MalformedLine& e) {
            ++rep.malformed;
            if (rep.samples.size() < kMaxSamples) {
                rep.samples.push_back("line " + std::to_string(rep.read) + ": " + e.what());
            }
        }
    }
    rep.io_error = source.error();
    return result;
}

IngestResult ingest(std::istream& in, LogDialect dialect, const ResourceRuleSet& rules) {
    StreamSource source(in);
    return ingest(source, dialect, rules);
}

IngestResult ingest_file(const std::filesystem::path& path, LogDialect dialect, const ResourceRuleSet& rules) {
    if (has_gzip_magic(path)) {
        GzipSource source(path);
        auto result = ingest(source, dialect, rules);
        result.report.compressed = true;
        return result;
    }
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path.string() + "'");
    return ingest(in, dialect, rules);
}

void write_report(std::ostream& out, const IngestReport& r) {
    out << "read=" << r.read << '\n'
        << "kept=" << r.kept << '\n'
        << "dropped=" << r.dropped << '\n'
        << "malformed=" << r.malformed << '\n'
        << "compressed=" << (r.compressed ? 1 : 0) << '\n';
    if (!r.io_error.empty()) out << "io_error=" << r.io_error << '\n';
    for (const auto& s : r.samples) out << "malformed_sample=" << s << '\n';
}

void write_entries(std::ostream& out, std::span<const ClassifiedEntry> entries) {
    out << kEntriesHeader << " count=" << entries.size() << '\n';
    for (const auto& e : entries) {
        out << to_string(e.resource.kind) << '\t' << e.resource.article_id.value_or("-") << '\t'
            << render_line(e.entry, LogDialect::CombinedApp) << '\n';
    }
}

std::vector<ClassifiedEntry> read_entries(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || !text::starts_with(line, kEntriesHeader)) {
        throw FormatError("not an entries file (missing '" + std::string(kEntriesHeader) + "' header)");
    }
    std::vector<ClassifiedEntry> out;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto t1 = line.find('\t');
        const auto t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
        if (t2 == std::string::npos) throw FormatError("entries line " + std::to_string(line_no) + ": too few columns");
        ClassifiedEntry ce;
        try {
            ce.resource.kind = parse_resource_kind(std::string_view(line).substr(0, t1));
            ce.entry = parse_line(std::string_view(line).substr(t2 + 1), LogDialect::CombinedApp);
        } catch (const Error& e) {
            throw FormatError("entries line " + std::to_string(line_no) + ": " + e.what());
        }
        const auto id = line.substr(t1 + 1, t2 - t1 - 1);
        if (ce.resource.kind != ResourceKind::Other) ce.resource.article_id = id;
        out.push_back(std::move(ce));
    }
    return out;
}

}  // namespace botdetect
