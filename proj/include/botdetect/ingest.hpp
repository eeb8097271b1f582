#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "botdetect/log_entry.hpp"
#include "botdetect/resource.hpp"

namespace botdetect {

struct ClassifiedEntry {
    LogEntry entry;
    ResourceClass resource;

    bool operator==(const ClassifiedEntry&) const = default;
};

struct IngestReport {
    std::size_t read = 0;
    std::size_t kept = 0;
    std::size_t dropped = 0;
    std::size_t malformed = 0;
    bool compressed = false;
    /// Set when the input stream failed mid-way; the counts cover the lines
    /// read before the failure.
    std::string io_error;
    /// The first few malformed lines as "line N: column: reason".
    std::vector<std::string> samples;

    bool operator==(const IngestReport&) const = default;
};

struct IngestResult {
    std::vector<ClassifiedEntry> entries;
    IngestReport report;
};

/// Pull-style line source so plain and gzip inputs share one ingest loop.
class LineSource {
public:
    virtual ~LineSource() = default;
    /// False at end of input or on error; see error().
    virtual bool next(std::string& line) = 0;
    virtual std::string error() const { return {}; }
};

/// Parses and classifies every line, keeping only article resources. Input
/// order is preserved. Malformed lines are counted, never fatal.
IngestResult ingest(LineSource& source, LogDialect dialect, const ResourceRuleSet& rules);
IngestResult ingest(std::istream& in, LogDialect dialect, const ResourceRuleSet& rules);

/// Opens a log file, transparently decompressing gzip input (detected by the
/// 1f 8b magic bytes).
IngestResult ingest_file(const std::filesystem::path& path, LogDialect dialect, const ResourceRuleSet& rules);

/// key=value lines.
void write_report(std::ostream& out, const IngestReport& report);

/// Entries file: a `# botdetect-entries v1` header, then one
/// `class<TAB>article_id<TAB>log line` row per entry. The log line is always
/// rendered in the combined+app dialect so no field is lost.
void write_entries(std::ostream& out, std::span<const ClassifiedEntry> entries);
std::vector<ClassifiedEntry> read_entries(std::istream& in);

}  // namespace botdetect
