#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace botdetect::text {

std::vector<std::string_view> split(std::string_view s, char sep);
std::vector<std::string_view> split_whitespace(std::string_view s);
std::string_view trim(std::string_view s);
std::string join(const std::vector<std::string>& parts, std::string_view sep);
std::string to_lower(std::string_view s);

/// Shortest representation that parses back to the same double.
std::string format_double(double v);

std::optional<double> parse_double(std::string_view s);
std::optional<std::int64_t> parse_int(std::string_view s);
std::optional<std::uint64_t> parse_uint(std::string_view s);

/// Replace tab, CR and LF with spaces so the value fits one TSV cell.
std::string tsv_safe(std::string_view s);

/// Reads lines, skipping blanks and lines starting with '#'. Trailing CR is
/// removed.
std::vector<std::string> read_config_lines(std::istream& in);

bool starts_with(std::string_view s, std::string_view prefix);

}  // namespace botdetect::text
