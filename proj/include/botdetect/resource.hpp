#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace botdetect {

/// The article resources that carry text. Everything else is `Other` and is
/// dropped at ingest.
enum class ResourceKind { AbstractHtml, FullTextHtml, FullTextPdf, ReferencesHtml, SupplementaryHtml, Other };

std::string_view to_string(ResourceKind kind);
/// Accepts the rule-file spellings (abstract, fulltext-html, ...).
ResourceKind parse_resource_kind(std::string_view name);

struct ResourceClass {
    ResourceKind kind = ResourceKind::Other;
    std::optional<std::string> article_id;  // present iff kind != Other

    bool operator==(const ResourceClass&) const = default;
};

/// A path template with exactly one `{id}` capture, e.g. `/doi/abs/{id}`.
/// The query string of the request is stripped before matching unless the
/// template itself contains a `?`.
class ResourceRule {
public:
    ResourceRule(std::string pattern, ResourceKind kind);

    const std::string& pattern() const noexcept { return pattern_; }
    ResourceKind kind() const noexcept { return kind_; }

    /// The captured article id, if the path matches.
    std::optional<std::string> match(std::string_view path) const;

private:
    std::string pattern_;
    ResourceKind kind_;
    std::string prefix_;
    std::string suffix_;
    bool match_query_ = false;
};

class ResourceRuleSet {
public:
    ResourceRuleSet() = default;
    explicit ResourceRuleSet(std::vector<ResourceRule> rules) : rules_(std::move(rules)) {}

    /// One `pattern<TAB>class` per line; blank lines and `#` comments skipped.
    static ResourceRuleSet parse(std::string_view text);
    static ResourceRuleSet load(const std::filesystem::path& path);
    /// The rules shipped in data/resource_rules.txt.
    static ResourceRuleSet defaults();

    const std::vector<ResourceRule>& rules() const noexcept { return rules_; }

private:
    std::vector<ResourceRule> rules_;
};

/// First matching rule wins; no match is Other without an article id.
ResourceClass classify_resource(std::string_view path, const ResourceRuleSet& rules);

}  // namespace botdetect
