#include "botdetect/resource.hpp"

#include <fstream>
#include <sstream>

#include "botdetect/defaults.hpp"
#include "botdetect/errors.hpp"
#include "botdetect/text.hpp"

namespace botdetect {

namespace {

constexpr std::string_view kIdMarker = "{id}";

}  // namespace

std::string_view to_string(ResourceKind kind) {
    switch (kind) {
        case ResourceKind::AbstractHtml: return "abstract";
        case ResourceKind::FullTextHtml: return "fulltext-html";
        case ResourceKind::FullTextPdf: return "fulltext-pdf";
        case ResourceKind::ReferencesHtml: return "references";
        case ResourceKind::SupplementaryHtml: return "supplementary";
        case ResourceKind::Other: return "other";
    }
    return "other";
}

ResourceKind parse_resource_kind(std::string_view name) {
    const std::string n = text::to_lower(name);
    if (n == "abstract" || n == "abstracthtml") return ResourceKind::AbstractHtml;
    if (n == "fulltext-html" || n == "fulltexthtml") return ResourceKind::FullTextHtml;
    if (n == "fulltext-pdf" || n == "fulltextpdf") return ResourceKind::FullTextPdf;
    if (n == "references" || n == "referenceshtml") return ResourceKind::ReferencesHtml;
    if (n == "supplementary" || n == "supplementaryhtml") return ResourceKind::SupplementaryHtml;
    if (n == "other") return ResourceKind::Other;
    throw InvalidRule("unknown resource class '" + std::string(name) + "'");
}

ResourceRule::ResourceRule(std::string pattern, ResourceKind kind) : pattern_(std::move(pattern)), kind_(kind) {
    if (kind_ == ResourceKind::Other) throw InvalidRule("rule '" + pattern_ + "' may not map to class other");
    const auto pos = pattern_.find(kIdMarker);
    if (pos == std::string::npos) throw InvalidRule("rule '" + pattern_ + "' has no {id} capture");
    if (pattern_.find(kIdMarker, pos + kIdMarker.size()) != std::string::npos) {
        throw InvalidRule("rule '" + pattern_ + "' has more than one {id} capture");
    }
    if (pattern_.empty() || pattern_.front() != '/') throw InvalidRule("rule '" + pattern_ + "' must start with '/'");
    prefix_ = pattern_.substr(0, pos);
    suffix_ = pattern_.substr(pos + kIdMarker.size());
    match_query_ = pattern_.find('?') != std::string::npos;
}

std::optional<std::string> ResourceRule::match(std::string_view path) const {
    if (!match_query_) path = path.substr(0, path.find('?'));
    if (path.size() <= prefix_.size() + suffix_.size()) return std::nullopt;
    if (path.substr(0, prefix_.size()) != prefix_) return std::nullopt;
    if (path.substr(path.size() - suffix_.size()) != suffix_) return std::nullopt;
    return std::string(path.substr(prefix_.size(), path.size() - prefix_.size() - suffix_.size()));
}

ResourceRuleSet ResourceRuleSet::parse(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::vector<ResourceRule> rules;
    std::size_t line_no = 0;
    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto t = text::trim(line);
        if (t.empty() || t.front() == '#') continue;
        const auto cols = text::split(t, '\t');
        if (cols.size() != 2) {
            throw InvalidRule("rule line " + std::to_string(line_no) + ": expected 'pattern<TAB>class'");
        }
        rules.emplace_back(std::string(text::trim(cols[0])), parse_resource_kind(text::trim(cols[1])));
    }
    return ResourceRuleSet(std::move(rules));
}

ResourceRuleSet ResourceRuleSet::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open resource rules '" + path.string() + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

ResourceRuleSet ResourceRuleSet::defaults() { return parse(defaults::resource_rules()); }

ResourceClass classify_resource(std::string_view path, const ResourceRuleSet& rules) {
    for (const auto& rule : rules.rules()) {
        if (auto id = rule.match(path)) return ResourceClass{rule.kind(), std::move(id)};
    }
    return {};
}

}  // namespace botdetect
