#include "botdetect/labeling.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "botdetect/defaults.hpp"
#include "botdetect/errors.hpp"
#include "botdetect/text.hpp"

namespace botdetect {

namespace {

struct ClassName {
    UAClass cls;
    std::string_view name;
};

constexpr ClassName kClassNames[] = {
    {UAClass::CloudClient, "cloud-client"},     {UAClass::Console, "console"},
    {UAClass::OfflineBrowser, "offline-browser"}, {UAClass::LinkChecker, "link-checker"},
    {UAClass::Crawler, "crawler"},              {UAClass::FeedFetcher, "feed-fetcher"},
    {UAClass::Library, "library"},              {UAClass::MobileBrowser, "mobile-browser"},
    {UAClass::Validator, "validator"},          {UAClass::Browser, "browser"},
    {UAClass::Unknown, "unknown"},              {UAClass::Other, "other"},
};

std::regex compile(const std::string& pattern, std::string_view where) {
    try {
        return std::regex(pattern, std::regex::ECMAScript | std::regex::icase | std::regex::optimize);
    } catch (const std::regex_error& e) {
        throw InvalidRegex(std::string(where) + ": invalid regex '" + pattern + "': " + e.what());
    }
}

std::vector<std::string> pattern_lines(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::vector<std::string> out;
    for (auto& line : text::read_config_lines(in)) out.emplace_back(text::trim(line));
    return out;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path.string() + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

std::string_view to_string(UAClass c) {
    for (const auto& cn : kClassNames) {
        if (cn.cls == c) return cn.name;
    }
    return "unknown";
}

UAClass parse_ua_class(std::string_view name) {
    const std::string n = text::to_lower(name);
    for (const auto& cn : kClassNames) {
        if (cn.name == n) return cn.cls;
    }
    throw InvalidRule("unknown user-agent class '" + std::string(name) + "'");
}

UAPatternDB UAPatternDB::parse(std::string_view text_in) {
    UAPatternDB db;
    for (const auto& line : pattern_lines(text_in)) {
        const auto tab = line.find('\t');
        if (tab == std::string::npos) throw InvalidRule("ua pattern line '" + line + "': expected 'class<TAB>regex'");
        const auto cls = parse_ua_class(text::trim(std::string_view(line).substr(0, tab)));
        std::string pattern(text::trim(std::string_view(line).substr(tab + 1)));
        auto re = compile(pattern, "ua pattern db");
        db.patterns_.push_back(Entry{cls, std::move(pattern), std::move(re)});
    }
    return db;
}

UAPatternDB UAPatternDB::load(const std::filesystem::path& path) { return parse(read_file(path)); }

UAPatternDB UAPatternDB::defaults() { return parse(defaults::ua_patterns()); }

UAClass UAPatternDB::classify(std::string_view ua) const {
    if (text::trim(ua).empty()) return UAClass::Unknown;
    for (const auto& p : patterns_) {
        if (std::regex_search(ua.begin(), ua.end(), p.re)) return p.cls;
    }
    return UAClass::Unknown;
}

RobotLists RobotLists::build(const std::vector<std::pair<std::string, std::string>>& named_lists,
                             std::string_view exclusions_text) {
    const auto excluded = pattern_lines(exclusions_text);
    RobotLists lists;
    for (const auto& [name, body] : named_lists) {
        for (auto& pattern : pattern_lines(body)) {
            if (std::find(excluded.begin(), excluded.end(), pattern) != excluded.end()) {
                ++lists.excluded_;
                continue;
            }
            auto re = compile(pattern, "robot list " + name);
            lists.patterns_.push_back(Pattern{std::move(pattern), name, std::move(re)});
        }
    }
    return lists;
}

RobotLists RobotLists::defaults() {
    return build({{"counter", std::string(defaults::robots_counter())},
                  {"matomo", std::string(defaults::robots_matomo())}},
                 defaults::robot_exclusions());
}

std::optional<std::string> RobotLists::match(std::string_view ua) const {
    for (const auto& p : patterns_) {
        if (std::regex_search(ua.begin(), ua.end(), p.re)) return p.text;
    }
    return std::nullopt;
}

void RobotLists::add(std::string pattern, std::string source) {
    auto re = compile(pattern, "robot list " + source);
    patterns_.push_back(Pattern{std::move(pattern), std::move(source), std::move(re)});
}

ManualLabels parse_manual_labels(std::string_view text_in) {
    ManualLabels out;
    std::istringstream in{std::string(text_in)};
    for (const auto& line : text::read_config_lines(in)) {
        const auto tab = line.rfind('\t');
        if (tab == std::string::npos) throw FormatError("manual label line '" + line + "': expected 'ua<TAB>robot|human'");
        const std::string verdict = text::to_lower(text::trim(std::string_view(line).substr(tab + 1)));
        ManualVerdict v;
        if (verdict == "robot") {
            v = ManualVerdict::Robot;
        } else if (verdict == "human") {
            v = ManualVerdict::Human;
        } else {
            throw FormatError("manual label line '" + line + "': verdict must be robot or human");
        }
        out.insert_or_assign(line.substr(0, tab), v);
    }
    return out;
}

std::string_view to_string(Verdict v) {
    switch (v) {
        case Verdict::Robot: return "robot";
        case Verdict::Human: return "human";
        case Verdict::Unlabeled: return "unlabeled";
    }
    return "unlabeled";
}

std::string_view to_string(LabelStage s) {
    switch (s) {
        case LabelStage::UAClassifier: return "ua-classifier";
        case LabelStage::RobotList: return "robot-list";
        case LabelStage::ManualList: return "manual-list";
        case LabelStage::LoggedInUser: return "logged-in-user";
        case LabelStage::None: return "none";
    }
    return "none";
}

Verdict parse_verdict(std::string_view s) {
    if (s == "robot") return Verdict::Robot;
    if (s == "human") return Verdict::Human;
    if (s == "unlabeled") return Verdict::Unlabeled;
    throw FormatError("unknown label '" + std::string(s) + "'");
}

LabelStage parse_label_stage(std::string_view s) {
    for (auto st : {LabelStage::UAClassifier, LabelStage::RobotList, LabelStage::ManualList, LabelStage::LoggedInUser,
                    LabelStage::None}) {
        if (to_string(st) == s) return st;
    }
    throw FormatError("unknown label stage '" + std::string(s) + "'");
}

SessionLabel label_user_agent(std::string_view ua, bool logged_in, const UAPatternDB& db, const RobotLists& lists,
                              const ManualLabels& manual, bool* conflict) {
    if (conflict) *conflict = false;
    const UAClass cls = db.classify(ua);

    std::optional<SessionLabel> robot;
    if (cls == UAClass::Crawler) {
        robot = SessionLabel{Verdict::Robot, LabelStage::UAClassifier, std::string(to_string(cls))};
    } else if (auto hit = lists.match(ua)) {
        robot = SessionLabel{Verdict::Robot, LabelStage::RobotList, std::move(*hit)};
    } else if (cls == UAClass::Unknown) {
        const auto it = manual.find(std::string(ua));
        if (it != manual.end() && it->second == ManualVerdict::Robot) {
            robot = SessionLabel{Verdict::Robot, LabelStage::ManualList, "manual:" + std::string(ua)};
        }
    }

    if (robot) {
        if (conflict) *conflict = logged_in;
        return *robot;
    }
    if (logged_in) return SessionLabel{Verdict::Human, LabelStage::LoggedInUser, std::string(to_string(cls))};
    return SessionLabel{Verdict::Unlabeled, LabelStage::None, std::string(to_string(cls))};
}

bool has_login_evidence(const Session& session) {
    for (const auto& r : session.requests) {
        if (r.entry.username && !r.entry.username->empty()) return true;
    }
    return false;
}

std::vector<SessionLabel> label_sessions(std::span<const Session> sessions, const UAPatternDB& db,
                                         const RobotLists& lists, const ManualLabels& manual,
                                         const std::vector<bool>& logged_in, LabelReport* report) {
    if (logged_in.size() != sessions.size()) throw LengthMismatch("one login flag per session is required");
    LabelReport rep;
    std::vector<SessionLabel> out;
    out.reserve(sessions.size());
    // A label depends only on (ua, logged_in).
    std::unordered_map<std::string, std::pair<SessionLabel, SessionLabel>> cache;
    for (std::size_t i = 0; i < sessions.size(); ++i) {
        const auto& ua = sessions[i].key.user_agent;
        auto it = cache.find(ua);
        if (it == cache.end()) {
            it = cache.emplace(ua, std::pair{label_user_agent(ua, false, db, lists, manual),
                                             label_user_agent(ua, true, db, lists, manual)})
                     .first;
        }
        const SessionLabel& label = logged_in[i] ? it->second.second : it->second.first;
        switch (label.verdict) {
            case Verdict::Robot:
                ++rep.robot;
                if (logged_in[i]) ++rep.conflicts;
                break;
            case Verdict::Human: ++rep.human; break;
            case Verdict::Unlabeled: ++rep.unlabeled; break;
        }
        if (label.stage == LabelStage::UAClassifier) ++rep.by_ua_classifier;
        if (label.stage == LabelStage::RobotList) ++rep.by_robot_list;
        if (label.stage == LabelStage::ManualList) ++rep.by_manual_list;
        out.push_back(label);
    }
    if (report) *report = rep;
    return out;
}

std::vector<SessionLabel> label_sessions(std::span<const Session> sessions, const UAPatternDB& db,
                                         const RobotLists& lists, const ManualLabels& manual, LabelReport* report) {
    std::vector<bool> logged;
    logged.reserve(sessions.size());
    for (const auto& s : sessions) logged.push_back(has_login_evidence(s));
    return label_sessions(sessions, db, lists, manual, logged, report);
}

}  // namespace botdetect
