#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <regex>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "botdetect/sessionize.hpp"

namespace botdetect {

enum class UAClass {
    CloudClient,
    Console,
    OfflineBrowser,
    LinkChecker,
    Crawler,
    FeedFetcher,
    Library,
    MobileBrowser,
    Validator,
    Browser,
    Unknown,
    Other,
};

std::string_view to_string(UAClass c);
UAClass parse_ua_class(std::string_view name);

/// Ordered (class, regex) list standing in for an online user-agent
/// classification service. Matching is case-insensitive; first match wins.
class UAPatternDB {
public:
    /// One `class<TAB>regex` per line, `#` comments. Throws InvalidRegex.
    static UAPatternDB parse(std::string_view text);
    static UAPatternDB load(const std::filesystem::path& path);
    static UAPatternDB defaults();

    /// Empty or unmatched strings are Unknown.
    UAClass classify(std::string_view ua) const;
    std::size_t size() const noexcept { return patterns_.size(); }

private:
    struct Entry {
        UAClass cls;
        std::string text;
        std::regex re;
    };
    std::vector<Entry> patterns_;
};

inline UAClass classify_user_agent(std::string_view ua, const UAPatternDB& db) { return db.classify(ua); }

/// Known-robot regex lists, searched in order. Patterns listed in the
/// exclusion set are dropped at load time (exact text match).
class RobotLists {
public:
    struct Pattern {
        std::string text;
        std::string source;  // list name
        std::regex re;
    };

    /// Each list: one regex per line, `#` comments. Throws InvalidRegex.
    static RobotLists build(const std::vector<std::pair<std::string, std::string>>& named_lists,
                            std::string_view exclusions_text);
    static RobotLists defaults();

    /// The first matching pattern's text.
    std::optional<std::string> match(std::string_view ua) const;

    const std::vector<Pattern>& patterns() const noexcept { return patterns_; }
    std::size_t excluded() const noexcept { return excluded_; }

    /// Appends one pattern to the end of the search order.
    void add(std::string pattern, std::string source = "extra");

private:
    std::vector<Pattern> patterns_;
    std::size_t excluded_ = 0;
};

inline std::optional<std::string> match_robot_lists(std::string_view ua, const RobotLists& lists) {
    return lists.match(ua);
}

enum class ManualVerdict { Robot, Human };

/// `ua<TAB>robot|human` per line.
using ManualLabels = std::unordered_map<std::string, ManualVerdict>;
ManualLabels parse_manual_labels(std::string_view text);

enum class Verdict { Robot, Human, Unlabeled };
enum class LabelStage { UAClassifier, RobotList, ManualList, LoggedInUser, None };

std::string_view to_string(Verdict v);
std::string_view to_string(LabelStage s);
Verdict parse_verdict(std::string_view s);
LabelStage parse_label_stage(std::string_view s);

struct SessionLabel {
    Verdict verdict = Verdict::Unlabeled;
    LabelStage stage = LabelStage::None;
    std::string evidence;  // matched pattern or UA class name

    bool operator==(const SessionLabel&) const = default;
};

/// The three robot stages in order (UA class Crawler, robot-list match,
/// manual verdict for Unknown user-agents), then login evidence for humans.
/// Robot evidence wins over login evidence; `conflict` reports when both
/// were present.
SessionLabel label_user_agent(std::string_view ua, bool logged_in, const UAPatternDB& db, const RobotLists& lists,
                              const ManualLabels& manual, bool* conflict = nullptr);

struct LabelReport {
    std::size_t robot = 0;
    std::size_t human = 0;
    std::size_t unlabeled = 0;
    std::size_t conflicts = 0;
    std::size_t by_ua_classifier = 0;
    std::size_t by_robot_list = 0;
    std::size_t by_manual_list = 0;
};

/// True when any request of the session carries a username.
bool has_login_evidence(const Session& session);

/// logged_in[i] is the application-log evidence for sessions[i].
std::vector<SessionLabel> label_sessions(std::span<const Session> sessions, const UAPatternDB& db,
                                         const RobotLists& lists, const ManualLabels& manual,
                                         const std::vector<bool>& logged_in, LabelReport* report = nullptr);

std::vector<SessionLabel> label_sessions(std::span<const Session> sessions, const UAPatternDB& db,
                                         const RobotLists& lists, const ManualLabels& manual,
                                         LabelReport* report = nullptr);

}  // namespace botdetect
