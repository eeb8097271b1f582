#pragma once

#include <string>
#include <vector>

#include "botdetect/labeling.hpp"

namespace labelcases {

using namespace botdetect;

inline const char* const kChrome =
    "Mozilla/5.0 (Windows NT 10.0; Win64; x64) AppleWebKit/537.36 (KHTML, like Gecko) Chrome/55.0.2883.87 Safari/537.36";
inline const char* const kFirefox = "Mozilla/5.0 (X11; Linux x86_64; rv:115.0) Gecko/20100101 Firefox/115.0";
inline const char* const kIphone =
    "Mozilla/5.0 (iPhone; CPU iPhone OS 17_0 like Mac OS X) AppleWebKit/605.1.15 (KHTML, like Gecko) Mobile/15E148";
inline const char* const kGooglebot = "Googlebot/2.1 (+http://www.google.com/bot.html)";

struct Case {
    std::string ua;
    bool logged_in;
    Verdict verdict;
    LabelStage stage;
    std::string evidence;
};

inline ManualLabels manual() {
    return {{"FooAgent/1.0", ManualVerdict::Robot}, {"BarAgent/2.0", ManualVerdict::Human}, {kChrome, ManualVerdict::Robot}};
}

/// Expected labels under the shipped database and lists with manual().
inline const std::vector<Case>& cases() {
    static const std::vector<Case> table = {
        {kGooglebot, false, Verdict::Robot, LabelStage::UAClassifier, "crawler"},
        {kGooglebot, true, Verdict::Robot, LabelStage::UAClassifier, "crawler"},
        {"Mozilla/5.0 (compatible; bingbot/2.0; +http://www.bing.com/bingbot.htm)", false, Verdict::Robot,
         LabelStage::UAClassifier, "crawler"},
        {"Mozilla/5.0 (compatible; MJ12bot/v1.4.8; http://mj12bot.com/)", false, Verdict::Robot,
         LabelStage::UAClassifier, "crawler"},
        {"Mozilla/5.0 (compatible; YandexBot/3.0)", true, Verdict::Robot, LabelStage::UAClassifier, "crawler"},
        {"Scrapy/2.11 (+https://scrapy.org)", false, Verdict::Robot, LabelStage::RobotList, "scrapy"},
        {"curl/7.5", false, Verdict::Robot, LabelStage::RobotList, "^curl"},
        {"curl/7.5", true, Verdict::Robot, LabelStage::RobotList, "^curl"},
        {"Wget/1.21", false, Verdict::Robot, LabelStage::RobotList, "^wget"},
        {"python-requests/2.31", false, Verdict::Robot, LabelStage::RobotList, "python"},
        {"Java/1.8.0_151", false, Verdict::Robot, LabelStage::RobotList, "^java"},
        {"Apache-HttpClient/4.5", false, Verdict::Robot, LabelStage::RobotList, "httpclient"},
        {"libwww-perl/6.0", false, Verdict::Robot, LabelStage::RobotList, "libwww"},
        {"Go-http-client/1.1", false, Verdict::Robot, LabelStage::RobotList, "go-http-client"},
        {"HTTrack 3.0", false, Verdict::Robot, LabelStage::RobotList, "httrack"},
        {"Feedly/1.0", false, Verdict::Robot, LabelStage::RobotList, "feed"},
        {"W3C_Validator/1.3", false, Verdict::Robot, LabelStage::RobotList, "validator"},
        {"Xenu Link Sleuth/1.3.8", false, Verdict::Unlabeled, LabelStage::None, "link-checker"},
        {"Mozilla/5.0 (X11; Linux x86_64) HeadlessChrome/120.0", false, Verdict::Robot, LabelStage::RobotList,
         "headlesschrome"},
        {"Zotero/5.0", true, Verdict::Robot, LabelStage::RobotList, "zotero"},
        {"Mendeley Desktop/1.19", false, Verdict::Robot, LabelStage::RobotList, "mendeley"},
        {kChrome, false, Verdict::Unlabeled, LabelStage::None, "browser"},
        {kChrome, true, Verdict::Human, LabelStage::LoggedInUser, "browser"},
        {kFirefox, false, Verdict::Unlabeled, LabelStage::None, "browser"},
        {kFirefox, true, Verdict::Human, LabelStage::LoggedInUser, "browser"},
        {kIphone, false, Verdict::Unlabeled, LabelStage::None, "mobile-browser"},
        {kIphone, true, Verdict::Human, LabelStage::LoggedInUser, "mobile-browser"},
        {"", false, Verdict::Unlabeled, LabelStage::None, "unknown"},
        {"", true, Verdict::Human, LabelStage::LoggedInUser, "unknown"},
        {"Mozilla/4.0", false, Verdict::Unlabeled, LabelStage::None, "other"},
        {"Mozilla/4.0", true, Verdict::Human, LabelStage::LoggedInUser, "other"},
        {"Mozilla/5.0", false, Verdict::Unlabeled, LabelStage::None, "other"},
        {"Mozilla", false, Verdict::Unlabeled, LabelStage::None, "other"},
        {"FooAgent/1.0", false, Verdict::Robot, LabelStage::ManualList, "manual:FooAgent/1.0"},
        {"FooAgent/1.0", true, Verdict::Robot, LabelStage::ManualList, "manual:FooAgent/1.0"},
        {"BarAgent/2.0", false, Verdict::Unlabeled, LabelStage::None, "unknown"},
        {"BarAgent/2.0", true, Verdict::Human, LabelStage::LoggedInUser, "unknown"},
        {"UnlistedAgent/9", false, Verdict::Unlabeled, LabelStage::None, "unknown"},
        {"UnlistedAgent/9", true, Verdict::Human, LabelStage::LoggedInUser, "unknown"},
        // Manual verdicts apply only to Unknown agents.
        {kChrome, false, Verdict::Unlabeled, LabelStage::None, "browser"},
        {"Lynx/2.8.9rel.1", false, Verdict::Unlabeled, LabelStage::None, "console"},
        {"Lynx/2.8.9rel.1", true, Verdict::Human, LabelStage::LoggedInUser, "console"},
        {"AppEngine-Google; (+http://code.google.com/appengine)", false, Verdict::Robot, LabelStage::RobotList,
         "appengine-google"},
        {"Mozilla/5.0 (compatible; SemrushBot/7~bl)", false, Verdict::Robot, LabelStage::UAClassifier, "crawler"},
        {"Mozilla/5.0 (compatible; archive.org_bot +http://archive.org/details/archive.org_bot)", false,
         Verdict::Robot, LabelStage::UAClassifier, "crawler"},
        {"okhttp/4.9", false, Verdict::Robot, LabelStage::RobotList, "okhttp"},
        {"node-fetch/1.0", false, Verdict::Robot, LabelStage::RobotList, "fetch"},
        {"Ruby", false, Verdict::Robot, LabelStage::RobotList, "ruby"},
        {"PHP/8.1", false, Verdict::Robot, LabelStage::RobotList, "^php/"},
        {"aiohttp/3.9", false, Verdict::Robot, LabelStage::RobotList, "aiohttp"},
    };
    return table;
}

}  // namespace labelcases
