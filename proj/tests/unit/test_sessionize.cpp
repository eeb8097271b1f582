#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "botdetect/errors.hpp"
#include "botdetect/sessionize.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace botdetect;
using testsupport::entry;

using namespace oracles;

TEST_CASE("worked example: gaps 10 s, 29 min, 31 min, 5 s") {
    const auto s = sessionize(one_key({0, 10, 10 + 29 * 60, 10 + 29 * 60 + 31 * 60, 10 + 29 * 60 + 31 * 60 + 5}));
    REQUIRE(s.size() == 1);
    CHECK(s[0].size() == 3);
    CHECK(s[0].start() == 0);
}

TEST_CASE("single request yields no session") { CHECK(sessionize(one_key({5})).empty()); }

TEST_CASE("a gap of exactly the timeout stays in the session") {
    const auto s = sessionize(one_key({0, 10, 1810}));
    REQUIRE(s.size() == 1);
    CHECK(s[0].size() == 3);
    CHECK(sessionize(one_key({0, 10, 1811})).empty());
}

TEST_CASE("input order is irrelevant except for equal timestamps") {
    std::vector<ClassifiedEntry> in = {entry("1.1.1.1", "x", 30, "/doi/abs/c"), entry("1.1.1.1", "x", 10, "/doi/abs/a"),
                                       entry("1.1.1.1", "x", 20, "/doi/abs/b"), entry("1.1.1.1", "x", 20, "/doi/abs/b2")};
    const auto s = sessionize(in);
    REQUIRE(s.size() == 1);
    std::vector<std::string> paths;
    for (const auto& r : s[0].requests) paths.push_back(r.entry.path);
    CHECK(paths == std::vector<std::string>{"/doi/abs/a", "/doi/abs/b", "/doi/abs/b2", "/doi/abs/c"});
    CHECK(s[0].ordinals == std::vector<std::size_t>{1, 2, 3, 0});
}

TEST_CASE("an absent user-agent keys as the empty string") {
    auto a = entry("1.1.1.1", "", 0), b = entry("1.1.1.1", "", 1), c = entry("1.1.1.1", "", 2);
    b.entry.user_agent.reset();
    const auto s = sessionize(std::vector{a, b, c});
    REQUIRE(s.size() == 1);
    CHECK(s[0].key.user_agent.empty());
}

TEST_CASE("sessionize matches a brute-force splitter on random streams") {
    testsupport::Gen g(42);
    for (int round = 0; round < 500; ++round) {
        const auto in = random_stream(g);
        const std::size_t min_req = 1 + g.below(4);
        const auto got = sessionize(in, SessionizeParams{1800, min_req});
        const auto want = brute_sessions(in, 1800, min_req);
        REQUIRE(got.size() == want.size());
        for (std::size_t i = 0; i < got.size(); ++i) CHECK(got[i].ordinals == want[i]);
    }
}

TEST_CASE("session invariants hold on random streams") {
    testsupport::Gen g(9);
    for (int round = 0; round < 200; ++round) {
        const auto in = random_stream(g);
        const auto sessions = sessionize(in, SessionizeParams{1800, 1});
        std::multiset<std::size_t> seen;
        std::map<UserKey, std::int64_t> last_end;
        for (const auto& s : sessions) {
            for (std::size_t i = 1; i < s.size(); ++i) {
                const auto gap = s.requests[i].entry.timestamp.utc_seconds - s.requests[i - 1].entry.timestamp.utc_seconds;
                CHECK(gap >= 0);
                CHECK(gap <= 1800);
            }
            // Consecutive sessions of a key could not be merged.
            if (auto it = last_end.find(s.key); it != last_end.end()) CHECK(s.start() - it->second > 1800);
            last_end[s.key] = s.end();
            CHECK(s.id == session_id(s.key, s.start()));
            seen.insert(s.ordinals.begin(), s.ordinals.end());
        }
        // With min_requests 1 every entry lands in exactly one session.
        CHECK(seen.size() == in.size());
        CHECK(std::set<std::size_t>(seen.begin(), seen.end()).size() == in.size());
        CHECK(sessionize(in, SessionizeParams{1800, 1}).size() == sessions.size());
    }
}

TEST_CASE("session ids are deterministic and key-sensitive") {
    const UserKey k{"1.2.3.4", "ua"};
    CHECK(session_id(k, 100) == session_id(k, 100));
    CHECK(session_id(k, 100) != session_id(k, 101));
    CHECK(session_id(k, 100) != session_id(UserKey{"1.2.3.4", "ub"}, 100));
    CHECK(session_id(k, 100).size() == 16);
}

TEST_CASE("session_stats") {
    std::vector<ClassifiedEntry> in;
    for (int i = 0; i < 3; ++i) in.push_back(entry("1.1.1.1", "a", i * 10, "/doi/abs/a"));
    for (int i = 0; i < 4; ++i) in.push_back(entry("2.2.2.2", "a", i * 10, "/doi/abs/b"));
    for (int i = 0; i < 5; ++i) in.push_back(entry("3.3.3.3", "a", 0, i % 2 ? "/doi/abs/b" : "/doi/pdf/c"));
    const auto sessions = sessionize(in);
    const auto st = session_stats(sessions);
    CHECK(st.sessions == 3);
    CHECK(st.mean_requests == doctest::Approx(4.0));
    CHECK(st.median_requests == doctest::Approx(4.0));
    CHECK(st.unique_articles == 3);
    CHECK(st.mean_duration == doctest::Approx((20.0 + 30.0 + 0.0) / 3));
    CHECK(st.median_duration == doctest::Approx(20.0));
    CHECK(st.mean_gap == doctest::Approx(50.0 / 9));
    CHECK_THROWS_AS(session_stats({}), EmptyInput);

    const auto single = sessionize(one_key({7, 7, 7}));
    CHECK(session_stats(single).mean_duration == 0.0);

    // Even count: median is the mean of the central pair.
    const auto two = sessionize(std::vector{entry("1", "a", 0), entry("1", "a", 1), entry("1", "a", 2),
                                            entry("2", "a", 0), entry("2", "a", 1), entry("2", "a", 2),
                                            entry("2", "a", 3)});
    CHECK(session_stats(two).median_requests == doctest::Approx(3.5));
}

TEST_CASE("sessions file round-trips against its entries") {
    testsupport::Gen g(5);
    const auto in = random_stream(g);
    const SessionizeParams p{1800, 2};
    const auto sessions = sessionize(in, p);
    std::ostringstream out;
    write_sessions(out, sessions, p);
    std::istringstream back(out.str());
    const auto again = read_sessions(back, in);
    REQUIRE(again.size() == sessions.size());
    for (std::size_t i = 0; i < again.size(); ++i) {
        CHECK(again[i].id == sessions[i].id);
        CHECK(again[i].key == sessions[i].key);
        CHECK(again[i].requests == sessions[i].requests);
        CHECK(again[i].ordinals == sessions[i].ordinals);
    }
}
