#include "botdetect/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <random>

#include "botdetect/errors.hpp"
#include "botdetect/log_entry.hpp"
#include "botdetect/sessionize.hpp"
#include "botdetect/text.hpp"
#include "botdetect/topic_model.hpp"

namespace botdetect {

namespace {

constexpr std::string_view kTruthHeader = "# botdetect-truth v1";
constexpr std::int64_t kTimeout = 1800;
constexpr int kOffsetMinutes = 120;

class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    double uniform() { return uniform01(gen_); }
    std::size_t index(std::size_t n) {
        return std::min(n - 1, static_cast<std::size_t>(uniform() * static_cast<double>(n)));
    }
    bool chance(double p) { return uniform() < p; }
    double normal() {
        // Box-Muller on two draws; 1 - u keeps the log argument positive.
        const double u1 = 1.0 - uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }
    std::size_t geometric(double mean) {
        if (mean <= 0.0) return 0;
        const double p = 1.0 / (1.0 + mean);
        return static_cast<std::size_t>(std::floor(std::log(1.0 - uniform()) / std::log(1.0 - p)));
    }
    template <typename T, std::size_t N>
    std::size_t weighted(const std::array<T, N>& w) {
        double total = 0.0;
        for (auto x : w) total += x;
        double u = uniform() * total;
        for (std::size_t i = 0; i < N; ++i) {
            if (u < w[i]) return i;
            u -= w[i];
        }
        return N - 1;
    }

private:
    std::mt19937_64 gen_;
};

std::string pseudo_word(std::size_t i) {
    static constexpr std::string_view kConsonants = "bcdfghjklmnprstvz";
    static constexpr std::string_view kVowels = "aeiou";
    constexpr std::size_t kSyllables = 17 * 5;
    std::string w;
    for (int s = 0; s < 3; ++s) {
        const std::size_t syl = i % kSyllables;
        i /= kSyllables;
        w += kConsonants[syl / 5];
        w += kVowels[syl % 5];
    }
    return w;
}

std::string article_id(std::size_t d) {
    std::string n = std::to_string(d);
    return "10.5555/syn." + std::string(n.size() < 6 ? 6 - n.size() : 0, '0') + n;
}

constexpr std::array<std::string_view, 5> kFormatPrefix = {"/doi/abs/", "/doi/full/", "/doi/pdf/", "/doi/ref/",
                                                           "/doi/suppl/"};
constexpr std::array<double, 5> kHumanFormats = {0.40, 0.25, 0.25, 0.05, 0.05};
constexpr std::array<double, 5> kBotFormats = {0.35, 0.25, 0.30, 0.05, 0.05};
constexpr std::size_t kPdf = 2;

constexpr std::array<std::string_view, 8> kCountries = {"DE", "US", "GB", "FR", "NL", "JP", "BR", "IN"};

std::string human_agent(Rng& rng) {
    const auto v = std::to_string(28 + rng.index(8));
    const auto b = std::to_string(1500 + rng.index(300));
    switch (rng.index(6)) {
        case 0:
            return "Mozilla/5.0 (Windows NT 6.1; WOW64) AppleWebKit/537.36 (KHTML, like Gecko) Chrome/" + v + ".0." + b +
                   ".63 Safari/537.36";
        case 1: return "Mozilla/5.0 (Windows NT 6.1; WOW64; rv:" + v + ".0) Gecko/20100101 Firefox/" + v + ".0";
        case 2:
            return "Mozilla/5.0 (Macintosh; Intel Mac OS X 10_9_" + std::to_string(rng.index(5)) +
                   ") AppleWebKit/537.73.11 (KHTML, like Gecko) Version/7.0.1 Safari/537.73.11";
        case 3: return "Mozilla/5.0 (X11; Linux x86_64; rv:" + v + ".0) Gecko/20100101 Firefox/" + v + ".0";
        case 4: return "Mozilla/5.0 (Windows NT 6.3; Trident/7.0; rv:11.0) like Gecko";
        default:
            return "Mozilla/5.0 (iPhone; CPU iPhone OS 7_0_" + std::to_string(rng.index(6)) +
                   " like Mac OS X) AppleWebKit/537.51.1 (KHTML, like Gecko) Version/7.0 Mobile/11B554a Safari/9537.53";
    }
}

std::string bot_agent(Rng& rng) {
    const auto minor = std::to_string(rng.index(20));
    switch (rng.index(12)) {
        case 0: return "Mozilla/5.0 (compatible; Googlebot/2.1; +http://www.google.com/bot.html)";
        case 1: return "Mozilla/5.0 (compatible; bingbot/2.0; +http://www.bing.com/bingbot.htm)";
        case 2: return "Mozilla/5.0 (compatible; YandexBot/3.0; +http://yandex.com/bots)";
        case 3: return "python-requests/2." + minor + ".0";
        case 4: return "curl/7." + std::to_string(20 + rng.index(20)) + ".0";
        case 5: return "Wget/1." + minor;
        case 6: return "Java/1.7.0_" + minor;
        case 7: return "Scrapy/0." + minor + " (+http://scrapy.org)";
        case 8: return "Apache-HttpClient/4.3." + minor + " (java 1.5)";
        case 9: return "libwww-perl/6." + minor;
        case 10: return "Go-http-client/1.1";
        default: return "Mozilla/5.0 (compatible; MJ12bot/v1.4." + minor + "; http://mj12bot.com/)";
    }
}

struct Emitted {
    std::int64_t utc = 0;
    std::size_t seq = 0;
    std::string line;
};

struct User {
    bool robot = false;
    std::string ip;
    std::string ua;
    std::string country;
    std::optional<std::string> username;
    std::size_t cluster = 0;    // humans: interest
    bool human_timing = false;  // robots only
    double base_gap = 0.0;      // robots only
};

class Generator {
public:
    explicit Generator(const SynthConfig& cfg) : cfg_(cfg), rng_(cfg.seed) {}

    SynthOutput run() {
        SynthOutput out;
        build_corpus(out);
        const std::int64_t t0 = utc_from_civil(2014, 1, 1, 0, 0, 0);
        const std::int64_t span = static_cast<std::int64_t>(cfg_.days) * 86400;

        std::vector<User> users;
        std::vector<std::size_t> sessions_left;
        for (int pass = 0; pass < 2; ++pass) {
            const bool robot = pass == 1;
            std::size_t remaining = robot ? cfg_.n_bot_sessions : cfg_.n_human_sessions;
            while (remaining > 0) {
                std::size_t count = 1;
                if (remaining > 1 && rng_.chance(cfg_.return_visit_prob)) count = 2;
                users.push_back(make_user(robot, users.size()));
                sessions_left.push_back(count);
                remaining -= count;
            }
        }

        for (std::size_t u = 0; u < users.size(); ++u) {
            // Leave room at the end of the window for a session or two.
            std::int64_t start = t0 + static_cast<std::int64_t>(rng_.uniform() * static_cast<double>(span - 86400));
            for (std::size_t s = 0; s < sessions_left[u]; ++s) {
                const std::int64_t end = emit_session(users[u], start, out.truth);
                start = end + kTimeout + 600 + static_cast<std::int64_t>(rng_.index(4 * 3600));
            }
        }

        std::stable_sort(lines_.begin(), lines_.end(), [](const Emitted& a, const Emitted& b) {
            return a.utc != b.utc ? a.utc < b.utc : a.seq < b.seq;
        });
        for (const auto& e : lines_) {
            out.log += e.line;
            out.log += '\n';
        }
        std::stable_sort(out.truth.begin(), out.truth.end(),
                         [](const TruthRow& a, const TruthRow& b) { return a.start < b.start; });
        return out;
    }

private:
    void build_corpus(SynthOutput& out) {
        const std::size_t shared = std::max<std::size_t>(1, cfg_.vocab_size / 10);
        const std::size_t per_cluster = (cfg_.vocab_size - shared) / cfg_.n_clusters;
        const std::size_t per_sub = per_cluster / cfg_.subtopics_per_cluster;
        for (std::size_t d = 0; d < cfg_.n_docs; ++d) {
            const std::size_t c = d % cfg_.n_clusters;
            const std::size_t sub = (d / cfg_.n_clusters) % cfg_.subtopics_per_cluster;
            const std::size_t cluster_base = shared + c * per_cluster;
            const std::size_t sub_base = cluster_base + sub * per_sub;
            const std::size_t len =
                cfg_.doc_length_min + rng_.index(cfg_.doc_length_max - cfg_.doc_length_min + 1);
            std::string body;
            for (std::size_t t = 0; t < len; ++t) {
                std::size_t w;
                if (rng_.chance(cfg_.shared_word_rate)) {
                    w = rng_.index(shared);
                } else if (rng_.chance(0.75)) {
                    w = sub_base + rng_.index(per_sub);
                } else {
                    w = cluster_base + rng_.index(per_cluster);
                }
                if (!body.empty()) body += ' ';
                body += pseudo_word(w);
            }
            out.corpus.push_back(RawDocument{article_id(d), std::move(body)});
            cluster_docs_.resize(cfg_.n_clusters);
            cluster_docs_[c].push_back(d);
        }
    }

    User make_user(bool robot, std::size_t n) {
        User u;
        u.robot = robot;
        const std::size_t i = n + 1;
        u.ip = std::string(robot ? "172.16." : "10.1.") + std::to_string((i >> 8) & 255) + "." + std::to_string(i & 255);
        if (robot) {
            u.ua = cfg_.mask_bots ? human_agent(rng_) : bot_agent(rng_);
            u.country = std::string(kCountries[rng_.index(2)]);
            u.human_timing = rng_.chance(cfg_.bot_human_timing_fraction);
            u.base_gap = cfg_.bot_gap_min + rng_.uniform() * (cfg_.bot_gap_max - cfg_.bot_gap_min);
        } else {
            u.ua = human_agent(rng_);
            u.country = std::string(kCountries[rng_.index(kCountries.size())]);
            if (rng_.chance(cfg_.logged_in_fraction)) u.username = "reader" + std::to_string(i);
            u.cluster = rng_.index(cfg_.n_clusters);
        }
        return u;
    }

    std::size_t any_article() { return rng_.index(cfg_.n_docs); }
    std::size_t article_in(std::size_t cluster) {
        const auto& docs = cluster_docs_[cluster];
        return docs[rng_.index(docs.size())];
    }

    std::int64_t human_gap() {
        const double g = cfg_.human_gap_median * std::exp(cfg_.human_gap_sigma * rng_.normal());
        return std::clamp<std::int64_t>(std::llround(g), 1, cfg_.human_gap_max);
    }

    std::int64_t gap_for(const User& u) {
        if (!u.robot || u.human_timing) return human_gap();
        const double g = u.base_gap * (1.0 + cfg_.bot_gap_jitter * (2.0 * rng_.uniform() - 1.0));
        return std::max<std::int64_t>(1, std::llround(g));
    }

    int status_for(const User& u) {
        if (u.robot) {
            static constexpr std::array<double, 4> w = {0.90, 0.05, 0.03, 0.02};
            static constexpr std::array<int, 4> s = {200, 404, 301, 503};
            return s[rng_.weighted(w)];
        }
        static constexpr std::array<double, 3> w = {0.94, 0.04, 0.02};
        static constexpr std::array<int, 3> s = {200, 304, 404};
        return s[rng_.weighted(w)];
    }

    void emit(const User& u, std::int64_t utc, std::string path, std::string method, int status,
              std::optional<std::uint64_t> bytes, std::optional<std::string> referer) {
        LogEntry e;
        e.ip = u.ip;
        e.timestamp = Timestamp{utc, kOffsetMinutes};
        e.method = std::move(method);
        e.path = std::move(path);
        e.protocol = "HTTP/1.1";
        e.status = status;
        e.bytes = bytes;
        e.referer = std::move(referer);
        e.user_agent = u.ua;
        e.country = u.country;
        e.username = u.username;
        lines_.push_back(Emitted{utc, lines_.size(), render_line(e, LogDialect::CombinedApp)});
    }

    void emit_noise(const User& u, std::int64_t from, std::int64_t to) {
        if (to - from < 2) return;
        const std::int64_t t = from + 1 + static_cast<std::int64_t>(rng_.index(static_cast<std::size_t>(to - from - 1)));
        std::string path;
        switch (rng_.index(4)) {
            case 0: path = "/"; break;
            case 1: path = "/search?q=" + pseudo_word(rng_.index(cfg_.vocab_size)); break;
            case 2: path = "/action/showLogin"; break;
            default: path = "/static/css/site.css"; break;
        }
        emit(u, t, std::move(path), "GET", 200, 4000 + rng_.index(20000), std::nullopt);
    }

    std::int64_t emit_session(const User& u, std::int64_t start, std::vector<TruthRow>& truth) {
        const std::size_t n = std::min(cfg_.session_length_max, 3 + rng_.geometric(cfg_.session_length_mean - 3.0));
        const bool browses_formats = !u.robot || u.human_timing;
        std::size_t article = u.robot ? any_article() : article_in(u.cluster);
        std::size_t format = u.robot ? rng_.weighted(kBotFormats) : (rng_.chance(0.6) ? 0 : rng_.weighted(kHumanFormats));
        std::optional<std::string> referer;
        if (!u.robot && rng_.chance(0.5)) referer = "https://www.google.com/";
        std::int64_t t = start;
        for (std::size_t r = 0; r < n; ++r) {
            if (r > 0) {
                const std::int64_t next = t + gap_for(u);
                if (rng_.chance(cfg_.noise_rate)) emit_noise(u, t, next);
                t = next;
                if (browses_formats && rng_.chance(cfg_.same_article_prob)) {
                    format = rng_.weighted(u.robot ? kBotFormats : kHumanFormats);
                } else {
                    if (u.robot) {
                        article = rng_.chance(cfg_.bot_uniformity) ? any_article()
                                                                    : article_in(article % cfg_.n_clusters);
                    } else {
                        article = rng_.chance(cfg_.human_cluster_stickiness) ? article_in(u.cluster) : any_article();
                    }
                    format = rng_.weighted(u.robot ? kBotFormats : kHumanFormats);
                }
            }
            const std::string path = std::string(kFormatPrefix[format]) + article_id(article);
            const int status = status_for(u);
            std::optional<std::uint64_t> bytes;
            if (status == 304) {
                bytes = 0;
            } else if (format == kPdf) {
                bytes = 200000 + rng_.index(1800000);
            } else {
                bytes = 20000 + rng_.index(60000);
            }
            const std::string method = (u.robot && !u.human_timing && rng_.chance(0.05)) ? "HEAD" : "GET";
            emit(u, t, path, method, status, bytes, referer);
            if (!u.robot) referer = "https://pubs.example.org" + path;
        }
        truth.push_back(TruthRow{session_id(UserKey{u.ip, u.ua}, start), u.ip, u.ua, start, u.robot,
                                 u.username.has_value(), n});
        return t;
    }

    const SynthConfig& cfg_;
    Rng rng_;
    std::vector<std::vector<std::size_t>> cluster_docs_;
    std::vector<Emitted> lines_;
};

void require(bool ok, const std::string& what) {
    if (!ok) throw InvalidConfig("synth: " + what);
}

bool is_probability(double p) { return p >= 0.0 && p <= 1.0; }

}  // namespace

void SynthConfig::validate() const {
    require(n_docs >= 1, "n_docs must be at least 1");
    require(n_clusters >= 1, "n_clusters must be at least 1");
    require(n_docs >= n_clusters, "n_docs must be at least n_clusters");
    require(subtopics_per_cluster >= 1, "subtopics_per_cluster must be at least 1");
    require(n_human_sessions >= 1 || n_bot_sessions >= 1, "at least one session is required");
    require(doc_length_min >= 1 && doc_length_max >= doc_length_min, "document lengths must satisfy 1 <= min <= max");
    const std::size_t shared = std::max<std::size_t>(1, vocab_size / 10);
    require(vocab_size > shared && (vocab_size - shared) / n_clusters / subtopics_per_cluster >= 2,
            "vocab_size too small for the cluster layout");
    require(vocab_size <= 85 * 85 * 85, "vocab_size too large");
    for (auto [p, name] : {std::pair{shared_word_rate, "shared_word_rate"},
                           {human_cluster_stickiness, "human_cluster_stickiness"},
                           {bot_uniformity, "bot_uniformity"},
                           {same_article_prob, "same_article_prob"},
                           {logged_in_fraction, "logged_in_fraction"},
                           {bot_human_timing_fraction, "bot_human_timing_fraction"},
                           {return_visit_prob, "return_visit_prob"},
                           {noise_rate, "noise_rate"},
                           {bot_gap_jitter, "bot_gap_jitter"}}) {
        require(is_probability(p), std::string(name) + " must lie in [0, 1]");
    }
    require(session_length_mean >= 3.0, "session_length_mean must be at least 3");
    require(session_length_max >= 3, "session_length_max must be at least 3");
    require(human_gap_median > 0.0 && human_gap_sigma >= 0.0, "human gap parameters must be positive");
    require(human_gap_max >= 1 && human_gap_max < kTimeout, "human_gap_max must lie in [1, 1800)");
    require(bot_gap_min >= 1.0 && bot_gap_max >= bot_gap_min && bot_gap_max * (1.0 + bot_gap_jitter) < kTimeout,
            "robot gaps must satisfy 1 <= min <= max and stay below the session timeout");
    require(days >= 2, "days must be at least 2");
}

SynthOutput generate(const SynthConfig& cfg) {
    cfg.validate();
    return Generator(cfg).run();
}

void write_truth(std::ostream& out, const std::vector<TruthRow>& truth) {
    out << kTruthHeader << " count=" << truth.size() << '\n';
    for (const auto& t : truth) {
        out << t.session_id << '\t' << t.ip << '\t' << text::tsv_safe(t.user_agent) << '\t' << t.start << '\t'
            << (t.robot ? "robot" : "human") << '\t' << (t.logged_in ? 1 : 0) << '\t' << t.requests << '\n';
    }
}

std::vector<TruthRow> read_truth(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || !text::starts_with(line, kTruthHeader)) {
        throw FormatError("not a truth file (missing '" + std::string(kTruthHeader) + "' header)");
    }
    std::vector<TruthRow> out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto cols = text::split(line, '\t');
        if (cols.size() != 7) throw FormatError("truth file: expected 7 columns");
        const auto start = text::parse_int(cols[3]);
        const auto req = text::parse_uint(cols[6]);
        if (!start || !req || (cols[4] != "robot" && cols[4] != "human") || (cols[5] != "0" && cols[5] != "1")) {
            throw FormatError("truth file: bad row '" + line + "'");
        }
        out.push_back(TruthRow{std::string(cols[0]), std::string(cols[1]), std::string(cols[2]), *start,
                               cols[4] == "robot", cols[5] == "1", *req});
    }
    return out;
}

SynthFiles write_synth(const SynthOutput& out, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    SynthFiles files{dir / "corpus.tsv", dir / "access.log", dir / "truth.tsv"};
    auto open = [](const std::filesystem::path& p) {
        std::ofstream f(p, std::ios::binary);
        if (!f) throw Error("cannot write '" + p.string() + "'");
        return f;
    };
    {
        auto f = open(files.corpus);
        write_raw_corpus(f, out.corpus);
    }
    {
        auto f = open(files.log);
        f << out.log;
    }
    {
        auto f = open(files.truth);
        write_truth(f, out.truth);
    }
    return files;
}

}  // namespace botdetect
