#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <string>
#include <vector>

#include "botdetect/ingest.hpp"
#include "botdetect/log_entry.hpp"
#include "botdetect/sessionize.hpp"
#include "botdetect/topic_model.hpp"

namespace testsupport {

/// Small deterministic generator for property tests.
class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}

    std::uint64_t raw() { return rng_(); }
    double real(double lo, double hi) { return lo + (hi - lo) * botdetect::uniform01(rng_); }
    std::size_t below(std::size_t n) { return static_cast<std::size_t>(raw() % n); }
    std::int64_t between(std::int64_t lo, std::int64_t hi) {
        return lo + static_cast<std::int64_t>(raw() % static_cast<std::uint64_t>(hi - lo + 1));
    }
    bool coin(double p = 0.5) { return real(0.0, 1.0) < p; }
    template <typename T>
    const T& pick(const std::vector<T>& v) {
        return v[below(v.size())];
    }

private:
    std::mt19937_64 rng_;
};

inline botdetect::ClassifiedEntry entry(std::string ip, std::string ua, std::int64_t t, std::string path = "/doi/abs/a",
                                        int status = 200, std::string method = "GET") {
    botdetect::ClassifiedEntry c;
    c.entry.ip = std::move(ip);
    c.entry.user_agent = std::move(ua);
    c.entry.timestamp = botdetect::Timestamp{t, 0};
    c.entry.method = std::move(method);
    c.entry.path = path;
    c.entry.protocol = "HTTP/1.1";
    c.entry.status = status;
    c.resource = botdetect::classify_resource(path, botdetect::ResourceRuleSet::defaults());
    return c;
}

/// Fresh, empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / ("botdetect-test-" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace testsupport
