#pragma once

#include <string_view>

/// Data files shipped under data/, compiled into the library so every stage
/// has a working default without extra paths.
namespace botdetect::defaults {

std::string_view resource_rules();
std::string_view ua_patterns();
std::string_view robots_counter();
std::string_view robots_matomo();
std::string_view robot_exclusions();
std::string_view stopwords();

}  // namespace botdetect::defaults
