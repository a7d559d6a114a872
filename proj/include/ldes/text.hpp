#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace ldes::text {

// Shortest decimal form that parses back to the same double.
std::string num(double v);

// Strict parses; throw ParseError mentioning `what` on failure.
double to_double(std::string_view s, std::string_view what);
long to_long(std::string_view s, std::string_view what);
std::uint64_t to_u64(std::string_view s, std::string_view what);
bool to_bool(std::string_view s, std::string_view what);

std::string_view trim(std::string_view s);
std::vector<std::string_view> split(std::string_view s, char sep);

// Writes `content` to `path` atomically enough for our purposes (write then rename).
void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

}  // namespace ldes::text
