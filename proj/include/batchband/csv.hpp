#pragma once

#include <charconv>
#include <string>
#include <string_view>
#include <vector>

namespace batchband {

// Shortest round-trip representation; identical bytes for identical values.
inline std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline std::vector<std::string> split(std::string_view line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.emplace_back(line.substr(start));
      break;
    }
    out.emplace_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

// Strict numeric parsing: the whole field must be consumed.
bool parse_double(std::string_view field, double& out);
bool parse_size(std::string_view field, std::size_t& out);

}  // namespace batchband
