#include "qaeval/version.hpp"

#include <cstdio>

namespace qaeval {

std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string content_hash(
    const std::vector<std::pair<std::string, std::string>>& parts) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (const auto& [name, content] : parts) {
    h = fnv1a64(name, h);
    h = fnv1a64("\x1f", h);  // separator so ("ab","c") != ("a","bc")
    h = fnv1a64(content, h);
    h = fnv1a64("\x1e", h);
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace qaeval
