#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace qaeval {

inline constexpr std::string_view kToolVersion = "1.0.0";

// FNV-1a 64-bit, used for the config/input content hash in report headers.
std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed = 0xcbf29ce484222325ull);

// Hash over (name, content) pairs; order-sensitive, rendered as 16 hex chars.
std::string content_hash(const std::vector<std::pair<std::string, std::string>>& parts);

}  // namespace qaeval
