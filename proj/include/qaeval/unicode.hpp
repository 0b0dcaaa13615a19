#pragma once

#include <string>
#include <string_view>

// Minimal Unicode layer: UTF-8 codec plus the three character-level
// operations the toolkit needs (NFC normalization, alphanumeric test,
// lowercasing). Classification and normalization are backed by ICU.

namespace qaeval::uni {

// Decodes UTF-8 into Unicode scalar values. Invalid byte sequences decode
// to U+FFFD, one replacement per rejected byte, so the mapping is total
// and deterministic.
std::u32string decode_utf8(std::string_view s);

std::string encode_utf8(std::u32string_view s);

// Canonical composition (NFC). Applied once to every text field on load.
std::string nfc(std::string_view s);

// True for Unicode letters and digits (the token alphabet of the simple
// tokenizer).
bool is_word_char(char32_t c);

// Simple per-codepoint lowercase mapping.
char32_t to_lower(char32_t c);

}  // namespace qaeval::uni
