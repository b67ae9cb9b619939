#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace icl::utf8 {

/// Decodes UTF-8 into codepoints. Malformed byte sequences decode to U+FFFD,
/// one replacement per bad byte, so the result is deterministic for any input.
std::vector<char32_t> decode(std::string_view text);

/// Encodes a single codepoint back to UTF-8.
std::string encode(char32_t cp);

std::size_t count_codepoints(std::string_view text);

/// Case fold covering ASCII, Latin-1, Greek and Cyrillic. Other scripts are
/// returned unchanged.
char32_t fold(char32_t cp);

/// True for codepoints that continue a word token (letters/digits, roughly).
bool is_word(char32_t cp);

/// True for CJK ideographs, kana and hangul; these tokenize per codepoint.
bool is_cjk(char32_t cp);

} // namespace icl::utf8
