#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace reportqa {

// UTF-8 <-> code point helpers. Invalid byte sequences decode to U+FFFD
// one byte at a time so downstream code never sees a malformed stream.
std::u32string decode_utf8(std::string_view s);
std::string encode_utf8(std::u32string_view s);
std::size_t codepoint_count(std::string_view s);

bool is_space_cp(char32_t c);

// Maps full-width ASCII variants (U+FF01..U+FF5E) onto their half-width
// forms and the ideographic space onto U+0020. Other code points pass
// through unchanged.
char32_t fold_width(char32_t c);

// Matching normalization used by soft accuracy, synonym lookup and range
// parsing: width fold, ASCII lower-case, whitespace runs collapsed to a
// single space, leading/trailing space removed.
std::string normalize_for_match(std::string_view s);

// True when the normalized needle occurs inside the normalized haystack.
bool contains_normalized(std::string_view haystack, std::string_view needle);

// Numeric parse after normalization. Accepts full-width digits and a
// decimal comma ("5,4" -> 5.4); the whole token must be consumed.
std::optional<double> parse_number(std::string_view s);

// Tokenization for LCS-based scoring: code points from U+2E80 upward
// (CJK ideographs, kana, hangul, full-width forms) become single-character
// tokens; everything else accumulates into whitespace-delimited runs.
std::vector<std::u32string> lcs_tokens(std::string_view s);

bool contains_digit(std::string_view s);

}  // namespace reportqa
