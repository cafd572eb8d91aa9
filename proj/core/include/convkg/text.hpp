#ifndef CONVKG_TEXT_HPP_
#define CONVKG_TEXT_HPP_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

// UTF-8 helpers. Text in this library is always UTF-8 encoded std::string;
// offsets are byte offsets unless a function says otherwise.
namespace convkg::text {

bool IsValidUtf8(std::string_view s);

// True when `offset` is 0, s.size(), or the first byte of a code point.
bool IsCodePointBoundary(std::string_view s, std::size_t offset);

// Number of code points. Invalid bytes count as one code point each.
std::size_t CodePointCount(std::string_view s);

// Splits into one string per code point.
std::vector<std::string> CodePoints(std::string_view s);

// Strips ASCII whitespace and U+3000 from both ends.
std::string Trim(std::string_view s);

// Trims and collapses internal whitespace runs to a single ASCII space.
std::string NormalizeWhitespace(std::string_view s);

// ASCII-only lowercase; other bytes pass through.
std::string AsciiLower(std::string_view s);

std::vector<std::string> Split(std::string_view s, char sep);
std::string Join(const std::vector<std::string>& parts, std::string_view sep);

bool StartsWith(std::string_view s, std::string_view prefix);
bool EndsWith(std::string_view s, std::string_view suffix);

}  // namespace convkg::text

#endif  // CONVKG_TEXT_HPP_
