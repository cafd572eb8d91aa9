#include "convkg/text.hpp"

#include <algorithm>
#include <cstdint>

namespace convkg::text {
namespace {

// Length of the code point starting with lead byte `c`, or 0 if `c` cannot
// start a code point.
std::size_t SequenceLength(unsigned char c) {
  if (c < 0x80) return 1;
  if ((c >> 5) == 0x6) return 2;
  if ((c >> 4) == 0xE) return 3;
  if ((c >> 3) == 0x1E) return 4;
  return 0;
}

bool IsContinuation(unsigned char c) { return (c & 0xC0) == 0x80; }

bool IsAsciiSpace(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

// Returns the byte length of a leading whitespace code point, 0 if none.
std::size_t LeadingSpace(std::string_view s) {
  if (s.empty()) return 0;
  if (IsAsciiSpace(static_cast<unsigned char>(s[0]))) return 1;
  if (s.substr(0, 3) == "\xE3\x80\x80") return 3;  // U+3000
  return 0;
}

std::size_t TrailingSpace(std::string_view s) {
  if (s.empty()) return 0;
  if (IsAsciiSpace(static_cast<unsigned char>(s.back()))) return 1;
  if (s.size() >= 3 && s.substr(s.size() - 3) == "\xE3\x80\x80") return 3;
  return 0;
}

}  // namespace

bool IsValidUtf8(std::string_view s) {
  std::size_t i = 0;
  while (i < s.size()) {
    const auto c = static_cast<unsigned char>(s[i]);
    const std::size_t len = SequenceLength(c);
    if (len == 0 || i + len > s.size()) return false;
    std::uint32_t cp = len == 1 ? c : (c & (0x7F >> len));
    for (std::size_t k = 1; k < len; ++k) {
      const auto cc = static_cast<unsigned char>(s[i + k]);
      if (!IsContinuation(cc)) return false;
      cp = (cp << 6) | (cc & 0x3F);
    }
    // Overlong encodings, surrogates and out-of-range values.
    if ((len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) ||
        (len == 4 && (cp < 0x10000 || cp > 0x10FFFF)) ||
        (cp >= 0xD800 && cp <= 0xDFFF)) {
      return false;
    }
    i += len;
  }
  return true;
}

bool IsCodePointBoundary(std::string_view s, std::size_t offset) {
  if (offset == 0 || offset == s.size()) return true;
  if (offset > s.size()) return false;
  return !IsContinuation(static_cast<unsigned char>(s[offset]));
}

std::size_t CodePointCount(std::string_view s) {
  return CodePoints(s).size();
}

std::vector<std::string> CodePoints(std::string_view s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    std::size_t len = SequenceLength(static_cast<unsigned char>(s[i]));
    if (len == 0 || i + len > s.size()) len = 1;
    out.emplace_back(s.substr(i, len));
    i += len;
  }
  return out;
}

std::string Trim(std::string_view s) {
  while (std::size_t n = LeadingSpace(s)) s.remove_prefix(n);
  while (std::size_t n = TrailingSpace(s)) s.remove_suffix(n);
  return std::string(s);
}

std::string NormalizeWhitespace(std::string_view s) {
  const std::string trimmed = Trim(s);
  std::string out;
  out.reserve(trimmed.size());
  bool in_space = false;
  std::string_view rest = trimmed;
  while (!rest.empty()) {
    if (std::size_t n = LeadingSpace(rest)) {
      in_space = true;
      rest.remove_prefix(n);
      continue;
    }
    if (in_space) out.push_back(' ');
    in_space = false;
    out.push_back(rest.front());
    rest.remove_prefix(1);
  }
  return out;
}

std::string AsciiLower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](char c) {
    return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
  });
  return out;
}

std::vector<std::string> Split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.emplace_back(s.substr(start));
      return out;
    }
    out.emplace_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

std::string Join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out.append(sep);
    out.append(parts[i]);
  }
  return out;
}

bool StartsWith(std::string_view s, std::string_view prefix) {
  return s.substr(0, prefix.size()) == prefix;
}

bool EndsWith(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() &&
         s.substr(s.size() - suffix.size()) == suffix;
}

}  // namespace convkg::text
