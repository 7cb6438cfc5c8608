#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "mtprep/error.hpp"

namespace mtprep {

// Decodes the code point starting at data[pos]. Returns the sequence length
// in bytes and stores the code point in *cp, or returns 0 if the bytes at pos
// do not form a valid UTF-8 sequence (overlong forms, surrogates and
// out-of-range values are all rejected).
inline std::size_t utf8_decode(std::string_view data, std::size_t pos, char32_t* cp) {
  const auto* s = reinterpret_cast<const unsigned char*>(data.data()) + pos;
  const std::size_t left = data.size() - pos;
  if (left == 0) return 0;
  const unsigned char b0 = s[0];
  if (b0 < 0x80) {
    *cp = b0;
    return 1;
  }
  if (b0 < 0xC2) return 0;  // continuation byte or overlong lead
  if (b0 < 0xE0) {
    if (left < 2 || (s[1] & 0xC0) != 0x80) return 0;
    *cp = (char32_t(b0 & 0x1F) << 6) | (s[1] & 0x3F);
    return 2;
  }
  if (b0 < 0xF0) {
    if (left < 3 || (s[1] & 0xC0) != 0x80 || (s[2] & 0xC0) != 0x80) return 0;
    const char32_t c = (char32_t(b0 & 0x0F) << 12) | (char32_t(s[1] & 0x3F) << 6) | (s[2] & 0x3F);
    if (c < 0x800 || (c >= 0xD800 && c <= 0xDFFF)) return 0;
    *cp = c;
    return 3;
  }
  if (b0 < 0xF5) {
    if (left < 4 || (s[1] & 0xC0) != 0x80 || (s[2] & 0xC0) != 0x80 || (s[3] & 0xC0) != 0x80)
      return 0;
    const char32_t c = (char32_t(b0 & 0x07) << 18) | (char32_t(s[1] & 0x3F) << 12) |
                       (char32_t(s[2] & 0x3F) << 6) | (s[3] & 0x3F);
    if (c < 0x10000 || c > 0x10FFFF) return 0;
    *cp = c;
    return 4;
  }
  return 0;
}

inline bool utf8_valid(std::string_view data) {
  std::size_t i = 0;
  char32_t cp;
  while (i < data.size()) {
    const std::size_t n = utf8_decode(data, i, &cp);
    if (n == 0) return false;
    i += n;
  }
  return true;
}

inline void utf8_append(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(char(cp));
  } else if (cp < 0x800) {
    out.push_back(char(0xC0 | (cp >> 6)));
    out.push_back(char(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(char(0xE0 | (cp >> 12)));
    out.push_back(char(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(char(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(char(0xF0 | (cp >> 18)));
    out.push_back(char(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(char(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(char(0x80 | (cp & 0x3F)));
  }
}

inline std::string utf8_encode(char32_t cp) {
  std::string out;
  utf8_append(out, cp);
  return out;
}

// Throws DataError on invalid input.
inline std::u32string utf8_to_u32(std::string_view data) {
  std::u32string out;
  out.reserve(data.size());
  std::size_t i = 0;
  char32_t cp;
  while (i < data.size()) {
    const std::size_t n = utf8_decode(data, i, &cp);
    if (n == 0) throw DataError("invalid UTF-8 at byte offset " + std::to_string(i));
    out.push_back(cp);
    i += n;
  }
  return out;
}

inline std::string u32_to_utf8(std::u32string_view data) {
  std::string out;
  out.reserve(data.size() * 3);
  for (char32_t cp : data) utf8_append(out, cp);
  return out;
}

// Total decoding: every byte that does not begin a valid sequence becomes
// U+FFFD and decoding resumes at the next byte.
inline std::string utf8_decode_replacing(std::string_view data) {
  std::string out;
  out.reserve(data.size());
  std::size_t i = 0;
  char32_t cp;
  while (i < data.size()) {
    const std::size_t n = utf8_decode(data, i, &cp);
    if (n == 0) {
      out.append("\xEF\xBF\xBD");  // U+FFFD
      ++i;
    } else {
      out.append(data.substr(i, n));
      i += n;
    }
  }
  return out;
}

}  // namespace mtprep
