#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "mtprep/utf8.hpp"

namespace mtprep {

inline bool is_space_cp(char32_t c) {
  return (c >= 0x09 && c <= 0x0D) || c == 0x20 || c == 0x85 || c == 0xA0 || c == 0x1680 ||
         (c >= 0x2000 && c <= 0x200A) || c == 0x2028 || c == 0x2029 || c == 0x202F ||
         c == 0x205F || c == 0x3000;
}

inline bool is_ascii_digit(char32_t c) { return c >= '0' && c <= '9'; }

// Script classes used by the script-boundary tokenizer. Latin and Digit are
// deliberately distinct classes.
enum class Script { Latin, Digit, Han, Hiragana, Katakana, Other };

inline Script script_of(char32_t c) {
  if (is_ascii_digit(c) || (c >= 0xFF10 && c <= 0xFF19)) return Script::Digit;
  if ((c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z')) return Script::Latin;
  if (c >= 0xC0 && c <= 0x24F && c != 0xD7 && c != 0xF7) return Script::Latin;
  if (c >= 0x1E00 && c <= 0x1EFF) return Script::Latin;
  if (c >= 0x3041 && c <= 0x309F) return Script::Hiragana;
  if ((c >= 0x30A0 && c <= 0x30FF) || (c >= 0x31F0 && c <= 0x31FF) ||
      (c >= 0xFF66 && c <= 0xFF9F))
    return Script::Katakana;
  if ((c >= 0x4E00 && c <= 0x9FFF) || (c >= 0x3400 && c <= 0x4DBF) ||
      (c >= 0xF900 && c <= 0xFAFF) || (c >= 0x20000 && c <= 0x3134F) || c == 0x3005 ||
      c == 0x3007)
    return Script::Han;
  return Script::Other;
}

// Simple (one code point to one code point) case mappings over the ranges
// this toolkit needs: ASCII, Latin-1, Latin Extended-A, Greek and Cyrillic.
// Code points outside the covered ranges map to themselves.
inline char32_t to_lower_cp(char32_t c) {
  if (c >= 'A' && c <= 'Z') return c + 0x20;
  if (c < 0xC0) return c;
  if (c >= 0xC0 && c <= 0xDE && c != 0xD7) return c + 0x20;
  if (c == 0x130) return 0x69;  // I with dot above
  if (c >= 0x100 && c <= 0x137) return (c % 2 == 0) ? c + 1 : c;
  if (c >= 0x139 && c <= 0x148) return (c % 2 == 1) ? c + 1 : c;
  if (c >= 0x14A && c <= 0x177) return (c % 2 == 0) ? c + 1 : c;
  if (c == 0x178) return 0xFF;  // Y with diaeresis
  if (c >= 0x179 && c <= 0x17E) return (c % 2 == 1) ? c + 1 : c;
  switch (c) {  // accented Greek capitals
    case 0x386: return 0x3AC;
    case 0x388: return 0x3AD;
    case 0x389: return 0x3AE;
    case 0x38A: return 0x3AF;
    case 0x38C: return 0x3CC;
    case 0x38E: return 0x3CD;
    case 0x38F: return 0x3CE;
    default: break;
  }
  if ((c >= 0x391 && c <= 0x3A1) || (c >= 0x3A3 && c <= 0x3AB)) return c + 0x20;
  if (c >= 0x410 && c <= 0x42F) return c + 0x20;
  if (c >= 0x400 && c <= 0x40F) return c + 0x50;
  return c;
}

inline char32_t to_upper_cp(char32_t c) {
  if (c >= 'a' && c <= 'z') return c - 0x20;
  if (c < 0xE0) return c;
  if (c >= 0xE0 && c <= 0xFE && c != 0xF7 && c != 0xDF) return c - 0x20;
  if (c == 0xFF) return 0x178;
  if (c == 0x131) return 0x49;  // dotless i
  if (c == 0x17F) return 0x53;  // long s
  if (c >= 0x101 && c <= 0x137) return (c % 2 == 1) ? c - 1 : c;
  if (c >= 0x13A && c <= 0x148) return (c % 2 == 0) ? c - 1 : c;
  if (c >= 0x14B && c <= 0x177) return (c % 2 == 1) ? c - 1 : c;
  if (c >= 0x17A && c <= 0x17E) return (c % 2 == 0) ? c - 1 : c;
  if (c == 0x3C2) return 0x3A3;  // final sigma
  switch (c) {
    case 0x3AC: return 0x386;
    case 0x3AD: return 0x388;
    case 0x3AE: return 0x389;
    case 0x3AF: return 0x38A;
    case 0x3CC: return 0x38C;
    case 0x3CD: return 0x38E;
    case 0x3CE: return 0x38F;
    default: break;
  }
  if ((c >= 0x3B1 && c <= 0x3C1) || (c >= 0x3C3 && c <= 0x3CB)) return c - 0x20;
  if (c >= 0x430 && c <= 0x44F) return c - 0x20;
  if (c >= 0x450 && c <= 0x45F) return c - 0x50;
  return c;
}

// Total on arbitrary bytes: invalid sequences are copied through unchanged.
inline std::string lowercase(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  char32_t cp;
  while (i < text.size()) {
    const std::size_t n = utf8_decode(text, i, &cp);
    if (n == 0) {
      out.push_back(text[i++]);
    } else {
      utf8_append(out, to_lower_cp(cp));
      i += n;
    }
  }
  return out;
}

namespace detail {

inline bool is_combining_cp(char32_t c) {
  return (c >= 0x0300 && c <= 0x036F) || (c >= 0x0483 && c <= 0x0489) ||
         (c >= 0x0591 && c <= 0x05C7) || (c >= 0x064B && c <= 0x065F) || c == 0x0670 ||
         (c >= 0x1AB0 && c <= 0x1AFF) || (c >= 0x1DC0 && c <= 0x1DFF) ||
         (c >= 0x20D0 && c <= 0x20FF) || (c >= 0x3099 && c <= 0x309A) ||
         (c >= 0xFE20 && c <= 0xFE2F);
}

inline bool is_extender_cp(char32_t c) {
  return is_combining_cp(c) || (c >= 0xFE00 && c <= 0xFE0F) ||
         (c >= 0xE0100 && c <= 0xE01EF) || (c >= 0x1F3FB && c <= 0x1F3FF);
}

inline bool is_regional_indicator(char32_t c) { return c >= 0x1F1E6 && c <= 0x1F1FF; }

}  // namespace detail

// Advances past one extended grapheme cluster starting at pos. This is an
// approximation of UAX #29: base + combining marks / variation selectors /
// skin tones, ZWJ-joined sequences, and regional-indicator pairs.
inline std::size_t next_grapheme(std::u32string_view text, std::size_t pos) {
  const std::size_t n = text.size();
  if (pos >= n) return pos;
  std::size_t i = pos + 1;
  if (text[pos] == U'\r' && i < n && text[i] == U'\n') return i + 1;
  if (detail::is_regional_indicator(text[pos]) && i < n &&
      detail::is_regional_indicator(text[i]))
    ++i;
  for (;;) {
    while (i < n && detail::is_extender_cp(text[i])) ++i;
    if (i + 1 < n && text[i] == 0x200D) {
      i += 2;  // ZWJ glues the next base
      continue;
    }
    break;
  }
  return i;
}

// Splits on runs of Unicode whitespace; never yields empty tokens.
inline std::vector<std::string> ws_tokens(std::string_view text) {
  std::vector<std::string> tokens;
  std::string cur;
  std::size_t i = 0;
  while (i < text.size()) {
    char32_t cp;
    std::size_t n = utf8_decode(text, i, &cp);
    bool space;
    if (n == 0) {
      n = 1;
      space = false;
      cp = 0xFFFD;
      cur.push_back(text[i]);
    } else {
      space = is_space_cp(cp);
      if (!space) utf8_append(cur, cp);
    }
    if (space && !cur.empty()) {
      tokens.push_back(std::move(cur));
      cur.clear();
    }
    i += n;
  }
  if (!cur.empty()) tokens.push_back(std::move(cur));
  return tokens;
}

// One UTF-8 string per grapheme cluster, whitespace clusters included.
inline std::vector<std::string> grapheme_clusters(std::string_view text) {
  const std::u32string u = utf8_to_u32(text);
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < u.size()) {
    const std::size_t j = next_grapheme(u, i);
    out.push_back(u32_to_utf8(std::u32string_view(u).substr(i, j - i)));
    i = j;
  }
  return out;
}

}  // namespace mtprep
