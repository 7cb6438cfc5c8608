#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "mtprep/unicode.hpp"

namespace mtprep {

// Maps a lowercased token to its most frequent surface form among
// non-sentence-initial occurrences.
struct TruecaseModel {
  struct Entry {
    std::string form;
    std::uint64_t count = 0;
  };
  std::unordered_map<std::string, Entry> forms;
};

// One line per sentence. The sentence-initial token is skipped because its
// casing is positional, not lexical. Ties go to the form seen first.
inline TruecaseModel train_truecaser(const std::vector<std::string>& lines) {
  struct Tally {
    std::vector<std::pair<std::string, std::uint64_t>> surface;  // first-seen order
  };
  std::unordered_map<std::string, Tally> tallies;

  for (const auto& line : lines) {
    bool first = true;
    std::string cur;
    const std::u32string u = utf8_to_u32(line);
    const auto consume = [&] {
      if (cur.empty()) return;
      if (!first) {
        Tally& t = tallies[lowercase(cur)];
        bool found = false;
        for (auto& [form, count] : t.surface)
          if (form == cur) {
            ++count;
            found = true;
            break;
          }
        if (!found) t.surface.emplace_back(cur, 1);
      }
      first = false;
      cur.clear();
    };
    for (char32_t c : u) {
      if (is_space_cp(c))
        consume();
      else
        utf8_append(cur, c);
    }
    consume();
  }

  TruecaseModel model;
  for (auto& [lower, tally] : tallies) {
    TruecaseModel::Entry best;
    for (const auto& [form, count] : tally.surface)
      if (count > best.count) best = {form, count};  // strict > keeps first-seen on ties
    model.forms.emplace(lower, std::move(best));
  }
  return model;
}

namespace detail {

inline std::string capitalize_first(std::string_view token) {
  char32_t first;
  const std::size_t n = utf8_decode(token, 0, &first);
  if (n == 0) return std::string(token);
  std::string out = utf8_encode(to_upper_cp(first));
  out.append(token.substr(n));
  return out;
}

}  // namespace detail

// Replaces each whitespace token by its stored surface form; a
// sentence-initial token with no entry gets simple initial capitalization.
// Inter-token whitespace is preserved byte for byte.
inline std::string truecase(std::string_view text, const TruecaseModel& model) {
  std::string out;
  out.reserve(text.size());
  const std::u32string u = utf8_to_u32(text);
  std::string cur;
  bool first = true;
  const auto emit = [&] {
    if (cur.empty()) return;
    const auto it = model.forms.find(lowercase(cur));
    if (it != model.forms.end())
      out += it->second.form;
    else if (first)
      out += detail::capitalize_first(cur);
    else
      out += cur;
    first = false;
    cur.clear();
  };
  for (char32_t c : u) {
    if (is_space_cp(c)) {
      emit();
      utf8_append(out, c);
    } else {
      utf8_append(cur, c);
    }
  }
  emit();
  return out;
}

}  // namespace mtprep
