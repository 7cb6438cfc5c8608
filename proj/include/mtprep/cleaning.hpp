#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "mtprep/corpus.hpp"
#include "mtprep/unicode.hpp"

namespace mtprep {

enum class LengthUnit { characters, whitespace_tokens };
enum class DedupKey { pair, source, target };

struct FilterConfig {
  std::size_t max_length = 200;  // per side, in length_unit
  LengthUnit length_unit = LengthUnit::whitespace_tokens;
  double max_ratio = 9.0;  // longer side / shorter side
  DedupKey dedup_key = DedupKey::pair;
  std::optional<double> score_threshold;  // keep iff score > threshold
  bool source_copy_check = true;
};

// Ordered record of (stage name, rows remaining after the stage).
struct FilterLedger {
  std::size_t initial_rows = 0;
  std::vector<std::pair<std::string, std::size_t>> stages;
};

namespace detail {

// Emptiness test trims Unicode whitespace but the stored text is never
// modified.
inline bool is_blank(std::string_view text) {
  std::size_t i = 0;
  while (i < text.size()) {
    const unsigned char b = static_cast<unsigned char>(text[i]);
    if (b < 0x80) {
      if (!(b == ' ' || (b >= 0x09 && b <= 0x0D))) return false;
      ++i;
      continue;
    }
    char32_t cp;
    const std::size_t n = utf8_decode(text, i, &cp);
    if (n == 0 || !is_space_cp(cp)) return false;
    i += n;
  }
  return true;
}

inline std::size_t count_codepoints(std::string_view text) {
  std::size_t count = 0;
  for (char c : text)
    if ((static_cast<unsigned char>(c) & 0xC0) != 0x80) ++count;
  return count;
}

inline std::size_t count_ws_tokens(std::string_view text) {
  std::size_t count = 0;
  bool in_token = false;
  std::size_t i = 0;
  while (i < text.size()) {
    const unsigned char b = static_cast<unsigned char>(text[i]);
    bool space;
    std::size_t n = 1;
    if (b < 0x80) {
      space = (b == ' ' || (b >= 0x09 && b <= 0x0D));
    } else {
      char32_t cp;
      n = utf8_decode(text, i, &cp);
      if (n == 0) {
        space = false;
        n = 1;
      } else {
        space = is_space_cp(cp);
      }
    }
    if (space) {
      in_token = false;
    } else if (!in_token) {
      in_token = true;
      ++count;
    }
    i += n;
  }
  return count;
}

inline std::size_t segment_length(std::string_view text, LengthUnit unit) {
  return unit == LengthUnit::characters ? count_codepoints(text) : count_ws_tokens(text);
}

}  // namespace detail

// Drops pairs whose source or target is empty after whitespace trimming;
// surviving pairs are untouched.
inline ParallelCorpus remove_empty(ParallelCorpus corpus) {
  std::vector<SentencePair> kept;
  kept.reserve(corpus.pairs.size());
  for (auto& pair : corpus.pairs)
    if (!detail::is_blank(pair.source) && !detail::is_blank(pair.target))
      kept.push_back(std::move(pair));
  corpus.pairs = std::move(kept);
  return corpus;
}

// First occurrence of each key wins; relative order preserved. Comparison is
// exact and case-sensitive.
inline ParallelCorpus dedup_pairs(ParallelCorpus corpus, DedupKey key = DedupKey::pair) {
  struct Hash {
    const std::vector<SentencePair>* pairs;
    DedupKey key;
    std::size_t operator()(std::size_t i) const {
      const auto& p = (*pairs)[i];
      const std::hash<std::string_view> h;
      switch (key) {
        case DedupKey::source: return h(p.source);
        case DedupKey::target: return h(p.target);
        default: return h(p.source) * 0x9E3779B97F4A7C15ull ^ h(p.target);
      }
    }
  };
  struct Eq {
    const std::vector<SentencePair>* pairs;
    DedupKey key;
    bool operator()(std::size_t a, std::size_t b) const {
      const auto& pa = (*pairs)[a];
      const auto& pb = (*pairs)[b];
      switch (key) {
        case DedupKey::source: return pa.source == pb.source;
        case DedupKey::target: return pa.target == pb.target;
        default: return pa.source == pb.source && pa.target == pb.target;
      }
    }
  };

  const Hash hash{&corpus.pairs, key};
  const Eq eq{&corpus.pairs, key};
  std::unordered_set<std::size_t, Hash, Eq> seen(corpus.pairs.size() * 2 + 16, hash, eq);
  std::vector<char> keep(corpus.pairs.size(), 0);
  for (std::size_t i = 0; i < corpus.pairs.size(); ++i)
    if (seen.insert(i).second) keep[i] = 1;

  std::vector<SentencePair> kept;
  kept.reserve(seen.size());
  for (std::size_t i = 0; i < corpus.pairs.size(); ++i)
    if (keep[i]) kept.push_back(std::move(corpus.pairs[i]));
  corpus.pairs = std::move(kept);
  return corpus;
}

// Removes pairs whose source equals the target exactly (case-sensitive).
inline ParallelCorpus remove_source_copies(ParallelCorpus corpus) {
  std::vector<SentencePair> kept;
  kept.reserve(corpus.pairs.size());
  for (auto& pair : corpus.pairs)
    if (pair.source != pair.target) kept.push_back(std::move(pair));
  corpus.pairs = std::move(kept);
  return corpus;
}

// A pair survives iff both sides are within max_length and the longer/shorter
// length ratio is within max_ratio. Pairs with a zero-length side are removed
// here (remove_empty normally runs first and makes that a no-op).
inline ParallelCorpus filter_length(ParallelCorpus corpus, std::size_t max_length,
                                    LengthUnit unit, double max_ratio) {
  if (max_ratio < 1.0) throw std::invalid_argument("max_ratio must be >= 1");
  std::vector<SentencePair> kept;
  kept.reserve(corpus.pairs.size());
  for (auto& pair : corpus.pairs) {
    const std::size_t ls = detail::segment_length(pair.source, unit);
    const std::size_t lt = detail::segment_length(pair.target, unit);
    if (ls == 0 || lt == 0) continue;
    if (ls > max_length || lt > max_length) continue;
    const double ratio =
        double(std::max(ls, lt)) / double(std::min(ls, lt));
    if (ratio > max_ratio) continue;
    kept.push_back(std::move(pair));
  }
  corpus.pairs = std::move(kept);
  return corpus;
}

// Keeps pairs scored strictly above the threshold; unscored pairs pass.
inline ParallelCorpus filter_score(ParallelCorpus corpus, double threshold) {
  if (!(threshold >= 0.0 && threshold <= 1.0))
    throw std::invalid_argument("score threshold must be in [0,1]");
  std::vector<SentencePair> kept;
  kept.reserve(corpus.pairs.size());
  for (auto& pair : corpus.pairs)
    if (!pair.score || *pair.score > threshold) kept.push_back(std::move(pair));
  corpus.pairs = std::move(kept);
  return corpus;
}

inline constexpr const char* kStageScore = "Low-Score Rows Deleted";
inline constexpr const char* kStageEmpty = "Rows with Empty Cells Deleted";
inline constexpr const char* kStageDedup = "Duplicates Deleted";
inline constexpr const char* kStageCopies = "Source-Copied Rows Deleted";
inline constexpr const char* kStageLength = "Too-Long Source/Target Deleted";

// Fixed stage order: score filter (when configured), empty cells, duplicates,
// source copies, length, empty cells again. Each stage appends
// (name, rows_after) to the ledger.
inline std::pair<ParallelCorpus, FilterLedger> run_pipeline(ParallelCorpus corpus,
                                                            const FilterConfig& config) {
  FilterLedger ledger;
  ledger.initial_rows = corpus.size();
  const auto record = [&](const char* name, ParallelCorpus c) {
    ledger.stages.emplace_back(name, c.size());
    return c;
  };

  if (config.score_threshold)
    corpus = record(kStageScore, filter_score(std::move(corpus), *config.score_threshold));
  corpus = record(kStageEmpty, remove_empty(std::move(corpus)));
  corpus = record(kStageDedup, dedup_pairs(std::move(corpus), config.dedup_key));
  if (config.source_copy_check)
    corpus = record(kStageCopies, remove_source_copies(std::move(corpus)));
  corpus = record(kStageLength, filter_length(std::move(corpus), config.max_length,
                                              config.length_unit, config.max_ratio));
  corpus = record(kStageEmpty, remove_empty(std::move(corpus)));
  return {std::move(corpus), std::move(ledger)};
}

// Human-readable printout:
//   Dataframe shape (rows, columns): (N, 2)
//   --- <stage name, padded to 35 columns> --> Rows: <count>
inline std::string render_ledger(const FilterLedger& ledger) {
  std::string out = "Dataframe shape (rows, columns): (" +
                    std::to_string(ledger.initial_rows) + ", 2)\n";
  for (const auto& [name, rows] : ledger.stages) {
    out += "--- ";
    out += name;
    if (name.size() < 35)
      out.append(35 - name.size(), ' ');
    else
      out += ' ';
    out += "--> Rows: ";
    out += std::to_string(rows);
    out += '\n';
  }
  return out;
}

// Machine-readable report: one `stage<TAB>rows` line per entry, with the
// input size recorded as the pseudo-stage `initial`.
inline std::string ledger_report(const FilterLedger& ledger) {
  std::string out = "initial\t" + std::to_string(ledger.initial_rows) + "\n";
  for (const auto& [name, rows] : ledger.stages)
    out += name + "\t" + std::to_string(rows) + "\n";
  return out;
}

}  // namespace mtprep
