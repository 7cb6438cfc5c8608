#pragma once

#include <cstdint>
#include <queue>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "mtprep/rng.hpp"
#include "mtprep/subword_model.hpp"

namespace mtprep {

namespace bpe_detail {

struct SymbolTable {
  std::vector<std::string> text;
  std::vector<bool> starts_digit, ends_digit, mergeable;
  std::unordered_map<std::string, std::uint32_t> ids;

  std::uint32_t intern(std::string_view s, bool can_merge) {
    const auto it = ids.find(std::string(s));
    if (it != ids.end()) return it->second;
    const auto id = std::uint32_t(text.size());
    text.emplace_back(s);
    starts_digit.push_back(!s.empty() && s.front() >= '0' && s.front() <= '9');
    ends_digit.push_back(!s.empty() && s.back() >= '0' && s.back() <= '9');
    mergeable.push_back(can_merge);
    ids.emplace(text.back(), id);
    return id;
  }
};

inline std::uint64_t pair_key(std::uint32_t l, std::uint32_t r) {
  return (std::uint64_t(l) << 32) | r;
}

// Character-coverage cutoff: the smallest frequency-ranked prefix of the
// symbol alphabet covering the requested fraction of occurrences. Ties are
// broken toward the lexicographically smaller symbol so the set is
// deterministic.
inline std::unordered_set<std::string> covered_chars(
    const std::vector<std::pair<std::string, std::uint64_t>>& char_freqs, double coverage) {
  std::unordered_set<std::string> covered;
  if (char_freqs.empty()) return covered;
  std::vector<std::pair<std::string, std::uint64_t>> ranked = char_freqs;
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  std::uint64_t total = 0;
  for (const auto& [c, f] : ranked) total += f;
  std::uint64_t running = 0;
  for (const auto& [c, f] : ranked) {
    if (coverage < 1.0 && double(running) >= coverage * double(total)) break;
    covered.insert(c);
    running += f;
  }
  return covered;
}

}  // namespace bpe_detail

// Learns merges greedily: at every step the adjacent symbol pair with the
// highest corpus frequency is merged, ties broken by the lexicographically
// smallest (left, right) pair under code-point order. Stops when the piece
// count reaches vocab_size or no pair occurs at least twice. Pair counts are
// maintained incrementally; only words containing the merged pair are
// rewritten.
inline BpeModel train_bpe(const std::vector<std::string>& lines,
                          const SubwordTrainConfig& config) {
  using namespace bpe_detail;

  BpeModel model;
  model.marker = config.marker;
  model.byte_fallback = config.byte_fallback;
  model.split_digits = config.split_digits;

  const WordFreq table = prepare_words(lines, config.marker);

  // Character alphabet and frequencies.
  std::unordered_map<std::string, std::uint64_t> char_freq;
  for (const auto& [word, count] : table.items)
    for (char32_t cp : utf8_to_u32(word)) char_freq[utf8_encode(cp)] += count;
  std::vector<std::pair<std::string, std::uint64_t>> char_freqs(char_freq.begin(),
                                                                char_freq.end());
  const auto covered = covered_chars(char_freqs, config.character_coverage);

  const std::size_t base_count = covered.size() + (config.byte_fallback ? 256 : 0);
  if (config.vocab_size < base_count)
    throw std::invalid_argument("unsatisfiable vocab_size " +
                                std::to_string(config.vocab_size) + " < base symbol count " +
                                std::to_string(base_count));

  SymbolTable symbols;
  std::vector<std::vector<std::uint32_t>> words;
  std::vector<std::uint64_t> counts;
  words.reserve(table.items.size());
  counts.reserve(table.items.size());
  for (const auto& [word, count] : table.items) {
    std::vector<std::uint32_t> syms;
    for (char32_t cp : utf8_to_u32(word)) {
      const std::string c = utf8_encode(cp);
      syms.push_back(symbols.intern(c, covered.count(c) != 0));
    }
    words.push_back(std::move(syms));
    counts.push_back(count);
  }

  struct PairInfo {
    std::int64_t count = 0;
    std::unordered_set<std::uint32_t> words;
  };
  std::unordered_map<std::uint64_t, PairInfo> pairs;

  struct HeapEntry {
    std::int64_t count;
    std::uint32_t left, right;
  };
  const auto worse = [&symbols](const HeapEntry& a, const HeapEntry& b) {
    if (a.count != b.count) return a.count < b.count;
    if (symbols.text[a.left] != symbols.text[b.left])
      return symbols.text[a.left] > symbols.text[b.left];
    return symbols.text[a.right] > symbols.text[b.right];
  };
  std::priority_queue<HeapEntry, std::vector<HeapEntry>, decltype(worse)> heap(worse);

  const auto pair_allowed = [&](std::uint32_t l, std::uint32_t r) {
    if (!symbols.mergeable[l] || !symbols.mergeable[r]) return false;
    if (config.split_digits && symbols.ends_digit[l] && symbols.starts_digit[r]) return false;
    return true;
  };
  const auto add_word_pairs = [&](std::uint32_t w, std::int64_t sign) {
    const auto& syms = words[w];
    const std::int64_t delta = sign * std::int64_t(counts[w]);
    for (std::size_t i = 0; i + 1 < syms.size(); ++i) {
      if (!pair_allowed(syms[i], syms[i + 1])) continue;
      PairInfo& info = pairs[pair_key(syms[i], syms[i + 1])];
      info.count += delta;
      if (sign > 0) {
        info.words.insert(w);
        heap.push({info.count, syms[i], syms[i + 1]});
      } else {
        info.words.erase(w);
      }
    }
  };
  for (std::uint32_t w = 0; w < words.size(); ++w) add_word_pairs(w, +1);
  // Re-push final counts so the heap sees each pair's settled total.
  for (const auto& [key, info] : pairs)
    heap.push({info.count, std::uint32_t(key >> 32), std::uint32_t(key & 0xFFFFFFFF)});

  std::unordered_set<std::string> piece_set(covered.begin(), covered.end());
  if (config.byte_fallback)
    for (int b = 0; b < 256; ++b) piece_set.insert(byte_piece(static_cast<unsigned char>(b)));

  std::vector<std::uint32_t> merged_order;  // merged symbol ids, rank order
  while (piece_set.size() < config.vocab_size) {
    // Pop until the top entry reflects the current count of its pair.
    std::uint32_t left = 0, right = 0;
    bool found = false;
    while (!heap.empty()) {
      const HeapEntry top = heap.top();
      const auto it = pairs.find(pair_key(top.left, top.right));
      const std::int64_t current = it == pairs.end() ? 0 : it->second.count;
      if (current != top.count || current < 2) {
        heap.pop();
        if (current >= 2) heap.push({current, top.left, top.right});
        continue;
      }
      left = top.left;
      right = top.right;
      found = true;
      break;
    }
    if (!found) break;

    const std::string merged_text = symbols.text[left] + symbols.text[right];
    const std::uint32_t merged = symbols.intern(merged_text, true);
    model.merges.emplace_back(symbols.text[left], symbols.text[right]);
    if (piece_set.insert(merged_text).second) merged_order.push_back(merged);

    const auto affected = pairs[pair_key(left, right)].words;
    for (const std::uint32_t w : affected) {
      add_word_pairs(w, -1);
      auto& syms = words[w];
      std::vector<std::uint32_t> next;
      next.reserve(syms.size());
      std::size_t i = 0;
      while (i < syms.size()) {
        if (i + 1 < syms.size() && syms[i] == left && syms[i + 1] == right) {
          next.push_back(merged);
          i += 2;
        } else {
          next.push_back(syms[i++]);
        }
      }
      syms = std::move(next);
      add_word_pairs(w, +1);
    }
    pairs.erase(pair_key(left, right));
  }

  // Final piece frequencies measured on the fully merged corpus.
  std::unordered_map<std::uint32_t, std::uint64_t> sym_freq;
  for (std::uint32_t w = 0; w < words.size(); ++w)
    for (const std::uint32_t s : words[w]) sym_freq[s] += counts[w];

  if (config.byte_fallback)
    for (int b = 0; b < 256; ++b)
      model.vocab.emplace_back(byte_piece(static_cast<unsigned char>(b)), 0);
  std::vector<std::pair<std::string, std::uint64_t>> base_chars;
  for (const auto& [c, f] : char_freqs)
    if (covered.count(c)) base_chars.emplace_back(c, f);
  std::sort(base_chars.begin(), base_chars.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  for (const auto& [c, f] : base_chars) {
    const auto it = symbols.ids.find(c);
    const std::uint64_t freq =
        it == symbols.ids.end() ? 0 : (sym_freq.count(it->second) ? sym_freq[it->second] : 0);
    model.vocab.emplace_back(c, freq);
  }
  std::unordered_set<std::string> emitted;
  for (const std::uint32_t id : merged_order) {
    if (!emitted.insert(symbols.text[id]).second) continue;
    model.vocab.emplace_back(symbols.text[id], sym_freq.count(id) ? sym_freq[id] : 0);
  }
  return model;
}

// Applies learned merges to text. Merges are applied in rank order; with
// dropout each individual application site is independently skipped with
// probability dropout_p, so dropout_p=0 is deterministic BPE and dropout_p=1
// yields the base character segmentation. Symbols outside the vocabulary
// pass through as single-character pieces, or as UTF-8 byte pieces when the
// model was trained with byte fallback.
//
// Encoder instances keep a per-word cache for dropout-free encoding and are
// therefore not safe to share across threads; the model itself is immutable.
class BpeEncoder {
 public:
  explicit BpeEncoder(const BpeModel& model)
      : marker_(model.marker), byte_fallback_(model.byte_fallback) {
    for (const auto& [piece, freq] : model.vocab) vocab_.insert(piece);
    pair_left_.reserve(model.merges.size());
    pair_right_.reserve(model.merges.size());
    for (std::size_t rank = 0; rank < model.merges.size(); ++rank) {
      const auto& [left, right] = model.merges[rank];
      const std::uint32_t l = intern(left);
      const std::uint32_t r = intern(right);
      const std::uint32_t m = intern(left + right);
      ranks_.emplace(bpe_detail::pair_key(l, r), Merge{std::uint32_t(rank), m});
      pair_left_.push_back(l);
      pair_right_.push_back(r);
    }
  }

  std::vector<std::string> encode_word(std::string_view marked_word, double dropout = 0.0,
                                       SeededRng* rng = nullptr) const {
    if (dropout > 0.0 && rng == nullptr)
      throw std::invalid_argument("BPE dropout requires a seeded generator");

    std::vector<std::uint32_t> syms;
    for (char32_t cp : utf8_to_u32(marked_word)) syms.push_back(lookup(utf8_encode(cp)));

    std::uint32_t rank_floor = 0;
    for (;;) {
      // Lowest-rank applicable merge not yet processed.
      std::uint32_t best_rank = UINT32_MAX;
      std::uint32_t merged = 0;
      for (std::size_t i = 0; i + 1 < syms.size(); ++i) {
        const auto it = ranks_.find(bpe_detail::pair_key(syms[i], syms[i + 1]));
        if (it != ranks_.end() && it->second.rank >= rank_floor &&
            it->second.rank < best_rank) {
          best_rank = it->second.rank;
          merged = it->second.merged;
        }
      }
      if (best_rank == UINT32_MAX) break;

      const std::uint32_t left = pair_left_[best_rank];
      const std::uint32_t right = pair_right_[best_rank];
      std::vector<std::uint32_t> next;
      next.reserve(syms.size());
      std::size_t i = 0;
      while (i < syms.size()) {
        if (i + 1 < syms.size() && syms[i] == left && syms[i + 1] == right &&
            !(dropout > 0.0 && rng->next_double() < dropout)) {
          next.push_back(merged);
          i += 2;
        } else {
          next.push_back(syms[i++]);
        }
      }
      syms = std::move(next);
      rank_floor = best_rank + 1;
    }

    std::vector<std::string> pieces;
    pieces.reserve(syms.size());
    for (const std::uint32_t s : syms) {
      const std::string& text = pieces_[s];
      if (vocab_.count(text)) {
        pieces.push_back(text);
      } else if (byte_fallback_) {
        for (unsigned char b : text) pieces.push_back(byte_piece(b));
      } else {
        pieces.push_back(text);
      }
    }
    return pieces;
  }

  // Whitespace-splits the text, prepends the marker to each word and encodes
  // word by word.
  std::vector<std::string> encode_text(std::string_view text, double dropout = 0.0,
                                       SeededRng* rng = nullptr) const {
    std::vector<std::string> pieces;
    for (const auto& token : ws_tokens(text)) {
      if (dropout == 0.0) {
        const auto it = cache_.find(token);
        if (it != cache_.end()) {
          pieces.insert(pieces.end(), it->second.begin(), it->second.end());
          continue;
        }
      }
      const auto word_pieces = encode_word(marker_ + token, dropout, rng);
      pieces.insert(pieces.end(), word_pieces.begin(), word_pieces.end());
      if (dropout == 0.0 && cache_.size() < kCacheCap) cache_.emplace(token, word_pieces);
    }
    return pieces;
  }

 private:
  // Word cache bound; beyond this, unseen words are simply re-encoded.
  static constexpr std::size_t kCacheCap = 2000000;

  struct Merge {
    std::uint32_t rank;
    std::uint32_t merged;
  };

  std::uint32_t intern(const std::string& s) {
    const auto it = ids_.find(s);
    if (it != ids_.end()) return it->second;
    const auto id = std::uint32_t(pieces_.size());
    pieces_.push_back(s);
    ids_.emplace(s, id);
    return id;
  }
  std::uint32_t lookup(const std::string& s) const {
    const auto it = ids_.find(s);
    if (it != ids_.end()) return it->second;
    // Unseen character: intern on the fly so the symbol machinery is uniform.
    const auto id = std::uint32_t(pieces_.size());
    pieces_.push_back(s);
    ids_.emplace(s, id);
    return id;
  }

  std::string marker_;
  bool byte_fallback_;
  mutable std::vector<std::string> pieces_;
  mutable std::unordered_map<std::string, std::uint32_t> ids_;
  std::unordered_map<std::uint64_t, Merge> ranks_;
  std::vector<std::uint32_t> pair_left_, pair_right_;
  std::unordered_set<std::string> vocab_;
  mutable std::unordered_map<std::string, std::vector<std::string>> cache_;
};

inline std::vector<std::string> encode_bpe(const BpeModel& model, std::string_view text,
                                           double dropout_p = 0.0, std::uint64_t seed = 0) {
  if (dropout_p < 0.0 || dropout_p > 1.0)
    throw std::invalid_argument("dropout probability must be in [0,1]");
  BpeEncoder encoder(model);
  SeededRng rng(seed);
  return encoder.encode_text(text, dropout_p, &rng);
}

}  // namespace mtprep
