#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "mtprep/rng.hpp"
#include "mtprep/subword_model.hpp"

namespace mtprep {

// What encoding does with a character no piece can cover and byte fallback is
// off: emit a literal <unk> piece, or fail naming the character.
enum class UnknownPolicy { unk_piece, error };

// Per-round EM diagnostics: piece snapshots (round start, then after every
// M-step) and the marginal corpus log-likelihood seen by each E-step.
struct UnigramTrainDiag {
  struct Round {
    std::vector<std::vector<std::pair<std::string, double>>> snapshots;
    std::vector<double> loglik;
  };
  std::vector<Round> rounds;
};

namespace unigram_detail {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
// Score of an unknown-character edge (per byte for byte fallback during
// training, per character for <unk> emission). Low enough that real pieces
// always win.
inline constexpr double kPenaltyLogProb = -100.0;
// Probability mass reserved for each byte piece in a finished model.
inline constexpr double kBytePieceProb = 1e-9;

struct Trie {
  struct Node {
    std::vector<std::pair<char32_t, std::uint32_t>> kids;
    std::int32_t piece = -1;
  };
  std::vector<Node> nodes{1};

  void insert(std::u32string_view text, std::int32_t piece_id) {
    std::uint32_t node = 0;
    for (char32_t c : text) {
      auto& kids = nodes[node].kids;
      const auto it =
          std::find_if(kids.begin(), kids.end(), [c](const auto& k) { return k.first == c; });
      if (it == kids.end()) {
        kids.emplace_back(c, std::uint32_t(nodes.size()));
        node = std::uint32_t(nodes.size());
        nodes.emplace_back();
      } else {
        node = it->second;
      }
    }
    nodes[node].piece = piece_id;
  }

  void finalize() {
    for (auto& node : nodes)
      std::sort(node.kids.begin(), node.kids.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
  }

  bool step(std::uint32_t& node, char32_t c) const {
    const auto& kids = nodes[node].kids;
    const auto it = std::lower_bound(kids.begin(), kids.end(), c,
                                     [](const auto& k, char32_t v) { return k.first < v; });
    if (it == kids.end() || it->first != c) return false;
    node = it->second;
    return true;
  }
  std::int32_t piece_at(std::uint32_t node) const { return nodes[node].piece; }
};

// Lattice edge over code-point positions. piece >= 0 indexes the piece table;
// kByteEdge decomposes one character into byte pieces; kUnkEdge emits <unk>.
inline constexpr std::int32_t kByteEdge = -2;
inline constexpr std::int32_t kUnkEdge = -1;

struct Edge {
  std::uint32_t start, end;
  std::int32_t piece;
  double score;
  std::uint32_t emitted;  // number of output pieces
};

inline double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  if (a < b) std::swap(a, b);
  return a + std::log1p(std::exp(b - a));
}

}  // namespace unigram_detail

// Shared lattice machinery for EM, Viterbi and sampling. Pieces are matched
// over code points; characters with no covering single-character piece get a
// fallback edge according to the model flags.
class UnigramLattice {
 public:
  UnigramLattice() = default;

  void reset(std::vector<std::u32string> piece_texts, std::vector<double> logprobs,
             bool byte_fallback, std::vector<double> byte_scores,
             UnknownPolicy policy = UnknownPolicy::unk_piece) {
    pieces_ = std::move(piece_texts);
    logprobs_ = std::move(logprobs);
    byte_fallback_ = byte_fallback;
    byte_scores_ = std::move(byte_scores);
    policy_ = policy;
    trie_ = unigram_detail::Trie();
    single_char_.clear();
    for (std::size_t i = 0; i < pieces_.size(); ++i) {
      trie_.insert(pieces_[i], std::int32_t(i));
      if (pieces_[i].size() == 1) single_char_.insert(pieces_[i][0]);
    }
    trie_.finalize();
  }

  // Enumerates all edges in deterministic order (start ascending, then
  // increasing end). skip_piece suppresses one piece, for pruning-loss
  // computation. With policy == error and no byte fallback, an uncovered
  // character contributes no edge and callers detect unreachability.
  void build(std::u32string_view word, std::vector<unigram_detail::Edge>& edges,
             std::int32_t skip_piece = -1) const {
    using namespace unigram_detail;
    edges.clear();
    const auto n = std::uint32_t(word.size());
    for (std::uint32_t i = 0; i < n; ++i) {
      if (single_char_.count(word[i]) == 0) {
        if (byte_fallback_) {
          double score = 0.0;
          std::uint32_t emitted = 0;
          const std::string utf8 = utf8_encode(word[i]);
          for (unsigned char b : utf8) {
            score += byte_scores_.empty() ? kPenaltyLogProb : byte_scores_[b];
            ++emitted;
          }
          edges.push_back({i, i + 1, kByteEdge, score, emitted});
        } else if (policy_ == UnknownPolicy::unk_piece) {
          edges.push_back({i, i + 1, kUnkEdge, kPenaltyLogProb, 1});
        }
      }
      std::uint32_t node = 0;
      for (std::uint32_t j = i; j < n; ++j) {
        if (!trie_.step(node, word[j])) break;
        const std::int32_t piece = trie_.piece_at(node);
        if (piece >= 0 && piece != skip_piece)
          edges.push_back({i, j + 1, piece, logprobs_[piece], 1});
      }
    }
  }

  const std::u32string& piece_text(std::size_t i) const { return pieces_[i]; }
  double piece_logprob(std::size_t i) const { return logprobs_[i]; }
  std::size_t piece_count() const { return pieces_.size(); }
  UnknownPolicy policy() const { return policy_; }

 private:
  std::vector<std::u32string> pieces_;
  std::vector<double> logprobs_;
  std::unordered_set<char32_t> single_char_;
  bool byte_fallback_ = false;
  std::vector<double> byte_scores_;  // indexed by byte value
  UnknownPolicy policy_ = UnknownPolicy::unk_piece;
  unigram_detail::Trie trie_;
};

namespace unigram_detail {

// Marginal log-likelihood of one word under the lattice (forward algorithm).
inline double forward_loglik(std::u32string_view word, const std::vector<Edge>& edges) {
  const std::size_t n = word.size();
  std::vector<double> f(n + 1, kNegInf);
  f[0] = 0.0;
  std::vector<std::vector<std::uint32_t>> by_end(n + 1);
  for (std::uint32_t e = 0; e < edges.size(); ++e) by_end[edges[e].end].push_back(e);
  for (std::size_t j = 1; j <= n; ++j)
    for (const std::uint32_t e : by_end[j])
      if (f[edges[e].start] != kNegInf)
        f[j] = log_add(f[j], f[edges[e].start] + edges[e].score);
  return f[n];
}

}  // namespace unigram_detail

// Trains a unigram language model over marker-prefixed words:
//   1. seed vocabulary = all single characters plus the most frequent
//      substrings up to max_piece_length, capped at seed_vocab_size;
//   2. EM with expected piece counts from forward-backward over each word's
//      segmentation lattice, M-step renormalization;
//   3. pruning rounds dropping the prune_fraction of removable pieces whose
//      removal least reduces total corpus likelihood (single characters are
//      never dropped), re-running EM, until vocab_size is reached.
inline UnigramModel train_unigram(const std::vector<std::string>& lines,
                                  const SubwordTrainConfig& config,
                                  UnigramTrainDiag* diag = nullptr) {
  using namespace unigram_detail;

  UnigramModel model;
  model.marker = config.marker;
  model.byte_fallback = config.byte_fallback;
  model.split_digits = config.split_digits;

  const WordFreq table = prepare_words(lines, config.marker);
  std::vector<std::u32string> words;
  std::vector<std::uint64_t> counts;
  words.reserve(table.items.size());
  counts.reserve(table.items.size());
  for (const auto& [word, count] : table.items) {
    words.push_back(utf8_to_u32(word));
    counts.push_back(count);
  }

  // Character coverage: frequency-ranked prefix, ties to the smaller code
  // point. Uncovered characters are excluded from the piece set and rely on
  // byte fallback or <unk> at encode time.
  std::unordered_map<char32_t, std::uint64_t> char_freq;
  for (std::size_t w = 0; w < words.size(); ++w)
    for (char32_t c : words[w]) char_freq[c] += counts[w];
  std::vector<std::pair<char32_t, std::uint64_t>> ranked(char_freq.begin(), char_freq.end());
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  std::uint64_t char_total = 0;
  for (const auto& [c, f] : ranked) char_total += f;
  std::unordered_set<char32_t> covered;
  {
    std::uint64_t running = 0;
    for (const auto& [c, f] : ranked) {
      if (config.character_coverage < 1.0 &&
          double(running) >= config.character_coverage * double(char_total))
        break;
      covered.insert(c);
      running += f;
    }
  }

  const std::size_t reserved = config.byte_fallback ? 256 : 0;
  if (config.vocab_size < covered.size() + reserved)
    throw std::invalid_argument("unsatisfiable vocab_size " +
                                std::to_string(config.vocab_size) + " < base piece count " +
                                std::to_string(covered.size() + reserved));
  const std::size_t target = config.vocab_size - reserved;

  // Seed pieces: covered single characters plus frequency-ranked multi-char
  // substrings (occurring at least twice, free of uncovered characters and of
  // adjacent digits when split_digits).
  struct Piece {
    std::u32string text;
    double logprob = 0.0;
    bool removable = true;
  };
  std::vector<Piece> pieces;
  std::vector<double> freqs;
  for (const auto& [c, f] : ranked) {
    if (!covered.count(c)) continue;
    pieces.push_back({std::u32string(1, c), 0.0, false});
    freqs.push_back(double(f));
  }
  {
    const std::size_t seed_cap =
        config.seed_vocab_size != 0
            ? config.seed_vocab_size
            : std::min<std::size_t>(4 * config.vocab_size, 1000000);
    const std::size_t multi_cap = seed_cap > pieces.size() ? seed_cap - pieces.size() : 0;
    std::unordered_map<std::u32string, std::uint64_t> sub_freq;
    for (std::size_t w = 0; w < words.size(); ++w) {
      const auto& word = words[w];
      for (std::size_t len = 2; len <= std::min(config.max_piece_length, word.size()); ++len) {
        for (std::size_t i = 0; i + len <= word.size(); ++i) {
          bool ok = true;
          for (std::size_t k = i; k < i + len && ok; ++k) {
            if (!covered.count(word[k])) ok = false;
            if (config.split_digits && k + 1 < i + len && is_ascii_digit(word[k]) &&
                is_ascii_digit(word[k + 1]))
              ok = false;
          }
          if (ok) sub_freq[word.substr(i, len)] += counts[w];
        }
      }
    }
    std::vector<std::pair<std::u32string, std::uint64_t>> candidates;
    candidates.reserve(sub_freq.size());
    for (auto& [text, freq] : sub_freq)
      if (freq >= 2) candidates.emplace_back(text, freq);
    std::sort(candidates.begin(), candidates.end(), [](const auto& a, const auto& b) {
      if (a.second != b.second) return a.second > b.second;
      return a.first < b.first;
    });
    if (candidates.size() > multi_cap) candidates.resize(multi_cap);
    for (auto& [text, freq] : candidates) {
      pieces.push_back({std::move(text), 0.0, true});
      freqs.push_back(double(freq));
    }
  }

  // Initial probabilities proportional to frequency.
  {
    double total = 0.0;
    for (double f : freqs) total += f;
    for (std::size_t i = 0; i < pieces.size(); ++i)
      pieces[i].logprob = total > 0 ? std::log(freqs[i] / total) : 0.0;
  }

  UnigramLattice lattice;
  std::vector<Edge> edges;
  const auto rebuild_lattice = [&] {
    std::vector<std::u32string> texts;
    std::vector<double> lps;
    texts.reserve(pieces.size());
    for (const auto& p : pieces) {
      texts.push_back(p.text);
      lps.push_back(p.logprob);
    }
    // Training-time fallback uses the fixed penalty for byte scores.
    lattice.reset(std::move(texts), std::move(lps), config.byte_fallback, {},
                  UnknownPolicy::unk_piece);
  };

  const auto snapshot = [&](UnigramTrainDiag::Round* round) {
    if (!round) return;
    std::vector<std::pair<std::string, double>> snap;
    snap.reserve(pieces.size());
    for (const auto& p : pieces) snap.emplace_back(u32_to_utf8(p.text), p.logprob);
    round->snapshots.push_back(std::move(snap));
  };

  // One EM iteration; returns the marginal corpus log-likelihood seen by the
  // E-step (i.e. under the parameters in force when it started).
  std::vector<double> expected(pieces.size());
  const auto em_step = [&] {
    expected.assign(pieces.size(), 0.0);
    double corpus_ll = 0.0;
    std::vector<double> f, b;
    std::vector<std::vector<std::uint32_t>> by_end, by_start;
    for (std::size_t w = 0; w < words.size(); ++w) {
      const auto& word = words[w];
      const std::size_t n = word.size();
      lattice.build(word, edges);
      f.assign(n + 1, kNegInf);
      b.assign(n + 1, kNegInf);
      by_end.assign(n + 1, {});
      by_start.assign(n + 1, {});
      for (std::uint32_t e = 0; e < edges.size(); ++e) {
        by_end[edges[e].end].push_back(e);
        by_start[edges[e].start].push_back(e);
      }
      f[0] = 0.0;
      for (std::size_t j = 1; j <= n; ++j)
        for (const std::uint32_t e : by_end[j])
          if (f[edges[e].start] != kNegInf)
            f[j] = log_add(f[j], f[edges[e].start] + edges[e].score);
      b[n] = 0.0;
      for (std::size_t j = n; j-- > 0;)
        for (const std::uint32_t e : by_start[j])
          if (b[edges[e].end] != kNegInf)
            b[j] = log_add(b[j], edges[e].score + b[edges[e].end]);
      if (f[n] == kNegInf) continue;  // cannot happen: single chars are pieces
      corpus_ll += double(counts[w]) * f[n];
      for (const auto& edge : edges) {
        if (edge.piece < 0) continue;
        if (f[edge.start] == kNegInf || b[edge.end] == kNegInf) continue;
        const double post = std::exp(f[edge.start] + edge.score + b[edge.end] - f[n]);
        expected[edge.piece] += double(counts[w]) * post;
      }
    }
    double total = 0.0;
    for (double e : expected) total += e;
    if (total > 0) {
      const double log_total = std::log(total);
      for (std::size_t i = 0; i < pieces.size(); ++i)
        pieces[i].logprob = std::log(std::max(expected[i], 1e-300)) - log_total;
    }
    rebuild_lattice();
    return corpus_ll;
  };

  rebuild_lattice();
  for (;;) {
    UnigramTrainDiag::Round* round = nullptr;
    if (diag) {
      diag->rounds.emplace_back();
      round = &diag->rounds.back();
    }
    snapshot(round);
    for (int it = 0; it < std::max(1, config.em_iterations); ++it) {
      const double ll = em_step();
      if (round) round->loglik.push_back(ll);
      snapshot(round);
    }
    if (pieces.size() <= target) break;

    // Pruning: exact likelihood loss of removing each removable piece,
    // recomputed only over words containing it.
    std::vector<std::vector<std::uint32_t>> piece_words(pieces.size());
    std::vector<double> word_ll(words.size(), 0.0);
    {
      std::unordered_set<std::int32_t> in_word;
      for (std::size_t w = 0; w < words.size(); ++w) {
        lattice.build(words[w], edges);
        word_ll[w] = forward_loglik(words[w], edges);
        in_word.clear();
        for (const auto& edge : edges)
          if (edge.piece >= 0 && pieces[edge.piece].removable) in_word.insert(edge.piece);
        for (const std::int32_t p : in_word) piece_words[p].push_back(std::uint32_t(w));
      }
    }
    struct Loss {
      double loss;
      std::uint32_t piece;
    };
    std::vector<Loss> losses;
    for (std::uint32_t p = 0; p < pieces.size(); ++p) {
      if (!pieces[p].removable) continue;
      double loss = 0.0;
      for (const std::uint32_t w : piece_words[p]) {
        lattice.build(words[w], edges, std::int32_t(p));
        loss += double(counts[w]) * (word_ll[w] - forward_loglik(words[w], edges));
      }
      losses.push_back({loss, p});
    }
    std::sort(losses.begin(), losses.end(), [&](const Loss& a, const Loss& b) {
      if (a.loss != b.loss) return a.loss < b.loss;
      return pieces[a.piece].text < pieces[b.piece].text;
    });
    const std::size_t over = pieces.size() - target;
    const std::size_t drop = std::min<std::size_t>(
        std::max<std::size_t>(1, std::size_t(config.prune_fraction * double(losses.size()))),
        std::min(over, losses.size()));
    if (drop == 0) break;
    std::vector<bool> dead(pieces.size(), false);
    for (std::size_t i = 0; i < drop; ++i) dead[losses[i].piece] = true;
    std::vector<Piece> kept;
    kept.reserve(pieces.size() - drop);
    for (std::size_t i = 0; i < pieces.size(); ++i)
      if (!dead[i]) kept.push_back(std::move(pieces[i]));
    pieces = std::move(kept);

    // Renormalize the survivors.
    double log_z = kNegInf;
    for (const auto& p : pieces) log_z = log_add(log_z, p.logprob);
    for (auto& p : pieces) p.logprob -= log_z;
    rebuild_lattice();
  }

  // Assemble the finished model: byte pieces get a small fixed mass and the
  // trained pieces are scaled to keep the total at exactly 1.
  const double byte_mass = config.byte_fallback ? 256.0 * kBytePieceProb : 0.0;
  const double log_scale = std::log1p(-byte_mass);
  model.pieces.reserve(pieces.size() + reserved);
  for (const auto& p : pieces)
    model.pieces.emplace_back(u32_to_utf8(p.text), p.logprob + log_scale);
  if (config.byte_fallback) {
    const double byte_lp = std::log(kBytePieceProb);
    for (int b = 0; b < 256; ++b)
      model.pieces.emplace_back(byte_piece(static_cast<unsigned char>(b)), byte_lp);
  }
  std::sort(model.pieces.begin(), model.pieces.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  return model;
}

// Viterbi and sampling encoder. The model is immutable and the encoder holds
// its own tables, so instances are safe to use concurrently.
class UnigramEncoder {
 public:
  explicit UnigramEncoder(const UnigramModel& model,
                          UnknownPolicy policy = UnknownPolicy::unk_piece)
      : marker_(model.marker) {
    std::vector<std::u32string> texts;
    std::vector<double> lps;
    std::vector<double> byte_scores(256, unigram_detail::kPenaltyLogProb);
    texts.reserve(model.pieces.size());
    for (const auto& [piece, logprob] : model.pieces) {
      piece_utf8_.push_back(piece);
      texts.push_back(utf8_to_u32(piece));
      lps.push_back(logprob);
      const int b = parse_byte_piece(piece);
      if (b >= 0) byte_scores[b] = logprob;
    }
    lattice_.reset(std::move(texts), std::move(lps), model.byte_fallback,
                   std::move(byte_scores), policy);
  }

  // Maximum-likelihood segmentation of the text taken verbatim as one unit.
  // Ties go to the fewest pieces, then the lexicographically first sequence.
  std::vector<std::string> viterbi(std::string_view text) const {
    const std::u32string word = utf8_to_u32(text);
    std::vector<unigram_detail::Edge> edges;
    lattice_.build(word, edges);
    return viterbi_segment(word, edges);
  }

  // Draws a segmentation by forward-filtering backward-sampling with piece
  // scores raised to the power alpha.
  std::vector<std::string> sample(std::string_view text, double alpha, SeededRng& rng) const {
    using namespace unigram_detail;
    if (!(alpha > 0.0)) throw std::invalid_argument("sampling alpha must be > 0");
    const std::u32string word = utf8_to_u32(text);
    const std::size_t n = word.size();
    std::vector<Edge> edges;
    lattice_.build(word, edges);
    check_reachable(word, edges);

    std::vector<double> f(n + 1, kNegInf);
    std::vector<std::vector<std::uint32_t>> by_end(n + 1);
    for (std::uint32_t e = 0; e < edges.size(); ++e) by_end[edges[e].end].push_back(e);
    f[0] = 0.0;
    for (std::size_t j = 1; j <= n; ++j)
      for (const std::uint32_t e : by_end[j])
        if (f[edges[e].start] != kNegInf)
          f[j] = log_add(f[j], f[edges[e].start] + alpha * edges[e].score);

    std::vector<std::uint32_t> chosen;
    std::size_t pos = n;
    while (pos > 0) {
      const double u = rng.next_double();
      double acc = 0.0;
      bool have = false;
      std::uint32_t picked = 0;
      for (const std::uint32_t e : by_end[pos]) {
        if (f[edges[e].start] == kNegInf) continue;
        picked = e;  // last valid edge absorbs any rounding shortfall
        have = true;
        acc += std::exp(f[edges[e].start] + alpha * edges[e].score - f[pos]);
        if (u < acc) break;
      }
      if (!have) throw DataError("sampling lattice lost reachability");
      chosen.push_back(picked);
      pos = edges[picked].start;
    }
    std::reverse(chosen.begin(), chosen.end());
    std::vector<std::string> pieces;
    for (const std::uint32_t e : chosen) emit(word, edges[e], pieces);
    return pieces;
  }

  // Whitespace-splits, prepends the marker to each word, Viterbi-segments
  // word by word.
  std::vector<std::string> encode_text(std::string_view text) const {
    std::vector<std::string> pieces;
    for (const auto& token : ws_tokens(text)) {
      const auto word_pieces = viterbi(marker_ + token);
      pieces.insert(pieces.end(), word_pieces.begin(), word_pieces.end());
    }
    return pieces;
  }

  std::vector<std::string> sample_text(std::string_view text, double alpha,
                                       SeededRng& rng) const {
    std::vector<std::string> pieces;
    for (const auto& token : ws_tokens(text)) {
      const auto word_pieces = sample(marker_ + token, alpha, rng);
      pieces.insert(pieces.end(), word_pieces.begin(), word_pieces.end());
    }
    return pieces;
  }

 private:
  void emit(const std::u32string& word, const unigram_detail::Edge& edge,
            std::vector<std::string>& out) const {
    if (edge.piece >= 0) {
      out.push_back(piece_utf8_[std::size_t(edge.piece)]);
    } else if (edge.piece == unigram_detail::kByteEdge) {
      for (const auto& piece : byte_fallback_pieces(word[edge.start])) out.push_back(piece);
    } else {
      out.push_back("<unk>");
    }
  }

  void check_reachable(const std::u32string& word,
                       const std::vector<unigram_detail::Edge>& edges) const {
    using namespace unigram_detail;
    const std::size_t n = word.size();
    std::vector<bool> reach(n + 1, false);
    reach[0] = true;
    std::vector<std::vector<std::uint32_t>> by_end(n + 1);
    for (std::uint32_t e = 0; e < edges.size(); ++e) by_end[edges[e].end].push_back(e);
    for (std::size_t j = 1; j <= n; ++j)
      for (const std::uint32_t e : by_end[j])
        if (reach[edges[e].start]) reach[j] = true;
    if (reach[n]) return;
    std::size_t last = 0;
    for (std::size_t j = 0; j <= n; ++j)
      if (reach[j]) last = j;
    char buf[16];
    std::snprintf(buf, sizeof(buf), "U+%04X", unsigned(word[std::min(last, n - 1)]));
    throw DataError(std::string("unsegmentable input: ") + buf);
  }

  std::vector<std::string> viterbi_segment(const std::u32string& word,
                                           const std::vector<unigram_detail::Edge>& edges) const {
    using namespace unigram_detail;
    const std::size_t n = word.size();
    check_reachable(word, edges);

    struct Cell {
      double score = kNegInf;
      std::uint32_t count = 0;
      std::int32_t edge = -1;
      bool set = false;
    };
    std::vector<Cell> best(n + 1);
    best[0] = {0.0, 0, -1, true};
    std::vector<std::vector<std::uint32_t>> by_end(n + 1);
    for (std::uint32_t e = 0; e < edges.size(); ++e) by_end[edges[e].end].push_back(e);

    // Materializes the piece sequence ending at a cell, for lexicographic
    // tie-breaking; ties are rare so the cost does not matter.
    const auto sequence = [&](std::size_t end, std::int32_t extra_edge) {
      std::vector<std::string> seq;
      std::size_t pos = end;
      std::int32_t e = extra_edge;
      while (true) {
        if (e < 0) break;
        std::vector<std::string> emitted;
        emit(word, edges[std::size_t(e)], emitted);
        for (auto it = emitted.rbegin(); it != emitted.rend(); ++it) seq.push_back(*it);
        pos = edges[std::size_t(e)].start;
        if (pos == 0) break;
        e = best[pos].edge;
      }
      std::reverse(seq.begin(), seq.end());
      return seq;
    };

    for (std::size_t j = 1; j <= n; ++j) {
      for (const std::uint32_t e : by_end[j]) {
        const auto& edge = edges[e];
        if (!best[edge.start].set) continue;
        const double score = best[edge.start].score + edge.score;
        const std::uint32_t count = best[edge.start].count + edge.emitted;
        bool better = false;
        if (!best[j].set || score > best[j].score) {
          better = true;
        } else if (score == best[j].score) {
          if (count < best[j].count)
            better = true;
          else if (count == best[j].count && best[j].edge >= 0)
            better = sequence(j, std::int32_t(e)) < sequence(j, best[j].edge);
        }
        if (better) best[j] = {score, count, std::int32_t(e), true};
      }
    }

    std::vector<std::uint32_t> chosen;
    std::size_t pos = n;
    while (pos > 0) {
      const std::int32_t e = best[pos].edge;
      chosen.push_back(std::uint32_t(e));
      pos = edges[std::size_t(e)].start;
    }
    std::reverse(chosen.begin(), chosen.end());
    std::vector<std::string> pieces;
    for (const std::uint32_t e : chosen) emit(word, edges[e], pieces);
    return pieces;
  }

  std::string marker_;
  std::vector<std::string> piece_utf8_;
  UnigramLattice lattice_;
};

// Spec-level wrappers: the text is segmented verbatim (no marker handling).
inline std::vector<std::string> encode_unigram_viterbi(
    const UnigramModel& model, std::string_view text,
    UnknownPolicy policy = UnknownPolicy::unk_piece) {
  return UnigramEncoder(model, policy).viterbi(text);
}

inline std::vector<std::string> sample_unigram(const UnigramModel& model,
                                               std::string_view text, double alpha,
                                               std::uint64_t seed) {
  SeededRng rng(seed);
  return UnigramEncoder(model).sample(text, alpha, rng);
}

}  // namespace mtprep
