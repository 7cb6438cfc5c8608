#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "mtprep/error.hpp"
#include "mtprep/unicode.hpp"

namespace mtprep {

inline constexpr char32_t kMarkerCp = 0x2581;           // LOWER ONE EIGHTH BLOCK
inline constexpr const char* kDefaultMarker = "\xE2\x96\x81";

enum class SubwordModelType { bpe, unigram };

struct SubwordTrainConfig {
  SubwordModelType model_type = SubwordModelType::unigram;
  std::size_t vocab_size = 8000;
  double character_coverage = 1.0;
  bool byte_fallback = false;
  bool split_digits = false;
  std::uint64_t seed = 0;
  std::string marker = kDefaultMarker;
  // Unigram only. seed_vocab_size == 0 selects min(4 * vocab_size, 1e6).
  std::size_t seed_vocab_size = 0;
  std::size_t max_piece_length = 16;
  int em_iterations = 2;
  double prune_fraction = 0.25;
};

// BPE model: learned merges in rank order plus the ordered piece vocabulary.
// Every merged piece is the concatenation of its two parents.
struct BpeModel {
  std::vector<std::pair<std::string, std::string>> merges;
  std::vector<std::pair<std::string, std::uint64_t>> vocab;  // piece, frequency
  std::string marker = kDefaultMarker;
  bool byte_fallback = false;
  bool split_digits = false;
};

// Unigram model: pieces with natural-log probabilities summing to 1, in
// canonical order (log-probability descending, then piece ascending).
struct UnigramModel {
  std::vector<std::pair<std::string, double>> pieces;
  std::string marker = kDefaultMarker;
  bool byte_fallback = false;
  bool split_digits = false;
};

// Word frequency table in first-seen order. Keys carry the word-boundary
// marker; symbols are the key's code points.
struct WordFreq {
  std::vector<std::pair<std::string, std::uint64_t>> items;
};

// Splits each line on Unicode whitespace and prepends the marker to every
// word. Digit handling lives in the trainers: symbols are single code points
// either way, split_digits only bars digits from merging together.
inline WordFreq prepare_words(const std::vector<std::string>& lines,
                              std::string_view marker = kDefaultMarker) {
  WordFreq table;
  std::unordered_map<std::string, std::size_t> index;
  for (const auto& line : lines) {
    for (auto& token : ws_tokens(line)) {
      std::string word(marker);
      word += token;
      const auto [it, inserted] = index.emplace(std::move(word), table.items.size());
      if (inserted)
        table.items.emplace_back(it->first, 1);
      else
        ++table.items[it->second].second;
    }
  }
  return table;
}

inline std::string byte_piece(unsigned char b) {
  static const char* hex = "0123456789ABCDEF";
  std::string s = "<0x00>";
  s[3] = hex[b >> 4];
  s[4] = hex[b & 0xF];
  return s;
}

// Returns the byte value, or -1 when the piece is not of the form <0xHH>.
inline int parse_byte_piece(std::string_view piece) {
  if (piece.size() != 6 || piece[0] != '<' || piece[1] != '0' || piece[2] != 'x' ||
      piece[5] != '>')
    return -1;
  int value = 0;
  for (int i = 3; i <= 4; ++i) {
    const char c = piece[i];
    value <<= 4;
    if (c >= '0' && c <= '9')
      value |= c - '0';
    else if (c >= 'A' && c <= 'F')
      value |= c - 'A' + 10;
    else
      return -1;
  }
  return value;
}

// UTF-8 byte decomposition of one character, uppercase hex.
inline std::vector<std::string> byte_fallback_pieces(char32_t cp) {
  const std::string utf8 = utf8_encode(cp);
  std::vector<std::string> pieces;
  pieces.reserve(utf8.size());
  for (unsigned char b : utf8) pieces.push_back(byte_piece(b));
  return pieces;
}

// Inverse of encoding: byte pieces are concatenated and UTF-8-decoded with
// U+FFFD for invalid sequences, other pieces are concatenated with every
// marker occurrence turned into a space, and one leading space is stripped.
// Total on arbitrary piece sequences.
inline std::string decode_pieces(const std::vector<std::string>& pieces,
                                 std::string_view marker = kDefaultMarker) {
  std::string out;
  std::string bytes;
  const auto flush_bytes = [&] {
    if (bytes.empty()) return;
    out += utf8_decode_replacing(bytes);
    bytes.clear();
  };
  for (const auto& piece : pieces) {
    const int b = parse_byte_piece(piece);
    if (b >= 0) {
      bytes.push_back(char(b));
      continue;
    }
    flush_bytes();
    std::string_view rest = piece;
    for (;;) {
      const std::size_t at = rest.find(marker);
      if (at == std::string_view::npos) {
        out += rest;
        break;
      }
      out.append(rest.substr(0, at));
      out += ' ';
      rest.remove_prefix(at + marker.size());
    }
  }
  flush_bytes();
  if (!out.empty() && out.front() == ' ') out.erase(out.begin());
  return out;
}

// ---------------------------------------------------------------------------
// Vocabulary
// ---------------------------------------------------------------------------

struct Vocabulary {
  std::vector<std::pair<std::string, double>> entries;  // token, weight

  bool contains(std::string_view token) const {
    return index_.count(std::string(token)) != 0;
  }
  void rebuild_index() {
    index_.clear();
    for (const auto& [token, weight] : entries) index_.insert(token);
  }

  static Vocabulary from(const BpeModel& model) {
    Vocabulary v;
    v.entries.reserve(model.vocab.size());
    for (const auto& [piece, freq] : model.vocab) v.entries.emplace_back(piece, double(freq));
    v.rebuild_index();
    return v;
  }
  static Vocabulary from(const UnigramModel& model) {
    Vocabulary v;
    v.entries = model.pieces;
    v.rebuild_index();
    return v;
  }

 private:
  std::unordered_set<std::string> index_;
};

enum class VocabFormat { framework_tokens, piece_logprob };

namespace detail {

inline void append_double(std::string& out, double value) {
  char buf[40];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  out.append(buf, ptr);
}

inline double parse_double(std::string_view field, const std::string& context) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size())
    throw DataError(context + ": unparsable number '" + std::string(field) + "'");
  return value;
}

inline bool is_reserved_token(std::string_view token) {
  return token == "<unk>" || token == "<s>" || token == "</s>";
}

}  // namespace detail

// framework_tokens: one piece per line in model order, reserved tokens
// (<unk>, <s>, </s>) excluded unless include_specials — the consuming NMT
// framework injects its own. piece_logprob: `piece<TAB>logprob` per line.
inline void export_vocab(const Vocabulary& vocab, const std::string& path,
                         VocabFormat format, bool include_specials = false) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  std::string buf;
  for (const auto& [token, weight] : vocab.entries) {
    if (format == VocabFormat::framework_tokens && !include_specials &&
        detail::is_reserved_token(token))
      continue;
    buf += token;
    if (format == VocabFormat::piece_logprob) {
      buf += '\t';
      detail::append_double(buf, weight);
    }
    buf += '\n';
  }
  out.write(buf.data(), std::streamsize(buf.size()));
  if (!out) throw IoError("write failure on " + path);
}

// Reads either export format: lines with a tab are piece<TAB>weight, bare
// lines are tokens with weight 0.
inline Vocabulary load_vocab(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  Vocabulary vocab;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::size_t tab = line.find('\t');
    if (tab == std::string::npos) {
      vocab.entries.emplace_back(line, 0.0);
    } else {
      vocab.entries.emplace_back(
          line.substr(0, tab),
          detail::parse_double(std::string_view(line).substr(tab + 1),
                               path + ":" + std::to_string(line_no)));
    }
  }
  if (in.bad()) throw IoError("read failure on " + path);
  vocab.rebuild_index();
  return vocab;
}

// Fraction of whitespace tokens absent from the vocabulary; 0 for an empty
// token stream.
inline double oov_rate(const std::vector<std::string>& lines, const Vocabulary& vocab) {
  std::uint64_t total = 0;
  std::uint64_t missing = 0;
  for (const auto& line : lines) {
    for (const auto& token : ws_tokens(line)) {
      ++total;
      if (!vocab.contains(token)) ++missing;
    }
  }
  return total == 0 ? 0.0 : double(missing) / double(total);
}

// ---------------------------------------------------------------------------
// Model persistence (versioned line-oriented text, UTF-8 + LF)
//
//   mtprep-subword<TAB>1<TAB><bpe|unigram><TAB><marker><TAB><bf><TAB><sd>
//       <TAB><n_pieces><TAB><n_merges>
//   n_pieces lines:  piece<TAB>frequency     (bpe)
//                    piece<TAB>logprob       (unigram)
//   n_merges lines:  left<TAB>right          (bpe only, rank order)
// ---------------------------------------------------------------------------

namespace detail {

inline std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> fields;
  for (;;) {
    const std::size_t tab = line.find('\t');
    if (tab == std::string_view::npos) {
      fields.push_back(line);
      return fields;
    }
    fields.push_back(line.substr(0, tab));
    line.remove_prefix(tab + 1);
  }
}

}  // namespace detail

inline void save_model(const BpeModel& model, const std::string& path) {
  std::string buf = "mtprep-subword\t1\tbpe\t";
  buf += model.marker;
  buf += model.byte_fallback ? "\t1\t" : "\t0\t";
  buf += model.split_digits ? "1\t" : "0\t";
  buf += std::to_string(model.vocab.size());
  buf += '\t';
  buf += std::to_string(model.merges.size());
  buf += '\n';
  for (const auto& [piece, freq] : model.vocab) {
    buf += piece;
    buf += '\t';
    buf += std::to_string(freq);
    buf += '\n';
  }
  for (const auto& [left, right] : model.merges) {
    buf += left;
    buf += '\t';
    buf += right;
    buf += '\n';
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out.write(buf.data(), std::streamsize(buf.size()));
  if (!out) throw IoError("write failure on " + path);
}

inline void save_model(const UnigramModel& model, const std::string& path) {
  std::string buf = "mtprep-subword\t1\tunigram\t";
  buf += model.marker;
  buf += model.byte_fallback ? "\t1\t" : "\t0\t";
  buf += model.split_digits ? "1\t" : "0\t";
  buf += std::to_string(model.pieces.size());
  buf += "\t0\n";
  for (const auto& [piece, logprob] : model.pieces) {
    buf += piece;
    buf += '\t';
    detail::append_double(buf, logprob);
    buf += '\n';
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out.write(buf.data(), std::streamsize(buf.size()));
  if (!out) throw IoError("write failure on " + path);
}

struct LoadedModel {
  SubwordModelType type = SubwordModelType::bpe;
  BpeModel bpe;
  UnigramModel unigram;
};

inline LoadedModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw DataError(path + ": empty model file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = detail::split_tabs(line);
  if (header.size() != 8 || header[0] != "mtprep-subword")
    throw DataError(path + ": not a subword model file");
  if (header[1] != "1") throw DataError(path + ": unsupported model version");

  LoadedModel model;
  const bool is_bpe = header[2] == "bpe";
  if (!is_bpe && header[2] != "unigram")
    throw DataError(path + ": unknown model type '" + std::string(header[2]) + "'");
  model.type = is_bpe ? SubwordModelType::bpe : SubwordModelType::unigram;
  const std::string marker(header[3]);
  const bool byte_fallback = header[4] == "1";
  const bool split_digits = header[5] == "1";
  std::size_t n_pieces = 0, n_merges = 0;
  std::from_chars(header[6].data(), header[6].data() + header[6].size(), n_pieces);
  std::from_chars(header[7].data(), header[7].data() + header[7].size(), n_merges);

  const auto read_record = [&](std::size_t want_fields, std::size_t record_no) {
    if (!std::getline(in, line))
      throw DataError(path + ": truncated model file at record " + std::to_string(record_no));
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto fields = detail::split_tabs(line);
    if (fields.size() != want_fields)
      throw DataError(path + ": malformed record " + std::to_string(record_no));
    return fields;
  };

  if (is_bpe) {
    model.bpe.marker = marker;
    model.bpe.byte_fallback = byte_fallback;
    model.bpe.split_digits = split_digits;
    model.bpe.vocab.reserve(n_pieces);
    for (std::size_t i = 0; i < n_pieces; ++i) {
      const auto f = read_record(2, i + 2);
      std::uint64_t freq = 0;
      std::from_chars(f[1].data(), f[1].data() + f[1].size(), freq);
      model.bpe.vocab.emplace_back(std::string(f[0]), freq);
    }
    model.bpe.merges.reserve(n_merges);
    for (std::size_t i = 0; i < n_merges; ++i) {
      const auto f = read_record(2, n_pieces + i + 2);
      model.bpe.merges.emplace_back(std::string(f[0]), std::string(f[1]));
    }
  } else {
    model.unigram.marker = marker;
    model.unigram.byte_fallback = byte_fallback;
    model.unigram.split_digits = split_digits;
    model.unigram.pieces.reserve(n_pieces);
    for (std::size_t i = 0; i < n_pieces; ++i) {
      const auto f = read_record(2, i + 2);
      model.unigram.pieces.emplace_back(
          std::string(f[0]),
          detail::parse_double(f[1], path + " record " + std::to_string(i + 2)));
    }
  }
  return model;
}

}  // namespace mtprep
