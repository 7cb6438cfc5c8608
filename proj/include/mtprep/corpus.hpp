#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mtprep/error.hpp"
#include "mtprep/rng.hpp"
#include "mtprep/utf8.hpp"

namespace mtprep {

// One aligned source/target segment, the pipeline's unit of work. Segments
// are valid UTF-8 with no embedded line breaks; both properties are enforced
// at the ingestion boundary (see validate_segment).
struct SentencePair {
  std::string source;
  std::string target;
  std::optional<double> score;  // quality score in [0,1] when present

  bool operator==(const SentencePair&) const = default;
};

struct ParallelCorpus {
  std::vector<SentencePair> pairs;
  std::string source_lang;
  std::string target_lang;
  std::string name;

  std::size_t size() const { return pairs.size(); }
  bool empty() const { return pairs.empty(); }

  bool operator==(const ParallelCorpus&) const = default;
};

struct SplitSpec {
  std::size_t valid_count = 0;
  std::size_t test_count = 0;
  std::uint64_t seed = 0;
};

struct SplitResult {
  ParallelCorpus train;
  ParallelCorpus valid;
  ParallelCorpus test;
};

namespace detail {

inline std::string location(std::string_view path, std::size_t line_no) {
  std::string s(path);
  s += ":";
  s += std::to_string(line_no);
  return s;
}

// Input must be UTF-8 and free of line-break characters; broken bytes are an
// error rather than being normalized away (silent mutation corrupts
// alignment). \n cannot occur in a line, so the scan checks \r, U+0085,
// U+2028 and U+2029.
inline void validate_segment(std::string_view line, std::string_view path,
                             std::size_t line_no) {
  std::size_t i = 0;
  const std::size_t n = line.size();
  while (i < n) {
    const unsigned char b = static_cast<unsigned char>(line[i]);
    if (b < 0x80) {
      if (b == '\r' || b == '\n')
        throw DataError(location(path, line_no) + ": line-break character inside segment");
      ++i;
      continue;
    }
    char32_t cp;
    const std::size_t len = utf8_decode(line, i, &cp);
    if (len == 0) throw DataError(location(path, line_no) + ": invalid UTF-8");
    if (cp == 0x85 || cp == 0x2028 || cp == 0x2029)
      throw DataError(location(path, line_no) + ": line-break character inside segment");
    i += len;
  }
}

inline double parse_score(std::string_view field, std::string_view path,
                          std::size_t line_no) {
  double value = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last)
    throw DataError(location(path, line_no) + ": unparsable score '" + std::string(field) +
                    "'");
  if (!(value >= 0.0 && value <= 1.0))
    throw DataError(location(path, line_no) + ": score out of range [0,1]: " +
                    std::string(field));
  return value;
}

inline void append_score(std::string& out, double score) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), score);
  out.append(buf, ptr);
}

}  // namespace detail

// Reads a whole file as lines. CR-LF endings are accepted and stripped; a
// missing final newline is accepted. Every line is validated as a UTF-8
// segment.
inline std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::vector<std::string> lines;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    detail::validate_segment(line, path, line_no);
    lines.push_back(std::move(line));
  }
  if (in.bad()) throw IoError("read failure on " + path);
  return lines;
}

inline void write_lines(const std::string& path, const std::vector<std::string>& lines) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  std::string buf;
  buf.reserve(1 << 20);
  for (const auto& line : lines) {
    buf += line;
    buf += '\n';
    if (buf.size() > (1 << 20) - (1 << 12)) {
      out.write(buf.data(), std::streamsize(buf.size()));
      buf.clear();
    }
  }
  out.write(buf.data(), std::streamsize(buf.size()));
  if (!out) throw IoError("write failure on " + path);
}

// Pairs line i of the source file with line i of the target file. A score
// file, when given, must have the same line count with one score per line.
inline ParallelCorpus read_parallel(const std::string& source_path,
                                    const std::string& target_path,
                                    const std::optional<std::string>& score_path = {},
                                    std::string source_lang = {},
                                    std::string target_lang = {}) {
  ParallelCorpus corpus;
  corpus.source_lang = std::move(source_lang);
  corpus.target_lang = std::move(target_lang);

  std::vector<std::string> src = read_lines(source_path);
  std::vector<std::string> tgt = read_lines(target_path);
  if (src.size() != tgt.size())
    throw DataError("line-count mismatch " + std::to_string(src.size()) + " vs " +
                    std::to_string(tgt.size()) + " (" + source_path + ", " + target_path +
                    ")");

  std::vector<double> scores;
  if (score_path) {
    std::vector<std::string> raw = read_lines(*score_path);
    if (raw.size() != src.size())
      throw DataError("line-count mismatch " + std::to_string(src.size()) + " vs " +
                      std::to_string(raw.size()) + " (" + source_path + ", " + *score_path +
                      ")");
    scores.reserve(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i)
      scores.push_back(detail::parse_score(raw[i], *score_path, i + 1));
  }

  corpus.pairs.resize(src.size());
  for (std::size_t i = 0; i < src.size(); ++i) {
    corpus.pairs[i].source = std::move(src[i]);
    corpus.pairs[i].target = std::move(tgt[i]);
    if (score_path) corpus.pairs[i].score = scores[i];
  }
  return corpus;
}

// Tab-separated source/target (plus optional third score column) per line.
inline ParallelCorpus read_tsv(const std::string& path, bool has_score = false) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  ParallelCorpus corpus;
  const std::size_t expected = has_score ? 3 : 2;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<std::string_view> fields;
    std::string_view rest(line);
    for (;;) {
      const std::size_t tab = rest.find('\t');
      if (tab == std::string_view::npos) {
        fields.push_back(rest);
        break;
      }
      fields.push_back(rest.substr(0, tab));
      rest.remove_prefix(tab + 1);
    }
    if (fields.size() != expected)
      throw DataError(path + ": expected " + std::to_string(expected) + " fields, got " +
                      std::to_string(fields.size()) + ", line " + std::to_string(line_no));
    SentencePair pair;
    detail::validate_segment(fields[0], path, line_no);
    detail::validate_segment(fields[1], path, line_no);
    pair.source = std::string(fields[0]);
    pair.target = std::string(fields[1]);
    if (has_score) pair.score = detail::parse_score(fields[2], path, line_no);
    corpus.pairs.push_back(std::move(pair));
  }
  if (in.bad()) throw IoError("read failure on " + path);
  return corpus;
}

// Inverse of read_parallel: one segment per line, LF endings, exactly one
// trailing newline when nonempty. Scores are dropped unless score_path is
// given. An empty corpus yields zero-length files.
inline void write_parallel(const ParallelCorpus& corpus, const std::string& source_path,
                           const std::string& target_path,
                           const std::optional<std::string>& score_path = {}) {
  for (const auto& pair : corpus.pairs) {
    if (pair.source.find_first_of("\r\n") != std::string::npos ||
        pair.target.find_first_of("\r\n") != std::string::npos)
      throw DataError("segment contains a line-break character; refusing to write");
  }
  std::ofstream src(source_path, std::ios::binary);
  if (!src) throw IoError("cannot open " + source_path + " for writing");
  std::ofstream tgt(target_path, std::ios::binary);
  if (!tgt) throw IoError("cannot open " + target_path + " for writing");
  std::optional<std::ofstream> sco;
  if (score_path) {
    sco.emplace(*score_path, std::ios::binary);
    if (!*sco) throw IoError("cannot open " + *score_path + " for writing");
  }

  std::string sbuf, tbuf, cbuf;
  for (const auto& pair : corpus.pairs) {
    sbuf += pair.source;
    sbuf += '\n';
    tbuf += pair.target;
    tbuf += '\n';
    if (sco) {
      if (pair.score) detail::append_score(cbuf, *pair.score);
      cbuf += '\n';
    }
    if (sbuf.size() > (1 << 20)) {
      src.write(sbuf.data(), std::streamsize(sbuf.size()));
      sbuf.clear();
    }
    if (tbuf.size() > (1 << 20)) {
      tgt.write(tbuf.data(), std::streamsize(tbuf.size()));
      tbuf.clear();
    }
  }
  src.write(sbuf.data(), std::streamsize(sbuf.size()));
  tgt.write(tbuf.data(), std::streamsize(tbuf.size()));
  if (sco) sco->write(cbuf.data(), std::streamsize(cbuf.size()));
  if (!src || !tgt || (sco && !*sco)) throw IoError("write failure");
}

// Concatenation in list order. Corpora must agree on language tags; an empty
// tag is treated as unknown and is compatible with anything.
inline ParallelCorpus concat_corpora(const std::vector<ParallelCorpus>& corpora) {
  ParallelCorpus out;
  std::size_t total = 0;
  for (const auto& c : corpora) total += c.size();
  out.pairs.reserve(total);
  for (const auto& c : corpora) {
    if (!c.source_lang.empty()) {
      if (out.source_lang.empty())
        out.source_lang = c.source_lang;
      else if (out.source_lang != c.source_lang)
        throw std::invalid_argument("language-tag mismatch: source '" + out.source_lang +
                                    "' vs '" + c.source_lang + "'");
    }
    if (!c.target_lang.empty()) {
      if (out.target_lang.empty())
        out.target_lang = c.target_lang;
      else if (out.target_lang != c.target_lang)
        throw std::invalid_argument("language-tag mismatch: target '" + out.target_lang +
                                    "' vs '" + c.target_lang + "'");
    }
    out.pairs.insert(out.pairs.end(), c.pairs.begin(), c.pairs.end());
  }
  return out;
}

// Draws a seeded permutation of pair indices: the first test_count indices
// select the test set, the next valid_count the validation set, the rest the
// training set. Each output keeps its pairs in original corpus order, so the
// three parts exactly partition the input and valid=test=0 returns the input
// unchanged.
inline SplitResult split_corpus(const ParallelCorpus& corpus, const SplitSpec& spec) {
  const std::size_t n = corpus.size();
  if (spec.valid_count + spec.test_count > n)
    throw std::invalid_argument(
        "valid_count + test_count > corpus size (" + std::to_string(spec.valid_count) +
        " + " + std::to_string(spec.test_count) + " > " + std::to_string(n) + ")");

  enum : unsigned char { kTrain = 0, kValid = 1, kTest = 2 };
  std::vector<unsigned char> part(n, kTrain);
  const std::vector<std::uint64_t> perm = shuffled_indices(n, spec.seed);
  for (std::size_t i = 0; i < spec.test_count; ++i) part[perm[i]] = kTest;
  for (std::size_t i = 0; i < spec.valid_count; ++i) part[perm[spec.test_count + i]] = kValid;

  SplitResult result;
  for (ParallelCorpus* c : {&result.train, &result.valid, &result.test}) {
    c->source_lang = corpus.source_lang;
    c->target_lang = corpus.target_lang;
  }
  result.train.pairs.reserve(n - spec.valid_count - spec.test_count);
  result.valid.pairs.reserve(spec.valid_count);
  result.test.pairs.reserve(spec.test_count);
  for (std::size_t i = 0; i < n; ++i) {
    switch (part[i]) {
      case kValid: result.valid.pairs.push_back(corpus.pairs[i]); break;
      case kTest: result.test.pairs.push_back(corpus.pairs[i]); break;
      default: result.train.pairs.push_back(corpus.pairs[i]); break;
    }
  }
  return result;
}

}  // namespace mtprep
