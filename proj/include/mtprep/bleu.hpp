#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "mtprep/pretokenize.hpp"
#include "mtprep/version.hpp"

namespace mtprep {

// Metric-internal tokenization applied to detokenized text before n-gram
// counting. ja_char is a declared character-level stand-in for morphological
// tokenization; its signature says so, so scores are never mistaken for
// mecab-tokenized ones.
enum class BleuScheme { intl13a, chr, ja_char, none };

inline const char* scheme_name(BleuScheme scheme) {
  switch (scheme) {
    case BleuScheme::intl13a: return "13a";
    case BleuScheme::chr: return "char";
    case BleuScheme::ja_char: return "ja-char";
    default: return "none";
  }
}

struct Smoothing {
  enum class Kind { none, floor };
  Kind kind = Kind::none;
  double epsilon = 0.1;  // replaces a zero match count when kind == floor
};

struct MetricScheme {
  BleuScheme scheme = BleuScheme::intl13a;
  Smoothing smoothing;
};

struct BleuReport {
  double score = 0.0;                  // 0..100, never rounded in storage
  std::array<double, 4> precisions{};  // p1..p4 as stored (smoothed) values
  double brevity_penalty = 1.0;
  std::uint64_t hyp_len = 0;  // c: total hypothesis tokens
  std::uint64_t ref_len = 0;  // r: total reference tokens
  std::string signature;
};

inline std::vector<std::string> metric_tokenize(std::string_view text, BleuScheme scheme) {
  switch (scheme) {
    case BleuScheme::intl13a:
      return pretokenize(text, {PretokKind::intl13a, {}});
    case BleuScheme::chr:
    case BleuScheme::ja_char:
      return pretokenize(text, {PretokKind::character, {}});
    default:
      return ws_tokens(text);
  }
}

// All contiguous n-grams with multiplicities; empty when the token list is
// shorter than n.
inline std::map<std::vector<std::string>, std::size_t> ngram_counts(
    const std::vector<std::string>& tokens, std::size_t n) {
  if (n < 1 || n > 4) throw std::invalid_argument("n-gram order must be in 1..4");
  std::map<std::vector<std::string>, std::size_t> counts;
  if (tokens.size() < n) return counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i)
    ++counts[std::vector<std::string>(tokens.begin() + i, tokens.begin() + i + n)];
  return counts;
}

namespace bleu_detail {

// N-grams are keyed as packed interned token ids, exact and allocation-light.
struct Interner {
  std::unordered_map<std::string, std::uint32_t> ids;
  std::uint32_t get(const std::string& token) {
    return ids.emplace(token, std::uint32_t(ids.size())).first->second;
  }
};

inline void count_ngrams(const std::vector<std::uint32_t>& ids, std::size_t n,
                         std::unordered_map<std::string, std::uint64_t>& out) {
  out.clear();
  if (ids.size() < n) return;
  std::string key(n * 4, '\0');
  for (std::size_t i = 0; i + n <= ids.size(); ++i) {
    for (std::size_t k = 0; k < n; ++k)
      std::memcpy(key.data() + 4 * k, &ids[i + k], 4);
    ++out[key];
  }
}

}  // namespace bleu_detail

// Corpus-aggregated clipped n-gram matches: each hypothesis n-gram count is
// clipped to the reference's count for that sentence, sums taken over the
// corpus before any division.
inline std::pair<std::uint64_t, std::uint64_t> modified_precision(
    const std::vector<std::vector<std::string>>& hyp_tokens,
    const std::vector<std::vector<std::string>>& ref_tokens, std::size_t n) {
  if (hyp_tokens.size() != ref_tokens.size())
    throw std::invalid_argument("hypothesis/reference sentence counts differ: " +
                                std::to_string(hyp_tokens.size()) + " vs " +
                                std::to_string(ref_tokens.size()));
  bleu_detail::Interner interner;
  std::uint64_t matched = 0, total = 0;
  std::unordered_map<std::string, std::uint64_t> h, r;
  for (std::size_t s = 0; s < hyp_tokens.size(); ++s) {
    std::vector<std::uint32_t> hid, rid;
    for (const auto& t : hyp_tokens[s]) hid.push_back(interner.get(t));
    for (const auto& t : ref_tokens[s]) rid.push_back(interner.get(t));
    bleu_detail::count_ngrams(hid, n, h);
    bleu_detail::count_ngrams(rid, n, r);
    for (const auto& [key, count] : h) {
      const auto it = r.find(key);
      if (it != r.end()) matched += std::min(count, it->second);
    }
    if (hid.size() >= n) total += hid.size() - n + 1;
  }
  return {matched, total};
}

// BP = min(1, exp(1 - r/c)); an empty hypothesis stream (c = 0) is defined
// as BP = 0.
inline double brevity_penalty(std::uint64_t c, std::uint64_t r) {
  if (c == 0) return 0.0;
  if (c >= r) return 1.0;
  return std::exp(1.0 - double(r) / double(c));
}

inline std::string make_signature(const MetricScheme& scheme) {
  std::string sig = "mtprep-bleu:v";
  sig += kVersion;
  sig += "|tok:";
  sig += scheme_name(scheme.scheme);
  sig += "|smooth:";
  if (scheme.smoothing.kind == Smoothing::Kind::floor) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "floor(%g)", scheme.smoothing.epsilon);
    sig += buf;
  } else {
    sig += "none";
  }
  sig += "|order:4|refs:1";
  return sig;
}

// Corpus BLEU over detokenized plain-text lines, single reference. Orders
// with no n-grams at all (every sentence shorter than n) count as exact,
// which keeps score(h,h) == 100 for arbitrarily short corpora.
inline BleuReport corpus_bleu(const std::vector<std::string>& hyp_lines,
                              const std::vector<std::string>& ref_lines,
                              const MetricScheme& scheme) {
  if (hyp_lines.size() != ref_lines.size())
    throw std::invalid_argument("line-count mismatch " + std::to_string(hyp_lines.size()) +
                                " vs " + std::to_string(ref_lines.size()));
  if (hyp_lines.empty()) throw std::invalid_argument("empty corpus");
  if (scheme.smoothing.kind == Smoothing::Kind::floor && !(scheme.smoothing.epsilon > 0.0))
    throw std::invalid_argument("floor smoothing epsilon must be > 0");

  bleu_detail::Interner interner;
  std::array<std::uint64_t, 4> matched{}, total{};
  std::uint64_t c = 0, r = 0;
  std::unordered_map<std::string, std::uint64_t> h, g;
  for (std::size_t s = 0; s < hyp_lines.size(); ++s) {
    std::vector<std::uint32_t> hid, rid;
    for (const auto& t : metric_tokenize(hyp_lines[s], scheme.scheme))
      hid.push_back(interner.get(t));
    for (const auto& t : metric_tokenize(ref_lines[s], scheme.scheme))
      rid.push_back(interner.get(t));
    c += hid.size();
    r += rid.size();
    for (std::size_t n = 1; n <= 4; ++n) {
      bleu_detail::count_ngrams(hid, n, h);
      bleu_detail::count_ngrams(rid, n, g);
      for (const auto& [key, count] : h) {
        const auto it = g.find(key);
        if (it != g.end()) matched[n - 1] += std::min(count, it->second);
      }
      if (hid.size() >= n) total[n - 1] += hid.size() - n + 1;
    }
  }

  BleuReport report;
  report.hyp_len = c;
  report.ref_len = r;
  report.brevity_penalty = brevity_penalty(c, r);
  report.signature = make_signature(scheme);

  bool zero = false;
  for (std::size_t n = 0; n < 4; ++n) {
    if (total[n] == 0) {
      report.precisions[n] = 1.0;  // vacuous order
    } else if (matched[n] == 0) {
      if (scheme.smoothing.kind == Smoothing::Kind::floor) {
        report.precisions[n] = scheme.smoothing.epsilon / double(total[n]);
      } else {
        report.precisions[n] = 0.0;
        zero = true;
      }
    } else {
      report.precisions[n] = double(matched[n]) / double(total[n]);
    }
  }
  if (zero || c == 0) {
    report.score = 0.0;
  } else {
    double log_sum = 0.0;
    for (const double p : report.precisions) log_sum += std::log(p);
    report.score = 100.0 * report.brevity_penalty * std::exp(log_sum / 4.0);
  }
  return report;
}

// corpus_bleu restricted to one line; floor smoothing is the sensible choice
// here and is recorded in the signature like any other.
inline BleuReport sentence_bleu(std::string_view hyp, std::string_view ref,
                                const MetricScheme& scheme) {
  return corpus_bleu({std::string(hyp)}, {std::string(ref)}, scheme);
}

// Line format:
//   BLEU = <score> <p1>/<p2>/<p3>/<p4> (BP = <bp>, ratio = <c/r>,
//   hyp_len = <c>, ref_len = <r>) sig:<signature>
// score and the percent precisions carry one decimal, BP and ratio three;
// stored report values are never rounded.
inline std::string render_report(const BleuReport& report) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), "BLEU = %.1f %.1f/%.1f/%.1f/%.1f (BP = %.3f, ratio = ",
                report.score, 100.0 * report.precisions[0], 100.0 * report.precisions[1],
                100.0 * report.precisions[2], 100.0 * report.precisions[3],
                report.brevity_penalty);
  std::string out = buf;
  if (report.ref_len == 0) {
    out += "inf";
  } else {
    std::snprintf(buf, sizeof(buf), "%.3f", double(report.hyp_len) / double(report.ref_len));
    out += buf;
  }
  std::snprintf(buf, sizeof(buf), ", hyp_len = %llu, ref_len = %llu) sig:",
                static_cast<unsigned long long>(report.hyp_len),
                static_cast<unsigned long long>(report.ref_len));
  out += buf;
  out += report.signature;
  return out;
}

}  // namespace mtprep
