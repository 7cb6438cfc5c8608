// Acceptance suite: one test case per criterion, each printing a PASS/FAIL
// line. Timed criteria measure wall-clock time on a single worker.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <chrono>
#include <cmath>
#include <random>

#include "mtprep/mtprep.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace mtprep;

namespace {

// Accumulates a criterion verdict while still reporting each sub-check.
#define ACCEPT(cond)            \
  do {                          \
    const bool accept_c = (cond); \
    CHECK(accept_c);            \
    ok = ok && accept_c;        \
  } while (0)

void verdict(bool ok, const char* name) {
  std::printf("[%s] %s\n", ok ? "PASS" : "FAIL", name);
  std::fflush(stdout);
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::vector<std::string> random_token_lines(std::mt19937_64& gen, std::size_t max_lines,
                                            std::size_t max_tokens, int vocab) {
  std::vector<std::string> lines(1 + gen() % max_lines);
  for (auto& line : lines) {
    const std::size_t n = 1 + gen() % max_tokens;
    for (std::size_t i = 0; i < n; ++i) {
      if (i) line += ' ';
      line += "w" + std::to_string(gen() % std::uint64_t(vocab));
    }
  }
  return lines;
}

// Unicode sampler spanning ASCII, Latin-1, kana, Han and astral planes. The
// word-boundary marker is reserved by the piece format and excluded.
char32_t random_codepoint(std::mt19937_64& gen) {
  switch (gen() % 8) {
    case 0: return char32_t('a' + gen() % 26);
    case 1: return char32_t(0x00A1 + gen() % 0xFF);
    case 2: return char32_t(0x3041 + gen() % 0x5E);   // hiragana
    case 3: return char32_t(0x4E00 + gen() % 0x100);  // Han
    case 4: return char32_t(0x1F300 + gen() % 0x200); // emoji blocks (astral)
    case 5: return char32_t(0x20000 + gen() % 0x100); // CJK extension B (astral)
    case 6: return char32_t('0' + gen() % 10);
    default: {
      const char32_t c = char32_t(0x20 + gen() % 0x5F);
      return c == 0x2581 ? U'x' : c;
    }
  }
}

std::string random_unicode_string(std::mt19937_64& gen, std::size_t max_len) {
  std::string out;
  const std::size_t n = gen() % (max_len + 1);
  for (std::size_t i = 0; i < n; ++i) {
    if (gen() % 6 == 0) out += ' ';
    char32_t c = random_codepoint(gen);
    if (c == kMarkerCp) c = U'y';
    utf8_append(out, c);
  }
  return out;
}

std::string normalize_ws(const std::string& text) {
  std::string out;
  for (const auto& token : ws_tokens(text)) {
    if (!out.empty()) out += ' ';
    out += token;
  }
  return out;
}

ParallelCorpus random_dirty_corpus(std::uint64_t seed, std::size_t n) {
  std::mt19937_64 gen(seed);
  const std::vector<std::string> words = {"a", "bb", "ccc", "猫", "", " ",
                                          "hello", "world", "123", "x"};
  ParallelCorpus corpus;
  for (std::size_t i = 0; i < n; ++i) {
    SentencePair pair;
    const auto side = [&](std::string& out) {
      const std::size_t len = gen() % 10;
      for (std::size_t k = 0; k < len; ++k) {
        if (k) out += ' ';
        out += words[gen() % words.size()];
      }
    };
    side(pair.source);
    side(pair.target);
    if (gen() % 4 == 0) pair.target = pair.source;
    if (gen() % 5 == 0 && !corpus.pairs.empty())
      pair = corpus.pairs[gen() % corpus.pairs.size()];
    if (gen() % 3 == 0) pair.score = double(gen() % 100) / 100.0;
    corpus.pairs.push_back(std::move(pair));
  }
  return corpus;
}

}  // namespace

TEST_CASE("bleu oracle equivalence") {
  bool ok = true;
  const auto start = std::chrono::steady_clock::now();
  std::mt19937_64 gen(1001);
  const MetricScheme scheme{BleuScheme::none, {}};
  for (int iter = 0; iter < 200; ++iter) {
    const auto refs = random_token_lines(gen, 50, 20, 8);
    std::vector<std::string> hyps;
    for (const auto& ref : refs) {
      if (gen() % 3 == 0) {
        hyps.push_back(ref);
        continue;
      }
      auto tokens = oracle::space_tokens(ref);
      std::string line;
      for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (gen() % 5 == 0) continue;  // deletions
        if (!line.empty()) line += ' ';
        line += (gen() % 4 == 0) ? "w99" : tokens[i];  // substitutions
      }
      hyps.push_back(line.empty() ? "w0" : line);
    }
    const auto report = corpus_bleu(hyps, refs, scheme);
    const auto expected = oracle::bleu(hyps, refs);
    if (expected.score == 0.0)
      ACCEPT(report.score == 0.0);
    else
      ACCEPT(std::abs(report.score - expected.score) <= 1e-9 * expected.score);
  }
  const double elapsed = seconds_since(start);
  ACCEPT(elapsed < 10.0);
  verdict(ok, "BLEU oracle equivalence (200 corpora, <10 s)");
}

TEST_CASE("bleu fixed points") {
  bool ok = true;
  std::mt19937_64 gen(1002);
  const MetricScheme scheme{BleuScheme::none, {}};
  for (int iter = 0; iter < 50; ++iter) {
    const auto lines = random_token_lines(gen, 30, 15, 10);
    const auto report = corpus_bleu(lines, lines, scheme);
    ACCEPT(report.score == 100.0);
    ACCEPT(report.brevity_penalty == 1.0);
  }
  const auto hand = corpus_bleu({"the cat sat on the mat"}, {"the cat is on the mat"},
                                scheme);
  ACCEPT(hand.score == 0.0);
  ACCEPT(hand.precisions[0] == 5.0 / 6.0);
  ACCEPT(hand.precisions[1] == 3.0 / 5.0);
  ACCEPT(hand.precisions[2] == 1.0 / 4.0);
  ACCEPT(hand.precisions[3] == 0.0);
  verdict(ok, "BLEU fixed points (score(h,h)=100, worked example = 0)");
}

TEST_CASE("brevity penalty closed form") {
  bool ok = true;
  ACCEPT(std::abs(brevity_penalty(3, 6) - std::exp(-1.0)) < 1e-12);
  std::mt19937_64 gen(1003);
  for (int iter = 0; iter < 100; ++iter) {
    const std::uint64_t r = gen() % 1000;
    const std::uint64_t c = r + gen() % 1000 + 1;  // c >= r, c > 0
    ACCEPT(brevity_penalty(c, r) == 1.0);
  }
  verdict(ok, "brevity penalty (BP(3,6)=e^-1 within 1e-12; BP=1 for c>=r)");
}

TEST_CASE("bpe learning oracle") {
  bool ok = true;
  const auto start = std::chrono::steady_clock::now();
  std::mt19937_64 gen(1004);
  int checked = 0;
  for (int iter = 0; iter < 50; ++iter) {
    // Alphabets of 2..8 letters; tiny alphabets force frequent count ties.
    const int alphabet = 2 + int(gen() % 7);
    std::string line;
    const int n_words = 1 + int(gen() % 30);
    for (int w = 0; w < n_words; ++w) {
      if (w) line += ' ';
      const int len = 1 + int(gen() % 6);
      for (int k = 0; k < len; ++k) line += char('a' + gen() % std::uint64_t(alphabet));
    }
    SubwordTrainConfig config;
    config.model_type = SubwordModelType::bpe;
    config.vocab_size = std::size_t(alphabet) + 2 + gen() % 12;
    BpeModel model;
    try {
      model = train_bpe({line}, config);
    } catch (const std::invalid_argument&) {
      continue;  // the random corpus did not contain enough distinct symbols
    }
    oracle::BpeSetup setup;
    setup.vocab_size = config.vocab_size;
    ACCEPT(model.merges == oracle::bpe_merges({line}, setup));
    ++checked;
  }
  ACCEPT(checked >= 40);
  const double elapsed = seconds_since(start);
  ACCEPT(elapsed < 30.0);
  verdict(ok, "BPE learning oracle (50 corpora incl. tie cases, <30 s)");
}

TEST_CASE("viterbi optimality") {
  bool ok = true;
  std::mt19937_64 gen(1005);
  for (int iter = 0; iter < 500; ++iter) {
    const int alphabet = 2 + int(gen() % 3);
    std::map<std::string, double> table;
    for (int c = 0; c < alphabet; ++c) table[std::string(1, char('a' + c))] = 0.0;
    const int extras = 1 + int(gen() % 6);
    for (int e = 0; e < extras; ++e) {
      std::string piece;
      const int len = 2 + int(gen() % 3);
      for (int k = 0; k < len; ++k) piece += char('a' + gen() % std::uint64_t(alphabet));
      table[piece] = 0.0;
    }
    double total = 0.0;
    for (auto& [piece, w] : table) {
      w = 0.05 + double(gen() % 1000) / 1000.0;
      total += w;
    }
    UnigramModel model;
    oracle::PieceTable oracle_table;
    for (auto& [piece, w] : table) {
      const double lp = std::log(w / total);
      model.pieces.emplace_back(piece, lp);
      oracle_table[piece] = lp;
    }
    std::string word;
    const std::size_t len = 1 + gen() % 12;
    for (std::size_t k = 0; k < len; ++k) word += char('a' + gen() % std::uint64_t(alphabet));
    ACCEPT(encode_unigram_viterbi(model, word) ==
           oracle::best_segmentation(oracle_table, word).pieces);
  }
  verdict(ok, "Viterbi optimality (500 instances vs exhaustive enumeration)");
}

TEST_CASE("em monotonicity") {
  bool ok = true;
  std::mt19937_64 gen(1006);
  for (int corpus_i = 0; corpus_i < 20; ++corpus_i) {
    const int alphabet = 2 + int(gen() % 2);
    std::string line;
    const int n_words = 2 + int(gen() % 5);
    for (int w = 0; w < n_words; ++w) {
      if (w) line += ' ';
      const std::size_t len = 1 + gen() % 5;  // at most 6 symbols with the marker
      for (std::size_t k = 0; k < len; ++k) line += char('a' + gen() % std::uint64_t(alphabet));
    }
    SubwordTrainConfig config;
    config.vocab_size = std::size_t(alphabet) + 4;
    config.em_iterations = 3;
    UnigramTrainDiag diag;
    train_unigram({line}, config, &diag);
    const WordFreq words = prepare_words({line});
    for (const auto& round : diag.rounds) {
      double prev = -HUGE_VAL;
      for (const auto& snapshot : round.snapshots) {
        oracle::PieceTable table;
        for (const auto& [piece, lp] : snapshot) table[piece] = lp;
        double ll = 0.0;
        for (const auto& [word, count] : words.items)
          ll += double(count) * oracle::word_loglik(table, word);
        ACCEPT(ll >= prev - 1e-9);
        prev = ll;
      }
    }
  }
  verdict(ok, "EM monotonicity (20 corpora, enumerated likelihood, 1e-9 slack)");
}

TEST_CASE("sampling correctness") {
  bool ok = true;
  UnigramModel model;
  model.pieces = {{"a", std::log(0.4)}, {"b", std::log(0.3)}, {"ab", std::log(0.3)}};
  const double exact =
      oracle::segmentation_probs({{"a", std::log(0.4)}, {"b", std::log(0.3)},
                                  {"ab", std::log(0.3)}},
                                 "ab", 1.0)
          .at({"ab"});
  ACCEPT(std::abs(exact - 0.3 / 0.42) < 1e-12);
  UnigramEncoder encoder(model);
  SeededRng rng(20260808);
  const int draws = 10000;
  int hits = 0;
  for (int i = 0; i < draws; ++i)
    if (encoder.sample("ab", 1.0, rng) == std::vector<std::string>{"ab"}) ++hits;
  const double se = std::sqrt(exact * (1.0 - exact) / draws);
  ACCEPT(std::abs(double(hits) / draws - exact) <= 3.0 * se);
  verdict(ok, "sampling correctness (10,000 draws within 3 SE of exact 0.714)");
}

TEST_CASE("lossless byte-fallback roundtrip") {
  bool ok = true;
  SubwordTrainConfig config;
  config.vocab_size = 300;
  config.byte_fallback = true;
  const auto unigram = train_unigram({"hello world example text"}, config);
  config.model_type = SubwordModelType::bpe;
  const auto bpe = train_bpe({"hello world example text"}, config);
  UnigramEncoder uni_encoder(unigram);
  BpeEncoder bpe_encoder(bpe);
  const auto uni_vocab = Vocabulary::from(unigram);
  const auto bpe_vocab = Vocabulary::from(bpe);

  std::mt19937_64 gen(1008);
  std::uint64_t pieces_total = 0, pieces_oov = 0;
  for (int iter = 0; iter < 10000; ++iter) {
    const std::string text = random_unicode_string(gen, 24);
    const std::string expected = normalize_ws(text);
    const auto uni_pieces = uni_encoder.encode_text(text);
    if (decode_pieces(uni_pieces) != expected) {
      CAPTURE(text);
      ACCEPT(false);
      break;
    }
    for (const auto& piece : uni_pieces) {
      ++pieces_total;
      if (!uni_vocab.contains(piece)) ++pieces_oov;
    }
    if (iter % 5 == 0) {
      const auto bpe_pieces = bpe_encoder.encode_text(text);
      if (decode_pieces(bpe_pieces) != expected) {
        CAPTURE(text);
        ACCEPT(false);
        break;
      }
      for (const auto& piece : bpe_pieces) {
        ++pieces_total;
        if (!bpe_vocab.contains(piece)) ++pieces_oov;
      }
    }
  }
  ACCEPT(pieces_total > 0);
  ACCEPT(pieces_oov == 0);  // byte fallback leaves nothing out of vocabulary
  verdict(ok, "lossless roundtrip (10,000 random Unicode strings, piece OOV = 0)");
}

TEST_CASE("bpe dropout limits") {
  bool ok = true;
  std::mt19937_64 gen(1009);
  SubwordTrainConfig config;
  config.model_type = SubwordModelType::bpe;
  config.vocab_size = 24;
  const auto model =
      train_bpe({"abab baba abb bba abab abab bb aa", "ababab bababa abba baab"}, config);
  BpeEncoder encoder(model);
  for (int iter = 0; iter < 1000; ++iter) {
    std::string text;
    const std::size_t words = 1 + gen() % 4;
    for (std::size_t w = 0; w < words; ++w) {
      if (w) text += ' ';
      const std::size_t len = 1 + gen() % 8;
      for (std::size_t k = 0; k < len; ++k) text += char('a' + gen() % 2);
    }
    SeededRng rng_a(iter), rng_b(iter + 7919);
    const auto deterministic = encoder.encode_text(text);
    ACCEPT(encoder.encode_text(text, 0.0, &rng_a) == deterministic);

    std::vector<std::string> base;
    for (const auto& token : ws_tokens(text)) {
      base.push_back(model.marker);
      for (const char c : token) base.push_back(std::string(1, c));
    }
    ACCEPT(encoder.encode_text(text, 1.0, &rng_b) == base);
  }
  verdict(ok, "BPE-dropout limits (p=0 deterministic, p=1 base, 1,000 inputs)");
}

TEST_CASE("cleaning pipeline acceptance") {
  bool ok = true;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto corpus = random_dirty_corpus(seed, 120);
    FilterConfig config;
    config.max_length = 12;
    config.max_ratio = 4.0;
    if (seed % 2) config.score_threshold = 0.4;
    const auto [once, ledger] = run_pipeline(corpus, config);
    std::size_t prev = ledger.initial_rows;
    for (const auto& [name, rows] : ledger.stages) {
      ACCEPT(rows <= prev);
      prev = rows;
    }
    const auto [twice, ledger2] = run_pipeline(once, config);
    ACCEPT(twice == once);

    // Every rendered stage line byte-matches the documented pattern.
    const std::string rendered = render_ledger(ledger);
    std::size_t pos = rendered.find('\n') + 1;  // skip the header line
    while (pos < rendered.size()) {
      const std::size_t eol = rendered.find('\n', pos);
      const std::string line = rendered.substr(pos, eol - pos);
      bool line_ok = line.size() > 49 && line.substr(0, 4) == "--- " &&
                     line.substr(39, 10) == "--> Rows: ";
      if (line_ok)
        for (const char c : line.substr(49)) line_ok = line_ok && c >= '0' && c <= '9';
      ACCEPT(line_ok);
      pos = eol + 1;
    }
  }
  verdict(ok, "cleaning pipeline (idempotent, monotone ledger, exact format)");
}

TEST_CASE("split determinism and partition") {
  bool ok = true;
  std::mt19937_64 gen(1011);
  ParallelCorpus corpus;
  for (int i = 0; i < 20000; ++i)
    corpus.pairs.push_back({"src " + std::to_string(gen()), "tgt " + std::to_string(gen()),
                            {}});
  const SplitSpec spec{5000, 5000, 99};
  const auto a = split_corpus(corpus, spec);
  const auto b = split_corpus(corpus, spec);
  ACCEPT(a.train.size() == 10000);
  ACCEPT(a.valid.size() == 5000);
  ACCEPT(a.test.size() == 5000);
  ACCEPT(a.train.pairs == b.train.pairs);
  ACCEPT(a.valid.pairs == b.valid.pairs);
  ACCEPT(a.test.pairs == b.test.pairs);

  auto sorted = [](std::vector<SentencePair> pairs) {
    std::sort(pairs.begin(), pairs.end(), [](const SentencePair& x, const SentencePair& y) {
      if (x.source != y.source) return x.source < y.source;
      return x.target < y.target;
    });
    return pairs;
  };
  std::vector<SentencePair> all;
  for (const auto* part : {&a.train, &a.valid, &a.test})
    all.insert(all.end(), part->pairs.begin(), part->pairs.end());
  ACCEPT(sorted(all) == sorted(corpus.pairs));
  verdict(ok, "split determinism and partition (20,000 pairs -> 10k/5k/5k)");
}

TEST_CASE("throughput floor") {
  bool ok = true;
  // Benchmark harness: 1,000,000 synthetic pairs through clean + split.
  std::mt19937_64 gen(1012);
  const std::vector<std::string> words = {"alpha", "beta", "gamma", "delta", "epsilon",
                                          "zeta",  "eta",  "theta", "iota",  "kappa"};
  ParallelCorpus corpus;
  corpus.pairs.reserve(1000000);
  for (int i = 0; i < 1000000; ++i) {
    SentencePair pair;
    const std::size_t len = 3 + gen() % 10;
    for (std::size_t k = 0; k < len; ++k) {
      if (k) {
        pair.source += ' ';
        pair.target += ' ';
      }
      pair.source += words[gen() % words.size()];
      pair.target += words[gen() % words.size()];
    }
    if (i % 17 == 0) pair.target = pair.source;
    if (i % 13 == 0 && i > 0) pair = corpus.pairs[gen() % corpus.pairs.size()];
    corpus.pairs.push_back(std::move(pair));
  }

  const auto start = std::chrono::steady_clock::now();
  FilterConfig config;
  auto [cleaned, ledger] = run_pipeline(std::move(corpus), config);
  const auto split = split_corpus(cleaned, {5000, 5000, 7});
  const double elapsed = seconds_since(start);
  ACCEPT(split.train.size() + 10000 == cleaned.size());
  ACCEPT(elapsed < 120.0);
  std::printf("  clean+split of 1,000,000 pairs: %.2f s\n", elapsed);

  // BPE encoding throughput on short sentences, single worker.
  std::vector<std::string> train_lines;
  for (int i = 0; i < 2000; ++i) {
    std::string line;
    for (int w = 0; w < 8; ++w) {
      if (w) line += ' ';
      line += words[gen() % words.size()] + std::to_string(gen() % 50);
    }
    train_lines.push_back(std::move(line));
  }
  SubwordTrainConfig train_config;
  train_config.model_type = SubwordModelType::bpe;
  train_config.vocab_size = 400;
  const auto model = train_bpe(train_lines, train_config);
  BpeEncoder encoder(model);
  std::vector<std::string> bench_lines;
  for (int i = 0; i < 30000; ++i) {
    std::string line;
    for (int w = 0; w < 7; ++w) {
      if (w) line += ' ';
      line += words[gen() % words.size()] + std::to_string(gen() % 220);
    }
    bench_lines.push_back(std::move(line));
  }
  const auto enc_start = std::chrono::steady_clock::now();
  std::size_t piece_count = 0;
  for (const auto& line : bench_lines) piece_count += encoder.encode_text(line).size();
  const double enc_elapsed = seconds_since(enc_start);
  const double rate = double(bench_lines.size()) / enc_elapsed;
  ACCEPT(piece_count > 0);
  ACCEPT(rate >= 10000.0);
  std::printf("  BPE encoding: %.0f sentences/s (%zu pieces)\n", rate, piece_count);
  verdict(ok, "throughput floor (clean+split 1M < 120 s; BPE encode >= 10k sent/s)");
}

TEST_CASE("evaluation signature guard via the CLI diff mode") {
  bool ok = true;
  testutil::TempDir dir;
  testutil::write_file(dir.path("hyp"), "a b c d\n");
  testutil::write_file(dir.path("ref"), "a b c d\n");
  const std::string cli = MTPREP_CLI_PATH;
  auto r1 = testutil::run_command(cli + " bleu --hyp " + dir.path("hyp") + " --ref " +
                                  dir.path("ref") + " --scheme 13a --report " +
                                  dir.path("a.json"));
  auto r2 = testutil::run_command(cli + " bleu --hyp " + dir.path("hyp") + " --ref " +
                                  dir.path("ref") + " --scheme ja-char --report " +
                                  dir.path("b.json"));
  ACCEPT(r1.exit_code == 0);
  ACCEPT(r2.exit_code == 0);
  const auto diff = testutil::run_command(cli + " bleu --diff " + dir.path("a.json") + " " +
                                          dir.path("b.json"));
  ACCEPT(diff.exit_code == 3);  // nonzero informational status
  ACCEPT(diff.output.find("not comparable") != std::string::npos);
  const auto same = testutil::run_command(cli + " bleu --diff " + dir.path("a.json") + " " +
                                          dir.path("a.json"));
  ACCEPT(same.exit_code == 0);
  verdict(ok, "evaluation-signature guard (diff warns and returns status 3)");
}
