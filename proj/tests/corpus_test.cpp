#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>

#include "mtprep/corpus.hpp"
#include "test_util.hpp"

using namespace mtprep;
using testutil::TempDir;
using testutil::read_file;
using testutil::write_file;

namespace {

std::vector<SentencePair> sorted_pairs(const ParallelCorpus& c) {
  auto pairs = c.pairs;
  std::sort(pairs.begin(), pairs.end(), [](const SentencePair& a, const SentencePair& b) {
    if (a.source != b.source) return a.source < b.source;
    return a.target < b.target;
  });
  return pairs;
}

ParallelCorpus random_corpus(std::size_t n, std::uint64_t seed, bool with_scores = false) {
  std::mt19937_64 gen(seed);
  const std::vector<std::string> atoms = {"a",  "b",   "cat", "dog", "猫", "犬",
                                          "Z9", "é",   "--",  "x",   "'", "\t",
                                          "好", "ök", "3.5", "%"};
  ParallelCorpus corpus;
  for (std::size_t i = 0; i < n; ++i) {
    SentencePair pair;
    const auto make = [&](std::string& out) {
      const std::size_t len = gen() % 8;
      for (std::size_t k = 0; k < len; ++k) {
        if (k) out += (gen() % 3 == 0) ? "" : " ";
        out += atoms[gen() % atoms.size()];
      }
    };
    make(pair.source);
    make(pair.target);
    if (with_scores) pair.score = double(gen() % 1000) / 1000.0;
    corpus.pairs.push_back(std::move(pair));
  }
  return corpus;
}

}  // namespace

TEST_CASE("read_parallel aligns files positionally") {
  TempDir dir;
  write_file(dir.path("src"), "a\nb\n");
  write_file(dir.path("tgt"), "x\ny\n");
  const auto corpus = read_parallel(dir.path("src"), dir.path("tgt"));
  REQUIRE(corpus.size() == 2);
  CHECK(corpus.pairs[0] == SentencePair{"a", "x", {}});
  CHECK(corpus.pairs[1] == SentencePair{"b", "y", {}});
}

TEST_CASE("read_parallel reports line-count mismatch with both counts") {
  TempDir dir;
  write_file(dir.path("src"), "a\nb\nc\n");
  write_file(dir.path("tgt"), "x\ny\n");
  CHECK_THROWS_WITH_AS(read_parallel(dir.path("src"), dir.path("tgt")),
                       doctest::Contains("line-count mismatch 3 vs 2"), DataError);
}

TEST_CASE("read_parallel parses scores") {
  TempDir dir;
  write_file(dir.path("src"), "a\n");
  write_file(dir.path("tgt"), "x\n");
  write_file(dir.path("scores"), "0.71\n");
  const auto corpus = read_parallel(dir.path("src"), dir.path("tgt"), dir.path("scores"));
  REQUIRE(corpus.size() == 1);
  CHECK(corpus.pairs[0].score == 0.71);
}

TEST_CASE("read_parallel rejects bad scores") {
  TempDir dir;
  write_file(dir.path("src"), "a\n");
  write_file(dir.path("tgt"), "x\n");
  SUBCASE("unparsable") {
    write_file(dir.path("scores"), "zebra\n");
    CHECK_THROWS_AS(read_parallel(dir.path("src"), dir.path("tgt"), dir.path("scores")),
                    DataError);
  }
  SUBCASE("out of range") {
    write_file(dir.path("scores"), "1.5\n");
    CHECK_THROWS_WITH_AS(read_parallel(dir.path("src"), dir.path("tgt"), dir.path("scores")),
                         doctest::Contains("out of range"), DataError);
  }
}

TEST_CASE("read_parallel reports invalid UTF-8 with file and line") {
  TempDir dir;
  write_file(dir.path("src"), "ok\n\xFF\xFE\n");
  write_file(dir.path("tgt"), "x\ny\n");
  CHECK_THROWS_WITH_AS(read_parallel(dir.path("src"), dir.path("tgt")),
                       doctest::Contains(":2: invalid UTF-8"), DataError);
}

TEST_CASE("stray carriage return inside a segment is an error") {
  TempDir dir;
  write_file(dir.path("src"), "a\rb\n");
  write_file(dir.path("tgt"), "x\n");
  CHECK_THROWS_WITH_AS(read_parallel(dir.path("src"), dir.path("tgt")),
                       doctest::Contains("line-break character"), DataError);
}

TEST_CASE("CR-LF endings are stripped on read") {
  TempDir dir;
  write_file(dir.path("src"), "a\r\nb\r\n");
  write_file(dir.path("tgt"), "x\r\ny\r\n");
  const auto corpus = read_parallel(dir.path("src"), dir.path("tgt"));
  REQUIRE(corpus.size() == 2);
  CHECK(corpus.pairs[0].source == "a");
  CHECK(corpus.pairs[1].target == "y");
}

TEST_CASE("missing file raises IoError") {
  TempDir dir;
  CHECK_THROWS_AS(read_parallel(dir.path("nope"), dir.path("nope2")), IoError);
}

TEST_CASE("read_tsv basic forms") {
  TempDir dir;
  SUBCASE("two columns") {
    write_file(dir.path("t"), "a\tx\n");
    const auto corpus = read_tsv(dir.path("t"));
    REQUIRE(corpus.size() == 1);
    CHECK(corpus.pairs[0] == SentencePair{"a", "x", {}});
  }
  SUBCASE("three columns with score") {
    write_file(dir.path("t"), "a\tx\t0.5\n");
    const auto corpus = read_tsv(dir.path("t"), true);
    REQUIRE(corpus.size() == 1);
    CHECK(corpus.pairs[0].score == 0.5);
  }
  SUBCASE("wrong field count") {
    write_file(dir.path("t"), "a\n");
    CHECK_THROWS_WITH_AS(read_tsv(dir.path("t")),
                         doctest::Contains("expected 2 fields, got 1, line 1"), DataError);
  }
}

TEST_CASE("write_parallel emits one segment per line with trailing newline") {
  TempDir dir;
  ParallelCorpus corpus;
  corpus.pairs = {{"a", "x", {}}};
  write_parallel(corpus, dir.path("src"), dir.path("tgt"));
  CHECK(read_file(dir.path("src")) == "a\n");
  CHECK(read_file(dir.path("tgt")) == "x\n");
}

TEST_CASE("empty corpus serializes to empty files and reads back empty") {
  TempDir dir;
  write_parallel(ParallelCorpus{}, dir.path("src"), dir.path("tgt"));
  CHECK(read_file(dir.path("src")).empty());
  CHECK(read_file(dir.path("tgt")).empty());
  const auto corpus = read_parallel(dir.path("src"), dir.path("tgt"));
  CHECK(corpus.empty());
}

TEST_CASE("write refuses embedded line breaks") {
  TempDir dir;
  ParallelCorpus corpus;
  corpus.pairs = {{"a\nb", "x", {}}};
  CHECK_THROWS_AS(write_parallel(corpus, dir.path("src"), dir.path("tgt")), DataError);
}

TEST_CASE("write/read roundtrip of 1000 random pairs is identity") {
  TempDir dir;
  const auto corpus = random_corpus(1000, 17, true);
  write_parallel(corpus, dir.path("src"), dir.path("tgt"), dir.path("sco"));
  const auto back = read_parallel(dir.path("src"), dir.path("tgt"), dir.path("sco"));
  REQUIRE(back.size() == corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    CHECK(back.pairs[i].source == corpus.pairs[i].source);
    CHECK(back.pairs[i].target == corpus.pairs[i].target);
    CHECK(back.pairs[i].score == corpus.pairs[i].score);
  }
  // Without the score file, scores are dropped.
  const auto scoreless = read_parallel(dir.path("src"), dir.path("tgt"));
  CHECK(!scoreless.pairs[0].score.has_value());
}

TEST_CASE("concat_corpora preserves list order and sizes") {
  auto a = random_corpus(3, 1);
  auto b = random_corpus(4, 2);
  const auto joined = concat_corpora({a, b});
  REQUIRE(joined.size() == 7);
  for (std::size_t i = 0; i < 3; ++i) CHECK(joined.pairs[i] == a.pairs[i]);
  for (std::size_t i = 0; i < 4; ++i) CHECK(joined.pairs[3 + i] == b.pairs[i]);
  CHECK(concat_corpora({a}) == a);
}

TEST_CASE("concat_corpora rejects language-tag mismatch") {
  ParallelCorpus a, b;
  a.source_lang = "en";
  b.source_lang = "ja";
  CHECK_THROWS_AS(concat_corpora({a, b}), std::invalid_argument);
  b.source_lang = "";
  CHECK_NOTHROW(concat_corpora({a, b}));
}

TEST_CASE("split_corpus produces requested sizes") {
  const auto corpus = random_corpus(20000, 3);
  const auto split = split_corpus(corpus, {5000, 5000, 42});
  CHECK(split.train.size() == 10000);
  CHECK(split.valid.size() == 5000);
  CHECK(split.test.size() == 5000);
}

TEST_CASE("split with zero counts returns the input corpus") {
  const auto corpus = random_corpus(50, 4);
  const auto split = split_corpus(corpus, {0, 0, 9});
  CHECK(split.train.pairs == corpus.pairs);
  CHECK(split.valid.empty());
  CHECK(split.test.empty());
}

TEST_CASE("split is deterministic for a fixed seed") {
  const auto corpus = random_corpus(500, 5);
  const auto a = split_corpus(corpus, {50, 50, 123});
  const auto b = split_corpus(corpus, {50, 50, 123});
  CHECK(a.train.pairs == b.train.pairs);
  CHECK(a.valid.pairs == b.valid.pairs);
  CHECK(a.test.pairs == b.test.pairs);
  const auto c = split_corpus(corpus, {50, 50, 124});
  CHECK(a.test.pairs != c.test.pairs);
}

TEST_CASE("split partitions the corpus exactly") {
  const auto corpus = random_corpus(997, 6);
  const auto split = split_corpus(corpus, {101, 57, 7});
  CHECK(split.train.size() + split.valid.size() + split.test.size() == corpus.size());
  ParallelCorpus all;
  for (const auto* part : {&split.train, &split.valid, &split.test})
    all.pairs.insert(all.pairs.end(), part->pairs.begin(), part->pairs.end());
  CHECK(sorted_pairs(all) == sorted_pairs(corpus));
}

TEST_CASE("split rejects unsatisfiable spec") {
  const auto corpus = random_corpus(10, 7);
  CHECK_THROWS_AS(split_corpus(corpus, {6, 5, 1}), std::invalid_argument);
}

TEST_CASE("split outputs keep original relative order") {
  ParallelCorpus corpus;
  for (int i = 0; i < 100; ++i)
    corpus.pairs.push_back({std::to_string(i), std::to_string(i), {}});
  const auto split = split_corpus(corpus, {20, 20, 11});
  for (const auto* part : {&split.train, &split.valid, &split.test}) {
    for (std::size_t i = 1; i < part->pairs.size(); ++i)
      CHECK(std::stoi(part->pairs[i - 1].source) < std::stoi(part->pairs[i].source));
  }
}
