// mtprep: machine-translation data pipeline toolkit.
//
// Subcommands: clean, split, train-subword, encode, decode, vocab, bleu,
// stats. Exit codes: 0 success, 1 runtime/I-O failure, 2 usage or invalid
// configuration, 3 informational (bleu --diff with incomparable signatures).

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "mtprep/mtprep.hpp"

using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;
constexpr int kExitIncomparable = 3;

json base_report(const std::string& command) {
  return json{{"schema_version", 1},
              {"tool", "mtprep"},
              {"version", mtprep::kVersion},
              {"command", command}};
}

void write_report(const std::string& path, const json& report) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw mtprep::IoError("cannot open " + path + " for writing");
  out << report.dump(2) << "\n";
  if (!out) throw mtprep::IoError("write failure on " + path);
}

mtprep::LengthUnit parse_length_unit(const std::string& name) {
  if (name == "tokens") return mtprep::LengthUnit::whitespace_tokens;
  if (name == "chars") return mtprep::LengthUnit::characters;
  throw std::invalid_argument("unknown length unit '" + name + "' (tokens|chars)");
}

mtprep::DedupKey parse_dedup_key(const std::string& name) {
  if (name == "pair") return mtprep::DedupKey::pair;
  if (name == "source") return mtprep::DedupKey::source;
  if (name == "target") return mtprep::DedupKey::target;
  throw std::invalid_argument("unknown dedup key '" + name + "' (pair|source|target)");
}

mtprep::BleuScheme parse_scheme(const std::string& name) {
  if (name == "13a") return mtprep::BleuScheme::intl13a;
  if (name == "char") return mtprep::BleuScheme::chr;
  if (name == "ja-char") return mtprep::BleuScheme::ja_char;
  if (name == "none") return mtprep::BleuScheme::none;
  throw std::invalid_argument("unknown scheme '" + name + "' (13a|char|ja-char|none)");
}

// ---------------------------------------------------------------------------
// clean
// ---------------------------------------------------------------------------

struct CleanArgs {
  std::string source, target, scores, tsv;
  bool tsv_has_score = false;
  std::string out_source, out_target, out_scores;
  std::size_t max_length = 200;
  std::string length_unit = "tokens";
  double max_ratio = 9.0;
  std::string dedup_key = "pair";
  double score_threshold = -1.0;  // <0 means unset
  bool no_source_copy_check = false;
  std::string ledger_path, report_path;
};

int run_clean(const CleanArgs& args) {
  mtprep::ParallelCorpus corpus;
  if (!args.tsv.empty()) {
    corpus = mtprep::read_tsv(args.tsv, args.tsv_has_score);
  } else {
    if (args.source.empty() || args.target.empty())
      throw std::invalid_argument("clean needs --source/--target or --tsv");
    corpus = mtprep::read_parallel(
        args.source, args.target,
        args.scores.empty() ? std::nullopt : std::optional<std::string>(args.scores));
  }

  mtprep::FilterConfig config;
  config.max_length = args.max_length;
  config.length_unit = parse_length_unit(args.length_unit);
  config.max_ratio = args.max_ratio;
  config.dedup_key = parse_dedup_key(args.dedup_key);
  config.source_copy_check = !args.no_source_copy_check;
  if (args.score_threshold >= 0.0) config.score_threshold = args.score_threshold;

  auto [cleaned, ledger] = mtprep::run_pipeline(std::move(corpus), config);
  std::fputs(mtprep::render_ledger(ledger).c_str(), stdout);

  mtprep::write_parallel(cleaned, args.out_source, args.out_target,
                         args.out_scores.empty() ? std::nullopt
                                                 : std::optional<std::string>(args.out_scores));

  const std::string ledger_path =
      args.ledger_path.empty() ? args.out_source + ".ledger.tsv" : args.ledger_path;
  {
    std::ofstream out(ledger_path, std::ios::binary);
    if (!out) throw mtprep::IoError("cannot open " + ledger_path + " for writing");
    out << mtprep::ledger_report(ledger);
  }

  json report = base_report("clean");
  report["initial_rows"] = ledger.initial_rows;
  report["final_rows"] = cleaned.size();
  json stages = json::array();
  for (const auto& [name, rows] : ledger.stages)
    stages.push_back({{"stage", name}, {"rows", rows}});
  report["stages"] = stages;
  report["config"] = {{"max_length", args.max_length},
                      {"length_unit", args.length_unit},
                      {"max_ratio", args.max_ratio},
                      {"dedup_key", args.dedup_key},
                      {"score_threshold",
                       args.score_threshold >= 0.0 ? json(args.score_threshold) : json()},
                      {"source_copy_check", !args.no_source_copy_check}};
  write_report(args.report_path.empty() ? args.out_source + ".report.json" : args.report_path,
               report);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// split
// ---------------------------------------------------------------------------

struct SplitArgs {
  std::string source, target;
  std::size_t valid_count = 5000;
  std::size_t test_count = 5000;
  std::int64_t seed = -1;
  std::string out_prefix, report_path;
};

int run_split(const SplitArgs& args) {
  if (args.seed < 0)
    throw std::invalid_argument("split draws a random permutation; --seed is required");
  const auto corpus = mtprep::read_parallel(args.source, args.target);
  const mtprep::SplitSpec spec{args.valid_count, args.test_count,
                               std::uint64_t(args.seed)};
  const auto split = mtprep::split_corpus(corpus, spec);

  const auto emit = [&](const mtprep::ParallelCorpus& part, const std::string& name) {
    mtprep::write_parallel(part, args.out_prefix + "." + name + ".src",
                           args.out_prefix + "." + name + ".tgt");
  };
  emit(split.train, "train");
  emit(split.valid, "valid");
  emit(split.test, "test");
  std::printf("train: %zu\nvalid: %zu\ntest: %zu\n", split.train.size(), split.valid.size(),
              split.test.size());

  json report = base_report("split");
  report["input_rows"] = corpus.size();
  report["train_rows"] = split.train.size();
  report["valid_rows"] = split.valid.size();
  report["test_rows"] = split.test.size();
  report["seed"] = args.seed;
  report["prng"] = mtprep::kRngAlgorithm;
  write_report(
      args.report_path.empty() ? args.out_prefix + ".split.report.json" : args.report_path,
      report);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// train-subword
// ---------------------------------------------------------------------------

struct TrainArgs {
  std::vector<std::string> inputs;
  std::string model_type = "unigram";
  std::size_t vocab_size = 32000;
  double character_coverage = 1.0;
  bool byte_fallback = false;
  bool split_digits = false;
  std::int64_t seed = 0;
  std::size_t seed_vocab_size = 0;
  std::size_t max_piece_length = 16;
  int em_iterations = 2;
  double prune_fraction = 0.25;
  std::string model_out, report_path;
};

int run_train(const TrainArgs& args) {
  std::vector<std::string> lines;
  for (const auto& path : args.inputs) {
    auto file_lines = mtprep::read_lines(path);
    lines.insert(lines.end(), std::make_move_iterator(file_lines.begin()),
                 std::make_move_iterator(file_lines.end()));
  }

  mtprep::SubwordTrainConfig config;
  config.vocab_size = args.vocab_size;
  config.character_coverage = args.character_coverage;
  config.byte_fallback = args.byte_fallback;
  config.split_digits = args.split_digits;
  config.seed = std::uint64_t(args.seed);
  config.seed_vocab_size = args.seed_vocab_size;
  config.max_piece_length = args.max_piece_length;
  config.em_iterations = args.em_iterations;
  config.prune_fraction = args.prune_fraction;

  json report = base_report("train-subword");
  report["input_lines"] = lines.size();
  report["vocab_size_requested"] = args.vocab_size;
  if (args.model_type == "bpe") {
    config.model_type = mtprep::SubwordModelType::bpe;
    const auto model = mtprep::train_bpe(lines, config);
    mtprep::save_model(model, args.model_out);
    report["model_type"] = "bpe";
    report["pieces"] = model.vocab.size();
    report["merges"] = model.merges.size();
  } else if (args.model_type == "unigram") {
    config.model_type = mtprep::SubwordModelType::unigram;
    const auto model = mtprep::train_unigram(lines, config);
    mtprep::save_model(model, args.model_out);
    report["model_type"] = "unigram";
    report["pieces"] = model.pieces.size();
  } else {
    throw std::invalid_argument("unknown model type '" + args.model_type +
                                "' (bpe|unigram)");
  }
  std::printf("model written to %s\n", args.model_out.c_str());
  write_report(args.report_path.empty() ? args.model_out + ".report.json" : args.report_path,
               report);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// encode / decode
// ---------------------------------------------------------------------------

struct EncodeArgs {
  std::string model, input, output;
  double dropout = 0.0;
  bool sample = false;
  double alpha = 1.0;
  std::int64_t seed = -1;
  std::string report_path;
};

int run_encode(const EncodeArgs& args) {
  const bool needs_seed = args.dropout > 0.0 || args.sample;
  if (needs_seed && args.seed < 0)
    throw std::invalid_argument("stochastic encoding requires an explicit --seed");

  const auto model = mtprep::load_model(args.model);
  const auto lines = mtprep::read_lines(args.input);
  std::vector<std::string> out_lines;
  out_lines.reserve(lines.size());
  mtprep::SeededRng rng(needs_seed ? std::uint64_t(args.seed) : 0);

  const auto join = [](const std::vector<std::string>& pieces) {
    std::string line;
    for (std::size_t i = 0; i < pieces.size(); ++i) {
      if (i) line += ' ';
      line += pieces[i];
    }
    return line;
  };

  if (model.type == mtprep::SubwordModelType::bpe) {
    if (args.sample)
      throw std::invalid_argument("--sample requires a unigram model");
    mtprep::BpeEncoder encoder(model.bpe);
    for (const auto& line : lines)
      out_lines.push_back(join(encoder.encode_text(line, args.dropout, &rng)));
  } else {
    if (args.dropout > 0.0)
      throw std::invalid_argument("--dropout requires a BPE model");
    mtprep::UnigramEncoder encoder(model.unigram);
    for (const auto& line : lines) {
      out_lines.push_back(join(args.sample ? encoder.sample_text(line, args.alpha, rng)
                                           : encoder.encode_text(line)));
    }
  }
  mtprep::write_lines(args.output, out_lines);

  json report = base_report("encode");
  report["model"] = args.model;
  report["lines"] = lines.size();
  report["mode"] = args.sample ? "sample" : (args.dropout > 0.0 ? "dropout" : "viterbi");
  if (args.dropout > 0.0) report["dropout"] = args.dropout;
  if (args.sample) report["alpha"] = args.alpha;
  if (needs_seed) report["seed"] = args.seed;
  write_report(args.report_path.empty() ? args.output + ".report.json" : args.report_path,
               report);
  return kExitOk;
}

struct DecodeArgs {
  std::string model, input, output, report_path;
};

int run_decode(const DecodeArgs& args) {
  std::string marker = mtprep::kDefaultMarker;
  if (!args.model.empty()) {
    const auto model = mtprep::load_model(args.model);
    marker = model.type == mtprep::SubwordModelType::bpe ? model.bpe.marker
                                                         : model.unigram.marker;
  }
  const auto lines = mtprep::read_lines(args.input);
  std::vector<std::string> out_lines;
  out_lines.reserve(lines.size());
  for (const auto& line : lines)
    out_lines.push_back(mtprep::decode_pieces(mtprep::ws_tokens(line), marker));
  mtprep::write_lines(args.output, out_lines);

  json report = base_report("decode");
  report["lines"] = lines.size();
  write_report(args.report_path.empty() ? args.output + ".report.json" : args.report_path,
               report);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// vocab
// ---------------------------------------------------------------------------

struct VocabArgs {
  std::string model, output;
  std::string format = "tokens";
  bool include_specials = false;
  std::string report_path;
};

int run_vocab(const VocabArgs& args) {
  const auto model = mtprep::load_model(args.model);
  const auto vocab = model.type == mtprep::SubwordModelType::bpe
                         ? mtprep::Vocabulary::from(model.bpe)
                         : mtprep::Vocabulary::from(model.unigram);
  mtprep::VocabFormat format;
  if (args.format == "tokens")
    format = mtprep::VocabFormat::framework_tokens;
  else if (args.format == "piece-logprob")
    format = mtprep::VocabFormat::piece_logprob;
  else
    throw std::invalid_argument("unknown vocab format '" + args.format +
                                "' (tokens|piece-logprob)");
  mtprep::export_vocab(vocab, args.output, format, args.include_specials);

  json report = base_report("vocab");
  report["entries"] = vocab.entries.size();
  report["format"] = args.format;
  write_report(args.report_path.empty() ? args.output + ".report.json" : args.report_path,
               report);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// bleu (scoring and report diffing)
// ---------------------------------------------------------------------------

struct BleuArgs {
  std::string hyp, ref;
  std::string scheme = "13a";
  std::string smooth = "none";
  double floor_epsilon = 0.1;
  std::vector<std::string> diff;
  std::string report_path;
};

int run_bleu(const BleuArgs& args) {
  if (!args.diff.empty()) {
    json a, b;
    for (const auto& [path, target] : {std::pair{args.diff[0], &a}, {args.diff[1], &b}}) {
      std::ifstream in(path, std::ios::binary);
      if (!in) throw mtprep::IoError("cannot open " + path);
      try {
        in >> *target;
      } catch (const json::exception& e) {
        throw mtprep::DataError(path + ": not a valid report: " + e.what());
      }
    }
    const std::string sig_a = a.value("signature", "");
    const std::string sig_b = b.value("signature", "");
    if (sig_a != sig_b) {
      std::fprintf(stderr,
                   "warning: evaluation signatures differ; scores are not comparable\n"
                   "  %s\n  %s\n",
                   sig_a.c_str(), sig_b.c_str());
      return kExitIncomparable;
    }
    const double delta = b.value("score", 0.0) - a.value("score", 0.0);
    std::printf("BLEU %.1f -> %.1f (delta %+.1f) sig:%s\n", a.value("score", 0.0),
                b.value("score", 0.0), delta, sig_a.c_str());
    return kExitOk;
  }

  if (args.hyp.empty() || args.ref.empty())
    throw std::invalid_argument("bleu needs --hyp and --ref (or --diff)");
  mtprep::MetricScheme scheme;
  scheme.scheme = parse_scheme(args.scheme);
  if (args.smooth == "floor")
    scheme.smoothing = {mtprep::Smoothing::Kind::floor, args.floor_epsilon};
  else if (args.smooth != "none")
    throw std::invalid_argument("unknown smoothing '" + args.smooth + "' (none|floor)");

  const auto hyp_lines = mtprep::read_lines(args.hyp);
  const auto ref_lines = mtprep::read_lines(args.ref);
  const auto report = mtprep::corpus_bleu(hyp_lines, ref_lines, scheme);
  std::printf("%s\n", mtprep::render_report(report).c_str());

  json out = base_report("bleu");
  out["score"] = report.score;
  out["precisions"] = report.precisions;
  out["brevity_penalty"] = report.brevity_penalty;
  out["hyp_len"] = report.hyp_len;
  out["ref_len"] = report.ref_len;
  out["signature"] = report.signature;
  write_report(args.report_path.empty() ? args.hyp + ".bleu.json" : args.report_path, out);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// stats
// ---------------------------------------------------------------------------

struct StatsArgs {
  std::string source, target, vocab;
  std::string vocab_side = "source";
  std::string report_path;
};

json side_stats(const std::vector<std::string>& lines) {
  std::uint64_t tokens = 0;
  std::unordered_set<std::string> unique;
  // Line-length histogram in whitespace tokens: [0], (0,10], (10,20], ...,
  // (90,100], >100. Bucket counts always sum to the line count.
  std::array<std::uint64_t, 12> histogram{};
  for (const auto& line : lines) {
    const auto toks = mtprep::ws_tokens(line);
    tokens += toks.size();
    for (const auto& t : toks) unique.insert(t);
    const std::size_t bucket =
        toks.empty() ? 0 : toks.size() > 100 ? 11 : (toks.size() + 9) / 10;
    ++histogram[bucket];
  }
  json out;
  out["lines"] = lines.size();
  out["tokens"] = tokens;
  out["unique_tokens"] = unique.size();
  out["length_histogram"] = histogram;
  return out;
}

int run_stats(const StatsArgs& args) {
  json report = base_report("stats");
  const auto src_lines = mtprep::read_lines(args.source);
  report["source"] = side_stats(src_lines);
  std::printf("source: %zu lines, %llu tokens, %llu unique\n", src_lines.size(),
              report["source"]["tokens"].get<unsigned long long>(),
              report["source"]["unique_tokens"].get<unsigned long long>());
  std::vector<std::string> tgt_lines;
  if (!args.target.empty()) {
    tgt_lines = mtprep::read_lines(args.target);
    report["target"] = side_stats(tgt_lines);
    std::printf("target: %zu lines, %llu tokens, %llu unique\n", tgt_lines.size(),
                report["target"]["tokens"].get<unsigned long long>(),
                report["target"]["unique_tokens"].get<unsigned long long>());
  }
  if (!args.vocab.empty()) {
    const auto vocab = mtprep::load_vocab(args.vocab);
    const auto& lines = args.vocab_side == "target" ? tgt_lines : src_lines;
    if (args.vocab_side == "target" && args.target.empty())
      throw std::invalid_argument("--vocab-side target needs --target");
    const double rate = mtprep::oov_rate(lines, vocab);
    report["oov_rate"] = rate;
    report["oov_side"] = args.vocab_side;
    std::printf("oov rate (%s): %.6f\n", args.vocab_side.c_str(), rate);
  }
  write_report(args.report_path.empty() ? args.source + ".stats.json" : args.report_path,
               report);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mtprep: parallel-corpus cleaning, splitting, subword models and BLEU"};
  app.require_subcommand(0, 1);
  app.set_config("--config", "", "INI configuration file ([subcommand] sections)");
  app.set_version_flag("--version", std::string("mtprep ") + mtprep::kVersion);

  CleanArgs clean_args;
  auto* clean = app.add_subcommand("clean", "Run the filtering cascade with a stage ledger");
  clean->add_option("--source", clean_args.source, "Source-side input file");
  clean->add_option("--target", clean_args.target, "Target-side input file");
  clean->add_option("--scores", clean_args.scores, "Per-pair quality scores, one per line");
  clean->add_option("--tsv", clean_args.tsv, "Tab-separated source<TAB>target input");
  clean->add_flag("--tsv-has-score", clean_args.tsv_has_score,
                  "TSV carries a third score column");
  clean->add_option("--out-source", clean_args.out_source, "Filtered source output")
      ->required();
  clean->add_option("--out-target", clean_args.out_target, "Filtered target output")
      ->required();
  clean->add_option("--out-scores", clean_args.out_scores, "Filtered score output");
  clean->add_option("--max-length", clean_args.max_length, "Per-side length cap");
  clean->add_option("--length-unit", clean_args.length_unit, "tokens|chars");
  clean->add_option("--max-ratio", clean_args.max_ratio, "Longer/shorter length ratio cap");
  clean->add_option("--dedup-key", clean_args.dedup_key, "pair|source|target");
  clean->add_option("--score-threshold", clean_args.score_threshold,
                    "Keep pairs scored strictly above this value");
  clean->add_flag("--no-source-copy-check", clean_args.no_source_copy_check,
                  "Skip the source==target stage");
  clean->add_option("--ledger", clean_args.ledger_path, "Ledger report path (stage<TAB>rows)");
  clean->add_option("--report", clean_args.report_path, "JSON report path");

  SplitArgs split_args;
  auto* split = app.add_subcommand("split", "Deterministic train/valid/test split");
  split->add_option("--source", split_args.source, "Source-side input")->required();
  split->add_option("--target", split_args.target, "Target-side input")->required();
  split->add_option("--valid", split_args.valid_count, "Validation pair count");
  split->add_option("--test", split_args.test_count, "Test pair count");
  split->add_option("--seed", split_args.seed, "Permutation seed (required)");
  split->add_option("--out-prefix", split_args.out_prefix, "Output path prefix")->required();
  split->add_option("--report", split_args.report_path, "JSON report path");

  TrainArgs train_args;
  auto* train = app.add_subcommand("train-subword", "Train a BPE or unigram subword model");
  train->add_option("--input", train_args.inputs, "Training text file(s)")->required();
  train->add_option("--model-type", train_args.model_type, "bpe|unigram");
  train->add_option("--vocab-size", train_args.vocab_size, "Target piece count");
  train->add_option("--character-coverage", train_args.character_coverage,
                    "Fraction of character occurrences covered by dedicated pieces");
  train->add_flag("--byte-fallback", train_args.byte_fallback,
                  "Decompose unknown characters into UTF-8 byte pieces");
  train->add_flag("--split-digits", train_args.split_digits,
                  "Bar digits from merging into multi-digit pieces");
  train->add_option("--seed", train_args.seed, "Training seed");
  train->add_option("--seed-vocab-size", train_args.seed_vocab_size,
                    "Unigram seed vocabulary cap (0 = 4 x vocab-size)");
  train->add_option("--max-piece-length", train_args.max_piece_length,
                    "Unigram maximum piece length");
  train->add_option("--em-iterations", train_args.em_iterations,
                    "Unigram EM iterations per pruning round");
  train->add_option("--prune-fraction", train_args.prune_fraction,
                    "Unigram fraction of removable pieces dropped per round");
  train->add_option("--model-out", train_args.model_out, "Model file path")->required();
  train->add_option("--report", train_args.report_path, "JSON report path");

  EncodeArgs encode_args;
  auto* encode = app.add_subcommand("encode", "Subword-encode a text file");
  encode->add_option("--model", encode_args.model, "Model file")->required();
  encode->add_option("--input", encode_args.input, "Plain text input")->required();
  encode->add_option("--output", encode_args.output, "Encoded output")->required();
  encode->add_option("--dropout", encode_args.dropout, "BPE-dropout probability");
  encode->add_flag("--sample", encode_args.sample, "Sample unigram segmentations");
  encode->add_option("--alpha", encode_args.alpha, "Sampling sharpness");
  encode->add_option("--seed", encode_args.seed,
                     "Seed (required for --dropout > 0 and --sample)");
  encode->add_option("--report", encode_args.report_path, "JSON report path");

  DecodeArgs decode_args;
  auto* decode = app.add_subcommand("decode", "Reverse subword encoding");
  decode->add_option("--model", decode_args.model, "Model file (for the marker)");
  decode->add_option("--input", decode_args.input, "Encoded input")->required();
  decode->add_option("--output", decode_args.output, "Decoded output")->required();
  decode->add_option("--report", decode_args.report_path, "JSON report path");

  VocabArgs vocab_args;
  auto* vocab = app.add_subcommand("vocab", "Export a model vocabulary");
  vocab->add_option("--model", vocab_args.model, "Model file")->required();
  vocab->add_option("--output", vocab_args.output, "Vocabulary output path")->required();
  vocab->add_option("--format", vocab_args.format, "tokens|piece-logprob");
  vocab->add_flag("--include-specials", vocab_args.include_specials,
                  "Keep <unk>/<s>/</s> lines in token exports");
  vocab->add_option("--report", vocab_args.report_path, "JSON report path");

  BleuArgs bleu_args;
  auto* bleu = app.add_subcommand("bleu", "Corpus BLEU with a declared tokenization");
  bleu->add_option("--hyp", bleu_args.hyp, "Hypothesis file (detokenized text)");
  bleu->add_option("--ref", bleu_args.ref, "Reference file (detokenized text)");
  bleu->add_option("--scheme", bleu_args.scheme, "13a|char|ja-char|none");
  bleu->add_option("--smooth", bleu_args.smooth, "none|floor");
  bleu->add_option("--floor-epsilon", bleu_args.floor_epsilon, "Floor smoothing epsilon");
  bleu->add_option("--diff", bleu_args.diff,
                   "Compare two JSON reports; exit 3 if signatures differ")
      ->expected(2);
  bleu->add_option("--report", bleu_args.report_path, "JSON report path");

  StatsArgs stats_args;
  auto* stats = app.add_subcommand("stats", "Token counts, length histograms, OOV rate");
  stats->add_option("--source", stats_args.source, "Source-side file")->required();
  stats->add_option("--target", stats_args.target, "Target-side file");
  stats->add_option("--vocab", stats_args.vocab, "Vocabulary file for the OOV rate");
  stats->add_option("--vocab-side", stats_args.vocab_side, "source|target");
  stats->add_option("--report", stats_args.report_path, "JSON report path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);  // prints help, exits 0
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (clean->parsed()) return run_clean(clean_args);
    if (split->parsed()) return run_split(split_args);
    if (train->parsed()) return run_train(train_args);
    if (encode->parsed()) return run_encode(encode_args);
    if (decode->parsed()) return run_decode(decode_args);
    if (vocab->parsed()) return run_vocab(vocab_args);
    if (bleu->parsed()) return run_bleu(bleu_args);
    if (stats->parsed()) return run_stats(stats_args);
    std::fputs(app.help().c_str(), stderr);
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "mtprep: %s\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "mtprep: %s\n", e.what());
    return kExitRuntime;
  }
}
