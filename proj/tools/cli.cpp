// Copyright 2026 The refsmith Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "cli.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "refsmith/aligner.hpp"
#include "refsmith/bleu.hpp"
#include "refsmith/corpus.hpp"
#include "refsmith/error.hpp"
#include "refsmith/external_model.hpp"
#include "refsmith/metrics.hpp"
#include "refsmith/model.hpp"
#include "refsmith/pipeline.hpp"
#include "refsmith/text_format.hpp"
#include "refsmith/translation_table.hpp"

namespace refsmith::cli {

namespace {

namespace fs = std::filesystem;

int DefaultWorkers() {
  const unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : static_cast<int>(n);
}

void RequireFile(const std::string& path) {
  if (!fs::is_regular_file(path)) throw IoError(path, "no such file");
}

std::string Trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

bool GivenOnCommandLine(const std::vector<std::string>& args, const std::string& flag) {
  for (const std::string& a : args) {
    if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
  }
  return false;
}

// Expands "--config FILE" into flags. The file holds "key=value" lines ('#'
// starts a comment); each key names a long flag of the chosen subcommand and
// is only used when that flag is absent from the command line.
std::vector<std::string> ApplyConfig(const std::vector<std::string>& args) {
  std::optional<std::string> config;
  std::vector<std::string> rest;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw UsageError("--config needs a file");
      config = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      config = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
    }
  }
  if (!config) return rest;
  RequireFile(*config);

  std::size_t chain = rest.empty() || rest[0].rfind('-', 0) == 0 ? 0 : 1;
  if (chain == 1 && rest[0] == "metrics" && rest.size() > 1 &&
      rest[1].rfind('-', 0) != 0) {
    chain = 2;
  }
  std::vector<std::string> out(rest.begin(), rest.begin() + chain);

  std::ifstream in = OpenForRead(*config);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string body = Trim(line.substr(0, line.find('#')));
    if (body.empty()) continue;
    const std::size_t eq = body.find('=');
    if (eq == std::string::npos) {
      throw UsageError(*config + ":" + std::to_string(line_no) +
                       ": expected key=value");
    }
    std::string key = Trim(body.substr(0, eq));
    if (key.rfind("--", 0) == 0) key = key.substr(2);
    const std::string flag = "--" + key;
    if (key.empty() || GivenOnCommandLine(rest, flag)) continue;
    const Sentence values = Tokenize(body.substr(eq + 1));
    if (values.empty()) {
      throw UsageError(*config + ":" + std::to_string(line_no) + ": empty value");
    }
    for (const Token& v : values) out.push_back(flag + "=" + v);
  }
  out.insert(out.end(), rest.begin() + chain, rest.end());
  return out;
}

void Progress(const std::string& line) { std::cerr << "refsmith: " << line << '\n'; }

void AddConfigOption(CLI::App* app) {
  // Consumed by ApplyConfig before parsing; registered for --help.
  app->add_option("--config", "Flat key=value file of flag defaults; flags on the "
                              "command line win");
}

// ---------------------------------------------------------------- align

struct AlignArgs {
  std::string src, tgt, table, alignments;
  std::string model = "model1";
  std::size_t iterations = 5;
  double null_weight = 0.05;
  double min_prob = 1e-6;
  double tension = 4.0;
  bool fixed_tension = false;
  int workers = DefaultWorkers();
  bool serial = false;
};

int CmdAlign(const AlignArgs& a) {
  RequireFile(a.src);
  RequireFile(a.tgt);
  EmConfig config;
  config.iterations = a.iterations;
  config.null_weight = a.null_weight;
  config.min_prob = a.min_prob;
  config.workers = a.workers;
  config.execution = a.serial ? Execution::kSerial : Execution::kParallel;
  CheckEmConfig(config);

  const Corpus corpus = LoadParallelCorpus(a.src, a.tgt);
  Progress("align: " + std::to_string(corpus.size()) + " pairs, " + a.model);
  TrainingTrace trace;
  std::vector<Alignment> links;
  if (a.model == "model2") {
    DiagonalConfig diagonal;
    diagonal.initial_tension = a.tension;
    diagonal.optimize_tension = !a.fixed_tension;
    const Model2Params params = TrainModel2Diag(corpus, config, diagonal, &trace);
    SaveTable(params.table, a.table);
    if (!a.alignments.empty()) links = AlignCorpus(corpus, params);
    Progress("align: final tension " + FormatDouble(params.tension));
  } else {
    const TranslationTable table = TrainModel1(corpus, config, &trace);
    SaveTable(table, a.table);
    if (!a.alignments.empty()) links = AlignCorpus(corpus, table, config.null_weight > 0.0);
  }
  for (std::size_t i = 0; i < trace.log_likelihood.size(); ++i) {
    Progress("align: log-likelihood[" + std::to_string(i) +
             "] = " + FormatDouble(trace.log_likelihood[i]));
  }
  if (!a.alignments.empty()) WriteAlignments(links, a.alignments);
  return kOk;
}

// ------------------------------------------------------------- generate

struct GenerateArgs {
  std::string src, tgt, model, out_prefix;
  std::size_t k = 0;
  std::size_t beam = 5;
  std::size_t max_len = 0;
  double end_bias = 10.0;
  int timeout_ms = 30000;
  int workers = DefaultWorkers();
  bool serial = false;
};

int CmdGenerate(const GenerateArgs& a) {
  RequireFile(a.src);
  RequireFile(a.tgt);
  if (a.k < 1) throw UsageError("--k must be at least 1");

  ModelFactory factory;
  std::string model_source;
  if (a.model.rfind("builtin:", 0) == 0) {
    const std::string path = a.model.substr(8);
    RequireFile(path);
    const LexicalModel model(LoadTable(path), a.end_bias);
    factory = [model] { return std::make_unique<LexicalModel>(model); };
    model_source = path;
  } else if (a.model.rfind("external:", 0) == 0) {
    const Endpoint endpoint = Endpoint::Parse(a.model.substr(9));
    const auto timeout = std::chrono::milliseconds(a.timeout_ms);
    factory = [endpoint, timeout] {
      return std::make_unique<ExternalModel>(endpoint, timeout);
    };
    model_source = endpoint.Describe();
  } else {
    throw UsageError("--model must be builtin:TABLE, external:CMD or external:HOST:PORT");
  }

  const Corpus corpus = LoadParallelCorpus(a.src, a.tgt);
  GenerationRun run;
  run.k = a.k;
  run.beam_size = a.beam;
  run.max_length = a.max_len;
  run.workers = a.workers;
  run.execution = a.serial ? Execution::kSerial : Execution::kParallel;

  const fs::path manifest = a.out_prefix + ".manifest";
  const std::vector<std::pair<std::string, std::string>> extra = {
      {"model_spec", a.model}, {"source", a.src}, {"reference", a.tgt}};
  Progress("generate: " + std::to_string(corpus.size()) + " pairs, wait-" +
           std::to_string(a.k) + ", beam " + std::to_string(a.beam));

  GenerationResult result;
  try {
    result = GeneratePseudoRefs(corpus, run, factory);
  } catch (const ProtocolError& e) {
    GenerationResult failed;
    failed.pairs = corpus.size();
    failed.model_identity = model_source;
    auto with_error = extra;
    with_error.emplace_back("error", e.what());
    WriteManifest(run, failed, with_error, manifest);
    throw;
  }

  std::vector<Sentence> pseudo;
  pseudo.reserve(result.scored.size());
  for (const ScoredSentence& s : result.scored) pseudo.push_back(s.pseudo_target);
  WriteSentences(pseudo, a.out_prefix + ".pseudo");
  WriteScoreTable(result.scored, a.out_prefix + ".scores");
  WriteManifest(run, result, extra, manifest);

  Progress("generate: " + std::to_string(result.scored.size()) + " generated, " +
           std::to_string(result.failures.size()) + " failed");
  if (result.has_protocol_failure()) return kProtocolError;
  if (!result.failures.empty()) return kDataError;
  return kOk;
}

// --------------------------------------------------------------- filter

struct FilterArgs {
  std::vector<std::string> scores;
  std::optional<double> top_fraction;
  std::optional<double> min_bleu;
  bool pooled = false;
  std::string out, augment, src, tgt;
};

int CmdFilter(const FilterArgs& a) {
  for (const std::string& path : a.scores) RequireFile(path);
  if (!a.augment.empty()) {
    if (a.src.empty() || a.tgt.empty()) {
      throw UsageError("--augment needs --src and --tgt of the original corpus");
    }
    RequireFile(a.src);
    RequireFile(a.tgt);
  }
  FilterPolicy policy;
  if (a.min_bleu) {
    policy.mode = FilterPolicy::Mode::kMinBleu;
    policy.min_bleu = *a.min_bleu;
  } else if (a.top_fraction) {
    policy.top_fraction = *a.top_fraction;
  }

  std::vector<std::vector<ScoredSentence>> runs;
  for (const std::string& path : a.scores) runs.push_back(LoadScoreTable(path));
  if (a.pooled) {
    std::vector<ScoredSentence> all;
    for (auto& run : runs) all.insert(all.end(), run.begin(), run.end());
    runs = {std::move(all)};
  }
  std::vector<ScoredSentence> selected;
  std::size_t total = 0;
  for (const auto& run : runs) {
    total += run.size();
    const auto chosen = FilterTop(run, policy);
    selected.insert(selected.end(), chosen.begin(), chosen.end());
  }
  WriteScoreTable(selected, a.out);
  Progress("filter: selected " + std::to_string(selected.size()) + " of " +
           std::to_string(total));

  if (!a.augment.empty()) {
    const Corpus original = LoadParallelCorpus(a.src, a.tgt);
    const Corpus augmented = AugmentCorpus(original, selected);
    WriteParallelCorpus(augmented, a.augment + ".src", a.augment + ".tgt");
    Progress("filter: augmented corpus has " + std::to_string(augmented.size()) +
             " pairs");
  }
  return kOk;
}

// -------------------------------------------------------------- metrics

struct ArArgs {
  std::string src, tgt, alignments, out_prefix;
  std::vector<std::size_t> ks;
};

int CmdAr(const ArArgs& a) {
  RequireFile(a.src);
  RequireFile(a.tgt);
  RequireFile(a.alignments);
  const Corpus corpus = LoadParallelCorpus(a.src, a.tgt);
  const std::vector<Alignment> links = LoadAlignments(a.alignments, corpus);
  for (std::size_t k : a.ks) {
    if (k < 1) throw UsageError("--k must be at least 1");
    const AnticipationReport report = BuildAnticipationReport(corpus, links, k);
    if (!a.out_prefix.empty()) {
      WriteRateReport(report, a.out_prefix + ".ar" + std::to_string(k) + ".tsv");
    }
    std::cout << "AR_" << k << '\t' << FormatDouble(report.corpus_mean) << '\n';
  }
  return kOk;
}

struct HrArgs {
  std::string src, hyp, table, out, alignments_out;
};

int CmdHr(const HrArgs& a) {
  RequireFile(a.src);
  RequireFile(a.hyp);
  RequireFile(a.table);
  const TranslationTable table = LoadTable(a.table);
  const Corpus corpus = LoadParallelCorpus(a.src, a.hyp);
  const std::vector<Alignment> links = AlignCorpus(corpus, table, true);
  const HallucinationReport report = BuildHallucinationReport(corpus, links);
  if (!a.out.empty()) WriteRateReport(report, a.out);
  if (!a.alignments_out.empty()) WriteAlignments(links, a.alignments_out);
  std::cout << "HR\t" << FormatDouble(report.corpus_mean) << '\n';
  return kOk;
}

struct BleuArgs {
  std::string hyp, out;
  std::vector<std::string> refs;
};

int CmdBleu(const BleuArgs& a) {
  RequireFile(a.hyp);
  for (const std::string& r : a.refs) RequireFile(r);
  const std::vector<Sentence> hyps = LoadSentences(a.hyp);
  std::vector<std::vector<Sentence>> refs(hyps.size());
  for (const std::string& path : a.refs) {
    std::vector<Sentence> lines = LoadSentences(path);
    if (lines.size() != hyps.size()) {
      throw DataError("line count mismatch: " + a.hyp + " has " +
                      std::to_string(hyps.size()) + " lines, " + path + " has " +
                      std::to_string(lines.size()));
    }
    for (std::size_t i = 0; i < lines.size(); ++i) refs[i].push_back(std::move(lines[i]));
  }
  RateReport report;
  double sum = 0.0;
  for (std::size_t i = 0; i < hyps.size(); ++i) {
    const double bleu = SentenceBleu(hyps[i], refs[i]);
    report.per_sentence.emplace_back(i + 1, bleu);
    sum += bleu;
  }
  report.corpus_mean = hyps.empty() ? 0.0 : sum / static_cast<double>(hyps.size());
  if (!a.out.empty()) WriteRateReport(report, a.out);
  std::cout << "corpus_bleu\t" << FormatDouble(CorpusBleu(hyps, refs)) << '\n';
  std::cout << "mean_sentence_bleu\t" << FormatDouble(report.corpus_mean) << '\n';
  return kOk;
}

struct HistArgs {
  std::string scores, out;
  double bin_width = 10.0;
};

int CmdHist(const HistArgs& a) {
  RequireFile(a.scores);
  std::vector<double> values;
  for (const ScoredSentence& s : LoadScoreTable(a.scores)) values.push_back(s.bleu);
  const std::vector<HistogramBin> bins = BleuHistogram(values, a.bin_width);
  if (!a.out.empty()) {
    WriteHistogram(bins, a.out);
  } else {
    for (const HistogramBin& bin : bins) {
      std::cout << FormatDouble(bin.low) << '\t' << bin.count << '\n';
    }
  }
  return kOk;
}

}  // namespace

int Run(const std::vector<std::string>& args) {
  CLI::App app{"refsmith: wait-k pseudo-references, BLEU filtering, and "
               "anticipation/hallucination metrics"};
  app.name("refsmith");
  app.require_subcommand(1, 1);

  AlignArgs align;
  CLI::App* align_cmd = app.add_subcommand(
      "align", "Train IBM Model 1 or diagonal Model 2 and emit Viterbi alignments");
  AddConfigOption(align_cmd);
  align_cmd->add_option("--src", align.src, "Source text")->required();
  align_cmd->add_option("--tgt", align.tgt, "Target text")->required();
  align_cmd->add_option("--model", align.model, "model1 or model2")
      ->check(CLI::IsMember({"model1", "model2"}))
      ->capture_default_str();
  align_cmd->add_option("--table", align.table, "Output translation table")->required();
  align_cmd->add_option("--alignments", align.alignments,
                        "Output Viterbi alignments (Pharaoh format)");
  align_cmd->add_option("--iterations", align.iterations, "EM iterations")
      ->capture_default_str();
  align_cmd->add_option("--null-weight", align.null_weight, "Prior mass of NULL")
      ->capture_default_str();
  align_cmd->add_option("--min-prob", align.min_prob,
                        "Pruning threshold and unknown-pair floor")
      ->capture_default_str();
  align_cmd->add_option("--tension", align.tension, "Initial diagonal tension (model2)")
      ->capture_default_str();
  align_cmd->add_flag("--fixed-tension", align.fixed_tension,
                      "Do not optimize the tension (model2)");
  align_cmd->add_option("--workers", align.workers, "E-step threads")
      ->capture_default_str();
  align_cmd->add_flag("--serial", align.serial, "Use the serial reference E-step");

  GenerateArgs gen;
  CLI::App* gen_cmd = app.add_subcommand(
      "generate", "Decode pseudo-references with test-time wait-k and score them");
  AddConfigOption(gen_cmd);
  gen_cmd->add_option("--src", gen.src, "Source text")->required();
  gen_cmd->add_option("--tgt", gen.tgt, "Original target references")->required();
  gen_cmd->add_option("--k", gen.k, "Wait-k parameter")->required();
  gen_cmd->add_option("--beam", gen.beam, "Beam size")->capture_default_str();
  gen_cmd->add_option("--model", gen.model,
                      "builtin:TABLE | external:CMD | external:HOST:PORT")
      ->required();
  gen_cmd->add_option("--out-prefix", gen.out_prefix,
                      "Writes PREFIX.pseudo, PREFIX.scores, PREFIX.manifest")
      ->required();
  gen_cmd->add_option("--workers", gen.workers, "Decoding workers")
      ->capture_default_str();
  gen_cmd->add_option("--max-len", gen.max_len, "Maximum output length (0: 2|x|+10)")
      ->capture_default_str();
  gen_cmd->add_option("--end-bias", gen.end_bias,
                      "Builtin model: log-odds of END once the source is exhausted")
      ->capture_default_str();
  gen_cmd->add_option("--timeout-ms", gen.timeout_ms, "External model reply timeout")
      ->capture_default_str();
  gen_cmd->add_flag("--serial", gen.serial, "Decode with a single model, in order");

  FilterArgs filter;
  double top_fraction = 0.4;
  double min_bleu = 0.0;
  CLI::App* filter_cmd = app.add_subcommand(
      "filter", "Select pseudo-references by sentence BLEU and build the augmented corpus");
  AddConfigOption(filter_cmd);
  filter_cmd->add_option("--scores", filter.scores,
                         "Score table(s); each is filtered on its own unless --pooled")
      ->required();
  CLI::Option* top_opt =
      filter_cmd->add_option("--top-fraction", top_fraction,
                             "Keep the top fraction by BLEU (default 0.4)");
  CLI::Option* min_opt =
      filter_cmd->add_option("--min-bleu", min_bleu, "Keep items with BLEU >= value");
  top_opt->excludes(min_opt);
  filter_cmd->add_flag("--pooled", filter.pooled,
                       "Select over all score tables together");
  filter_cmd->add_option("--out", filter.out, "Selected score table")->required();
  filter_cmd->add_option("--augment", filter.augment,
                         "Write PREFIX.src/PREFIX.tgt: original plus selected pairs");
  filter_cmd->add_option("--src", filter.src, "Original source text (for --augment)");
  filter_cmd->add_option("--tgt", filter.tgt, "Original target text (for --augment)");

  CLI::App* metrics_cmd =
      app.add_subcommand("metrics", "Anticipation, hallucination and BLEU reports");
  metrics_cmd->require_subcommand(1, 1);

  ArArgs ar;
  CLI::App* ar_cmd = metrics_cmd->add_subcommand("ar", "k-anticipation rate");
  AddConfigOption(ar_cmd);
  ar_cmd->add_option("--src", ar.src, "Source text")->required();
  ar_cmd->add_option("--tgt", ar.tgt, "Target text")->required();
  ar_cmd->add_option("--alignments", ar.alignments, "Pharaoh alignments")->required();
  ar_cmd->add_option("--k", ar.ks, "Wait-k values (repeatable)")->required();
  ar_cmd->add_option("--out-prefix", ar.out_prefix, "Writes PREFIX.ar<k>.tsv reports");

  HrArgs hr;
  CLI::App* hr_cmd = metrics_cmd->add_subcommand("hr", "Hallucination rate");
  AddConfigOption(hr_cmd);
  hr_cmd->add_option("--src", hr.src, "Source text")->required();
  hr_cmd->add_option("--hyp", hr.hyp, "Hypotheses")->required();
  hr_cmd->add_option("--table", hr.table, "Model 1 translation table")->required();
  hr_cmd->add_option("--out", hr.out, "Per-sentence report");
  hr_cmd->add_option("--alignments-out", hr.alignments_out, "Write the alignments used");

  BleuArgs bleu;
  CLI::App* bleu_cmd = metrics_cmd->add_subcommand("bleu", "Sentence and corpus BLEU");
  AddConfigOption(bleu_cmd);
  bleu_cmd->add_option("--hyp", bleu.hyp, "Hypotheses")->required();
  bleu_cmd->add_option("--ref", bleu.refs, "Reference file (repeatable)")->required();
  bleu_cmd->add_option("--out", bleu.out, "Per-sentence BLEU report");

  HistArgs hist;
  CLI::App* hist_cmd = metrics_cmd->add_subcommand("hist", "BLEU histogram of a score table");
  AddConfigOption(hist_cmd);
  hist_cmd->add_option("--scores", hist.scores, "Score table")->required();
  hist_cmd->add_option("--bin-width", hist.bin_width, "Bin width")->capture_default_str();
  hist_cmd->add_option("--out", hist.out, "Output file (default: standard output)");

  try {
    std::vector<std::string> expanded = ApplyConfig(args);
    std::vector<char*> argv;
    std::string name = "refsmith";
    argv.push_back(name.data());
    for (std::string& a : expanded) argv.push_back(a.data());
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsageError;
  } catch (const Error& e) {
    std::cerr << "refsmith: " << e.what() << '\n';
    return kUsageError;
  }

  try {
    if (*align_cmd) return CmdAlign(align);
    if (*gen_cmd) return CmdGenerate(gen);
    if (*filter_cmd) {
      if (top_opt->count()) filter.top_fraction = top_fraction;
      if (min_opt->count()) filter.min_bleu = min_bleu;
      return CmdFilter(filter);
    }
    if (*ar_cmd) return CmdAr(ar);
    if (*hr_cmd) return CmdHr(hr);
    if (*bleu_cmd) return CmdBleu(bleu);
    if (*hist_cmd) return CmdHist(hist);
  } catch (const DataError& e) {
    std::cerr << "refsmith: " << e.what() << '\n';
    return kDataError;
  } catch (const ProtocolError& e) {
    std::cerr << "refsmith: " << e.what() << '\n';
    return kProtocolError;
  } catch (const DecodeError& e) {
    std::cerr << "refsmith: " << e.what() << '\n';
    return e.protocol() ? kProtocolError : kDataError;
  } catch (const Error& e) {
    std::cerr << "refsmith: " << e.what() << '\n';
    return kUsageError;
  }
  return kUsageError;
}

}  // namespace refsmith::cli
