#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "qaeval/corpus.hpp"
#include "qaeval/errors.hpp"
#include "qaeval/factors.hpp"
#include "qaeval/frame_proxy.hpp"
#include "qaeval/pipeline.hpp"
#include "qaeval/report.hpp"
#include "qaeval/synth.hpp"
#include "qaeval/version.hpp"

namespace {

using namespace qaeval;
namespace fs = std::filesystem;
using nlohmann::ordered_json;

struct Options {
  std::string corpus;
  std::string predictions;
  std::string labels;
  std::string frame_freq;
  std::string lexicon;
  std::string questions;
  std::string proxy_results;
  std::string prompts = "prompts";
  std::string predictor = "stub";
  int alpha = 5;
  std::string metric = "hscore";
  std::string out;
  std::string config;
  int jobs = 1;
  bool include_reference_vote = false;
  std::uint64_t seed = 1;
  std::size_t n_examples = 400;
  std::size_t n_models = 6;
  std::vector<std::string> effects;
  std::vector<double> profile;
  double label_noise = 0.0;
  double base_correct = 0.85;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("read failure on '" + path + "'");
  return ss.str();
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << content;
  if (!out) throw IoError("write failure on '" + path + "'");
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec)
    throw IoError("cannot create directory '" + dir + "': " + ec.message());
}

// The run directory carries the timestamp; files inside never do.
std::string default_out_dir() {
  std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y%m%d-%H%M%S", &tm);
  return std::string("runs/") + buf;
}

std::string out_dir(const Options& o) {
  std::string dir = o.out.empty() ? default_out_dir() : o.out;
  ensure_dir(dir);
  return dir;
}

// Content hash over the effective analysis config plus every input file the
// command reads; identical flags + identical bytes => identical hash.
class RunHash {
 public:
  explicit RunHash(const std::string& command) { kv("command", command); }

  void kv(const std::string& key, const std::string& value) {
    repr_ << key << "=" << value << "\n";
  }
  void kv(const std::string& key, double value) {
    std::ostringstream ss;
    ss << std::setprecision(17) << value;
    kv(key, ss.str());
  }
  void kv(const std::string& key, std::uint64_t value) {
    kv(key, std::to_string(value));
  }
  void kv(const std::string& key, int value) { kv(key, std::to_string(value)); }
  void kv(const std::string& key, bool value) {
    kv(key, std::string(value ? "true" : "false"));
  }

  void file(const std::string& role, const std::string& path) {
    if (!path.empty()) files_.emplace_back(role, slurp(path));
  }

  std::string hex() const {
    std::vector<std::pair<std::string, std::string>> parts;
    parts.emplace_back("config", repr_.str());
    parts.insert(parts.end(), files_.begin(), files_.end());
    return content_hash(parts);
  }

 private:
  std::ostringstream repr_;
  std::vector<std::pair<std::string, std::string>> files_;
};

void write_run_json(const std::string& dir, const std::string& command,
                    const std::string& hash) {
  ordered_json j;
  j["tool_version"] = std::string(kToolVersion);
  j["command"] = command;
  j["config_hash"] = hash;
  write_text(dir + "/run.json", j.dump(2) + "\n");
}

Metric resolve_metric(const std::string& requested, bool metric_explicit,
                      bool has_labels) {
  Metric m = parse_metric(requested);
  if (m == Metric::hscore && !has_labels) {
    if (metric_explicit)
      throw ValidationError(
          "--metric hscore requires --labels; pass a labels file or choose "
          "rouge_l/token_f1");
    return Metric::rouge_l;  // label-free runs fall back to text overlap
  }
  return m;
}

AnalysisOptions analysis_options(const Options& o, Metric metric,
                                 const std::string& hash) {
  AnalysisOptions opts;
  opts.alpha = o.alpha;
  opts.metric = metric;
  opts.jobs = o.jobs;
  opts.include_reference_vote = o.include_reference_vote;
  opts.tool_version = std::string(kToolVersion);
  opts.config_hash = hash;
  return opts;
}

Corpus question_shim(const std::vector<Question>& questions) {
  Corpus c;
  c.examples.resize(questions.size());
  for (std::size_t i = 0; i < questions.size(); ++i) {
    c.examples[i].id = questions[i].id;
    c.by_id[questions[i].id] = i;
  }
  return c;
}

std::unique_ptr<Predictor> make_predictor(const Options& o) {
  if (o.predictor == "stub") return make_stub_predictor();
  const char* endpoint = std::getenv("QAEVAL_PREDICTOR_ENDPOINT");
  if (!endpoint || !*endpoint)
    throw ValidationError(
        "--predictor remote requires QAEVAL_PREDICTOR_ENDPOINT to be set");
  const char* key = std::getenv("QAEVAL_PREDICTOR_API_KEY");
  return make_remote_predictor(endpoint, key ? key : "");
}

void save_proxy_assignments(const std::vector<ProxyResult>& results,
                            const ProxyAssignments& assignments,
                            const std::string& path) {
  std::ostringstream out;
  for (const ProxyResult& r : results)
    for (Factor f : {Factor::nb_fes, Factor::entropy}) {
      const auto& by_id = assignments.status.at(f);
      auto it = by_id.find(r.question_id);
      FactorStatus s = it == by_id.end() ? FactorStatus::excluded : it->second;
      ordered_json j;
      j["example_id"] = r.question_id;
      j["factor"] = std::string(factor_name(f));
      j["status"] = std::string(factor_status_name(s));
      out << j.dump() << "\n";
    }
  write_text(path, out.str());
}

int cmd_evaluate(const Options& o, bool metric_explicit) {
  RunHash hash("evaluate");
  hash.kv("alpha", o.alpha);
  hash.kv("include_reference_vote", o.include_reference_vote);
  hash.file("corpus", o.corpus);
  hash.file("predictions", o.predictions);
  hash.file("labels", o.labels);

  Corpus corpus = load_corpus(o.corpus);
  PredictionSet preds = load_predictions(o.predictions, corpus);
  std::optional<LabelSet> labels;
  if (!o.labels.empty()) labels = load_labels(o.labels, preds);
  Metric metric = resolve_metric(o.metric, metric_explicit, labels.has_value());
  hash.kv("metric", std::string(metric_name(metric)));
  std::string hex = hash.hex();

  AnalysisOptions opts = analysis_options(o, metric, hex);
  ReportBundle bundle =
      analyze(corpus, preds, labels ? &*labels : nullptr, nullptr, opts);
  std::vector<RoverRow> rover = run_rover(corpus, preds, opts);

  std::string dir = out_dir(o);
  write_text(dir + "/leaderboard.csv", render_leaderboard_csv(bundle));
  save_rover(rover, dir + "/rover.jsonl");
  write_run_json(dir, "evaluate", hex);
  std::cout << "wrote: " << dir << "\n";
  return 0;
}

int cmd_analyze(const Options& o, bool metric_explicit) {
  const bool proxy_mode = !o.proxy_results.empty();
  RunHash hash("analyze");
  hash.kv("mode", std::string(proxy_mode ? "proxy" : "corpus"));
  hash.kv("alpha", o.alpha);
  hash.kv("include_reference_vote", o.include_reference_vote);

  if (proxy_mode) {
    if (o.questions.empty())
      throw ValidationError("--proxy-results requires --questions");
    if (o.lexicon.empty())
      throw ValidationError("--proxy-results requires --lexicon");
    if (o.predictions.empty())
      throw ValidationError("analyze requires --predictions");
    hash.file("questions", o.questions);
    hash.file("predictions", o.predictions);
    hash.file("labels", o.labels);
    hash.file("lexicon", o.lexicon);
    hash.file("proxy_results", o.proxy_results);

    std::vector<Question> questions = load_questions(o.questions);
    Corpus shim = question_shim(questions);
    PredictionSet preds = load_predictions(o.predictions, shim);
    std::optional<LabelSet> labels;
    if (!o.labels.empty()) labels = load_labels(o.labels, preds);
    FrameLexicon lexicon = load_lexicon(o.lexicon);
    std::vector<ProxyResult> results = load_proxy_results(o.proxy_results);
    Metric metric =
        resolve_metric(o.metric, metric_explicit, labels.has_value());
    hash.kv("metric", std::string(metric_name(metric)));
    std::string hex = hash.hex();

    AnalysisOptions opts = analysis_options(o, metric, hex);
    ReportBundle bundle = analyze_proxy(questions, preds,
                                        labels ? &*labels : nullptr, results,
                                        lexicon, opts);
    std::string dir = out_dir(o);
    export_bundle(bundle, dir);
    write_run_json(dir, "analyze", hex);
    std::cout << "wrote: " << dir << "\n";
    return analysis_degenerate(bundle) ? 3 : 0;
  }

  if (o.corpus.empty()) throw ValidationError("analyze requires --corpus");
  if (o.predictions.empty())
    throw ValidationError("analyze requires --predictions");
  hash.file("corpus", o.corpus);
  hash.file("predictions", o.predictions);
  hash.file("labels", o.labels);
  hash.file("frame_freq", o.frame_freq);

  Corpus corpus = load_corpus(o.corpus);
  PredictionSet preds = load_predictions(o.predictions, corpus);
  std::optional<LabelSet> labels;
  if (!o.labels.empty()) labels = load_labels(o.labels, preds);
  std::optional<std::map<std::string, std::int64_t>> freq;
  if (!o.frame_freq.empty()) freq = load_frame_freq(o.frame_freq);
  if (!freq)
    std::cerr << "warning: no --frame-freq given; the bias factor is skipped\n";
  Metric metric = resolve_metric(o.metric, metric_explicit, labels.has_value());
  hash.kv("metric", std::string(metric_name(metric)));
  std::string hex = hash.hex();

  AnalysisOptions opts = analysis_options(o, metric, hex);
  ReportBundle bundle = analyze(corpus, preds, labels ? &*labels : nullptr,
                                freq ? &*freq : nullptr, opts);
  std::vector<RoverRow> rover = run_rover(corpus, preds, opts);
  FactorAssignments assignments =
      assign_all_factors(corpus, freq ? &*freq : nullptr);

  std::string dir = out_dir(o);
  export_bundle(bundle, dir);
  save_rover(rover, dir + "/rover.jsonl");
  save_factor_assignments(corpus, assignments, dir + "/factors.jsonl");
  write_run_json(dir, "analyze", hex);
  std::cout << "wrote: " << dir << "\n";
  return analysis_degenerate(bundle) ? 3 : 0;
}

int cmd_rover(const Options& o) {
  RunHash hash("rover");
  hash.kv("alpha", o.alpha);
  hash.kv("include_reference_vote", o.include_reference_vote);
  hash.file("corpus", o.corpus);
  hash.file("predictions", o.predictions);
  std::string hex = hash.hex();

  Corpus corpus = load_corpus(o.corpus);
  PredictionSet preds = load_predictions(o.predictions, corpus);
  AnalysisOptions opts = analysis_options(o, Metric::rouge_l, hex);
  std::vector<RoverRow> rows = run_rover(corpus, preds, opts);

  std::string dir = out_dir(o);
  save_rover(rows, dir + "/rover.jsonl");
  write_run_json(dir, "rover", hex);
  std::cout << "wrote: " << dir << "\n";
  return 0;
}

int cmd_factors(const Options& o) {
  RunHash hash("factors");
  hash.file("corpus", o.corpus);
  hash.file("frame_freq", o.frame_freq);
  std::string hex = hash.hex();

  Corpus corpus = load_corpus(o.corpus);
  std::optional<std::map<std::string, std::int64_t>> freq;
  if (!o.frame_freq.empty()) freq = load_frame_freq(o.frame_freq);
  if (!freq)
    std::cerr << "warning: no --frame-freq given; the bias factor is skipped\n";
  FactorAssignments assignments =
      assign_all_factors(corpus, freq ? &*freq : nullptr);

  std::string dir = out_dir(o);
  save_factor_assignments(corpus, assignments, dir + "/factors.jsonl");
  write_text(dir + "/thresholds.json",
             render_thresholds_json(assignments.thresholds));
  write_run_json(dir, "factors", hex);
  std::cout << "wrote: " << dir << "\n";
  return 0;
}

int cmd_proxy(const Options& o) {
  RunHash hash("proxy");
  hash.kv("predictor", o.predictor);
  hash.file("questions", o.questions);
  hash.file("lexicon", o.lexicon);
  hash.file("frame_select", o.prompts + "/frame_select.txt");
  hash.file("fe_extract", o.prompts + "/fe_extract.txt");
  std::string hex = hash.hex();

  std::vector<Question> questions = load_questions(o.questions);
  FrameLexicon lexicon = load_lexicon(o.lexicon);
  PromptTemplates prompts = load_prompts(o.prompts);
  std::unique_ptr<Predictor> predictor = make_predictor(o);
  std::vector<ProxyResult> results =
      run_proxy(questions, lexicon, prompts, *predictor);
  ProxySummary summary = summarize_proxy(results);
  ProxyAssignments assignments = proxy_factor_assignments(results, lexicon);

  std::string dir = out_dir(o);
  save_proxy_results(results, dir + "/proxy_results.jsonl");
  save_proxy_assignments(results, assignments, dir + "/factors.jsonl");
  write_text(dir + "/thresholds.json",
             render_thresholds_json(assignments.thresholds));
  write_run_json(dir, "proxy", hex);
  std::cout << "proxy: total=" << summary.total << " ok=" << summary.ok << "\n"
            << "discarded: no_triggers=" << summary.no_triggers
            << " unknown_frame=" << summary.unknown_frame
            << " fe_extraction_failed=" << summary.fe_extraction_failed
            << " transport_failed=" << summary.transport_failed << "\n";
  std::cout << "wrote: " << dir << "\n";
  return 0;
}

int cmd_synth(const Options& o) {
  SynthSpec spec;
  spec.seed = o.seed;
  spec.n_examples = o.n_examples;
  spec.n_models = o.n_models;
  spec.agreement_profile = o.profile;
  spec.label_noise = o.label_noise;
  spec.base_correct = o.base_correct;
  RunHash hash("synth");
  hash.kv("seed", spec.seed);
  hash.kv("n_examples", static_cast<std::uint64_t>(spec.n_examples));
  hash.kv("n_models", static_cast<std::uint64_t>(spec.n_models));
  hash.kv("label_noise", spec.label_noise);
  hash.kv("base_correct", spec.base_correct);
  for (const std::string& effect : o.effects) {
    std::size_t eq = effect.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == effect.size())
      throw ValidationError("invalid --effect '" + effect +
                            "' (expected factor=drop, e.g. coref=-0.4)");
    Factor f = parse_factor(effect.substr(0, eq));
    double drop = 0.0;
    try {
      std::size_t used = 0;
      drop = std::stod(effect.substr(eq + 1), &used);
      if (used != effect.size() - eq - 1) throw std::invalid_argument("");
    } catch (const std::exception&) {
      throw ValidationError("invalid --effect '" + effect +
                            "' (expected factor=drop, e.g. coref=-0.4)");
    }
    spec.effects[f] = drop;
    hash.kv("effect." + std::string(factor_name(f)), drop);
  }
  for (std::size_t i = 0; i < o.profile.size(); ++i)
    hash.kv("profile." + std::to_string(i), o.profile[i]);
  std::string hex = hash.hex();

  SynthData data = generate(spec);
  std::string dir = out_dir(o);
  save_corpus(data.corpus, dir + "/corpus.jsonl");
  save_predictions(data.predictions, dir + "/predictions.jsonl");
  save_labels(data.labels, data.predictions.model_order, dir + "/labels.jsonl");
  save_frame_freq(data.frame_freq, dir + "/frame_freq.tsv");
  write_run_json(dir, "synth", hex);
  std::cout << "wrote: " << dir << "\n";
  return 0;
}

void add_out_jobs(CLI::App* sub, Options& o, bool with_jobs = true) {
  sub->add_option("--out", o.out,
                  "Output directory (default: runs/<timestamp>)");
  if (with_jobs)
    sub->add_option("--jobs", o.jobs, "Worker threads for per-example stages")
        ->capture_default_str()
        ->check(CLI::Range(1, 4096));
  sub->add_option("--config", o.config,
                  "TOML-style key=value file holding the same keys as the "
                  "flags; command-line flags override it");
}

// Merges a --config file into the argument list before parsing: each key
// becomes the matching --flag unless that flag was already given on the
// command line, so config values still pass option validation and the
// precedence is flags > file > defaults.
std::vector<std::string> apply_config_args(std::vector<std::string> args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size())
      path = args[i + 1];
    else if (args[i].rfind("--config=", 0) == 0)
      path = args[i].substr(9);
  }
  if (path.empty()) return args;
  if (!std::ifstream(path)) throw IoError("cannot read '" + path + "'");
  std::vector<CLI::ConfigItem> items;
  try {
    items = CLI::ConfigTOML{}.from_file(path);
  } catch (const CLI::Error& e) {
    throw ValidationError("bad config file '" + path + "': " + e.what());
  }
  auto given = [&args](const std::string& flag) {
    for (const std::string& a : args)
      if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
    return false;
  };
  for (const CLI::ConfigItem& item : items) {
    if (!item.parents.empty())
      throw ValidationError("bad config file '" + path + "': key '" +
                            item.fullname() +
                            "' is sectioned; use flat keys");
    std::string flag = "--" + item.name;
    if (given(flag)) continue;
    if (item.inputs.size() == 1) {
      args.push_back(flag + "=" + item.inputs.front());
    } else {
      args.push_back(flag);
      for (const std::string& value : item.inputs) args.push_back(value);
    }
  }
  return args;
}

void add_metric_alpha(CLI::App* sub, Options& o) {
  sub->add_option("--alpha", o.alpha,
                  "Agreement threshold: answers closer than this edit "
                  "distance vote together")
      ->capture_default_str()
      ->check(CLI::Range(1, 1000000));
  sub->add_option("--metric", o.metric,
                  "Score S(m,.) used for subsets and curves")
      ->capture_default_str()
      ->check(CLI::IsMember({"hscore", "rouge_l", "token_f1"}));
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  CLI::App app{
      "QA-evaluation toolkit: answer scoring, agreement voting, "
      "complexity-factor analysis, and report generation"};
  app.require_subcommand(1);

  CLI::App* evaluate =
      app.add_subcommand("evaluate", "Score models and write the leaderboard");
  evaluate->add_option("--corpus", o.corpus, "Evaluation corpus (JSONL)")
      ->required();
  evaluate
      ->add_option("--predictions", o.predictions,
                   "Per-model predicted answers (JSONL)")
      ->required();
  evaluate->add_option("--labels", o.labels,
                       "Per-model human labels (JSONL); omit for a "
                       "text-overlap-only leaderboard");
  add_metric_alpha(evaluate, o);
  evaluate->add_flag("--include-reference-vote", o.include_reference_vote,
                     "Let the reference answer vote as a pseudo-model");
  add_out_jobs(evaluate, o);

  CLI::App* analyze = app.add_subcommand(
      "analyze", "Full analysis: delta matrix, curves, frames, bins");
  analyze->add_option("--corpus", o.corpus, "Evaluation corpus (JSONL)");
  analyze->add_option("--predictions", o.predictions,
                      "Per-model predicted answers (JSONL)");
  analyze->add_option("--labels", o.labels,
                      "Per-model human labels (JSONL); omit for a "
                      "text-overlap-only analysis");
  analyze->add_option("--frame-freq", o.frame_freq,
                      "Adaptation-corpus frame frequencies (TSV); omit to "
                      "skip the bias factor");
  analyze->add_option("--questions", o.questions,
                      "Question set (JSONL) for --proxy-results mode");
  analyze->add_option("--lexicon", o.lexicon,
                      "frame<TAB>trigger lexicon for --proxy-results mode");
  analyze->add_option("--proxy-results", o.proxy_results,
                      "proxy_results.jsonl from the proxy command; switches "
                      "the analysis to proxy-derived factors");
  add_metric_alpha(analyze, o);
  analyze->add_flag("--include-reference-vote", o.include_reference_vote,
                    "Let the reference answer vote as a pseudo-model");
  add_out_jobs(analyze, o);

  CLI::App* rover =
      app.add_subcommand("rover", "Agreement voting only; writes rover.jsonl");
  rover->add_option("--corpus", o.corpus, "Evaluation corpus (JSONL)")
      ->required();
  rover
      ->add_option("--predictions", o.predictions,
                   "Per-model predicted answers (JSONL)")
      ->required();
  rover
      ->add_option("--alpha", o.alpha,
                   "Agreement threshold: answers closer than this edit "
                   "distance vote together")
      ->capture_default_str()
      ->check(CLI::Range(1, 1000000));
  rover->add_flag("--include-reference-vote", o.include_reference_vote,
                  "Let the reference answer vote as a pseudo-model");
  add_out_jobs(rover, o);

  CLI::App* factors = app.add_subcommand(
      "factors", "Factor assignments only; writes factors.jsonl + thresholds");
  factors->add_option("--corpus", o.corpus, "Evaluation corpus (JSONL)")
      ->required();
  factors->add_option("--frame-freq", o.frame_freq,
                      "Adaptation-corpus frame frequencies (TSV); omit to "
                      "skip the bias factor");
  add_out_jobs(factors, o, /*with_jobs=*/false);

  CLI::App* proxy = app.add_subcommand(
      "proxy", "Frame-proxy pipeline over a question set");
  proxy->add_option("--questions", o.questions, "Question set (JSONL)")
      ->required();
  proxy->add_option("--lexicon", o.lexicon, "frame<TAB>trigger lexicon (TSV)")
      ->required();
  proxy
      ->add_option("--prompts", o.prompts,
                   "Directory holding frame_select.txt and fe_extract.txt")
      ->capture_default_str();
  proxy
      ->add_option("--predictor", o.predictor,
                   "Frame/FE predictor; remote reads "
                   "QAEVAL_PREDICTOR_ENDPOINT and QAEVAL_PREDICTOR_API_KEY")
      ->capture_default_str()
      ->check(CLI::IsMember({"stub", "remote"}));
  add_out_jobs(proxy, o, /*with_jobs=*/false);

  CLI::App* synth = app.add_subcommand(
      "synth", "Generate a deterministic synthetic evaluation fixture");
  synth->add_option("--seed", o.seed, "Generator seed")->capture_default_str();
  synth->add_option("--n-examples", o.n_examples, "Examples (even, >= 8)")
      ->capture_default_str();
  synth->add_option("--n-models", o.n_models, "Models (1..25)")
      ->capture_default_str();
  synth->add_option("--effect", o.effects,
                    "Planted score drop, factor=drop (repeatable), e.g. "
                    "coref=-0.4");
  synth
      ->add_option("--profile", o.profile,
                   "Target partition distribution P1..Pn (comma-separated, "
                   "sums to 1; default uniform)")
      ->delimiter(',');
  synth->add_option("--label-noise", o.label_noise,
                    "Probability a label is replaced by a random one")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  synth->add_option("--base-correct", o.base_correct,
                    "Correct-label probability on the all-easy side")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  add_out_jobs(synth, o, /*with_jobs=*/false);

  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    args = apply_config_args(std::move(args));
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  std::reverse(args.begin(), args.end());

  try {
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (app.got_subcommand(evaluate))
      return cmd_evaluate(o, evaluate->count("--metric") > 0);
    if (app.got_subcommand(analyze))
      return cmd_analyze(o, analyze->count("--metric") > 0);
    if (app.got_subcommand(rover)) return cmd_rover(o);
    if (app.got_subcommand(factors)) return cmd_factors(o);
    if (app.got_subcommand(proxy)) return cmd_proxy(o);
    if (app.got_subcommand(synth)) return cmd_synth(o);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
