#include "qaeval/pipeline.hpp"

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "qaeval/errors.hpp"
#include "qaeval/frame_proxy.hpp"
#include "qaeval/synth.hpp"

using namespace qaeval;

namespace {

Example make_example(std::string id, std::string reference, std::string frame,
                     std::string lu, LuPos pos, int fe_count, bool coref,
                     bool trig_q, std::optional<int> dist) {
  Example e;
  e.id = std::move(id);
  e.context = "ctx";
  e.question = "q";
  e.reference_answer = std::move(reference);
  e.frame = std::move(frame);
  e.lu_text = std::move(lu);
  e.lu_pos = pos;
  e.fe_count = fe_count;
  e.coref_required = coref;
  e.trigger_in_question = trig_q;
  e.dep_distance = dist;
  return e;
}

Corpus make_corpus(std::vector<Example> examples) {
  Corpus c;
  c.examples = std::move(examples);
  for (std::size_t i = 0; i < c.examples.size(); ++i)
    c.by_id[c.examples[i].id] = i;
  return c;
}

// Four examples engineered so every factor splits 2/2 (dist 2/1 with one
// exclusion) and all aggregates are hand-computable. Voting at alpha = 5:
// e1/e3 full agreement (k=2), e2/e4 total disagreement (k=1); model m1
// always wins the tie-break.
Corpus small_corpus() {
  return make_corpus({
      make_example("e1", "Paris", "FrameA", "alpha", LuPos::nominal, 2, true,
                   false, 2),
      make_example("e2", "Berlin", "FrameA", "beta", LuPos::verbal, 5, false,
                   true, 1),
      make_example("e3", "Paris", "FrameB", "gamma", LuPos::verbal, 1, true,
                   true, std::nullopt),
      make_example("e4", "aaaaaaaaaa", "FrameB", "gamma", LuPos::nominal, 3,
                   false, false, 3),
  });
}

PredictionSet small_predictions() {
  PredictionSet p;
  p.model_order = {"m1", "m2"};
  p.answers["m1"] = {{"e1", "Paris"},
                     {"e2", "Berlin"},
                     {"e3", "London"},
                     {"e4", "aaaaaaaaaa"}};
  p.answers["m2"] = {{"e1", "Paris"},
                     {"e2", "wholly unrelated words"},
                     {"e3", "London"},
                     {"e4", "zzzzzzzzzz"}};
  return p;
}

LabelSet small_labels() {
  LabelSet l;
  l.labels["m1"] = {{"e1", Label::correct},
                    {"e2", Label::partially_correct},
                    {"e3", Label::incorrect},
                    {"e4", Label::correct}};
  l.labels["m2"] = {{"e1", Label::correct},
                    {"e2", Label::incorrect},
                    {"e3", Label::correct},
                    {"e4", Label::incorrect}};
  return l;
}

std::map<std::string, std::int64_t> small_freq() {
  return {{"FrameA", 1}, {"FrameB", 100}};
}

const DeltaCell& cell(const ReportBundle& b, const std::string& model,
                      Factor f) {
  for (const DeltaCell& c : b.delta_matrix)
    if (c.model == model && c.factor == f) return c;
  REQUIRE(false);
  return b.delta_matrix.front();
}

}  // namespace

TEST_CASE("run_rover votes and winners on a handmade corpus") {
  Corpus corpus = small_corpus();
  PredictionSet preds = small_predictions();
  AnalysisOptions options;
  std::vector<RoverRow> rows = run_rover(corpus, preds, options);
  REQUIRE(rows.size() == 4);

  CHECK(rows[0].example_id == "e1");
  CHECK(rows[0].k == 2);
  CHECK(rows[0].winner_model == "m1");
  CHECK(rows[0].answer == "Paris");
  REQUIRE(rows[0].votes.size() == 2);
  CHECK(rows[0].votes[0].first == "m1");
  CHECK(rows[0].votes[0].second == 2);
  CHECK(rows[0].votes[1].second == 2);

  CHECK(rows[1].k == 1);
  CHECK(rows[1].winner_model == "m1");
  CHECK(rows[1].answer == "Berlin");
  CHECK(rows[1].votes[0].second == 1);
  CHECK(rows[1].votes[1].second == 1);

  CHECK(rows[2].k == 2);
  CHECK(rows[2].answer == "London");
  CHECK(rows[3].k == 1);
  CHECK(rows[3].answer == "aaaaaaaaaa");
}

TEST_CASE("run_rover reference voting: outright win and tie-break") {
  Corpus corpus = make_corpus(
      {make_example("e1", "mmmmmmmm", "F", "lu", LuPos::verbal, 1, false, false,
                    1)});
  PredictionSet preds;
  preds.model_order = {"m1", "m2"};
  // Both models sit within alpha of the reference but 8 edits from each
  // other, so only the reference gathers three votes.
  preds.answers["m1"] = {{"e1", "aaaammmmmmmm"}};
  preds.answers["m2"] = {{"e1", "mmmmmmmmzzzz"}};
  AnalysisOptions options;
  options.include_reference_vote = true;
  std::vector<RoverRow> rows = run_rover(corpus, preds, options);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].k == 3);
  CHECK(rows[0].winner_model == "");
  CHECK(rows[0].answer == "mmmmmmmm");
  REQUIRE(rows[0].votes.size() == 3);
  CHECK(rows[0].votes[2].first == "reference");
  CHECK(rows[0].votes[2].second == 3);

  // A model tying the reference keeps the answer (lower index wins).
  preds.answers["m1"] = {{"e1", "mmmmmmmm"}};
  preds.answers["m2"] = {{"e1", "different12345"}};
  rows = run_rover(corpus, preds, options);
  CHECK(rows[0].k == 2);
  CHECK(rows[0].winner_model == "m1");
  CHECK(rows[0].answer == "mmmmmmmm");

  PredictionSet clash;
  clash.model_order = {"reference"};
  clash.answers["reference"] = {{"e1", "x"}};
  CHECK_THROWS_AS(run_rover(corpus, clash, options), ValidationError);
}

TEST_CASE("run_rover names the example missing a prediction") {
  Corpus corpus = small_corpus();
  PredictionSet preds = small_predictions();
  preds.answers["m2"].erase("e2");
  AnalysisOptions options;
  CHECK_THROWS_WITH_AS(run_rover(corpus, preds, options),
                       doctest::Contains("e2"), ValidationError);
}

TEST_CASE("run_rover is invariant under the job count") {
  SynthSpec spec;
  spec.seed = 3;
  spec.n_examples = 40;
  spec.n_models = 5;
  SynthData data = generate(spec);
  AnalysisOptions serial;
  AnalysisOptions threaded;
  threaded.jobs = 4;
  std::vector<RoverRow> a = run_rover(data.corpus, data.predictions, serial);
  std::vector<RoverRow> b = run_rover(data.corpus, data.predictions, threaded);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].example_id == b[i].example_id);
    CHECK(a[i].answer == b[i].answer);
    CHECK(a[i].k == b[i].k);
    CHECK(a[i].winner_model == b[i].winner_model);
    CHECK(a[i].votes == b[i].votes);
  }
}

TEST_CASE("save_rover emits one record per example with the fixed keys") {
  namespace fs = std::filesystem;
  Corpus corpus = small_corpus();
  PredictionSet preds = small_predictions();
  AnalysisOptions options;
  std::vector<RoverRow> rows = run_rover(corpus, preds, options);
  fs::path path = fs::temp_directory_path() / "qaeval_pipeline_rover.jsonl";
  save_rover(rows, path.string());

  std::ifstream in(path);
  std::string line;
  std::vector<nlohmann::ordered_json> records;
  while (std::getline(in, line))
    records.push_back(nlohmann::ordered_json::parse(line));
  REQUIRE(records.size() == 4);
  const auto& first = records[0];
  std::vector<std::string> keys;
  for (const auto& item : first.items()) keys.push_back(item.key());
  CHECK(keys == std::vector<std::string>{"example_id", "rover_answer", "k",
                                         "partition", "votes"});
  CHECK(first["example_id"] == "e1");
  CHECK(first["rover_answer"] == "Paris");
  CHECK(first["k"] == 2);
  CHECK(first["partition"] == 2);
  CHECK(first["votes"]["m1"] == 2);
  CHECK(first["votes"]["m2"] == 2);
  fs::remove(path);
}

TEST_CASE("score_predictions under each metric") {
  Corpus corpus = small_corpus();
  PredictionSet preds = small_predictions();
  LabelSet labels = small_labels();

  ScoreTable rouge = score_predictions(corpus, preds, nullptr, Metric::rouge_l);
  CHECK(*rouge.at("m1")[0] == doctest::Approx(1.0));
  CHECK(*rouge.at("m1")[2] == doctest::Approx(0.0));
  CHECK(*rouge.at("m2")[1] == doctest::Approx(0.0));

  ScoreTable hs = score_predictions(corpus, preds, &labels, Metric::hscore);
  CHECK(*hs.at("m1")[0] == doctest::Approx(1.0));
  CHECK(*hs.at("m1")[1] == doctest::Approx(0.5));
  CHECK(*hs.at("m1")[2] == doctest::Approx(0.0));
  CHECK(*hs.at("m2")[2] == doctest::Approx(1.0));

  labels.labels["m1"].erase("e3");
  ScoreTable partial = score_predictions(corpus, preds, &labels, Metric::hscore);
  CHECK_FALSE(partial.at("m1")[2].has_value());
  CHECK(partial.at("m2")[2].has_value());

  CHECK_THROWS_AS(score_predictions(corpus, preds, nullptr, Metric::hscore),
                  ValidationError);
}

TEST_CASE("analyze leaderboard with the rover row on the handmade corpus") {
  Corpus corpus = small_corpus();
  PredictionSet preds = small_predictions();
  LabelSet labels = small_labels();
  auto freq = small_freq();
  AnalysisOptions options;
  options.tool_version = "0.0-test";
  options.config_hash = "deadbeef";
  ReportBundle b = analyze(corpus, preds, &labels, &freq, options);

  CHECK(b.tool_version == "0.0-test");
  CHECK(b.config_hash == "deadbeef");
  CHECK(b.models == std::vector<std::string>{"m1", "m2"});
  REQUIRE(b.leaderboard.size() == 3);
  CHECK(b.leaderboard[0].model == "m1");
  CHECK(b.leaderboard[0].rouge_l == doctest::Approx(0.75));
  CHECK(*b.leaderboard[0].hscore == doctest::Approx(0.625));
  CHECK(*b.leaderboard[0].hcorrect == doctest::Approx(0.5));
  CHECK(b.leaderboard[0].n == 4);
  CHECK(b.leaderboard[1].model == "m2");
  CHECK(b.leaderboard[1].rouge_l == doctest::Approx(0.25));
  CHECK(*b.leaderboard[1].hscore == doctest::Approx(0.5));
  CHECK(b.leaderboard[2].model == "ROVER");
  CHECK(b.leaderboard[2].rouge_l == doctest::Approx(0.75));
  CHECK(*b.leaderboard[2].hscore == doctest::Approx(0.625));
  CHECK(b.leaderboard[2].n == 4);
}

TEST_CASE("analyze delta matrix matches hand-computed subset means") {
  Corpus corpus = small_corpus();
  PredictionSet preds = small_predictions();
  LabelSet labels = small_labels();
  auto freq = small_freq();
  AnalysisOptions options;
  ReportBundle b = analyze(corpus, preds, &labels, &freq, options);

  CHECK(b.factors == std::vector<Factor>(kAllFactors.begin(), kAllFactors.end()));
  REQUIRE(b.delta_matrix.size() == 2 * 7);

  const DeltaCell& bias1 = cell(b, "m1", Factor::bias);
  CHECK(bias1.score_hard == doctest::Approx(0.75));
  CHECK(bias1.score_easy == doctest::Approx(0.5));
  CHECK(*bias1.delta == 25);
  CHECK(bias1.size_fraction == doctest::Approx(0.5));
  CHECK(bias1.n_hard == 2);
  CHECK(bias1.n_easy == 2);
  CHECK_FALSE(bias1.significant);

  CHECK(*cell(b, "m2", Factor::bias).delta == 0);
  CHECK(*cell(b, "m1", Factor::coref).delta == -25);
  CHECK(*cell(b, "m2", Factor::coref).delta == 100);
  CHECK_FALSE(cell(b, "m2", Factor::coref).significant);
  CHECK(*cell(b, "m1", Factor::trigger).delta == 75);
  CHECK(*cell(b, "m1", Factor::lu_in_q).delta == 75);
  CHECK(*cell(b, "m1", Factor::nb_fes).delta == -25);
  CHECK(*cell(b, "m1", Factor::entropy).delta == 25);

  const DeltaCell& dist1 = cell(b, "m1", Factor::dist);
  CHECK(*dist1.delta == 50);
  CHECK(dist1.n_hard == 2);
  CHECK(dist1.n_easy == 1);
  CHECK(dist1.n_excluded == 1);
  CHECK(dist1.size_fraction == doctest::Approx(2.0 / 3.0));

  CHECK(b.thresholds.entropy_threshold == doctest::Approx(0.5));
  CHECK(b.thresholds.bias_median_frequency == doctest::Approx(50.5));
}

TEST_CASE("analyze partition curve and factor probabilities") {
  Corpus corpus = small_corpus();
  PredictionSet preds = small_predictions();
  LabelSet labels = small_labels();
  auto freq = small_freq();
  AnalysisOptions options;
  ReportBundle b = analyze(corpus, preds, &labels, &freq, options);

  REQUIRE(b.partition_curve.size() == 2);
  CHECK(b.partition_curve[0].partition == 1);
  CHECK(b.partition_curve[0].size == 2);
  CHECK(b.partition_curve[0].models[0].mean == doctest::Approx(0.75));
  CHECK(b.partition_curve[0].models[1].mean == doctest::Approx(0.0));
  CHECK(b.partition_curve[0].rover.mean == doctest::Approx(0.75));
  CHECK(b.partition_curve[1].size == 2);
  CHECK(b.partition_curve[1].models[0].mean == doctest::Approx(0.5));
  CHECK(b.partition_curve[1].models[1].mean == doctest::Approx(1.0));

  REQUIRE(b.factor_probability.size() == 7);
  const FactorProbRow* coref = nullptr;
  const FactorProbRow* dist = nullptr;
  for (const FactorProbRow& row : b.factor_probability) {
    if (row.factor == Factor::coref) coref = &row;
    if (row.factor == Factor::dist) dist = &row;
  }
  REQUIRE(coref != nullptr);
  CHECK(coref->partitions[0].mean == doctest::Approx(0.0));
  CHECK(coref->partitions[1].mean == doctest::Approx(1.0));
  CHECK(coref->partitions[1].n == 2);
  REQUIRE(dist != nullptr);
  CHECK(dist->partitions[0].mean == doctest::Approx(0.5));
  CHECK(dist->partitions[1].mean == doctest::Approx(1.0));
  CHECK(dist->partitions[1].n == 1);
}

TEST_CASE("analyze sorts frame scores ascending by the rover mean") {
  Corpus corpus = small_corpus();
  PredictionSet preds = small_predictions();
  LabelSet labels = small_labels();
  auto freq = small_freq();
  AnalysisOptions options;
  ReportBundle b = analyze(corpus, preds, &labels, &freq, options);

  REQUIRE(b.frame_scores.size() == 2);
  CHECK(b.frame_scores[0].frame == "FrameB");
  CHECK(b.frame_scores[0].count == 2);
  CHECK(b.frame_scores[0].rover.mean == doctest::Approx(0.5));
  CHECK(b.frame_scores[1].frame == "FrameA");
  CHECK(b.frame_scores[1].rover.mean == doctest::Approx(0.75));
}

TEST_CASE("analyze combination bins count hard factors") {
  Corpus corpus = small_corpus();
  PredictionSet preds = small_predictions();
  LabelSet labels = small_labels();
  auto freq = small_freq();
  AnalysisOptions options;
  ReportBundle b = analyze(corpus, preds, &labels, &freq, options);

  REQUIRE(b.combination_bins.size() == 4);  // 0, 1, 2, excluded
  CHECK(b.combination_bins[0].bin == "0");
  CHECK(b.combination_bins[0].size == 1);
  CHECK(b.combination_bins[0].models[0].mean == doctest::Approx(1.0));
  CHECK(b.combination_bins[1].bin == "1");
  CHECK(b.combination_bins[1].size == 2);
  CHECK(b.combination_bins[1].models[0].mean == doctest::Approx(0.25));
  CHECK(b.combination_bins[2].bin == "2");
  CHECK(b.combination_bins[2].size == 1);
  CHECK(b.combination_bins[3].bin == "excluded");
  CHECK(b.combination_bins[3].size == 0);
  CHECK_FALSE(b.combination_bins[3].rover.present);
}

TEST_CASE("analyze without a frequency table skips bias") {
  Corpus corpus = small_corpus();
  PredictionSet preds = small_predictions();
  LabelSet labels = small_labels();
  AnalysisOptions options;
  ReportBundle b = analyze(corpus, preds, &labels, nullptr, options);
  CHECK(b.factors.size() == 6);
  for (Factor f : b.factors) CHECK(f != Factor::bias);
  CHECK(b.delta_matrix.size() == 2 * 6);
  CHECK(b.thresholds.bias_median_frequency == doctest::Approx(0.0));
}

TEST_CASE("analyze without labels runs rouge-only") {
  Corpus corpus = small_corpus();
  PredictionSet preds = small_predictions();
  auto freq = small_freq();
  AnalysisOptions options;
  options.metric = Metric::rouge_l;
  ReportBundle b = analyze(corpus, preds, nullptr, &freq, options);
  CHECK_FALSE(b.leaderboard[0].hscore.has_value());
  CHECK_FALSE(b.leaderboard[2].hscore.has_value());
  CHECK(b.leaderboard[0].n == 4);
  CHECK(*cell(b, "m1", Factor::bias).delta == 50);

  AnalysisOptions bad;
  CHECK_THROWS_AS(analyze(corpus, preds, nullptr, &freq, bad), ValidationError);
}

TEST_CASE("analysis_degenerate flags the all-degenerate matrix") {
  Corpus one = make_corpus({make_example("e1", "Paris", "F", "lu",
                                         LuPos::verbal, 1, false, true,
                                         std::nullopt)});
  PredictionSet preds;
  preds.model_order = {"m1"};
  preds.answers["m1"] = {{"e1", "Paris"}};
  AnalysisOptions options;
  options.metric = Metric::rouge_l;
  ReportBundle b = analyze(one, preds, nullptr, nullptr, options);
  CHECK(analysis_degenerate(b));

  ReportBundle full = analyze(small_corpus(), small_predictions(), nullptr,
                              nullptr, options);
  CHECK_FALSE(analysis_degenerate(full));
}

TEST_CASE("analyze recovers a planted effect on synthetic data") {
  SynthSpec spec;
  spec.seed = 7;
  spec.effects[Factor::coref] = -0.4;
  SynthData data = generate(spec);
  AnalysisOptions options;
  ReportBundle b = analyze(data.corpus, data.predictions, &data.labels,
                           &data.frame_freq, options);
  for (const std::string& model : b.models) {
    const DeltaCell& c = cell(b, model, Factor::coref);
    REQUIRE_FALSE(c.degenerate);
    CHECK(*c.delta == -40);
    CHECK(c.significant);
    CHECK(c.score_hard == doctest::Approx(0.45));
    CHECK(c.score_easy == doctest::Approx(0.85));
  }
  for (std::size_t m = 0; m + 1 < b.leaderboard.size(); ++m)
    CHECK(*b.leaderboard[m].hscore == doctest::Approx(0.65).epsilon(1e-12));
  CHECK_FALSE(analysis_degenerate(b));
}

TEST_CASE("analyze is deterministic across job counts") {
  SynthSpec spec;
  spec.seed = 11;
  spec.n_examples = 60;
  spec.n_models = 4;
  spec.effects[Factor::entropy] = -0.3;
  SynthData data = generate(spec);
  AnalysisOptions serial;
  AnalysisOptions threaded;
  threaded.jobs = 8;
  ReportBundle a = analyze(data.corpus, data.predictions, &data.labels,
                           &data.frame_freq, serial);
  ReportBundle b = analyze(data.corpus, data.predictions, &data.labels,
                           &data.frame_freq, threaded);
  CHECK(render_report_markdown(a) == render_report_markdown(b));
  CHECK(render_delta_csv(a) == render_delta_csv(b));
  CHECK(render_curve_csv(a) == render_curve_csv(b));
}

namespace {

// Proxy fixture: three frames whose uniform trigger-set entropies are
// 0 (Buying), log2(3) (Control), and 1 (Motion); the median over the whole
// lexicon is 1, so only Control is entropy-hard.
FrameLexicon proxy_lexicon() {
  return {{"Buying", {"buy"}},
          {"Control", {"control", "controlled", "grip"}},
          {"Motion", {"move", "rain"}}};
}

std::vector<Question> proxy_questions() {
  std::vector<Question> qs(4);
  qs[0].id = "q1";
  qs[0].question = "did they buy the house";
  qs[0].reference_answer = "the house";
  qs[1].id = "q2";
  qs[1].question = "how long did they control the tower";
  qs[1].reference_answer = "the tower";
  qs[2].id = "q3";
  qs[2].question = "nothing here at all";
  qs[3].id = "q4";
  qs[3].question = "where did the rain go";
  qs[3].reference_answer = "outside";
  return qs;
}

PromptTemplates proxy_templates() {
  PromptTemplates t;
  t.frame_select = "Candidates.\nList : {list}\nQuestion : {question}\n";
  t.fe_extract = "Extract.\nPair : {pair}\nQuestion : {question}\n";
  return t;
}

}  // namespace

TEST_CASE("analyze_proxy aggregates over proxy selections") {
  FrameLexicon lexicon = proxy_lexicon();
  std::vector<Question> questions = proxy_questions();
  auto predictor = make_stub_predictor();
  std::vector<ProxyResult> results =
      run_proxy(questions, lexicon, proxy_templates(), *predictor);
  REQUIRE(results.size() == 4);
  CHECK(results[0].status == ProxyStatus::ok);
  CHECK(results[1].status == ProxyStatus::ok);
  CHECK(results[2].status == ProxyStatus::no_triggers);
  CHECK(results[3].status == ProxyStatus::ok);
  CHECK(*results[0].fe_count == 2);  // they, house
  CHECK(*results[1].fe_count == 3);  // long, they, tower
  CHECK(*results[3].fe_count == 1);  // where

  PredictionSet preds;
  preds.model_order = {"m1", "m2"};
  preds.answers["m1"] = {{"q1", "the house"},
                         {"q2", "the tower"},
                         {"q3", "whatever"},
                         {"q4", "outside"}};
  preds.answers["m2"] = {{"q1", "the house"},
                         {"q2", "nothing related here"},
                         {"q3", "whatever"},
                         {"q4", "outside"}};

  AnalysisOptions options;
  options.metric = Metric::rouge_l;
  ReportBundle b =
      analyze_proxy(questions, preds, nullptr, results, lexicon, options);

  CHECK(b.factors == std::vector<Factor>{Factor::nb_fes, Factor::entropy});
  CHECK(b.thresholds.entropy_threshold == doctest::Approx(1.0));
  CHECK(b.thresholds.bias_median_frequency == doctest::Approx(0.0));

  REQUIRE(b.leaderboard.size() == 3);
  CHECK(b.leaderboard[0].rouge_l == doctest::Approx(1.0));
  CHECK(b.leaderboard[0].n == 3);  // q3 has no reference
  CHECK(b.leaderboard[1].rouge_l == doctest::Approx(2.0 / 3.0));
  CHECK(b.leaderboard[2].model == "ROVER");
  CHECK(b.leaderboard[2].rouge_l == doctest::Approx(1.0));

  // nb_fes: q1/q4 hard, q2 easy, q3 excluded.
  const DeltaCell& nb2 = cell(b, "m2", Factor::nb_fes);
  CHECK(nb2.score_hard == doctest::Approx(1.0));
  CHECK(nb2.score_easy == doctest::Approx(0.0));
  CHECK(*nb2.delta == 100);
  CHECK(nb2.n_hard == 2);
  CHECK(nb2.n_easy == 1);
  CHECK(nb2.n_excluded == 1);
  CHECK(nb2.size_fraction == doctest::Approx(2.0 / 3.0));

  // entropy: q2 hard (Control), q1/q4 easy, q3 excluded.
  const DeltaCell& en2 = cell(b, "m2", Factor::entropy);
  CHECK(en2.score_hard == doctest::Approx(0.0));
  CHECK(en2.score_easy == doctest::Approx(1.0));
  CHECK(*en2.delta == -100);

  REQUIRE(b.frame_scores.size() == 3);
  CHECK(b.frame_scores[0].frame == "Buying");
  CHECK(b.frame_scores[1].frame == "Control");
  CHECK(b.frame_scores[2].frame == "Motion");
  CHECK(b.frame_scores[0].count == 1);

  REQUIRE(b.combination_bins.size() == 4);
  CHECK(b.combination_bins[0].size == 0);
  CHECK(b.combination_bins[1].size == 3);
  CHECK(b.combination_bins[2].size == 0);
  CHECK(b.combination_bins[3].bin == "excluded");
  CHECK(b.combination_bins[3].size == 1);
}

TEST_CASE("analyze_proxy under hscore scores unreferenced questions") {
  FrameLexicon lexicon = proxy_lexicon();
  std::vector<Question> questions = proxy_questions();
  auto predictor = make_stub_predictor();
  std::vector<ProxyResult> results =
      run_proxy(questions, lexicon, proxy_templates(), *predictor);

  PredictionSet preds;
  preds.model_order = {"m1", "m2"};
  preds.answers["m1"] = {{"q1", "a"}, {"q2", "b"}, {"q3", "c"}, {"q4", "d"}};
  preds.answers["m2"] = {{"q1", "a"}, {"q2", "b"}, {"q3", "c"}, {"q4", "d"}};
  LabelSet labels;
  labels.labels["m1"] = {{"q1", Label::correct},
                         {"q2", Label::correct},
                         {"q3", Label::incorrect},
                         {"q4", Label::correct}};
  labels.labels["m2"] = {{"q1", Label::incorrect},
                         {"q2", Label::incorrect},
                         {"q3", Label::correct},
                         {"q4", Label::incorrect}};

  AnalysisOptions options;
  ReportBundle b =
      analyze_proxy(questions, preds, &labels, results, lexicon, options);
  CHECK(b.leaderboard[0].n == 4);
  CHECK(*b.leaderboard[0].hscore == doctest::Approx(0.75));
  CHECK(*b.leaderboard[1].hscore == doctest::Approx(0.25));
  // All answers agree, so the winner is always m1 and the rover row
  // re-uses m1's labels.
  CHECK(*b.leaderboard[2].hscore == doctest::Approx(0.75));

  CHECK_THROWS_AS(
      analyze_proxy(questions, preds, nullptr, results, lexicon, options),
      ValidationError);
}

TEST_CASE("save_factor_assignments writes one record per example and factor") {
  namespace fs = std::filesystem;
  Corpus corpus = small_corpus();
  auto freq = small_freq();
  FactorAssignments assignments = assign_all_factors(corpus, &freq);
  fs::path path = fs::temp_directory_path() / "qaeval_pipeline_factors.jsonl";
  save_factor_assignments(corpus, assignments, path.string());

  std::ifstream in(path);
  std::string line;
  std::vector<nlohmann::ordered_json> records;
  while (std::getline(in, line))
    records.push_back(nlohmann::ordered_json::parse(line));
  REQUIRE(records.size() == 4 * 7);
  CHECK(records[0]["example_id"] == "e1");
  CHECK(records[0]["factor"] == "bias");
  CHECK(records[0]["status"] == "hard");
  std::size_t excluded = 0;
  for (const auto& r : records)
    if (r["status"] == "excluded") ++excluded;
  CHECK(excluded == 1);  // e3's missing dep_distance
  fs::remove(path);
}
