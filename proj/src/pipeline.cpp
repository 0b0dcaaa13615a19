#include "qaeval/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <thread>
#include <tuple>

#include "json.hpp"
#include "qaeval/errors.hpp"
#include "qaeval/human_metrics.hpp"
#include "qaeval/stats.hpp"

namespace qaeval {

namespace {

using nlohmann::ordered_json;

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << content;
  if (!out) throw IoError("write failure on '" + path + "'");
}

// Index-parallel loop with a deterministic result layout: workers stride over
// the index space and write into pre-sized slots, so the output is identical
// for any job count. `fn` must not throw.
template <typename Fn>
void parallel_for(std::size_t n, int jobs, Fn&& fn) {
  std::size_t workers = jobs < 1 ? 1 : static_cast<std::size_t>(jobs);
  workers = std::min(workers, n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t t = 0; t < workers; ++t)
    pool.emplace_back([&fn, t, n, workers] {
      for (std::size_t i = t; i < n; i += workers) fn(i);
    });
  for (std::thread& th : pool) th.join();
}

double text_metric(Metric metric, std::string_view reference,
                   std::string_view hypothesis) {
  return metric == Metric::token_f1 ? token_f1(reference, hypothesis)
                                    : rouge_l(reference, hypothesis);
}

double mean_of(const std::vector<double>& values) {
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

CurveCell cell_over(const std::vector<std::size_t>& members,
                    const std::vector<std::optional<double>>& scores) {
  CurveCell cell;
  double sum = 0.0;
  for (std::size_t i : members)
    if (scores[i]) {
      sum += *scores[i];
      ++cell.n;
    }
  if (cell.n > 0) {
    cell.present = true;
    cell.mean = sum / static_cast<double>(cell.n);
  }
  return cell;
}

// Everything the bundle assembly needs, independent of whether the example
// axis came from an annotated corpus or a proxy-scored question set.
struct AnalysisView {
  std::vector<std::string> models;
  // [model][i] scores under the chosen metric; nullopt = not scorable.
  std::vector<std::vector<std::optional<double>>> model_metric;
  std::vector<std::optional<double>> rover_metric;
  // Leaderboard inputs (ROUGE-L column plus human labels when available).
  std::vector<std::vector<std::optional<double>>> model_rouge;
  std::vector<std::optional<double>> rover_rouge;
  bool has_labels = false;
  std::vector<std::vector<std::optional<Label>>> model_label;
  std::vector<std::optional<Label>> rover_label;
  // Factor assignments: [factor][i] status.
  std::vector<Factor> factors;
  std::vector<std::vector<FactorStatus>> status;
  FactorThresholds thresholds;
  // Combination-bin index per example: 0..n_selected, -1 = excluded.
  std::vector<int> bin_index;
  // Frame grouping key per example; nullopt = no frame known.
  std::vector<std::optional<std::string>> frame_of;
  std::vector<int> ks;  // ROVER partition per example
  int n_partitions = 0;
};

LeaderboardRow leaderboard_row(const std::string& name,
                               const std::vector<std::optional<double>>& rouge,
                               const std::vector<std::optional<Label>>* labels) {
  LeaderboardRow row;
  row.model = name;
  double sum = 0.0;
  std::size_t n_rouge = 0;
  for (const auto& cell : rouge)
    if (cell) {
      sum += *cell;
      ++n_rouge;
    }
  row.rouge_l = n_rouge > 0 ? sum / static_cast<double>(n_rouge) : 0.0;
  if (labels) {
    std::vector<Label> observed;
    for (const auto& cell : *labels)
      if (cell) observed.push_back(*cell);
    row.n = observed.size();
    if (!observed.empty()) {
      HumanSummary s = summarize_labels(observed);
      row.hscore = s.hscore;
      row.hcorrect = s.hcorrect;
    }
  } else {
    row.n = n_rouge;
  }
  return row;
}

DeltaCell delta_cell(const std::string& model, Factor factor,
                     const std::vector<FactorStatus>& status,
                     const std::vector<std::optional<double>>& scores) {
  DeltaCell cell;
  cell.model = model;
  cell.factor = factor;
  std::vector<double> hard, easy;
  std::size_t subset_hard = 0, subset_easy = 0;
  for (std::size_t i = 0; i < status.size(); ++i) {
    switch (status[i]) {
      case FactorStatus::excluded:
        ++cell.n_excluded;
        break;
      case FactorStatus::hard:
        ++subset_hard;
        if (scores[i]) hard.push_back(*scores[i]);
        break;
      case FactorStatus::easy:
        ++subset_easy;
        if (scores[i]) easy.push_back(*scores[i]);
        break;
    }
  }
  cell.n_hard = hard.size();
  cell.n_easy = easy.size();
  std::size_t considered = subset_hard + subset_easy;
  cell.size_fraction = considered > 0
                           ? static_cast<double>(subset_hard) /
                                 static_cast<double>(considered)
                           : 0.0;
  if (hard.empty() || easy.empty()) {
    cell.degenerate = true;
    return cell;
  }
  cell.score_hard = mean_of(hard);
  cell.score_easy = mean_of(easy);
  cell.delta = delta_score(cell.score_hard, cell.score_easy);
  cell.u = mann_whitney_u(hard, easy);
  cell.significant = cell.u.p_two_sided < 0.05;
  return cell;
}

ReportBundle assemble_bundle(const AnalysisView& view,
                             const AnalysisOptions& options) {
  const std::size_t n = view.ks.size();
  const std::size_t n_models = view.models.size();
  ReportBundle bundle;
  bundle.tool_version = options.tool_version;
  bundle.config_hash = options.config_hash;
  bundle.metric = options.metric;
  bundle.models = view.models;
  bundle.thresholds = view.thresholds;

  for (std::size_t m = 0; m < n_models; ++m)
    bundle.leaderboard.push_back(leaderboard_row(
        view.models[m], view.model_rouge[m],
        view.has_labels ? &view.model_label[m] : nullptr));
  bundle.leaderboard.push_back(leaderboard_row(
      "ROVER", view.rover_rouge,
      view.has_labels ? &view.rover_label : nullptr));

  bundle.factors = view.factors;
  bundle.delta_matrix.resize(n_models * view.factors.size());
  parallel_for(bundle.delta_matrix.size(), options.jobs, [&](std::size_t idx) {
    std::size_t m = idx / view.factors.size();
    std::size_t f = idx % view.factors.size();
    bundle.delta_matrix[idx] = delta_cell(view.models[m], view.factors[f],
                                          view.status[f], view.model_metric[m]);
  });

  std::vector<std::vector<std::size_t>> partition_members(
      static_cast<std::size_t>(view.n_partitions) + 1);
  for (std::size_t i = 0; i < n; ++i) {
    int k = view.ks[i];
    if (k >= 1 && k <= view.n_partitions)
      partition_members[static_cast<std::size_t>(k)].push_back(i);
  }
  for (int k = 1; k <= view.n_partitions; ++k) {
    const auto& members = partition_members[static_cast<std::size_t>(k)];
    CurveRow row;
    row.partition = k;
    row.size = members.size();
    for (std::size_t m = 0; m < n_models; ++m)
      row.models.push_back(cell_over(members, view.model_metric[m]));
    row.rover = cell_over(members, view.rover_metric);
    bundle.partition_curve.push_back(std::move(row));
  }

  std::map<std::string, std::vector<std::size_t>> frame_members;
  for (std::size_t i = 0; i < n; ++i)
    if (view.frame_of[i]) frame_members[*view.frame_of[i]].push_back(i);
  for (const auto& [frame, members] : frame_members) {
    FrameScoreRow row;
    row.frame = frame;
    row.count = static_cast<std::int64_t>(members.size());
    for (std::size_t m = 0; m < n_models; ++m)
      row.models.push_back(cell_over(members, view.model_metric[m]));
    row.rover = cell_over(members, view.rover_metric);
    bundle.frame_scores.push_back(std::move(row));
  }
  std::sort(bundle.frame_scores.begin(), bundle.frame_scores.end(),
            [](const FrameScoreRow& a, const FrameScoreRow& b) {
              if (a.rover.present != b.rover.present) return !a.rover.present;
              if (a.rover.present && a.rover.mean != b.rover.mean)
                return a.rover.mean < b.rover.mean;
              return a.frame < b.frame;
            });

  bundle.prob_factors = view.factors;
  for (std::size_t f = 0; f < view.factors.size(); ++f) {
    FactorProbRow row;
    row.factor = view.factors[f];
    for (int k = 1; k <= view.n_partitions; ++k) {
      const auto& members = partition_members[static_cast<std::size_t>(k)];
      CurveCell cell;
      std::size_t hard = 0;
      for (std::size_t i : members) {
        if (view.status[f][i] == FactorStatus::excluded) continue;
        ++cell.n;
        if (view.status[f][i] == FactorStatus::hard) ++hard;
      }
      if (cell.n > 0) {
        cell.present = true;
        cell.mean = static_cast<double>(hard) / static_cast<double>(cell.n);
      }
      row.partitions.push_back(cell);
    }
    bundle.factor_probability.push_back(std::move(row));
  }

  bundle.bin_factors = options.bin_factors;
  const int n_selected = static_cast<int>(options.bin_factors.size());
  for (int b = 0; b <= n_selected; ++b) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < n; ++i)
      if (view.bin_index[i] == b) members.push_back(i);
    BinRow row;
    row.bin = std::to_string(b);
    row.size = members.size();
    for (std::size_t m = 0; m < n_models; ++m)
      row.models.push_back(cell_over(members, view.model_metric[m]));
    row.rover = cell_over(members, view.rover_metric);
    bundle.combination_bins.push_back(std::move(row));
  }
  {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < n; ++i)
      if (view.bin_index[i] < 0) members.push_back(i);
    BinRow row;
    row.bin = "excluded";
    row.size = members.size();
    for (std::size_t m = 0; m < n_models; ++m)
      row.models.push_back(cell_over(members, view.model_metric[m]));
    row.rover = cell_over(members, view.rover_metric);
    bundle.combination_bins.push_back(std::move(row));
  }
  return bundle;
}

}  // namespace

std::vector<RoverRow> run_rover(const Corpus& corpus, const PredictionSet& preds,
                                const AnalysisOptions& options) {
  if (preds.model_order.empty())
    throw ValidationError("prediction set has no models");
  if (options.alpha < 0) throw ValidationError("alpha must be >= 0");
  const std::size_t n_models = preds.model_order.size();
  if (options.include_reference_vote)
    for (const std::string& m : preds.model_order)
      if (m == "reference")
        throw ValidationError(
            "model id 'reference' collides with the reference pseudo-voter");

  const std::size_t n = corpus.examples.size();
  std::vector<std::vector<std::string>> outputs(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Example& e = corpus.examples[i];
    outputs[i].reserve(n_models + 1);
    for (const std::string& m : preds.model_order)
      outputs[i].push_back(preds.answer(m, e.id));
    if (options.include_reference_vote)
      outputs[i].push_back(e.reference_answer);
  }

  std::vector<RoverRow> rows(n);
  parallel_for(n, options.jobs, [&](std::size_t i) {
    RoverResult r = rover_vote(outputs[i], options.alpha);
    RoverRow& row = rows[i];
    row.example_id = corpus.examples[i].id;
    row.answer = r.answer;
    row.k = r.k;
    row.winner_model =
        r.winner < n_models ? preds.model_order[r.winner] : std::string();
    for (std::size_t m = 0; m < n_models; ++m)
      row.votes.emplace_back(preds.model_order[m], r.votes[m]);
    if (options.include_reference_vote)
      row.votes.emplace_back("reference", r.votes[n_models]);
  });
  return rows;
}

void save_rover(const std::vector<RoverRow>& rows, const std::string& path) {
  std::ostringstream out;
  for (const RoverRow& r : rows) {
    ordered_json j;
    j["example_id"] = r.example_id;
    j["rover_answer"] = r.answer;
    j["k"] = r.k;
    j["partition"] = r.k;
    ordered_json votes = ordered_json::object();
    for (const auto& [model, v] : r.votes) votes[model] = v;
    j["votes"] = std::move(votes);
    out << j.dump() << "\n";
  }
  write_file(path, out.str());
}

ScoreTable score_predictions(const Corpus& corpus, const PredictionSet& preds,
                             const LabelSet* labels, Metric metric) {
  if (metric == Metric::hscore && !labels)
    throw ValidationError("labels are required for the hscore metric");
  ScoreTable table;
  const std::size_t n = corpus.examples.size();
  for (const std::string& model : preds.model_order) {
    auto& column = table[model];
    column.assign(n, std::nullopt);
    for (std::size_t i = 0; i < n; ++i) {
      const Example& e = corpus.examples[i];
      if (metric == Metric::hscore) {
        if (labels->has(model, e.id))
          column[i] = label_score(labels->at(model, e.id));
      } else {
        column[i] =
            text_metric(metric, e.reference_answer, preds.answer(model, e.id));
      }
    }
  }
  return table;
}

ReportBundle analyze(const Corpus& corpus, const PredictionSet& preds,
                     const LabelSet* labels,
                     const std::map<std::string, std::int64_t>* frame_freq,
                     const AnalysisOptions& options) {
  if (corpus.examples.empty()) throw ValidationError("corpus is empty");
  if (preds.model_order.empty())
    throw ValidationError("prediction set has no models");
  if (options.metric == Metric::hscore && !labels)
    throw ValidationError("labels are required for the hscore metric");
  if (options.bin_factors.empty())
    throw ValidationError("no factors selected for binning");

  const std::size_t n = corpus.examples.size();
  const std::size_t n_models = preds.model_order.size();
  std::vector<RoverRow> rover = run_rover(corpus, preds, options);
  ScoreTable metric_table =
      score_predictions(corpus, preds, labels, options.metric);

  AnalysisView view;
  view.models = preds.model_order;
  view.has_labels = labels != nullptr;
  view.model_metric.resize(n_models);
  view.model_rouge.resize(n_models);
  for (std::size_t m = 0; m < n_models; ++m) {
    const std::string& model = view.models[m];
    view.model_metric[m] = metric_table.at(model);
    if (options.metric == Metric::rouge_l) {
      view.model_rouge[m] = view.model_metric[m];
    } else {
      view.model_rouge[m].assign(n, std::nullopt);
      for (std::size_t i = 0; i < n; ++i) {
        const Example& e = corpus.examples[i];
        view.model_rouge[m][i] =
            rouge_l(e.reference_answer, preds.answer(model, e.id));
      }
    }
    if (labels) {
      auto& column = view.model_label.emplace_back();
      column.assign(n, std::nullopt);
      for (std::size_t i = 0; i < n; ++i)
        if (labels->has(model, corpus.examples[i].id))
          column[i] = labels->at(model, corpus.examples[i].id);
    }
  }

  view.rover_metric.assign(n, std::nullopt);
  view.rover_rouge.assign(n, std::nullopt);
  view.rover_label.assign(n, std::nullopt);
  for (std::size_t i = 0; i < n; ++i) {
    const Example& e = corpus.examples[i];
    const RoverRow& r = rover[i];
    view.rover_rouge[i] = rouge_l(e.reference_answer, r.answer);
    if (options.metric == Metric::hscore) {
      if (!r.winner_model.empty() && labels->has(r.winner_model, e.id)) {
        Label l = labels->at(r.winner_model, e.id);
        view.rover_metric[i] = label_score(l);
      }
    } else {
      view.rover_metric[i] = text_metric(options.metric, e.reference_answer,
                                         r.answer);
    }
    if (labels && !r.winner_model.empty() && labels->has(r.winner_model, e.id))
      view.rover_label[i] = labels->at(r.winner_model, e.id);
  }

  FactorAssignments assignments = assign_all_factors(corpus, frame_freq);
  view.thresholds = assignments.thresholds;
  view.factors = assignments.factors;
  for (Factor f : assignments.factors)
    view.status.push_back(assignments.status.at(f));

  view.bin_index.assign(n, 0);
  for (Factor f : options.bin_factors) {
    auto it = assignments.status.find(f);
    if (it == assignments.status.end())
      throw ValidationError("factor '" + std::string(factor_name(f)) +
                            "' has no assignment");
    for (std::size_t i = 0; i < n; ++i) {
      if (view.bin_index[i] < 0) continue;
      switch (it->second[i]) {
        case FactorStatus::excluded: view.bin_index[i] = -1; break;
        case FactorStatus::hard: ++view.bin_index[i]; break;
        case FactorStatus::easy: break;
      }
    }
  }

  view.frame_of.resize(n);
  view.ks.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    view.frame_of[i] = corpus.examples[i].frame;
    view.ks[i] = rover[i].k;
  }
  view.n_partitions = static_cast<int>(n_models) +
                      (options.include_reference_vote ? 1 : 0);
  return assemble_bundle(view, options);
}

ReportBundle analyze_proxy(const std::vector<Question>& questions,
                           const PredictionSet& preds, const LabelSet* labels,
                           const std::vector<ProxyResult>& proxy_results,
                           const FrameLexicon& lexicon,
                           const AnalysisOptions& options) {
  if (questions.empty()) throw ValidationError("question set is empty");
  if (preds.model_order.empty())
    throw ValidationError("prediction set has no models");
  if (options.metric == Metric::hscore && !labels)
    throw ValidationError("labels are required for the hscore metric");
  if (options.bin_factors.empty())
    throw ValidationError("no factors selected for binning");
  if (options.alpha < 0) throw ValidationError("alpha must be >= 0");

  const std::size_t n = questions.size();
  const std::size_t n_models = preds.model_order.size();
  std::map<std::string, const ProxyResult*> result_of;
  for (const ProxyResult& r : proxy_results) result_of[r.question_id] = &r;

  ProxyAssignments assignments = proxy_factor_assignments(proxy_results, lexicon);

  AnalysisView view;
  view.models = preds.model_order;
  view.has_labels = labels != nullptr;
  view.thresholds = assignments.thresholds;
  for (const auto& [factor, status] : assignments.status)
    view.factors.push_back(factor);
  std::sort(view.factors.begin(), view.factors.end(),
            [](Factor a, Factor b) {
              auto rank = [](Factor f) {
                for (std::size_t i = 0; i < kAllFactors.size(); ++i)
                  if (kAllFactors[i] == f) return i;
                return kAllFactors.size();
              };
              return rank(a) < rank(b);
            });

  // Voting: the reference joins only where a reference answer exists.
  std::vector<RoverRow> rover(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Question& q = questions[i];
    std::vector<std::string> outputs;
    outputs.reserve(n_models + 1);
    for (const std::string& m : preds.model_order)
      outputs.push_back(preds.answer(m, q.id));
    bool with_reference =
        options.include_reference_vote && q.reference_answer.has_value();
    if (with_reference) outputs.push_back(*q.reference_answer);
    RoverResult r = rover_vote(outputs, options.alpha);
    rover[i].example_id = q.id;
    rover[i].answer = r.answer;
    rover[i].k = r.k;
    rover[i].winner_model =
        r.winner < n_models ? preds.model_order[r.winner] : std::string();
  }

  view.model_metric.resize(n_models);
  view.model_rouge.resize(n_models);
  for (std::size_t m = 0; m < n_models; ++m) {
    const std::string& model = view.models[m];
    view.model_metric[m].assign(n, std::nullopt);
    view.model_rouge[m].assign(n, std::nullopt);
    if (labels) view.model_label.emplace_back().assign(n, std::nullopt);
    for (std::size_t i = 0; i < n; ++i) {
      const Question& q = questions[i];
      const std::string& answer = preds.answer(model, q.id);
      if (q.reference_answer)
        view.model_rouge[m][i] = rouge_l(*q.reference_answer, answer);
      if (options.metric == Metric::hscore) {
        if (labels->has(model, q.id))
          view.model_metric[m][i] = label_score(labels->at(model, q.id));
      } else if (q.reference_answer) {
        view.model_metric[m][i] =
            text_metric(options.metric, *q.reference_answer, answer);
      }
      if (labels && labels->has(model, q.id))
        view.model_label[m][i] = labels->at(model, q.id);
    }
  }

  view.rover_metric.assign(n, std::nullopt);
  view.rover_rouge.assign(n, std::nullopt);
  view.rover_label.assign(n, std::nullopt);
  for (std::size_t i = 0; i < n; ++i) {
    const Question& q = questions[i];
    const RoverRow& r = rover[i];
    if (q.reference_answer)
      view.rover_rouge[i] = rouge_l(*q.reference_answer, r.answer);
    if (options.metric == Metric::hscore) {
      if (!r.winner_model.empty() && labels->has(r.winner_model, q.id))
        view.rover_metric[i] =
            label_score(labels->at(r.winner_model, q.id));
    } else if (q.reference_answer) {
      view.rover_metric[i] =
          text_metric(options.metric, *q.reference_answer, r.answer);
    }
    if (labels && !r.winner_model.empty() && labels->has(r.winner_model, q.id))
      view.rover_label[i] = labels->at(r.winner_model, q.id);
  }

  for (Factor f : view.factors) {
    const auto& by_id = assignments.status.at(f);
    auto& column = view.status.emplace_back();
    column.assign(n, FactorStatus::excluded);
    for (std::size_t i = 0; i < n; ++i) {
      auto it = by_id.find(questions[i].id);
      if (it != by_id.end()) column[i] = it->second;
    }
  }

  view.bin_index.assign(n, 0);
  for (Factor f : options.bin_factors) {
    auto it = assignments.status.find(f);
    if (it == assignments.status.end())
      throw ValidationError("factor '" + std::string(factor_name(f)) +
                            "' has no assignment");
    for (std::size_t i = 0; i < n; ++i) {
      if (view.bin_index[i] < 0) continue;
      auto sit = it->second.find(questions[i].id);
      FactorStatus s =
          sit == it->second.end() ? FactorStatus::excluded : sit->second;
      switch (s) {
        case FactorStatus::excluded: view.bin_index[i] = -1; break;
        case FactorStatus::hard: ++view.bin_index[i]; break;
        case FactorStatus::easy: break;
      }
    }
  }

  view.frame_of.resize(n);
  view.ks.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto it = result_of.find(questions[i].id);
    if (it != result_of.end()) {
      const ProxyResult& r = *it->second;
      bool frame_known = (r.status == ProxyStatus::ok ||
                          r.status == ProxyStatus::fe_extraction_failed) &&
                         r.selected;
      if (frame_known) view.frame_of[i] = r.selected->frame;
    }
    view.ks[i] = rover[i].k;
  }
  view.n_partitions = static_cast<int>(n_models) +
                      (options.include_reference_vote ? 1 : 0);
  return assemble_bundle(view, options);
}

void save_factor_assignments(const Corpus& corpus,
                             const FactorAssignments& assignments,
                             const std::string& path) {
  std::ostringstream out;
  for (std::size_t i = 0; i < corpus.examples.size(); ++i)
    for (Factor f : assignments.factors) {
      ordered_json j;
      j["example_id"] = corpus.examples[i].id;
      j["factor"] = std::string(factor_name(f));
      j["status"] =
          std::string(factor_status_name(assignments.status.at(f)[i]));
      out << j.dump() << "\n";
    }
  write_file(path, out.str());
}

bool analysis_degenerate(const ReportBundle& bundle) {
  return std::all_of(bundle.delta_matrix.begin(), bundle.delta_matrix.end(),
                     [](const DeltaCell& c) { return c.degenerate; });
}

}  // namespace qaeval
