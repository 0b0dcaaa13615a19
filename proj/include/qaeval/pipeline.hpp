#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qaeval/corpus.hpp"
#include "qaeval/factors.hpp"
#include "qaeval/frame_proxy.hpp"
#include "qaeval/report.hpp"
#include "qaeval/rover.hpp"
#include "qaeval/text_metrics.hpp"

namespace qaeval {

struct AnalysisOptions {
  int alpha = 5;
  Metric metric = Metric::hscore;
  std::vector<Factor> bin_factors = {Factor::nb_fes, Factor::entropy};
  // When true, the reference answer participates in voting as a pseudo-model
  // appended after the real ones (it never becomes the ROVER answer owner for
  // scoring ties unless it wins outright).
  bool include_reference_vote = false;
  int jobs = 1;
  std::string tool_version;
  std::string config_hash;
};

// Per-example voting over the whole corpus.
struct RoverRow {
  std::string example_id;
  std::string answer;
  int k = 0;
  std::string winner_model;                       // "" when the reference wins
  std::vector<std::pair<std::string, int>> votes; // model -> vote count
};

std::vector<RoverRow> run_rover(const Corpus& corpus, const PredictionSet& preds,
                                const AnalysisOptions& options);

void save_rover(const std::vector<RoverRow>& rows, const std::string& path);

// Per-model per-example scores under the chosen metric; nullopt = not
// scorable (no label for this model under hscore).
using ScoreTable = std::map<std::string, std::vector<std::optional<double>>>;

ScoreTable score_predictions(const Corpus& corpus, const PredictionSet& preds,
                             const LabelSet* labels, Metric metric);

// Full analysis: leaderboard, delta matrix, partition curve, frame scores,
// factor probabilities, combination bins, thresholds echo. labels may be
// null only for rouge_l/token_f1; frame_freq may be null (bias skipped).
ReportBundle analyze(const Corpus& corpus, const PredictionSet& preds,
                     const LabelSet* labels,
                     const std::map<std::string, std::int64_t>* frame_freq,
                     const AnalysisOptions& options);

// Same analysis driven by proxy-derived factor assignments over a question
// set (factors restricted to nb_fes / entropy; frames taken from the proxy
// selections). Questions without a reference answer are unscorable under
// rouge_l/token_f1 and are dropped from score aggregates.
ReportBundle analyze_proxy(const std::vector<Question>& questions,
                           const PredictionSet& preds, const LabelSet* labels,
                           const std::vector<ProxyResult>& proxy_results,
                           const FrameLexicon& lexicon,
                           const AnalysisOptions& options);

// factors.jsonl emission: {example_id, factor, status}.
void save_factor_assignments(const Corpus& corpus,
                             const FactorAssignments& assignments,
                             const std::string& path);

// True when every delta-matrix cell is degenerate (CLI exit code 3).
bool analysis_degenerate(const ReportBundle& bundle);

}  // namespace qaeval
