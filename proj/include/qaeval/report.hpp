#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qaeval/factors.hpp"
#include "qaeval/stats.hpp"
#include "qaeval/text_metrics.hpp"

namespace qaeval {

struct LeaderboardRow {
  std::string model;                // "ROVER" for the combined row
  double rouge_l = 0.0;
  std::optional<double> hscore;     // absent without labels
  std::optional<double> hcorrect;
  std::size_t n = 0;                // examples scored
};

struct DeltaCell {
  std::string model;
  Factor factor = Factor::coref;
  bool degenerate = false;          // empty hard or easy subset
  double score_hard = 0.0;          // S(m, E_f), valid when !degenerate
  double score_easy = 0.0;          // S(m, ~E_f)
  std::optional<int> delta;         // absent when degenerate
  bool significant = false;         // p < 0.05, two-sided
  UTestResult u;
  std::size_t n_hard = 0;
  std::size_t n_easy = 0;
  std::size_t n_excluded = 0;
  double size_fraction = 0.0;       // |E_f| / (|E_f| + |~E_f|), corpus level
};

struct CurveCell {
  bool present = false;             // false for empty bins / unscorable cells
  double mean = 0.0;
  std::size_t n = 0;
};

struct CurveRow {
  int partition = 0;                // k
  std::size_t size = 0;             // bin size
  std::vector<CurveCell> models;    // model order
  CurveCell rover;
};

struct FrameScoreRow {
  std::string frame;
  std::int64_t count = 0;
  std::vector<CurveCell> models;    // mean score per model over the frame
  CurveCell rover;
};

struct FactorProbRow {
  Factor factor = Factor::nb_fes;
  std::vector<CurveCell> partitions;  // P(hard | P_k); absent for empty P_k
};

struct BinRow {
  std::string bin;                  // "0", "1", ..., "excluded"
  std::size_t size = 0;
  std::vector<CurveCell> models;
  CurveCell rover;
};

struct ReportBundle {
  std::string tool_version;
  std::string config_hash;          // hash of config + input file contents
  Metric metric = Metric::hscore;
  std::vector<std::string> models;  // ModelSet order
  std::vector<LeaderboardRow> leaderboard;  // one per model + final ROVER row
  std::vector<Factor> factors;              // delta-matrix column order
  std::vector<DeltaCell> delta_matrix;      // row-major: model-major, factor-minor
  std::vector<CurveRow> partition_curve;    // partitions 1..n
  std::vector<FrameScoreRow> frame_scores;  // ascending by ROVER mean
  std::vector<Factor> prob_factors;
  std::vector<FactorProbRow> factor_probability;
  std::vector<Factor> bin_factors;
  std::vector<BinRow> combination_bins;
  FactorThresholds thresholds;
};

// Rendering. Percentages are the ratio x100 rounded half-up to one decimal;
// scores rounded half-up to two decimals. Absent cells render as "–" in
// Markdown and empty fields in CSV. Empty model set -> ValidationError.
std::string render_report_markdown(const ReportBundle& bundle);
std::string render_leaderboard_csv(const ReportBundle& bundle);
std::string render_delta_csv(const ReportBundle& bundle);
std::string render_curve_csv(const ReportBundle& bundle);
std::string render_frames_csv(const ReportBundle& bundle);
std::string render_factor_prob_csv(const ReportBundle& bundle);
std::string render_bins_csv(const ReportBundle& bundle);
std::string render_thresholds_json(const FactorThresholds& thresholds);

// Writes the full deterministic file set into `directory` (created if
// missing): report.md, leaderboard.csv, delta.csv, curve.csv, frames.csv,
// factor_prob.csv, bins.csv, thresholds.json. Identical bundles produce
// byte-identical files.
void export_bundle(const ReportBundle& bundle, const std::string& directory);

// Formatting helpers shared across renderers and tests.
std::string format_percent(double ratio);  // 0.789 -> "78.9"
std::string format_score(double value);    // 0.8215 -> "0.82"

}  // namespace qaeval
