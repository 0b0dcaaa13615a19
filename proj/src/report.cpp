#include "qaeval/report.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "qaeval/errors.hpp"

namespace qaeval {
namespace {

constexpr const char* kDash = "–";  // absent Markdown cell

// Half-up rounding at a fixed scale, via integer assembly so that the
// output never depends on printf's own rounding mode.
std::string fixed_halfup(double value, long long scale, int decimals) {
  double scaled = value * static_cast<double>(scale);
  long long v = static_cast<long long>(std::floor(scaled + 0.5));
  bool neg = v < 0;
  if (neg) v = -v;
  long long whole = v / scale;
  long long frac = v % scale;
  char buf[64];
  if (decimals == 1)
    std::snprintf(buf, sizeof buf, "%s%lld.%01lld", neg ? "-" : "", whole, frac);
  else
    std::snprintf(buf, sizeof buf, "%s%lld.%02lld", neg ? "-" : "", whole, frac);
  return buf;
}

std::string fmt6(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", value);
  return buf;
}

// Shortest round-trip form, shared by thresholds.json and report.md so the
// two artifacts can never disagree.
std::string json_number(double value) { return nlohmann::json(value).dump(); }

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string cell_or_empty(const CurveCell& c) {
  return c.present ? fmt6(c.mean) : std::string();
}

std::string cell_or_dash(const CurveCell& c) {
  return c.present ? format_score(c.mean) : std::string(kDash);
}

void require_models(const ReportBundle& b) {
  if (b.models.empty()) throw ValidationError("report: empty model set");
}

const DeltaCell& cell_at(const ReportBundle& b, std::size_t model_idx,
                         std::size_t factor_idx) {
  return b.delta_matrix[model_idx * b.factors.size() + factor_idx];
}

std::string size_percent(double ratio) {
  std::string s = format_percent(ratio);
  if (s.size() > 2 && s.compare(s.size() - 2, 2, ".0") == 0)
    s.erase(s.size() - 2);
  return s + "%";
}

std::string delta_cell_markdown(const DeltaCell& c) {
  if (c.degenerate || !c.delta) return kDash;
  std::string d = std::to_string(*c.delta);
  return c.significant ? "**" + d + "**" : d;
}

void md_row(std::ostringstream& out, const std::vector<std::string>& cells) {
  out << "|";
  for (const auto& c : cells) out << " " << c << " |";
  out << "\n";
}

void md_rule(std::ostringstream& out, std::size_t n) {
  out << "|";
  for (std::size_t i = 0; i < n; ++i) out << " --- |";
  out << "\n";
}

}  // namespace

std::string format_percent(double ratio) {
  return fixed_halfup(ratio * 100.0, 10, 1);
}

std::string format_score(double value) { return fixed_halfup(value, 100, 2); }

std::string render_report_markdown(const ReportBundle& b) {
  require_models(b);
  std::ostringstream out;
  out << "# Analysis report\n\n";
  out << "- Tool version: " << b.tool_version << "\n";
  out << "- Config hash: " << b.config_hash << "\n";
  out << "- Metric: " << metric_name(b.metric) << "\n\n";

  out << "## Leaderboard\n\n";
  std::vector<std::string> head = {"Model", "ROUGE-L", "Hscore",
                                   "Hcorrect (%)", "n"};
  md_row(out, head);
  md_rule(out, head.size());
  for (const auto& r : b.leaderboard) {
    md_row(out, {r.model, format_score(r.rouge_l),
                 r.hscore ? format_score(*r.hscore) : std::string(kDash),
                 r.hcorrect ? format_percent(*r.hcorrect) : std::string(kDash),
                 std::to_string(r.n)});
  }
  out << "\n";

  if (!b.factors.empty() && !b.delta_matrix.empty()) {
    out << "## Difficulty factors\n\n";
    std::vector<std::string> fhead = {"Model"};
    for (Factor f : b.factors) fhead.emplace_back(factor_name(f));
    md_row(out, fhead);
    md_rule(out, fhead.size());
    std::vector<std::string> size_row = {"Size"};
    for (std::size_t fi = 0; fi < b.factors.size(); ++fi)
      size_row.push_back(size_percent(cell_at(b, 0, fi).size_fraction));
    md_row(out, size_row);
    for (std::size_t mi = 0; mi < b.models.size(); ++mi) {
      std::vector<std::string> row = {b.models[mi]};
      for (std::size_t fi = 0; fi < b.factors.size(); ++fi)
        row.push_back(delta_cell_markdown(cell_at(b, mi, fi)));
      md_row(out, row);
    }
    std::string excluded;
    for (std::size_t fi = 0; fi < b.factors.size(); ++fi) {
      const DeltaCell& c = cell_at(b, 0, fi);
      if (c.n_excluded > 0) {
        if (!excluded.empty()) excluded += ", ";
        excluded += std::string(factor_name(b.factors[fi])) + " " +
                    std::to_string(c.n_excluded);
      }
    }
    out << "\n";
    if (!excluded.empty()) out << "Excluded examples: " << excluded << ".\n\n";
  }

  if (!b.partition_curve.empty()) {
    out << "## Agreement curve\n\n";
    std::vector<std::string> chead = {"k", "n"};
    for (const auto& m : b.models) chead.push_back(m);
    chead.push_back("ROVER");
    md_row(out, chead);
    md_rule(out, chead.size());
    for (const auto& r : b.partition_curve) {
      std::vector<std::string> row = {std::to_string(r.partition),
                                      std::to_string(r.size)};
      for (const auto& c : r.models) row.push_back(cell_or_dash(c));
      row.push_back(cell_or_dash(r.rover));
      md_row(out, row);
    }
    out << "\n";
  }

  if (!b.frame_scores.empty()) {
    out << "## Per-frame scores\n\n";
    std::vector<std::string> fhead = {"Frame (count)"};
    for (const auto& m : b.models) fhead.push_back(m);
    fhead.push_back("ROVER");
    md_row(out, fhead);
    md_rule(out, fhead.size());
    for (const auto& r : b.frame_scores) {
      std::vector<std::string> row = {r.frame + " (" +
                                      std::to_string(r.count) + ")"};
      for (const auto& c : r.models) row.push_back(cell_or_dash(c));
      row.push_back(cell_or_dash(r.rover));
      md_row(out, row);
    }
    out << "\n";
  }

  if (!b.factor_probability.empty()) {
    out << "## Factor probability by partition\n\n";
    std::size_t nparts = b.factor_probability.front().partitions.size();
    std::vector<std::string> phead = {"Factor"};
    for (std::size_t k = 1; k <= nparts; ++k)
      phead.push_back("P" + std::to_string(k));
    md_row(out, phead);
    md_rule(out, phead.size());
    for (const auto& r : b.factor_probability) {
      std::vector<std::string> row = {std::string(factor_name(r.factor))};
      for (const auto& c : r.partitions) row.push_back(cell_or_dash(c));
      md_row(out, row);
    }
    out << "\n";
  }

  if (!b.combination_bins.empty()) {
    out << "## Factor-combination bins\n\n";
    std::string label = "Hard factors";
    for (std::size_t i = 0; i < b.bin_factors.size(); ++i)
      label += std::string(i == 0 ? " (" : ", ") +
               std::string(factor_name(b.bin_factors[i]));
    if (!b.bin_factors.empty()) label += ")";
    std::vector<std::string> bhead = {label, "n"};
    for (const auto& m : b.models) bhead.push_back(m);
    bhead.push_back("ROVER");
    md_row(out, bhead);
    md_rule(out, bhead.size());
    for (const auto& r : b.combination_bins) {
      std::vector<std::string> row = {r.bin, std::to_string(r.size)};
      for (const auto& c : r.models) row.push_back(cell_or_dash(c));
      row.push_back(cell_or_dash(r.rover));
      md_row(out, row);
    }
    out << "\n";
  }

  out << "## Thresholds\n\n";
  out << "- entropy_threshold: " << json_number(b.thresholds.entropy_threshold)
      << "\n";
  out << "- bias_median_frequency: "
      << json_number(b.thresholds.bias_median_frequency) << "\n";
  out << "- dist_threshold: " << b.thresholds.dist_threshold << "\n";
  out << "- nb_fes_threshold: " << b.thresholds.nb_fes_threshold << "\n";
  return out.str();
}

std::string render_leaderboard_csv(const ReportBundle& b) {
  require_models(b);
  std::ostringstream out;
  out << "model,rouge_l,hscore,hcorrect,n\n";
  for (const auto& r : b.leaderboard) {
    out << csv_field(r.model) << "," << fmt6(r.rouge_l) << ","
        << (r.hscore ? fmt6(*r.hscore) : "") << ","
        << (r.hcorrect ? fmt6(*r.hcorrect) : "") << "," << r.n << "\n";
  }
  return out.str();
}

std::string render_delta_csv(const ReportBundle& b) {
  std::ostringstream out;
  out << "model,factor,size_fraction,n_hard,n_easy,n_excluded,score_hard,"
         "score_easy,delta,significant,u,z,p_two_sided,method\n";
  for (const auto& c : b.delta_matrix) {
    out << csv_field(c.model) << "," << factor_name(c.factor) << ","
        << fmt6(c.size_fraction) << "," << c.n_hard << "," << c.n_easy << ","
        << c.n_excluded << ",";
    if (c.degenerate) {
      out << ",,,false,,,,\n";
      continue;
    }
    out << fmt6(c.score_hard) << "," << fmt6(c.score_easy) << ","
        << (c.delta ? std::to_string(*c.delta) : "") << ","
        << (c.significant ? "true" : "false") << "," << fmt6(c.u.u_statistic)
        << "," << fmt6(c.u.z) << "," << fmt6(c.u.p_two_sided) << ","
        << (c.u.method == UMethod::exact ? "exact" : "normal_tie_corrected")
        << "\n";
  }
  return out.str();
}

std::string render_curve_csv(const ReportBundle& b) {
  require_models(b);
  std::ostringstream out;
  out << "partition,size";
  for (const auto& m : b.models) out << "," << csv_field(m);
  out << ",rover\n";
  for (const auto& r : b.partition_curve) {
    out << r.partition << "," << r.size;
    for (const auto& c : r.models) out << "," << cell_or_empty(c);
    out << "," << cell_or_empty(r.rover) << "\n";
  }
  return out.str();
}

std::string render_frames_csv(const ReportBundle& b) {
  require_models(b);
  std::ostringstream out;
  out << "frame (count)";
  for (const auto& m : b.models) out << "," << csv_field("score_" + m);
  out << ",score_rover\n";
  for (const auto& r : b.frame_scores) {
    out << csv_field(r.frame + " (" + std::to_string(r.count) + ")");
    for (const auto& c : r.models) out << "," << cell_or_empty(c);
    out << "," << cell_or_empty(r.rover) << "\n";
  }
  return out.str();
}

std::string render_factor_prob_csv(const ReportBundle& b) {
  std::ostringstream out;
  std::size_t nparts = b.factor_probability.empty()
                           ? 0
                           : b.factor_probability.front().partitions.size();
  out << "factor";
  for (std::size_t k = 1; k <= nparts; ++k) out << ",P" << k;
  out << "\n";
  for (const auto& r : b.factor_probability) {
    out << factor_name(r.factor);
    for (const auto& c : r.partitions) out << "," << cell_or_empty(c);
    out << "\n";
  }
  return out.str();
}

std::string render_bins_csv(const ReportBundle& b) {
  require_models(b);
  std::ostringstream out;
  out << "bin,size";
  for (const auto& m : b.models) out << "," << csv_field(m);
  out << ",rover\n";
  for (const auto& r : b.combination_bins) {
    out << csv_field(r.bin) << "," << r.size;
    for (const auto& c : r.models) out << "," << cell_or_empty(c);
    out << "," << cell_or_empty(r.rover) << "\n";
  }
  return out.str();
}

std::string render_thresholds_json(const FactorThresholds& t) {
  nlohmann::ordered_json j;
  j["entropy_threshold"] = t.entropy_threshold;
  j["bias_median_frequency"] = t.bias_median_frequency;
  j["dist_threshold"] = t.dist_threshold;
  j["nb_fes_threshold"] = t.nb_fes_threshold;
  return j.dump(2) + "\n";
}

void export_bundle(const ReportBundle& b, const std::string& directory) {
  require_models(b);
  std::error_code ec;
  std::filesystem::create_directories(directory, ec);
  if (ec)
    throw IoError("cannot create directory " + directory + ": " + ec.message());
  auto write = [&](const char* name, const std::string& content) {
    std::filesystem::path p = std::filesystem::path(directory) / name;
    std::ofstream f(p, std::ios::binary);
    if (!f) throw IoError("cannot write " + p.string());
    f << content;
    if (!f) throw IoError("cannot write " + p.string());
  };
  write("report.md", render_report_markdown(b));
  write("leaderboard.csv", render_leaderboard_csv(b));
  write("delta.csv", render_delta_csv(b));
  write("curve.csv", render_curve_csv(b));
  write("frames.csv", render_frames_csv(b));
  write("factor_prob.csv", render_factor_prob_csv(b));
  write("bins.csv", render_bins_csv(b));
  write("thresholds.json", render_thresholds_json(b.thresholds));
}

}  // namespace qaeval
