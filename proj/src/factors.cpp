#include "qaeval/factors.hpp"

#include <algorithm>
#include <cmath>

#include "qaeval/errors.hpp"

namespace qaeval {

Factor parse_factor(std::string_view name) {
  for (Factor f : kAllFactors)
    if (name == factor_name(f)) return f;
  throw ValidationError("unknown factor '" + std::string(name) + "'");
}

std::string_view factor_name(Factor f) {
  switch (f) {
    case Factor::bias: return "bias";
    case Factor::coref: return "coref";
    case Factor::trigger: return "trigger";
    case Factor::lu_in_q: return "lu_in_q";
    case Factor::dist: return "dist";
    case Factor::nb_fes: return "nb_fes";
    case Factor::entropy: return "entropy";
  }
  return "";
}

std::string_view factor_status_name(FactorStatus s) {
  switch (s) {
    case FactorStatus::hard: return "hard";
    case FactorStatus::easy: return "easy";
    case FactorStatus::excluded: return "excluded";
  }
  return "";
}

double median(std::vector<double> values) {
  if (values.empty()) throw ValidationError("median of an empty list");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  if (n % 2 == 1) return values[n / 2];
  return (values[n / 2 - 1] + values[n / 2]) / 2.0;
}

double shannon_entropy(const std::vector<std::int64_t>& counts, bool base2) {
  std::int64_t total = 0;
  for (std::int64_t c : counts) {
    if (c < 0) throw ValidationError("entropy counts must be >= 0");
    total += c;
  }
  if (total == 0) throw ValidationError("entropy of an empty histogram");
  double h = 0.0;
  for (std::int64_t c : counts) {
    if (c == 0) continue;
    double p = static_cast<double>(c) / static_cast<double>(total);
    h -= p * (base2 ? std::log2(p) : std::log(p));
  }
  return h;
}

std::vector<FrameStats> compute_frame_stats(const Corpus& corpus) {
  std::map<std::string, FrameStats> by_frame;
  for (const Example& e : corpus.examples) {
    FrameStats& fs = by_frame[e.frame];
    fs.frame = e.frame;
    ++fs.occurrences;
    ++fs.lu_histogram[e.lu_text];
  }
  std::vector<FrameStats> stats;
  stats.reserve(by_frame.size());
  for (auto& [name, fs] : by_frame) {
    std::vector<std::int64_t> counts;
    counts.reserve(fs.lu_histogram.size());
    for (const auto& [lu, c] : fs.lu_histogram) counts.push_back(c);
    fs.entropy_bits = shannon_entropy(counts, true);
    stats.push_back(std::move(fs));
  }
  return stats;
}

FactorThresholds compute_thresholds(
    const Corpus& corpus, const std::map<std::string, std::int64_t>& frame_freq) {
  FactorThresholds t;
  std::vector<FrameStats> stats = compute_frame_stats(corpus);
  std::vector<double> entropies, freqs;
  entropies.reserve(stats.size());
  freqs.reserve(stats.size());
  for (const FrameStats& fs : stats) {
    entropies.push_back(fs.entropy_bits);
    auto it = frame_freq.find(fs.frame);
    freqs.push_back(it == frame_freq.end() ? 0.0
                                           : static_cast<double>(it->second));
  }
  t.entropy_threshold = median(std::move(entropies));
  t.bias_median_frequency = median(std::move(freqs));
  return t;
}

namespace {

std::vector<FactorStatus> assign_with_stats(
    const Corpus& corpus, Factor f,
    const std::map<std::string, std::int64_t>& frame_freq,
    const FactorThresholds& t, const std::map<std::string, double>& frame_entropy) {
  std::vector<FactorStatus> out;
  out.reserve(corpus.examples.size());
  for (const Example& e : corpus.examples) {
    FactorStatus s = FactorStatus::easy;
    switch (f) {
      case Factor::bias: {
        auto it = frame_freq.find(e.frame);
        double freq = it == frame_freq.end() ? 0.0 : static_cast<double>(it->second);
        s = freq < t.bias_median_frequency ? FactorStatus::hard : FactorStatus::easy;
        break;
      }
      case Factor::coref:
        s = e.coref_required ? FactorStatus::hard : FactorStatus::easy;
        break;
      case Factor::trigger:
        s = e.lu_pos == LuPos::nominal ? FactorStatus::hard : FactorStatus::easy;
        break;
      case Factor::lu_in_q:
        s = e.trigger_in_question ? FactorStatus::easy : FactorStatus::hard;
        break;
      case Factor::dist:
        if (!e.dep_distance) s = FactorStatus::excluded;
        else s = *e.dep_distance >= t.dist_threshold ? FactorStatus::hard
                                                     : FactorStatus::easy;
        break;
      case Factor::nb_fes:
        s = e.fe_count <= t.nb_fes_threshold ? FactorStatus::hard
                                             : FactorStatus::easy;
        break;
      case Factor::entropy:
        s = frame_entropy.at(e.frame) > t.entropy_threshold ? FactorStatus::hard
                                                            : FactorStatus::easy;
        break;
    }
    out.push_back(s);
  }
  return out;
}

std::map<std::string, double> entropy_by_frame(const Corpus& corpus) {
  std::map<std::string, double> out;
  for (const FrameStats& fs : compute_frame_stats(corpus))
    out[fs.frame] = fs.entropy_bits;
  return out;
}

}  // namespace

std::vector<FactorStatus> assign_factor(
    const Corpus& corpus, Factor f,
    const std::map<std::string, std::int64_t>& frame_freq,
    const FactorThresholds& thresholds) {
  return assign_with_stats(corpus, f, frame_freq, thresholds,
                           entropy_by_frame(corpus));
}

FactorAssignments assign_all_factors(
    const Corpus& corpus,
    const std::map<std::string, std::int64_t>* frame_freq) {
  FactorAssignments out;
  static const std::map<std::string, std::int64_t> kEmptyFreq;
  const auto& freq = frame_freq ? *frame_freq : kEmptyFreq;

  std::vector<FrameStats> stats = compute_frame_stats(corpus);
  std::map<std::string, double> frame_entropy;
  std::vector<double> entropies;
  for (const FrameStats& fs : stats) {
    frame_entropy[fs.frame] = fs.entropy_bits;
    entropies.push_back(fs.entropy_bits);
  }
  out.thresholds.entropy_threshold = median(std::move(entropies));
  if (frame_freq) {
    std::vector<double> freqs;
    for (const FrameStats& fs : stats) {
      auto it = freq.find(fs.frame);
      freqs.push_back(it == freq.end() ? 0.0 : static_cast<double>(it->second));
    }
    out.thresholds.bias_median_frequency = median(std::move(freqs));
  }

  for (Factor f : kAllFactors) {
    if (f == Factor::bias && !frame_freq) continue;  // skipped without a table
    out.factors.push_back(f);
    out.status[f] = assign_with_stats(corpus, f, freq, out.thresholds, frame_entropy);
  }
  return out;
}

FactorBins bin_by_factor_count(const Corpus& corpus,
                               const std::vector<Factor>& selected,
                               const FactorAssignments& assignments) {
  if (selected.empty()) throw ValidationError("no factors selected for binning");
  FactorBins bins;
  bins.by_count.assign(selected.size() + 1, {});
  for (std::size_t i = 0; i < corpus.examples.size(); ++i) {
    bool excluded = false;
    std::size_t hard = 0;
    for (Factor f : selected) {
      auto it = assignments.status.find(f);
      if (it == assignments.status.end())
        throw ValidationError("factor '" + std::string(factor_name(f)) +
                              "' has no assignment");
      switch (it->second[i]) {
        case FactorStatus::excluded: excluded = true; break;
        case FactorStatus::hard: ++hard; break;
        case FactorStatus::easy: break;
      }
    }
    if (excluded) bins.excluded.push_back(corpus.examples[i].id);
    else bins.by_count[hard].push_back(corpus.examples[i].id);
  }
  return bins;
}

}  // namespace qaeval
