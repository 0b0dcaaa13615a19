#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "qaeval/corpus.hpp"

namespace qaeval {

enum class Factor { bias, coref, trigger, lu_in_q, dist, nb_fes, entropy };

inline constexpr std::array<Factor, 7> kAllFactors = {
    Factor::bias, Factor::coref,  Factor::trigger, Factor::lu_in_q,
    Factor::dist, Factor::nb_fes, Factor::entropy};

Factor parse_factor(std::string_view name);
std::string_view factor_name(Factor f);

enum class FactorStatus { hard, easy, excluded };
std::string_view factor_status_name(FactorStatus s);

// Median of a non-empty list; even cardinality takes the mean of the two
// middle values.
double median(std::vector<double> values);

// Shannon entropy of a count histogram. base2=true gives bits, false nats.
// Empty or all-zero histogram is a ValidationError.
double shannon_entropy(const std::vector<std::int64_t>& counts, bool base2 = true);

// Per-frame statistics over the evaluation corpus.
struct FrameStats {
  std::string frame;
  std::int64_t occurrences = 0;
  std::map<std::string, std::int64_t> lu_histogram;  // lu_text -> count
  double entropy_bits = 0.0;
};

std::vector<FrameStats> compute_frame_stats(const Corpus& corpus);

// Data-derived thresholds, echoed into every report for reproducibility.
struct FactorThresholds {
  double entropy_threshold = 0.0;        // median entropy over distinct frames
  double bias_median_frequency = 0.0;    // median adaptation-corpus frequency
  int dist_threshold = 2;                // hard iff dep_distance >= this
  int nb_fes_threshold = 2;              // hard iff fe_count <= this
};

// bias median: over adaptation-corpus frequencies of the distinct frames in
// the evaluation corpus (absent frame -> 0). entropy median: over those
// frames' LU-distribution entropies (counts from the evaluation corpus).
FactorThresholds compute_thresholds(
    const Corpus& corpus, const std::map<std::string, std::int64_t>& frame_freq);

// Status of every corpus example for one factor; parallel to corpus.examples.
// Only dist may produce excluded (missing dep_distance).
std::vector<FactorStatus> assign_factor(
    const Corpus& corpus, Factor f,
    const std::map<std::string, std::int64_t>& frame_freq,
    const FactorThresholds& thresholds);

struct FactorAssignments {
  FactorThresholds thresholds;
  std::vector<Factor> factors;  // assignment order
  // factor -> per-example status, parallel to corpus.examples
  std::map<Factor, std::vector<FactorStatus>> status;
};

// All seven factors. Without a frequency table, bias is skipped (not present
// in the result), matching the optional-input mode.
FactorAssignments assign_all_factors(
    const Corpus& corpus,
    const std::map<std::string, std::int64_t>* frame_freq);

// Bins each example by how many of the selected factors mark it hard;
// examples excluded under any selected factor land in the `excluded` bin.
struct FactorBins {
  std::vector<std::vector<std::string>> by_count;  // index = hard count
  std::vector<std::string> excluded;
};

FactorBins bin_by_factor_count(const Corpus& corpus,
                               const std::vector<Factor>& selected,
                               const FactorAssignments& assignments);

}  // namespace qaeval
