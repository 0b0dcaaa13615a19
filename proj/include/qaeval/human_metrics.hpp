#pragma once

#include <map>
#include <string>
#include <vector>

#include "qaeval/corpus.hpp"

namespace qaeval {

// Per-example score: correct -> 1.0, partially_correct -> 0.5, incorrect -> 0.0.
double label_score(Label l);

struct HumanSummary {
  std::size_t n = 0;
  std::size_t n_correct = 0;
  std::size_t n_partial = 0;
  std::size_t n_incorrect = 0;
  double hscore = 0.0;    // hcorrect + 0.5 * (n_partial / n)
  double hcorrect = 0.0;  // n_correct / n
};

// Summarizes a non-empty list of labels; empty input is a ValidationError
// (never a silent zero).
HumanSummary summarize_labels(const std::vector<Label>& labels);

}  // namespace qaeval
