#include "qaeval/human_metrics.hpp"

#include "qaeval/errors.hpp"

namespace qaeval {

double label_score(Label l) {
  switch (l) {
    case Label::correct: return 1.0;
    case Label::partially_correct: return 0.5;
    case Label::incorrect: return 0.0;
  }
  return 0.0;
}

HumanSummary summarize_labels(const std::vector<Label>& labels) {
  if (labels.empty())
    throw ValidationError("cannot summarize an empty label subset");
  HumanSummary s;
  s.n = labels.size();
  for (Label l : labels) {
    switch (l) {
      case Label::correct: ++s.n_correct; break;
      case Label::partially_correct: ++s.n_partial; break;
      case Label::incorrect: ++s.n_incorrect; break;
    }
  }
  const double n = static_cast<double>(s.n);
  s.hcorrect = static_cast<double>(s.n_correct) / n;
  // Defined as hcorrect + 0.5*p(partial) so the identity holds bit-for-bit.
  s.hscore = s.hcorrect + 0.5 * (static_cast<double>(s.n_partial) / n);
  return s;
}

}  // namespace qaeval
