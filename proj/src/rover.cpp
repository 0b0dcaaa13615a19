#include "qaeval/rover.hpp"

#include "qaeval/errors.hpp"
#include "qaeval/text_metrics.hpp"

namespace qaeval {

RoverResult rover_vote(const std::vector<std::string>& outputs, int alpha) {
  if (outputs.empty())
    throw ValidationError("rover_vote requires at least one output");
  if (alpha < 0) throw ValidationError("alpha must be >= 0");
  const std::size_t n = outputs.size();
  RoverResult r;
  r.votes.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) {
        // self-vote still goes through the predicate: dist 0 < alpha
        if (0 < alpha) ++r.votes[i];
      } else if (levenshtein(outputs[i], outputs[j]) < alpha) {
        ++r.votes[i];
      }
    }
  }
  r.winner = 0;
  for (std::size_t i = 1; i < n; ++i)
    if (r.votes[i] > r.votes[r.winner]) r.winner = i;
  r.k = r.votes[r.winner];
  r.answer = outputs[r.winner];
  return r;
}

}  // namespace qaeval
