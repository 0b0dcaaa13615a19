#pragma once

#include <string>
#include <vector>

namespace qaeval {

// Agreement vote over one example's model outputs.
//
// vote(i) = |{ j : levenshtein(outputs[i], outputs[j]) < alpha }|, self
// included. k = max vote; the winner is the lowest-indexed output attaining
// k; the example falls into partition P_k.
struct RoverResult {
  std::vector<int> votes;     // one per output, input order
  int k = 0;                  // winning vote count (partition index)
  std::size_t winner = 0;     // index of the winning output
  std::string answer;         // outputs[winner]
};

// `outputs` must be non-empty and alpha >= 0 (ValidationError otherwise).
// For alpha >= 1 the self-vote always passes, so k is in [1, n] and n = 1
// degenerates to k = 1, winner = 0. At alpha = 0 nothing agrees with
// anything (the predicate is strict), so every vote is 0.
RoverResult rover_vote(const std::vector<std::string>& outputs, int alpha);

}  // namespace qaeval
