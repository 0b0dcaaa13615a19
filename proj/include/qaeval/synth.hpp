#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "qaeval/corpus.hpp"
#include "qaeval/factors.hpp"
#include "qaeval/frame_proxy.hpp"

namespace qaeval {

// Deterministic synthetic-corpus spec. Identical spec -> identical bytes on
// every platform (generation uses mt19937_64 with hand-rolled draws; no
// std::*_distribution).
struct SynthSpec {
  std::uint64_t seed = 1;
  std::size_t n_examples = 400;
  std::size_t n_models = 6;
  // Score drop planted on the hard subset of each factor (e.g. coref -> -0.4).
  std::map<Factor, double> effects;
  // Target distribution over partitions P1..Pn; empty = uniform. Must have
  // n_models non-negative entries summing to ~1; realized exactly by
  // largest-remainder apportionment.
  std::vector<double> agreement_profile;
  // Probability a label is replaced by a uniform random label.
  double label_noise = 0.0;
  // Correct-label probability on the all-easy side.
  double base_correct = 0.85;
};

struct SynthData {
  Corpus corpus;
  PredictionSet predictions;
  LabelSet labels;
  std::map<std::string, std::int64_t> frame_freq;
};

// Generates a corpus with exact-half hard/easy splits for every factor
// (frames arranged in rare/common x high/low-entropy pools so the bias and
// entropy medians reproduce the planted splits), label counts stratified per
// (model, effect-combination) so planted effects are realized up to integer
// rounding, and answer strings engineered so the alpha=5 voting partition
// matches the agreement profile exactly. Requires n_examples >= 8 and even
// (exact halves), 1 <= n_models <= 25; an invalid profile is a
// ValidationError.
SynthData generate(const SynthSpec& spec);

// Companion fixture for the proxy pipeline: n questions over a small
// lexicon, a deterministic fraction of them without any trigger.
struct ProxyFixture {
  std::vector<Question> questions;
  FrameLexicon lexicon;
};

ProxyFixture generate_proxy_fixture(std::uint64_t seed, std::size_t n_questions);

}  // namespace qaeval
