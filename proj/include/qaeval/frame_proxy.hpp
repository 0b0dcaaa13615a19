#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "qaeval/corpus.hpp"
#include "qaeval/factors.hpp"

namespace qaeval {

using FrameLexicon = std::map<std::string, std::set<std::string>>;

struct CandidatePair {
  std::string frame;
  std::string trigger;
};

struct CandidateList {
  std::string question_id;
  std::vector<CandidatePair> pairs;  // de-duplicated, deterministic order
  bool empty() const { return pairs.empty(); }
};

// Whole-word, case-insensitive trigger lookup; multiword triggers match as
// contiguous word sequences. Pairs are ordered by (trigger's first position
// in the question, frame name).
CandidateList extract_candidates(const std::string& question_id,
                                 std::string_view question,
                                 const FrameLexicon& lexicon);

// Pluggable frame/FE predictor. Both calls receive the fully instantiated
// prompt and return raw text; parsing and validation happen in the pipeline.
class Predictor {
 public:
  virtual ~Predictor() = default;
  virtual std::string complete(const std::string& prompt) = 0;
};

// Deterministic stand-in: selects the candidate with the longest trigger,
// breaking ties by lexicographically smallest frame name; FE extraction
// returns heuristic chunks (maximal runs of question tokens of length >= 4
// that are not part of the trigger), named Chunk1, Chunk2, ... in question
// order.
std::unique_ptr<Predictor> make_stub_predictor();

// HTTP predictor: POSTs {"prompt": ...} to `endpoint` with an optional
// bearer token; expects {"text": ...} back. Bounded retries (3 attempts,
// exponential backoff).
std::unique_ptr<Predictor> make_remote_predictor(const std::string& endpoint,
                                                 const std::string& api_key);

enum class ProxyStatus { ok, no_triggers, unknown_frame, fe_extraction_failed,
                         transport_failed };

std::string_view proxy_status_name(ProxyStatus s);

struct ProxyResult {
  std::string question_id;
  ProxyStatus status = ProxyStatus::no_triggers;
  std::optional<CandidatePair> selected;          // set when a frame was chosen
  std::vector<std::pair<std::string, std::string>> fes;  // name -> text, ordered
  std::optional<int> fe_count;                    // set when status == ok
  std::string raw_response;                       // last predictor output kept
};

// Prompt templates with {list}/{question}/{pair} placeholders.
struct PromptTemplates {
  std::string frame_select;
  std::string fe_extract;
};

PromptTemplates load_prompts(const std::string& directory);

std::string instantiate_frame_prompt(const PromptTemplates& t,
                                     const CandidateList& candidates,
                                     std::string_view question);
std::string instantiate_fe_prompt(const PromptTemplates& t,
                                  const CandidatePair& pair,
                                  std::string_view question);

// Runs the full pipeline over the questions. Statuses partition the input:
// ok + no_triggers + unknown_frame + fe_extraction_failed + transport_failed
// = total.
std::vector<ProxyResult> run_proxy(const std::vector<Question>& questions,
                                   const FrameLexicon& lexicon,
                                   const PromptTemplates& prompts,
                                   Predictor& predictor);

struct ProxySummary {
  std::size_t total = 0;
  std::size_t ok = 0;
  std::size_t no_triggers = 0;
  std::size_t unknown_frame = 0;
  std::size_t fe_extraction_failed = 0;
  std::size_t transport_failed = 0;
};

ProxySummary summarize_proxy(const std::vector<ProxyResult>& results);

// Entropy of a lexicon frame's trigger set under a uniform distribution:
// log2(|triggers|).
double lexicon_frame_entropy(const std::set<std::string>& triggers);

// nb_fes / entropy assignments for the questions, usable by the analysis in
// place of annotation-derived factors. entropy threshold = median uniform
// trigger-set entropy over ALL lexicon frames; nb_fes hard iff fe_count <= 2.
// A question gets entropy status whenever a frame was selected (ok or
// fe_extraction_failed), nb_fes status only when status == ok; everything
// else is excluded.
struct ProxyAssignments {
  FactorThresholds thresholds;  // bias_median_frequency unused, left 0
  // question_id -> status, per factor
  std::map<Factor, std::map<std::string, FactorStatus>> status;
};

ProxyAssignments proxy_factor_assignments(const std::vector<ProxyResult>& results,
                                          const FrameLexicon& lexicon);

// proxy_results.jsonl round-trip.
void save_proxy_results(const std::vector<ProxyResult>& results,
                        const std::string& path);
std::vector<ProxyResult> load_proxy_results(const std::string& path);

}  // namespace qaeval
