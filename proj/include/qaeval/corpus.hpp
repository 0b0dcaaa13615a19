#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace qaeval {

enum class LuPos { nominal, verbal };

LuPos parse_lu_pos(std::string_view s);
std::string_view lu_pos_name(LuPos p);

// One evaluation example. Text fields are NFC-normalized on load.
struct Example {
  std::string id;
  std::string context;
  std::string question;
  std::string reference_answer;
  std::string frame;
  std::string lu_text;
  LuPos lu_pos = LuPos::verbal;
  int fe_count = 1;                  // >= 1
  bool coref_required = false;
  bool trigger_in_question = false;
  std::optional<int> dep_distance;   // >= 1 when present
};

enum class Label { correct, partially_correct, incorrect };

Label parse_label(std::string_view s);
std::string_view label_name(Label l);

struct Corpus {
  std::vector<Example> examples;             // file order
  std::map<std::string, std::size_t> by_id;  // id -> index into examples

  const Example& at(const std::string& id) const;
};

// Per-model predicted answers. Model order = order of first appearance in
// the predictions file; it is the tie-break order everywhere downstream.
struct PredictionSet {
  std::vector<std::string> model_order;
  // model -> example_id -> answer
  std::map<std::string, std::map<std::string, std::string>> answers;

  const std::string& answer(const std::string& model, const std::string& id) const;
};

// Per-model human labels, keyed like PredictionSet.
struct LabelSet {
  std::map<std::string, std::map<std::string, Label>> labels;

  bool has(const std::string& model, const std::string& id) const;
  Label at(const std::string& model, const std::string& id) const;
};

// Loaders. Each throws IoError if the file cannot be read and
// ValidationError (with the offending line number) on schema violations.
Corpus load_corpus(const std::string& path);
PredictionSet load_predictions(const std::string& path, const Corpus& corpus);
LabelSet load_labels(const std::string& path, const PredictionSet& predictions);

// frame -> occurrence count in the adaptation corpus. TSV: frame<TAB>count.
std::map<std::string, std::int64_t> load_frame_freq(const std::string& path);

// frame -> set of trigger lexical units. TSV: frame<TAB>trigger, frames repeat.
std::map<std::string, std::set<std::string>> load_lexicon(const std::string& path);

// Question-only input for the frame-proxy pipeline.
struct Question {
  std::string id;
  std::string question;
  std::optional<std::string> reference_answer;
  std::optional<std::string> context;
};

std::vector<Question> load_questions(const std::string& path);

// Writers (one JSON object per line, key order fixed; byte-deterministic).
void save_corpus(const Corpus& corpus, const std::string& path);
void save_predictions(const PredictionSet& preds, const std::string& path);
void save_labels(const LabelSet& labels, const std::vector<std::string>& model_order,
                 const std::string& path);
void save_frame_freq(const std::map<std::string, std::int64_t>& freq,
                     const std::string& path);
void save_lexicon(const std::map<std::string, std::set<std::string>>& lexicon,
                  const std::string& path);
void save_questions(const std::vector<Question>& questions, const std::string& path);

}  // namespace qaeval
