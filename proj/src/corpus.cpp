#include "qaeval/corpus.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "qaeval/errors.hpp"
#include "qaeval/unicode.hpp"

namespace qaeval {

using nlohmann::json;
using nlohmann::ordered_json;

LuPos parse_lu_pos(std::string_view s) {
  if (s == "nominal") return LuPos::nominal;
  if (s == "verbal") return LuPos::verbal;
  throw ValidationError("lu_pos must be 'nominal' or 'verbal', got '" +
                        std::string(s) + "'");
}

std::string_view lu_pos_name(LuPos p) {
  return p == LuPos::nominal ? "nominal" : "verbal";
}

Label parse_label(std::string_view s) {
  if (s == "correct") return Label::correct;
  if (s == "partially_correct") return Label::partially_correct;
  if (s == "incorrect") return Label::incorrect;
  throw ValidationError(
      "label must be 'correct', 'partially_correct', or 'incorrect', got '" +
      std::string(s) + "'");
}

std::string_view label_name(Label l) {
  switch (l) {
    case Label::correct: return "correct";
    case Label::partially_correct: return "partially_correct";
    case Label::incorrect: return "incorrect";
  }
  return "";
}

const Example& Corpus::at(const std::string& id) const {
  auto it = by_id.find(id);
  if (it == by_id.end()) throw ValidationError("unknown example id '" + id + "'");
  return examples[it->second];
}

const std::string& PredictionSet::answer(const std::string& model,
                                         const std::string& id) const {
  auto mit = answers.find(model);
  if (mit == answers.end())
    throw ValidationError("no predictions for model '" + model + "'");
  auto ait = mit->second.find(id);
  if (ait == mit->second.end())
    throw ValidationError("model '" + model + "' has no answer for example '" +
                          id + "'");
  return ait->second;
}

bool LabelSet::has(const std::string& model, const std::string& id) const {
  auto mit = labels.find(model);
  return mit != labels.end() && mit->second.count(id) > 0;
}

Label LabelSet::at(const std::string& model, const std::string& id) const {
  auto mit = labels.find(model);
  if (mit != labels.end()) {
    auto lit = mit->second.find(id);
    if (lit != mit->second.end()) return lit->second;
  }
  throw ValidationError("no label for model '" + model + "', example '" + id + "'");
}

namespace {

std::string location(const std::string& path, std::size_t lineno) {
  return path + ":" + std::to_string(lineno);
}

// Iterates non-empty lines of a file, giving 1-based line numbers.
template <typename Fn>
void for_each_line(const std::string& path, Fn fn) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    fn(line, lineno);
  }
  if (in.bad()) throw IoError("read failure on '" + path + "'");
}

json parse_json_line(const std::string& line, const std::string& path,
                     std::size_t lineno) {
  json j = json::parse(line, nullptr, false);
  if (j.is_discarded())
    throw ValidationError(location(path, lineno) + ": malformed JSON");
  if (!j.is_object())
    throw ValidationError(location(path, lineno) + ": expected a JSON object");
  return j;
}

std::string require_string(const json& j, const char* key, const std::string& path,
                           std::size_t lineno) {
  if (!j.contains(key))
    throw ValidationError(location(path, lineno) + ": missing field '" +
                          key + "'");
  if (!j[key].is_string())
    throw ValidationError(location(path, lineno) + ": field '" + key +
                          "' must be a string");
  return uni::nfc(j[key].get<std::string>());
}

bool require_bool(const json& j, const char* key, const std::string& path,
                  std::size_t lineno) {
  if (!j.contains(key))
    throw ValidationError(location(path, lineno) + ": missing field '" +
                          key + "'");
  if (!j[key].is_boolean())
    throw ValidationError(location(path, lineno) + ": field '" + key +
                          "' must be a boolean");
  return j[key].get<bool>();
}

int require_int(const json& j, const char* key, const std::string& path,
                std::size_t lineno) {
  if (!j.contains(key))
    throw ValidationError(location(path, lineno) + ": missing field '" +
                          key + "'");
  if (!j[key].is_number_integer())
    throw ValidationError(location(path, lineno) + ": field '" + key +
                          "' must be an integer");
  return j[key].get<int>();
}

void require_nonempty(const std::string& value, const char* key,
                      const std::string& path, std::size_t lineno) {
  if (value.empty())
    throw ValidationError(location(path, lineno) + ": field '" +
                          std::string(key) + "' must be non-empty");
}

}  // namespace

Corpus load_corpus(const std::string& path) {
  Corpus corpus;
  for_each_line(path, [&](const std::string& line, std::size_t lineno) {
    json j = parse_json_line(line, path, lineno);
    Example e;
    try {
      e.id = require_string(j, "id", path, lineno);
      e.context = require_string(j, "context", path, lineno);
      e.question = require_string(j, "question", path, lineno);
      e.reference_answer = require_string(j, "reference_answer", path, lineno);
      e.frame = require_string(j, "frame", path, lineno);
      e.lu_text = require_string(j, "lu_text", path, lineno);
      e.lu_pos = parse_lu_pos(require_string(j, "lu_pos", path, lineno));
      e.fe_count = require_int(j, "fe_count", path, lineno);
      e.coref_required = require_bool(j, "coref_required", path, lineno);
      e.trigger_in_question = require_bool(j, "trigger_in_question", path, lineno);
      if (j.contains("dep_distance") && !j["dep_distance"].is_null())
        e.dep_distance = require_int(j, "dep_distance", path, lineno);
    } catch (const ValidationError& err) {
      // parse_lu_pos throws without location info; re-attach it
      std::string msg = err.what();
      if (msg.rfind(path, 0) != 0)
        throw ValidationError(location(path, lineno) + ": " + msg);
      throw;
    }
    require_nonempty(e.id, "id", path, lineno);
    require_nonempty(e.question, "question", path, lineno);
    require_nonempty(e.reference_answer, "reference_answer", path, lineno);
    require_nonempty(e.frame, "frame", path, lineno);
    require_nonempty(e.lu_text, "lu_text", path, lineno);
    if (e.fe_count < 1)
      throw ValidationError(location(path, lineno) + ": fe_count must be >= 1");
    if (e.dep_distance && *e.dep_distance < 1)
      throw ValidationError(location(path, lineno) +
                            ": dep_distance must be >= 1 when present");
    if (corpus.by_id.count(e.id))
      throw ValidationError(location(path, lineno) + ": duplicate example id '" +
                            e.id + "'");
    corpus.by_id[e.id] = corpus.examples.size();
    corpus.examples.push_back(std::move(e));
  });
  if (corpus.examples.empty())
    throw ValidationError("'" + path + "' contains no examples");
  return corpus;
}

PredictionSet load_predictions(const std::string& path, const Corpus& corpus) {
  PredictionSet preds;
  for_each_line(path, [&](const std::string& line, std::size_t lineno) {
    json j = parse_json_line(line, path, lineno);
    std::string model = require_string(j, "model_id", path, lineno);
    std::string id = require_string(j, "example_id", path, lineno);
    std::string answer = require_string(j, "answer", path, lineno);
    require_nonempty(model, "model_id", path, lineno);
    if (!corpus.by_id.count(id))
      throw ValidationError(location(path, lineno) + ": example_id '" + id +
                            "' does not exist in the corpus");
    auto mit = preds.answers.find(model);
    if (mit == preds.answers.end()) {
      preds.model_order.push_back(model);
      mit = preds.answers.emplace(model, std::map<std::string, std::string>{}).first;
    }
    if (!mit->second.emplace(id, std::move(answer)).second)
      throw ValidationError(location(path, lineno) + ": duplicate prediction for (" +
                            model + ", " + id + ")");
  });
  if (preds.model_order.empty())
    throw ValidationError("'" + path + "' contains no predictions");
  return preds;
}

LabelSet load_labels(const std::string& path, const PredictionSet& predictions) {
  LabelSet labels;
  for_each_line(path, [&](const std::string& line, std::size_t lineno) {
    json j = parse_json_line(line, path, lineno);
    std::string model = require_string(j, "model_id", path, lineno);
    std::string id = require_string(j, "example_id", path, lineno);
    std::string raw = require_string(j, "label", path, lineno);
    Label label;
    try {
      label = parse_label(raw);
    } catch (const ValidationError& err) {
      throw ValidationError(location(path, lineno) + ": " + err.what());
    }
    auto mit = predictions.answers.find(model);
    if (mit == predictions.answers.end() || !mit->second.count(id))
      throw ValidationError(location(path, lineno) + ": label for (" + model +
                            ", " + id + ") has no matching prediction");
    if (!labels.labels[model].emplace(id, label).second)
      throw ValidationError(location(path, lineno) + ": duplicate label for (" +
                            model + ", " + id + ")");
  });
  return labels;
}

namespace {

std::pair<std::string, std::string> split_tsv(const std::string& line,
                                              const std::string& path,
                                              std::size_t lineno) {
  auto tab = line.find('\t');
  if (tab == std::string::npos || line.find('\t', tab + 1) != std::string::npos)
    throw ValidationError(location(path, lineno) +
                          ": expected exactly two tab-separated fields");
  return {line.substr(0, tab), line.substr(tab + 1)};
}

}  // namespace

std::map<std::string, std::int64_t> load_frame_freq(const std::string& path) {
  std::map<std::string, std::int64_t> freq;
  for_each_line(path, [&](const std::string& line, std::size_t lineno) {
    auto [frame, count_text] = split_tsv(line, path, lineno);
    frame = uni::nfc(frame);
    if (frame.empty())
      throw ValidationError(location(path, lineno) + ": empty frame name");
    std::int64_t count = 0;
    try {
      std::size_t pos = 0;
      count = std::stoll(count_text, &pos);
      if (pos != count_text.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw ValidationError(location(path, lineno) + ": count '" + count_text +
                            "' is not an integer");
    }
    if (count < 0)
      throw ValidationError(location(path, lineno) + ": count must be >= 0");
    if (!freq.emplace(frame, count).second)
      throw ValidationError(location(path, lineno) + ": duplicate frame '" +
                            frame + "'");
  });
  return freq;
}

std::map<std::string, std::set<std::string>> load_lexicon(const std::string& path) {
  std::map<std::string, std::set<std::string>> lexicon;
  for_each_line(path, [&](const std::string& line, std::size_t lineno) {
    auto [frame, trigger] = split_tsv(line, path, lineno);
    frame = uni::nfc(frame);
    trigger = uni::nfc(trigger);
    if (frame.empty())
      throw ValidationError(location(path, lineno) + ": empty frame name");
    if (trigger.empty())
      throw ValidationError(location(path, lineno) + ": empty trigger");
    lexicon[frame].insert(trigger);
  });
  if (lexicon.empty())
    throw ValidationError("'" + path + "' contains no lexicon entries");
  return lexicon;
}

std::vector<Question> load_questions(const std::string& path) {
  std::vector<Question> questions;
  std::set<std::string> seen;
  for_each_line(path, [&](const std::string& line, std::size_t lineno) {
    json j = parse_json_line(line, path, lineno);
    Question q;
    q.id = require_string(j, "id", path, lineno);
    q.question = require_string(j, "question", path, lineno);
    require_nonempty(q.id, "id", path, lineno);
    require_nonempty(q.question, "question", path, lineno);
    if (j.contains("reference_answer") && !j["reference_answer"].is_null())
      q.reference_answer = require_string(j, "reference_answer", path, lineno);
    if (j.contains("context") && !j["context"].is_null())
      q.context = require_string(j, "context", path, lineno);
    if (!seen.insert(q.id).second)
      throw ValidationError(location(path, lineno) + ": duplicate question id '" +
                            q.id + "'");
    questions.push_back(std::move(q));
  });
  if (questions.empty())
    throw ValidationError("'" + path + "' contains no questions");
  return questions;
}

namespace {

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << content;
  if (!out) throw IoError("write failure on '" + path + "'");
}

}  // namespace

void save_corpus(const Corpus& corpus, const std::string& path) {
  std::ostringstream out;
  for (const Example& e : corpus.examples) {
    ordered_json j;
    j["id"] = e.id;
    j["context"] = e.context;
    j["question"] = e.question;
    j["reference_answer"] = e.reference_answer;
    j["frame"] = e.frame;
    j["lu_text"] = e.lu_text;
    j["lu_pos"] = std::string(lu_pos_name(e.lu_pos));
    j["fe_count"] = e.fe_count;
    j["coref_required"] = e.coref_required;
    j["trigger_in_question"] = e.trigger_in_question;
    if (e.dep_distance) j["dep_distance"] = *e.dep_distance;
    out << j.dump() << "\n";
  }
  write_file(path, out.str());
}

void save_predictions(const PredictionSet& preds, const std::string& path) {
  std::ostringstream out;
  for (const std::string& model : preds.model_order)
    for (const auto& [id, answer] : preds.answers.at(model)) {
      ordered_json j;
      j["model_id"] = model;
      j["example_id"] = id;
      j["answer"] = answer;
      out << j.dump() << "\n";
    }
  write_file(path, out.str());
}

void save_labels(const LabelSet& labels, const std::vector<std::string>& model_order,
                 const std::string& path) {
  std::ostringstream out;
  for (const std::string& model : model_order) {
    auto mit = labels.labels.find(model);
    if (mit == labels.labels.end()) continue;
    for (const auto& [id, label] : mit->second) {
      ordered_json j;
      j["model_id"] = model;
      j["example_id"] = id;
      j["label"] = std::string(label_name(label));
      out << j.dump() << "\n";
    }
  }
  write_file(path, out.str());
}

void save_frame_freq(const std::map<std::string, std::int64_t>& freq,
                     const std::string& path) {
  std::ostringstream out;
  for (const auto& [frame, count] : freq) out << frame << "\t" << count << "\n";
  write_file(path, out.str());
}

void save_lexicon(const std::map<std::string, std::set<std::string>>& lexicon,
                  const std::string& path) {
  std::ostringstream out;
  for (const auto& [frame, triggers] : lexicon)
    for (const auto& trigger : triggers) out << frame << "\t" << trigger << "\n";
  write_file(path, out.str());
}

void save_questions(const std::vector<Question>& questions, const std::string& path) {
  std::ostringstream out;
  for (const Question& q : questions) {
    ordered_json j;
    j["id"] = q.id;
    j["question"] = q.question;
    if (q.reference_answer) j["reference_answer"] = *q.reference_answer;
    if (q.context) j["context"] = *q.context;
    out << j.dump() << "\n";
  }
  write_file(path, out.str());
}

}  // namespace qaeval
