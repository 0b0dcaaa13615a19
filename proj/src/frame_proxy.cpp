#include "qaeval/frame_proxy.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "qaeval/errors.hpp"
#include "qaeval/text_metrics.hpp"
#include "qaeval/unicode.hpp"

namespace qaeval {
namespace {

std::string lower(std::string_view s) {
  std::u32string u = uni::decode_utf8(s);
  for (char32_t& c : u) c = uni::to_lower(c);
  return uni::encode_utf8(u);
}

std::string trim(std::string_view s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::string strip_quotes(std::string_view s) {
  std::string t = trim(s);
  if (t.size() >= 2 && ((t.front() == '\'' && t.back() == '\'') ||
                        (t.front() == '"' && t.back() == '"')))
    return t.substr(1, t.size() - 2);
  return t;
}

// "('Frame', 'trigger')" -> pair; anything else -> nullopt.
std::optional<CandidatePair> parse_pair(std::string_view text) {
  std::string t = trim(text);
  if (t.size() < 2 || t.front() != '(' || t.back() != ')') return std::nullopt;
  std::string body = t.substr(1, t.size() - 2);
  std::size_t comma = body.find(',');
  if (comma == std::string::npos) return std::nullopt;
  CandidatePair p;
  p.frame = strip_quotes(body.substr(0, comma));
  p.trigger = strip_quotes(body.substr(comma + 1));
  if (p.frame.empty() || p.trigger.empty()) return std::nullopt;
  return p;
}

std::string render_pair(const CandidatePair& p) {
  return "('" + p.frame + "', '" + p.trigger + "')";
}

std::string render_list(const CandidateList& c) {
  std::string out = "[";
  for (std::size_t i = 0; i < c.pairs.size(); ++i) {
    if (i) out += ", ";
    out += render_pair(c.pairs[i]);
  }
  return out + "]";
}

std::vector<CandidatePair> parse_list(std::string_view text) {
  std::vector<CandidatePair> pairs;
  std::size_t pos = 0;
  while (true) {
    std::size_t open = text.find('(', pos);
    if (open == std::string_view::npos) break;
    std::size_t close = text.find(')', open);
    if (close == std::string_view::npos) break;
    auto p = parse_pair(text.substr(open, close - open + 1));
    if (p) pairs.push_back(*p);
    pos = close + 1;
  }
  return pairs;
}

std::string one_line(std::string_view s) {
  std::string out(s);
  for (char& c : out)
    if (c == '\n' || c == '\r') c = ' ';
  return out;
}

void replace_all(std::string& text, std::string_view what,
                 std::string_view with) {
  std::size_t pos = 0;
  while ((pos = text.find(what, pos)) != std::string::npos) {
    text.replace(pos, what.size(), with);
    pos += with.size();
  }
}

std::string line_after(const std::string& text, std::string_view marker) {
  std::size_t pos = text.find(marker);
  if (pos == std::string::npos) return "";
  pos += marker.size();
  std::size_t end = text.find('\n', pos);
  if (end == std::string::npos) end = text.size();
  return text.substr(pos, end - pos);
}

class StubPredictor final : public Predictor {
 public:
  std::string complete(const std::string& prompt) override {
    std::string question = trim(line_after(prompt, "Question : "));
    std::string pair_line = line_after(prompt, "Pair : ");
    if (!pair_line.empty()) {
      auto pair = parse_pair(pair_line);
      return extract_chunks(question, pair ? pair->trigger : "");
    }
    std::vector<CandidatePair> pairs = parse_list(line_after(prompt, "List : "));
    if (pairs.empty()) return "()";
    const CandidatePair* best = &pairs.front();
    for (const CandidatePair& p : pairs) {
      if (p.trigger.size() > best->trigger.size() ||
          (p.trigger.size() == best->trigger.size() && p.frame < best->frame))
        best = &p;
    }
    return render_pair(*best);
  }

 private:
  static std::string extract_chunks(const std::string& question,
                                    const std::string& trigger) {
    std::vector<std::string> qtok = tokenize(question);
    std::vector<std::string> ttok = tokenize(trigger);
    auto in_trigger = [&](const std::string& t) {
      return std::find(ttok.begin(), ttok.end(), t) != ttok.end();
    };
    nlohmann::ordered_json fes = nlohmann::ordered_json::object();
    int chunk = 0;
    std::string run;
    auto flush = [&] {
      if (run.empty()) return;
      fes["Chunk" + std::to_string(++chunk)] = run;
      run.clear();
    };
    for (const std::string& t : qtok) {
      if (uni::decode_utf8(t).size() >= 4 && !in_trigger(t)) {
        if (!run.empty()) run += ' ';
        run += t;
      } else {
        flush();
      }
    }
    flush();
    return fes.dump();
  }
};

class RemotePredictor final : public Predictor {
 public:
  RemotePredictor(std::string endpoint, std::string api_key)
      : api_key_(std::move(api_key)) {
    std::size_t scheme = endpoint.find("://");
    std::size_t path = scheme == std::string::npos
                           ? endpoint.find('/')
                           : endpoint.find('/', scheme + 3);
    if (path == std::string::npos) {
      base_ = endpoint;
      path_ = "/";
    } else {
      base_ = endpoint.substr(0, path);
      path_ = endpoint.substr(path);
    }
  }

  std::string complete(const std::string& prompt) override {
    nlohmann::json body;
    body["prompt"] = prompt;
    std::string payload = body.dump();
    std::string last_error = "no attempt made";
    for (int attempt = 0; attempt < 3; ++attempt) {
      if (attempt > 0)
        std::this_thread::sleep_for(std::chrono::milliseconds(100 << (attempt - 1)));
      httplib::Client client(base_);
      client.set_connection_timeout(5, 0);
      client.set_read_timeout(30, 0);
      httplib::Headers headers;
      if (!api_key_.empty())
        headers.emplace("Authorization", "Bearer " + api_key_);
      auto res = client.Post(path_, headers, payload, "application/json");
      if (!res) {
        last_error = "connection to " + base_ + " failed";
        continue;
      }
      if (res->status != 200) {
        last_error = "status " + std::to_string(res->status) + " from " + base_;
        continue;
      }
      nlohmann::json parsed = nlohmann::json::parse(res->body, nullptr, false);
      if (parsed.is_discarded() || !parsed.is_object() ||
          !parsed.contains("text") || !parsed["text"].is_string()) {
        last_error = "malformed response body from " + base_;
        continue;
      }
      return parsed["text"].get<std::string>();
    }
    throw IoError("predictor request failed after 3 attempts: " + last_error);
  }

 private:
  std::string base_;
  std::string path_;
  std::string api_key_;
};

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot read " + path);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

}  // namespace

CandidateList extract_candidates(const std::string& question_id,
                                 std::string_view question,
                                 const FrameLexicon& lexicon) {
  CandidateList out;
  out.question_id = question_id;
  std::vector<std::string> qtok = tokenize(question);
  struct Hit {
    std::size_t position;
    CandidatePair pair;
  };
  std::vector<Hit> hits;
  for (const auto& [frame, triggers] : lexicon) {
    for (const std::string& trigger : triggers) {
      std::vector<std::string> ttok = tokenize(trigger);
      if (ttok.empty() || ttok.size() > qtok.size()) continue;
      for (std::size_t i = 0; i + ttok.size() <= qtok.size(); ++i) {
        if (std::equal(ttok.begin(), ttok.end(), qtok.begin() + i)) {
          hits.push_back({i, {frame, trigger}});
          break;
        }
      }
    }
  }
  std::sort(hits.begin(), hits.end(), [](const Hit& a, const Hit& b) {
    if (a.position != b.position) return a.position < b.position;
    if (a.pair.frame != b.pair.frame) return a.pair.frame < b.pair.frame;
    return a.pair.trigger < b.pair.trigger;
  });
  for (Hit& h : hits) out.pairs.push_back(std::move(h.pair));
  return out;
}

std::unique_ptr<Predictor> make_stub_predictor() {
  return std::make_unique<StubPredictor>();
}

std::unique_ptr<Predictor> make_remote_predictor(const std::string& endpoint,
                                                 const std::string& api_key) {
  return std::make_unique<RemotePredictor>(endpoint, api_key);
}

std::string_view proxy_status_name(ProxyStatus s) {
  switch (s) {
    case ProxyStatus::ok: return "ok";
    case ProxyStatus::no_triggers: return "no_triggers";
    case ProxyStatus::unknown_frame: return "unknown_frame";
    case ProxyStatus::fe_extraction_failed: return "fe_extraction_failed";
    case ProxyStatus::transport_failed: return "transport_failed";
  }
  return "";
}

PromptTemplates load_prompts(const std::string& directory) {
  PromptTemplates t;
  t.frame_select = read_file(directory + "/frame_select.txt");
  t.fe_extract = read_file(directory + "/fe_extract.txt");
  if (t.frame_select.find("{list}") == std::string::npos ||
      t.frame_select.find("{question}") == std::string::npos)
    throw ValidationError(directory +
                          "/frame_select.txt: missing {list} or {question}");
  if (t.fe_extract.find("{pair}") == std::string::npos ||
      t.fe_extract.find("{question}") == std::string::npos)
    throw ValidationError(directory +
                          "/fe_extract.txt: missing {pair} or {question}");
  return t;
}

std::string instantiate_frame_prompt(const PromptTemplates& t,
                                     const CandidateList& candidates,
                                     std::string_view question) {
  std::string p = t.frame_select;
  replace_all(p, "{list}", render_list(candidates));
  replace_all(p, "{question}", one_line(question));
  return p;
}

std::string instantiate_fe_prompt(const PromptTemplates& t,
                                  const CandidatePair& pair,
                                  std::string_view question) {
  std::string p = t.fe_extract;
  replace_all(p, "{pair}", render_pair(pair));
  replace_all(p, "{question}", one_line(question));
  return p;
}

std::vector<ProxyResult> run_proxy(const std::vector<Question>& questions,
                                   const FrameLexicon& lexicon,
                                   const PromptTemplates& prompts,
                                   Predictor& predictor) {
  std::vector<ProxyResult> out;
  out.reserve(questions.size());
  for (const Question& q : questions) {
    ProxyResult r;
    r.question_id = q.id;
    CandidateList candidates = extract_candidates(q.id, q.question, lexicon);
    if (candidates.empty()) {
      r.status = ProxyStatus::no_triggers;
      out.push_back(std::move(r));
      continue;
    }
    std::string frame_response;
    try {
      frame_response =
          predictor.complete(instantiate_frame_prompt(prompts, candidates,
                                                      q.question));
    } catch (const std::exception& e) {
      r.status = ProxyStatus::transport_failed;
      r.raw_response = e.what();
      out.push_back(std::move(r));
      continue;
    }
    r.raw_response = frame_response;
    std::optional<CandidatePair> pair = parse_pair(frame_response);
    if (!pair || !lexicon.count(pair->frame)) {
      r.status = ProxyStatus::unknown_frame;
      out.push_back(std::move(r));
      continue;
    }
    r.selected = *pair;
    std::string fe_response;
    try {
      fe_response = predictor.complete(
          instantiate_fe_prompt(prompts, *pair, q.question));
    } catch (const std::exception& e) {
      r.status = ProxyStatus::transport_failed;
      r.raw_response = e.what();
      out.push_back(std::move(r));
      continue;
    }
    r.raw_response = fe_response;
    nlohmann::ordered_json parsed =
        nlohmann::ordered_json::parse(trim(fe_response), nullptr, false);
    bool usable = !parsed.is_discarded() && parsed.is_object();
    if (usable)
      for (const auto& [name, value] : parsed.items())
        if (!value.is_string()) usable = false;
    if (!usable) {
      r.status = ProxyStatus::fe_extraction_failed;
      out.push_back(std::move(r));
      continue;
    }
    std::string trigger_lower = lower(pair->trigger);
    for (const auto& [name, value] : parsed.items()) {
      std::string text = value.get<std::string>();
      if (lower(trim(text)) == trigger_lower) continue;  // the LU is never a FE
      r.fes.emplace_back(name, text);
    }
    r.fe_count = static_cast<int>(r.fes.size());
    r.status = ProxyStatus::ok;
    out.push_back(std::move(r));
  }
  return out;
}

ProxySummary summarize_proxy(const std::vector<ProxyResult>& results) {
  ProxySummary s;
  s.total = results.size();
  for (const ProxyResult& r : results) {
    switch (r.status) {
      case ProxyStatus::ok: ++s.ok; break;
      case ProxyStatus::no_triggers: ++s.no_triggers; break;
      case ProxyStatus::unknown_frame: ++s.unknown_frame; break;
      case ProxyStatus::fe_extraction_failed: ++s.fe_extraction_failed; break;
      case ProxyStatus::transport_failed: ++s.transport_failed; break;
    }
  }
  return s;
}

double lexicon_frame_entropy(const std::set<std::string>& triggers) {
  if (triggers.empty()) return 0.0;
  return std::log2(static_cast<double>(triggers.size()));
}

ProxyAssignments proxy_factor_assignments(
    const std::vector<ProxyResult>& results, const FrameLexicon& lexicon) {
  ProxyAssignments out;
  std::vector<double> entropies;
  entropies.reserve(lexicon.size());
  for (const auto& [frame, triggers] : lexicon)
    entropies.push_back(lexicon_frame_entropy(triggers));
  out.thresholds.entropy_threshold = median(std::move(entropies));
  auto& nb = out.status[Factor::nb_fes];
  auto& en = out.status[Factor::entropy];
  for (const ProxyResult& r : results) {
    if (r.status == ProxyStatus::ok && r.fe_count)
      nb[r.question_id] =
          *r.fe_count <= out.thresholds.nb_fes_threshold ? FactorStatus::hard
                                                         : FactorStatus::easy;
    else
      nb[r.question_id] = FactorStatus::excluded;
    bool frame_known = (r.status == ProxyStatus::ok ||
                        r.status == ProxyStatus::fe_extraction_failed) &&
                       r.selected && lexicon.count(r.selected->frame);
    if (frame_known) {
      double e = lexicon_frame_entropy(lexicon.at(r.selected->frame));
      en[r.question_id] = e > out.thresholds.entropy_threshold
                              ? FactorStatus::hard
                              : FactorStatus::easy;
    } else {
      en[r.question_id] = FactorStatus::excluded;
    }
  }
  return out;
}

void save_proxy_results(const std::vector<ProxyResult>& results,
                        const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write " + path);
  for (const ProxyResult& r : results) {
    nlohmann::ordered_json j;
    j["question_id"] = r.question_id;
    j["status"] = proxy_status_name(r.status);
    if (r.selected) {
      j["selected_frame"] = r.selected->frame;
      j["selected_trigger"] = r.selected->trigger;
    }
    nlohmann::ordered_json fes = nlohmann::ordered_json::array();
    for (const auto& [name, text] : r.fes) {
      nlohmann::ordered_json fe;
      fe["name"] = name;
      fe["text"] = text;
      fes.push_back(std::move(fe));
    }
    j["fes"] = std::move(fes);
    if (r.fe_count) j["fe_count"] = *r.fe_count;
    j["raw_response"] = r.raw_response;
    f << j.dump() << "\n";
  }
  if (!f) throw IoError("cannot write " + path);
}

std::vector<ProxyResult> load_proxy_results(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot read " + path);
  std::vector<ProxyResult> out;
  std::string line;
  std::size_t lineno = 0;
  auto fail = [&](const std::string& msg) -> ValidationError {
    return ValidationError(path + ":" + std::to_string(lineno) + ": " + msg);
  };
  while (std::getline(f, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    nlohmann::ordered_json j =
        nlohmann::ordered_json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw fail("malformed JSON object");
    ProxyResult r;
    if (!j.contains("question_id") || !j["question_id"].is_string())
      throw fail("missing string field 'question_id'");
    r.question_id = j["question_id"].get<std::string>();
    if (!j.contains("status") || !j["status"].is_string())
      throw fail("missing string field 'status'");
    std::string status = j["status"].get<std::string>();
    bool known = false;
    for (ProxyStatus s : {ProxyStatus::ok, ProxyStatus::no_triggers,
                          ProxyStatus::unknown_frame,
                          ProxyStatus::fe_extraction_failed,
                          ProxyStatus::transport_failed}) {
      if (status == proxy_status_name(s)) {
        r.status = s;
        known = true;
      }
    }
    if (!known) throw fail("unknown status '" + status + "'");
    if (j.contains("selected_frame") != j.contains("selected_trigger"))
      throw fail("selected_frame and selected_trigger must come together");
    if (j.contains("selected_frame")) {
      if (!j["selected_frame"].is_string() || !j["selected_trigger"].is_string())
        throw fail("selected pair fields must be strings");
      r.selected = CandidatePair{j["selected_frame"].get<std::string>(),
                                 j["selected_trigger"].get<std::string>()};
    }
    if (j.contains("fes")) {
      if (!j["fes"].is_array()) throw fail("'fes' must be an array");
      for (const auto& fe : j["fes"]) {
        if (!fe.is_object() || !fe.contains("name") || !fe["name"].is_string() ||
            !fe.contains("text") || !fe["text"].is_string())
          throw fail("each FE needs string fields 'name' and 'text'");
        r.fes.emplace_back(fe["name"].get<std::string>(),
                           fe["text"].get<std::string>());
      }
    }
    if (j.contains("fe_count")) {
      if (!j["fe_count"].is_number_integer())
        throw fail("'fe_count' must be an integer");
      r.fe_count = j["fe_count"].get<int>();
    }
    if (j.contains("raw_response")) {
      if (!j["raw_response"].is_string())
        throw fail("'raw_response' must be a string");
      r.raw_response = j["raw_response"].get<std::string>();
    }
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace qaeval
