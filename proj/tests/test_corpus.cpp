#include "qaeval/corpus.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"
#include "qaeval/errors.hpp"

using namespace qaeval;

namespace {

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& name, const std::string& content) {
    path = (std::filesystem::temp_directory_path() / name).string();
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << content;
  }
  ~TempFile() { std::remove(path.c_str()); }
};

const char* kCorpusLine =
    R"({"id":"q1","context":"Les armées attaquent la ville.","question":"Qui attaque ?","reference_answer":"armées","frame":"Attack","lu_text":"attaque","lu_pos":"nominal","fe_count":2,"coref_required":true,"trigger_in_question":true})";

std::string corpus_line(const std::string& id, const std::string& extra = "") {
  std::string base = kCorpusLine;
  std::string out = base;
  out.replace(out.find("q1"), 2, id);
  if (!extra.empty()) out.insert(out.size() - 1, "," + extra);
  return out;
}

}  // namespace

TEST_CASE("load_corpus accepts a valid line, dep_distance absent") {
  TempFile f("c1.jsonl", corpus_line("q1") + "\n");
  Corpus c = load_corpus(f.path);
  REQUIRE(c.examples.size() == 1);
  const Example& e = c.examples[0];
  CHECK(e.id == "q1");
  CHECK(e.question == "Qui attaque ?");
  CHECK(e.frame == "Attack");
  CHECK(e.lu_pos == LuPos::nominal);
  CHECK(e.fe_count == 2);
  CHECK(e.coref_required);
  CHECK(e.trigger_in_question);
  CHECK_FALSE(e.dep_distance.has_value());
  CHECK(&c.at("q1") == &e);
}

TEST_CASE("load_corpus rejects duplicate ids, citing them") {
  TempFile f("c2.jsonl", corpus_line("q1") + "\n" + corpus_line("q1") + "\n");
  CHECK_THROWS_WITH_AS(load_corpus(f.path),
                       doctest::Contains("duplicate example id 'q1'"),
                       ValidationError);
}

TEST_CASE("load_corpus rejects fe_count below 1") {
  std::string bad = corpus_line("q1");
  bad.replace(bad.find("\"fe_count\":2"), 12, "\"fe_count\":0");
  TempFile f("c3.jsonl", bad + "\n");
  CHECK_THROWS_WITH_AS(load_corpus(f.path), doctest::Contains("fe_count"),
                       ValidationError);
}

TEST_CASE("load_corpus reports malformed JSON with its line number") {
  TempFile f("c4.jsonl", corpus_line("q1") + "\nnot json\n");
  CHECK_THROWS_WITH_AS(load_corpus(f.path), doctest::Contains(":2:"),
                       ValidationError);
}

TEST_CASE("load_corpus names missing fields") {
  TempFile f("c5.jsonl", R"({"id":"q1","question":"x"})" "\n");
  CHECK_THROWS_WITH_AS(load_corpus(f.path), doctest::Contains("context"),
                       ValidationError);
}

TEST_CASE("load_corpus validates lu_pos and dep_distance") {
  std::string bad = corpus_line("q1");
  bad.replace(bad.find("nominal"), 7, "adverbial");
  {
    TempFile f("c6.jsonl", bad + "\n");
    CHECK_THROWS_WITH_AS(load_corpus(f.path), doctest::Contains("lu_pos"),
                         ValidationError);
  }
  {
    TempFile f("c7.jsonl", corpus_line("q1", "\"dep_distance\":0") + "\n");
    CHECK_THROWS_WITH_AS(load_corpus(f.path), doctest::Contains("dep_distance"),
                         ValidationError);
  }
  {
    TempFile f("c8.jsonl", corpus_line("q1", "\"dep_distance\":3") + "\n");
    CHECK(load_corpus(f.path).examples[0].dep_distance == 3);
  }
}

TEST_CASE("missing corpus file raises an I/O error") {
  CHECK_THROWS_AS(load_corpus("/nonexistent/corpus.jsonl"), IoError);
}

TEST_CASE("text fields are NFC-normalized on load") {
  std::string decomposed = corpus_line("q1");
  decomposed.replace(decomposed.find("armées"), std::string("armées").size(),
                     "arme\xCC\x81" "es");  // e + combining acute
  TempFile f("c9.jsonl", decomposed + "\n");
  Corpus c = load_corpus(f.path);
  CHECK(c.examples[0].context.find("armées") != std::string::npos);
}

TEST_CASE("load_predictions enforces referential integrity and uniqueness") {
  TempFile corpus_file("c10.jsonl", corpus_line("q1") + "\n" + corpus_line("q2") + "\n");
  Corpus corpus = load_corpus(corpus_file.path);

  SUBCASE("valid predictions group by model in first-appearance order") {
    TempFile f("p1.jsonl",
               R"({"model_id":"t5","example_id":"q1","answer":"les armées"})" "\n"
               R"({"model_id":"bert","example_id":"q1","answer":"armées"})" "\n"
               R"({"model_id":"t5","example_id":"q2","answer":""})" "\n");
    PredictionSet p = load_predictions(f.path, corpus);
    CHECK(p.model_order == std::vector<std::string>{"t5", "bert"});
    CHECK(p.answer("t5", "q1") == "les armées");
    CHECK(p.answer("t5", "q2") == "");
    CHECK_THROWS_AS(p.answer("bert", "q2"), ValidationError);
  }

  SUBCASE("unknown example ids are named") {
    TempFile f("p2.jsonl", R"({"model_id":"t5","example_id":"q999","answer":"x"})" "\n");
    CHECK_THROWS_WITH_AS(load_predictions(f.path, corpus),
                         doctest::Contains("q999"), ValidationError);
  }

  SUBCASE("duplicate (model, example) pairs are rejected") {
    TempFile f("p3.jsonl",
               R"({"model_id":"t5","example_id":"q1","answer":"a"})" "\n"
               R"({"model_id":"t5","example_id":"q1","answer":"b"})" "\n");
    CHECK_THROWS_WITH_AS(load_predictions(f.path, corpus),
                         doctest::Contains("duplicate"), ValidationError);
  }
}

TEST_CASE("load_labels validates enum values and prediction references") {
  TempFile corpus_file("c11.jsonl", corpus_line("q1") + "\n");
  Corpus corpus = load_corpus(corpus_file.path);
  TempFile pred_file("p4.jsonl",
                     R"({"model_id":"t5","example_id":"q1","answer":"a"})" "\n");
  PredictionSet preds = load_predictions(pred_file.path, corpus);

  SUBCASE("valid label") {
    TempFile f("l1.jsonl",
               R"({"model_id":"t5","example_id":"q1","label":"partially_correct"})" "\n");
    LabelSet l = load_labels(f.path, preds);
    CHECK(l.at("t5", "q1") == Label::partially_correct);
  }

  SUBCASE("label outside the enum") {
    TempFile f("l2.jsonl",
               R"({"model_id":"t5","example_id":"q1","label":"maybe"})" "\n");
    CHECK_THROWS_WITH_AS(load_labels(f.path, preds), doctest::Contains("maybe"),
                         ValidationError);
  }

  SUBCASE("label without a matching prediction") {
    TempFile f("l3.jsonl",
               R"({"model_id":"gpt","example_id":"q1","label":"correct"})" "\n");
    CHECK_THROWS_WITH_AS(load_labels(f.path, preds),
                         doctest::Contains("no matching prediction"),
                         ValidationError);
  }
}

TEST_CASE("frame_freq and lexicon TSV loaders") {
  SUBCASE("valid tables") {
    TempFile f("ff1.tsv", "Attack\t120\nGiving\t3\n");
    auto freq = load_frame_freq(f.path);
    CHECK(freq.at("Attack") == 120);
    CHECK(freq.at("Giving") == 3);

    TempFile g("lx1.tsv", "Attack\tattack\nAttack\tassault\nGiving\tgive\n");
    auto lex = load_lexicon(g.path);
    CHECK(lex.at("Attack") == std::set<std::string>{"assault", "attack"});
    CHECK(lex.at("Giving") == std::set<std::string>{"give"});
  }

  SUBCASE("bad counts and duplicates are rejected with line numbers") {
    TempFile f("ff2.tsv", "Attack\t12\nAttack\t7\n");
    CHECK_THROWS_WITH_AS(load_frame_freq(f.path), doctest::Contains(":2:"),
                         ValidationError);
    TempFile g("ff3.tsv", "Attack\tmany\n");
    CHECK_THROWS_AS(load_frame_freq(g.path), ValidationError);
    TempFile h("ff4.tsv", "Attack\t-1\n");
    CHECK_THROWS_AS(load_frame_freq(h.path), ValidationError);
    TempFile i("ff5.tsv", "Attack 12\n");
    CHECK_THROWS_AS(load_frame_freq(i.path), ValidationError);
  }
}

TEST_CASE("questions loader handles optional fields and duplicate ids") {
  TempFile f("q1.jsonl",
             R"({"id":"n1","question":"How long?"})" "\n"
             R"({"id":"n2","question":"Who?","reference_answer":"them","context":"c"})" "\n");
  auto qs = load_questions(f.path);
  REQUIRE(qs.size() == 2);
  CHECK_FALSE(qs[0].reference_answer.has_value());
  CHECK(qs[1].reference_answer == "them");
  CHECK(qs[1].context == "c");

  TempFile g("q2.jsonl",
             R"({"id":"n1","question":"a"})" "\n" R"({"id":"n1","question":"b"})" "\n");
  CHECK_THROWS_WITH_AS(load_questions(g.path), doctest::Contains("duplicate"),
                       ValidationError);
}

TEST_CASE("corpus round-trips through save and load") {
  TempFile f("c12.jsonl",
             corpus_line("q1") + "\n" + corpus_line("q2", "\"dep_distance\":2") + "\n");
  Corpus c = load_corpus(f.path);
  std::string out = f.path + ".rt";
  save_corpus(c, out);
  Corpus c2 = load_corpus(out);
  REQUIRE(c2.examples.size() == c.examples.size());
  for (std::size_t i = 0; i < c.examples.size(); ++i) {
    const Example &a = c.examples[i], &b = c2.examples[i];
    CHECK(a.id == b.id);
    CHECK(a.context == b.context);
    CHECK(a.question == b.question);
    CHECK(a.reference_answer == b.reference_answer);
    CHECK(a.frame == b.frame);
    CHECK(a.lu_text == b.lu_text);
    CHECK(a.lu_pos == b.lu_pos);
    CHECK(a.fe_count == b.fe_count);
    CHECK(a.coref_required == b.coref_required);
    CHECK(a.trigger_in_question == b.trigger_in_question);
    CHECK(a.dep_distance == b.dep_distance);
  }
  std::remove(out.c_str());
}
