#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace qaeval {

// Splits text into lowercased word tokens: maximal runs of alphanumeric
// characters (Unicode-aware); everything else is a separator.
std::vector<std::string> tokenize(std::string_view text);

// Edit distance (insert/delete/substitute, unit cost) over Unicode scalar
// values, not bytes.
int levenshtein(std::string_view a, std::string_view b);

// Length of the longest common subsequence of two token sequences.
int lcs_length(const std::vector<std::string>& a, const std::vector<std::string>& b);

// Sentence-level ROUGE-L F-measure (beta = 1) over word tokens.
// Both empty -> 1.0; exactly one empty -> 0.0; LCS = 0 -> 0.0.
double rouge_l(std::string_view reference, std::string_view hypothesis);

// SQuAD-style token F1: multiset overlap of word tokens.
// Both empty -> 1.0; exactly one empty -> 0.0; no overlap -> 0.0.
double token_f1(std::string_view reference, std::string_view hypothesis);

enum class Metric { rouge_l, token_f1, hscore };

// Parses "rouge_l" | "token_f1" | "hscore"; throws ValidationError otherwise.
Metric parse_metric(std::string_view name);
std::string_view metric_name(Metric m);

}  // namespace qaeval
