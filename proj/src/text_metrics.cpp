#include "qaeval/text_metrics.hpp"

#include <algorithm>

#include "qaeval/errors.hpp"
#include "qaeval/unicode.hpp"

namespace qaeval {

std::vector<std::string> tokenize(std::string_view text) {
  std::u32string cps = uni::decode_utf8(text);
  std::vector<std::string> tokens;
  std::u32string current;
  for (char32_t c : cps) {
    if (uni::is_word_char(c)) {
      current.push_back(uni::to_lower(c));
    } else if (!current.empty()) {
      tokens.push_back(uni::encode_utf8(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(uni::encode_utf8(current));
  return tokens;
}

int levenshtein(std::string_view a, std::string_view b) {
  std::u32string ua = uni::decode_utf8(a);
  std::u32string ub = uni::decode_utf8(b);
  if (ua.size() < ub.size()) std::swap(ua, ub);
  const std::size_t n = ua.size(), m = ub.size();
  std::vector<int> prev(m + 1), cur(m + 1);
  for (std::size_t j = 0; j <= m; ++j) prev[j] = static_cast<int>(j);
  for (std::size_t i = 1; i <= n; ++i) {
    cur[0] = static_cast<int>(i);
    for (std::size_t j = 1; j <= m; ++j) {
      int sub = prev[j - 1] + (ua[i - 1] == ub[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[m];
}

int lcs_length(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  const std::size_t n = a.size(), m = b.size();
  std::vector<int> prev(m + 1, 0), cur(m + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j)
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    std::swap(prev, cur);
  }
  return prev[m];
}

namespace {

double f1_from_overlap(int overlap, std::size_t ref_len, std::size_t hyp_len) {
  if (ref_len == 0 && hyp_len == 0) return 1.0;
  if (ref_len == 0 || hyp_len == 0 || overlap == 0) return 0.0;
  double p = static_cast<double>(overlap) / static_cast<double>(hyp_len);
  double r = static_cast<double>(overlap) / static_cast<double>(ref_len);
  return 2.0 * p * r / (p + r);
}

}  // namespace

double rouge_l(std::string_view reference, std::string_view hypothesis) {
  std::vector<std::string> ref = tokenize(reference);
  std::vector<std::string> hyp = tokenize(hypothesis);
  return f1_from_overlap(lcs_length(ref, hyp), ref.size(), hyp.size());
}

double token_f1(std::string_view reference, std::string_view hypothesis) {
  std::vector<std::string> ref = tokenize(reference);
  std::vector<std::string> hyp = tokenize(hypothesis);
  std::vector<std::string> sorted_ref = ref, sorted_hyp = hyp;
  std::sort(sorted_ref.begin(), sorted_ref.end());
  std::sort(sorted_hyp.begin(), sorted_hyp.end());
  std::vector<std::string> common;
  std::set_intersection(sorted_ref.begin(), sorted_ref.end(), sorted_hyp.begin(),
                        sorted_hyp.end(), std::back_inserter(common));
  return f1_from_overlap(static_cast<int>(common.size()), ref.size(), hyp.size());
}

Metric parse_metric(std::string_view name) {
  if (name == "rouge_l") return Metric::rouge_l;
  if (name == "token_f1") return Metric::token_f1;
  if (name == "hscore") return Metric::hscore;
  throw ValidationError("unknown metric '" + std::string(name) +
                        "' (expected rouge_l, token_f1, or hscore)");
}

std::string_view metric_name(Metric m) {
  switch (m) {
    case Metric::rouge_l: return "rouge_l";
    case Metric::token_f1: return "token_f1";
    case Metric::hscore: return "hscore";
  }
  return "";
}

}  // namespace qaeval
