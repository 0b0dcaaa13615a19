#include "qaeval/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "qaeval/errors.hpp"

namespace qaeval {

namespace {

void require_samples(const std::vector<double>& s1, const std::vector<double>& s2) {
  if (s1.empty() || s2.empty())
    throw ValidationError("Mann-Whitney U requires two non-empty samples");
}

// Midranks of the combined sample, doubled so ties (x.5 ranks) stay integer.
std::vector<long long> doubled_midranks(const std::vector<double>& all) {
  const std::size_t n = all.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return all[a] < all[b]; });
  std::vector<long long> r2(n, 0);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j < n && all[order[j]] == all[order[i]]) ++j;
    // ranks i+1 .. j share the midrank (i+1 + j) / 2; doubled: i+1 + j
    long long doubled = static_cast<long long>(i + 1) + static_cast<long long>(j);
    for (std::size_t k = i; k < j; ++k) r2[order[k]] = doubled;
    i = j;
  }
  return r2;
}

double u_from_rank_sum(double r1, std::size_t n1) {
  return r1 - static_cast<double>(n1) * (static_cast<double>(n1) + 1.0) / 2.0;
}

}  // namespace

UTestResult mann_whitney_exact(const std::vector<double>& sample1,
                               const std::vector<double>& sample2) {
  require_samples(sample1, sample2);
  const std::size_t n1 = sample1.size(), n2 = sample2.size(), N = n1 + n2;

  std::vector<double> all(sample1.begin(), sample1.end());
  all.insert(all.end(), sample2.begin(), sample2.end());
  std::vector<long long> r2 = doubled_midranks(all);

  long long s_obs = 0;
  for (std::size_t i = 0; i < n1; ++i) s_obs += r2[i];
  const long long center = static_cast<long long>(n1) * static_cast<long long>(N + 1);
  const long long dev_obs = std::llabs(s_obs - center);

  // dp[k][s] = number of ways to pick k of the doubled midranks summing to s
  const long long max_sum = static_cast<long long>(N) * static_cast<long long>(N + 1);
  std::vector<std::vector<unsigned long long>> dp(
      n1 + 1, std::vector<unsigned long long>(max_sum + 1, 0));
  dp[0][0] = 1;
  for (std::size_t item = 0; item < N; ++item) {
    const long long v = r2[item];
    for (std::size_t k = std::min(item + 1, n1); k >= 1; --k)
      for (long long s = max_sum; s >= v; --s)
        if (dp[k - 1][s - v]) dp[k][s] += dp[k - 1][s - v];
  }
  unsigned long long total = 0, extreme = 0;
  for (long long s = 0; s <= max_sum; ++s) {
    unsigned long long ways = dp[n1][s];
    if (!ways) continue;
    total += ways;
    if (std::llabs(s - center) >= dev_obs) extreme += ways;
  }

  UTestResult res;
  res.method = UMethod::exact;
  res.n1 = n1;
  res.n2 = n2;
  res.u_statistic = u_from_rank_sum(static_cast<double>(s_obs) / 2.0, n1);
  res.z = 0.0;
  res.p_two_sided = static_cast<double>(extreme) / static_cast<double>(total);
  return res;
}

UTestResult mann_whitney_normal(const std::vector<double>& sample1,
                                const std::vector<double>& sample2) {
  require_samples(sample1, sample2);
  const std::size_t n1 = sample1.size(), n2 = sample2.size(), N = n1 + n2;

  std::vector<double> all(sample1.begin(), sample1.end());
  all.insert(all.end(), sample2.begin(), sample2.end());
  std::vector<long long> r2 = doubled_midranks(all);

  long long s1 = 0;
  for (std::size_t i = 0; i < n1; ++i) s1 += r2[i];
  const double r1 = static_cast<double>(s1) / 2.0;
  const double u = u_from_rank_sum(r1, n1);

  // tie correction over the sorted combined sample
  std::vector<double> sorted(all);
  std::sort(sorted.begin(), sorted.end());
  double tie_term = 0.0;
  std::size_t i = 0;
  while (i < N) {
    std::size_t j = i;
    while (j < N && sorted[j] == sorted[i]) ++j;
    const double t = static_cast<double>(j - i);
    tie_term += t * t * t - t;
    i = j;
  }

  const double dn1 = static_cast<double>(n1), dn2 = static_cast<double>(n2);
  const double dN = static_cast<double>(N);
  const double mu = dn1 * dn2 / 2.0;
  const double variance =
      dn1 * dn2 / 12.0 * ((dN + 1.0) - tie_term / (dN * (dN - 1.0)));

  UTestResult res;
  res.method = UMethod::normal_tie_corrected;
  res.n1 = n1;
  res.n2 = n2;
  res.u_statistic = u;
  if (variance <= 0.0) {
    res.z = 0.0;
    res.p_two_sided = 1.0;
    return res;
  }
  const double z = std::max(std::abs(u - mu) - 0.5, 0.0) / std::sqrt(variance);
  res.z = z;
  res.p_two_sided = std::min(1.0, std::max(0.0, std::erfc(z / std::sqrt(2.0))));
  return res;
}

UTestResult mann_whitney_u(const std::vector<double>& sample1,
                           const std::vector<double>& sample2) {
  require_samples(sample1, sample2);
  if (sample1.size() + sample2.size() <= 20)
    return mann_whitney_exact(sample1, sample2);
  return mann_whitney_normal(sample1, sample2);
}

int delta_score(double score_hard, double score_easy) {
  double d = (score_hard - score_easy) * 100.0;
  const double nearest = std::round(d);
  if (std::abs(d - nearest) < 1e-9) d = nearest;
  return static_cast<int>(std::floor(d));
}

}  // namespace qaeval
