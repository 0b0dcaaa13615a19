#include "qaeval/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>

#include "qaeval/errors.hpp"

namespace qaeval {
namespace {

// Hand-rolled draws on top of mt19937_64 keep generated bytes identical
// across standard libraries (std distributions and std::shuffle are
// implementation-defined).
std::uint64_t draw(std::mt19937_64& rng, std::uint64_t n) { return rng() % n; }

double draw_unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

template <typename T>
void shuffle_vec(std::vector<T>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i)
    std::swap(v[i - 1], v[draw(rng, i)]);
}

// Exactly `ones` true values over n slots, randomly placed.
std::vector<bool> half_split(std::size_t n, std::size_t ones,
                             std::mt19937_64& rng) {
  std::vector<bool> v(n, false);
  std::fill(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(ones), true);
  for (std::size_t i = n; i > 1; --i) {
    std::size_t j = draw(rng, i);
    bool tmp = v[i - 1];
    v[i - 1] = v[j];
    v[j] = tmp;
  }
  return v;
}

// Largest-remainder apportionment of n into weights, deterministic ties.
std::vector<std::size_t> apportion(const std::vector<double>& weights,
                                   std::size_t n) {
  std::vector<std::size_t> counts(weights.size(), 0);
  std::vector<std::pair<double, std::size_t>> remainders;
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    double quota = weights[i] * static_cast<double>(n);
    counts[i] = static_cast<std::size_t>(std::floor(quota));
    assigned += counts[i];
    remainders.emplace_back(quota - std::floor(quota), i);
  }
  std::sort(remainders.begin(), remainders.end(),
            [](const auto& a, const auto& b) {
              if (a.first != b.first) return a.first > b.first;
              return a.second < b.second;
            });
  for (std::size_t i = 0; assigned < n; ++i, ++assigned)
    ++counts[remainders[i % remainders.size()].second];
  return counts;
}

std::string digits(std::mt19937_64& rng, int len) {
  std::string s;
  for (int i = 0; i < len; ++i)
    s += static_cast<char>('0' + draw(rng, 10));
  return s;
}

}  // namespace

SynthData generate(const SynthSpec& spec) {
  if (spec.n_examples < 8 || spec.n_examples % 2 != 0)
    throw ValidationError("synth: n_examples must be even and >= 8");
  if (spec.n_models < 1 || spec.n_models > 25)
    throw ValidationError("synth: n_models must be in [1, 25]");
  std::vector<double> profile = spec.agreement_profile;
  if (profile.empty()) {
    profile.assign(spec.n_models, 1.0 / static_cast<double>(spec.n_models));
  } else {
    if (profile.size() != spec.n_models)
      throw ValidationError("synth: agreement profile needs one entry per model");
    double sum = 0.0;
    for (double p : profile) {
      if (p < 0.0) throw ValidationError("synth: negative profile entry");
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9)
      throw ValidationError("synth: agreement profile must sum to 1");
  }
  if (spec.label_noise < 0.0 || spec.label_noise > 1.0)
    throw ValidationError("synth: label_noise must be in [0, 1]");

  std::mt19937_64 rng(spec.seed);
  const std::size_t n = spec.n_examples;
  SynthData out;

  // Quadrants over (bias, entropy): sizes as equal as possible with both
  // factor halves exact. n % 4 == 2 puts the two extras on the diagonal.
  std::size_t q = n / 4;
  std::size_t sizes[4] = {q, q, q, q};  // (hard,hard) (hard,easy) (easy,hard) (easy,easy)
  if (n % 4 == 2) {
    ++sizes[0];
    ++sizes[3];
  }
  std::vector<int> quadrant;
  for (int k = 0; k < 4; ++k)
    quadrant.insert(quadrant.end(), sizes[k], k);
  shuffle_vec(quadrant, rng);

  // Frame pools. High-entropy pools may only use two frames when each frame
  // still gets >= 2 examples (>= 2 distinct LUs keeps its entropy positive).
  std::size_t high_frames =
      (std::min(sizes[0], sizes[2]) >= 4) ? 2 : 1;
  std::size_t low_frames = (std::min(sizes[1], sizes[3]) >= 2) ? 2 : 1;
  auto pool_frames = [&](const char* prefix, std::size_t count) {
    std::vector<std::string> v;
    for (std::size_t i = 1; i <= count; ++i)
      v.push_back(std::string(prefix) + std::to_string(i));
    return v;
  };
  std::vector<std::string> pools[4] = {
      pool_frames("frame_rare_high", high_frames),
      pool_frames("frame_rare_low", low_frames),
      pool_frames("frame_common_high", high_frames),
      pool_frames("frame_common_low", low_frames),
  };
  for (int k = 0; k < 4; ++k) {
    bool rare = k < 2;
    for (const std::string& f : pools[k]) out.frame_freq[f] = rare ? 1 : 100;
  }

  std::vector<bool> coref = half_split(n, n / 2, rng);
  std::vector<bool> trigger = half_split(n, n / 2, rng);
  std::vector<bool> lu_in_q = half_split(n, n / 2, rng);
  std::vector<bool> dist = half_split(n, n / 2, rng);
  std::vector<bool> nb_fes = half_split(n, n / 2, rng);

  int digits_width = 1;
  for (std::size_t v = n; v >= 10; v /= 10) ++digits_width;
  std::map<std::string, std::size_t> frame_round_robin;
  std::map<int, std::size_t> pool_round_robin;
  for (std::size_t i = 0; i < n; ++i) {
    Example e;
    char idbuf[32];
    std::snprintf(idbuf, sizeof idbuf, "ex%0*zu", digits_width, i + 1);
    e.id = idbuf;
    int k = quadrant[i];
    const auto& pool = pools[k];
    e.frame = pool[pool_round_robin[k]++ % pool.size()];
    bool high_entropy = (k == 0 || k == 2);
    std::size_t lu_count = high_entropy ? 4 : 1;
    std::size_t lu_index = frame_round_robin[e.frame]++ % lu_count;
    e.lu_text = "lu_" + e.frame + "_" + std::to_string(lu_index + 1);
    e.lu_pos = trigger[i] ? LuPos::nominal : LuPos::verbal;
    e.fe_count = nb_fes[i] ? 2 : 3;
    e.coref_required = coref[i];
    e.trigger_in_question = !lu_in_q[i];
    e.dep_distance = dist[i] ? 2 : 1;
    e.question = "question " + e.id + " about " + e.lu_text;
    e.context = "context for " + e.id;
    e.reference_answer = digits(rng, 7);
    out.corpus.by_id[e.id] = out.corpus.examples.size();
    out.corpus.examples.push_back(std::move(e));
  }

  for (std::size_t m = 0; m < spec.n_models; ++m)
    out.predictions.model_order.push_back(
        std::string("model_") + static_cast<char>('a' + m));

  // Answers: per example, `target` models share a cluster around the
  // reference stem (pairwise distance <= 2), the rest get outsider suffixes
  // pairwise >= 5 apart and >= 5 from the cluster, so alpha = 5 voting lands
  // on partition P_target exactly.
  std::vector<std::size_t> partition_counts = apportion(profile, n);
  std::vector<std::size_t> targets;
  for (std::size_t k = 0; k < partition_counts.size(); ++k)
    targets.insert(targets.end(), partition_counts[k], k + 1);
  shuffle_vec(targets, rng);
  std::vector<std::size_t> model_index(spec.n_models);
  for (std::size_t i = 0; i < n; ++i) {
    const Example& e = out.corpus.examples[i];
    std::size_t target = targets[i];
    for (std::size_t m = 0; m < spec.n_models; ++m) model_index[m] = m;
    shuffle_vec(model_index, rng);
    for (std::size_t pos = 0; pos < spec.n_models; ++pos) {
      std::size_t m = model_index[pos];
      std::string answer = e.reference_answer;
      bool in_cluster = target >= 2 && pos < target;
      if (in_cluster)
        answer += std::string(pos % 3, 'z');
      else
        answer += std::string(5, static_cast<char>('a' + m));
      out.predictions.answers[out.predictions.model_order[m]][e.id] = answer;
    }
  }

  // Labels: per (model, effect-combination stratum), exactly
  // round(p_correct * |stratum|) correct labels, placement randomized.
  std::vector<Factor> effect_factors;
  for (const auto& [f, _] : spec.effects) effect_factors.push_back(f);
  auto hard_under = [&](std::size_t i, Factor f) -> bool {
    switch (f) {
      case Factor::bias: return quadrant[i] < 2;
      case Factor::coref: return coref[i];
      case Factor::trigger: return trigger[i];
      case Factor::lu_in_q: return lu_in_q[i];
      case Factor::dist: return dist[i];
      case Factor::nb_fes: return nb_fes[i];
      case Factor::entropy: return quadrant[i] == 0 || quadrant[i] == 2;
    }
    return false;
  };
  std::map<std::size_t, std::vector<std::size_t>> strata;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t key = 0;
    for (std::size_t b = 0; b < effect_factors.size(); ++b)
      if (hard_under(i, effect_factors[b])) key |= std::size_t{1} << b;
    strata[key].push_back(i);
  }
  for (const std::string& model : out.predictions.model_order) {
    auto& labels = out.labels.labels[model];
    for (auto& [key, members] : strata) {
      double p = spec.base_correct;
      for (std::size_t b = 0; b < effect_factors.size(); ++b)
        if (key & (std::size_t{1} << b)) p += spec.effects.at(effect_factors[b]);
      p = std::clamp(p, 0.0, 1.0);
      std::size_t n_correct = static_cast<std::size_t>(
          std::floor(p * static_cast<double>(members.size()) + 0.5));
      std::vector<std::size_t> order = members;
      shuffle_vec(order, rng);
      for (std::size_t j = 0; j < order.size(); ++j) {
        Label label = j < n_correct ? Label::correct : Label::incorrect;
        if (spec.label_noise > 0.0 && draw_unit(rng) < spec.label_noise)
          label = static_cast<Label>(draw(rng, 3));
        labels[out.corpus.examples[order[j]].id] = label;
      }
    }
  }
  return out;
}

ProxyFixture generate_proxy_fixture(std::uint64_t seed,
                                    std::size_t n_questions) {
  std::mt19937_64 rng(seed);
  ProxyFixture out;
  out.lexicon = {
      {"Duration_description", {"long", "how long"}},
      {"Buildings", {"house", "tower"}},
      {"Being_in_control", {"control"}},
      {"Commerce_buy", {"buy", "purchase", "acquire", "shop"}},
      {"Motion", {"move"}},
      {"Weather", {"rain", "snow"}},
  };
  for (std::size_t i = 0; i < n_questions; ++i) {
    Question q;
    char idbuf[32];
    std::snprintf(idbuf, sizeof idbuf, "nq%04zu", i + 1);
    q.id = idbuf;
    std::string tag = digits(rng, 4);
    switch (i % 5) {
      case 0: q.question = "rien de special ici " + tag; break;
      case 1: q.question = "did they buy the house " + tag; break;
      case 2: q.question = "how long did they control the tower " + tag; break;
      case 3: q.question = "where did the rain move to " + tag; break;
      case 4: q.question = "who could purchase snow there " + tag; break;
    }
    q.reference_answer = tag;
    out.questions.push_back(std::move(q));
  }
  return out;
}

}  // namespace qaeval
