#include "streampred/oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <unordered_map>

namespace streampred {

namespace {

constexpr double kPlateauEps = 1e-12;

int symbol_slot(char c) { return c == 'A' ? 0 : 1; }

}  // namespace

OracleMethod parse_oracle_method(std::string_view s) {
  if (s == "exact") return OracleMethod::exact;
  if (s == "empirical") return OracleMethod::empirical;
  throw Error("unknown oracle method " + std::string(s) + " (valid: exact, empirical)");
}

double exact_best_accuracy(const PatternSpec& spec, std::size_t window,
                           std::size_t max_enumeration) {
  validate_pattern(spec);
  const std::size_t words = spec.dictionary.size();
  const std::size_t block = spec.block_length();

  // Size check before enumerating anything.
  double tuples = 0;
  for (std::size_t p = 0; p < block; ++p) {
    const std::size_t need = window > p ? window - p : 0;
    const std::size_t prior = (need + block - 1) / block;
    tuples += static_cast<double>(words) * std::pow(static_cast<double>(words),
                                                    static_cast<double>(prior));
  }
  if (tuples > static_cast<double>(max_enumeration)) {
    throw Error("exact oracle infeasible for window " + std::to_string(window) +
                "; use the empirical method");
  }

  std::map<std::string, std::array<double, 2>> joint;
  const double base = 1.0 / static_cast<double>(words * block);
  for (const auto& word : spec.dictionary) {
    for (std::size_t p = 0; p < block; ++p) {
      const std::size_t need = window > p ? window - p : 0;
      const std::size_t prior = (need + block - 1) / block;
      const double weight = base / std::pow(static_cast<double>(words), static_cast<double>(prior));
      std::vector<std::size_t> picks(prior, 0);
      while (true) {
        std::string text;
        for (std::size_t pick : picks) text += spec.dictionary[pick];
        text.append(word, 0, p);
        const std::string context = text.substr(text.size() - window);
        joint[context][symbol_slot(word[p])] += weight;

        // odometer over prior words
        std::size_t d = 0;
        while (d < prior && ++picks[d] == words) picks[d++] = 0;
        if (d == prior) break;
      }
    }
  }
  double best = 0;
  for (const auto& [ctx, mass] : joint) best += std::max(mass[0], mass[1]);
  return best;
}

AccuracyEstimate empirical_best_accuracy(const PatternSpec& spec, std::size_t window,
                                         std::size_t sample_budget, std::uint64_t seed) {
  if (sample_budget < 4 * (window + 1)) throw Error("sample budget too small for window");
  PatternRng rng(seed);
  const std::string s = generate_symbols(spec, sample_budget, rng);
  const std::size_t half = s.size() / 2;

  std::unordered_map<std::string, std::array<std::size_t, 2>> fit;
  std::array<std::size_t, 2> marginal{0, 0};
  for (std::size_t i = window; i < half; ++i) {
    fit[s.substr(i - window, window)][symbol_slot(s[i])]++;
    marginal[symbol_slot(s[i])]++;
  }
  auto choose = [](const std::array<std::size_t, 2>& c) { return c[1] > c[0] ? 1 : 0; };

  std::size_t hits = 0, scored = 0;
  for (std::size_t i = std::max(half, window); i < s.size(); ++i) {
    auto it = fit.find(s.substr(i - window, window));
    const int guess = choose(it != fit.end() ? it->second : marginal);
    if (guess == symbol_slot(s[i])) ++hits;
    ++scored;
  }
  AccuracyEstimate est;
  est.samples = scored;
  est.value = static_cast<double>(hits) / static_cast<double>(scored);
  const double half_width =
      1.96 * std::sqrt(est.value * (1.0 - est.value) / static_cast<double>(scored));
  est.ci_low = std::max(0.0, est.value - half_width);
  est.ci_high = std::min(1.0, est.value + half_width);
  return est;
}

AccuracyEstimate best_accuracy(const PatternSpec& spec, std::size_t window,
                               const OracleOptions& opts) {
  if (opts.method == OracleMethod::empirical) {
    return empirical_best_accuracy(spec, window, opts.sample_budget, opts.seed);
  }
  const double v = exact_best_accuracy(spec, window, opts.max_enumeration);
  return {v, v, v, 0};
}

double pattern_ceiling(const PatternSpec& spec) {
  validate_pattern(spec);
  const std::size_t block = spec.block_length();
  double total = 0;
  for (const auto& word : spec.dictionary) {
    for (std::size_t p = 0; p < block; ++p) {
      std::array<double, 2> next{0, 0};
      for (const auto& other : spec.dictionary) {
        if (other.compare(0, p, word, 0, p) == 0) next[symbol_slot(other[p])] += 1;
      }
      total += std::max(next[0], next[1]) / (next[0] + next[1]);
    }
  }
  return total / static_cast<double>(spec.dictionary.size() * block);
}

AccuracyCurve plateau_fix(const AccuracyCurve& curve, double ceiling) {
  if (curve.empty()) throw Error("empty accuracy curve");
  std::size_t expected = 0;
  for (const auto& [w, v] : curve) {
    if (w != expected++) throw Error("accuracy curve windows must be contiguous from 0");
  }
  AccuracyCurve out = curve;
  bool reached = false;
  for (auto& [w, v] : out) {
    if (!reached && v >= ceiling - kPlateauEps) reached = true;
    if (reached) v = ceiling;
  }
  return out;
}

AccuracyCurve plateau_fix(const AccuracyCurve& curve) {
  if (curve.empty()) throw Error("empty accuracy curve");
  double ceiling = 0;
  for (const auto& [w, v] : curve) ceiling = std::max(ceiling, v);
  return plateau_fix(curve, ceiling);
}

AccuracyCurve oracle_curve(const PatternSpec& spec, std::size_t hi, const OracleOptions& opts) {
  const double ceiling = pattern_ceiling(spec);
  AccuracyCurve curve;
  bool reached = false;
  for (std::size_t w = 0; w <= hi; ++w) {
    if (reached) {
      curve[w] = ceiling;
      continue;
    }
    curve[w] = best_accuracy(spec, w, opts).value;
    // Only the exact method may declare the plateau; empirical noise can
    // cross the ceiling from either side.
    if (opts.method == OracleMethod::exact && curve[w] >= ceiling - kPlateauEps) reached = true;
  }
  return opts.method == OracleMethod::exact ? plateau_fix(curve, ceiling) : curve;
}

}  // namespace streampred
