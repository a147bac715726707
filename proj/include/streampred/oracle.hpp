#pragma once

#include <cstdint>
#include <map>

#include "streampred/generators.hpp"

namespace streampred {

enum class OracleMethod { exact, empirical };

OracleMethod parse_oracle_method(std::string_view s);

struct OracleOptions {
  OracleMethod method = OracleMethod::exact;
  std::size_t sample_budget = 400'000;  // empirical: symbols generated
  std::uint64_t seed = 7;
  std::size_t max_enumeration = 1u << 22;  // exact: (word, offset, prior blocks) tuples
};

/// Best achievable top-1 accuracy with `window` symbols of context. The
/// exact method has a zero-width interval; empirical reports a 95% binomial
/// interval around the held-out estimate.
struct AccuracyEstimate {
  double value = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::size_t samples = 0;  // scored positions (empirical only)
};

/// Enumerates every (word, offset) target together with every choice of
/// preceding words that the window can reach, each weighted by its
/// stationary probability, and sums the per-context maximum. Stops are
/// excluded (infinitely long cases). Throws when the enumeration exceeds
/// `max_enumeration`; use the empirical method then.
double exact_best_accuracy(const PatternSpec& spec, std::size_t window,
                           std::size_t max_enumeration = 1u << 22);

/// Fits the per-context majority predictor on the first half of one long
/// generated sequence and scores it on the second half.
AccuracyEstimate empirical_best_accuracy(const PatternSpec& spec, std::size_t window,
                                         std::size_t sample_budget, std::uint64_t seed);

AccuracyEstimate best_accuracy(const PatternSpec& spec, std::size_t window,
                               const OracleOptions& opts = {});

/// Accuracy with unbounded context: the phase is known, so only the choice
/// of word at positions not yet disambiguated by the block prefix is random.
double pattern_ceiling(const PatternSpec& spec);

using AccuracyCurve = std::map<std::size_t, double>;

/// From the first window whose value reaches `ceiling`, every larger window
/// carries the ceiling. The curve must be nonempty with windows 0..k.
AccuracyCurve plateau_fix(const AccuracyCurve& curve, double ceiling);

/// Same, using the curve's maximum as the ceiling.
AccuracyCurve plateau_fix(const AccuracyCurve& curve);

/// Reference curve over windows 0..hi. Windows past the plateau are filled
/// without further enumeration.
AccuracyCurve oracle_curve(const PatternSpec& spec, std::size_t hi, const OracleOptions& opts = {});

}  // namespace streampred
