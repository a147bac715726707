#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "streampred/core.hpp"

namespace streampred {

/// A periodic pattern: cases are prefixes of concatenations of dictionary
/// words, each word picked uniformly at random.
struct PatternSpec {
  std::string name;
  std::vector<std::string> dictionary;  // equal-length words over {A,B}

  [[nodiscard]] bool deterministic() const { return dictionary.size() == 1; }
  [[nodiscard]] std::size_t block_length() const {
    return dictionary.empty() ? 0 : dictionary.front().size();
  }
};

struct GenConfig {
  std::size_t n_cases = 100;
  std::size_t case_length = 2000;  // non-stop events per case
  std::uint64_t seed = 42;
};

/// Throws unless the dictionary is nonempty with equal, nonzero word lengths.
void validate_pattern(const PatternSpec& spec);

/// Names accepted by builtin_pattern, in canonical order.
std::span<const std::string_view> builtin_pattern_names();

/// One of aaabbb, aaabb, xxbarx, xaxb, xabxba.
PatternSpec builtin_pattern(std::string_view name);

/// Builds a custom pattern from a comma separated dictionary ("AAB,BBA").
PatternSpec custom_pattern(std::string_view dictionary);

/// Pattern stream engine: std::mt19937_64 with an explicit unbiased bounded
/// draw, so outputs do not depend on the standard library's distributions.
using PatternRng = std::mt19937_64;

/// Uniform integer in [0, bound) by rejection sampling.
std::uint64_t uniform_below(PatternRng& rng, std::uint64_t bound);

/// Per-case seed derived from the log seed and case index (SplitMix64 finalizer).
std::uint64_t case_seed(std::uint64_t seed, std::uint64_t case_index);

/// Concatenates the picked dictionary words and truncates to `length` symbols.
/// Picks index into spec.dictionary; there must be enough of them.
std::string assemble_symbols(const PatternSpec& spec, std::span<const std::size_t> picks,
                             std::size_t length);

/// Raw symbol string of `length` activities, words drawn from `rng`.
std::string generate_symbols(const PatternSpec& spec, std::size_t length, PatternRng& rng);

/// A single case: `length` activities followed by stop. New symbols are
/// interned into `alphabet` in first-seen order.
CaseTrace generate_case(const PatternSpec& spec, std::size_t length, PatternRng& rng,
                        Alphabet& alphabet, std::string case_id = "case_0");

/// A full log. Case i uses its own generator seeded with case_seed(seed, i),
/// so the first k cases of a larger log equal a k-case log.
EventLog generate_log(const PatternSpec& spec, const GenConfig& cfg);

/// True if `symbols` is a prefix of some word in dictionary*.
bool is_pattern_prefix(const PatternSpec& spec, std::string_view symbols);

}  // namespace streampred
