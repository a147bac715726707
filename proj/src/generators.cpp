#include "streampred/generators.hpp"

#include <array>
#include <limits>

namespace streampred {

namespace {

constexpr std::array<std::string_view, 5> kBuiltinNames = {"aaabbb", "aaabb", "xxbarx", "xaxb",
                                                           "xabxba"};

std::string valid_names() {
  std::string out;
  for (auto n : kBuiltinNames) {
    if (!out.empty()) out += ", ";
    out += n;
  }
  return out;
}

}  // namespace

void validate_pattern(const PatternSpec& spec) {
  if (spec.dictionary.empty()) throw Error("pattern " + spec.name + ": empty dictionary");
  const auto len = spec.dictionary.front().size();
  if (len == 0) throw Error("pattern " + spec.name + ": empty word");
  for (const auto& w : spec.dictionary) {
    if (w.size() != len) throw Error("pattern " + spec.name + ": words differ in length");
    for (char c : w) {
      if (c != 'A' && c != 'B') throw Error("pattern " + spec.name + ": symbols must be A or B");
    }
  }
}

std::span<const std::string_view> builtin_pattern_names() { return kBuiltinNames; }

PatternSpec builtin_pattern(std::string_view name) {
  if (name == "aaabbb") return {"aaabbb", {"AAABBB"}};
  if (name == "aaabb") return {"aaabb", {"AAABB"}};
  if (name == "xxbarx") return {"xxbarx", {"AAB", "BBA"}};
  if (name == "xaxb") return {"xaxb", {"AAAB", "BABB"}};
  if (name == "xabxba") return {"xabxba", {"AABABA", "BABBBA"}};
  throw Error("unknown pattern " + std::string(name) + " (valid: " + valid_names() + ")");
}

PatternSpec custom_pattern(std::string_view dictionary) {
  PatternSpec spec{"custom", {}};
  std::size_t start = 0;
  while (start <= dictionary.size()) {
    auto comma = dictionary.find(',', start);
    if (comma == std::string_view::npos) comma = dictionary.size();
    spec.dictionary.emplace_back(dictionary.substr(start, comma - start));
    start = comma + 1;
  }
  validate_pattern(spec);
  return spec;
}

std::uint64_t uniform_below(PatternRng& rng, std::uint64_t bound) {
  if (bound <= 1) return 0;
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % bound;
}

std::uint64_t case_seed(std::uint64_t seed, std::uint64_t case_index) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (case_index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::string assemble_symbols(const PatternSpec& spec, std::span<const std::size_t> picks,
                             std::size_t length) {
  std::string out;
  out.reserve(length + spec.block_length());
  for (std::size_t pick : picks) {
    if (out.size() >= length) break;
    out += spec.dictionary.at(pick);
  }
  if (out.size() < length) throw Error("not enough dictionary picks");
  out.resize(length);
  return out;
}

std::string generate_symbols(const PatternSpec& spec, std::size_t length, PatternRng& rng) {
  validate_pattern(spec);
  const std::size_t blocks = (length + spec.block_length() - 1) / spec.block_length();
  std::vector<std::size_t> picks(blocks);
  for (auto& p : picks) p = uniform_below(rng, spec.dictionary.size());
  return assemble_symbols(spec, picks, length);
}

CaseTrace generate_case(const PatternSpec& spec, std::size_t length, PatternRng& rng,
                        Alphabet& alphabet, std::string case_id) {
  if (length == 0) throw Error("case length must be positive");
  const std::string symbols = generate_symbols(spec, length, rng);
  CaseTrace trace{std::move(case_id), {}};
  trace.events.reserve(length + 1);
  for (char c : symbols) trace.events.push_back(alphabet.intern(std::string_view(&c, 1)));
  trace.events.push_back(kStop);
  return trace;
}

EventLog generate_log(const PatternSpec& spec, const GenConfig& cfg) {
  if (cfg.n_cases == 0) throw Error("n_cases must be positive");
  if (cfg.case_length == 0) throw Error("case length must be positive");
  validate_pattern(spec);
  EventLog log;
  log.cases.reserve(cfg.n_cases);
  for (std::size_t i = 0; i < cfg.n_cases; ++i) {
    PatternRng rng(case_seed(cfg.seed, i));
    log.cases.push_back(
        generate_case(spec, cfg.case_length, rng, log.alphabet, "case_" + std::to_string(i)));
  }
  return log;
}

bool is_pattern_prefix(const PatternSpec& spec, std::string_view symbols) {
  const std::size_t block = spec.block_length();
  if (block == 0) return symbols.empty();
  for (std::size_t pos = 0; pos < symbols.size(); pos += block) {
    const auto chunk = symbols.substr(pos, block);
    bool ok = false;
    for (const auto& w : spec.dictionary) {
      if (std::string_view(w).substr(0, chunk.size()) == chunk) {
        ok = true;
        break;
      }
    }
    if (!ok) return false;
  }
  return true;
}

}  // namespace streampred
