#include "doctest.h"

#include <array>
#include <map>
#include <string>

#include "streampred/oracle.hpp"

using namespace streampred;

namespace {

// Brute force over every sequence of `blocks` words: the targets are the
// positions of the last block, the context the `window` symbols before them.
double brute_force(const PatternSpec& spec, std::size_t window) {
  const std::size_t L = spec.block_length();
  const std::size_t k = spec.dictionary.size();
  const std::size_t blocks = window / L + 2;
  std::size_t combos = 1;
  for (std::size_t i = 0; i < blocks; ++i) combos *= k;

  std::map<std::string, std::array<double, 2>> mass;
  for (std::size_t code = 0; code < combos; ++code) {
    std::string s;
    for (std::size_t i = 0, c = code; i < blocks; ++i, c /= k) s += spec.dictionary[c % k];
    for (std::size_t p = 0; p < L; ++p) {
      const std::size_t target = (blocks - 1) * L + p;
      mass[s.substr(target - window, window)][s[target] == 'A' ? 0 : 1] += 1.0;
    }
  }
  double best = 0;
  for (const auto& [ctx, m] : mass) best += std::max(m[0], m[1]);
  return best / static_cast<double>(combos * L);
}

}  // namespace

TEST_CASE("exact oracle agrees with brute force") {
  for (auto name : builtin_pattern_names()) {
    const auto spec = builtin_pattern(name);
    for (std::size_t w = 0; w <= 10; ++w) {
      CHECK_MESSAGE(exact_best_accuracy(spec, w) == doctest::Approx(brute_force(spec, w)).epsilon(1e-12),
                    name << " window " << w);
    }
  }
}

TEST_CASE("known oracle values") {
  const auto aaabbb = builtin_pattern("aaabbb");
  CHECK(exact_best_accuracy(aaabbb, 0) == doctest::Approx(0.5));
  CHECK(exact_best_accuracy(aaabbb, 1) == doctest::Approx(2.0 / 3.0));
  for (std::size_t w = 3; w <= 8; ++w) CHECK(exact_best_accuracy(aaabbb, w) == doctest::Approx(1.0));
  const auto xxbarx = builtin_pattern("xxbarx");
  for (std::size_t w = 4; w <= 8; ++w) CHECK(exact_best_accuracy(xxbarx, w) == doctest::Approx(5.0 / 6.0));
}

TEST_CASE("pattern ceilings") {
  CHECK(pattern_ceiling(builtin_pattern("aaabbb")) == 1.0);
  CHECK(pattern_ceiling(builtin_pattern("aaabb")) == 1.0);
  CHECK(pattern_ceiling(builtin_pattern("xxbarx")) == doctest::Approx(5.0 / 6.0));
  CHECK(pattern_ceiling(builtin_pattern("xaxb")) == doctest::Approx(7.0 / 8.0));
  CHECK(pattern_ceiling(builtin_pattern("xabxba")) == doctest::Approx(11.0 / 12.0));
}

TEST_CASE("oracle accuracy is nondecreasing in the window and bounded by the ceiling") {
  for (auto name : builtin_pattern_names()) {
    const auto spec = builtin_pattern(name);
    double prev = 0;
    for (std::size_t w = 0; w <= 14; ++w) {
      const double v = exact_best_accuracy(spec, w);
      CHECK(v >= prev - 1e-12);
      CHECK(v <= pattern_ceiling(spec) + 1e-12);
      prev = v;
    }
    CHECK(prev == doctest::Approx(pattern_ceiling(spec)));
  }
}

TEST_CASE("empirical oracle brackets the exact value") {
  for (auto name : builtin_pattern_names()) {
    const auto spec = builtin_pattern(name);
    for (std::size_t w = 0; w <= 8; ++w) {
      const auto est = empirical_best_accuracy(spec, w, 200'000, 7);
      const double exact = exact_best_accuracy(spec, w);
      CHECK(est.samples > 0);
      CHECK_MESSAGE(std::abs(est.value - exact) <= 0.01, name << " window " << w);
      CHECK(est.ci_low <= est.value);
      CHECK(est.ci_high >= est.value);
    }
  }
  CHECK_THROWS_AS(empirical_best_accuracy(builtin_pattern("xaxb"), 10, 8, 1), Error);
}

TEST_CASE("exact enumeration refuses oversized problems") {
  CHECK_THROWS_WITH_AS(exact_best_accuracy(builtin_pattern("xxbarx"), 60, 1000),
                       "exact oracle infeasible for window 60; use the empirical method", Error);
}

TEST_CASE("plateau fix") {
  const AccuracyCurve flat{{0, 0.5}, {1, 0.5}, {2, 0.5}};
  CHECK(plateau_fix(flat) == flat);

  const AccuracyCurve noisy{{0, 0.5}, {1, 0.66}, {2, 0.83}, {3, 1.0}, {4, 0.9999999}, {5, 1.0}};
  const auto fixed = plateau_fix(noisy, 1.0);
  CHECK(fixed.at(2) == 0.83);
  for (std::size_t w = 3; w <= 5; ++w) CHECK(fixed.at(w) == 1.0);

  const AccuracyCurve xaxb{{0, 0.5}, {1, 0.75}, {2, 0.875}, {3, 0.87}};
  CHECK(plateau_fix(xaxb, 0.875).at(3) == 0.875);

  CHECK_THROWS_AS(plateau_fix(AccuracyCurve{}), Error);
  CHECK_THROWS_AS(plateau_fix(AccuracyCurve{{1, 0.5}}), Error);
  CHECK_THROWS_AS(plateau_fix(AccuracyCurve{{0, 0.5}, {2, 0.5}}), Error);
}

TEST_CASE("oracle curve reaches and keeps the ceiling") {
  const auto spec = builtin_pattern("xaxb");
  const auto curve = oracle_curve(spec, 40);
  CHECK(curve.size() == 41);
  CHECK(curve.at(40) == pattern_ceiling(spec));
  CHECK(curve.at(0) == doctest::Approx(exact_best_accuracy(spec, 0)));

  OracleOptions emp;
  emp.method = OracleMethod::empirical;
  emp.sample_budget = 50'000;
  const auto e = oracle_curve(builtin_pattern("aaabbb"), 4, emp);
  CHECK(e.at(4) == doctest::Approx(1.0));
  CHECK(parse_oracle_method("exact") == OracleMethod::exact);
  CHECK_THROWS_AS(parse_oracle_method("guess"), Error);
}
