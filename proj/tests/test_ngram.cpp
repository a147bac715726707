#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <vector>

#include "streampred/generators.hpp"
#include "streampred/ngram.hpp"

using namespace streampred;

namespace {

constexpr ActivityId A = 1;
constexpr ActivityId B = 2;
constexpr ActivityId C = 3;

using Table = std::map<History, std::map<ActivityId, Count>>;

// Brute-force recount: every position of every trace, history sliced from
// the start of its own case.
Table recount(const std::vector<std::vector<ActivityId>>& traces, int n) {
  Table t;
  for (const auto& tr : traces) {
    for (std::size_t i = 0; i < tr.size(); ++i) {
      const std::size_t len = std::min<std::size_t>(i, static_cast<std::size_t>(n - 1));
      History h(tr.begin() + static_cast<long>(i - len), tr.begin() + static_cast<long>(i));
      t[h][tr[i]]++;
    }
  }
  return t;
}

std::map<ActivityId, Count> as_map(const Counter& c) {
  std::map<ActivityId, Count> m;
  for (auto [a, k] : c.sorted()) m[a] = k;
  return m;
}

// Reference prediction: exact history if seen, else the longest suffix of
// length <= n-2 that occurs at the end of some trained history.
std::map<ActivityId, Count> reference_counts(const Table& t, const History& h, int n) {
  if (auto it = t.find(h); it != t.end()) return it->second;
  const std::size_t top = std::min<std::size_t>(h.size(), static_cast<std::size_t>(n - 2 < 0 ? 0 : n - 2));
  for (std::size_t k = top + 1; k-- > 0;) {
    const History s(h.end() - static_cast<long>(k), h.end());
    std::map<ActivityId, Count> agg;
    for (const auto& [hist, counts] : t) {
      if (hist.size() >= k && std::equal(s.begin(), s.end(), hist.end() - static_cast<long>(k))) {
        for (auto [a, c] : counts) agg[a] += c;
      }
    }
    if (!agg.empty()) return agg;
  }
  return {{kStop, 1}};
}

ActivityId reference_top(const std::map<ActivityId, Count>& m) {
  ActivityId best = m.begin()->first;
  for (auto [a, c] : m) {
    if (c > m.at(best)) best = a;
  }
  return best;
}

NGramModel::Cursor walk(const NGramModel& m, const History& prefix) {
  auto cur = m.start();
  for (ActivityId a : prefix) m.advance(cur, a);
  return cur;
}

std::vector<std::vector<ActivityId>> random_traces(std::mt19937_64& rng, int n_cases, int max_len,
                                                   int n_symbols) {
  std::vector<std::vector<ActivityId>> out;
  for (int c = 0; c < n_cases; ++c) {
    const int len = static_cast<int>(rng() % static_cast<unsigned>(max_len + 1));
    std::vector<ActivityId> t;
    for (int i = 0; i < len; ++i) t.push_back(1 + static_cast<ActivityId>(rng() % n_symbols));
    t.push_back(kStop);
    out.push_back(std::move(t));
  }
  return out;
}

}  // namespace

TEST_CASE("history_of") {
  const std::vector<ActivityId> w{A, B, C, A, B};
  CHECK(history_of(w, 3) == History{A, B});
  const std::vector<ActivityId> ab{A, B};
  CHECK(history_of(ab, 5) == History{A, B});
  CHECK(history_of(w, 1).empty());
  CHECK(history_of(std::span<const ActivityId>(), 4).empty());
  CHECK_THROWS_AS(history_of(w, 0), Error);
}

TEST_CASE("counter top breaks ties by lowest id") {
  Counter c;
  c.add(B, 2);
  c.add(A, 2);
  c.add(C, 1);
  CHECK(c.top() == A);
  CHECK(c.total() == 5);
  CHECK(c.get(B) == 2);
  CHECK(c.get(7) == 0);
  CHECK(c.sorted().front().first == A);
}

TEST_CASE("training one trace into a bigram") {
  NGramModel m(2);
  const std::vector<ActivityId> t{A, A, B, kStop};
  m.train_trace(t);
  const History eps, ha{A}, hb{B};
  REQUIRE(m.state_counts(eps));
  REQUIRE(m.state_counts(ha));
  REQUIRE(m.state_counts(hb));
  CHECK(as_map(*m.state_counts(eps)) == std::map<ActivityId, Count>{{A, 1}});
  CHECK(as_map(*m.state_counts(ha)) == std::map<ActivityId, Count>{{A, 1}, {B, 1}});
  CHECK(as_map(*m.state_counts(hb)) == std::map<ActivityId, Count>{{kStop, 1}});

  m.train_trace(t);
  CHECK(as_map(*m.state_counts(ha)) == std::map<ActivityId, Count>{{A, 2}, {B, 2}});
  const auto d = m.predict(walk(m, {A}));
  CHECK(d[A] == 0.5);
  CHECK(d[B] == 0.5);
  CHECK(m.predict_top(walk(m, {A})) == A);
}

TEST_CASE("prediction only depends on the last n-1 activities") {
  NGramModel m(3);
  const std::vector<ActivityId> t{A, A, A, B, A, B, B, kStop};
  m.train_trace(t);
  CHECK(m.predict(walk(m, {A, B})) == m.predict(walk(m, {A, A, A, B})));
}

TEST_CASE("untrained model predicts stop") {
  NGramModel m(4);
  const auto d = m.predict(walk(m, {A, B}));
  CHECK(d[kStop] == 1.0);
  CHECK(m.predict_top(m.start()) == kStop);
}

TEST_CASE("unseen history backs off to its longest observed suffix") {
  NGramModel m(3);
  const std::vector<ActivityId> t{A, B, kStop};
  m.train_trace(t);
  // history (B,B) never seen; suffix B was followed by stop
  CHECK(m.predict_top(walk(m, {B, B})) == kStop);
  // history (C,C): only the empty suffix is known
  const auto d = m.predict(walk(m, {C, C}));
  CHECK(d[A] == doctest::Approx(1.0 / 3));
  CHECK(d[B] == doctest::Approx(1.0 / 3));
  CHECK(d[kStop] == doctest::Approx(1.0 / 3));
}

TEST_CASE("advance does not change counters") {
  NGramModel m(3);
  const std::vector<ActivityId> t{A, B, A, kStop};
  m.train_trace(t);
  const auto before = m.snapshot();
  auto cur = m.start();
  for (ActivityId a : {C, C, A, B, kStop, B}) m.advance(cur, a);
  CHECK(m.snapshot() == before);
}

TEST_CASE("stop resets the cursor") {
  NGramModel m(3);
  auto cur = m.start();
  for (ActivityId a : {A, B, kStop}) m.train(cur, a);
  CHECK(cur.history.empty());
}

TEST_CASE("new activities may appear mid-stream") {
  NGramModel m(2);
  auto cur = m.start();
  for (ActivityId a : {A, B, kStop}) m.train(cur, a);
  for (ActivityId a : {A, ActivityId{9}, kStop}) m.train(cur, a);
  const auto d = m.predict(walk(m, {A}));
  CHECK(d[9] == 0.5);
  CHECK(is_valid_distribution(d));
  CHECK(m.predict_top(walk(m, {9})) == kStop);
}

TEST_CASE("snapshot lists states with names") {
  Alphabet al;
  const auto a = al.intern("A");
  NGramModel m(2);
  const std::vector<ActivityId> t{a, kStop};
  m.train_trace(t);
  const auto j = m.snapshot(&al);
  CHECK(j["n"] == 2);
  CHECK(j["states"].size() == 2);
  CHECK(j["states"][0]["history"].empty());
  CHECK(j["states"][0]["counts"][0][0] == "A");
  CHECK(j["states"][1]["counts"][0][0] == "__STOP__");
}

TEST_CASE("counts match a brute-force recount") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 5);
    const auto traces = random_traces(rng, 1 + static_cast<int>(rng() % 6), 12, 3);
    NGramModel m(n);
    for (const auto& t : traces) m.train_trace(t);
    const auto ref = recount(traces, n);
    CHECK(m.state_count() == ref.size());
    for (const auto& [h, counts] : ref) {
      const auto* c = m.state_counts(h);
      REQUIRE(c);
      CHECK(as_map(*c) == counts);
    }
    // predictions, including unseen histories
    for (int q = 0; q < 40; ++q) {
      History h;
      const auto len = rng() % static_cast<unsigned>(n);
      for (unsigned i = 0; i < len; ++i) h.push_back(1 + static_cast<ActivityId>(rng() % 4));
      const auto expected = reference_counts(ref, h, n);
      const auto got = m.predict(walk(m, h));
      Count total = 0;
      for (auto [a, k] : expected) total += k;
      for (auto [a, k] : expected) {
        CHECK(got[a] == doctest::Approx(static_cast<double>(k) / static_cast<double>(total)));
      }
      CHECK(m.predict_top(walk(m, h)) == reference_top(expected));
    }
  }
}

TEST_CASE("suffix equivalence on random prefixes") {
  std::mt19937_64 rng(17);
  for (int n : {3, 5}) {
    NGramModel m(n);
    for (const auto& t : random_traces(rng, 40, 30, 3)) m.train_trace(t);
    for (int trial = 0; trial < 300; ++trial) {
      History suffix;
      for (int i = 0; i < n - 1; ++i) suffix.push_back(1 + static_cast<ActivityId>(rng() % 3));
      History w1, w2;
      for (auto k = rng() % 20; k > 0; --k) w1.push_back(1 + static_cast<ActivityId>(rng() % 3));
      for (auto k = rng() % 20; k > 0; --k) w2.push_back(1 + static_cast<ActivityId>(rng() % 3));
      w1.insert(w1.end(), suffix.begin(), suffix.end());
      w2.insert(w2.end(), suffix.begin(), suffix.end());
      CHECK(m.predict(walk(m, w1)) == m.predict(walk(m, w2)));
    }
  }
}

TEST_CASE("streaming and offline training give the same model") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 6);
    const auto traces = random_traces(rng, 8, 25, 4);

    NGramModel offline(n);
    for (const auto& t : traces) offline.train_trace(t);

    // Interleave the cases event by event, each with its own cursor.
    NGramModel online(n);
    std::vector<NGramModel::Cursor> cursors(traces.size(), online.start());
    std::vector<std::size_t> pos(traces.size(), 0);
    std::size_t remaining = 0;
    for (const auto& t : traces) remaining += t.size();
    while (remaining > 0) {
      const auto c = rng() % traces.size();
      if (pos[c] == traces[c].size()) continue;
      online.train(cursors[c], traces[c][pos[c]++]);
      --remaining;
    }
    CHECK(online.snapshot() == offline.snapshot());
  }
}

TEST_CASE("state count is bounded by the distinct histories") {
  const auto log = generate_log(builtin_pattern("xaxb"), {10, 500, 3});
  for (int n : {1, 2, 4, 8}) {
    NGramModel m(n);
    std::vector<std::vector<ActivityId>> traces;
    for (const auto& t : log.cases) {
      m.train_trace(t.events);
      traces.push_back(t.events);
    }
    const auto ref = recount(traces, n);
    CHECK(m.state_count() <= ref.size());
    const double sigma = static_cast<double>(log.alphabet.size());
    double bound = 0;
    for (int k = 0; k < n; ++k) bound += std::pow(sigma, k);
    CHECK(static_cast<double>(m.state_count()) <= bound);
  }
}

TEST_CASE("unigram predicts the global majority") {
  NGramModel m(1);
  const std::vector<ActivityId> t{A, B, B, A, B, kStop};
  m.train_trace(t);
  for (const History& h : {History{}, History{A}, History{B, B, A}}) {
    CHECK(m.predict_top(walk(m, h)) == B);
  }
}

TEST_CASE("predictor keeps one cursor per case") {
  NGramPredictor p(2);
  CHECK(p.name() == "2-gram");
  CHECK(p.config()["n"] == 2);
  for (ActivityId a : {A, B, kStop}) p.update(0, a);
  p.update(1, A);
  p.update(2, B);
  CHECK(p.predict_top(1) == B);
  CHECK(p.predict_top(2) == kStop);
  CHECK(p.predict_top(3) == A);

  // frozen updates move the cursor only
  const auto before = p.model().snapshot();
  p.update(1, B, false);
  CHECK(p.model().snapshot() == before);
  CHECK(p.predict_top(1) == kStop);
}
