#include "doctest.h"

#include <algorithm>
#include <map>
#include <random>

#include "streampred/ensembles.hpp"
#include "streampred/generators.hpp"
#include "streampred/harness.hpp"
#include "streampred/ngram.hpp"

using namespace streampred;

namespace {

EventLog abab_log(std::size_t n_cases, std::size_t len) {
  EventLog log;
  const auto a = log.alphabet.intern("A");
  const auto b = log.alphabet.intern("B");
  for (std::size_t c = 0; c < n_cases; ++c) {
    CaseTrace t{"case_" + std::to_string(c), {}};
    for (std::size_t i = 0; i < len; ++i) t.events.push_back(i % 2 ? b : a);
    t.events.push_back(kStop);
    log.cases.push_back(std::move(t));
  }
  return log;
}

// Recounts the unigram table from scratch before every event.
std::size_t unigram_hits_by_recount(const std::vector<ActivityId>& stream) {
  std::size_t hits = 0;
  for (std::size_t i = 0; i < stream.size(); ++i) {
    std::map<ActivityId, std::size_t> counts;
    for (std::size_t j = 0; j < i; ++j) counts[stream[j]]++;
    ActivityId guess = kStop;
    std::size_t best = 0;
    for (auto [a, k] : counts) {
      if (k > best) {
        best = k;
        guess = a;
      }
    }
    hits += guess == stream[i];
  }
  return hits;
}

}  // namespace

TEST_CASE("unigram on three one-event cases") {
  EventLog log;
  const auto a = log.alphabet.intern("A");
  for (int c = 0; c < 3; ++c) log.cases.push_back({"c" + std::to_string(c), {a, kStop}});
  const auto stream = sequential_stream(log);
  std::vector<ActivityId> flat;
  for (const auto& e : stream) flat.push_back(e.activity);

  const auto expected = unigram_hits_by_recount(flat);
  CHECK(expected == 0);
  NGramPredictor m(1);
  const auto r = run_prequential(m, stream);
  CHECK(r.n_events == 6);
  CHECK(r.n_correct == expected);
  CHECK(r.accuracy == 0.0);
}

TEST_CASE("prequential hit count matches a recount on random logs") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    EventLog log;
    for (int s = 0; s < 3; ++s) log.alphabet.intern(std::string(1, static_cast<char>('A' + s)));
    for (int c = 0; c < 5; ++c) {
      CaseTrace t{"c" + std::to_string(c), {}};
      for (auto k = rng() % 15; k > 0; --k) t.events.push_back(1 + static_cast<ActivityId>(rng() % 3));
      t.events.push_back(kStop);
      log.cases.push_back(t);
    }
    const auto stream = sequential_stream(log);
    std::vector<ActivityId> flat;
    for (const auto& e : stream) flat.push_back(e.activity);
    NGramPredictor m(1);
    CHECK(run_prequential(m, stream).n_correct == unigram_hits_by_recount(flat));
  }
}

TEST_CASE("a lone stop is scored once") {
  EventLog log;
  log.cases.push_back({"c", {kStop}});
  NGramPredictor m(3);
  const auto r = run_prequential(m, sequential_stream(log));
  CHECK(r.n_events == 1);
  CHECK(r.accuracy == 100.0);
}

TEST_CASE("malformed streams are rejected") {
  NGramPredictor m(2);
  const std::vector<EventRecord> after_stop{{0, kStop, 0}, {0, 1, 1}};
  CHECK_THROWS_WITH_AS(run_prequential(m, after_stop), "activity after stop", Error);
  NGramPredictor m2(2);
  const std::vector<EventRecord> unordered{{0, 1, 5}, {0, kStop, 3}};
  CHECK_THROWS_WITH_AS(run_prequential(m2, unordered), "unordered seq_no", Error);
}

TEST_CASE("5-gram learns a deterministic pattern") {
  const auto log = generate_log(builtin_pattern("aaabbb"), {100, 2000, 42});
  NGramPredictor m(5);
  const auto r = run_prequential(m, sequential_stream(log));
  CHECK(r.n_events == 200'100);
  CHECK(r.accuracy == doctest::Approx(99.95).epsilon(0.0015));
  CHECK(r.accuracy == doctest::Approx(100.0 * r.n_correct / r.n_events));
  CHECK(r.pred_time_us_avg >= 0);
  CHECK(r.train_time_us_p99 >= 0);
}

TEST_CASE("streams preserve per-case order") {
  const auto log = generate_log(builtin_pattern("xaxb"), {12, 37, 3});
  for (const auto& stream : {sequential_stream(log), round_robin_stream(log), interleave(log, 5)}) {
    std::vector<std::vector<ActivityId>> rebuilt(log.cases.size());
    std::uint64_t prev = 0;
    for (std::size_t i = 0; i < stream.size(); ++i) {
      if (i) CHECK(stream[i].seq_no > prev);
      prev = stream[i].seq_no;
      rebuilt[stream[i].case_index].push_back(stream[i].activity);
    }
    for (std::size_t c = 0; c < log.cases.size(); ++c) CHECK(rebuilt[c] == log.cases[c].events);
  }
  const auto rr = round_robin_stream(log);
  CHECK(rr[0].case_index == 0);
  CHECK(rr[1].case_index == 1);

  auto a = interleave(log, 5), b = interleave(log, 5), c = interleave(log, 6);
  CHECK(std::equal(a.begin(), a.end(), b.begin(), [](auto& x, auto& y) {
    return x.case_index == y.case_index && x.activity == y.activity;
  }));
  CHECK_FALSE(std::equal(a.begin(), a.end(), c.begin(), [](auto& x, auto& y) {
    return x.case_index == y.case_index;
  }));
}

TEST_CASE("frozen models score the same under any interleaving") {
  const auto log = generate_log(builtin_pattern("xabxba"), {30, 200, 13});
  const auto train = generate_log(builtin_pattern("xabxba"), {10, 500, 14});
  for (auto make : {+[]() -> std::unique_ptr<StreamPredictor> { return std::make_unique<NGramPredictor>(4); },
                    +[]() -> std::unique_ptr<StreamPredictor> {
                      return make_ensemble(EnsembleConfig::soft_default());
                    },
                    +[]() -> std::unique_ptr<StreamPredictor> {
                      return make_ensemble(EnsembleConfig::promotion_default());
                    }}) {
    std::vector<std::uint64_t> hits;
    for (int order = 0; order < 4; ++order) {
      auto m = make();
      run_prequential(*m, sequential_stream(train), {true, false});
      const auto stream = order == 0   ? sequential_stream(log)
                          : order == 1 ? round_robin_stream(log)
                                       : interleave(log, static_cast<std::uint64_t>(order));
      hits.push_back(run_prequential(*m, stream, {false, false}).n_correct);
    }
    CHECK(std::all_of(hits.begin(), hits.end(), [&](auto h) { return h == hits[0]; }));
  }
}

TEST_CASE("evaluation is deterministic") {
  const auto log = generate_log(builtin_pattern("xaxb"), {10, 500, 1});
  const auto stream = interleave(log, 3);
  auto m1 = make_ensemble(EnsembleConfig::promotion_default());
  auto m2 = make_ensemble(EnsembleConfig::promotion_default());
  const auto r1 = run_prequential(*m1, stream);
  const auto r2 = run_prequential(*m2, stream);
  CHECK(r1.n_correct == r2.n_correct);
  CHECK(r1.config == r2.config);
}

TEST_CASE("split sizes") {
  CHECK_THROWS_WITH_AS(split_sizes(2), "split needs at least 3 cases", Error);
  const auto s100 = split_sizes(100);
  CHECK(s100.train == 70);
  CHECK(s100.validation == 15);
  CHECK(s100.test == 15);
  const auto s3 = split_sizes(3);
  CHECK(s3.train == 2);
  CHECK(s3.validation == 0);
  CHECK(s3.test == 1);
  for (std::size_t n = 3; n < 300; ++n) {
    const auto s = split_sizes(n);
    CHECK(s.train + s.validation + s.test == n);
    CHECK(s.test >= 1);
  }
}

TEST_CASE("split protocol") {
  const auto det = generate_log(builtin_pattern("aaabbb"), {20, 300, 42});
  NGramPredictor m(5);
  const auto r = run_split(m, det);
  CHECK(r.protocol == "split");
  CHECK(r.n_events == 3 * 301);
  // only the stop closing each test case is unpredictable
  CHECK(r.n_correct == r.n_events - 3);

  const auto alt = abab_log(10, 20);
  NGramPredictor bigram(2);
  const auto ra = run_split(bigram, alt);
  CHECK(ra.n_events == 2 * 21);
  CHECK(ra.n_correct == ra.n_events - 2);
}

TEST_CASE("report serialization round trip") {
  EvalReport r;
  r.model_name = "Promotion (3,5)";
  r.dataset_name = "x,y";
  r.n_events = 10;
  r.n_correct = 7;
  r.accuracy = 70.0;
  r.pred_time_us_avg = 0.5;
  r.train_time_us_avg = 1.5;
  r.member_train_time_us_avg = {0.25, 0.75};
  r.config = {{"kind", "promotion"}};
  const auto j = to_json(r);
  CHECK(j.contains("model"));
  CHECK(j.contains("config"));
  const auto back = eval_report_from_json(j);
  CHECK(back.model_name == r.model_name);
  CHECK(back.n_correct == 7);
  CHECK(back.member_train_time_us_avg == r.member_train_time_us_avg);
  CHECK(back.config == r.config);

  auto bad = j;
  bad.erase("accuracy");
  CHECK_THROWS_AS(eval_report_from_json(bad), Error);
  auto inconsistent = j;
  inconsistent["n_correct"] = 11;
  CHECK_THROWS_AS(eval_report_from_json(inconsistent), Error);

  const auto header = eval_report_csv_header();
  const auto row = eval_report_csv_row(r);
  CHECK(std::count(header.begin(), header.end(), ',') == 11);
  CHECK(row.find("\"x,y\"") != std::string::npos);

  const std::vector<EvalReport> rs{r};
  const auto table = format_table(rs);
  CHECK(table.find("Promotion (3,5)") != std::string::npos);
  CHECK(table.find("70.00") != std::string::npos);
}

TEST_CASE("promotion stays close to its first rung on every pattern") {
  for (auto name : builtin_pattern_names()) {
    const auto log = generate_log(builtin_pattern(name), {100, 2000, 42});
    const auto stream = sequential_stream(log);
    NGramPredictor base(3);
    auto promo = make_ensemble(EnsembleConfig::promotion_default());
    const auto rb = run_prequential(base, stream, {true, false});
    const auto rp = run_prequential(*promo, stream, {true, false});
    CHECK_MESSAGE(rp.accuracy >= rb.accuracy - 2.0, name);
  }
}
