#include "streampred/harness.hpp"

#include "streampred/generators.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <sstream>

namespace streampred {

namespace {

using Clock = std::chrono::steady_clock;

double micros(Clock::duration d) { return std::chrono::duration<double, std::micro>(d).count(); }

struct LatencySummary {
  double mean = 0, median = 0, p99 = 0;
};

LatencySummary summarize(std::vector<double>& samples) {
  LatencySummary s;
  if (samples.empty()) return s;
  double sum = 0;
  for (double x : samples) sum += x;
  s.mean = sum / static_cast<double>(samples.size());
  auto at = [&](double q) {
    const auto k = static_cast<std::size_t>(q * static_cast<double>(samples.size() - 1));
    std::nth_element(samples.begin(), samples.begin() + static_cast<std::ptrdiff_t>(k),
                     samples.end());
    return samples[k];
  };
  s.median = at(0.5);
  s.p99 = at(0.99);
  return s;
}

std::string fixed(double x, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

void finish(EvalReport& r, StreamPredictor& model, std::vector<double>& pred,
            std::vector<double>& train, std::span<const double> member_ns_before) {
  r.model_name = model.name();
  r.config = model.config();
  r.accuracy = r.n_events == 0 ? 0.0
                               : 100.0 * static_cast<double>(r.n_correct) /
                                     static_cast<double>(r.n_events);
  const auto p = summarize(pred);
  r.pred_time_us_avg = p.mean;
  r.pred_time_us_median = p.median;
  r.pred_time_us_p99 = p.p99;
  const auto t = summarize(train);
  r.train_time_us_avg = t.mean;
  r.train_time_us_median = t.median;
  r.train_time_us_p99 = t.p99;
  const auto member_ns = model.member_train_ns();
  const auto steps = static_cast<double>(std::max<std::size_t>(train.size(), 1));
  r.member_train_time_us_avg.clear();
  for (std::size_t i = 0; i < member_ns.size(); ++i) {
    const double before = i < member_ns_before.size() ? member_ns_before[i] : 0.0;
    r.member_train_time_us_avg.push_back((member_ns[i] - before) / 1000.0 / steps);
  }
}

}  // namespace

// --- report serialization --------------------------------------------------

nlohmann::json to_json(const EvalReport& r) {
  nlohmann::ordered_json j;
  j["model"] = r.model_name;
  j["dataset"] = r.dataset_name;
  j["protocol"] = r.protocol;
  j["n_events"] = r.n_events;
  j["n_correct"] = r.n_correct;
  j["accuracy"] = r.accuracy;
  j["pred_time_us_avg"] = r.pred_time_us_avg;
  j["pred_time_us_median"] = r.pred_time_us_median;
  j["pred_time_us_p99"] = r.pred_time_us_p99;
  j["train_time_us_avg"] = r.train_time_us_avg;
  j["train_time_us_median"] = r.train_time_us_median;
  j["train_time_us_p99"] = r.train_time_us_p99;
  j["member_train_time_us_avg"] = r.member_train_time_us_avg;
  j["config"] = r.config;
  return nlohmann::json::parse(j.dump());
}

EvalReport eval_report_from_json(const nlohmann::json& j) {
  try {
    EvalReport r;
    r.model_name = j.at("model").get<std::string>();
    r.dataset_name = j.at("dataset").get<std::string>();
    r.protocol = j.value("protocol", std::string("prequential"));
    r.n_events = j.at("n_events").get<std::uint64_t>();
    r.n_correct = j.at("n_correct").get<std::uint64_t>();
    r.accuracy = j.at("accuracy").get<double>();
    r.pred_time_us_avg = j.at("pred_time_us_avg").get<double>();
    r.train_time_us_avg = j.at("train_time_us_avg").get<double>();
    r.pred_time_us_median = j.value("pred_time_us_median", 0.0);
    r.pred_time_us_p99 = j.value("pred_time_us_p99", 0.0);
    r.train_time_us_median = j.value("train_time_us_median", 0.0);
    r.train_time_us_p99 = j.value("train_time_us_p99", 0.0);
    r.member_train_time_us_avg =
        j.value("member_train_time_us_avg", std::vector<double>{});
    r.config = j.value("config", nlohmann::json::object());
    if (r.n_correct > r.n_events) throw Error("n_correct exceeds n_events");
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed report: ") + e.what());
  }
}

std::string eval_report_csv_header() {
  return "model,dataset,protocol,n_events,n_correct,accuracy,pred_time_us_avg,"
         "pred_time_us_median,pred_time_us_p99,train_time_us_avg,train_time_us_median,"
         "train_time_us_p99";
}

std::string eval_report_csv_row(const EvalReport& r) {
  auto quote = [](const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
      if (c == '"') out += '"';
      out += c;
    }
    return out + "\"";
  };
  std::ostringstream os;
  os << quote(r.model_name) << ',' << quote(r.dataset_name) << ',' << r.protocol << ','
     << r.n_events << ',' << r.n_correct << ',' << fixed(r.accuracy, 4) << ','
     << fixed(r.pred_time_us_avg, 4) << ',' << fixed(r.pred_time_us_median, 4) << ','
     << fixed(r.pred_time_us_p99, 4) << ',' << fixed(r.train_time_us_avg, 4) << ','
     << fixed(r.train_time_us_median, 4) << ',' << fixed(r.train_time_us_p99, 4);
  return os.str();
}

std::string format_table(std::span<const EvalReport> reports) {
  std::vector<std::string> models, datasets;
  auto add_unique = [](std::vector<std::string>& v, const std::string& s) {
    if (std::find(v.begin(), v.end(), s) == v.end()) v.push_back(s);
  };
  for (const auto& r : reports) {
    add_unique(models, r.model_name);
    add_unique(datasets, r.dataset_name);
  }
  std::size_t name_w = 5;
  for (const auto& m : models) name_w = std::max(name_w, m.size());
  std::size_t col_w = 8;
  for (const auto& d : datasets) col_w = std::max(col_w, d.size());

  auto pad = [](std::string s, std::size_t w, bool left) {
    if (s.size() >= w) return s;
    return left ? s + std::string(w - s.size(), ' ') : std::string(w - s.size(), ' ') + s;
  };
  std::ostringstream os;
  os << pad("Model", name_w, true);
  for (const auto& d : datasets) os << "  " << pad(d, col_w, false);
  os << "  " << pad("pred_us", 10, false) << "  " << pad("train_us", 10, false) << '\n';
  for (const auto& m : models) {
    os << pad(m, name_w, true);
    double pred = 0, train = 0;
    int n = 0;
    for (const auto& d : datasets) {
      std::string cell = "-";
      for (const auto& r : reports) {
        if (r.model_name == m && r.dataset_name == d) cell = fixed(r.accuracy, 2);
      }
      os << "  " << pad(cell, col_w, false);
    }
    for (const auto& r : reports) {
      if (r.model_name != m) continue;
      pred += r.pred_time_us_avg;
      train += r.train_time_us_avg;
      ++n;
    }
    os << "  " << pad(fixed(n ? pred / n : 0, 3), 10, false) << "  "
       << pad(fixed(n ? train / n : 0, 3), 10, false) << '\n';
  }
  return os.str();
}

// --- streams ---------------------------------------------------------------

std::vector<EventRecord> sequential_stream(const EventLog& log) {
  std::vector<EventRecord> out;
  std::uint64_t seq = 0;
  for (std::size_t c = 0; c < log.cases.size(); ++c) {
    for (ActivityId a : log.cases[c].events) {
      out.push_back({static_cast<std::uint32_t>(c), a, seq++});
    }
  }
  return out;
}

std::vector<EventRecord> round_robin_stream(const EventLog& log) {
  std::vector<EventRecord> out;
  std::vector<std::size_t> pos(log.cases.size(), 0);
  std::uint64_t seq = 0;
  bool any = true;
  while (any) {
    any = false;
    for (std::size_t c = 0; c < log.cases.size(); ++c) {
      const auto& ev = log.cases[c].events;
      if (pos[c] < ev.size()) {
        out.push_back({static_cast<std::uint32_t>(c), ev[pos[c]++], seq++});
        any = true;
      }
    }
  }
  return out;
}

std::vector<EventRecord> interleave(const EventLog& log, std::uint64_t seed) {
  PatternRng rng(seed);
  std::vector<std::uint32_t> open;
  for (std::size_t c = 0; c < log.cases.size(); ++c) {
    if (!log.cases[c].events.empty()) open.push_back(static_cast<std::uint32_t>(c));
  }
  std::vector<std::size_t> pos(log.cases.size(), 0);
  std::vector<EventRecord> out;
  std::uint64_t seq = 0;
  while (!open.empty()) {
    const std::size_t slot = uniform_below(rng, open.size());
    const std::uint32_t c = open[slot];
    const auto& ev = log.cases[c].events;
    out.push_back({c, ev[pos[c]++], seq++});
    if (pos[c] == ev.size()) {
      open[slot] = open.back();
      open.pop_back();
    }
  }
  return out;
}

// --- evaluation ------------------------------------------------------------

EvalReport run_prequential(StreamPredictor& model, std::span<const EventRecord> stream,
                           const PrequentialOptions& opts) {
  EvalReport r;
  r.protocol = "prequential";
  std::vector<double> pred_us, train_us;
  if (opts.timing) {
    pred_us.reserve(stream.size());
    train_us.reserve(stream.size());
  }
  const auto member_before = model.member_train_ns();
  std::vector<bool> closed;

  for (std::size_t i = 0; i < stream.size(); ++i) {
    const EventRecord& e = stream[i];
    if (i > 0 && e.seq_no <= stream[i - 1].seq_no) throw Error("unordered seq_no");
    if (e.case_index >= closed.size()) closed.resize(e.case_index + 1, false);
    if (closed[e.case_index]) throw Error("activity after stop");

    ActivityId guess;
    if (opts.timing) {
      const auto t0 = Clock::now();
      guess = model.predict_top(e.case_index);
      const auto t1 = Clock::now();
      model.update(e.case_index, e.activity, opts.learn);
      const auto t2 = Clock::now();
      pred_us.push_back(micros(t1 - t0));
      train_us.push_back(micros(t2 - t1));
    } else {
      guess = model.predict_top(e.case_index);
      model.update(e.case_index, e.activity, opts.learn);
    }
    ++r.n_events;
    if (guess == e.activity) ++r.n_correct;
    if (e.activity == kStop) closed[e.case_index] = true;
  }
  finish(r, model, pred_us, train_us, member_before);
  return r;
}

SplitSizes split_sizes(std::size_t n_cases) {
  if (n_cases < 3) throw Error("split needs at least 3 cases");
  SplitSizes s;
  s.train = std::max<std::size_t>(1, n_cases * 70 / 100);
  s.validation = n_cases * 15 / 100;
  s.test = n_cases - s.train - s.validation;
  return s;
}

EvalReport run_split(StreamPredictor& model, const EventLog& log) {
  const SplitSizes sizes = split_sizes(log.cases.size());
  for (const auto& t : log.cases) check_trace(t);

  const auto member_before = model.member_train_ns();
  std::vector<double> pred_us, train_us;
  for (std::size_t c = 0; c < sizes.train; ++c) {
    for (ActivityId a : log.cases[c].events) {
      const auto t0 = Clock::now();
      model.update(static_cast<CaseKey>(c), a, true);
      train_us.push_back(micros(Clock::now() - t0));
    }
  }

  EvalReport r;
  r.protocol = "split";
  for (std::size_t c = sizes.train + sizes.validation; c < log.cases.size(); ++c) {
    for (ActivityId a : log.cases[c].events) {
      const auto t0 = Clock::now();
      const ActivityId guess = model.predict_top(static_cast<CaseKey>(c));
      pred_us.push_back(micros(Clock::now() - t0));
      model.update(static_cast<CaseKey>(c), a, false);
      ++r.n_events;
      if (guess == a) ++r.n_correct;
    }
  }
  finish(r, model, pred_us, train_us, member_before);
  return r;
}

}  // namespace streampred
