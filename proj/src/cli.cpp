#include "streampred/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"

#include "streampred/generators.hpp"
#include "streampred/harness.hpp"
#include "streampred/ingest.hpp"
#include "streampred/models.hpp"
#include "streampred/oracle.hpp"

namespace streampred {

namespace {

std::string stem_of(const std::filesystem::path& p) {
  std::string name = p.filename().string();
  for (std::string_view ext : {".xes.gz", ".csv", ".jsonl", ".xes"}) {
    if (name.size() > ext.size() && name.compare(name.size() - ext.size(), ext.size(), ext) == 0) {
      return name.substr(0, name.size() - ext.size());
    }
  }
  return name;
}

nlohmann::json stats_json(const LogStats& s) {
  return {{"n_activities", s.n_activities},
          {"n_cases", s.n_cases},
          {"avg_case_length", s.avg_case_length},
          {"n_events", s.n_events}};
}

std::size_t thread_count() {
  if (const char* env = std::getenv("STREAMPRED_THREADS")) {
    const int n = std::atoi(env);
    if (n >= 1) return static_cast<std::size_t>(n);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<EventRecord> make_stream(const EventLog& log, const std::string& mode,
                                     std::uint64_t seed) {
  if (mode == "sequential") return sequential_stream(log);
  if (mode == "round-robin") return round_robin_stream(log);
  if (mode == "random") return interleave(log, seed);
  throw UsageError("unknown interleave mode '" + mode + "' (valid: sequential, round-robin, random)");
}

EvalReport evaluate(const ModelSpec& spec, const EventLog& log, const std::string& dataset,
                    const std::string& protocol, const std::string& interleave_mode,
                    std::uint64_t seed) {
  auto model = make_predictor(spec);
  EvalReport r;
  if (protocol == "prequential") {
    const auto stream = make_stream(log, interleave_mode, seed);
    r = run_prequential(*model, stream);
  } else if (protocol == "split") {
    r = run_split(*model, log);
  } else {
    throw UsageError("unknown protocol '" + protocol + "' (valid: prequential, split)");
  }
  r.dataset_name = dataset;
  r.config["spec"] = to_string(spec);
  return r;
}

PatternSpec pattern_from(const std::string& name, const std::string& dictionary) {
  try {
    return dictionary.empty() ? builtin_pattern(name) : custom_pattern(dictionary);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write " + path);
  f << text;
}

// --- subcommands -----------------------------------------------------------

struct GenerateArgs {
  std::string pattern = "aaabbb";
  std::string dictionary;
  std::size_t cases = 100;
  std::size_t case_length = 2000;
  std::uint64_t seed = 42;
  std::string out;
};

int cmd_generate(const GenerateArgs& a, std::ostream& out) {
  const PatternSpec spec = pattern_from(a.pattern, a.dictionary);
  const EventLog log = generate_log(spec, GenConfig{a.cases, a.case_length, a.seed});
  write_log(log, a.out);
  auto j = stats_json(stats(log));
  j["pattern"] = spec.name;
  j["seed"] = a.seed;
  j["out"] = a.out;
  out << j.dump() << '\n';
  return 0;
}

struct EvalArgs {
  std::vector<std::string> models;
  std::string config;
  std::vector<std::string> inputs;
  std::string protocol = "prequential";
  std::string interleave = "sequential";
  std::uint64_t seed = 42;
  std::string out;
  std::string csv;
  bool table = false;
};

int cmd_eval(const EvalArgs& a, std::ostream& out) {
  std::vector<ModelSpec> specs;
  for (const auto& m : a.models) specs.push_back(parse_model_spec(m));
  if (!a.config.empty()) {
    std::ifstream f(a.config);
    if (!f) throw UsageError("cannot open config " + a.config);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(f);
    } catch (const nlohmann::json::exception&) {
      throw UsageError("config " + a.config + " is not valid JSON");
    }
    if (j.is_array()) {
      for (const auto& item : j) specs.push_back(model_spec_from_json(item));
    } else {
      specs.push_back(model_spec_from_json(j));
    }
  }
  if (specs.empty()) throw UsageError("eval needs --model or --config");

  std::vector<EvalReport> reports;
  for (const auto& input : a.inputs) {
    const EventLog log = read_log(input);
    for (const auto& spec : specs) {
      reports.push_back(evaluate(spec, log, stem_of(input), a.protocol, a.interleave, a.seed));
    }
  }

  if (!a.out.empty()) {
    nlohmann::json j;
    if (reports.size() == 1) {
      j = to_json(reports.front());
    } else {
      j = nlohmann::json::array();
      for (const auto& r : reports) j.push_back(to_json(r));
    }
    write_text(a.out, j.dump(2) + "\n");
  }
  if (!a.csv.empty()) {
    std::string text = eval_report_csv_header() + "\n";
    for (const auto& r : reports) text += eval_report_csv_row(r) + "\n";
    write_text(a.csv, text);
  }
  if (a.table) {
    out << format_table(reports);
  } else {
    for (const auto& r : reports) out << to_json(r).dump() << '\n';
  }
  return 0;
}

struct SweepArgs {
  std::string models = "ngram";
  std::string windows = "1..8";
  std::string input;
  std::string protocol = "prequential";
  std::uint64_t seed = 42;
  std::string out;
};

int cmd_sweep(const SweepArgs& a, std::ostream& out) {
  const auto [lo, hi] = parse_window_range(a.windows);
  std::vector<std::string> families;
  {
    std::stringstream ss(a.models);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (item != "ngram") throw UsageError("sweep supports the windowed family 'ngram' only");
      families.push_back(item);
    }
  }
  const EventLog log = read_log(a.input);
  const std::string dataset = stem_of(a.input);

  // A window of k symbols is the (k+1)-gram.
  struct Job {
    std::string family;
    std::size_t window;
  };
  std::vector<Job> jobs;
  for (const auto& f : families) {
    for (std::size_t w = lo; w <= hi; ++w) jobs.push_back({f, w});
  }
  std::vector<EvalReport> results(jobs.size());
  std::vector<std::string> errors(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < jobs.size();) {
      try {
        ModelSpec spec;
        spec.kind = ModelSpec::Kind::ngram;
        spec.orders = {static_cast<int>(jobs[i].window + 1)};
        results[i] = evaluate(spec, log, dataset, a.protocol, "sequential", a.seed);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  const std::size_t n_threads = std::min(thread_count(), std::max<std::size_t>(jobs.size(), 1));
  for (std::size_t t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (!e.empty()) throw Error(e);
  }

  std::ostringstream csv;
  csv << "model,window,dataset,accuracy,pred_time_us_avg,train_time_us_avg\n";
  char buf[512];
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const auto& r = results[i];
    std::snprintf(buf, sizeof buf, "%s,%zu,%s,%.4f,%.4f,%.4f\n", jobs[i].family.c_str(),
                  jobs[i].window, dataset.c_str(), r.accuracy, r.pred_time_us_avg,
                  r.train_time_us_avg);
    csv << buf;
  }
  if (a.out.empty()) {
    out << csv.str();
  } else {
    write_text(a.out, csv.str());
  }
  return 0;
}

struct OracleArgs {
  std::string pattern = "aaabbb";
  std::string dictionary;
  std::string windows = "0..8";
  std::string method = "exact";
  std::size_t samples = 400'000;
  std::uint64_t seed = 7;
  std::string out;
};

int cmd_oracle(const OracleArgs& a, std::ostream& out) {
  const PatternSpec spec = pattern_from(a.pattern, a.dictionary);
  const auto [lo, hi] = parse_window_range(a.windows);
  OracleOptions opts;
  try {
    opts.method = parse_oracle_method(a.method);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  opts.sample_budget = a.samples;
  opts.seed = a.seed;
  const AccuracyCurve curve = oracle_curve(spec, hi, opts);

  std::ostringstream csv;
  csv << "pattern,window,best_accuracy\n";
  char buf[128];
  for (std::size_t w = lo; w <= hi; ++w) {
    std::snprintf(buf, sizeof buf, "%s,%zu,%.6f\n", spec.name.c_str(), w, curve.at(w));
    csv << buf;
  }
  if (a.out.empty()) {
    out << csv.str();
  } else {
    write_text(a.out, csv.str());
  }
  return 0;
}

int cmd_stats(const std::vector<std::string>& inputs, std::ostream& out) {
  for (const auto& input : inputs) {
    auto j = stats_json(stats(read_log(input)));
    j["dataset"] = stem_of(input);
    out << j.dump() << '\n';
  }
  return 0;
}

int cmd_split(const std::string& input, const std::string& out_dir, std::ostream& out) {
  const EventLog log = read_log(input);
  const SplitSizes sizes = split_sizes(log.cases.size());
  std::filesystem::create_directories(out_dir);
  const std::string ext = std::filesystem::path(input).extension() == ".jsonl" ? ".jsonl" : ".csv";
  std::size_t begin = 0;
  for (const auto& [part, count] : {std::pair<std::string, std::size_t>{"train", sizes.train},
                                    {"validation", sizes.validation},
                                    {"test", sizes.test}}) {
    EventLog sub;
    sub.alphabet = log.alphabet;
    sub.cases.assign(log.cases.begin() + static_cast<std::ptrdiff_t>(begin),
                     log.cases.begin() + static_cast<std::ptrdiff_t>(begin + count));
    begin += count;
    if (sub.cases.empty()) continue;
    write_log(sub, std::filesystem::path(out_dir) / (part + ext));
  }
  out << nlohmann::json{{"train", sizes.train}, {"validation", sizes.validation},
                        {"test", sizes.test}}
             .dump()
      << '\n';
  return 0;
}

int cmd_table(const std::vector<std::string>& paths, std::ostream& out) {
  std::vector<EvalReport> reports;
  for (const auto& p : paths) {
    std::ifstream f(p);
    if (!f) throw Error("cannot open " + p);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(f);
    } catch (const nlohmann::json::exception&) {
      throw Error("report " + p + " is not valid JSON");
    }
    if (j.is_array()) {
      for (const auto& item : j) reports.push_back(eval_report_from_json(item));
    } else {
      reports.push_back(eval_report_from_json(j));
    }
  }
  out << format_table(reports);
  return 0;
}

std::string one_line(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  while (!s.empty() && s.back() == ' ') s.pop_back();
  return s;
}

}  // namespace

std::pair<std::size_t, std::size_t> parse_window_range(const std::string& text) {
  auto num = [&](const std::string& s) -> std::size_t {
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) {
      throw UsageError("invalid window range '" + text + "' (expected LO..HI)");
    }
    return static_cast<std::size_t>(std::stoull(s));
  };
  const auto dots = text.find("..");
  if (dots == std::string::npos) {
    const auto w = num(text);
    return {w, w};
  }
  const auto lo = num(text.substr(0, dots));
  const auto hi = num(text.substr(dots + 2));
  if (lo > hi) throw UsageError("invalid window range '" + text + "' (LO > HI)");
  return {lo, hi};
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Streaming next-activity prediction with n-gram ensembles", "streampred"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "Write a synthetic pattern log");
  generate->add_option("--pattern", gen.pattern, "aaabbb, aaabb, xxbarx, xaxb or xabxba");
  generate->add_option("--dictionary", gen.dictionary, "Custom dictionary, e.g. AAB,BBA");
  generate->add_option("--cases", gen.cases, "Number of cases")->check(CLI::PositiveNumber);
  generate->add_option("--case-length", gen.case_length, "Activities per case")
      ->check(CLI::PositiveNumber);
  generate->add_option("--seed", gen.seed, "Generator seed");
  generate->add_option("--out", gen.out, "Output .csv or .jsonl")->required();

  EvalArgs ev;
  auto* eval = app.add_subcommand("eval", "Evaluate models on event logs");
  eval->add_option("--model", ev.models, "Model spec, repeatable");
  eval->add_option("--config", ev.config, "JSON model config (object or array)");
  eval->add_option("--input", ev.inputs, "Event log, repeatable")->required();
  eval->add_option("--protocol", ev.protocol, "prequential or split");
  eval->add_option("--interleave", ev.interleave, "sequential, round-robin or random");
  eval->add_option("--seed", ev.seed, "Seed for random interleaving");
  eval->add_option("--out", ev.out, "Write report JSON here");
  eval->add_option("--csv", ev.csv, "Write report CSV rows here");
  eval->add_flag("--table", ev.table, "Print a comparison table");

  SweepArgs sw;
  auto* sweep = app.add_subcommand("sweep", "Accuracy and latency over window sizes");
  sweep->add_option("--models", sw.models, "Windowed model families (ngram)");
  sweep->add_option("--windows", sw.windows, "LO..HI history lengths");
  sweep->add_option("--input", sw.input, "Event log")->required();
  sweep->add_option("--protocol", sw.protocol, "prequential or split");
  sweep->add_option("--seed", sw.seed, "Seed");
  sweep->add_option("--out", sw.out, "Output CSV (stdout if omitted)");

  OracleArgs orc;
  auto* oracle = app.add_subcommand("oracle", "Best achievable accuracy per window size");
  oracle->add_option("--pattern", orc.pattern, "Built-in pattern");
  oracle->add_option("--dictionary", orc.dictionary, "Custom dictionary, e.g. AAB,BBA");
  oracle->add_option("--windows", orc.windows, "LO..HI");
  oracle->add_option("--method", orc.method, "exact or empirical");
  oracle->add_option("--samples", orc.samples, "Empirical sample budget");
  oracle->add_option("--seed", orc.seed, "Empirical sample seed");
  oracle->add_option("--out", orc.out, "Output CSV (stdout if omitted)");

  std::vector<std::string> stat_inputs;
  auto* stat = app.add_subcommand("stats", "Dataset statistics");
  stat->add_option("--input", stat_inputs, "Event log, repeatable")->required();

  std::string split_input, split_dir;
  auto* split = app.add_subcommand("split", "Write the 70/15/15 case split");
  split->add_option("--input", split_input, "Event log")->required();
  split->add_option("--out-dir", split_dir, "Directory for train/validation/test")->required();

  std::vector<std::string> report_paths;
  auto* table = app.add_subcommand("table", "Tabulate EvalReport JSON files");
  table->add_option("--reports", report_paths, "Report files")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << one_line(e.what()) << '\n';
    return 2;
  }

  try {
    if (generate->parsed()) return cmd_generate(gen, out);
    if (eval->parsed()) return cmd_eval(ev, out);
    if (sweep->parsed()) return cmd_sweep(sw, out);
    if (oracle->parsed()) return cmd_oracle(orc, out);
    if (stat->parsed()) return cmd_stats(stat_inputs, out);
    if (split->parsed()) return cmd_split(split_input, split_dir, out);
    if (table->parsed()) return cmd_table(report_paths, out);
  } catch (const UsageError& e) {
    err << "error: " << one_line(e.what()) << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << one_line(e.what()) << '\n';
    return 1;
  }
  return 2;
}

}  // namespace streampred
