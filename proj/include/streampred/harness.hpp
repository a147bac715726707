#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "streampred/core.hpp"
#include "streampred/predictor.hpp"

namespace streampred {

/// Outcome of evaluating one model on one dataset. Latencies are per event
/// in microseconds; accuracy is a percentage.
struct EvalReport {
  std::string model_name;
  std::string dataset_name;
  std::string protocol = "prequential";
  std::uint64_t n_events = 0;
  std::uint64_t n_correct = 0;
  double accuracy = 0.0;
  double pred_time_us_avg = 0.0;
  double pred_time_us_median = 0.0;
  double pred_time_us_p99 = 0.0;
  double train_time_us_avg = 0.0;
  double train_time_us_median = 0.0;
  double train_time_us_p99 = 0.0;
  std::vector<double> member_train_time_us_avg;  // ensembles: per base model
  nlohmann::json config = nlohmann::json::object();
};

nlohmann::json to_json(const EvalReport& r);
/// Parses the shared report schema (also written by external baselines).
EvalReport eval_report_from_json(const nlohmann::json& j);

std::string eval_report_csv_header();
std::string eval_report_csv_row(const EvalReport& r);

/// Fixed-width comparison table, one row per report, one column per dataset.
std::string format_table(std::span<const EvalReport> reports);

// --- streams ---------------------------------------------------------------

/// Cases one after another, in log order.
std::vector<EventRecord> sequential_stream(const EventLog& log);

/// One event per open case in turn.
std::vector<EventRecord> round_robin_stream(const EventLog& log);

/// Seeded random interleaving; each step draws the next case uniformly among
/// cases with remaining events. Per-case order is preserved.
std::vector<EventRecord> interleave(const EventLog& log, std::uint64_t seed);

// --- evaluation ------------------------------------------------------------

struct PrequentialOptions {
  bool learn = true;  // false: score a frozen model, cursors still advance
  bool timing = true;
};

/// Test-then-train over the stream: predict, score, train, advance.
/// Every event (including the first of a case and the stop) is scored once.
EvalReport run_prequential(StreamPredictor& model, std::span<const EventRecord> stream,
                           const PrequentialOptions& opts = {});

struct SplitSizes {
  std::size_t train = 0;
  std::size_t validation = 0;
  std::size_t test = 0;
};

/// 70/15/15 split by whole cases in log order (train gets floor(0.70 n),
/// validation floor(0.15 n), test the rest). Requires at least 3 cases.
SplitSizes split_sizes(std::size_t n_cases);

/// Trains on the training cases, then scores the test cases without
/// further training. Validation cases are left out.
EvalReport run_split(StreamPredictor& model, const EventLog& log);

}  // namespace streampred
