#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace streampred {

/// Raised for every recoverable failure in the library (bad input, violated
/// preconditions). The message is a short machine-parsable phrase.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Dense activity identifier. Ids are assigned in first-seen order by an
/// Alphabet, so comparing ids compares insertion order.
using ActivityId = std::uint32_t;
using Count = std::uint64_t;

/// The stop symbol always occupies slot 0 of every alphabet.
inline constexpr ActivityId kStop = 0;
inline constexpr std::string_view kStopToken = "__STOP__";

/// Append-only interning table for activity names (Σ plus stop).
class Alphabet {
 public:
  Alphabet();

  /// Returns the id of `symbol`, inserting it if unseen. The reserved stop
  /// token is rejected: stops are structural, never data.
  ActivityId intern(std::string_view symbol);

  /// Id lookup without insertion.
  [[nodiscard]] bool contains(std::string_view symbol) const;
  [[nodiscard]] ActivityId id_of(std::string_view symbol) const;

  [[nodiscard]] const std::string& name(ActivityId id) const;
  [[nodiscard]] bool is_stop(ActivityId id) const { return id == kStop; }

  /// Number of symbols including stop.
  [[nodiscard]] std::size_t size() const { return names_.size(); }

  [[nodiscard]] const std::vector<std::string>& names() const { return names_; }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, ActivityId> index_;
};

/// One completed case: activities in order, terminated by exactly one stop.
struct CaseTrace {
  std::string case_id;
  std::vector<ActivityId> events;

  /// Non-stop activities (events minus the final stop).
  [[nodiscard]] std::size_t length() const { return events.empty() ? 0 : events.size() - 1; }

  friend bool operator==(const CaseTrace&, const CaseTrace&) = default;
};

/// Throws unless the trace is nonempty, ends with stop and has no interior stop.
void check_trace(const CaseTrace& trace);

/// A collection of case traces together with the alphabet their ids refer to.
struct EventLog {
  Alphabet alphabet;
  std::vector<CaseTrace> cases;
};

/// One element of an event stream.
struct EventRecord {
  std::uint32_t case_index = 0;  // index into EventLog::cases
  ActivityId activity = kStop;
  std::uint64_t seq_no = 0;

  friend bool operator==(const EventRecord&, const EventRecord&) = default;
};

/// Probability distribution over Σ_stop, dense by ActivityId. Ids beyond
/// probs.size() carry probability zero.
struct PredictionDistribution {
  std::vector<double> probs;

  [[nodiscard]] double operator[](ActivityId id) const {
    return id < probs.size() ? probs[id] : 0.0;
  }
  [[nodiscard]] bool empty() const { return probs.empty(); }

  friend bool operator==(const PredictionDistribution&, const PredictionDistribution&) = default;
};

/// Most likely activity; ties go to the lowest id (earliest inserted).
ActivityId argmax_activity(const PredictionDistribution& d);

/// Relative frequencies from dense counts indexed by ActivityId.
PredictionDistribution normalize(std::span<const Count> counts);

/// Relative frequencies from sparse (id, count) pairs.
PredictionDistribution normalize(std::span<const std::pair<ActivityId, Count>> counts);

/// True when all probabilities lie in [0,1] and sum to 1 within `tol`.
bool is_valid_distribution(const PredictionDistribution& d, double tol = 1e-9);

}  // namespace streampred
