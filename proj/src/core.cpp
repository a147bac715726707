#include "streampred/core.hpp"

#include <algorithm>
#include <cmath>

namespace streampred {

Alphabet::Alphabet() {
  names_.emplace_back(kStopToken);
  index_.emplace(std::string(kStopToken), kStop);
}

ActivityId Alphabet::intern(std::string_view symbol) {
  if (symbol == kStopToken) {
    throw Error("reserved activity name " + std::string(kStopToken));
  }
  const std::string key(symbol);
  if (auto it = index_.find(key); it != index_.end()) return it->second;
  const auto id = static_cast<ActivityId>(names_.size());
  names_.push_back(key);
  index_.emplace(key, id);
  return id;
}

bool Alphabet::contains(std::string_view symbol) const {
  return index_.count(std::string(symbol)) != 0;
}

ActivityId Alphabet::id_of(std::string_view symbol) const {
  auto it = index_.find(std::string(symbol));
  if (it == index_.end()) throw Error("unknown activity " + std::string(symbol));
  return it->second;
}

const std::string& Alphabet::name(ActivityId id) const {
  if (id >= names_.size()) throw Error("activity id out of range");
  return names_[id];
}

void check_trace(const CaseTrace& trace) {
  if (trace.events.empty()) throw Error("empty trace " + trace.case_id);
  if (trace.events.back() != kStop) throw Error("trace without stop " + trace.case_id);
  const auto interior = std::span(trace.events).first(trace.events.size() - 1);
  if (std::find(interior.begin(), interior.end(), kStop) != interior.end()) {
    throw Error("activity after stop in " + trace.case_id);
  }
}

ActivityId argmax_activity(const PredictionDistribution& d) {
  if (d.probs.empty()) throw Error("empty distribution");
  ActivityId best = 0;
  for (ActivityId i = 1; i < d.probs.size(); ++i) {
    if (d.probs[i] > d.probs[best]) best = i;
  }
  return best;
}

PredictionDistribution normalize(std::span<const Count> counts) {
  Count total = 0;
  for (Count c : counts) total += c;
  if (total == 0) throw Error("no observations");
  PredictionDistribution d;
  d.probs.resize(counts.size());
  const auto denom = static_cast<double>(total);
  for (std::size_t i = 0; i < counts.size(); ++i) {
    d.probs[i] = static_cast<double>(counts[i]) / denom;
  }
  return d;
}

PredictionDistribution normalize(std::span<const std::pair<ActivityId, Count>> counts) {
  ActivityId extent = 0;
  for (const auto& [id, c] : counts) extent = std::max(extent, id + 1);
  std::vector<Count> dense(extent, 0);
  for (const auto& [id, c] : counts) dense[id] += c;
  return normalize(std::span<const Count>(dense));
}

bool is_valid_distribution(const PredictionDistribution& d, double tol) {
  if (d.probs.empty()) return false;
  double sum = 0.0;
  for (double p : d.probs) {
    if (!(p >= 0.0 && p <= 1.0)) return false;
    sum += p;
  }
  return std::abs(sum - 1.0) <= tol;
}

}  // namespace streampred
