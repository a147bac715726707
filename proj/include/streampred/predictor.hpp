#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "streampred/core.hpp"

namespace streampred {

/// Dense per-stream case handle (EventRecord::case_index).
using CaseKey = std::uint32_t;

/// A next-activity model driven event by event. Each case has its own
/// cursor inside the model; the trained core is shared across cases.
///
/// Per event the harness calls predict (or predict_top) for the case, then
/// update with the observed activity. A stop closes the case's cursor.
class StreamPredictor {
 public:
  virtual ~StreamPredictor() = default;

  [[nodiscard]] virtual std::string name() const = 0;

  virtual PredictionDistribution predict(CaseKey c) = 0;

  /// Top-1 prediction. Implementations may skip building the distribution.
  virtual ActivityId predict_top(CaseKey c) { return argmax_activity(predict(c)); }

  /// Consumes `observed` for case `c`. With learn=false only the case
  /// cursor advances; counters and ensemble bookkeeping stay frozen.
  virtual void update(CaseKey c, ActivityId observed, bool learn = true) = 0;

  [[nodiscard]] virtual nlohmann::json config() const = 0;

  /// Accumulated training time per base model in nanoseconds (empty for
  /// single models).
  [[nodiscard]] virtual std::vector<double> member_train_ns() const { return {}; }
};

}  // namespace streampred
