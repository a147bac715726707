#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "streampred/core.hpp"
#include "streampred/ensembles.hpp"
#include "streampred/predictor.hpp"

namespace streampred {

/// Bad command-line or config input (CLI exit code 2).
class UsageError : public Error {
 public:
  using Error::Error;
};

/// A model description as written on the command line:
///
///   ngram:N
///   soft:3,4,5,6
///   adaptive:3,4,5,6
///   promotion:3,5,7,9,13,17,25,33:tau=20[:cumulative]
///
/// Numbers are n-gram orders. Ensemble kinds without a list use the defaults.
struct ModelSpec {
  enum class Kind { ngram, soft, adaptive, promotion };

  Kind kind = Kind::ngram;
  std::vector<int> orders{5};
  int tau = 20;
  bool cumulative = false;

  friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

ModelSpec parse_model_spec(std::string_view text);
std::string to_string(const ModelSpec& spec);

/// Config file form: {"kind": "promotion", "window_sizes": [3,5,...],
/// "tau": 20, "mode": "consecutive"}. `window_sizes` lists n-gram orders;
/// "ngram" takes a single entry (or "n").
ModelSpec model_spec_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ModelSpec& spec);

EnsembleConfig to_ensemble_config(const ModelSpec& spec);

std::unique_ptr<StreamPredictor> make_predictor(const ModelSpec& spec);

}  // namespace streampred
