#include "streampred/models.hpp"

#include <charconv>

#include "streampred/ngram.hpp"

namespace streampred {

namespace {

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? s.npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

int parse_int(std::string_view s, std::string_view what) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw UsageError("invalid " + std::string(what) + " '" + std::string(s) + "'");
  }
  return v;
}

ModelSpec::Kind parse_kind(std::string_view s) {
  if (s == "ngram") return ModelSpec::Kind::ngram;
  if (s == "soft") return ModelSpec::Kind::soft;
  if (s == "adaptive") return ModelSpec::Kind::adaptive;
  if (s == "promotion") return ModelSpec::Kind::promotion;
  throw UsageError("unknown model kind '" + std::string(s) +
                   "' (valid: ngram, soft, adaptive, promotion)");
}

std::string kind_name(ModelSpec::Kind k) {
  switch (k) {
    case ModelSpec::Kind::ngram:
      return "ngram";
    case ModelSpec::Kind::soft:
      return "soft";
    case ModelSpec::Kind::adaptive:
      return "adaptive";
    case ModelSpec::Kind::promotion:
      return "promotion";
  }
  return "?";
}

std::vector<int> default_orders(ModelSpec::Kind k) {
  switch (k) {
    case ModelSpec::Kind::ngram:
      return {5};
    case ModelSpec::Kind::soft:
      return EnsembleConfig::soft_default().orders;
    case ModelSpec::Kind::adaptive:
      return EnsembleConfig::adaptive_default().orders;
    case ModelSpec::Kind::promotion:
      return EnsembleConfig::promotion_default().orders;
  }
  return {};
}

void check(const ModelSpec& spec) {
  if (spec.kind == ModelSpec::Kind::ngram) {
    if (spec.orders.size() != 1 || spec.orders[0] < 1) {
      throw UsageError("ngram takes a single order >= 1");
    }
    return;
  }
  try {
    validate(to_ensemble_config(spec));
  } catch (const UsageError&) {
    throw;
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
}

}  // namespace

ModelSpec parse_model_spec(std::string_view text) {
  const auto parts = split(text, ':');
  ModelSpec spec;
  spec.kind = parse_kind(parts[0]);
  spec.orders = default_orders(spec.kind);
  if (spec.kind == ModelSpec::Kind::ngram && parts.size() != 2) {
    throw UsageError("expected ngram:N");
  }
  for (std::size_t i = 1; i < parts.size(); ++i) {
    const auto part = parts[i];
    if (i == 1 && part.find('=') == std::string_view::npos && part != "cumulative") {
      spec.orders.clear();
      for (auto item : split(part, ',')) spec.orders.push_back(parse_int(item, "n-gram order"));
      continue;
    }
    if (spec.kind != ModelSpec::Kind::promotion) {
      throw UsageError("option '" + std::string(part) + "' only applies to promotion");
    }
    if (part.rfind("tau=", 0) == 0) {
      spec.tau = parse_int(part.substr(4), "tau");
    } else if (part == "cumulative") {
      spec.cumulative = true;
    } else if (part == "consecutive") {
      spec.cumulative = false;
    } else {
      throw UsageError("unknown model option '" + std::string(part) + "'");
    }
  }
  check(spec);
  return spec;
}

std::string to_string(const ModelSpec& spec) {
  std::string out = kind_name(spec.kind) + ":";
  for (std::size_t i = 0; i < spec.orders.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(spec.orders[i]);
  }
  if (spec.kind == ModelSpec::Kind::promotion) {
    out += ":tau=" + std::to_string(spec.tau);
    if (spec.cumulative) out += ":cumulative";
  }
  return out;
}

ModelSpec model_spec_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) {
    throw UsageError("model config needs a string 'kind'");
  }
  ModelSpec spec;
  spec.kind = parse_kind(j["kind"].get<std::string>());
  spec.orders = default_orders(spec.kind);
  try {
    if (j.contains("window_sizes")) spec.orders = j["window_sizes"].get<std::vector<int>>();
    if (j.contains("n")) spec.orders = {j["n"].get<int>()};
    if (j.contains("tau")) spec.tau = j["tau"].get<int>();
    if (j.contains("mode")) {
      const auto mode = j["mode"].get<std::string>();
      if (mode != "consecutive" && mode != "cumulative") {
        throw UsageError("mode must be consecutive or cumulative");
      }
      spec.cumulative = mode == "cumulative";
    }
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("bad model config: ") + e.what());
  }
  check(spec);
  return spec;
}

nlohmann::json to_json(const ModelSpec& spec) {
  nlohmann::json j{{"kind", kind_name(spec.kind)}, {"window_sizes", spec.orders}};
  if (spec.kind == ModelSpec::Kind::promotion) {
    j["tau"] = spec.tau;
    j["mode"] = spec.cumulative ? "cumulative" : "consecutive";
  }
  return j;
}

EnsembleConfig to_ensemble_config(const ModelSpec& spec) {
  EnsembleConfig cfg;
  switch (spec.kind) {
    case ModelSpec::Kind::soft:
      cfg.kind = EnsembleKind::soft;
      break;
    case ModelSpec::Kind::adaptive:
      cfg.kind = EnsembleKind::adaptive;
      break;
    case ModelSpec::Kind::promotion:
      cfg.kind = EnsembleKind::promotion;
      break;
    case ModelSpec::Kind::ngram:
      throw UsageError("ngram is not an ensemble");
  }
  cfg.orders = spec.orders;
  cfg.tau = spec.tau;
  cfg.cumulative = spec.cumulative;
  return cfg;
}

std::unique_ptr<StreamPredictor> make_predictor(const ModelSpec& spec) {
  if (spec.kind == ModelSpec::Kind::ngram) return std::make_unique<NGramPredictor>(spec.orders.at(0));
  return make_ensemble(to_ensemble_config(spec));
}

}  // namespace streampred
