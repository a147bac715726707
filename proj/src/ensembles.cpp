#include "streampred/ensembles.hpp"

#include <algorithm>
#include <chrono>

namespace streampred {

std::string to_string(EnsembleKind kind) {
  switch (kind) {
    case EnsembleKind::soft:
      return "soft";
    case EnsembleKind::adaptive:
      return "adaptive";
    case EnsembleKind::promotion:
      return "promotion";
  }
  return "unknown";
}

EnsembleConfig EnsembleConfig::soft_default() {
  return {EnsembleKind::soft, {3, 4, 5, 6}, 20, false};
}

EnsembleConfig EnsembleConfig::adaptive_default() {
  return {EnsembleKind::adaptive, {3, 4, 5, 6}, 20, false};
}

EnsembleConfig EnsembleConfig::promotion_default() {
  return {EnsembleKind::promotion, {3, 5, 7, 9, 13, 17, 25, 33}, 20, false};
}

void validate(const EnsembleConfig& cfg) {
  if (cfg.orders.empty()) throw Error("ensemble needs at least one model");
  for (std::size_t i = 0; i < cfg.orders.size(); ++i) {
    if (cfg.orders[i] < 1) throw Error("n-gram order must be >= 1");
    if (i > 0 && cfg.orders[i] <= cfg.orders[i - 1]) {
      throw Error("ensemble orders must be strictly increasing");
    }
  }
  if (cfg.tau < 1) throw Error("tau must be >= 1");
}

PredictionDistribution soft_vote(std::span<const PredictionDistribution> ds) {
  if (ds.empty()) throw Error("soft vote over no distributions");
  std::size_t extent = 0;
  for (const auto& d : ds) extent = std::max(extent, d.probs.size());
  PredictionDistribution out;
  out.probs.assign(extent, 0.0);
  for (const auto& d : ds) {
    for (std::size_t i = 0; i < d.probs.size(); ++i) out.probs[i] += d.probs[i];
  }
  const auto k = static_cast<double>(ds.size());
  for (double& p : out.probs) p /= k;
  return out;
}

std::size_t adaptive_vote_select(std::span<const RunningAccuracy> accs) {
  if (accs.empty()) throw Error("adaptive vote over no models");
  std::size_t best = 0;
  for (std::size_t i = 1; i < accs.size(); ++i) {
    if (accs[i].value() > accs[best].value()) best = i;
  }
  return best;
}

PromotionState PromotionState::initial(std::size_t ladder_size, int tau, bool cumulative) {
  if (ladder_size == 0) throw Error("promotion ladder is empty");
  if (tau < 1) throw Error("tau must be >= 1");
  PromotionState st;
  st.ladder_size = ladder_size;
  st.tau = tau;
  st.cumulative = cumulative;
  st.accuracy.resize(ladder_size);
  return st;
}

bool promotion_step(PromotionState& st, ActivityId pred_active,
                    std::optional<ActivityId> pred_challenger, ActivityId observed) {
  if (pred_challenger.has_value() != st.has_challenger()) {
    throw Error("challenger prediction must be given iff a challenger exists");
  }
  st.accuracy[st.active].record(pred_active == observed);
  if (!st.has_challenger()) return false;

  auto& challenger = st.accuracy[st.active + 1];
  challenger.record(*pred_challenger == observed);
  if (challenger.value() > st.accuracy[st.active].value()) {
    ++st.counter;
    if (st.counter >= st.tau) {
      ++st.active;
      ++st.promotions;
      st.counter = 0;
      st.accuracy[st.active].reset();
      return true;
    }
  } else if (!st.cumulative) {
    st.counter = 0;
  }
  return false;
}

// ---------------------------------------------------------------------------

NGramEnsemble::NGramEnsemble(EnsembleConfig cfg) : cfg_(std::move(cfg)) {
  validate(cfg_);
  members_.resize(cfg_.orders.size());
  train_ns_.assign(cfg_.orders.size(), 0.0);
}

void NGramEnsemble::timed_update(std::size_t member, CaseKey c, ActivityId observed, bool learn) {
  const auto t0 = std::chrono::steady_clock::now();
  members_[member]->update(c, observed, learn);
  const auto t1 = std::chrono::steady_clock::now();
  train_ns_[member] += std::chrono::duration<double, std::nano>(t1 - t0).count();
}

nlohmann::json NGramEnsemble::config() const {
  return {{"kind", to_string(cfg_.kind)}, {"orders", cfg_.orders}};
}

namespace {

std::string ladder_name(std::string_view label, const std::vector<int>& orders) {
  std::string out(label);
  out += " (";
  for (std::size_t i = 0; i < orders.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(orders[i]);
  }
  return out + ")";
}

}  // namespace

// --- soft voting -----------------------------------------------------------

SoftVotingEnsemble::SoftVotingEnsemble(EnsembleConfig cfg) : NGramEnsemble(std::move(cfg)) {
  for (std::size_t i = 0; i < members_.size(); ++i) {
    members_[i] = std::make_unique<NGramPredictor>(cfg_.orders[i]);
  }
  scratch_.resize(members_.size());
}

std::string SoftVotingEnsemble::name() const { return ladder_name("Soft voting", cfg_.orders); }

PredictionDistribution SoftVotingEnsemble::predict(CaseKey c) {
  for (std::size_t i = 0; i < members_.size(); ++i) scratch_[i] = members_[i]->predict(c);
  return soft_vote(scratch_);
}

void SoftVotingEnsemble::update(CaseKey c, ActivityId observed, bool learn) {
  for (std::size_t i = 0; i < members_.size(); ++i) timed_update(i, c, observed, learn);
}

// --- adaptive voting -------------------------------------------------------

AdaptiveVotingEnsemble::AdaptiveVotingEnsemble(EnsembleConfig cfg)
    : NGramEnsemble(std::move(cfg)) {
  for (std::size_t i = 0; i < members_.size(); ++i) {
    members_[i] = std::make_unique<NGramPredictor>(cfg_.orders[i]);
  }
  accs_.resize(members_.size());
  tops_.resize(members_.size());
}

std::string AdaptiveVotingEnsemble::name() const {
  return ladder_name("Adaptive voting", cfg_.orders);
}

PredictionDistribution AdaptiveVotingEnsemble::predict(CaseKey c) {
  return members_[adaptive_vote_select(accs_)]->predict(c);
}

ActivityId AdaptiveVotingEnsemble::predict_top(CaseKey c) {
  return members_[adaptive_vote_select(accs_)]->predict_top(c);
}

void AdaptiveVotingEnsemble::update(CaseKey c, ActivityId observed, bool learn) {
  if (learn) {
    for (std::size_t i = 0; i < members_.size(); ++i) tops_[i] = members_[i]->predict_top(c);
    for (std::size_t i = 0; i < members_.size(); ++i) accs_[i].record(tops_[i] == observed);
  }
  for (std::size_t i = 0; i < members_.size(); ++i) timed_update(i, c, observed, learn);
}

// --- promotion -------------------------------------------------------------

PromotionEnsemble::PromotionEnsemble(EnsembleConfig cfg)
    : NGramEnsemble(std::move(cfg)),
      state_(PromotionState::initial(cfg_.orders.size(), cfg_.tau, cfg_.cumulative)) {
  members_[0] = std::make_unique<NGramPredictor>(cfg_.orders[0]);
  activate_challenger();
}

void PromotionEnsemble::activate_challenger() {
  const std::size_t next = state_.active + 1;
  if (next < members_.size() && !members_[next]) {
    members_[next] = std::make_unique<NGramPredictor>(cfg_.orders[next]);
  }
}

std::string PromotionEnsemble::name() const { return ladder_name("Promotion", cfg_.orders); }

std::size_t PromotionEnsemble::live_models() const {
  return static_cast<std::size_t>(
      std::count_if(members_.begin(), members_.end(), [](const auto& m) { return m != nullptr; }));
}

void PromotionEnsemble::refresh_pending(CaseKey c) {
  pending_.valid = true;
  pending_.c = c;
  pending_.active = members_[state_.active]->predict_top(c);
  pending_.challenger.reset();
  if (state_.has_challenger()) pending_.challenger = members_[state_.active + 1]->predict_top(c);
}

PredictionDistribution PromotionEnsemble::predict(CaseKey c) {
  refresh_pending(c);
  return members_[state_.active]->predict(c);
}

ActivityId PromotionEnsemble::predict_top(CaseKey c) {
  refresh_pending(c);
  return pending_.active;
}

void PromotionEnsemble::update(CaseKey c, ActivityId observed, bool learn) {
  const std::size_t i = state_.active;
  if (!learn) {
    members_[i]->update(c, observed, false);
    if (state_.has_challenger()) members_[i + 1]->update(c, observed, false);
    pending_.valid = false;
    return;
  }
  if (!pending_.valid || pending_.c != c) refresh_pending(c);
  pending_.valid = false;

  timed_update(i, c, observed, true);
  if (state_.has_challenger()) timed_update(i + 1, c, observed, true);

  if (promotion_step(state_, pending_.active, pending_.challenger, observed)) {
    members_[i].reset();
    activate_challenger();
  }
}

nlohmann::json PromotionEnsemble::config() const {
  auto j = NGramEnsemble::config();
  j["tau"] = cfg_.tau;
  j["mode"] = cfg_.cumulative ? "cumulative" : "consecutive";
  j["active_order"] = active_order();
  j["promotions"] = state_.promotions;
  return j;
}

std::unique_ptr<NGramEnsemble> make_ensemble(const EnsembleConfig& cfg) {
  switch (cfg.kind) {
    case EnsembleKind::soft:
      return std::make_unique<SoftVotingEnsemble>(cfg);
    case EnsembleKind::adaptive:
      return std::make_unique<AdaptiveVotingEnsemble>(cfg);
    case EnsembleKind::promotion:
      return std::make_unique<PromotionEnsemble>(cfg);
  }
  throw Error("unknown ensemble kind");
}

}  // namespace streampred
