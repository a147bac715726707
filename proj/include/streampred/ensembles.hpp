#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "streampred/core.hpp"
#include "streampred/ngram.hpp"
#include "streampred/predictor.hpp"

namespace streampred {

enum class EnsembleKind { soft, adaptive, promotion };

std::string to_string(EnsembleKind kind);

/// Ensemble of n-grams. `orders` lists the n of each base model and must be
/// strictly increasing; it is the model ladder for promotion.
struct EnsembleConfig {
  EnsembleKind kind = EnsembleKind::promotion;
  std::vector<int> orders;
  int tau = 20;
  bool cumulative = false;  // promotion only: never reset c on a failed comparison

  static EnsembleConfig soft_default();       // (3,4,5,6)
  static EnsembleConfig adaptive_default();   // (3,4,5,6)
  static EnsembleConfig promotion_default();  // (3,5,7,9,13,17,25,33), tau 20
};

void validate(const EnsembleConfig& cfg);

/// correct/total since the last reset; 0 when nothing was recorded.
struct RunningAccuracy {
  Count correct = 0;
  Count total = 0;

  void record(bool hit) {
    ++total;
    if (hit) ++correct;
  }
  void reset() { correct = total = 0; }
  [[nodiscard]] double value() const {
    return total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(total);
  }
};

/// Unweighted mean of the member distributions.
PredictionDistribution soft_vote(std::span<const PredictionDistribution> ds);

/// Index of the best running accuracy, lowest index on ties.
std::size_t adaptive_vote_select(std::span<const RunningAccuracy> accs);

/// Bookkeeping of the promotion ladder. `active` is 0-based here.
struct PromotionState {
  std::size_t active = 0;
  std::size_t ladder_size = 1;
  int counter = 0;
  int tau = 20;
  bool cumulative = false;
  std::size_t promotions = 0;
  std::vector<RunningAccuracy> accuracy;

  static PromotionState initial(std::size_t ladder_size, int tau, bool cumulative = false);

  [[nodiscard]] bool has_challenger() const { return active + 1 < ladder_size; }
};

/// Scores the active and challenger predictions against `observed` and
/// advances the promotion counter. The challenger prediction must be present
/// exactly when a challenger exists. Returns true if a promotion happened.
bool promotion_step(PromotionState& st, ActivityId pred_active,
                    std::optional<ActivityId> pred_challenger, ActivityId observed);

/// Common base: owns the member n-grams and times their training.
class NGramEnsemble : public StreamPredictor {
 public:
  [[nodiscard]] const EnsembleConfig& ensemble_config() const { return cfg_; }
  [[nodiscard]] std::vector<double> member_train_ns() const override { return train_ns_; }
  [[nodiscard]] nlohmann::json config() const override;

 protected:
  explicit NGramEnsemble(EnsembleConfig cfg);
  void timed_update(std::size_t member, CaseKey c, ActivityId observed, bool learn);

  EnsembleConfig cfg_;
  std::vector<std::unique_ptr<NGramPredictor>> members_;
  std::vector<double> train_ns_;
};

class SoftVotingEnsemble final : public NGramEnsemble {
 public:
  explicit SoftVotingEnsemble(EnsembleConfig cfg);

  [[nodiscard]] std::string name() const override;
  PredictionDistribution predict(CaseKey c) override;
  void update(CaseKey c, ActivityId observed, bool learn = true) override;

 private:
  std::vector<PredictionDistribution> scratch_;
};

class AdaptiveVotingEnsemble final : public NGramEnsemble {
 public:
  explicit AdaptiveVotingEnsemble(EnsembleConfig cfg);

  [[nodiscard]] std::string name() const override;
  PredictionDistribution predict(CaseKey c) override;
  ActivityId predict_top(CaseKey c) override;
  void update(CaseKey c, ActivityId observed, bool learn = true) override;

  [[nodiscard]] std::span<const RunningAccuracy> accuracies() const { return accs_; }

 private:
  std::vector<RunningAccuracy> accs_;
  std::vector<ActivityId> tops_;
};

/// Two active agents: predicts with M_i while tracking M_{i+1}; promotes
/// after tau confirmations that M_{i+1} is strictly more accurate. Models
/// below the active one are released, models above the challenger are not
/// built until they become the challenger (they start cold).
class PromotionEnsemble final : public NGramEnsemble {
 public:
  explicit PromotionEnsemble(EnsembleConfig cfg);

  [[nodiscard]] std::string name() const override;
  PredictionDistribution predict(CaseKey c) override;
  ActivityId predict_top(CaseKey c) override;
  void update(CaseKey c, ActivityId observed, bool learn = true) override;
  [[nodiscard]] nlohmann::json config() const override;

  [[nodiscard]] const PromotionState& state() const { return state_; }
  [[nodiscard]] int active_order() const { return cfg_.orders[state_.active]; }
  /// Number of base models currently holding memory.
  [[nodiscard]] std::size_t live_models() const;

 private:
  struct Pending {
    bool valid = false;
    CaseKey c = 0;
    ActivityId active = kStop;
    std::optional<ActivityId> challenger;
  };
  void refresh_pending(CaseKey c);
  void activate_challenger();

  PromotionState state_;
  Pending pending_;
};

std::unique_ptr<NGramEnsemble> make_ensemble(const EnsembleConfig& cfg);

}  // namespace streampred
