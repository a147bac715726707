#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "json.hpp"

#include "streampred/core.hpp"
#include "streampred/predictor.hpp"

namespace streampred {

using History = std::vector<ActivityId>;

/// Last min(|w|, n-1) activities of w.
History history_of(std::span<const ActivityId> w, int n);

/// Frequency table of next activities observed at one history.
class Counter {
 public:
  void add(ActivityId a, Count k = 1);
  [[nodiscard]] Count get(ActivityId a) const;
  [[nodiscard]] Count total() const { return total_; }
  /// Highest count, lowest id on ties. Requires total() > 0.
  [[nodiscard]] ActivityId top() const;
  [[nodiscard]] PredictionDistribution distribution() const;
  /// Entries sorted by id.
  [[nodiscard]] std::vector<std::pair<ActivityId, Count>> sorted() const;

 private:
  std::vector<std::pair<ActivityId, Count>> entries_;
  Count total_ = 0;
};

struct HistoryHash {
  std::size_t operator()(const History& h) const noexcept;
};

/// n-gram predictor stored as a PDFA: one state per observed history of
/// length <= n-1, with cached activity transitions between states.
///
/// Besides the exact history states, the model keeps backoff tables: the
/// table for suffix s counts every observation whose history ends with s.
/// They are only consulted when a history has never been trained.
class NGramModel {
 public:
  using StateId = std::uint32_t;
  static constexpr StateId kNone = std::numeric_limits<StateId>::max();

  /// Per-case position in the automaton.
  struct Cursor {
    History history;  // suffix of the case so far, length <= n-1
    StateId state = kNone;
  };

  explicit NGramModel(int n);

  [[nodiscard]] int order() const { return n_; }
  [[nodiscard]] std::size_t history_length() const { return static_cast<std::size_t>(n_ - 1); }

  [[nodiscard]] Cursor start() const;

  /// Counts `next` at the cursor's history (and its backoff suffixes), then
  /// advances the cursor. A stop resets the cursor to the empty history.
  void train(Cursor& cursor, ActivityId next);

  /// Advances the cursor without touching any counter.
  void advance(Cursor& cursor, ActivityId next) const;

  /// Offline route: trains a complete trace position by position from
  /// explicit histories, without cursors.
  void train_trace(std::span<const ActivityId> events);

  /// Distribution at the longest observed suffix of the cursor's history;
  /// {stop: 1} when nothing at all has been observed.
  [[nodiscard]] PredictionDistribution predict(const Cursor& cursor) const;
  [[nodiscard]] ActivityId predict_top(const Cursor& cursor) const;

  /// Exact-history state counters, nullptr if the history was never trained.
  [[nodiscard]] const Counter* state_counts(std::span<const ActivityId> history) const;
  [[nodiscard]] const Counter* backoff_counts(std::span<const ActivityId> suffix) const;

  [[nodiscard]] std::size_t state_count() const { return states_.size(); }
  [[nodiscard]] std::size_t backoff_count() const { return backoff_.size(); }

  /// Debug dump: histories and counters in sorted order. Names come from
  /// `alphabet` when given, otherwise ids are printed.
  [[nodiscard]] nlohmann::json snapshot(const Alphabet* alphabet = nullptr) const;

 private:
  struct State {
    Counter counts;
    StateId backoff = kNone;  // longest backoff suffix node
    std::vector<std::pair<ActivityId, StateId>> next;
  };
  struct BackoffNode {
    Counter counts;
    StateId parent = kNone;
  };

  StateId find_state(std::span<const ActivityId> history) const;
  StateId ensure_state(std::span<const ActivityId> history);
  StateId ensure_backoff(std::span<const ActivityId> suffix);
  void count_at(StateId state, ActivityId next);
  const Counter* lookup_counts(const Cursor& cursor) const;
  void shift(History& history, ActivityId next) const;

  int n_;
  std::vector<State> states_;
  std::unordered_map<History, StateId, HistoryHash> state_index_;
  std::vector<BackoffNode> backoff_;
  std::unordered_map<History, StateId, HistoryHash> backoff_index_;
};

/// StreamPredictor over a single n-gram with one cursor per open case.
class NGramPredictor final : public StreamPredictor {
 public:
  explicit NGramPredictor(int n) : model_(n) {}

  [[nodiscard]] std::string name() const override;
  PredictionDistribution predict(CaseKey c) override;
  ActivityId predict_top(CaseKey c) override;
  void update(CaseKey c, ActivityId observed, bool learn = true) override;
  [[nodiscard]] nlohmann::json config() const override;

  [[nodiscard]] const NGramModel& model() const { return model_; }

  /// Drops every open cursor (cases continue from the empty history).
  void forget_cursors() { cursors_.clear(); }

 private:
  const NGramModel::Cursor& cursor_for(CaseKey c);

  NGramModel model_;
  NGramModel::Cursor empty_;
  std::unordered_map<CaseKey, NGramModel::Cursor> cursors_;
};

}  // namespace streampred
