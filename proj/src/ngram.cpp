#include "streampred/ngram.hpp"

#include <algorithm>

namespace streampred {

History history_of(std::span<const ActivityId> w, int n) {
  if (n < 1) throw Error("n-gram order must be >= 1");
  const auto keep = std::min(w.size(), static_cast<std::size_t>(n - 1));
  return History(w.end() - static_cast<std::ptrdiff_t>(keep), w.end());
}

// ---------------------------------------------------------------------------
// Counter

void Counter::add(ActivityId a, Count k) {
  total_ += k;
  for (auto& [id, c] : entries_) {
    if (id == a) {
      c += k;
      return;
    }
  }
  entries_.emplace_back(a, k);
}

Count Counter::get(ActivityId a) const {
  for (const auto& [id, c] : entries_) {
    if (id == a) return c;
  }
  return 0;
}

ActivityId Counter::top() const {
  ActivityId best = kStop;
  Count best_count = 0;
  for (const auto& [id, c] : entries_) {
    if (c > best_count || (c == best_count && id < best)) {
      best = id;
      best_count = c;
    }
  }
  return best;
}

PredictionDistribution Counter::distribution() const { return normalize(std::span(entries_)); }

std::vector<std::pair<ActivityId, Count>> Counter::sorted() const {
  auto out = entries_;
  std::sort(out.begin(), out.end());
  return out;
}

std::size_t HistoryHash::operator()(const History& h) const noexcept {
  std::uint64_t x = 0xcbf29ce484222325ULL ^ h.size();
  for (ActivityId a : h) {
    x ^= a;
    x *= 0x100000001b3ULL;
  }
  return static_cast<std::size_t>(x ^ (x >> 29));
}

// ---------------------------------------------------------------------------
// NGramModel

NGramModel::NGramModel(int n) : n_(n) {
  if (n < 1) throw Error("n-gram order must be >= 1");
}

NGramModel::Cursor NGramModel::start() const {
  return Cursor{{}, find_state({})};
}

NGramModel::StateId NGramModel::find_state(std::span<const ActivityId> history) const {
  auto it = state_index_.find(History(history.begin(), history.end()));
  return it == state_index_.end() ? kNone : it->second;
}

NGramModel::StateId NGramModel::ensure_backoff(std::span<const ActivityId> suffix) {
  History key(suffix.begin(), suffix.end());
  if (auto it = backoff_index_.find(key); it != backoff_index_.end()) return it->second;
  const StateId parent = suffix.empty() ? kNone : ensure_backoff(suffix.subspan(1));
  const auto id = static_cast<StateId>(backoff_.size());
  backoff_.push_back(BackoffNode{{}, parent});
  backoff_index_.emplace(std::move(key), id);
  return id;
}

NGramModel::StateId NGramModel::ensure_state(std::span<const ActivityId> history) {
  History key(history.begin(), history.end());
  if (auto it = state_index_.find(key); it != state_index_.end()) return it->second;
  StateId backoff = kNone;
  if (n_ >= 2) {
    const auto len = std::min(history.size(), static_cast<std::size_t>(n_ - 2));
    backoff = ensure_backoff(history.last(len));
  }
  const auto id = static_cast<StateId>(states_.size());
  states_.push_back(State{{}, backoff, {}});
  state_index_.emplace(std::move(key), id);
  return id;
}

void NGramModel::count_at(StateId state, ActivityId next) {
  states_[state].counts.add(next);
  for (StateId b = states_[state].backoff; b != kNone; b = backoff_[b].parent) {
    backoff_[b].counts.add(next);
  }
}

void NGramModel::shift(History& history, ActivityId next) const {
  if (next == kStop) {
    history.clear();
    return;
  }
  if (n_ == 1) return;
  if (history.size() == history_length()) history.erase(history.begin());
  history.push_back(next);
}

void NGramModel::train(Cursor& cursor, ActivityId next) {
  if (cursor.state == kNone) cursor.state = ensure_state(cursor.history);
  const StateId from = cursor.state;
  count_at(from, next);

  shift(cursor.history, next);
  for (const auto& [a, to] : states_[from].next) {
    if (a == next) {
      cursor.state = to;
      return;
    }
  }
  cursor.state = find_state(cursor.history);
  if (cursor.state != kNone) states_[from].next.emplace_back(next, cursor.state);
}

void NGramModel::advance(Cursor& cursor, ActivityId next) const {
  const StateId from = cursor.state;
  shift(cursor.history, next);
  if (from != kNone) {
    for (const auto& [a, to] : states_[from].next) {
      if (a == next) {
        cursor.state = to;
        return;
      }
    }
  }
  cursor.state = find_state(cursor.history);
}

void NGramModel::train_trace(std::span<const ActivityId> events) {
  std::size_t begin = 0;  // histories never span a stop
  for (std::size_t i = 0; i < events.size(); ++i) {
    const History h = history_of(events.subspan(begin, i - begin), n_);
    count_at(ensure_state(h), events[i]);
    if (events[i] == kStop) begin = i + 1;
  }
}

const Counter* NGramModel::lookup_counts(const Cursor& cursor) const {
  StateId s = cursor.state;
  if (s == kNone) s = find_state(cursor.history);
  if (s != kNone) return &states_[s].counts;
  if (n_ < 2) return nullptr;

  const std::span<const ActivityId> h(cursor.history);
  const auto longest = std::min(h.size(), static_cast<std::size_t>(n_ - 2));
  for (std::size_t k = longest + 1; k-- > 0;) {
    if (const Counter* c = backoff_counts(h.last(k))) return c;
  }
  return nullptr;
}

PredictionDistribution NGramModel::predict(const Cursor& cursor) const {
  if (const Counter* c = lookup_counts(cursor); c && c->total() > 0) return c->distribution();
  return PredictionDistribution{{1.0}};
}

ActivityId NGramModel::predict_top(const Cursor& cursor) const {
  if (const Counter* c = lookup_counts(cursor); c && c->total() > 0) return c->top();
  return kStop;
}

const Counter* NGramModel::state_counts(std::span<const ActivityId> history) const {
  const StateId s = find_state(history);
  return s == kNone ? nullptr : &states_[s].counts;
}

const Counter* NGramModel::backoff_counts(std::span<const ActivityId> suffix) const {
  auto it = backoff_index_.find(History(suffix.begin(), suffix.end()));
  return it == backoff_index_.end() ? nullptr : &backoff_[it->second].counts;
}

namespace {

nlohmann::json dump_table(const std::unordered_map<History, NGramModel::StateId, HistoryHash>& index,
                          const auto& nodes, const Alphabet* alphabet) {
  auto label = [&](ActivityId a) {
    return alphabet && a < alphabet->size() ? alphabet->name(a) : std::to_string(a);
  };
  std::vector<std::pair<History, NGramModel::StateId>> rows(index.begin(), index.end());
  std::sort(rows.begin(), rows.end());
  auto out = nlohmann::json::array();
  for (const auto& [h, id] : rows) {
    auto hist = nlohmann::json::array();
    for (ActivityId a : h) hist.push_back(label(a));
    auto counts = nlohmann::json::array();
    for (const auto& [a, c] : nodes[id].counts.sorted()) counts.push_back({label(a), c});
    out.push_back({{"history", std::move(hist)}, {"counts", std::move(counts)}});
  }
  return out;
}

}  // namespace

nlohmann::json NGramModel::snapshot(const Alphabet* alphabet) const {
  return {{"n", n_},
          {"states", dump_table(state_index_, states_, alphabet)},
          {"backoff", dump_table(backoff_index_, backoff_, alphabet)}};
}

// ---------------------------------------------------------------------------
// NGramPredictor

std::string NGramPredictor::name() const { return std::to_string(model_.order()) + "-gram"; }

const NGramModel::Cursor& NGramPredictor::cursor_for(CaseKey c) {
  if (auto it = cursors_.find(c); it != cursors_.end()) return it->second;
  empty_ = model_.start();
  return empty_;
}

PredictionDistribution NGramPredictor::predict(CaseKey c) { return model_.predict(cursor_for(c)); }

ActivityId NGramPredictor::predict_top(CaseKey c) { return model_.predict_top(cursor_for(c)); }

void NGramPredictor::update(CaseKey c, ActivityId observed, bool learn) {
  if (observed == kStop) {
    if (learn) {
      auto it = cursors_.find(c);
      NGramModel::Cursor cur = it != cursors_.end() ? std::move(it->second) : model_.start();
      model_.train(cur, observed);
    }
    cursors_.erase(c);
    return;
  }
  auto [it, inserted] = cursors_.try_emplace(c);
  if (inserted) it->second = model_.start();
  if (learn) {
    model_.train(it->second, observed);
  } else {
    model_.advance(it->second, observed);
  }
}

nlohmann::json NGramPredictor::config() const {
  return {{"kind", "ngram"}, {"n", model_.order()}};
}

}  // namespace streampred
