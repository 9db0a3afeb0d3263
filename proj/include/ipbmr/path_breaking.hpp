#pragma once

#include <cstdint>
#include <cstdlib>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "ipbmr/budget.hpp"
#include "ipbmr/rng.hpp"
#include "ipbmr/score_state.hpp"

namespace ipbmr {

struct PBParams {
  unsigned alpha = 3;
  double greedy_prob = 0.2;  // probability of the argmax pick when a positive-score candidate exists
  bool no_random = false;    // always flip the best-scoring candidate
  bool no_break = false;     // walk the whole way to the inverse solution

  void validate() const {
    if (alpha < 1) throw std::invalid_argument("alpha must be >= 1");
    if (!(greedy_prob >= 0.0 && greedy_prob <= 1.0)) throw std::invalid_argument("greedy probability must be in [0, 1]");
  }
};

struct ScoredVar {
  Var var = 0;
  std::int64_t score = 0;
};

struct TrajectoryStep {
  std::size_t step = 0;
  std::int64_t max_score = 0;  // over the candidates, before the flip
  Var picked = 0;
  Cost cost;  // after the flip
};

struct PBOutcome {
  Assignment best_assignment;  // empty unless requested
  Cost start_cost;
  Cost best_cost;
  std::size_t steps_taken = 0;
  std::size_t best_step = 0;
  std::size_t rewound = 0;
  bool broke_early = false;
  bool interrupted = false;
  std::uint64_t hard_breaking_flips = 0;
  std::vector<TrajectoryStep> trajectory;
};

struct PBOptions {
  bool log_trajectory = false;
  bool capture_assignment = true;
  Budget* budget = nullptr;
};

/// Highest score, lowest variable index among equals.
inline Var argmax(std::span<const ScoredVar> candidates) {
  if (candidates.empty()) throw std::invalid_argument("argmax over empty candidate set");
  ScoredVar best = candidates[0];
  for (const ScoredVar& c : candidates.subspan(1))
    if (c.score > best.score || (c.score == best.score && c.var < best.var)) best = c;
  return best.var;
}

/// Draws a variable with probability score^2 / sum of score^2. Scores
/// beyond 2^31 are scaled down by a common power of two so the sum stays
/// within 128 bits.
inline Var sample_by_squared_score(std::span<const ScoredVar> positives, Rng& rng) {
  if (positives.empty()) throw std::invalid_argument("sampling from an empty candidate set");
  std::int64_t top = 0;
  for (const ScoredVar& c : positives) {
    if (c.score <= 0) throw std::invalid_argument("sampling requires positive scores");
    top = std::max(top, c.score);
  }
  unsigned shift = 0;
  while ((top >> shift) >= (std::int64_t{1} << 31)) ++shift;
  auto weight = [shift](std::int64_t s) {
    u128 v = static_cast<u128>(std::max<std::int64_t>(s >> shift, 1));
    return v * v;
  };
  u128 total = 0;
  for (const ScoredVar& c : positives) total += weight(c.score);
  u128 r = rng.below(total);
  for (const ScoredVar& c : positives) {
    u128 w = weight(c.score);
    if (r < w) return c.var;
    r -= w;
  }
  return positives.back().var;
}

/// One pick of the path-breaking walk. `candidates` is the whole candidate
/// list, `positives` its members with positive score.
inline Var pick_variable(std::span<const ScoredVar> candidates, std::span<const ScoredVar> positives,
                         double greedy_prob, bool no_random, Rng& rng) {
  if (no_random || positives.empty()) return argmax(candidates);
  if (rng.bernoulli(greedy_prob)) return argmax(positives);
  return sample_by_squared_score(positives, rng);
}

namespace detail {

// O(1) insert/erase/contains over 1..n; iteration order depends on history.
class IndexedSet {
 public:
  void reset(std::size_t n) {
    items_.clear();
    slot_.assign(n + 1, 0);
  }
  void fill(std::size_t n) {
    items_.resize(n);
    slot_.resize(n + 1);
    for (Var v = 1; v <= n; ++v) {
      items_[v - 1] = v;
      slot_[v] = v;
    }
  }
  bool contains(Var v) const { return slot_[v] != 0; }
  void insert(Var v) {
    if (slot_[v]) return;
    items_.push_back(v);
    slot_[v] = static_cast<std::uint32_t>(items_.size());
  }
  void erase(Var v) {
    std::uint32_t s = slot_[v];
    if (!s) return;
    Var last = items_.back();
    items_[s - 1] = last;
    slot_[last] = s;
    items_.pop_back();
    slot_[v] = 0;
  }
  void assign(Var v, bool member) {
    if (member) insert(v);
    else erase(v);
  }
  bool empty() const { return items_.empty(); }
  std::size_t size() const { return items_.size(); }
  const std::vector<Var>& items() const { return items_; }

 private:
  std::vector<Var> items_;
  std::vector<std::uint32_t> slot_;
};

}  // namespace detail

/// Walks from the state's current assignment toward its inverse, flipping
/// each variable at most once, and stops once
///   alpha * lastPos <= |sumNeg|
/// where lastPos is the most recent positive maximum score and sumNeg the sum
/// of candidate scores at a step without positive candidates. On return the
/// state is rewound to the best assignment seen along the walk.
///
/// Positive-score candidates and per-basis score sums are maintained from the
/// flip deltas, so a step costs O(|positives|) plus the flip itself; a full
/// scan of the candidates happens only when no candidate is positive.
class PathBreaker {
 public:
  PBOutcome run(ScoreState& state, const PBParams& params, Rng& rng, const PBOptions& opts = {}) {
    params.validate();
    init(state);

    PBOutcome out;
    out.start_cost = state.cost();
    out.best_cost = out.start_cost;
    std::int64_t last_pos = 0;
    trail_.clear();

    auto hook = [this, &state](Var v, bool hard, std::int64_t delta) {
      if (!candidates_.contains(v)) return;
      if (hard) {
        sum_hard_ += delta;
        pos_hard_.assign(v, state.hard_score(v) > 0);
      } else {
        sum_soft_ += delta;
        pos_soft_.assign(v, state.soft_score(v) > 0);
      }
    };

    while (!candidates_.empty()) {
      if (opts.budget && opts.budget->exhausted()) {
        out.interrupted = true;
        break;
      }
      const bool hard = state.hard_basis();
      const detail::IndexedSet& pos = hard ? pos_hard_ : pos_soft_;
      auto score_of = [&](Var v) { return hard ? state.hard_score(v) : state.soft_score(v); };

      positives_.clear();
      for (Var v : pos.items()) positives_.push_back(ScoredVar{v, score_of(v)});

      if (!params.no_break) {
        __int128 sum_neg = 0;
        if (positives_.empty()) {
          sum_neg = hard ? sum_hard_ : sum_soft_;
        } else {
          last_pos = max_score(positives_);
          sum_neg = 0;
        }
        const __int128 magnitude = sum_neg < 0 ? -sum_neg : sum_neg;
        if (static_cast<__int128>(params.alpha) * last_pos <= magnitude) {
          out.broke_early = true;
          break;
        }
      }

      Var picked = 0;
      std::int64_t step_max = 0;
      if (positives_.empty()) {
        ScoredVar best = scan_candidates(score_of);
        picked = best.var;
        step_max = best.score;
      } else {
        step_max = max_score(positives_);
        if (params.no_random || rng.bernoulli(params.greedy_prob)) picked = argmax(positives_);
        else picked = sample_by_squared_score(positives_, rng);
      }

      sum_hard_ -= state.hard_score(picked);
      sum_soft_ -= state.soft_score(picked);
      candidates_.erase(picked);
      pos_hard_.erase(picked);
      pos_soft_.erase(picked);

      const std::uint64_t hard_before = state.falsified_hard();
      state.flip(picked, hook);
      if (!hard && state.falsified_hard() > hard_before) ++out.hard_breaking_flips;
      trail_.push_back(picked);
      if (opts.budget) opts.budget->charge();

      const Cost now = state.cost();
      if (opts.log_trajectory) out.trajectory.push_back(TrajectoryStep{trail_.size() - 1, step_max, picked, now});
      if (is_better(now, out.best_cost)) {
        out.best_cost = now;
        out.best_step = trail_.size();
      }
    }

    out.steps_taken = trail_.size();
    for (std::size_t i = trail_.size(); i > out.best_step; --i) {
      state.flip(trail_[i - 1]);
      ++out.rewound;
    }
    if (opts.budget) opts.budget->charge(out.rewound);
    if (opts.capture_assignment) out.best_assignment = state.assignment();
    return out;
  }

  const std::vector<Var>& last_trail() const { return trail_; }

 private:
  void init(const ScoreState& state) {
    const std::size_t n = state.num_vars();
    candidates_.reset(n);
    candidates_.fill(n);
    pos_hard_.reset(n);
    pos_soft_.reset(n);
    sum_hard_ = 0;
    sum_soft_ = 0;
    for (Var v = 1; v <= n; ++v) {
      const std::int64_t h = state.hard_score(v);
      const std::int64_t s = state.soft_score(v);
      sum_hard_ += h;
      sum_soft_ += s;
      if (h > 0) pos_hard_.insert(v);
      if (s > 0) pos_soft_.insert(v);
    }
  }

  static std::int64_t max_score(const std::vector<ScoredVar>& vars) {
    std::int64_t m = std::numeric_limits<std::int64_t>::min();
    for (const ScoredVar& c : vars) m = std::max(m, c.score);
    return m;
  }

  template <class ScoreOf>
  ScoredVar scan_candidates(ScoreOf&& score_of) const {
    ScoredVar best{0, std::numeric_limits<std::int64_t>::min()};
    for (Var v : candidates_.items()) {
      const std::int64_t s = score_of(v);
      if (s > best.score || (s == best.score && v < best.var)) best = ScoredVar{v, s};
    }
    return best;
  }

  detail::IndexedSet candidates_, pos_hard_, pos_soft_;
  __int128 sum_hard_ = 0, sum_soft_ = 0;
  std::vector<ScoredVar> positives_;
  std::vector<Var> trail_;
};

/// Convenience wrapper around a one-off PathBreaker.
inline PBOutcome path_break(ScoreState& state, const PBParams& params, Rng& rng, const PBOptions& opts = {}) {
  PathBreaker breaker;
  return breaker.run(state, params, rng, opts);
}

}  // namespace ipbmr
