#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "ipbmr/budget.hpp"
#include "ipbmr/formula.hpp"
#include "ipbmr/path_breaking.hpp"
#include "ipbmr/rng.hpp"
#include "ipbmr/score_state.hpp"

namespace ipbmr {

enum class Variant { IPBMR, IPBR, IPBMR_noRandom, IPBMR_noBreak };

inline const char* to_string(Variant v) {
  switch (v) {
    case Variant::IPBMR: return "IPBMR";
    case Variant::IPBR: return "IPBR";
    case Variant::IPBMR_noRandom: return "IPBMR-noRandom";
    case Variant::IPBMR_noBreak: return "IPBMR-noBreak";
  }
  return "?";
}

// Accepts both the display names above and the short CLI spellings.
inline std::optional<Variant> parse_variant(std::string_view name) {
  if (name == "ipbmr" || name == "IPBMR") return Variant::IPBMR;
  if (name == "ipbr" || name == "IPBR") return Variant::IPBR;
  if (name == "no-random" || name == "IPBMR-noRandom") return Variant::IPBMR_noRandom;
  if (name == "no-break" || name == "IPBMR-noBreak") return Variant::IPBMR_noBreak;
  return std::nullopt;
}

inline double default_greedy_prob(Mode mode) { return mode == Mode::WeightedPartial ? 0.99 : 0.2; }

constexpr unsigned kDefaultMaxMutations = 7;
constexpr unsigned kIndustrialMaxMutations = 3;

struct SolverConfig {
  Variant variant = Variant::IPBMR;
  unsigned alpha = 3;
  std::optional<double> greedy_prob;  // unset: 0.99 for weighted-partial, 0.2 otherwise
  unsigned max_mutations = kDefaultMaxMutations;
  double weak_prob = 0.2;
  double strong_prob = 0.7;
  std::optional<std::uint64_t> max_restarts;
  std::optional<double> cutoff_seconds = 300.0;
  std::optional<std::uint64_t> max_flips;
  std::uint64_t seed = 0;

  void validate() const {
    if (alpha < 1) throw std::invalid_argument("alpha must be >= 1");
    if (greedy_prob && !(*greedy_prob >= 0.0 && *greedy_prob <= 1.0))
      throw std::invalid_argument("greedy probability must be in [0, 1]");
    if (!(0.0 <= weak_prob && weak_prob <= strong_prob && strong_prob <= 1.0))
      throw std::invalid_argument("need 0 <= weak_prob <= strong_prob <= 1");
    if (cutoff_seconds && !(*cutoff_seconds >= 0.0)) throw std::invalid_argument("cutoff must be non-negative");
  }

  PBParams pb_params(Mode mode) const {
    PBParams p;
    p.alpha = alpha;
    p.greedy_prob = greedy_prob.value_or(default_greedy_prob(mode));
    p.no_random = variant == Variant::IPBMR_noRandom;
    p.no_break = variant == Variant::IPBMR_noBreak;
    return p;
  }
};

struct RunResult {
  Assignment best_assignment;
  Cost best_cost;
  double time_to_best = 0.0;
  double elapsed = 0.0;
  std::uint64_t total_flips = 0;
  std::uint64_t pb_calls = 0;
  std::uint64_t pb_steps = 0;
  std::uint64_t restarts = 0;
  std::uint64_t weak_mutations_used = 0;
  std::uint64_t strong_mutations_used = 0;
  std::uint64_t hard_breaking_flips = 0;
  std::map<Cost, std::uint64_t> pb_return_costs;
};

// Everything except the timings.
inline bool same_search(const RunResult& a, const RunResult& b) {
  return a.best_assignment == b.best_assignment && a.best_cost == b.best_cost && a.total_flips == b.total_flips &&
         a.pb_calls == b.pb_calls && a.pb_steps == b.pb_steps && a.restarts == b.restarts &&
         a.weak_mutations_used == b.weak_mutations_used && a.strong_mutations_used == b.strong_mutations_used &&
         a.hard_breaking_flips == b.hard_breaking_flips && a.pb_return_costs == b.pb_return_costs;
}

/// State of the search right after a path-breaking call has been handled.
struct PbEvent {
  std::uint64_t restart = 0;
  std::uint64_t pb_call = 0;
  const PBOutcome& outcome;
  Cost current;
  Cost restart_best;
  unsigned weak_used = 0;
  unsigned strong_used = 0;
};

struct RunObserver {
  std::function<void(const Cost&, double seconds)> on_improvement;
  std::function<void(const PbEvent&)> on_pb_return;
  bool log_trajectories = false;
};

/// Flips each variable independently with probability p.
inline Assignment mutate(const Assignment& a, double p, Rng& rng) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("mutation probability must be in [0, 1]");
  Assignment result = a;
  for (Var v = 1; v <= a.size(); ++v)
    if (rng.bernoulli(p)) result.flip(v);
  return result;
}

namespace detail {

// Shared bookkeeping for the iterated algorithms.
class Search {
 public:
  Search(const Formula& f, const SolverConfig& config, Rng& rng, const RunObserver& observer)
      : formula_(f),
        config_(config),
        params_(config.pb_params(f.mode())),
        rng_(rng),
        observer_(observer),
        budget_(config.max_flips, config.cutoff_seconds),
        state_(f, Assignment::random(f.num_vars(), rng)) {
    result_.best_assignment = state_.assignment();
    result_.best_cost = state_.cost();
    if (observer_.on_improvement) observer_.on_improvement(result_.best_cost, 0.0);
  }

  bool done() { return result_.best_cost == Cost{} || budget_.exhausted(); }
  bool restarts_left(std::uint64_t k) const { return !config_.max_restarts || k < *config_.max_restarts; }

  ScoreState& state() { return state_; }
  Rng& rng() { return rng_; }

  // Moves the state to `target` by flipping the variables that differ.
  void move_to(const Assignment& target) {
    std::uint64_t flips = 0;
    for (Var v = 1; v <= target.size(); ++v) {
      if (state_.value(v) != target[v]) {
        state_.flip(v);
        ++flips;
      }
    }
    budget_.charge(flips);
  }

  const PBOutcome& path_break() {
    PBOptions opts;
    opts.budget = &budget_;
    opts.capture_assignment = false;
    opts.log_trajectory = observer_.log_trajectories;
    last_ = breaker_.run(state_, params_, rng_, opts);
    ++result_.pb_calls;
    result_.pb_steps += last_.steps_taken;
    result_.hard_breaking_flips += last_.hard_breaking_flips;
    ++result_.pb_return_costs[last_.best_cost];
    return last_;
  }

  void offer(const Cost& cost) {
    if (!is_better(cost, result_.best_cost)) return;
    result_.best_cost = cost;
    result_.best_assignment = state_.assignment();
    result_.time_to_best = budget_.elapsed();
    if (observer_.on_improvement) observer_.on_improvement(cost, result_.time_to_best);
  }

  void report(std::uint64_t restart, const Cost& current, const Cost& restart_best, unsigned weak, unsigned strong) {
    if (observer_.on_pb_return)
      observer_.on_pb_return(PbEvent{restart, result_.pb_calls, last_, current, restart_best, weak, strong});
  }

  RunResult& result() { return result_; }

  RunResult finish() {
    result_.total_flips = budget_.flips();
    result_.elapsed = budget_.elapsed();
    if (evaluate(formula_, result_.best_assignment) != result_.best_cost)
      throw std::logic_error("best cost does not match re-evaluation of the best assignment");
    return std::move(result_);
  }

  const SolverConfig& config() const { return config_; }

 private:
  const Formula& formula_;
  const SolverConfig& config_;
  PBParams params_;
  Rng& rng_;
  const RunObserver& observer_;
  Budget budget_;
  ScoreState state_;
  PathBreaker breaker_;
  PBOutcome last_;
  RunResult result_;
};

}  // namespace detail

/// Iterated path breaking with random restarts: from each random start,
/// path-break until a call no longer improves the current solution.
inline RunResult ipbr(const Formula& f, const SolverConfig& config, Rng& rng, const RunObserver& observer = {}) {
  config.validate();
  detail::Search search(f, config, rng, observer);
  for (std::uint64_t k = 0; search.restarts_left(k) && !search.done(); ++k) {
    ++search.result().restarts;
    search.move_to(Assignment::random(f.num_vars(), search.rng()));
    Cost current = search.state().cost();
    search.offer(current);
    while (!search.done()) {
      const PBOutcome& out = search.path_break();
      const bool improved = is_better(out.best_cost, current);
      if (improved) {
        current = out.best_cost;
        search.offer(current);
      }
      search.report(k, current, current, 0, 0);
      if (!improved || out.interrupted) break;
    }
  }
  return search.finish();
}

/// IPBR plus weak and then strong mutation of the restart-best solution
/// whenever path breaking stops improving; each counter allows
/// max_mutations attempts and both reset when the restart-best improves.
inline RunResult ipbmr(const Formula& f, const SolverConfig& config, Rng& rng, const RunObserver& observer = {}) {
  config.validate();
  detail::Search search(f, config, rng, observer);
  for (std::uint64_t k = 0; search.restarts_left(k) && !search.done(); ++k) {
    ++search.result().restarts;
    search.move_to(Assignment::random(f.num_vars(), search.rng()));
    Cost current = search.state().cost();
    Assignment restart_best = search.state().assignment();
    Cost restart_best_cost = current;
    search.offer(current);
    unsigned weak = 0;
    unsigned strong = 0;
    while (!search.done()) {
      const PBOutcome& out = search.path_break();
      const bool interrupted = out.interrupted;
      bool stop = false;
      if (is_better(out.best_cost, current)) {
        current = out.best_cost;
        if (is_better(current, restart_best_cost)) {
          restart_best = search.state().assignment();
          restart_best_cost = current;
          weak = 0;
          strong = 0;
          search.offer(current);
        }
      } else if (weak < config.max_mutations) {
        ++weak;
        ++search.result().weak_mutations_used;
        search.move_to(mutate(restart_best, config.weak_prob, search.rng()));
        current = search.state().cost();
        search.offer(current);
      } else if (strong < config.max_mutations) {
        ++strong;
        ++search.result().strong_mutations_used;
        search.move_to(mutate(restart_best, config.strong_prob, search.rng()));
        current = search.state().cost();
        search.offer(current);
      } else {
        stop = true;
      }
      search.report(k, current, restart_best_cost, weak, strong);
      if (stop || interrupted) break;
    }
  }
  return search.finish();
}

/// Seeds the generator from config.seed and dispatches on the variant.
inline RunResult run(const Formula& f, const SolverConfig& config, const RunObserver& observer = {}) {
  Rng rng(config.seed);
  if (config.variant == Variant::IPBR) return ipbr(f, config, rng, observer);
  return ipbmr(f, config, rng, observer);
}

}  // namespace ipbmr
