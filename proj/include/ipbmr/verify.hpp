#pragma once

#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "ipbmr/formula.hpp"
#include "ipbmr/rng.hpp"
#include "ipbmr/score_state.hpp"

namespace ipbmr {

constexpr std::size_t kBruteForceMaxVars = 26;

struct BruteForceResult {
  Cost cost;
  Assignment witness;
};

/// Exact lexicographic optimum by enumerating all 2^n assignments in Gray-code
/// order. Keeps only per-clause satisfied-literal counts, so it shares no
/// code with ScoreState.
inline BruteForceResult brute_force(const Formula& f) {
  const std::size_t n = f.num_vars();
  if (n > kBruteForceMaxVars) throw std::invalid_argument("brute force is limited to 26 variables");

  std::vector<std::uint32_t> sat(f.num_clauses(), 0);
  Cost cost;
  for (std::size_t c = 0; c < f.num_clauses(); ++c) {
    const Clause& clause = f.clause(c);
    for (const Literal& lit : clause.literals) sat[c] += lit.positive ? 0 : 1;  // all variables start false
    if (sat[c] == 0) {
      if (clause.hard) ++cost.hard;
      else cost.soft += clause.weight;
    }
  }
  std::vector<std::uint8_t> value(n + 1, 0);
  Cost best = cost;
  std::uint64_t best_code = 0;

  const std::uint64_t total = std::uint64_t{1} << n;
  for (std::uint64_t i = 1; i < total; ++i) {
    const Var v = static_cast<Var>(__builtin_ctzll(i)) + 1;
    value[v] ^= 1;
    for (const Occurrence& occ : f.occurrences(v)) {
      const Clause& clause = f.clause(occ.clause);
      if (occ.positive == (value[v] != 0)) {
        if (sat[occ.clause]++ == 0) {
          if (clause.hard) --cost.hard;
          else cost.soft -= clause.weight;
        }
      } else if (--sat[occ.clause] == 0) {
        if (clause.hard) ++cost.hard;
        else cost.soft += clause.weight;
      }
    }
    if (cost < best) {
      best = cost;
      best_code = i ^ (i >> 1);
    }
  }

  Assignment witness(n);
  for (Var v = 1; v <= n; ++v) witness.set(v, (best_code >> (v - 1)) & 1);
  return BruteForceResult{best, std::move(witness)};
}

/// True iff the assignment's direct evaluation equals the claimed cost.
inline bool check_solution(const Formula& f, const Assignment& a, const Cost& claimed) {
  return evaluate(f, a) == claimed;
}

struct GeneratorSpec {
  std::size_t num_vars = 20;
  std::size_t num_clauses = 91;
  std::size_t clause_length = 3;
  Mode mode = Mode::Unweighted;
  Weight min_weight = 1;
  Weight max_weight = 1;
  double hard_fraction = 0.0;
  std::uint64_t seed = 0;

  void validate() const {
    if (clause_length < 1) throw std::invalid_argument("clause length must be >= 1");
    if (num_vars < clause_length) throw std::invalid_argument("need at least as many variables as the clause length");
    if (min_weight < 1 || min_weight > max_weight) throw std::invalid_argument("need 1 <= min weight <= max weight");
    if (!(hard_fraction >= 0.0 && hard_fraction <= 1.0)) throw std::invalid_argument("hard fraction must be in [0, 1]");
    if (mode == Mode::Unweighted && max_weight != 1) throw std::invalid_argument("unweighted instances have unit weights");
  }
};

/// Random k-clauses over distinct variables with fair-coin polarities. In
/// weighted-partial mode each clause is hard with probability hard_fraction
/// and top is one more than the total soft weight.
inline Formula generate(const GeneratorSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  std::vector<Clause> clauses;
  clauses.reserve(spec.num_clauses);
  Weight total = 0;
  for (std::size_t c = 0; c < spec.num_clauses; ++c) {
    Clause clause;
    while (clause.literals.size() < spec.clause_length) {
      const Var v = static_cast<Var>(rng.below(spec.num_vars)) + 1;
      bool fresh = true;
      for (const Literal& lit : clause.literals) fresh = fresh && lit.var != v;
      if (fresh) clause.literals.push_back(Literal{v, rng.coin()});
    }
    if (spec.mode == Mode::WeightedPartial && rng.bernoulli(spec.hard_fraction)) {
      clause.hard = true;
      clause.weight = 0;
    } else {
      clause.weight = spec.mode == Mode::Unweighted ? 1 : rng.between(spec.min_weight, spec.max_weight);
      if (clause.weight > Formula::kMaxTotalWeight - 1 - total) throw std::invalid_argument("generated weights overflow");
      total += clause.weight;
    }
    clauses.push_back(std::move(clause));
  }
  std::optional<Weight> top;
  if (spec.mode == Mode::WeightedPartial) top = total + 1;
  return Formula(spec.num_vars, std::move(clauses), spec.mode, top);
}

}  // namespace ipbmr
