#include <gtest/gtest.h>

#include <cmath>

#include "ipbmr/solver.hpp"
#include "ipbmr/verify.hpp"
#include "oracles.hpp"

using namespace ipbmr;

namespace {

Formula example() { return parse_dimacs("p cnf 3 3\n1 -2 0\n2 3 0\n-1 3 0\n"); }

SolverConfig flip_budget(Variant variant, std::uint64_t flips, std::uint64_t seed = 1) {
  SolverConfig c;
  c.variant = variant;
  c.max_flips = flips;
  c.cutoff_seconds.reset();
  c.seed = seed;
  return c;
}

Formula random_3sat(std::size_t n, std::uint64_t seed, double ratio = 4.26) {
  GeneratorSpec spec;
  spec.num_vars = n;
  spec.num_clauses = static_cast<std::size_t>(std::lround(ratio * n));
  spec.seed = seed;
  return generate(spec);
}

}  // namespace

TEST(Mutate, Extremes) {
  Rng rng(1);
  Assignment a = Assignment::random(100, rng);
  EXPECT_EQ(mutate(a, 0.0, rng), a);
  EXPECT_EQ(mutate(a, 1.0, rng), inverse(a));
  EXPECT_THROW(mutate(a, 1.5, rng), std::invalid_argument);
}

TEST(Mutate, BinomialFlipCount) {
  Rng rng(2);
  const std::size_t n = 10000;
  Assignment a(n);
  const double sigma = std::sqrt(n * 0.2 * 0.8);
  std::size_t flipped = hamming_distance(a, mutate(a, 0.2, rng));
  EXPECT_NEAR(static_cast<double>(flipped), 2000.0, 3 * sigma);
}

TEST(Solver, ExampleAllVariants) {
  Formula f = example();
  for (Variant v : {Variant::IPBMR, Variant::IPBR, Variant::IPBMR_noRandom, Variant::IPBMR_noBreak}) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      RunResult r = run(f, flip_budget(v, 10000, seed));
      EXPECT_EQ(r.best_cost, Cost{});
      EXPECT_EQ(evaluate(f, r.best_assignment), Cost{});
      EXPECT_LE(r.restarts, 1u);
    }
  }
}

TEST(Solver, EmptyFormula) {
  Formula f;
  RunResult r = run(f, flip_budget(Variant::IPBR, 1000));
  EXPECT_EQ(r.best_cost, Cost{});
  EXPECT_EQ(r.total_flips, 0u);
  Formula no_clauses(5, {}, Mode::Unweighted);
  RunResult r2 = run(no_clauses, flip_budget(Variant::IPBMR, 1000));
  EXPECT_EQ(r2.best_cost, Cost{});
  EXPECT_EQ(r2.total_flips, 0u);
}

TEST(Solver, IpbrMatchesBruteForceOn18Vars) {
  Formula f = random_3sat(18, 11);
  const Cost optimum = brute_force(f).cost;
  RunResult r = run(f, flip_budget(Variant::IPBR, 100000, 3));
  EXPECT_EQ(r.best_cost, optimum);
}

TEST(Solver, IpbmrSolvesWeightedPartial16Vars) {
  int checked = 0;
  for (std::uint64_t seed = 0; checked < 5 && seed < 50; ++seed) {
    GeneratorSpec spec;
    spec.num_vars = 16;
    spec.num_clauses = 70;
    spec.mode = Mode::WeightedPartial;
    spec.max_weight = 30;
    spec.hard_fraction = 0.3;
    spec.seed = seed;
    Formula f = generate(spec);
    const Cost optimum = brute_force(f).cost;
    if (optimum.hard != 0) continue;
    ++checked;
    RunResult r = run(f, flip_budget(Variant::IPBMR, 100000, seed));
    EXPECT_EQ(r.best_cost.hard, 0u);
    EXPECT_EQ(r.best_cost, optimum);
  }
  EXPECT_EQ(checked, 5);
}

TEST(Solver, ZeroMutationsEqualsIpbr) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Formula f = random_3sat(40, seed, 5.0);
    SolverConfig a = flip_budget(Variant::IPBMR, 20000, seed);
    a.max_mutations = 0;
    SolverConfig b = flip_budget(Variant::IPBR, 20000, seed);
    RunResult x = run(f, a), y = run(f, b);
    EXPECT_TRUE(same_search(x, y));
    EXPECT_EQ(x.weak_mutations_used, 0u);
  }
}

TEST(Solver, NoBreakCompletesEveryTrajectory) {
  Formula f = random_3sat(10, 4, 6.0);
  RunObserver observer;
  std::size_t calls = 0;
  observer.on_pb_return = [&](const PbEvent& e) {
    ++calls;
    if (!e.outcome.interrupted) EXPECT_EQ(e.outcome.steps_taken, 10u);
  };
  run(f, flip_budget(Variant::IPBMR_noBreak, 5000), observer);
  EXPECT_GT(calls, 0u);
}

TEST(Solver, DeterministicUnderFlipBudget) {
  Formula f = random_3sat(60, 9);
  for (Variant v : {Variant::IPBMR, Variant::IPBR, Variant::IPBMR_noRandom, Variant::IPBMR_noBreak}) {
    RunResult a = run(f, flip_budget(v, 30000, 77));
    RunResult b = run(f, flip_budget(v, 30000, 77));
    EXPECT_TRUE(same_search(a, b)) << to_string(v);
  }
}

TEST(Solver, SearchInvariants) {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    Formula f = random_3sat(50, seed, 4.5);
    SolverConfig config = flip_budget(Variant::IPBMR, 40000, seed);
    config.max_mutations = 1 + seed % 3;
    Cost global{~std::uint64_t{0}, ~Weight{0}};
    std::uint64_t restart = ~std::uint64_t{0};
    Cost restart_best;
    std::uint64_t calls_in_restart = 0, cs_improvements = 0, cbs_improvements = 0;
    bool first = true;
    RunObserver observer;
    std::vector<Cost> improvements;
    observer.on_improvement = [&](const Cost& c, double) { improvements.push_back(c); };
    observer.on_pb_return = [&](const PbEvent& e) {
      if (e.restart != restart) {
        // every call that fails to improve the current solution spends a
        // mutation, and the mutation counters reset whenever CBS improves
        if (!first)
          EXPECT_LE(calls_in_restart, cs_improvements + 2 * config.max_mutations * (cbs_improvements + 1) + 1);
        first = false;
        restart = e.restart;
        restart_best = e.outcome.start_cost;  // the random start is the first CBS
        calls_in_restart = cs_improvements = cbs_improvements = 0;
      }
      ++calls_in_restart;
      EXPECT_LE(e.restart_best, restart_best);  // never replaced by something worse
      if (is_better(e.restart_best, restart_best)) {
        ++cbs_improvements;
        EXPECT_EQ(e.weak_used, 0u);
        EXPECT_EQ(e.strong_used, 0u);
      }
      if (is_better(e.outcome.best_cost, e.outcome.start_cost)) ++cs_improvements;
      restart_best = e.restart_best;
      EXPECT_LE(e.weak_used, config.max_mutations);
      EXPECT_LE(e.strong_used, config.max_mutations);
      if (e.strong_used > 0) EXPECT_EQ(e.weak_used, config.max_mutations);
      global = std::min(global, e.outcome.best_cost);
    };
    RunResult r = run(f, config, observer);
    for (std::size_t i = 1; i < improvements.size(); ++i) EXPECT_TRUE(is_better(improvements[i], improvements[i - 1]));
    EXPECT_EQ(r.best_cost, improvements.back());
    EXPECT_LE(r.best_cost, global);
    EXPECT_TRUE(check_solution(f, r.best_assignment, r.best_cost));
    std::uint64_t histogram_total = 0;
    for (const auto& [cost, count] : r.pb_return_costs) histogram_total += count;
    EXPECT_EQ(histogram_total, r.pb_calls);
  }
}

TEST(Solver, RestartLimit) {
  Formula f = random_3sat(30, 1, 6.0);
  SolverConfig config = flip_budget(Variant::IPBR, 10000000);
  config.max_restarts = 3;
  RunResult r = run(f, config);
  EXPECT_EQ(r.restarts, 3u);
}

TEST(Solver, WallClockCutoff) {
  Formula f = random_3sat(200, 1, 4.26);
  SolverConfig config;
  config.cutoff_seconds = 0.2;
  RunResult r = run(f, config);
  EXPECT_LT(r.elapsed, 2.0);
  EXPECT_GT(r.pb_calls, 0u);
}

TEST(Solver, DefaultGreedyProbabilityPerMode) {
  SolverConfig c;
  EXPECT_DOUBLE_EQ(c.pb_params(Mode::Unweighted).greedy_prob, 0.2);
  EXPECT_DOUBLE_EQ(c.pb_params(Mode::Weighted).greedy_prob, 0.2);
  EXPECT_DOUBLE_EQ(c.pb_params(Mode::WeightedPartial).greedy_prob, 0.99);
  EXPECT_EQ(c.alpha, 3u);
  EXPECT_EQ(c.max_mutations, 7u);
  EXPECT_DOUBLE_EQ(c.weak_prob, 0.2);
  EXPECT_DOUBLE_EQ(c.strong_prob, 0.7);
  EXPECT_EQ(c.cutoff_seconds, 300.0);
  c.greedy_prob = 0.5;
  EXPECT_DOUBLE_EQ(c.pb_params(Mode::WeightedPartial).greedy_prob, 0.5);
  c.variant = Variant::IPBMR_noBreak;
  EXPECT_TRUE(c.pb_params(Mode::Unweighted).no_break);
  c.weak_prob = 0.8;
  EXPECT_THROW(c.validate(), std::invalid_argument);
}
