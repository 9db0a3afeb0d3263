#include <gtest/gtest.h>

#include <tuple>

#include "ipbmr/score_state.hpp"
#include "ipbmr/verify.hpp"
#include "oracles.hpp"

using namespace ipbmr;

namespace {

Formula example() { return parse_dimacs("p cnf 3 3\n1 -2 0\n2 3 0\n-1 3 0\n"); }

Formula random_instance(Mode mode, std::uint64_t seed, std::size_t n = 15, std::size_t m = 60) {
  GeneratorSpec spec;
  spec.num_vars = n;
  spec.num_clauses = m;
  spec.clause_length = 1 + seed % 4;
  spec.mode = mode;
  spec.max_weight = mode == Mode::Unweighted ? 1 : 50;
  spec.hard_fraction = 0.4;
  spec.seed = seed;
  return generate(spec);
}

}  // namespace

TEST(ScoreState, ExampleInit) {
  Formula f = example();
  ScoreState s(f, Assignment::from_bits("011"));
  EXPECT_EQ(s.cost(), (Cost{0, 1}));
  EXPECT_EQ(s.sat_count(0), 0u);
  EXPECT_EQ(s.sat_count(1), 2u);
  EXPECT_EQ(s.sat_count(2), 2u);
  EXPECT_EQ(s.score(2), 1);
  EXPECT_EQ(s.make_soft(2), 1);
  EXPECT_EQ(s.break_soft(2), 0);
  EXPECT_EQ(s.score(1), 1);
}

TEST(ScoreState, EmptyFormula) {
  Formula f;
  ScoreState s(f, Assignment(0));
  EXPECT_EQ(s.cost(), Cost{});
}

TEST(ScoreState, LengthMismatchThrows) {
  Formula f = example();
  EXPECT_THROW(ScoreState(f, Assignment(2)), std::invalid_argument);
}

TEST(ScoreState, ExampleFlip) {
  Formula f = example();
  ScoreState s(f, Assignment::from_bits("011"));
  s.flip(2);
  EXPECT_EQ(s.assignment(), Assignment::from_bits("001"));
  EXPECT_EQ(s.cost(), Cost{});
  EXPECT_TRUE(oracle::state_matches_definitions(s));
  EXPECT_THROW(s.flip(0), std::out_of_range);
  EXPECT_THROW(s.flip(4), std::out_of_range);
}

TEST(ScoreState, UnusedVariableScoresZero) {
  Formula f = parse_dimacs("p cnf 3 1\n1 2 0\n");
  ScoreState s(f, Assignment::from_bits("000"));
  EXPECT_EQ(s.score(3), 0);
}

TEST(ScoreState, FlipIsInvolution) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    Formula f = random_instance(static_cast<Mode>(seed % 3), seed);
    Rng rng(seed);
    ScoreState s(f, Assignment::random(f.num_vars(), rng));
    const ScoreState original = s;
    Var x = static_cast<Var>(rng.below(f.num_vars())) + 1;
    s.flip(x);
    s.flip(x);
    EXPECT_EQ(s, original);
  }
}

TEST(ScoreState, IncrementalMatchesScratchAndDefinitions) {
  for (std::uint64_t seed = 0; seed < 15; ++seed) {
    Formula f = random_instance(static_cast<Mode>(seed % 3), seed, 25, 100);
    Rng rng(seed + 100);
    ScoreState s(f, Assignment::random(f.num_vars(), rng));
    for (int i = 0; i < 1000; ++i) s.flip(static_cast<Var>(rng.below(f.num_vars())) + 1);
    EXPECT_EQ(s, ScoreState(f, s.assignment()));
    EXPECT_TRUE(oracle::state_matches_definitions(s));
  }
}

TEST(ScoreState, DeltaHookReportsEveryScoreChange) {
  Formula f = random_instance(Mode::WeightedPartial, 3, 20, 80);
  Rng rng(9);
  ScoreState s(f, Assignment::random(f.num_vars(), rng));
  for (int i = 0; i < 200; ++i) {
    std::vector<std::int64_t> hard(f.num_vars() + 1), soft(f.num_vars() + 1);
    for (Var v = 1; v <= f.num_vars(); ++v) {
      hard[v] = s.hard_score(v);
      soft[v] = s.soft_score(v);
    }
    s.flip(static_cast<Var>(rng.below(f.num_vars())) + 1, [&](Var v, bool is_hard, std::int64_t d) {
      (is_hard ? hard : soft)[v] += d;
    });
    for (Var v = 1; v <= f.num_vars(); ++v) {
      ASSERT_EQ(hard[v], s.hard_score(v));
      ASSERT_EQ(soft[v], s.soft_score(v));
    }
  }
}

TEST(ScoreState, ScoreEqualsTwoEvaluationDifference) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    Formula f = random_instance(static_cast<Mode>(seed % 3), seed);
    Rng rng(seed);
    ScoreState s(f, Assignment::random(f.num_vars(), rng));
    for (Var v = 1; v <= f.num_vars(); ++v)
      EXPECT_EQ(s.score(v), oracle::two_evaluation_score(f, s.assignment(), v));
  }
}

TEST(ScoreState, PartialSoftPhaseIgnoresHardClauses) {
  // x1 = 1 satisfies the hard clause; flipping it makes the soft clause true
  // and the hard clause false, and soft-basis scoring rates that as +3.
  Formula f = parse_dimacs("p wcnf 1 2 10\n10 1 0\n3 -1 0\n");
  ScoreState s(f, Assignment::from_bits("1"));
  EXPECT_FALSE(s.hard_basis());
  EXPECT_EQ(s.score(1), 3);
  s.flip(1);
  EXPECT_TRUE(s.hard_basis());
  EXPECT_EQ(s.score(1), 1);
  EXPECT_EQ(s.cost(), (Cost{1, 0}));
}

TEST(Cost, LexicographicOrder) {
  EXPECT_TRUE(is_better(Cost{0, 5}, Cost{1, 0}));
  EXPECT_TRUE(is_better(Cost{0, 3}, Cost{0, 4}));
  EXPECT_FALSE(is_better(Cost{0, 4}, Cost{0, 4}));
  Rng rng(5);
  for (int i = 0; i < 1000; ++i) {
    Cost a{rng.below(std::uint64_t{3}), rng.below(std::uint64_t{4})}, b{rng.below(std::uint64_t{3}), rng.below(std::uint64_t{4})};
    EXPECT_EQ(is_better(a, b), std::tie(a.hard, a.soft) < std::tie(b.hard, b.soft));
    EXPECT_FALSE(is_better(a, b) && is_better(b, a));
    if (a != b) {
      EXPECT_TRUE(is_better(a, b) || is_better(b, a));
    }
  }
}

TEST(Assignment, Inverse) {
  EXPECT_EQ(inverse(Assignment::from_bits("011")), Assignment::from_bits("100"));
  Rng rng(1);
  Assignment a = Assignment::random(57, rng);
  EXPECT_EQ(inverse(inverse(a)), a);
  EXPECT_EQ(hamming_distance(a, inverse(a)), 57u);
}
