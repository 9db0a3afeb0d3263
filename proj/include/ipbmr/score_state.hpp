#pragma once

#include <compare>
#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ipbmr/formula.hpp"
#include "ipbmr/rng.hpp"

namespace ipbmr {

/// Truth values of variables 1..n.
class Assignment {
 public:
  Assignment() = default;
  explicit Assignment(std::size_t num_vars, bool value = false) : values_(num_vars, value ? 1 : 0) {}

  // "011" assigns x1=0, x2=1, x3=1
  static Assignment from_bits(std::string_view bits) {
    Assignment a(bits.size());
    for (std::size_t i = 0; i < bits.size(); ++i) {
      if (bits[i] != '0' && bits[i] != '1') throw std::invalid_argument("assignment bits must be 0 or 1");
      a.values_[i] = bits[i] == '1';
    }
    return a;
  }

  static Assignment random(std::size_t num_vars, Rng& rng) {
    Assignment a(num_vars);
    for (auto& v : a.values_) v = rng.coin();
    return a;
  }

  std::size_t size() const { return values_.size(); }
  bool operator[](Var v) const { return values_[v - 1] != 0; }
  void set(Var v, bool value) { values_[v - 1] = value; }
  void flip(Var v) { values_[v - 1] ^= 1; }

  std::string to_bits() const {
    std::string bits(values_.size(), '0');
    for (std::size_t i = 0; i < values_.size(); ++i)
      if (values_[i]) bits[i] = '1';
    return bits;
  }

  friend bool operator==(const Assignment&, const Assignment&) = default;

 private:
  std::vector<std::uint8_t> values_;
};

inline Assignment inverse(const Assignment& a) {
  Assignment result = a;
  for (Var v = 1; v <= a.size(); ++v) result.flip(v);
  return result;
}

inline std::size_t hamming_distance(const Assignment& a, const Assignment& b) {
  if (a.size() != b.size()) throw std::invalid_argument("assignment length mismatch");
  std::size_t d = 0;
  for (Var v = 1; v <= a.size(); ++v) d += a[v] != b[v];
  return d;
}

/// Objective value, ordered lexicographically: falsified hard clauses first,
/// then falsified soft weight.
struct Cost {
  std::uint64_t hard = 0;
  Weight soft = 0;

  friend auto operator<=>(const Cost&, const Cost&) = default;
};

constexpr bool is_better(const Cost& a, const Cost& b) { return a < b; }

inline std::ostream& operator<<(std::ostream& out, const Cost& cost) {
  return out << "Cost(" << cost.hard << ", " << cost.soft << ")";
}

/// Direct clause-by-clause evaluation.
inline Cost evaluate(const Formula& f, const Assignment& a) {
  if (a.size() != f.num_vars()) throw std::invalid_argument("assignment length does not match formula");
  Cost cost;
  for (const Clause& clause : f.clauses()) {
    bool sat = false;
    for (const Literal& lit : clause.literals) {
      if (lit.satisfied_by(a[lit.var])) {
        sat = true;
        break;
      }
    }
    if (sat) continue;
    if (clause.hard) ++cost.hard;
    else cost.soft += clause.weight;
  }
  return cost;
}

/// Incremental clause and variable bookkeeping under single-variable flips.
///
/// Per clause it keeps the number of satisfied literals and the XOR of the
/// satisfied variables, which equals the critical variable whenever exactly
/// one literal is satisfied. Per variable it keeps make/break separately for
/// hard clauses (counts) and soft clauses (weights).
class ScoreState {
 public:
  ScoreState(const Formula& formula, Assignment assignment)
      : formula_(&formula), assignment_(std::move(assignment)) {
    if (assignment_.size() != formula.num_vars())
      throw std::invalid_argument("assignment length does not match formula");
    const std::size_t n = formula.num_vars();
    sat_count_.assign(formula.num_clauses(), 0);
    sat_xor_.assign(formula.num_clauses(), 0);
    make_hard_.assign(n + 1, 0);
    break_hard_.assign(n + 1, 0);
    make_soft_.assign(n + 1, 0);
    break_soft_.assign(n + 1, 0);
    for (std::size_t c = 0; c < formula.num_clauses(); ++c) {
      const Clause& clause = formula.clause(c);
      for (const Literal& lit : clause.literals) {
        if (lit.satisfied_by(assignment_[lit.var])) {
          ++sat_count_[c];
          sat_xor_[c] ^= lit.var;
        }
      }
      const std::int64_t w = clause_weight(clause);
      auto& make = clause.hard ? make_hard_ : make_soft_;
      auto& brk = clause.hard ? break_hard_ : break_soft_;
      if (sat_count_[c] == 0) {
        if (clause.hard) ++falsified_hard_;
        else falsified_soft_ += clause.weight;
        for (const Literal& lit : clause.literals) make[lit.var] += w;
      } else if (sat_count_[c] == 1) {
        brk[sat_xor_[c]] += w;
      }
    }
  }

  const Formula& formula() const { return *formula_; }
  const Assignment& assignment() const { return assignment_; }
  std::size_t num_vars() const { return formula_->num_vars(); }
  bool value(Var v) const { return assignment_[v]; }

  Cost cost() const { return Cost{falsified_hard_, falsified_soft_}; }
  std::uint64_t falsified_hard() const { return falsified_hard_; }
  Weight falsified_soft_weight() const { return falsified_soft_; }

  // Scores count hard clauses while any is falsified, soft weight otherwise.
  bool hard_basis() const { return falsified_hard_ > 0; }

  std::int64_t hard_score(Var v) const { return make_hard_[v] - break_hard_[v]; }
  std::int64_t soft_score(Var v) const { return make_soft_[v] - break_soft_[v]; }
  std::int64_t score(Var v) const { return hard_basis() ? hard_score(v) : soft_score(v); }

  std::int64_t make_hard(Var v) const { return make_hard_[v]; }
  std::int64_t break_hard(Var v) const { return break_hard_[v]; }
  std::int64_t make_soft(Var v) const { return make_soft_[v]; }
  std::int64_t break_soft(Var v) const { return break_soft_[v]; }
  std::uint32_t sat_count(std::size_t clause) const { return sat_count_[clause]; }

  // critical variable of a clause with exactly one satisfied literal, else 0
  Var critical(std::size_t clause) const { return sat_count_[clause] == 1 ? sat_xor_[clause] : 0; }

  void flip(Var x) {
    flip(x, [](Var, bool, std::int64_t) {});
  }

  /// Flips x. on_delta(v, hard, delta) is invoked after every change of
  /// v's hard (hard = true) or soft score, with the signed change.
  template <class OnDelta>
  void flip(Var x, OnDelta&& on_delta) {
    if (x < 1 || x > num_vars()) throw std::out_of_range("flip: variable index out of range");
    assignment_.flip(x);
    const bool now = assignment_[x];
    for (const Occurrence& occ : formula_->occurrences(x)) {
      const Clause& clause = formula_->clause(occ.clause);
      const std::int64_t w = clause_weight(clause);
      const bool hard = clause.hard;
      auto& make = hard ? make_hard_ : make_soft_;
      auto& brk = hard ? break_hard_ : break_soft_;
      std::uint32_t& count = sat_count_[occ.clause];
      Var& sx = sat_xor_[occ.clause];
      if (occ.positive == now) {
        const std::uint32_t before = count++;
        if (before == 0) {
          if (hard) --falsified_hard_;
          else falsified_soft_ -= clause.weight;
          for (const Literal& lit : clause.literals) {
            make[lit.var] -= w;
            on_delta(lit.var, hard, -w);
          }
          brk[x] += w;
          on_delta(x, hard, -w);
        } else if (before == 1) {
          brk[sx] -= w;
          on_delta(sx, hard, w);
        }
        sx ^= x;
      } else {
        const std::uint32_t before = count--;
        sx ^= x;
        if (before == 1) {
          if (hard) ++falsified_hard_;
          else falsified_soft_ += clause.weight;
          brk[x] -= w;
          on_delta(x, hard, w);
          for (const Literal& lit : clause.literals) {
            make[lit.var] += w;
            on_delta(lit.var, hard, w);
          }
        } else if (before == 2) {
          brk[sx] += w;
          on_delta(sx, hard, -w);
        }
      }
    }
  }

  friend bool operator==(const ScoreState& a, const ScoreState& b) {
    return a.formula_ == b.formula_ && a.assignment_ == b.assignment_ && a.sat_count_ == b.sat_count_ &&
           a.sat_xor_ == b.sat_xor_ && a.falsified_hard_ == b.falsified_hard_ &&
           a.falsified_soft_ == b.falsified_soft_ && a.make_hard_ == b.make_hard_ &&
           a.break_hard_ == b.break_hard_ && a.make_soft_ == b.make_soft_ && a.break_soft_ == b.break_soft_;
  }

 private:
  static std::int64_t clause_weight(const Clause& clause) {
    return clause.hard ? 1 : static_cast<std::int64_t>(clause.weight);
  }

  const Formula* formula_;
  Assignment assignment_;
  std::vector<std::uint32_t> sat_count_;
  std::vector<Var> sat_xor_;
  std::uint64_t falsified_hard_ = 0;
  Weight falsified_soft_ = 0;
  std::vector<std::int64_t> make_hard_, break_hard_, make_soft_, break_soft_;
};

}  // namespace ipbmr
