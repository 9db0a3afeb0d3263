#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ipbmr {

using Var = std::uint32_t;
using Weight = std::uint64_t;

enum class Mode { Unweighted, Weighted, WeightedPartial };

inline const char* to_string(Mode mode) {
  switch (mode) {
    case Mode::Unweighted: return "unweighted";
    case Mode::Weighted: return "weighted";
    case Mode::WeightedPartial: return "weighted-partial";
  }
  return "?";
}

struct Literal {
  Var var = 0;
  bool positive = true;

  long long to_dimacs() const { return positive ? static_cast<long long>(var) : -static_cast<long long>(var); }
  static Literal from_dimacs(long long lit) {
    return Literal{static_cast<Var>(lit < 0 ? -lit : lit), lit > 0};
  }
  bool satisfied_by(bool value) const { return value == positive; }

  friend bool operator==(const Literal&, const Literal&) = default;
};

// Hard clauses carry weight 0; their cost contribution is counted separately.
struct Clause {
  std::vector<Literal> literals;
  Weight weight = 1;
  bool hard = false;

  friend bool operator==(const Clause&, const Clause&) = default;
};

struct Occurrence {
  std::uint32_t clause = 0;
  bool positive = true;

  friend bool operator==(const Occurrence&, const Occurrence&) = default;
};

// occurrence lists indexed by variable; slot 0 is unused
using OccurrenceIndex = std::vector<std::vector<Occurrence>>;

inline OccurrenceIndex build_index(std::size_t num_vars, std::span<const Clause> clauses) {
  OccurrenceIndex index(num_vars + 1);
  for (std::size_t c = 0; c < clauses.size(); ++c)
    for (const Literal& lit : clauses[c].literals)
      index[lit.var].push_back(Occurrence{static_cast<std::uint32_t>(c), lit.positive});
  return index;
}

/// Immutable clause database. Construction validates the mode/weight
/// invariants and builds the per-variable occurrence index.
class Formula {
 public:
  Formula() : index_(1) {}

  Formula(std::size_t num_vars, std::vector<Clause> clauses, Mode mode,
          std::optional<Weight> top = std::nullopt, std::size_t tautology_count = 0)
      : num_vars_(num_vars),
        clauses_(std::move(clauses)),
        mode_(mode),
        top_(top),
        tautology_count_(tautology_count) {
    if (num_vars_ >= std::numeric_limits<Var>::max())
      throw std::invalid_argument("too many variables");
    if (clauses_.size() >= std::numeric_limits<std::uint32_t>::max())
      throw std::invalid_argument("too many clauses");
    if (top_ && mode_ != Mode::WeightedPartial)
      throw std::invalid_argument("top weight is only meaningful for weighted-partial formulas");
    Weight total = 0;
    std::vector<char> seen(num_vars_ + 1, 0);
    for (const Clause& clause : clauses_) {
      if (clause.literals.empty()) throw std::invalid_argument("empty clause");
      for (const Literal& lit : clause.literals) {
        if (lit.var < 1 || lit.var > num_vars_) throw std::invalid_argument("literal variable out of range");
        if (seen[lit.var]) throw std::invalid_argument("clause repeats a variable");
        seen[lit.var] = 1;
      }
      for (const Literal& lit : clause.literals) seen[lit.var] = 0;
      if (clause.hard) {
        if (mode_ != Mode::WeightedPartial) throw std::invalid_argument("hard clause outside weighted-partial mode");
        if (clause.weight != 0) throw std::invalid_argument("hard clauses carry no soft weight");
        ++num_hard_;
        continue;
      }
      if (clause.weight < 1) throw std::invalid_argument("soft clause weight must be positive");
      if (mode_ == Mode::Unweighted && clause.weight != 1)
        throw std::invalid_argument("unweighted clause with weight != 1");
      if (top_ && clause.weight >= *top_) throw std::invalid_argument("soft weight not below top");
      if (clause.weight > kMaxTotalWeight - total)
        throw std::invalid_argument("total soft weight overflows");
      total += clause.weight;
    }
    total_soft_weight_ = total;
    index_ = build_index(num_vars_, clauses_);
  }

  // Scores are signed, so the sum of all soft weights must fit in int64.
  static constexpr Weight kMaxTotalWeight = static_cast<Weight>(std::numeric_limits<std::int64_t>::max());

  std::size_t num_vars() const { return num_vars_; }
  std::size_t num_clauses() const { return clauses_.size(); }
  std::size_t num_hard() const { return num_hard_; }
  const std::vector<Clause>& clauses() const { return clauses_; }
  const Clause& clause(std::size_t c) const { return clauses_[c]; }
  Mode mode() const { return mode_; }
  const std::optional<Weight>& top() const { return top_; }
  std::size_t tautology_count() const { return tautology_count_; }
  Weight total_soft_weight() const { return total_soft_weight_; }
  const OccurrenceIndex& occurrence_index() const { return index_; }
  std::span<const Occurrence> occurrences(Var v) const { return index_[v]; }

  // Equality ignores the tautology counter: dropped clauses leave no trace.
  friend bool operator==(const Formula& a, const Formula& b) {
    return a.num_vars_ == b.num_vars_ && a.mode_ == b.mode_ && a.top_ == b.top_ && a.clauses_ == b.clauses_;
  }

 private:
  std::size_t num_vars_ = 0;
  std::vector<Clause> clauses_;
  Mode mode_ = Mode::Unweighted;
  std::optional<Weight> top_;
  std::size_t tautology_count_ = 0;
  std::size_t num_hard_ = 0;
  Weight total_soft_weight_ = 0;
  OccurrenceIndex index_;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

namespace detail {

inline std::vector<std::string_view> split_tokens(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) tokens.push_back(line.substr(i, j - i));
    i = j;
  }
  return tokens;
}

inline std::optional<long long> to_int(std::string_view token) {
  long long value = 0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size()) return std::nullopt;
  return value;
}

inline std::optional<Weight> to_weight(std::string_view token) {
  Weight value = 0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size()) return std::nullopt;
  return value;
}

// Accumulates one clause; normalizes duplicate literals and detects tautologies.
class ClauseCollector {
 public:
  std::vector<Clause> clauses;
  std::size_t parsed = 0;
  std::size_t tautologies = 0;
  Var max_var = 0;

  void add(std::vector<Literal>& lits, Weight weight, bool hard, std::size_t line) {
    if (lits.empty()) throw ParseError(line, "empty clause");
    ++parsed;
    std::vector<Literal> kept;
    kept.reserve(lits.size());
    bool tautology = false;
    for (const Literal& lit : lits) {
      max_var = std::max(max_var, lit.var);
      if (marks_.size() <= lit.var) marks_.resize(static_cast<std::size_t>(lit.var) + 1, 0);
      signed char polarity = lit.positive ? 1 : -1;
      if (marks_[lit.var] == polarity) continue;
      if (marks_[lit.var] == -polarity) tautology = true;
      marks_[lit.var] = polarity;
      kept.push_back(lit);
    }
    for (const Literal& lit : lits) marks_[lit.var] = 0;
    lits.clear();
    if (tautology) {
      ++tautologies;
      return;
    }
    clauses.push_back(Clause{std::move(kept), hard ? 0 : weight, hard});
  }

 private:
  std::vector<signed char> marks_;
};

inline Formula parse_headerless(std::istream& in, const std::string& first_line, std::size_t first_line_no) {
  ClauseCollector collector;
  std::vector<Literal> lits;
  bool any_hard = false;
  Weight total = 0;

  auto parse_line = [&](const std::string& line, std::size_t line_no) {
    auto tokens = split_tokens(line);
    if (tokens.empty() || tokens[0][0] == 'c') return;
    if (tokens[0] == "p") throw ParseError(line_no, "header after clauses");
    bool hard = tokens[0] == "h";
    Weight weight = 0;
    if (!hard) {
      if (tokens[0][0] == '-') throw ParseError(line_no, "soft clause weight must be positive");
      auto w = to_weight(tokens[0]);
      if (!w) throw ParseError(line_no, "malformed clause weight '" + std::string(tokens[0]) + "'");
      if (*w == 0) throw ParseError(line_no, "soft clause weight must be positive");
      if (*w > Formula::kMaxTotalWeight - total) throw ParseError(line_no, "total soft weight overflows");
      weight = *w;
    }
    bool terminated = false;
    for (std::size_t i = 1; i < tokens.size(); ++i) {
      if (terminated) throw ParseError(line_no, "tokens after clause terminator");
      auto lit = to_int(tokens[i]);
      if (!lit) throw ParseError(line_no, "malformed literal '" + std::string(tokens[i]) + "'");
      if (*lit == 0) {
        terminated = true;
        continue;
      }
      constexpr long long kMaxVar = std::numeric_limits<Var>::max() - 1;
      if (*lit > kMaxVar || -*lit > kMaxVar) throw ParseError(line_no, "literal out of range");
      lits.push_back(Literal::from_dimacs(*lit));
    }
    if (!terminated) throw ParseError(line_no, "clause not terminated by 0");
    std::size_t before = collector.clauses.size();
    collector.add(lits, weight, hard, line_no);
    if (collector.clauses.size() > before) {
      any_hard = any_hard || hard;
      if (!hard) total += weight;
    }
  };

  parse_line(first_line, first_line_no);
  std::string line;
  std::size_t line_no = first_line_no;
  while (std::getline(in, line)) parse_line(line, ++line_no);
  return Formula(collector.max_var, std::move(collector.clauses), any_hard ? Mode::WeightedPartial : Mode::Weighted,
                 std::nullopt, collector.tautologies);
}

}  // namespace detail

/// Parses DIMACS "p cnf" / "p wcnf" text, or the header-less 2022 WCNF
/// format ("h" hard lines and "<weight>" soft lines).
inline Formula parse_dimacs(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  bool wcnf = false;
  std::size_t num_vars = 0;
  std::size_t declared = 0;
  std::optional<Weight> top;
  detail::ClauseCollector collector;
  std::vector<Literal> lits;
  std::optional<Weight> pending_weight;
  std::size_t clause_line = 0;
  Weight total = 0;

  while (std::getline(in, line)) {
    ++line_no;
    auto tokens = detail::split_tokens(line);
    if (tokens.empty()) continue;
    if (tokens[0][0] == 'c') continue;
    if (!have_header) {
      if (tokens[0] != "p") {
        if (tokens[0] == "h" || std::isdigit(static_cast<unsigned char>(tokens[0][0])))
          return detail::parse_headerless(in, line, line_no);
        throw ParseError(line_no, "expected 'p cnf' or 'p wcnf' header");
      }
      if (tokens.size() < 4 || (tokens[1] != "cnf" && tokens[1] != "wcnf"))
        throw ParseError(line_no, "malformed header");
      wcnf = tokens[1] == "wcnf";
      if ((!wcnf && tokens.size() != 4) || (wcnf && tokens.size() > 5)) throw ParseError(line_no, "malformed header");
      auto v = detail::to_weight(tokens[2]);
      auto c = detail::to_weight(tokens[3]);
      if (!v || !c || *v >= std::numeric_limits<Var>::max()) throw ParseError(line_no, "malformed header counts");
      num_vars = static_cast<std::size_t>(*v);
      declared = static_cast<std::size_t>(*c);
      if (tokens.size() == 5) {
        top = detail::to_weight(tokens[4]);
        if (!top || *top == 0) throw ParseError(line_no, "malformed top weight");
      }
      have_header = true;
      continue;
    }
    if (tokens[0] == "p") throw ParseError(line_no, "duplicate header");
    for (std::string_view token : tokens) {
      if (wcnf && !pending_weight) {
        if (token[0] == '-') throw ParseError(line_no, "soft clause weight must be positive");
        auto w = detail::to_weight(token);
        if (!w) throw ParseError(line_no, "malformed clause weight '" + std::string(token) + "'");
        if (*w == 0) throw ParseError(line_no, "soft clause weight must be positive");
        if (top && *w > *top) throw ParseError(line_no, "clause weight exceeds top");
        pending_weight = *w;
        clause_line = line_no;
        continue;
      }
      auto lit = detail::to_int(token);
      if (!lit) throw ParseError(line_no, "malformed literal '" + std::string(token) + "'");
      if (lits.empty() && !wcnf) clause_line = line_no;
      if (*lit == 0) {
        Weight weight = wcnf ? *pending_weight : 1;
        bool hard = top && weight == *top;
        if (!hard && weight > Formula::kMaxTotalWeight - total) throw ParseError(line_no, "total soft weight overflows");
        std::size_t before = collector.clauses.size();
        collector.add(lits, weight, hard, clause_line);
        if (!hard && collector.clauses.size() > before) total += weight;
        pending_weight.reset();
        continue;
      }
      long long magnitude = *lit < 0 ? -*lit : *lit;
      if (static_cast<unsigned long long>(magnitude) > num_vars)
        throw ParseError(line_no, "literal " + std::to_string(*lit) + " exceeds declared variable count");
      lits.push_back(Literal::from_dimacs(*lit));
    }
  }
  if (!have_header) throw ParseError(line_no, "missing 'p' header");
  if (!lits.empty() || pending_weight) throw ParseError(line_no, "last clause not terminated by 0");
  if (collector.parsed != declared)
    throw ParseError(line_no, "header declares " + std::to_string(declared) + " clauses, found " +
                                  std::to_string(collector.parsed));
  Mode mode = !wcnf ? Mode::Unweighted : (top ? Mode::WeightedPartial : Mode::Weighted);
  return Formula(num_vars, std::move(collector.clauses), mode, top, collector.tautologies);
}

inline Formula parse_dimacs(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_dimacs(in);
}

inline Formula read_dimacs_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(0, "cannot open '" + path + "'");
  return parse_dimacs(in);
}

/// Writes classic DIMACS; weighted-partial formulas without a declared top
/// are written in the header-less format they were read from.
inline void write_dimacs(std::ostream& out, const Formula& f) {
  auto write_lits = [&](const Clause& clause) {
    for (const Literal& lit : clause.literals) out << lit.to_dimacs() << ' ';
    out << "0\n";
  };
  if (f.mode() == Mode::WeightedPartial && !f.top()) {
    for (const Clause& clause : f.clauses()) {
      if (clause.hard) out << "h ";
      else out << clause.weight << ' ';
      write_lits(clause);
    }
    return;
  }
  if (f.mode() == Mode::Unweighted) {
    out << "p cnf " << f.num_vars() << ' ' << f.num_clauses() << '\n';
    for (const Clause& clause : f.clauses()) write_lits(clause);
    return;
  }
  out << "p wcnf " << f.num_vars() << ' ' << f.num_clauses();
  if (f.top()) out << ' ' << *f.top();
  out << '\n';
  for (const Clause& clause : f.clauses()) {
    out << (clause.hard ? *f.top() : clause.weight) << ' ';
    write_lits(clause);
  }
}

inline std::string to_dimacs(const Formula& f) {
  std::ostringstream out;
  write_dimacs(out, f);
  return out.str();
}

}  // namespace ipbmr
