#pragma once

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ipbmr/ipbmr.hpp"

namespace ipbmr::cli {

enum ExitCode : int { kOk = 0, kParseError = 1, kBadFlags = 2, kCheckFailed = 3, kInternal = 4 };

struct SolverFlags {
  std::string variant = "ipbmr";
  unsigned alpha = 3;
  std::optional<double> prob_p;
  unsigned max_mutations = kDefaultMaxMutations;
  bool industrial = false;
  double cutoff = 300.0;
  std::optional<std::uint64_t> max_flips;
  std::optional<std::uint64_t> max_restarts;
  std::uint64_t seed = 0;

  void add_to(CLI::App& app, bool with_variant = true) {
    if (with_variant)
      app.add_option("--variant", variant, "ipbmr | ipbr | no-random | no-break")
          ->check(CLI::IsMember({"ipbmr", "ipbr", "no-random", "no-break"}));
    add_budget(app);
  }

  void add_budget(CLI::App& app) {
    app.add_option("--alpha", alpha, "break-condition multiplier")->check(CLI::PositiveNumber);
    app.add_option("--prob-p", prob_p, "argmax pick probability (default 0.2, 0.99 for weighted-partial)")
        ->check(CLI::Range(0.0, 1.0));
    app.add_option("--max-mutations", max_mutations, "weak and strong mutation attempts per local optimum");
    app.add_flag("--industrial", industrial, "use 3 mutation attempts");
    app.add_option("--cutoff", cutoff, "wall-clock limit in seconds")->check(CLI::NonNegativeNumber);
    app.add_option("--max-flips", max_flips, "flip limit (deterministic budget)");
    app.add_option("--max-restarts", max_restarts, "restart limit");
    app.add_option("--seed", seed, "random seed");
  }

  SolverConfig config() const {
    SolverConfig c;
    c.variant = *parse_variant(variant);
    c.alpha = alpha;
    c.greedy_prob = prob_p;
    c.max_mutations = industrial ? kIndustrialMaxMutations : max_mutations;
    c.cutoff_seconds = cutoff;
    c.max_flips = max_flips;
    c.max_restarts = max_restarts;
    c.seed = seed;
    return c;
  }
};

inline std::string describe(const SolverConfig& c, Mode mode) {
  std::ostringstream s;
  s << "variant=" << to_string(c.variant) << " alpha=" << c.alpha
    << " P=" << c.greedy_prob.value_or(default_greedy_prob(mode)) << " max_mutations=" << c.max_mutations
    << " seed=" << c.seed << " cutoff=" << c.cutoff_seconds.value_or(0.0);
  if (c.max_flips) s << " max_flips=" << *c.max_flips;
  if (c.max_restarts) s << " max_restarts=" << *c.max_restarts;
  return s.str();
}

inline void write_v_line(std::ostream& out, const Assignment& a) {
  out << 'v';
  for (Var v = 1; v <= a.size(); ++v) out << ' ' << (a[v] ? "" : "-") << v;
  out << '\n';
}

struct SolutionClaim {
  std::optional<Weight> cost;
  Assignment assignment;
};

/// Reads MSE-style output: the last "o" line is the claimed cost and the "v"
/// lines hold either literals or one 0/1 string. Unmentioned variables are false.
inline SolutionClaim read_solution(std::istream& in, std::size_t num_vars) {
  SolutionClaim claim{std::nullopt, Assignment(num_vars)};
  std::string line;
  while (std::getline(in, line)) {
    auto tokens = detail::split_tokens(line);
    if (tokens.empty()) continue;
    if (tokens[0] == "o") {
      if (tokens.size() != 2 || !detail::to_weight(tokens[1])) throw std::invalid_argument("malformed o line");
      claim.cost = detail::to_weight(tokens[1]);
    } else if (tokens[0] == "v") {
      if (tokens.size() == 2 && tokens[1].size() == num_vars &&
          tokens[1].find_first_not_of("01") == std::string_view::npos) {
        claim.assignment = Assignment::from_bits(tokens[1]);
        continue;
      }
      for (std::size_t i = 1; i < tokens.size(); ++i) {
        auto lit = detail::to_int(tokens[i]);
        if (!lit) throw std::invalid_argument("malformed literal in v line");
        if (*lit == 0) continue;
        const long long var = *lit < 0 ? -*lit : *lit;
        if (static_cast<unsigned long long>(var) > num_vars) throw std::invalid_argument("v line variable out of range");
        claim.assignment.set(static_cast<Var>(var), *lit > 0);
      }
    }
  }
  return claim;
}

inline std::optional<Formula> load(const std::string& path, std::ostream& err) {
  try {
    return read_dimacs_file(path);
  } catch (const std::exception& e) {
    err << "c parse error in " << path << ": " << e.what() << '\n';
    return std::nullopt;
  }
}

inline int cmd_solve(const std::string& path, const SolverFlags& flags, const std::string& trajectory_path,
                     std::ostream& out, std::ostream& err) {
  auto formula = load(path, err);
  if (!formula) return kParseError;
  const SolverConfig config = flags.config();
  out << "c ipbmr MaxSAT local search\n";
  out << "c instance " << std::filesystem::path(path).filename().string() << ": mode=" << to_string(formula->mode())
      << " vars=" << formula->num_vars() << " clauses=" << formula->num_clauses() << " hard=" << formula->num_hard()
      << " tautologies_dropped=" << formula->tautology_count() << '\n';
  out << "c config " << describe(config, formula->mode()) << '\n';

  std::ofstream trajectory;
  RunObserver observer;
  if (!trajectory_path.empty()) {
    trajectory.open(trajectory_path);
    if (!trajectory) {
      err << "c cannot write " << trajectory_path << '\n';
      return kBadFlags;
    }
    write_trajectory_header(trajectory, "pb_call");
    observer.log_trajectories = true;
    observer.on_pb_return = [&](const PbEvent& e) {
      for (const TrajectoryStep& s : e.outcome.trajectory) write_trajectory_row(trajectory, e.pb_call, s);
    };
  }
  std::optional<Weight> last_o;
  observer.on_improvement = [&](const Cost& cost, double) {
    if (cost.hard != 0) return;
    out << "o " << cost.soft << '\n';
    last_o = cost.soft;
  };

  RunResult result;
  try {
    result = run(*formula, config, observer);
  } catch (const std::exception& e) {
    err << "c error: " << e.what() << '\n';
    return kInternal;
  }
  const Cost check = evaluate(*formula, result.best_assignment);
  if (check != result.best_cost || (check.hard == 0 && last_o != check.soft)) {
    err << "c internal error: reported cost does not match the assignment\n";
    return kInternal;
  }
  out << "c best hard_falsified=" << result.best_cost.hard << " soft_falsified_weight=" << result.best_cost.soft
      << " flips=" << result.total_flips << " pb_calls=" << result.pb_calls << " restarts=" << result.restarts
      << '\n';
  err << "c time_to_best=" << result.time_to_best << "s elapsed=" << result.elapsed << "s\n";
  out << (result.best_cost == Cost{} ? "s OPTIMUM FOUND\n" : "s UNKNOWN\n");
  write_v_line(out, result.best_assignment);
  return kOk;
}

inline int cmd_check(const std::string& path, const std::string& solution_path, std::ostream& out,
                     std::ostream& err) {
  auto formula = load(path, err);
  if (!formula) return kParseError;
  std::ifstream in(solution_path);
  if (!in) {
    err << "c cannot open " << solution_path << '\n';
    return kParseError;
  }
  SolutionClaim claim;
  try {
    claim = read_solution(in, formula->num_vars());
  } catch (const std::exception& e) {
    err << "c malformed solution: " << e.what() << '\n';
    return kParseError;
  }
  const Cost actual = evaluate(*formula, claim.assignment);
  if (!claim.cost) {
    err << "c no o line to check; assignment evaluates to hard=" << actual.hard << " soft=" << actual.soft << '\n';
    return kCheckFailed;
  }
  if (!check_solution(*formula, claim.assignment, Cost{0, *claim.cost})) {
    out << "c check FAILED: claimed " << *claim.cost << ", assignment evaluates to hard=" << actual.hard
        << " soft=" << actual.soft << '\n';
    return kCheckFailed;
  }
  out << "c check OK: cost " << *claim.cost << '\n';
  return kOk;
}

inline bool open_out(std::ofstream& file, const std::string& dir, const char* name, std::ostream& err) {
  std::filesystem::create_directories(dir);
  file.open(std::filesystem::path(dir) / name);
  if (!file) err << "c cannot write " << (std::filesystem::path(dir) / name).string() << '\n';
  return static_cast<bool>(file);
}

inline std::vector<Variant> to_variants(const std::vector<std::string>& names) {
  std::vector<Variant> variants;
  for (const std::string& n : names) variants.push_back(*parse_variant(n));
  if (variants.empty())
    variants = {Variant::IPBMR, Variant::IPBMR_noRandom, Variant::IPBMR_noBreak, Variant::IPBR};
  return variants;
}

inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Iterated path-breaking local search for (weighted, partial) MaxSAT"};
  app.require_subcommand(1);

  SolverFlags solve_flags;
  std::string solve_path, trajectory_path;
  auto* solve = app.add_subcommand("solve", "solve one instance, MaxSAT-evaluation style output");
  solve->add_option("instance", solve_path, "DIMACS cnf/wcnf file")->required();
  solve_flags.add_to(*solve);
  solve->add_option("--trajectory", trajectory_path, "write per-step path-breaking records as CSV");

  std::string check_path, check_solution_path;
  auto* check = app.add_subcommand("check", "verify a solver's o/v lines against an instance");
  check->add_option("instance", check_path)->required();
  check->add_option("solution", check_solution_path, "file with o and v lines")->required();

  GeneratorSpec gen;
  std::string gen_mode = "unweighted", gen_out;
  auto* generate_cmd = app.add_subcommand("generate", "write a random k-CNF instance");
  generate_cmd->add_option("--vars", gen.num_vars)->check(CLI::PositiveNumber);
  generate_cmd->add_option("--clauses", gen.num_clauses);
  generate_cmd->add_option("--clause-length", gen.clause_length)->check(CLI::PositiveNumber);
  generate_cmd->add_option("--mode", gen_mode)->check(CLI::IsMember({"unweighted", "weighted", "partial"}));
  generate_cmd->add_option("--min-weight", gen.min_weight);
  generate_cmd->add_option("--max-weight", gen.max_weight);
  generate_cmd->add_option("--hard-fraction", gen.hard_fraction)->check(CLI::Range(0.0, 1.0));
  generate_cmd->add_option("--seed", gen.seed);
  generate_cmd->add_option("--out", gen_out, "output file (default stdout)");

  SolverFlags bench_flags;
  std::vector<std::string> bench_paths, bench_variants;
  unsigned bench_runs = 10;
  std::string bench_out;
  auto* bench = app.add_subcommand("bench", "multi-seed runs of several variants; runs.csv and summary.csv");
  bench->add_option("instances", bench_paths, "files or directories")->required();
  bench->add_option("--variant", bench_variants, "repeatable; default all four")
      ->check(CLI::IsMember({"ipbmr", "ipbr", "no-random", "no-break"}));
  bench_flags.add_budget(*bench);
  bench->add_option("--runs", bench_runs, "repetitions per instance and variant")->check(CLI::PositiveNumber);
  bench->add_option("--out", bench_out, "output directory");

  std::string traj_path, traj_out;
  unsigned traj_runs = 10;
  std::optional<double> traj_p;
  std::uint64_t traj_seed = 0;
  auto* traj = app.add_subcommand("trajectory", "max candidate score along complete walks; trajectory.csv");
  traj->add_option("instance", traj_path)->required();
  traj->add_option("--runs", traj_runs, "number of walks")->check(CLI::PositiveNumber);
  traj->add_option("--prob-p", traj_p)->check(CLI::Range(0.0, 1.0));
  traj->add_option("--seed", traj_seed);
  traj->add_option("--out", traj_out, "output directory (default stdout)");

  SolverFlags hist_flags;
  std::vector<std::string> hist_variants;
  std::string hist_path, hist_out;
  auto* hist = app.add_subcommand("histogram", "costs returned by path breaking, per variant; histogram.csv");
  hist->add_option("instance", hist_path)->required();
  hist->add_option("--variant", hist_variants, "repeatable; default all four")
      ->check(CLI::IsMember({"ipbmr", "ipbr", "no-random", "no-break"}));
  hist_flags.add_budget(*hist);
  hist->add_option("--out", hist_out, "output directory (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "c " << e.what() << '\n';
    return kBadFlags;
  }

  try {
    if (*solve) return cmd_solve(solve_path, solve_flags, trajectory_path, out, err);
    if (*check) return cmd_check(check_path, check_solution_path, out, err);

    if (*generate_cmd) {
      gen.mode = gen_mode == "unweighted" ? Mode::Unweighted
                 : gen_mode == "weighted" ? Mode::Weighted
                                          : Mode::WeightedPartial;
      if (gen.mode == Mode::Unweighted) gen.max_weight = gen.min_weight = 1;
      Formula f;
      try {
        f = generate(gen);
      } catch (const std::invalid_argument& e) {
        err << "c " << e.what() << '\n';
        return kBadFlags;
      }
      if (gen_out.empty()) {
        write_dimacs(out, f);
      } else {
        std::ofstream file(gen_out);
        if (!file) {
          err << "c cannot write " << gen_out << '\n';
          return kBadFlags;
        }
        write_dimacs(file, f);
      }
      return kOk;
    }

    if (*bench) {
      SuiteOptions options;
      options.variants = to_variants(bench_variants);
      options.base = bench_flags.config();
      options.repetitions = bench_runs;
      SuiteResult suite = run_suite(collect_instances(bench_paths), options);
      for (const InstanceError& e : suite.errors) err << "c skipped " << e.instance << ": " << e.message << '\n';
      if (!bench_out.empty()) {
        std::ofstream runs, summary;
        if (!open_out(runs, bench_out, "runs.csv", err) || !open_out(summary, bench_out, "summary.csv", err))
          return kBadFlags;
        write_runs_csv(runs, suite.runs);
        write_summary_csv(summary, suite.summary);
      }
      write_summary_csv(out, suite.summary);
      for (const RankingRow& r : suite.ranking)
        err << "c " << to_string(r.variant) << " wins=" << r.wins << " total_time=" << r.total_time << '\n';
      return suite.errors.empty() ? kOk : kParseError;
    }

    if (*traj) {
      auto formula = load(traj_path, err);
      if (!formula) return kParseError;
      PBParams params;
      params.greedy_prob = traj_p.value_or(default_greedy_prob(formula->mode()));
      auto rows = trajectory_dump(*formula, params, traj_runs, traj_seed);
      if (traj_out.empty()) {
        write_trajectory_csv(out, rows);
      } else {
        std::ofstream file;
        if (!open_out(file, traj_out, "trajectory.csv", err)) return kBadFlags;
        write_trajectory_csv(file, rows);
      }
      return kOk;
    }

    if (*hist) {
      auto formula = load(hist_path, err);
      if (!formula) return kParseError;
      auto returns = pb_return_histogram(*formula, to_variants(hist_variants), hist_flags.config());
      for (const VariantReturns& r : returns)
        err << "c " << to_string(r.variant) << " pb_calls=" << r.run.pb_calls
            << " mean_returned_cost=" << r.mean_falsified() << '\n';
      auto rows = histogram_rows(returns);
      if (hist_out.empty()) {
        write_histogram_csv(out, rows);
      } else {
        std::ofstream file;
        if (!open_out(file, hist_out, "histogram.csv", err)) return kBadFlags;
        write_histogram_csv(file, rows);
      }
      return kOk;
    }
  } catch (const std::invalid_argument& e) {
    err << "c invalid arguments: " << e.what() << '\n';
    return kBadFlags;
  }
  return kBadFlags;
}

}  // namespace ipbmr::cli
