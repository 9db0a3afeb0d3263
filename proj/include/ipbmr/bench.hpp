#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <istream>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "ipbmr/formula.hpp"
#include "ipbmr/path_breaking.hpp"
#include "ipbmr/solver.hpp"

namespace ipbmr {

// Costs print as the falsified soft weight when no hard clause is falsified,
// and as "<hard>:<soft>" otherwise.
inline std::string format_cost(const Cost& cost) {
  if (cost.hard == 0) return std::to_string(cost.soft);
  return std::to_string(cost.hard) + ":" + std::to_string(cost.soft);
}

inline Cost parse_cost(std::string_view text) {
  Cost cost;
  auto colon = text.find(':');
  auto num = [](std::string_view t) {
    auto v = detail::to_weight(t);
    if (!v) throw std::invalid_argument("malformed cost '" + std::string(t) + "'");
    return *v;
  };
  if (colon == std::string_view::npos) {
    cost.soft = num(text);
  } else {
    cost.hard = num(text.substr(0, colon));
    cost.soft = num(text.substr(colon + 1));
  }
  return cost;
}

namespace csv {

inline std::string escape(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char ch : field) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

inline std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char ch = line[i];
    if (quoted) {
      if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back() += '"';
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        fields.back() += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      fields.emplace_back();
    } else if (ch != '\r') {
      fields.back() += ch;
    }
  }
  return fields;
}

inline std::string format_seconds_us(std::int64_t us) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%lld.%06lld", static_cast<long long>(us / 1000000),
                static_cast<long long>(us % 1000000));
  return buf;
}

inline std::int64_t parse_seconds_us(const std::string& text) {
  auto dot = text.find('.');
  if (dot == std::string::npos || text.size() - dot != 7) throw std::invalid_argument("malformed time '" + text + "'");
  auto whole = detail::to_int(std::string_view(text).substr(0, dot));
  auto frac = detail::to_int(std::string_view(text).substr(dot + 1));
  if (!whole || !frac) throw std::invalid_argument("malformed time '" + text + "'");
  return *whole * 1000000 + *frac;
}

}  // namespace csv

struct RunRecord {
  std::string instance;
  Variant variant = Variant::IPBMR;
  std::uint64_t seed = 0;
  Cost best;
  std::int64_t time_to_best_us = 0;  // microseconds, so CSV round trips are exact
  std::uint64_t flips = 0;
  std::uint64_t pb_calls = 0;
  std::uint64_t restarts = 0;

  friend bool operator==(const RunRecord&, const RunRecord&) = default;
};

struct SummaryRow {
  std::string instance;
  Variant variant = Variant::IPBMR;
  std::optional<double> avg_time;  // unset when no run satisfied every hard clause
  Cost best_cost;
  bool win = false;

  friend bool operator==(const SummaryRow&, const SummaryRow&) = default;
};

struct RankingRow {
  Variant variant = Variant::IPBMR;
  std::size_t wins = 0;
  double total_time = 0.0;
};

struct InstanceError {
  std::string instance;
  std::string message;
};

struct SuiteResult {
  std::vector<RunRecord> runs;
  std::vector<SummaryRow> summary;
  std::vector<RankingRow> ranking;
  std::vector<InstanceError> errors;
};

struct SuiteOptions {
  std::vector<Variant> variants{Variant::IPBMR, Variant::IPBMR_noRandom, Variant::IPBMR_noBreak, Variant::IPBR};
  SolverConfig base;  // variant and seed are overridden per run
  unsigned repetitions = 10;
  unsigned threads = 1;
};

inline RunRecord make_record(const std::string& instance, Variant variant, std::uint64_t seed, const RunResult& r) {
  return RunRecord{instance,    variant,  seed,       r.best_cost, std::llround(r.time_to_best * 1e6),
                   r.total_flips, r.pb_calls, r.restarts};
}

/// Aggregates per (instance, variant) in first-seen order. A variant wins an
/// instance when its best cost over all runs equals the best of any variant,
/// so ties produce several winners.
inline std::vector<SummaryRow> summarize(const std::vector<RunRecord>& runs) {
  struct Acc {
    std::int64_t time_us = 0;
    std::size_t count = 0;
    bool feasible = false;
    Cost best{~std::uint64_t{0}, ~Weight{0}};
  };
  std::vector<std::pair<std::string, Variant>> order;
  std::map<std::pair<std::string, Variant>, Acc> acc;
  for (const RunRecord& r : runs) {
    auto key = std::make_pair(r.instance, r.variant);
    auto [it, inserted] = acc.try_emplace(key);
    if (inserted) order.push_back(key);
    Acc& a = it->second;
    a.time_us += r.time_to_best_us;
    ++a.count;
    a.feasible = a.feasible || r.best.hard == 0;
    a.best = std::min(a.best, r.best);
  }
  std::map<std::string, Cost> best_per_instance;
  for (const auto& [key, a] : acc) {
    auto [it, inserted] = best_per_instance.try_emplace(key.first, a.best);
    if (!inserted) it->second = std::min(it->second, a.best);
  }
  std::vector<SummaryRow> rows;
  for (const auto& key : order) {
    const Acc& a = acc.at(key);
    SummaryRow row{key.first, key.second, std::nullopt, a.best, a.best == best_per_instance.at(key.first)};
    if (a.feasible) row.avg_time = static_cast<double>(a.time_us) / (1e6 * static_cast<double>(a.count));
    rows.push_back(row);
  }
  return rows;
}

/// Orders variants by wins, then by the shorter total of average times.
inline std::vector<RankingRow> rank_variants(const std::vector<SummaryRow>& summary) {
  std::vector<RankingRow> ranking;
  for (const SummaryRow& row : summary) {
    auto it = std::find_if(ranking.begin(), ranking.end(), [&](const RankingRow& r) { return r.variant == row.variant; });
    if (it == ranking.end()) {
      ranking.push_back(RankingRow{row.variant, 0, 0.0});
      it = std::prev(ranking.end());
    }
    it->wins += row.win;
    it->total_time += row.avg_time.value_or(0.0);
  }
  std::stable_sort(ranking.begin(), ranking.end(), [](const RankingRow& a, const RankingRow& b) {
    if (a.wins != b.wins) return a.wins > b.wins;
    return a.total_time < b.total_time;
  });
  return ranking;
}

/// Regular files named directly or found (non-recursively) in directories,
/// in sorted order.
inline std::vector<std::string> collect_instances(const std::vector<std::string>& paths) {
  namespace fs = std::filesystem;
  std::vector<std::string> files;
  for (const std::string& p : paths) {
    if (fs::is_directory(p)) {
      std::vector<std::string> found;
      for (const auto& entry : fs::directory_iterator(p))
        if (entry.is_regular_file()) found.push_back(entry.path().string());
      std::sort(found.begin(), found.end());
      files.insert(files.end(), found.begin(), found.end());
    } else {
      files.push_back(p);
    }
  }
  return files;
}

/// Runs every (instance, variant, repetition) with seed base.seed + repetition.
/// Parse failures are recorded and the remaining instances still run.
inline SuiteResult run_suite(const std::vector<std::string>& instances, const SuiteOptions& options) {
  SuiteResult result;
  std::vector<std::pair<std::string, Formula>> formulas;
  for (const std::string& path : instances) {
    try {
      formulas.emplace_back(path, read_dimacs_file(path));
    } catch (const std::exception& e) {
      result.errors.push_back(InstanceError{path, e.what()});
    }
  }

  struct Job {
    std::size_t formula;
    Variant variant;
    unsigned rep;
  };
  std::vector<Job> jobs;
  for (std::size_t i = 0; i < formulas.size(); ++i)
    for (Variant v : options.variants)
      for (unsigned rep = 0; rep < options.repetitions; ++rep) jobs.push_back(Job{i, v, rep});

  std::vector<RunRecord> records(jobs.size());
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::vector<InstanceError> run_errors;
  auto worker = [&] {
    for (std::size_t j = next++; j < jobs.size(); j = next++) {
      const Job& job = jobs[j];
      SolverConfig config = options.base;
      config.variant = job.variant;
      config.seed = options.base.seed + job.rep;
      try {
        RunResult r = run(formulas[job.formula].second, config);
        records[j] = make_record(formulas[job.formula].first, job.variant, config.seed, r);
      } catch (const std::exception& e) {
        std::lock_guard lock(error_mutex);
        run_errors.push_back(InstanceError{formulas[job.formula].first, e.what()});
      }
    }
  };
  const unsigned threads = std::max(1u, options.threads);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (!run_errors.empty()) throw std::runtime_error("run failed on " + run_errors.front().instance + ": " + run_errors.front().message);

  result.runs = std::move(records);
  result.summary = summarize(result.runs);
  result.ranking = rank_variants(result.summary);
  return result;
}

inline void write_runs_csv(std::ostream& out, const std::vector<RunRecord>& runs) {
  out << "instance,variant,seed,best_hard,best_soft,time_to_best_s,flips,pb_calls,restarts\n";
  for (const RunRecord& r : runs)
    out << csv::escape(r.instance) << ',' << to_string(r.variant) << ',' << r.seed << ',' << r.best.hard << ','
        << r.best.soft << ',' << csv::format_seconds_us(r.time_to_best_us) << ',' << r.flips << ',' << r.pb_calls
        << ',' << r.restarts << '\n';
}

inline std::vector<RunRecord> read_runs_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || csv::split_row(line).size() != 9) throw std::invalid_argument("runs.csv: bad header");
  std::vector<RunRecord> runs;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto f = csv::split_row(line);
    if (f.size() != 9) throw std::invalid_argument("runs.csv: expected 9 fields");
    auto variant = parse_variant(f[1]);
    auto num = [](const std::string& s) {
      auto v = detail::to_weight(s);
      if (!v) throw std::invalid_argument("runs.csv: malformed number '" + s + "'");
      return *v;
    };
    if (!variant) throw std::invalid_argument("runs.csv: unknown variant '" + f[1] + "'");
    runs.push_back(RunRecord{f[0], *variant, num(f[2]), Cost{num(f[3]), num(f[4])}, csv::parse_seconds_us(f[5]),
                             num(f[6]), num(f[7]), num(f[8])});
  }
  return runs;
}

inline void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows) {
  out << "instance,variant,avg_time,best_cost,win\n";
  for (const SummaryRow& r : rows) {
    out << csv::escape(r.instance) << ',' << to_string(r.variant) << ',';
    if (r.avg_time) {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.6f", *r.avg_time);
      out << buf;
    }
    out << ',' << format_cost(r.best_cost) << ',' << (r.win ? 1 : 0) << '\n';
  }
}

struct TrajectoryRow {
  std::size_t trajectory = 0;
  TrajectoryStep step;
};

/// `count` complete (no-break) walks, each from an independent uniformly
/// random start.
inline std::vector<TrajectoryRow> trajectory_dump(const Formula& f, PBParams params, std::size_t count,
                                                  std::uint64_t seed) {
  params.no_break = true;
  Rng rng(seed);
  PathBreaker breaker;
  PBOptions opts;
  opts.log_trajectory = true;
  opts.capture_assignment = false;
  std::vector<TrajectoryRow> rows;
  for (std::size_t t = 0; t < count; ++t) {
    ScoreState state(f, Assignment::random(f.num_vars(), rng));
    PBOutcome out = breaker.run(state, params, rng, opts);
    for (const TrajectoryStep& s : out.trajectory) rows.push_back(TrajectoryRow{t, s});
  }
  return rows;
}

inline void write_trajectory_header(std::ostream& out, const char* id_column = "trajectory") {
  out << id_column << ",step,max_score,picked_var,hard_falsified,soft_falsified_weight\n";
}

inline void write_trajectory_row(std::ostream& out, std::size_t id, const TrajectoryStep& s) {
  out << id << ',' << s.step << ',' << s.max_score << ',' << s.picked << ',' << s.cost.hard << ',' << s.cost.soft
      << '\n';
}

inline void write_trajectory_csv(std::ostream& out, const std::vector<TrajectoryRow>& rows) {
  write_trajectory_header(out);
  for (const TrajectoryRow& r : rows) write_trajectory_row(out, r.trajectory, r.step);
}

struct HistogramRow {
  Variant variant = Variant::IPBMR;
  Cost bucket;
  std::uint64_t count = 0;
};

struct VariantReturns {
  Variant variant = Variant::IPBMR;
  RunResult run;

  // mean cost over PB returns, in the active basis of each return
  double mean_falsified() const {
    long double sum = 0;
    std::uint64_t n = 0;
    for (const auto& [cost, count] : run.pb_return_costs) {
      sum += static_cast<long double>(cost.hard > 0 ? cost.hard : cost.soft) * count;
      n += count;
    }
    return n ? static_cast<double>(sum / n) : 0.0;
  }
};

/// One run per variant under the same budget, collecting the costs returned
/// by every path-breaking call.
inline std::vector<VariantReturns> pb_return_histogram(const Formula& f, const std::vector<Variant>& variants,
                                                       const SolverConfig& base) {
  std::vector<VariantReturns> out;
  for (Variant v : variants) {
    SolverConfig config = base;
    config.variant = v;
    out.push_back(VariantReturns{v, run(f, config)});
  }
  return out;
}

inline std::vector<HistogramRow> histogram_rows(const std::vector<VariantReturns>& returns) {
  std::vector<HistogramRow> rows;
  for (const VariantReturns& r : returns)
    for (const auto& [cost, count] : r.run.pb_return_costs) rows.push_back(HistogramRow{r.variant, cost, count});
  return rows;
}

inline void write_histogram_csv(std::ostream& out, const std::vector<HistogramRow>& rows) {
  out << "variant,cost_bucket,count\n";
  for (const HistogramRow& r : rows) out << to_string(r.variant) << ',' << format_cost(r.bucket) << ',' << r.count << '\n';
}

}  // namespace ipbmr
