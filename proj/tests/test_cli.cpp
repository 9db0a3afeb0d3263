#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"

using namespace ipbmr;
namespace fs = std::filesystem;

namespace {

struct CliResult {
  int code;
  std::string out, err;
};

CliResult call(std::vector<std::string> args) {
  args.insert(args.begin(), "ipbmr");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  int code = cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("ipbmr_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    example_ = write("example.cnf", "p cnf 3 3\n1 -2 0\n2 3 0\n-1 3 0\n");
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write(const std::string& name, const std::string& text) {
    const fs::path p = dir_ / name;
    std::ofstream(p) << text;
    return p.string();
  }
  static std::string read(const fs::path& p) {
    std::ifstream in(p);
    return std::string(std::istreambuf_iterator<char>(in), {});
  }

  fs::path dir_;
  std::string example_;
};

std::vector<std::string> lines_starting(const std::string& text, char c) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);)
    if (!line.empty() && line[0] == c) out.push_back(line);
  return out;
}

}  // namespace

TEST_F(Cli, SolveExample) {
  CliResult r = call({"solve", example_, "--seed", "1"});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  auto o = lines_starting(r.out, 'o');
  ASSERT_FALSE(o.empty());
  EXPECT_EQ(o.back(), "o 0");
  EXPECT_EQ(lines_starting(r.out, 's'), std::vector<std::string>{"s OPTIMUM FOUND"});
  auto v = lines_starting(r.out, 'v');
  ASSERT_EQ(v.size(), 1u);
  std::istringstream in(v[0]);
  cli::SolutionClaim claim = cli::read_solution(in, 3);
  EXPECT_EQ(evaluate(parse_dimacs(read(example_)), claim.assignment), Cost{});
}

TEST_F(Cli, SolveDeterministicWithFlipBudget) {
  GeneratorSpec spec;
  spec.num_vars = 80;
  spec.num_clauses = 400;
  spec.seed = 3;
  std::ostringstream text;
  write_dimacs(text, generate(spec));
  const std::string path = write("r.cnf", text.str());
  CliResult a = call({"solve", path, "--seed", "7", "--max-flips", "20000"});
  CliResult b = call({"solve", path, "--seed", "7", "--max-flips", "20000"});
  EXPECT_EQ(a.code, cli::kOk);
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(lines_starting(a.out, 's'), std::vector<std::string>{"s UNKNOWN"});
  // o values never increase
  auto o = lines_starting(a.out, 'o');
  for (std::size_t i = 1; i < o.size(); ++i) EXPECT_LT(std::stoull(o[i].substr(2)), std::stoull(o[i - 1].substr(2)));
}

TEST_F(Cli, SolvePartialPrintsOnlyFeasibleIncumbents) {
  const std::string path = write("p.wcnf", "p wcnf 2 3 10\n10 1 0\n10 -1 0\n3 2 0\n");
  CliResult r = call({"solve", path, "--max-flips", "1000"});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  EXPECT_TRUE(lines_starting(r.out, 'o').empty());
  EXPECT_EQ(lines_starting(r.out, 's'), std::vector<std::string>{"s UNKNOWN"});
}

TEST_F(Cli, SolveEchoesConfig) {
  CliResult r = call({"solve", example_, "--industrial", "--variant", "no-break", "--alpha", "5", "--max-flips", "50"});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  EXPECT_NE(r.out.find("variant=IPBMR-noBreak alpha=5 P=0.2 max_mutations=3"), std::string::npos) << r.out;
}

TEST_F(Cli, SolveWritesTrajectory) {
  const std::string traj = (dir_ / "t.csv").string();
  CliResult r = call({"solve", example_, "--trajectory", traj, "--variant", "no-break"});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  EXPECT_EQ(read(traj).substr(0, 8), "pb_call,");
}

TEST_F(Cli, CheckAcceptsOwnOutputAndRejectsTampering) {
  CliResult solved = call({"solve", example_});
  const std::string good = write("good.out", solved.out);
  EXPECT_EQ(call({"check", example_, good}).code, cli::kOk);

  EXPECT_EQ(call({"check", example_, write("bits.out", "o 0\nv 001\n")}).code, cli::kOk);
  EXPECT_EQ(call({"check", example_, write("tampered.out", "o 0\nv -1 2 3\n")}).code, cli::kCheckFailed);
  EXPECT_EQ(call({"check", example_, write("wrong_cost.out", "o 1\nv -1 -2 3\n")}).code, cli::kCheckFailed);
  EXPECT_EQ(call({"check", example_, write("no_o.out", "v -1 -2 3\n")}).code, cli::kCheckFailed);
  EXPECT_EQ(call({"check", example_, write("garbage.out", "o 0\nv 1 x\n")}).code, cli::kParseError);
  EXPECT_EQ(call({"check", example_, (dir_ / "missing.out").string()}).code, cli::kParseError);
}

TEST_F(Cli, ExitCodes) {
  EXPECT_EQ(call({}).code, cli::kBadFlags);
  EXPECT_EQ(call({"solve", example_, "--bogus"}).code, cli::kBadFlags);
  EXPECT_EQ(call({"solve", example_, "--variant", "greedy"}).code, cli::kBadFlags);
  EXPECT_EQ(call({"solve", example_, "--prob-p", "1.5"}).code, cli::kBadFlags);
  EXPECT_EQ(call({"solve", example_, "--alpha", "0"}).code, cli::kBadFlags);
  EXPECT_EQ(call({"solve", example_, "--seed", "abc"}).code, cli::kBadFlags);
  EXPECT_EQ(call({"solve", write("bad.cnf", "p cnf 2 1\n1 3 0\n")}).code, cli::kParseError);
  EXPECT_EQ(call({"solve", (dir_ / "nope.cnf").string()}).code, cli::kParseError);
  EXPECT_EQ(call({"--help"}).code, cli::kOk);
}

TEST_F(Cli, GenerateRoundTrips) {
  CliResult r = call({"generate", "--vars", "30", "--clauses", "100", "--mode", "partial", "--max-weight", "9",
                      "--hard-fraction", "0.2", "--seed", "4"});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  Formula f = parse_dimacs(r.out);
  EXPECT_EQ(f.num_vars(), 30u);
  EXPECT_EQ(f.mode(), Mode::WeightedPartial);
  const std::string out = (dir_ / "g.wcnf").string();
  EXPECT_EQ(call({"generate", "--vars", "30", "--clauses", "100", "--mode", "partial", "--max-weight", "9",
                  "--hard-fraction", "0.2", "--seed", "4", "--out", out})
                .code,
            cli::kOk);
  EXPECT_EQ(read(out), r.out);
  EXPECT_EQ(call({"generate", "--vars", "2", "--clause-length", "3"}).code, cli::kBadFlags);
}

TEST_F(Cli, BenchWritesCsvs) {
  fs::create_directories(dir_ / "inst");
  for (int i = 0; i < 2; ++i)
    ASSERT_EQ(call({"generate", "--vars", "25", "--clauses", "100", "--seed", std::to_string(i), "--out",
                    (dir_ / "inst" / ("i" + std::to_string(i) + ".cnf")).string()})
                  .code,
              cli::kOk);
  const std::string out = (dir_ / "results").string();
  CliResult r = call({"bench", (dir_ / "inst").string(), "--variant", "ipbmr", "--variant", "ipbr", "--runs", "3",
                      "--max-flips", "2000", "--out", out});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  std::istringstream runs(read(fs::path(out) / "runs.csv"));
  auto records = read_runs_csv(runs);
  EXPECT_EQ(records.size(), 12u);
  const std::string summary = read(fs::path(out) / "summary.csv");
  EXPECT_EQ(summary, r.out);
  std::ostringstream again;
  write_summary_csv(again, summarize(records));
  EXPECT_EQ(again.str(), summary);
}

TEST_F(Cli, TrajectoryAndHistogram) {
  ASSERT_EQ(call({"generate", "--vars", "20", "--clauses", "85", "--out", (dir_ / "x.cnf").string()}).code, cli::kOk);
  CliResult t = call({"trajectory", (dir_ / "x.cnf").string(), "--runs", "3", "--out", dir_.string()});
  ASSERT_EQ(t.code, cli::kOk) << t.err;
  const std::string csv = read(dir_ / "trajectory.csv");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 61);
  CliResult h = call({"histogram", (dir_ / "x.cnf").string(), "--variant", "ipbmr", "--max-flips", "3000"});
  ASSERT_EQ(h.code, cli::kOk) << h.err;
  EXPECT_EQ(h.out.substr(0, h.out.find('\n')), "variant,cost_bucket,count");
}
