#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "json.hpp"
#include "ntd/bench.hpp"

using namespace ntd;

namespace {

struct CliResult {
  int status = -1;
  std::string out;
};

CliResult run_cli(const std::string& args) {
  const std::string cmd = std::string(NTD_BENCH_EXE) + " " + args + " 2>/dev/null";
  CliResult res;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (pipe == nullptr) return res;
  std::array<char, 4096> buf{};
  while (std::fgets(buf.data(), static_cast<int>(buf.size()), pipe) != nullptr) res.out += buf.data();
  const int raw = pclose(pipe);
  res.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return res;
}

BenchConfig small(int type, std::size_t n, double tol, PrecondKind p) {
  BenchConfig c;
  c.matrix_type = type;
  c.n = n;
  c.tol = tol;
  c.precond = p;
  return c;
}

}  // namespace

TEST(Bench, TinyPoissonWithoutPreconditioner) {
  const auto rep = run_benchmark(small(3, 2, 1e-10, PrecondKind::kNone));
  EXPECT_TRUE(rep.converged);
  EXPECT_LE(rep.iterations, 8u);
  EXPECT_EQ(rep.rows, 8u);
}

TEST(Bench, ReportInvariants) {
  for (auto p : {PrecondKind::kNtdIlu0, PrecondKind::kNtd, PrecondKind::kIlu0, PrecondKind::kNone}) {
    const auto rep = run_benchmark(small(1, 8, 1e-7, p));
    EXPECT_EQ(rep.iterations, rep.residual_history.size());
    EXPECT_DOUBLE_EQ(rep.overall_seconds, rep.setup_seconds + rep.solve_seconds);
    EXPECT_GE(rep.setup_seconds, 0.0);
    EXPECT_GE(rep.assembly_seconds, 0.0);
    EXPECT_EQ(rep.rows, 512u);
    if (!rep.residual_history.empty()) EXPECT_EQ(rep.relres, rep.residual_history.back());
  }
}

TEST(Bench, WorkerCountDoesNotChangeTheSolve) {
  auto c = small(2, 14, 1e-8, PrecondKind::kNtdIlu0);
  c.workers = 1;
  const auto r1 = run_benchmark(c);
  c.workers = 4;
  const auto r4 = run_benchmark(c);
  EXPECT_EQ(r1.iterations, r4.iterations);
  EXPECT_EQ(r1.solution, r4.solution);
}

TEST(Bench, ConfigValidation) {
  auto c = small(1, 4, 1e-7, PrecondKind::kNone);
  c.workers = 3;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = small(4, 4, 1e-7, PrecondKind::kNone);
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = small(1, 0, 1e-7, PrecondKind::kNone);
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = small(1, 4, 0.0, PrecondKind::kNone);
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = small(1, 1, 1e-7, PrecondKind::kIlu0);
  EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(Bench, Parsing) {
  EXPECT_EQ(parse_precond("ntd+ilu0"), PrecondKind::kNtdIlu0);
  EXPECT_EQ(parse_precond("none"), PrecondKind::kNone);
  EXPECT_EQ(parse_rhs("manufactured"), RhsMode::kManufacturedOnes);
  EXPECT_EQ(parse_format("csv"), OutputFormat::kCsv);
  EXPECT_EQ(parse_combination("two-stage"), Combination::kTwoStage);
  EXPECT_THROW(parse_precond("amg"), std::invalid_argument);
  EXPECT_THROW(parse_format("xml"), std::invalid_argument);
}

TEST(Bench, JsonSchema) {
  const auto rep = run_benchmark(small(2, 6, 1e-7, PrecondKind::kNtdIlu0));
  const auto j = to_json(rep);
  for (const char* key : {"type", "n", "rows", "tol", "max_iters", "workers", "rhs", "precond",
                          "combination", "assembly_s", "setup_s", "solve_s", "overall_s", "iters",
                          "relres", "converged", "residual_history"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  EXPECT_EQ(j["iters"].get<std::size_t>(), j["residual_history"].size());
  EXPECT_EQ(j["rows"].get<std::size_t>(), 216u);
}

TEST(Bench, CsvLayout) {
  EXPECT_EQ(csv_header(), "type,rows,tol,setup_s,solve_s,overall_s,iters,relres");
  const auto rep = run_benchmark(small(3, 5, 1e-7, PrecondKind::kIlu0));
  const auto row = to_csv_row(rep);
  EXPECT_EQ(std::count(row.begin(), row.end(), ','), 7);
  EXPECT_EQ(row.rfind("3,125,", 0), 0u);
}

TEST(Bench, SpeedupProbeBaseline) {
  const auto rows = speedup_probe(small(3, 10, 1e-7, PrecondKind::kNtdIlu0));
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0].workers, 1);
  EXPECT_EQ(rows[1].workers, 2);
  EXPECT_EQ(rows[2].workers, 4);
  EXPECT_EQ(rows[0].speedup, 1.0);
  EXPECT_EQ(rows[0].iterations, rows[2].iterations);
}

TEST(Cli, ConvergedRunExitsZeroWithJson) {
  const auto r = run_cli("--type 1 --n 6 --tol 1e-7 --format json");
  EXPECT_EQ(r.status, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_TRUE(j["converged"].get<bool>());
  EXPECT_EQ(j["precond"], "ntd+ilu0");
}

TEST(Cli, CsvOutput) {
  const auto r = run_cli("--type 3 --n 4 --precond ilu0 --format csv");
  EXPECT_EQ(r.status, 0);
  EXPECT_EQ(r.out.rfind("type,rows,tol,setup_s,solve_s,overall_s,iters,relres\n3,64,", 0), 0u);
}

TEST(Cli, IterationCapExitsThree) {
  const auto r = run_cli("--type 2 --n 8 --precond none --max-iters 2 --tol 1e-12");
  EXPECT_EQ(r.status, 3);
}

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run_cli("--workers 3").status, 2);
  EXPECT_EQ(run_cli("--type 7").status, 2);
  EXPECT_EQ(run_cli("--precond amg").status, 2);
  EXPECT_EQ(run_cli("--no-such-flag").status, 2);
  EXPECT_EQ(run_cli("--n 1 --precond ilu0").status, 2);
  EXPECT_EQ(run_cli("--precond ilu0 --dump-precond /dev/null").status, 2);
}

TEST(Cli, HelpExitsZero) { EXPECT_EQ(run_cli("--help").status, 0); }

TEST(Cli, DumpsMatrixAndPreconditioner) {
  const auto dir = std::filesystem::temp_directory_path() / "ntd_cli_dump";
  std::filesystem::create_directories(dir);
  const auto mtx = dir / "a.mtx";
  const auto bin = dir / "p.bin";
  const auto r = run_cli("--type 2 --n 3 --dump-matrix " + mtx.string() + " --dump-precond " +
                         bin.string());
  EXPECT_EQ(r.status, 0);
  std::ifstream in(mtx);
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "%%MatrixMarket matrix coordinate real general");
  EXPECT_EQ(std::filesystem::file_size(bin), 4u * 8u + 7u * 27u * 8u);
  std::filesystem::remove_all(dir);
}

TEST(Cli, SpeedupTable) {
  const auto r = run_cli("--type 3 --n 6 --speedup --format csv");
  EXPECT_EQ(r.status, 0);
  EXPECT_EQ(r.out.rfind("workers,solve_s,speedup,iters\n1,", 0), 0u);
}
