#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "ntd/banded_matrix.hpp"
#include "ntd/ntd_factor.hpp"
#include "ntd/pcg.hpp"
#include "ntd/problem.hpp"

namespace ntd {

enum class PrecondKind { kNtdIlu0, kNtd, kIlu0, kNone };
enum class OutputFormat { kJson, kCsv, kTable };

PrecondKind parse_precond(std::string_view s);
RhsMode parse_rhs(std::string_view s);
OutputFormat parse_format(std::string_view s);
Combination parse_combination(std::string_view s);
std::string to_string(PrecondKind p);
std::string to_string(RhsMode m);
std::string to_string(Combination c);

struct BenchConfig {
  int matrix_type = 1;
  std::size_t n = 50;
  double tol = 1e-7;
  std::size_t max_iters = 200;
  int workers = 4;
  RhsMode rhs = RhsMode::kOnes;
  PrecondKind precond = PrecondKind::kNtdIlu0;
  Combination combination = Combination::kSymmetric;  // only used by ntd+ilu0
  OutputFormat format = OutputFormat::kTable;

  /// Throws std::invalid_argument describing the first bad field.
  void validate() const;
};

struct BenchReport {
  BenchConfig config;
  std::size_t rows = 0;
  double assembly_seconds = 0.0;  // not part of overall
  double setup_seconds = 0.0;     // preconditioner construction
  double solve_seconds = 0.0;
  double overall_seconds = 0.0;   // setup + solve
  std::size_t iterations = 0;
  double relres = 1.0;
  bool converged = false;
  std::vector<double> residual_history;
  DenseVector solution;
};

/// Optional observers for debug exports.
struct BenchHooks {
  std::function<void(const BandedMatrix&)> on_matrix;
  std::function<void(const PreconBands&)> on_preconditioner;
};

/// Assemble, factor (timed as setup), run PCG (timed as solve).
BenchReport run_benchmark(const BenchConfig& cfg, const BenchHooks& hooks = {});

struct SpeedupRow {
  int workers = 1;
  double solve_seconds = 0.0;
  double speedup = 1.0;  // 1-worker time / this time
  std::size_t iterations = 0;
};

/// Repeats the configured solve with 1, 2 and 4 workers.
std::vector<SpeedupRow> speedup_probe(const BenchConfig& cfg);

nlohmann::json to_json(const BenchReport& r);
nlohmann::json to_json(const std::vector<SpeedupRow>& rows);
std::string csv_header();
std::string to_csv_row(const BenchReport& r);
void write_report(std::ostream& out, const BenchReport& r, OutputFormat fmt);
void write_speedup(std::ostream& out, const std::vector<SpeedupRow>& rows, OutputFormat fmt);

}  // namespace ntd
