#include "ntd/bench.hpp"

#include <chrono>
#include <cmath>
#include <iomanip>
#include <memory>
#include <ostream>
#include <sstream>
#include <stdexcept>


namespace ntd {

PrecondKind parse_precond(std::string_view s) {
  if (s == "ntd+ilu0") return PrecondKind::kNtdIlu0;
  if (s == "ntd") return PrecondKind::kNtd;
  if (s == "ilu0") return PrecondKind::kIlu0;
  if (s == "none") return PrecondKind::kNone;
  throw std::invalid_argument("unknown preconditioner '" + std::string(s) + "'");
}

RhsMode parse_rhs(std::string_view s) {
  if (s == "ones") return RhsMode::kOnes;
  if (s == "manufactured") return RhsMode::kManufacturedOnes;
  throw std::invalid_argument("unknown rhs mode '" + std::string(s) + "'");
}

OutputFormat parse_format(std::string_view s) {
  if (s == "json") return OutputFormat::kJson;
  if (s == "csv") return OutputFormat::kCsv;
  if (s == "table") return OutputFormat::kTable;
  throw std::invalid_argument("unknown output format '" + std::string(s) + "'");
}

Combination parse_combination(std::string_view s) {
  if (s == "symmetric") return Combination::kSymmetric;
  if (s == "two-stage") return Combination::kTwoStage;
  throw std::invalid_argument("unknown combination '" + std::string(s) + "'");
}

std::string to_string(Combination c) {
  return c == Combination::kSymmetric ? "symmetric" : "two-stage";
}

std::string to_string(PrecondKind p) {
  switch (p) {
    case PrecondKind::kNtdIlu0: return "ntd+ilu0";
    case PrecondKind::kNtd: return "ntd";
    case PrecondKind::kIlu0: return "ilu0";
    case PrecondKind::kNone: return "none";
  }
  return "?";
}

std::string to_string(RhsMode m) {
  return m == RhsMode::kOnes ? "ones" : "manufactured";
}

void BenchConfig::validate() const {
  if (matrix_type < 1 || matrix_type > 3) throw std::invalid_argument("--type must be 1, 2 or 3");
  if (n < 1) throw std::invalid_argument("--n must be >= 1");
  if (!(tol > 0.0) || !std::isfinite(tol)) throw std::invalid_argument("--tol must be positive");
  if (workers != 1 && workers != 2 && workers != 4) {
    throw std::invalid_argument("--workers must be 1, 2 or 4");
  }
  if (n * n * n < 2 && (precond == PrecondKind::kIlu0 || precond == PrecondKind::kNtdIlu0)) {
    throw std::invalid_argument("block ILU0 needs at least two rows");
  }
}

namespace {

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point t0) {
  return std::chrono::duration<double>(clock_type::now() - t0).count();
}

std::unique_ptr<Preconditioner> make_preconditioner(const BenchConfig& cfg,
                                                    const BandedMatrix& a, const BenchHooks& hooks) {
  std::unique_ptr<Preconditioner> p;
  switch (cfg.precond) {
    case PrecondKind::kNtdIlu0: {
      auto c = std::make_unique<CombinedPreconditioner>(a, cfg.workers, LineSolveConfig{},
                                                        cfg.combination);
      if (hooks.on_preconditioner) hooks.on_preconditioner(c->ntd_bands());
      p = std::move(c);
      break;
    }
    case PrecondKind::kNtd: {
      auto c = std::make_unique<NtdPreconditioner>(a, cfg.workers);
      if (hooks.on_preconditioner) hooks.on_preconditioner(c->bands());
      p = std::move(c);
      break;
    }
    case PrecondKind::kIlu0:
      p = std::make_unique<Ilu0Preconditioner>(a, cfg.workers);
      break;
    case PrecondKind::kNone:
      break;
  }
  return p;
}

BenchReport solve_assembled(const BenchConfig& cfg, const BandedMatrix& a,
                            std::span<const double> b, const BenchHooks& hooks) {
  BenchReport rep;
  rep.config = cfg;
  rep.rows = a.rows();

  const auto t_setup = clock_type::now();
  auto precond = make_preconditioner(cfg, a, hooks);
  rep.setup_seconds = seconds_since(t_setup);

  rep.solution.assign(a.rows(), 0.0);
  const SolveStats stats =
      pcg(a, b, rep.solution, precond.get(), PcgOptions{cfg.tol, cfg.max_iters, cfg.workers, {}});
  rep.solve_seconds = stats.solve_seconds;
  rep.overall_seconds = rep.setup_seconds + rep.solve_seconds;
  rep.iterations = stats.iterations;
  rep.relres = stats.final_relres();
  rep.converged = stats.converged;
  rep.residual_history = stats.relres_history;
  return rep;
}

}  // namespace

BenchReport run_benchmark(const BenchConfig& cfg, const BenchHooks& hooks) {
  cfg.validate();
  const auto t_asm = clock_type::now();
  const BandedMatrix a =
      assemble(GridSpec::cube(cfg.n), coefficient_kind_from_int(cfg.matrix_type), cfg.workers);
  const DenseVector b = make_rhs(a, cfg.rhs);
  const double assembly = seconds_since(t_asm);
  if (hooks.on_matrix) hooks.on_matrix(a);

  BenchReport rep = solve_assembled(cfg, a, b, hooks);
  rep.assembly_seconds = assembly;
  return rep;
}

std::vector<SpeedupRow> speedup_probe(const BenchConfig& cfg) {
  cfg.validate();
  const BandedMatrix a =
      assemble(GridSpec::cube(cfg.n), coefficient_kind_from_int(cfg.matrix_type), cfg.workers);
  const DenseVector b = make_rhs(a, cfg.rhs);
  std::vector<SpeedupRow> rows;
  for (int w : {1, 2, 4}) {
    BenchConfig c = cfg;
    c.workers = w;
    const BenchReport rep = solve_assembled(c, a, b, {});
    SpeedupRow row{w, rep.solve_seconds, 1.0, rep.iterations};
    if (!rows.empty() && rep.solve_seconds > 0.0) row.speedup = rows.front().solve_seconds / rep.solve_seconds;
    rows.push_back(row);
  }
  return rows;
}

nlohmann::json to_json(const BenchReport& r) {
  return nlohmann::json{
      {"type", r.config.matrix_type},
      {"n", r.config.n},
      {"rows", r.rows},
      {"tol", r.config.tol},
      {"max_iters", r.config.max_iters},
      {"workers", r.config.workers},
      {"rhs", to_string(r.config.rhs)},
      {"precond", to_string(r.config.precond)},
      {"combination", to_string(r.config.combination)},
      {"assembly_s", r.assembly_seconds},
      {"setup_s", r.setup_seconds},
      {"solve_s", r.solve_seconds},
      {"overall_s", r.overall_seconds},
      {"iters", r.iterations},
      {"relres", r.relres},
      {"converged", r.converged},
      {"residual_history", r.residual_history},
  };
}

nlohmann::json to_json(const std::vector<SpeedupRow>& rows) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& r : rows) {
    out.push_back({{"workers", r.workers},
                   {"solve_s", r.solve_seconds},
                   {"speedup", r.speedup},
                   {"iters", r.iterations}});
  }
  return out;
}

std::string csv_header() { return "type,rows,tol,setup_s,solve_s,overall_s,iters,relres"; }

std::string to_csv_row(const BenchReport& r) {
  std::ostringstream s;
  s << r.config.matrix_type << ',' << r.rows << ',' << std::scientific << std::setprecision(2)
    << r.config.tol << ',' << std::fixed << std::setprecision(6) << r.setup_seconds << ','
    << r.solve_seconds << ',' << r.overall_seconds << ',' << r.iterations << ','
    << std::scientific << std::setprecision(6) << r.relres;
  return s.str();
}

void write_report(std::ostream& out, const BenchReport& r, OutputFormat fmt) {
  switch (fmt) {
    case OutputFormat::kJson:
      out << to_json(r).dump(2) << '\n';
      break;
    case OutputFormat::kCsv:
      out << csv_header() << '\n' << to_csv_row(r) << '\n';
      break;
    case OutputFormat::kTable:
      out << std::left << std::setw(8) << "type" << std::setw(12) << "rows" << std::setw(10)
          << "tol" << std::setw(10) << "setup" << std::setw(10) << "solve" << std::setw(10)
          << "overall" << std::setw(7) << "iters" << "relres\n";
      out << std::setw(8) << r.config.matrix_type << std::setw(12) << r.rows << std::setw(10)
          << std::scientific << std::setprecision(2) << r.config.tol << std::fixed
          << std::setprecision(3) << std::setw(10) << r.setup_seconds << std::setw(10)
          << r.solve_seconds << std::setw(10) << r.overall_seconds << std::setw(7) << r.iterations
          << std::scientific << std::setprecision(3) << r.relres
          << (r.converged ? "" : "  (not converged)") << '\n';
      break;
  }
}

void write_speedup(std::ostream& out, const std::vector<SpeedupRow>& rows, OutputFormat fmt) {
  switch (fmt) {
    case OutputFormat::kJson:
      out << to_json(rows).dump(2) << '\n';
      break;
    case OutputFormat::kCsv:
      out << "workers,solve_s,speedup,iters\n";
      for (const auto& r : rows) {
        out << r.workers << ',' << std::fixed << std::setprecision(6) << r.solve_seconds << ','
            << std::setprecision(3) << r.speedup << ',' << r.iterations << '\n';
      }
      break;
    case OutputFormat::kTable:
      out << std::left << std::setw(9) << "workers" << std::setw(12) << "solve[s]" << std::setw(9)
          << "speedup" << "iters\n";
      for (const auto& r : rows) {
        out << std::setw(9) << r.workers << std::fixed << std::setprecision(3) << std::setw(12)
            << r.solve_seconds << std::setw(9) << r.speedup << r.iterations << '\n';
      }
      break;
  }
}

}  // namespace ntd
