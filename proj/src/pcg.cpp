#include "ntd/pcg.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

#include "ntd/errors.hpp"
#include "ntd/vector_ops.hpp"

namespace ntd {

Ilu0Preconditioner::Ilu0Preconditioner(const BandedMatrix& a, int workers)
    : ilu_(build_block_ilu0(a, workers)), workers_(workers) {}

void Ilu0Preconditioner::apply(std::span<const double> r, std::span<double> z) {
  ilu0_apply(ilu_, r, z, workers_);
}

NtdPreconditioner::NtdPreconditioner(const BandedMatrix& a, int workers,
                                     const LineSolveConfig& line)
    : bands_(factor_level3(a, workers, line)), solver_(bands_, {workers, line}) {}

void NtdPreconditioner::apply(std::span<const double> r, std::span<double> z) {
  solver_.apply(r, z);
}

CombinedPreconditioner::CombinedPreconditioner(const BandedMatrix& a, int workers,
                                               const LineSolveConfig& line, Combination mode)
    : a_(a),
      workers_(workers),
      mode_(mode),
      ilu_(build_block_ilu0(a, workers)),
      bands_(factor_level3(a, workers, line)),
      solver_(bands_, {workers, line}),
      w_(a.rows()),
      t_(a.rows()) {}

void CombinedPreconditioner::apply(std::span<const double> r, std::span<double> z) {
  ilu0_apply(ilu_, r, w_, workers_);
  spmv(a_, w_, t_, workers_);
  subtract(r, t_, t_, workers_);
  solver_.apply(t_, z);
  axpy(1.0, w_, z, workers_);
  if (mode_ == Combination::kTwoStage) return;

  spmv(a_, z, t_, workers_);
  subtract(r, t_, t_, workers_);
  ilu0_apply(ilu_, t_, w_, workers_);
  axpy(1.0, w_, z, workers_);
}

SolveStats pcg(const BandedMatrix& a, std::span<const double> b, std::span<double> x,
               Preconditioner* precond, const PcgOptions& opts) {
  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();
  const std::size_t n = a.rows();
  if (b.size() != n || x.size() != n) throw DimensionError("pcg: length mismatch");
  const int w = opts.workers;

  SolveStats stats;
  std::ranges::fill(x, 0.0);
  const double bnorm = norm2(b, w);
  if (bnorm == 0.0) {
    stats.converged = true;
    stats.solve_seconds = std::chrono::duration<double>(clock::now() - t0).count();
    return stats;
  }

  std::vector<double> r(b.begin(), b.end());
  std::vector<double> z(n), p(n), q(n), t(n);
  const auto precondition = [&] {
    if (precond != nullptr) {
      precond->apply(r, z);
    } else {
      std::ranges::copy(r, z.begin());
    }
  };

  precondition();
  std::ranges::copy(z, p.begin());
  double rz = dot(r, z, w);

  for (std::size_t it = 1; it <= opts.max_iters; ++it) {
    spmv(a, p, q, w);
    const double alpha = rz / dot(p, q, w);
    axpy(alpha, p, x, w);
    axpy(-alpha, q, r, w);
    if (opts.on_iterate) opts.on_iterate(it, x);

    spmv(a, x, t, w);
    subtract(b, t, t, w);
    const double relres = norm2(t, w) / bnorm;
    if (!std::isfinite(relres) || !std::isfinite(alpha)) {
      throw DivergenceError("pcg: non-finite iterate at iteration " + std::to_string(it));
    }
    stats.iterations = it;
    stats.relres_history.push_back(relres);
    if (relres < opts.tol) {
      stats.converged = true;
      break;
    }

    precondition();
    const double rz_next = dot(r, z, w);
    const double beta = rz_next / rz;
    rz = rz_next;
    xpby(z, beta, p, w);
  }

  subtract(r, t, t, w);
  stats.residual_drift = norm2(t, w) / bnorm;
  stats.solve_seconds = std::chrono::duration<double>(clock::now() - t0).count();
  return stats;
}

}  // namespace ntd
