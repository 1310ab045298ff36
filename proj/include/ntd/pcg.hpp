#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "ntd/banded_matrix.hpp"
#include "ntd/ilu0.hpp"
#include "ntd/ntd_factor.hpp"
#include "ntd/ntd_solve.hpp"

namespace ntd {

/// z = B^-1 r.
class Preconditioner {
 public:
  virtual ~Preconditioner() = default;
  virtual void apply(std::span<const double> r, std::span<double> z) = 0;
};

class Ilu0Preconditioner final : public Preconditioner {
 public:
  Ilu0Preconditioner(const BandedMatrix& a, int workers);
  void apply(std::span<const double> r, std::span<double> z) override;
  const ILU0Factors& factors() const noexcept { return ilu_; }

 private:
  ILU0Factors ilu_;
  int workers_;
};

class NtdPreconditioner final : public Preconditioner {
 public:
  NtdPreconditioner(const BandedMatrix& a, int workers, const LineSolveConfig& line = {});
  void apply(std::span<const double> r, std::span<double> z) override;
  const PreconBands& bands() const noexcept { return bands_; }

 private:
  PreconBands bands_;
  NtdSolver solver_;
};

/// How the ILU0 smoother and the NTD solve are chained.
enum class Combination {
  /// w = B_ilu^-1 r, z = w + B_ntd^-1 (r - A w). Not symmetric.
  kTwoStage,
  /// Two-stage result followed by a second smoothing step
  /// z += B_ilu^-1 (r - A z). Symmetric whenever A, B_ilu and B_ntd are.
  kSymmetric,
};

/// Multiplicative combination of a block-ILU0 smoother with the NTD solve.
/// The two-stage form is
///   B_c^-1 = B_ntd^-1 + B_ilu^-1 - B_ntd^-1 A B_ilu^-1.
class CombinedPreconditioner final : public Preconditioner {
 public:
  CombinedPreconditioner(const BandedMatrix& a, int workers, const LineSolveConfig& line = {},
                         Combination mode = Combination::kSymmetric);
  void apply(std::span<const double> r, std::span<double> z) override;

  const PreconBands& ntd_bands() const noexcept { return bands_; }
  const ILU0Factors& ilu_factors() const noexcept { return ilu_; }

 private:
  const BandedMatrix& a_;
  int workers_;
  Combination mode_;
  ILU0Factors ilu_;
  PreconBands bands_;
  NtdSolver solver_;
  std::vector<double> w_, t_;
};

struct PcgOptions {
  double tol = 1e-7;
  std::size_t max_iters = 200;
  int workers = 1;
  /// Called with (iteration, x) after every update of x.
  std::function<void(std::size_t, std::span<const double>)> on_iterate;
};

struct SolveStats {
  std::size_t iterations = 0;
  std::vector<double> relres_history;  // ||b - A x_k|| / ||b|| for k = 1..iterations
  bool converged = false;
  double setup_seconds = 0.0;
  double solve_seconds = 0.0;
  /// Recursively updated residual at exit, relative to ||b||, minus the true one.
  double residual_drift = 0.0;

  double final_relres() const noexcept {
    return relres_history.empty() ? 1.0 : relres_history.back();
  }
};

/// Preconditioned conjugate gradients from x = 0.
///
/// Stops once the recomputed residual ||b - A x|| / ||b|| drops below tol, or
/// after max_iters (converged = false). A null preconditioner means B = I.
/// Throws DivergenceError if an iterate becomes non-finite.
SolveStats pcg(const BandedMatrix& a, std::span<const double> b, std::span<double> x,
               Preconditioner* precond, const PcgOptions& opts);

}  // namespace ntd
