#pragma once

#include <barrier>
#include <memory>
#include <span>
#include <vector>

#include "ntd/banded_matrix.hpp"
#include "ntd/chain_solve.hpp"
#include "ntd/ntd_factor.hpp"
#include "ntd/worker_team.hpp"

namespace ntd {

struct NtdSolveOptions {
  int workers = 4;  // 1, 2 or 4
  LineSolveConfig line;
};

/// Applies B^-1 for a factored PreconBands.
///
/// With four workers, ranks {0,1} run the plane sweeps of the upper half of
/// the twisted plane recurrence and ranks {2,3} those of the lower half; in
/// every plane the two ranks of a pair split the line sweeps at the line
/// twist. Two workers split only the planes, one worker runs everything. The
/// arithmetic per entry is the same in every configuration, so results are
/// bitwise independent of the worker count.
///
/// Not reentrant: one apply() at a time per solver.
class NtdSolver {
 public:
  explicit NtdSolver(const PreconBands& pre, NtdSolveOptions opts = {});
  ~NtdSolver();

  NtdSolver(const NtdSolver&) = delete;
  NtdSolver& operator=(const NtdSolver&) = delete;

  void apply(std::span<const double> b, std::span<double> x);
  DenseVector apply(std::span<const double> b);

  const PreconBands& bands() const noexcept { return pre_; }
  int workers() const noexcept { return opts_.workers; }

 private:
  struct Pair;
  void run_rank(int rank, std::span<const double> b, std::span<double> x);

  const PreconBands& pre_;
  NtdSolveOptions opts_;
  std::vector<double> x_tmp_;  // upper-sweep corrections P_k^-1 U3 x_neighbour
  std::vector<std::unique_ptr<Pair>> pairs_;
  std::unique_ptr<std::barrier<>> team_barrier_;
  WorkerTeam team_;
};

/// One-shot convenience wrapper; spawns a team for the call.
DenseVector ntd_apply(const PreconBands& pre, std::span<const double> b, int workers = 4);

}  // namespace ntd
