#include "ntd/ntd_solve.hpp"

#include <string>

#include "ntd/detail/nested_kernels.hpp"
#include "ntd/errors.hpp"

namespace ntd {

struct NtdSolver::Pair {
  std::barrier<> barrier{2};
  std::vector<detail::LineScratch> scratch;  // one per rank in the pair
};

namespace {

int checked_workers(int w) {
  if (w != 1 && w != 2 && w != 4) {
    throw std::invalid_argument("NTD solve supports 1, 2 or 4 workers, got " + std::to_string(w));
  }
  return w;
}

}  // namespace

NtdSolver::NtdSolver(const PreconBands& pre, NtdSolveOptions opts)
    : pre_(pre),
      opts_{checked_workers(opts.workers), opts.line},
      x_tmp_(pre.rows(), 0.0),
      team_barrier_(std::make_unique<std::barrier<>>(opts.workers)),
      team_(opts.workers) {
  const int per_pair = opts_.workers == 4 ? 2 : 1;
  for (int p = 0; p < 2; ++p) {
    auto pair = std::make_unique<Pair>();
    for (int r = 0; r < per_pair; ++r) pair->scratch.emplace_back(pre.dims.nx);
    pairs_.push_back(std::move(pair));
  }
}

NtdSolver::~NtdSolver() = default;

void NtdSolver::apply(std::span<const double> b, std::span<double> x) {
  if (b.size() != pre_.rows() || x.size() != pre_.rows()) {
    throw DimensionError("ntd apply: vector length does not match " +
                         std::to_string(pre_.rows()) + " rows");
  }
  team_.run([&](int rank) { run_rank(rank, b, x); });
}

DenseVector NtdSolver::apply(std::span<const double> b) {
  DenseVector x(b.size());
  apply(b, x);
  return x;
}

void NtdSolver::run_rank(int rank, std::span<const double> b, std::span<double> x) {
  const GridDims g = pre_.dims;
  const std::size_t nx = g.nx;
  const std::size_t nxy = g.plane_size();
  const std::size_t nz = g.nz;
  const std::size_t jj = pre_.twist3 - 1;
  const int w = opts_.workers;
  const double* l3 = pre_.l3.data();
  const double* u3 = pre_.u3.data();
  const double* bb = b.data();
  double* xx = x.data();
  double* xt = x_tmp_.data();

  const auto context = [&](int pair) {
    detail::PairContext ctx;
    if (w == 4) {
      ctx.rank = rank % 2;
      ctx.size = 2;
      ctx.barrier = &pairs_[static_cast<std::size_t>(pair)]->barrier;
    }
    return ctx;
  };
  const auto scratch = [&](int pair, const detail::PairContext& ctx) -> detail::LineScratch& {
    return pairs_[static_cast<std::size_t>(pair)]->scratch[static_cast<std::size_t>(ctx.rank)];
  };
  const auto team_sync = [&] {
    if (w > 1) team_barrier_->arrive_and_wait();
  };
  const auto plane_x = [&](double* v, std::size_t k) { return std::span<double>(v + k * nxy, nxy); };

  // Lower factor, planes moving towards the twist plane.
  const auto lower_sweep = [&](int pair) {
    const auto ctx = context(pair);
    auto& s = scratch(pair, ctx);
    if (pair == 0) {
      for (std::size_t k = 0; k < jj; ++k) {
        const std::size_t base = k * nxy;
        detail::solve_plane(
            pre_, k,
            [&](std::size_t j, std::span<double> dst) {
              const std::size_t r0 = base + j * nx;
              for (std::size_t a = 0; a < nx; ++a) dst[a] = bb[r0 + a];
              if (k > 0) {
                for (std::size_t a = 0; a < nx; ++a) dst[a] -= l3[r0 + a] * xx[r0 + a - nxy];
              }
            },
            plane_x(xx, k), ctx, s, opts_.line);
      }
    } else {
      for (std::size_t k = nz; k-- > jj + 1;) {
        const std::size_t base = k * nxy;
        detail::solve_plane(
            pre_, k,
            [&](std::size_t j, std::span<double> dst) {
              const std::size_t r0 = base + j * nx;
              for (std::size_t a = 0; a < nx; ++a) dst[a] = bb[r0 + a];
              if (k + 1 < nz) {
                for (std::size_t a = 0; a < nx; ++a) dst[a] -= u3[r0 + a] * xx[r0 + a + nxy];
              }
            },
            plane_x(xx, k), ctx, s, opts_.line);
      }
    }
  };

  const auto twist_plane = [&] {
    const auto ctx = context(0);
    auto& s = scratch(0, ctx);
    const std::size_t base = jj * nxy;
    detail::solve_plane(
        pre_, jj,
        [&](std::size_t j, std::span<double> dst) {
          const std::size_t r0 = base + j * nx;
          for (std::size_t a = 0; a < nx; ++a) dst[a] = bb[r0 + a];
          if (jj > 0) {
            for (std::size_t a = 0; a < nx; ++a) dst[a] -= l3[r0 + a] * xx[r0 + a - nxy];
          }
          if (jj + 1 < nz) {
            for (std::size_t a = 0; a < nx; ++a) dst[a] -= u3[r0 + a] * xx[r0 + a + nxy];
          }
        },
        plane_x(xx, jj), ctx, s, opts_.line);
  };

  // Unit upper factor: x_k -= P_k^-1 (U3 x_neighbour), planes moving away from the twist.
  const auto upper_sweep = [&](int pair) {
    const auto ctx = context(pair);
    auto& s = scratch(pair, ctx);
    const auto [first, last] = detail::owned_lines(pre_, ctx);
    const auto finish = [&](std::size_t base) {
      for (std::size_t r = base + first * nx; r < base + last * nx; ++r) xx[r] -= xt[r];
    };
    if (pair == 0) {
      for (std::size_t k = jj; k-- > 0;) {
        const std::size_t base = k * nxy;
        detail::solve_plane(
            pre_, k,
            [&](std::size_t j, std::span<double> dst) {
              const std::size_t r0 = base + j * nx;
              for (std::size_t a = 0; a < nx; ++a) dst[a] = u3[r0 + a] * xx[r0 + a + nxy];
            },
            plane_x(xt, k), ctx, s, opts_.line);
        finish(base);
      }
    } else {
      for (std::size_t k = jj + 1; k < nz; ++k) {
        const std::size_t base = k * nxy;
        detail::solve_plane(
            pre_, k,
            [&](std::size_t j, std::span<double> dst) {
              const std::size_t r0 = base + j * nx;
              for (std::size_t a = 0; a < nx; ++a) dst[a] = l3[r0 + a] * xx[r0 + a - nxy];
            },
            plane_x(xt, k), ctx, s, opts_.line);
        finish(base);
      }
    }
  };

  if (w == 1) {
    lower_sweep(0);
    lower_sweep(1);
    twist_plane();
    upper_sweep(0);
    upper_sweep(1);
    return;
  }
  const int pair = (w == 4) ? rank / 2 : rank;
  lower_sweep(pair);
  team_sync();
  if (pair == 0) twist_plane();
  team_sync();
  upper_sweep(pair);
}

DenseVector ntd_apply(const PreconBands& pre, std::span<const double> b, int workers) {
  NtdSolver solver(pre, {workers, {}});
  return solver.apply(b);
}

}  // namespace ntd
