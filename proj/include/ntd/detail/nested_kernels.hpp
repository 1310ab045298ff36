#pragma once

// Line- and plane-level substitution kernels shared by the factorisation
// (which needs neighbour inverses for the filter corrections) and the solve.

#include <barrier>
#include <cstddef>
#include <span>
#include <vector>

#include "ntd/chain_solve.hpp"
#include "ntd/ntd_factor.hpp"

namespace ntd::detail {

/// Per-worker line buffers.
struct LineScratch {
  std::vector<double> rhs, res, off, coef;
  explicit LineScratch(std::size_t nx) : rhs(nx), res(nx), off(nx), coef(nx) {}
};

/// Ranks sharing one plane solve. Rank 0 owns the lines up to and including
/// the twist line, rank 1 the lines after it; a single rank owns everything.
struct PairContext {
  int rank = 0;
  int size = 1;
  std::barrier<>* barrier = nullptr;

  void sync() const {
    if (size > 1) barrier->arrive_and_wait();
  }
  bool runs_upper_half() const noexcept { return rank == 0; }
  bool runs_lower_half() const noexcept { return size == 1 || rank == 1; }
};

inline void bidiagonal(const LineSolveConfig& cfg, const BidiagonalSystem& sys,
                       std::span<const double> rhs, std::span<double> x, Sweep dir, double seed,
                       std::span<double> coef) {
  if (cfg.base == BaseCase::kChain) {
    chain_bidiagonal_solve(sys, rhs, x, dir, cfg.lanes, seed, coef);
  } else {
    sequential_bidiagonal_solve(sys, rhs, x, dir, seed);
  }
}

/// Solves (M + L1)(I + M^-1 U1) x = rhs on the line starting at `row0`.
/// `rhs` and `x` may alias.
inline void solve_line(const PreconBands& pre, std::size_t row0, std::span<const double> rhs,
                       std::span<double> x, LineScratch& s, const LineSolveConfig& cfg) {
  const std::size_t n = pre.dims.nx;
  const std::size_t jj = pre.twist1 - 1;
  const std::span<const double> l(pre.l1.data() + row0, n);
  const std::span<const double> u(pre.u1.data() + row0, n);
  const std::span<const double> r(pre.m_recip.data() + row0, n);
  const std::size_t tail = n - jj - 1;

  // Lower factor: outer halves converge on the twist point.
  if (jj > 0) {
    bidiagonal(cfg, {r.first(jj), l.first(jj)}, rhs.first(jj), x.first(jj), Sweep::kForward, 0.0,
               s.coef);
  }
  if (tail > 0) {
    bidiagonal(cfg, {r.last(tail), u.last(tail)}, rhs.last(tail), x.last(tail), Sweep::kBackward,
               0.0, s.coef);
  }
  double mid = rhs[jj];
  if (jj > 0) mid -= l[jj] * x[jj - 1];
  if (tail > 0) mid -= u[jj] * x[jj + 1];
  x[jj] = mid * r[jj];

  // Unit upper factor: the twist point is final, halves move outwards.
  if (jj > 0) {
    for (std::size_t a = 0; a < jj; ++a) s.off[a] = u[a] * r[a];
    bidiagonal(cfg, {{}, std::span<const double>(s.off).first(jj)}, x.first(jj), x.first(jj),
               Sweep::kBackward, x[jj], s.coef);
  }
  if (tail > 0) {
    for (std::size_t a = jj + 1; a < n; ++a) s.off[a] = l[a] * r[a];
    bidiagonal(cfg, {{}, std::span<const double>(s.off).last(tail)}, x.last(tail), x.last(tail),
               Sweep::kForward, x[jj], s.coef);
  }
}

/// Solves (T + L2)(I + T^-1 U2) out = rhs on plane `plane`.
///
/// `rhs_line(j, dst)` writes the right-hand side of line j into dst. Each
/// rank only evaluates rhs_line for, and only writes, the lines it owns
/// (see PairContext), except that the twist line belongs to rank 0.
template <class RhsLine>
void solve_plane(const PreconBands& pre, std::size_t plane, RhsLine&& rhs_line,
                 std::span<double> out, const PairContext& ctx, LineScratch& s,
                 const LineSolveConfig& cfg) {
  const std::size_t nx = pre.dims.nx;
  const std::size_t ny = pre.dims.ny;
  const std::size_t base = plane * pre.dims.plane_size();
  const std::size_t jj = pre.twist2 - 1;
  const double* l2 = pre.l2.data() + base;
  const double* u2 = pre.u2.data() + base;
  double* o = out.data();
  std::span<double> rhs(s.rhs);
  std::span<double> res(s.res);

  const auto line_out = [&](std::size_t j) { return out.subspan(j * nx, nx); };
  const auto from_below = [&](std::size_t j) {  // rhs -= l2 .* out(line j-1)
    const std::size_t o0 = j * nx;
    for (std::size_t a = 0; a < nx; ++a) rhs[a] -= l2[o0 + a] * o[o0 + a - nx];
  };
  const auto from_above = [&](std::size_t j) {  // rhs -= u2 .* out(line j+1)
    const std::size_t o0 = j * nx;
    for (std::size_t a = 0; a < nx; ++a) rhs[a] -= u2[o0 + a] * o[o0 + a + nx];
  };

  // Lower factor.
  if (ctx.runs_upper_half()) {
    for (std::size_t j = 0; j < jj; ++j) {
      rhs_line(j, rhs);
      if (j > 0) from_below(j);
      solve_line(pre, base + j * nx, rhs, line_out(j), s, cfg);
    }
  }
  if (ctx.runs_lower_half()) {
    for (std::size_t j = ny; j-- > jj + 1;) {
      rhs_line(j, rhs);
      if (j + 1 < ny) from_above(j);
      solve_line(pre, base + j * nx, rhs, line_out(j), s, cfg);
    }
  }
  ctx.sync();
  if (ctx.rank == 0) {
    rhs_line(jj, rhs);
    if (jj > 0) from_below(jj);
    if (jj + 1 < ny) from_above(jj);
    solve_line(pre, base + jj * nx, rhs, line_out(jj), s, cfg);
  }
  ctx.sync();

  // Unit upper factor: out_j -= T_j^-1 (U2 out_neighbour), moving away from the twist.
  if (ctx.runs_upper_half()) {
    for (std::size_t j = jj; j-- > 0;) {
      const std::size_t o0 = j * nx;
      for (std::size_t a = 0; a < nx; ++a) rhs[a] = u2[o0 + a] * o[o0 + a + nx];
      solve_line(pre, base + o0, rhs, res, s, cfg);
      for (std::size_t a = 0; a < nx; ++a) o[o0 + a] -= res[a];
    }
  }
  if (ctx.runs_lower_half()) {
    for (std::size_t j = jj + 1; j < ny; ++j) {
      const std::size_t o0 = j * nx;
      for (std::size_t a = 0; a < nx; ++a) rhs[a] = l2[o0 + a] * o[o0 + a - nx];
      solve_line(pre, base + o0, rhs, res, s, cfg);
      for (std::size_t a = 0; a < nx; ++a) o[o0 + a] -= res[a];
    }
  }
}

/// Lines of a plane owned by `ctx.rank`: [first, last).
inline std::pair<std::size_t, std::size_t> owned_lines(const PreconBands& pre,
                                                       const PairContext& ctx) {
  const std::size_t jj = pre.twist2 - 1;
  if (ctx.size == 1) return {0, pre.dims.ny};
  return ctx.rank == 0 ? std::pair<std::size_t, std::size_t>{0, jj + 1}
                       : std::pair<std::size_t, std::size_t>{jj + 1, pre.dims.ny};
}

/// out = P_plane^-1 in, single-threaded.
inline void apply_plane_inverse(const PreconBands& pre, std::size_t plane,
                                std::span<const double> in, std::span<double> out,
                                LineScratch& s, const LineSolveConfig& cfg) {
  const std::size_t nx = pre.dims.nx;
  solve_plane(
      pre, plane,
      [&](std::size_t j, std::span<double> dst) {
        for (std::size_t a = 0; a < nx; ++a) dst[a] = in[j * nx + a];
      },
      out, PairContext{}, s, cfg);
}

}  // namespace ntd::detail
