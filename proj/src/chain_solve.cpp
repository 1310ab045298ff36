#include "ntd/chain_solve.hpp"

#include <algorithm>
#include <cassert>

#include "ntd/errors.hpp"

namespace ntd {
namespace {

// Maps recurrence position p to array index.
template <Sweep Dir>
inline std::size_t at(std::size_t p, std::size_t len) {
  if constexpr (Dir == Sweep::kForward) {
    return p;
  } else {
    return len - 1 - p;
  }
}

template <Sweep Dir, bool Unit>
void sequential_impl(const double* dr, const double* off, const double* rhs, double* x,
                     std::size_t len, double seed) {
  double prev = seed;
  for (std::size_t p = 0; p < len; ++p) {
    const std::size_t i = at<Dir>(p, len);
    double v = rhs[i] - off[i] * prev;
    if constexpr (!Unit) v = v * dr[i];
    x[i] = v;
    prev = v;
  }
}

template <Sweep Dir, bool Unit>
void chain_impl(const double* dr, const double* off, const double* rhs, double* x,
                std::size_t len, std::size_t lanes, double seed, double* coef) {
  const std::size_t chunk = len / lanes;
  const std::size_t last_len = len - (lanes - 1) * chunk;

  // Pass 1: per-lane affine coefficients. x holds b, coef holds a.
  for (std::size_t t = 0; t < chunk; ++t) {
    for (std::size_t c = 0; c < lanes; ++c) {
      const std::size_t p = c * chunk + t;
      const std::size_t i = at<Dir>(p, len);
      double prev_b;
      double prev_a;
      if (t == 0) {
        prev_b = (c == 0) ? seed : 0.0;
        prev_a = 1.0;
      } else {
        const std::size_t q = at<Dir>(p - 1, len);
        prev_b = x[q];
        prev_a = coef[q];
      }
      double b = rhs[i] - off[i] * prev_b;
      double a = -(off[i] * prev_a);
      if constexpr (!Unit) {
        b = b * dr[i];
        a = a * dr[i];
      }
      x[i] = b;
      coef[i] = a;
    }
  }
  // Remainder of the last lane.
  for (std::size_t t = chunk; t < last_len; ++t) {
    const std::size_t p = (lanes - 1) * chunk + t;
    const std::size_t i = at<Dir>(p, len);
    const std::size_t q = at<Dir>(p - 1, len);
    double b = rhs[i] - off[i] * x[q];
    double a = -(off[i] * coef[q]);
    if constexpr (!Unit) {
      b = b * dr[i];
      a = a * dr[i];
    }
    x[i] = b;
    coef[i] = a;
  }

  // Pass 2: stitch lane boundaries. Lane 0 is already final.
  double entry = x[at<Dir>(chunk - 1, len)];
  std::size_t lane_start = chunk;
  for (std::size_t c = 1; c < lanes; ++c) {
    const std::size_t lane_len = (c + 1 == lanes) ? last_len : chunk;
    const double y = entry;
    // Pass 3: evaluate the affine forms of this lane.
    for (std::size_t t = 0; t < lane_len; ++t) {
      const std::size_t i = at<Dir>(lane_start + t, len);
      x[i] = coef[i] * y + x[i];
    }
    entry = x[at<Dir>(lane_start + lane_len - 1, len)];
    lane_start += lane_len;
  }
}

template <Sweep Dir>
void dispatch_sequential(const BidiagonalSystem& sys, std::span<const double> rhs,
                         std::span<double> x, double seed) {
  if (sys.diag_recip.empty()) {
    sequential_impl<Dir, true>(nullptr, sys.offdiag.data(), rhs.data(), x.data(), rhs.size(),
                               seed);
  } else {
    sequential_impl<Dir, false>(sys.diag_recip.data(), sys.offdiag.data(), rhs.data(), x.data(),
                                rhs.size(), seed);
  }
}

template <Sweep Dir>
void dispatch_chain(const BidiagonalSystem& sys, std::span<const double> rhs, std::span<double> x,
                    std::size_t lanes, double seed, double* coef) {
  if (sys.diag_recip.empty()) {
    chain_impl<Dir, true>(nullptr, sys.offdiag.data(), rhs.data(), x.data(), rhs.size(), lanes,
                          seed, coef);
  } else {
    chain_impl<Dir, false>(sys.diag_recip.data(), sys.offdiag.data(), rhs.data(), x.data(),
                           rhs.size(), lanes, seed, coef);
  }
}

void check(const BidiagonalSystem& sys, std::span<const double> rhs, std::span<double> x) {
  const std::size_t len = rhs.size();
  if (x.size() != len || sys.offdiag.size() != len ||
      (!sys.diag_recip.empty() && sys.diag_recip.size() != len)) {
    throw DimensionError("bidiagonal solve: segment lengths disagree");
  }
}

}  // namespace

void sequential_bidiagonal_solve(const BidiagonalSystem& sys, std::span<const double> rhs,
                                 std::span<double> x, Sweep dir, double seed) {
  check(sys, rhs, x);
  if (dir == Sweep::kForward) {
    dispatch_sequential<Sweep::kForward>(sys, rhs, x, seed);
  } else {
    dispatch_sequential<Sweep::kBackward>(sys, rhs, x, seed);
  }
}

void chain_bidiagonal_solve(const BidiagonalSystem& sys, std::span<const double> rhs,
                            std::span<double> x, Sweep dir, int lanes, double seed,
                            std::span<double> scratch) {
  check(sys, rhs, x);
  const std::size_t len = rhs.size();
  const auto k = static_cast<std::size_t>(std::max(1, lanes));
  if (k == 1 || len < 2 * k) {
    sequential_bidiagonal_solve(sys, rhs, x, dir, seed);
    return;
  }
  if (scratch.size() < len) throw DimensionError("chain solve: scratch too small");
  if (dir == Sweep::kForward) {
    dispatch_chain<Sweep::kForward>(sys, rhs, x, k, seed, scratch.data());
  } else {
    dispatch_chain<Sweep::kBackward>(sys, rhs, x, k, seed, scratch.data());
  }
}

std::vector<double> chain_bidiagonal_solve(std::span<const double> diag_recip,
                                           std::span<const double> offdiag,
                                           std::span<const double> rhs, Sweep dir, int lanes,
                                           double seed) {
  std::vector<double> x(rhs.size());
  std::vector<double> scratch(rhs.size());
  chain_bidiagonal_solve({diag_recip, offdiag}, rhs, x, dir, lanes, seed, scratch);
  return x;
}

}  // namespace ntd
