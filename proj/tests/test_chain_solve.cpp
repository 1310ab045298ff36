#include <gtest/gtest.h>

#include <random>

#include "chain_systems.hpp"
#include "ntd/chain_solve.hpp"

using namespace ntd;

namespace {

std::vector<double> sequential(const testing_util::ChainSystem& s, Sweep dir, double seed = 0.0,
                               bool unit = false) {
  std::vector<double> x(s.rhs.size());
  sequential_bidiagonal_solve(
      {unit ? std::span<const double>{} : std::span<const double>(s.diag_recip), s.offdiag}, s.rhs,
      x, dir, seed);
  return x;
}

double max_componentwise_rel(const std::vector<double>& x, const std::vector<double>& ref) {
  double m = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) m = std::max(m, std::abs(x[i] - ref[i]) / std::abs(ref[i]));
  return m;
}

}  // namespace

TEST(ChainSolve, CumulativeRecurrence) {
  const std::vector<double> ones(4, 1.0), off(4, -1.0), b{1, 0, 0, 0};
  EXPECT_EQ(chain_bidiagonal_solve(ones, off, b, Sweep::kForward), (std::vector<double>{1, 1, 1, 1}));
  EXPECT_EQ(chain_bidiagonal_solve({}, off, b, Sweep::kForward), (std::vector<double>{1, 1, 1, 1}));
  const std::vector<double> rb{0, 0, 0, 1};
  EXPECT_EQ(chain_bidiagonal_solve({}, off, rb, Sweep::kBackward), (std::vector<double>{1, 1, 1, 1}));
}

TEST(ChainSolve, SequentialRecurrenceByHand) {
  // x0 = (1 - 2*3) / 2, x1 = (4 - 5*x0) / 4
  const std::vector<double> dr{0.5, 0.25}, off{2.0, 5.0}, b{1.0, 4.0};
  std::vector<double> x(2);
  sequential_bidiagonal_solve({dr, off}, b, x, Sweep::kForward, 3.0);
  EXPECT_DOUBLE_EQ(x[0], -2.5);
  EXPECT_DOUBLE_EQ(x[1], (4.0 + 12.5) * 0.25);
}

TEST(ChainSolve, EightUnknownsFourLanes) {
  std::mt19937_64 rng(21);
  for (int rep = 0; rep < 50; ++rep) {
    const auto s = testing_util::random_chain_system(8, rng);
    for (auto dir : {Sweep::kForward, Sweep::kBackward}) {
      const auto x = chain_bidiagonal_solve(s.diag_recip, s.offdiag, s.rhs, dir, 4);
      EXPECT_LE(max_componentwise_rel(x, sequential(s, dir)), 1e-12);
    }
  }
}

TEST(ChainSolve, SingleLaneIsBitwiseSequential) {
  std::mt19937_64 rng(22);
  for (std::size_t len : {1u, 2u, 7u, 64u, 1000u}) {
    const auto s = testing_util::random_chain_system(len, rng);
    for (auto dir : {Sweep::kForward, Sweep::kBackward}) {
      EXPECT_EQ(chain_bidiagonal_solve(s.diag_recip, s.offdiag, s.rhs, dir, 1, 0.7),
                sequential(s, dir, 0.7));
    }
  }
}

TEST(ChainSolve, ShortSegmentsFallBackToSequential) {
  std::mt19937_64 rng(23);
  for (std::size_t len = 1; len < 8; ++len) {
    const auto s = testing_util::random_chain_system(len, rng);
    EXPECT_EQ(chain_bidiagonal_solve(s.diag_recip, s.offdiag, s.rhs, Sweep::kForward, 4),
              sequential(s, Sweep::kForward));
  }
}

TEST(ChainSolve, MatchesSequentialAcrossLengthsLanesAndSeeds) {
  std::mt19937_64 rng(24);
  std::uniform_int_distribution<std::size_t> len_dist(8, 4096);
  for (int rep = 0; rep < 100; ++rep) {
    const auto s = testing_util::random_chain_system(len_dist(rng), rng);
    for (int lanes : {2, 3, 4, 8}) {
      for (auto dir : {Sweep::kForward, Sweep::kBackward}) {
        const double seed = 0.3;
        const auto x = chain_bidiagonal_solve(s.diag_recip, s.offdiag, s.rhs, dir, lanes, seed);
        EXPECT_LE(max_componentwise_rel(x, sequential(s, dir, seed)), 1e-10);
      }
    }
  }
}

TEST(ChainSolve, UnitDiagonalAndAliasing) {
  std::mt19937_64 rng(25);
  const auto s = testing_util::random_chain_system(513, rng);
  std::vector<double> x = s.rhs;
  std::vector<double> scratch(x.size());
  chain_bidiagonal_solve({{}, s.offdiag}, x, x, Sweep::kBackward, 4, 0.0, scratch);
  EXPECT_LE(max_componentwise_rel(x, sequential(s, Sweep::kBackward, 0.0, true)), 1e-10);
}

TEST(ChainSolve, FirstLaneIsExact) {
  // Lane 0 runs the plain recurrence from the seed.
  std::mt19937_64 rng(26);
  const auto s = testing_util::random_chain_system(400, rng);
  const auto x = chain_bidiagonal_solve(s.diag_recip, s.offdiag, s.rhs, Sweep::kForward, 4);
  const auto ref = sequential(s, Sweep::kForward);
  for (std::size_t i = 0; i < 100; ++i) EXPECT_EQ(x[i], ref[i]);
}
