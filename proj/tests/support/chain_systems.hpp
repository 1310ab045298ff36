#pragma once

#include <random>
#include <vector>

namespace testing_util {

/// Diagonally dominant bidiagonal system with the sign pattern of an
/// M-matrix factor (negative coupling, positive rhs), so every x[i] is a sum
/// of positive terms and componentwise relative error is well posed.
struct ChainSystem {
  std::vector<double> diag_recip, offdiag, rhs;
};

inline ChainSystem random_chain_system(std::size_t len, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> d(2.0, 6.0), off(-1.0, -0.05), b(0.1, 1.0);
  ChainSystem s;
  s.diag_recip.resize(len);
  s.offdiag.resize(len);
  s.rhs.resize(len);
  for (std::size_t i = 0; i < len; ++i) {
    s.diag_recip[i] = 1.0 / d(rng);
    s.offdiag[i] = off(rng);
    s.rhs[i] = b(rng);
  }
  return s;
}

}  // namespace testing_util
