#pragma once

#include <Eigen/Dense>

#include "ntd/ntd_factor.hpp"

namespace oracle {

/// Tridiagonal line block starting at row0, from its diagonal and the l1/u1 bands.
inline Eigen::MatrixXd line_block(const ntd::PreconBands& pre, std::span<const double> t_diag,
                                  std::size_t row0) {
  const auto nx = static_cast<Eigen::Index>(pre.dims.nx);
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(nx, nx);
  for (Eigen::Index a = 0; a < nx; ++a) {
    const std::size_t r = row0 + static_cast<std::size_t>(a);
    t(a, a) = t_diag[r];
    if (a > 0) t(a, a - 1) = pre.l1[r];
    if (a + 1 < nx) t(a, a + 1) = pre.u1[r];
  }
  return t;
}

/// (M + L1)(I + M^-1 U1) for the line starting at row0, with the couplings
/// taken from whichever side each point was eliminated from.
inline Eigen::MatrixXd line_reconstruction(const ntd::PreconBands& pre, std::size_t row0) {
  const auto nx = static_cast<Eigen::Index>(pre.dims.nx);
  const auto jj = static_cast<Eigen::Index>(pre.twist1) - 1;
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(nx, nx);
  Eigen::MatrixXd lo = Eigen::MatrixXd::Zero(nx, nx);
  Eigen::MatrixXd up = Eigen::MatrixXd::Zero(nx, nx);
  for (Eigen::Index a = 0; a < nx; ++a) {
    const std::size_t r = row0 + static_cast<std::size_t>(a);
    m(a, a) = 1.0 / pre.m_recip[r];
    if (a > 0 && a <= jj) {
      lo(a, a - 1) = pre.l1[r];
      up(a - 1, a) = pre.u1[r - 1];
    }
    if (a + 1 < nx && a >= jj) {
      lo(a, a + 1) = pre.u1[r];
      up(a + 1, a) = pre.l1[r + 1];
    }
  }
  return (m + lo) * (Eigen::MatrixXd::Identity(nx, nx) + m.inverse() * up);
}

}  // namespace oracle
