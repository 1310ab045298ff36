#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>

#include "dense_oracle.hpp"
#include "ntd/problem.hpp"

using namespace ntd;

TEST(Kappa, PoissonIsConstant) {
  EXPECT_EQ(kappa_eval(CoefficientKind::kPoisson, {0.3, 0.7, 0.1}), 1.0);
  EXPECT_EQ(kappa_eval(CoefficientKind::kPoisson, {0.99, 0.01, 0.5}), 1.0);
}

TEST(Kappa, SkyscraperBlocks) {
  EXPECT_EQ(kappa_eval(CoefficientKind::kSkyscraper, {0.05, 0.05, 0.05}), 1000.0);
  // floor(10 y) = 4, all three indices even.
  EXPECT_EQ(kappa_eval(CoefficientKind::kSkyscraper, {0.25, 0.45, 0.85}), 5000.0);
  // floor(10 x) = 1 is odd.
  EXPECT_EQ(kappa_eval(CoefficientKind::kSkyscraper, {0.15, 0.05, 0.05}), 1.0);
}

TEST(Kappa, RingShell) {
  EXPECT_EQ(kappa_eval(CoefficientKind::kRing, {0.5, 0.5, 0.9}), 1000.0);
  EXPECT_EQ(kappa_eval(CoefficientKind::kRing, {0.5, 0.5, 0.5}), 1.0);
  EXPECT_EQ(kappa_eval(CoefficientKind::kRing, {0.05, 0.05, 0.05}), 1.0);
}

TEST(Kappa, RejectsPointsOutsideOpenCube) {
  EXPECT_THROW(kappa_eval(CoefficientKind::kPoisson, {0.0, 0.5, 0.5}), std::domain_error);
  EXPECT_THROW(kappa_eval(CoefficientKind::kRing, {0.5, 1.0, 0.5}), std::domain_error);
  EXPECT_THROW(kappa_eval(CoefficientKind::kSkyscraper, {0.5, 0.5, -0.1}), std::domain_error);
}

TEST(Kappa, AtLeastOneEverywhere) {
  for (int type = 1; type <= 3; ++type) {
    const auto grid = GridSpec::cube(23);
    for (std::size_t k = 0; k < 23; ++k) {
      for (std::size_t j = 0; j < 23; ++j) {
        for (std::size_t i = 0; i < 23; ++i) {
          EXPECT_GE(kappa_eval(coefficient_kind_from_int(type), grid.cell_center(i, j, k)), 1.0);
        }
      }
    }
  }
}

TEST(Kappa, UnknownTypeRejected) {
  EXPECT_THROW(coefficient_kind_from_int(0), std::invalid_argument);
  EXPECT_THROW(coefficient_kind_from_int(4), std::invalid_argument);
}

TEST(Grid, CellCentresAndWidth) {
  const GridSpec g{GridDims{4, 2, 5}};
  const auto h = g.mesh_width();
  EXPECT_DOUBLE_EQ(h[0], 0.25);
  EXPECT_DOUBLE_EQ(h[1], 0.5);
  EXPECT_DOUBLE_EQ(h[2], 0.2);
  const auto c = g.cell_center(0, 1, 4);
  EXPECT_DOUBLE_EQ(c[0], 0.125);
  EXPECT_DOUBLE_EQ(c[1], 0.75);
  EXPECT_DOUBLE_EQ(c[2], 0.9);
}

TEST(Assemble, SingleCellHasSixDirichletFaces) {
  const auto a = assemble(GridSpec::cube(1), CoefficientKind::kPoisson);
  ASSERT_EQ(a.rows(), 1u);
  EXPECT_EQ(a.band(Band::kDiag)[0], 6.0);
}

TEST(Assemble, PoissonInteriorRowIsStandardStencil) {
  const auto a = assemble(GridSpec::cube(5), CoefficientKind::kPoisson);
  const auto r = a.dims().index(2, 2, 2);
  EXPECT_EQ(a.band(Band::kDiag)[r], 6.0);
  for (Band b : kAllBands) {
    if (b != Band::kDiag) EXPECT_EQ(a.band(b)[r], -1.0);
  }
}

TEST(Assemble, HarmonicFaceAverage) {
  // Two cells in x: one inside a type 1 block (kappa 1000), one outside (kappa 1).
  const GridSpec g = GridSpec::cube(20);
  const auto a = assemble(g, CoefficientKind::kSkyscraper);
  const double ka = kappa_eval(CoefficientKind::kSkyscraper, g.cell_center(1, 0, 0));
  const double kb = kappa_eval(CoefficientKind::kSkyscraper, g.cell_center(2, 0, 0));
  ASSERT_NE(ka, kb);
  EXPECT_DOUBLE_EQ(a.band(Band::kUpperPoint)[g.dims.index(1, 0, 0)], -2.0 * ka * kb / (ka + kb));
}

TEST(Assemble, SatisfiesStructuralInvariantsOnSmallGrids) {
  for (int type = 1; type <= 3; ++type) {
    for (std::size_t nx = 1; nx <= 5; ++nx) {
      for (std::size_t ny = 1; ny <= 5; ++ny) {
        for (std::size_t nz = 1; nz <= 5; ++nz) {
          const auto a = assemble(GridSpec{GridDims{nx, ny, nz}}, coefficient_kind_from_int(type));
          for (std::size_t r = 0; r < a.rows(); ++r) {
            EXPECT_GT(a.band(Band::kDiag)[r], 0.0);
            double rowsum = 0.0;
            for (Band b : kAllBands) {
              if (!a.is_structural(b, r)) {
                EXPECT_EQ(a.band(b)[r], 0.0);
                continue;
              }
              const auto c = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(r) + a.offset(b));
              EXPECT_EQ(a.at(r, c), a.at(c, r));
              rowsum += a.band(b)[r];
            }
            EXPECT_GE(rowsum, -1e-12 * a.band(Band::kDiag)[r]);
          }
        }
      }
    }
  }
}

TEST(Assemble, PositiveDefiniteOnSmallGrids) {
  for (int type = 1; type <= 3; ++type) {
    for (std::size_t n = 1; n <= 5; ++n) {
      const auto a = assemble(GridSpec::cube(n), coefficient_kind_from_int(type));
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(oracle::to_dense(a));
      EXPECT_GT(es.eigenvalues().minCoeff(), 0.0);
    }
  }
}

TEST(Assemble, JumpingCoefficientsSpanThreeOrders) {
  for (auto kind : {CoefficientKind::kSkyscraper, CoefficientKind::kRing}) {
    const auto a = assemble(GridSpec::cube(20), kind);
    double lo = 1e300, hi = 0.0;
    for (Band b : kAllBands) {
      if (b == Band::kDiag) continue;
      for (std::size_t r = 0; r < a.rows(); ++r) {
        if (!a.is_structural(b, r)) continue;
        lo = std::min(lo, std::abs(a.band(b)[r]));
        hi = std::max(hi, std::abs(a.band(b)[r]));
      }
    }
    EXPECT_GE(hi / lo, 1e3);
  }
}

TEST(Assemble, WorkerInvariantBitwise) {
  const auto g = GridSpec{GridDims{13, 11, 9}};
  const auto a1 = assemble(g, CoefficientKind::kSkyscraper, 1);
  const auto a4 = assemble(g, CoefficientKind::kSkyscraper, 4);
  for (Band b : kAllBands) {
    EXPECT_TRUE(std::ranges::equal(a1.band(b), a4.band(b)));
  }
}

TEST(Rhs, OnesAndManufactured) {
  const auto a3 = assemble(GridSpec::cube(3), CoefficientKind::kPoisson);
  EXPECT_EQ(make_rhs(a3, RhsMode::kOnes), DenseVector(27, 1.0));

  BandedMatrix line(GridDims{3, 1, 1});
  std::ranges::fill(line.band(Band::kDiag), 2.0);
  line.band(Band::kLowerPoint)[1] = line.band(Band::kLowerPoint)[2] = -1.0;
  line.band(Band::kUpperPoint)[0] = line.band(Band::kUpperPoint)[1] = -1.0;
  EXPECT_EQ(make_rhs(line, RhsMode::kManufacturedOnes), (DenseVector{1.0, 0.0, 1.0}));
}
