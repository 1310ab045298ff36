#pragma once

#include <span>

#include "ntd/banded_matrix.hpp"

namespace ntd {

// Reductions are summed over fixed-size chunks whose partials are combined in
// chunk order, so results do not depend on the worker count.

double dot(std::span<const double> x, std::span<const double> y, int workers = 1);
double norm2(std::span<const double> x, int workers = 1);

/// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y, int workers = 1);
DenseVector axpy_copy(double alpha, std::span<const double> x, std::span<const double> y);

/// y = x + beta * y
void xpby(std::span<const double> x, double beta, std::span<double> y, int workers = 1);

/// z = x - y
void subtract(std::span<const double> x, std::span<const double> y, std::span<double> z,
              int workers = 1);

}  // namespace ntd
