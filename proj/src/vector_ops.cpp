#include "ntd/vector_ops.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "ntd/errors.hpp"

namespace ntd {
namespace {

constexpr std::size_t kChunk = 4096;

void check_lengths(std::size_t a, std::size_t b, const char* op) {
  if (a != b) {
    throw DimensionError(std::string(op) + ": length mismatch " + std::to_string(a) + " vs " +
                         std::to_string(b));
  }
}

int team(int workers) { return std::max(1, workers); }

}  // namespace

double dot(std::span<const double> x, std::span<const double> y, int workers) {
  check_lengths(x.size(), y.size(), "dot");
  const std::size_t n = x.size();
  const std::size_t chunks = (n + kChunk - 1) / kChunk;
  std::vector<double> partial(chunks, 0.0);
  const auto nchunks = static_cast<std::ptrdiff_t>(chunks);
  const int nt = team(workers);
#pragma omp parallel for schedule(static) num_threads(nt) if (nt > 1)
  for (std::ptrdiff_t c = 0; c < nchunks; ++c) {
    const std::size_t lo = static_cast<std::size_t>(c) * kChunk;
    const std::size_t hi = std::min(n, lo + kChunk);
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += x[i] * y[i];
    partial[static_cast<std::size_t>(c)] = s;
  }
  double s = 0.0;
  for (double p : partial) s += p;
  return s;
}

double norm2(std::span<const double> x, int workers) { return std::sqrt(dot(x, x, workers)); }

void axpy(double alpha, std::span<const double> x, std::span<double> y, int workers) {
  check_lengths(x.size(), y.size(), "axpy");
  const auto n = static_cast<std::ptrdiff_t>(x.size());
  const int nt = team(workers);
#pragma omp parallel for schedule(static) num_threads(nt) if (nt > 1)
  for (std::ptrdiff_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

DenseVector axpy_copy(double alpha, std::span<const double> x, std::span<const double> y) {
  DenseVector out(y.begin(), y.end());
  axpy(alpha, x, std::span<double>(out));
  return out;
}

void xpby(std::span<const double> x, double beta, std::span<double> y, int workers) {
  check_lengths(x.size(), y.size(), "xpby");
  const auto n = static_cast<std::ptrdiff_t>(x.size());
  const int nt = team(workers);
#pragma omp parallel for schedule(static) num_threads(nt) if (nt > 1)
  for (std::ptrdiff_t i = 0; i < n; ++i) y[i] = x[i] + beta * y[i];
}

void subtract(std::span<const double> x, std::span<const double> y, std::span<double> z,
              int workers) {
  check_lengths(x.size(), y.size(), "subtract");
  check_lengths(x.size(), z.size(), "subtract");
  const auto n = static_cast<std::ptrdiff_t>(x.size());
  const int nt = team(workers);
#pragma omp parallel for schedule(static) num_threads(nt) if (nt > 1)
  for (std::ptrdiff_t i = 0; i < n; ++i) z[i] = x[i] - y[i];
}

}  // namespace ntd
