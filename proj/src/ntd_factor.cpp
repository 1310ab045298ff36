#include "ntd/ntd_factor.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <exception>
#include <istream>
#include <ostream>
#include <string>

#include "ntd/detail/nested_kernels.hpp"
#include "ntd/errors.hpp"

namespace ntd {

PreconBands::PreconBands(GridDims d)
    : dims(d),
      l1(d.size(), 0.0),
      u1(d.size(), 0.0),
      l2(d.size(), 0.0),
      u2(d.size(), 0.0),
      l3(d.size(), 0.0),
      u3(d.size(), 0.0),
      m_recip(d.size(), 0.0),
      twist3(twist_index(d.nz)),
      twist2(twist_index(d.ny)),
      twist1(twist_index(d.nx)) {}

std::size_t PreconBands::memory_bytes() const noexcept {
  return sizeof(double) * (l1.size() + u1.size() + l2.size() + u2.size() + l3.size() +
                           u3.size() + m_recip.size());
}

namespace {

static_assert(std::endian::native == std::endian::little,
              "binary dumps assume a little-endian host");

void put_u64(std::ostream& out, std::uint64_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

std::uint64_t get_u64(std::istream& in) {
  std::uint64_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  return v;
}

}  // namespace

void PreconBands::write_binary(std::ostream& out) const {
  put_u64(out, rows());
  put_u64(out, dims.nx);
  put_u64(out, dims.ny);
  put_u64(out, dims.nz);
  for (const auto* v : {&l1, &u1, &l2, &u2, &l3, &u3, &m_recip}) {
    out.write(reinterpret_cast<const char*>(v->data()),
              static_cast<std::streamsize>(v->size() * sizeof(double)));
  }
}

PreconBands PreconBands::read_binary(std::istream& in) {
  const auto n = get_u64(in);
  GridDims d{get_u64(in), get_u64(in), get_u64(in)};
  if (!in || n != d.size() || n == 0) throw DimensionError("preconditioner dump: bad header");
  PreconBands p(d);
  for (auto* v : {&p.l1, &p.u1, &p.l2, &p.u2, &p.l3, &p.u3, &p.m_recip}) {
    in.read(reinterpret_cast<char*>(v->data()),
            static_cast<std::streamsize>(v->size() * sizeof(double)));
  }
  if (!in) throw DimensionError("preconditioner dump: truncated");
  return p;
}

PlaneBands PlaneBands::from_matrix(const BandedMatrix& a, std::size_t k) {
  const std::size_t nxy = a.dims().plane_size();
  PlaneBands p(nxy);
  const std::size_t base = k * nxy;
  const auto copy = [&](Band b, std::vector<double>& dst) {
    const auto src = a.band(b).subspan(base, nxy);
    std::ranges::copy(src, dst.begin());
  };
  copy(Band::kDiag, p.diag);
  copy(Band::kLowerPoint, p.lower_point);
  copy(Band::kUpperPoint, p.upper_point);
  copy(Band::kLowerLine, p.lower_line);
  copy(Band::kUpperLine, p.upper_line);
  return p;
}

std::size_t twist_index(std::size_t num_blocks) {
  if (num_blocks == 0) throw DimensionError("twist_index: no blocks");
  return (num_blocks - 1) / 2 + 1;
}

std::vector<double> compute_beta(const ApplyInverse& apply_inv, std::span<const double> coupling,
                                 int level, std::size_t block) {
  std::vector<double> v(coupling.size());
  apply_inv(coupling, v);
  std::vector<double> beta(coupling.size(), 0.0);
  for (std::size_t k = 0; k < coupling.size(); ++k) {
    if (coupling[k] != 0.0) beta[k] = v[k] / coupling[k];
    if (!std::isfinite(beta[k])) {
      throw FactorizationError("non-finite filter correction at level " + std::to_string(level) +
                                   ", block " + std::to_string(block),
                               level, block);
    }
  }
  return beta;
}

void factor_level1(std::span<const double> diag, std::span<const double> lower,
                   std::span<const double> upper, std::size_t twist, std::span<double> m_recip,
                   std::size_t first_row) {
  const std::size_t n = diag.size();
  if (lower.size() != n || upper.size() != n || m_recip.size() != n) {
    throw DimensionError("factor_level1: band lengths disagree");
  }
  if (twist < 1 || twist > n) throw DimensionError("factor_level1: twist out of range");
  const std::size_t jj = twist - 1;
  const auto set = [&](std::size_t i, double m) {
    if (m == 0.0 || !std::isfinite(m)) {
      throw FactorizationError("zero or non-finite pivot at row " + std::to_string(first_row + i),
                               1, first_row + i);
    }
    m_recip[i] = 1.0 / m;
  };

  for (std::size_t i = 0; i < jj; ++i) {
    double m = diag[i];
    if (i > 0) m -= lower[i] * m_recip[i - 1] * upper[i - 1];
    set(i, m);
  }
  for (std::size_t i = n; i-- > jj + 1;) {
    double m = diag[i];
    if (i + 1 < n) m -= upper[i] * m_recip[i + 1] * lower[i + 1];
    set(i, m);
  }
  double m = diag[jj];
  if (jj > 0) m -= lower[jj] * m_recip[jj - 1] * upper[jj - 1];
  if (jj + 1 < n) m -= upper[jj] * m_recip[jj + 1] * lower[jj + 1];
  set(jj, m);
}

std::vector<double> factor_level1(const LineBands& line, std::size_t twist) {
  std::vector<double> r(line.size());
  factor_level1(line.diag, line.lower, line.upper, twist, r);
  return r;
}

namespace {

// Block-coupling filter correction: block -= Lo (2 beta - beta N beta) Up,
// where N is the already formed neighbour block, Lo/Up are the diagonal
// couplings of this block to the neighbour and back, evaluated band by band.
struct FilterTerms {
  std::vector<double> lb;  // Lo .* beta
  std::vector<double> bu;  // beta .* Up
};

FilterTerms filter_terms(std::span<const double> lo, std::span<const double> up,
                         const std::vector<double>& beta) {
  FilterTerms f{std::vector<double>(lo.size()), std::vector<double>(lo.size())};
  for (std::size_t a = 0; a < lo.size(); ++a) {
    f.lb[a] = lo[a] * beta[a];
    f.bu[a] = beta[a] * up[a];
  }
  return f;
}

void correct_line(LineBands& t, const LineBands& nbr, std::span<const double> lo,
                  std::span<const double> up, const std::vector<double>& beta) {
  const std::size_t n = t.size();
  const FilterTerms f = filter_terms(lo, up, beta);
  for (std::size_t a = 0; a < n; ++a) {
    t.diag[a] -= 2.0 * f.lb[a] * up[a] - f.lb[a] * nbr.diag[a] * f.bu[a];
  }
  for (std::size_t a = 1; a < n; ++a) t.lower[a] += f.lb[a] * nbr.lower[a] * f.bu[a - 1];
  for (std::size_t a = 0; a + 1 < n; ++a) t.upper[a] += f.lb[a] * nbr.upper[a] * f.bu[a + 1];
}

void correct_plane(PlaneBands& p, const PlaneBands& nbr, std::size_t nx,
                   std::span<const double> lo, std::span<const double> up,
                   const std::vector<double>& beta) {
  const std::size_t n = p.size();
  const FilterTerms f = filter_terms(lo, up, beta);
  for (std::size_t a = 0; a < n; ++a) {
    p.diag[a] -= 2.0 * f.lb[a] * up[a] - f.lb[a] * nbr.diag[a] * f.bu[a];
  }
  for (std::size_t a = 1; a < n; ++a) {
    p.lower_point[a] += f.lb[a] * nbr.lower_point[a] * f.bu[a - 1];
  }
  for (std::size_t a = 0; a + 1 < n; ++a) {
    p.upper_point[a] += f.lb[a] * nbr.upper_point[a] * f.bu[a + 1];
  }
  for (std::size_t a = nx; a < n; ++a) {
    p.lower_line[a] += f.lb[a] * nbr.lower_line[a] * f.bu[a - nx];
  }
  for (std::size_t a = 0; a + nx < n; ++a) {
    p.upper_line[a] += f.lb[a] * nbr.upper_line[a] * f.bu[a + nx];
  }
}

}  // namespace

void factor_level2(const PlaneBands& plane, std::size_t plane_index, PreconBands& pre,
                   const LineSolveConfig& cfg, std::span<double> t_diag) {
  const std::size_t nx = pre.dims.nx;
  const std::size_t ny = pre.dims.ny;
  const std::size_t nxy = pre.dims.plane_size();
  if (plane.size() != nxy) throw DimensionError("factor_level2: plane size mismatch");
  const std::size_t base = plane_index * nxy;
  const std::size_t jj = pre.twist2 - 1;
  detail::LineScratch scratch(nx);

  std::ranges::copy(plane.lower_line, pre.l2.begin() + static_cast<std::ptrdiff_t>(base));
  std::ranges::copy(plane.upper_line, pre.u2.begin() + static_cast<std::ptrdiff_t>(base));

  const auto form = [&](std::size_t j) {
    LineBands t(nx);
    const auto o = static_cast<std::ptrdiff_t>(j * nx);
    std::copy_n(plane.diag.begin() + o, nx, t.diag.begin());
    std::copy_n(plane.lower_point.begin() + o, nx, t.lower.begin());
    std::copy_n(plane.upper_point.begin() + o, nx, t.upper.begin());
    return t;
  };
  const auto line_span = [&](const std::vector<double>& v, std::size_t j) {
    return std::span<const double>(v).subspan(j * nx, nx);
  };
  // T_j -= Lo (2 beta - beta T_nbr beta) Up with beta from the factored neighbour line.
  const auto correct = [&](LineBands& t, const LineBands& nbr, std::size_t nbr_line,
                           std::span<const double> lo, std::span<const double> up) {
    const std::size_t row0 = base + nbr_line * nx;
    const auto beta = compute_beta(
        [&](std::span<const double> in, std::span<double> out) {
          detail::solve_line(pre, row0, in, out, scratch, cfg);
        },
        up, 2, row0 / nx);
    correct_line(t, nbr, lo, up, beta);
  };
  const auto store = [&](std::size_t j, const LineBands& t) {
    const std::size_t row0 = base + j * nx;
    std::ranges::copy(t.lower, pre.l1.begin() + static_cast<std::ptrdiff_t>(row0));
    std::ranges::copy(t.upper, pre.u1.begin() + static_cast<std::ptrdiff_t>(row0));
    if (!t_diag.empty()) std::ranges::copy(t.diag, t_diag.begin() + static_cast<std::ptrdiff_t>(j * nx));
    factor_level1(t.diag, t.lower, t.upper, pre.twist1,
                  std::span<double>(pre.m_recip).subspan(row0, nx), row0);
  };

  LineBands above;  // last line formed by the upper half
  for (std::size_t j = 0; j < jj; ++j) {
    LineBands t = form(j);
    if (j > 0) {
      correct(t, above, j - 1, line_span(plane.lower_line, j), line_span(plane.upper_line, j - 1));
    }
    store(j, t);
    above = std::move(t);
  }
  LineBands below;  // last line formed by the lower half
  for (std::size_t j = ny; j-- > jj + 1;) {
    LineBands t = form(j);
    if (j + 1 < ny) {
      correct(t, below, j + 1, line_span(plane.upper_line, j), line_span(plane.lower_line, j + 1));
    }
    store(j, t);
    below = std::move(t);
  }
  LineBands t = form(jj);
  if (jj > 0) {
    correct(t, above, jj - 1, line_span(plane.lower_line, jj), line_span(plane.upper_line, jj - 1));
  }
  if (jj + 1 < ny) {
    correct(t, below, jj + 1, line_span(plane.upper_line, jj), line_span(plane.lower_line, jj + 1));
  }
  store(jj, t);
}

PreconBands factor_level3(const BandedMatrix& a, int workers, const LineSolveConfig& cfg,
                          FactorTrace* trace) {
  const GridDims g = a.dims();
  PreconBands pre(g);
  const std::size_t nz = g.nz;
  const std::size_t nxy = g.plane_size();
  const std::size_t jj = pre.twist3 - 1;

  std::ranges::copy(a.band(Band::kLowerPlane), pre.l3.begin());
  std::ranges::copy(a.band(Band::kUpperPlane), pre.u3.begin());
  if (trace != nullptr) trace->t_diag.assign(g.size(), 0.0);

  const auto plane_span = [&](const std::vector<double>& v, std::size_t k) {
    return std::span<const double>(v).subspan(k * nxy, nxy);
  };
  const auto t_diag = [&](std::size_t k) {
    return trace ? std::span<double>(trace->t_diag).subspan(k * nxy, nxy) : std::span<double>{};
  };
  // P_k -= Lo (2 beta - beta P_nbr beta) Up, beta through the nested solve of P_nbr.
  const auto correct = [&](PlaneBands& p, const PlaneBands& nbr, std::size_t nbr_plane,
                           std::span<const double> lo, std::span<const double> up,
                           detail::LineScratch& scratch) {
    const auto beta = compute_beta(
        [&](std::span<const double> in, std::span<double> out) {
          detail::apply_plane_inverse(pre, nbr_plane, in, out, scratch, cfg);
        },
        up, 3, nbr_plane);
    correct_plane(p, nbr, g.nx, lo, up, beta);
  };

  PlaneBands above;
  PlaneBands below;
  const auto upper_half = [&] {
    detail::LineScratch scratch(g.nx);
    for (std::size_t k = 0; k < jj; ++k) {
      PlaneBands p = PlaneBands::from_matrix(a, k);
      if (k > 0) correct(p, above, k - 1, plane_span(pre.l3, k), plane_span(pre.u3, k - 1), scratch);
      factor_level2(p, k, pre, cfg, t_diag(k));
      above = std::move(p);
    }
  };
  const auto lower_half = [&] {
    detail::LineScratch scratch(g.nx);
    for (std::size_t k = nz; k-- > jj + 1;) {
      PlaneBands p = PlaneBands::from_matrix(a, k);
      if (k + 1 < nz) {
        correct(p, below, k + 1, plane_span(pre.u3, k), plane_span(pre.l3, k + 1), scratch);
      }
      factor_level2(p, k, pre, cfg, t_diag(k));
      below = std::move(p);
    }
  };

  std::exception_ptr errors[2];
  const int nt = std::clamp(workers, 1, 2);
#pragma omp parallel sections num_threads(nt) if (nt > 1)
  {
#pragma omp section
    {
      try {
        upper_half();
      } catch (...) {
        errors[0] = std::current_exception();
      }
    }
#pragma omp section
    {
      try {
        lower_half();
      } catch (...) {
        errors[1] = std::current_exception();
      }
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  detail::LineScratch scratch(g.nx);
  PlaneBands p = PlaneBands::from_matrix(a, jj);
  if (jj > 0) correct(p, above, jj - 1, plane_span(pre.l3, jj), plane_span(pre.u3, jj - 1), scratch);
  if (jj + 1 < nz) {
    correct(p, below, jj + 1, plane_span(pre.u3, jj), plane_span(pre.l3, jj + 1), scratch);
  }
  factor_level2(p, jj, pre, cfg, t_diag(jj));
  return pre;
}

}  // namespace ntd
