#include "bargzero/fdsolve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "bargzero/errors.hpp"

namespace bargzero {

void TridiagonalHamiltonian::apply(std::span<const double> psi, std::span<double> out) const {
  const std::size_t n = diag.size();
  if (psi.size() != n || out.size() != n)
    throw std::invalid_argument("TridiagonalHamiltonian::apply: size mismatch");
  // diag = 1/dx^2 + V and offdiag = -1/(2 dx^2); splitting off the second
  // difference keeps the large 1/dx^2 terms from cancelling in the sum.
  const double kin = offdiag.empty() ? 0.0 : offdiag.front();
  const double diag_kin = -2.0 * kin;
  for (std::size_t i = 0; i < n; ++i) {
    const double left = i > 0 ? psi[i - 1] : 0.0;
    const double right = i + 1 < n ? psi[i + 1] : 0.0;
    const double second_diff = (left - psi[i]) + (right - psi[i]);
    out[i] = kin * second_diff + (diag[i] - diag_kin) * psi[i];
  }
}

std::vector<double> TridiagonalHamiltonian::apply(std::span<const double> psi) const {
  std::vector<double> out(psi.size());
  apply(psi, out);
  return out;
}

TridiagonalHamiltonian build_hamiltonian(const Grid& grid, const Potential& potential) {
  TridiagonalHamiltonian h;
  const double dx = grid.spacing;
  const double inv_dx2 = 1.0 / (dx * dx);
  h.spacing = dx;
  h.diag.resize(grid.n_points);
  for (std::size_t i = 0; i < grid.n_points; ++i) h.diag[i] = inv_dx2 + potential(grid.points[i]);
  h.offdiag.assign(grid.n_points - 1, -0.5 * inv_dx2);
  return h;
}

std::size_t sturm_count(const TridiagonalHamiltonian& h, double lambda) {
  const std::size_t n = h.size();
  double max_e2 = 0.0;
  for (double e : h.offdiag) max_e2 = std::max(max_e2, e * e);
  const double pivmin = std::numeric_limits<double>::min() * std::max(1.0, max_e2);

  std::size_t count = 0;
  double q = h.diag[0] - lambda;
  if (std::abs(q) < pivmin) q = -pivmin;
  if (q < 0.0) ++count;
  for (std::size_t i = 1; i < n; ++i) {
    const double e = h.offdiag[i - 1];
    q = h.diag[i] - lambda - e * e / q;
    if (std::abs(q) < pivmin) q = -pivmin;
    if (q < 0.0) ++count;
  }
  return count;
}

namespace {

double bisect_eigenvalue(const TridiagonalHamiltonian& h, std::size_t j, double lo, double hi) {
  constexpr double eps = std::numeric_limits<double>::epsilon();
  for (int it = 0; it < 256; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (hi - lo <= 2.0 * eps * std::max(std::abs(lo), std::abs(hi))) break;
    if (sturm_count(h, mid) > j)
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

// LU factorisation with partial pivoting of (T - shift I), LAPACK dgttrf layout.
struct TridiagonalLU {
  std::vector<double> dl, d, du, du2;
  std::vector<unsigned char> swapped;

  TridiagonalLU(const TridiagonalHamiltonian& h, double shift, double tiny) {
    const std::size_t n = h.size();
    d.resize(n);
    du = h.offdiag;
    dl = h.offdiag;
    du2.assign(n > 2 ? n - 2 : 0, 0.0);
    swapped.assign(n, 0);
    for (std::size_t i = 0; i < n; ++i) d[i] = h.diag[i] - shift;

    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (std::abs(d[i]) >= std::abs(dl[i])) {
        if (d[i] == 0.0) d[i] = tiny;
        const double fact = dl[i] / d[i];
        dl[i] = fact;
        d[i + 1] -= fact * du[i];
      } else {
        const double fact = d[i] / dl[i];
        d[i] = dl[i];
        dl[i] = fact;
        const double temp = du[i];
        du[i] = d[i + 1];
        d[i + 1] = temp - fact * d[i + 1];
        if (i + 2 < n) {
          du2[i] = du[i + 1];
          du[i + 1] = -fact * du[i + 1];
        }
        swapped[i] = 1;
      }
    }
    if (n > 0 && std::abs(d[n - 1]) < tiny) d[n - 1] = d[n - 1] < 0 ? -tiny : tiny;
    for (auto& v : d)
      if (std::abs(v) < tiny) v = v < 0 ? -tiny : tiny;
  }

  void solve(std::vector<double>& b) const {
    const std::size_t n = d.size();
    if (n == 1) {
      b[0] /= d[0];
      return;
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (swapped[i]) {
        const double temp = b[i];
        b[i] = b[i + 1];
        b[i + 1] = temp - dl[i] * b[i];
      } else {
        b[i + 1] -= dl[i] * b[i];
      }
    }
    b[n - 1] /= d[n - 1];
    b[n - 2] = (b[n - 2] - du[n - 2] * b[n - 1]) / d[n - 2];
    for (std::size_t k = n - 2; k-- > 0;)
      b[k] = (b[k] - du[k] * b[k + 1] - du2[k] * b[k + 2]) / d[k];
  }
};

double norm2(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

double inner_product(std::span<const double> a, std::span<const double> b, double dx) {
  if (a.size() != b.size()) throw std::invalid_argument("inner_product: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return dx * s;
}

std::vector<double> normalize(std::span<const double> psi, double dx) {
  double s = 0.0;
  for (double v : psi) s += v * v;
  if (!(s > 0.0) || !std::isfinite(s))
    throw std::invalid_argument("normalize: vector has zero (or non-finite) norm");
  const double scale = 1.0 / std::sqrt(dx * s);
  std::vector<double> out(psi.begin(), psi.end());
  for (auto& v : out) v *= scale;
  return out;
}

void fix_sign(std::span<double> psi) {
  double peak = 0.0;
  for (double v : psi) peak = std::max(peak, std::abs(v));
  for (double v : psi) {
    if (std::abs(v) > 1e-3 * peak) {
      if (v < 0.0)
        for (auto& w : psi) w = -w;
      return;
    }
  }
}

std::vector<EigenPair> lowest_eigenpairs(const TridiagonalHamiltonian& h, int k) {
  const std::size_t n = h.size();
  if (k < 1 || static_cast<std::size_t>(k) > n)
    throw std::invalid_argument("lowest_eigenpairs: k must lie in [1, Nx]");

  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  double diag_norm = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = (i > 0 ? std::abs(h.offdiag[i - 1]) : 0.0) +
                     (i + 1 < n ? std::abs(h.offdiag[i]) : 0.0);
    lo = std::min(lo, h.diag[i] - r);
    hi = std::max(hi, h.diag[i] + r);
    diag_norm = std::max(diag_norm, std::abs(h.diag[i]));
  }
  const double span_width = std::max(hi - lo, 1.0);
  lo -= 1e-8 * span_width;
  hi += 1e-8 * span_width;

  const double tol = 1e-9 * diag_norm;
  const double tiny = std::numeric_limits<double>::epsilon() * std::max(diag_norm, 1.0);

  std::vector<EigenPair> pairs;
  std::vector<std::vector<double>> unit_vectors;
  for (int j = 0; j < k; ++j) {
    const double lambda = bisect_eigenvalue(h, static_cast<std::size_t>(j), lo, hi);
    TridiagonalLU lu(h, lambda, tiny);

    // Deterministic, parity-free start vector.
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i)
      v[i] = 1.0 + 0.5 * std::sin(0.7 * static_cast<double>(i) + 0.3 * static_cast<double>(j + 1));

    double residual = std::numeric_limits<double>::infinity();
    std::vector<double> hv(n);
    for (int it = 0; it < 8; ++it) {
      lu.solve(v);
      for (const auto& u : unit_vectors) {
        double dot = 0.0;
        for (std::size_t i = 0; i < n; ++i) dot += u[i] * v[i];
        for (std::size_t i = 0; i < n; ++i) v[i] -= dot * u[i];
      }
      const double nv = norm2(v);
      if (!(nv > 0.0) || !std::isfinite(nv)) break;
      for (auto& x : v) x /= nv;
      h.apply(v, hv);
      residual = 0.0;
      for (std::size_t i = 0; i < n; ++i) residual = std::max(residual, std::abs(hv[i] - lambda * v[i]));
      if (it >= 1 && residual <= tol) break;
    }
    if (!(residual <= tol)) {
      std::ostringstream msg;
      msg << "lowest_eigenpairs: inverse iteration for eigenpair " << j << " (E = " << lambda
          << ") stalled with residual " << residual << " > " << tol;
      throw SolverFailure(msg.str());
    }
    unit_vectors.push_back(v);

    EigenPair pair;
    pair.index = j;
    pair.energy = lambda;
    pair.psi = normalize(v, h.spacing);
    fix_sign(pair.psi);
    pairs.push_back(std::move(pair));
  }
  return pairs;
}

std::vector<EigenPair> solve_lowest(const Grid& grid, const Potential& potential, int k) {
  return lowest_eigenpairs(build_hamiltonian(grid, potential), k);
}

}  // namespace bargzero
