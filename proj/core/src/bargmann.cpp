#include "bargzero/bargmann.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "bargzero/errors.hpp"
#include "bargzero/io.hpp"

namespace bargzero {

Eigen::MatrixXd hermite_basis(const Grid& grid, int nmax) {
  if (nmax < 0) throw std::invalid_argument("hermite_basis: nmax must be >= 0");
  const auto n = static_cast<Eigen::Index>(grid.n_points);
  Eigen::MatrixXd phi(nmax + 1, n);
  const double norm0 = std::pow(std::numbers::pi, -0.25);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double x = grid.points[static_cast<std::size_t>(i)];
    phi(0, i) = norm0 * std::exp(-0.5 * x * x);
    if (nmax >= 1) phi(1, i) = std::numbers::sqrt2 * x * phi(0, i);
    for (int k = 1; k < nmax; ++k) {
      phi(k + 1, i) = std::sqrt(2.0 / (k + 1)) * x * phi(k, i) - std::sqrt(static_cast<double>(k) / (k + 1)) * phi(k - 1, i);
    }
  }
  return phi;
}

FockSpectrum project(std::span<const double> psi, const Eigen::MatrixXd& basis, double dx) {
  if (static_cast<Eigen::Index>(psi.size()) != basis.cols())
    throw std::invalid_argument("project: wavefunction and basis sizes differ");
  Eigen::Map<const Eigen::VectorXd> v(psi.data(), static_cast<Eigen::Index>(psi.size()));
  const Eigen::VectorXd c = dx * (basis * v);
  FockSpectrum s;
  s.coefficients.assign(c.data(), c.data() + c.size());
  s.nmax = static_cast<int>(basis.rows()) - 1;
  s.spacing = dx;
  s.completeness_residual = 1.0 - c.squaredNorm();
  return s;
}

BargmannPolynomial to_bargmann(const FockSpectrum& spectrum) {
  BargmannPolynomial p;
  p.coefficients.resize(spectrum.coefficients.size());
  for (std::size_t n = 0; n < spectrum.coefficients.size(); ++n)
    p.coefficients[n] = spectrum.coefficients[n] * std::exp(-0.5 * std::lgamma(static_cast<double>(n) + 1.0));
  p.degree = p.coefficients.empty() ? 0 : static_cast<int>(p.coefficients.size()) - 1;
  return p;
}

BargmannPolynomial threshold_and_trim(BargmannPolynomial poly, double rel_floor) {
  double peak = 0.0;
  for (double a : poly.coefficients) peak = std::max(peak, std::abs(a));
  if (!(peak > 0.0)) throw EmptyPolynomial("Bargmann polynomial is identically zero");
  const double floor = rel_floor * peak;
  for (double& a : poly.coefficients)
    if (std::abs(a) < floor) a = 0.0;
  while (!poly.coefficients.empty() && poly.coefficients.back() == 0.0) poly.coefficients.pop_back();
  poly.degree = static_cast<int>(poly.coefficients.size()) - 1;
  poly.threshold = rel_floor;
  return poly;
}

Complex evaluate(std::span<const double> coefficients, Complex z) {
  Complex acc = 0.0;
  for (std::size_t k = coefficients.size(); k-- > 0;) acc = acc * z + coefficients[k];
  return acc;
}

namespace {

constexpr double kUnitRoundoff = 1.1102230246251565e-16;

// Newton ratio p/p' plus a flag telling whether |p(z)| is already at the
// rounding-error level. |z| > 1 goes through the reversed polynomial so
// nothing overflows for high degree.
struct NewtonStep {
  Complex ratio;
  bool converged = false;
  double scaled_residual = 0.0;  // |p(z)| / max(1, |z|)^n
};

NewtonStep newton_step(const std::vector<double>& a, Complex z) {
  const std::size_t n = a.size() - 1;
  NewtonStep out;
  if (std::abs(z) <= 1.0) {
    Complex p = a[n], dp = 0.0;
    double bound = std::abs(a[n]);
    const double az = std::abs(z);
    for (std::size_t k = n; k-- > 0;) {
      dp = dp * z + p;
      p = p * z + a[k];
      bound = bound * az + std::abs(a[k]);
    }
    out.scaled_residual = std::abs(p);
    out.converged = std::abs(p) <= 4.0 * static_cast<double>(n + 1) * kUnitRoundoff * bound;
    out.ratio = p / dp;
    return out;
  }
  const Complex w = 1.0 / z;
  Complex r = a[0], dr = 0.0;
  double bound = std::abs(a[0]);
  const double aw = std::abs(w);
  for (std::size_t j = 1; j <= n; ++j) {
    dr = dr * w + r;
    r = r * w + a[j];
    bound = bound * aw + std::abs(a[j]);
  }
  out.scaled_residual = std::abs(r);
  out.converged = std::abs(r) <= 4.0 * static_cast<double>(n + 1) * kUnitRoundoff * bound;
  out.ratio = z / (static_cast<double>(n) - w * dr / r);
  return out;
}

// Initial approximations on circles from the upper convex hull of
// (k, log|a_k|) (Bini's Newton-polygon start).
std::vector<Complex> initial_guesses(const std::vector<double>& a) {
  const std::size_t n = a.size() - 1;
  std::vector<std::size_t> idx;
  std::vector<double> la;
  for (std::size_t k = 0; k <= n; ++k) {
    if (a[k] != 0.0) {
      idx.push_back(k);
      la.push_back(std::log(std::abs(a[k])));
    }
  }
  std::vector<std::size_t> hull;
  for (std::size_t p = 0; p < idx.size(); ++p) {
    while (hull.size() >= 2) {
      const std::size_t i1 = hull[hull.size() - 2], i2 = hull.back();
      const double cross = (static_cast<double>(idx[i2]) - static_cast<double>(idx[i1])) * (la[p] - la[i1]) -
                           (la[i2] - la[i1]) * (static_cast<double>(idx[p]) - static_cast<double>(idx[i1]));
      if (cross >= 0.0)
        hull.pop_back();
      else
        break;
    }
    hull.push_back(p);
  }
  std::vector<Complex> z;
  z.reserve(n);
  constexpr double offset = 0.7;
  for (std::size_t h = 0; h + 1 < hull.size(); ++h) {
    const std::size_t k0 = idx[hull[h]], k1 = idx[hull[h + 1]];
    const std::size_t m = k1 - k0;
    const double radius = std::exp((la[hull[h]] - la[hull[h + 1]]) / static_cast<double>(m));
    for (std::size_t j = 0; j < m; ++j) {
      const double theta = 2.0 * std::numbers::pi * (static_cast<double>(j) / m + static_cast<double>(h) / n) + offset;
      z.push_back(std::polar(radius, theta));
    }
  }
  return z;
}

bool aberth(const std::vector<double>& a, std::vector<Complex>& z, int max_iter) {
  const std::size_t n = z.size();
  std::vector<char> done(n, 0);
  std::size_t remaining = n;
  for (int it = 0; it < max_iter && remaining > 0; ++it) {
    for (std::size_t i = 0; i < n; ++i) {
      if (done[i]) continue;
      const auto step = newton_step(a, z[i]);
      if (step.converged || !std::isfinite(std::abs(step.ratio))) {
        done[i] = 1;
        --remaining;
        continue;
      }
      Complex s = 0.0;
      for (std::size_t j = 0; j < n; ++j)
        if (j != i) s += 1.0 / (z[i] - z[j]);
      const Complex w = step.ratio / (1.0 - step.ratio * s);
      if (!std::isfinite(std::abs(w))) {
        done[i] = 1;
        --remaining;
        continue;
      }
      z[i] -= w;
      if (std::abs(w) <= kUnitRoundoff * std::abs(z[i])) {
        done[i] = 1;
        --remaining;
      }
    }
  }
  return remaining == 0;
}

std::vector<Complex> companion_roots(const std::vector<double>& a) {
  const auto n = static_cast<Eigen::Index>(a.size() - 1);
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 1; i < n; ++i) c(i, i - 1) = 1.0;
  for (Eigen::Index i = 0; i < n; ++i) c(i, n - 1) = -a[static_cast<std::size_t>(i)] / a.back();
  Eigen::EigenSolver<Eigen::MatrixXd> es(c, false);
  if (es.info() != Eigen::Success) throw RootFindingFailure("companion-matrix eigensolver did not converge");
  std::vector<Complex> z(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) z[static_cast<std::size_t>(i)] = es.eigenvalues()[i];
  return z;
}

void newton_polish(const std::vector<double>& a, std::vector<Complex>& z) {
  for (auto& root : z) {
    auto step = newton_step(a, root);
    for (int k = 0; k < 6 && !step.converged; ++k) {
      const Complex candidate = root - step.ratio;
      if (!std::isfinite(std::abs(candidate))) break;
      const auto next = newton_step(a, candidate);
      if (!(next.scaled_residual < step.scaled_residual)) break;
      root = candidate;
      step = next;
    }
  }
}

void pair_conjugates(std::vector<Complex>& z) {
  const std::size_t n = z.size();
  std::vector<char> used(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (used[i]) continue;
    const Complex target = std::conj(z[i]);
    std::size_t best = n;
    double best_d = 2.0 * std::abs(z[i].imag());
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i || used[j]) continue;
      const double d = std::abs(z[j] - target);
      if (d < best_d) {
        best_d = d;
        best = j;
      }
    }
    used[i] = 1;
    if (best == n) {
      z[i] = Complex(z[i].real(), 0.0);
    } else {
      const Complex avg = 0.5 * (z[i] + std::conj(z[best]));
      z[i] = avg;
      z[best] = std::conj(avg);
      used[best] = 1;
    }
  }
}

}  // namespace

void sort_zeros(ZeroSet& zs) {
  std::vector<std::size_t> order(zs.zeros.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    const double ai = std::abs(zs.zeros[i]), aj = std::abs(zs.zeros[j]);
    if (ai != aj) return ai < aj;
    return std::arg(zs.zeros[i]) < std::arg(zs.zeros[j]);
  });
  ZeroSet sorted;
  sorted.radius = zs.radius;
  for (auto i : order) {
    sorted.zeros.push_back(zs.zeros[i]);
    if (i < zs.residuals.size()) sorted.residuals.push_back(zs.residuals[i]);
  }
  zs = std::move(sorted);
}

ZeroSet find_zeros(std::span<const double> coefficients) {
  std::vector<double> a(coefficients.begin(), coefficients.end());
  while (!a.empty() && a.back() == 0.0) a.pop_back();
  ZeroSet out;
  if (a.size() <= 1) return out;
  const std::size_t degree = a.size() - 1;
  double peak = 0.0;
  for (double v : a) peak = std::max(peak, std::abs(v));

  std::size_t origin = 0;
  while (a[origin] == 0.0) ++origin;
  std::vector<double> reduced(a.begin() + static_cast<std::ptrdiff_t>(origin), a.end());
  std::vector<Complex> roots;
  if (reduced.size() == 2) {
    roots.push_back(-reduced[0] / reduced[1]);
  } else if (reduced.size() > 2) {
    roots = initial_guesses(reduced);
    if (!aberth(reduced, roots, 2000)) roots = companion_roots(reduced);
    newton_polish(reduced, roots);
    pair_conjugates(roots);
  }
  for (std::size_t k = 0; k < origin; ++k) out.zeros.emplace_back(0.0, 0.0);
  out.zeros.insert(out.zeros.end(), roots.begin(), roots.end());

  for (const auto& z : out.zeros) {
    const double az = std::abs(z);
    double scaled;
    double residual;
    if (az <= 1.0) {
      residual = std::abs(evaluate(a, z));
      scaled = residual;
    } else {
      const Complex w = 1.0 / z;
      Complex r = 0.0;
      for (std::size_t j = 0; j <= degree; ++j) r = r * w + a[j];
      scaled = std::abs(r);
      residual = scaled * std::exp(static_cast<double>(degree) * std::log(az));
    }
    if (!(scaled <= 1e-10 * peak)) {
      std::ostringstream msg;
      msg << "root z = " << z << " misses the residual bound: scaled |p(z)| = " << scaled
          << " > " << 1e-10 * peak << " (degree " << degree << ")";
      throw RootFindingFailure(msg.str());
    }
    out.residuals.push_back(residual);
  }
  sort_zeros(out);
  return out;
}

ZeroSet find_zeros(const BargmannPolynomial& poly) { return find_zeros(std::span<const double>(poly.coefficients)); }

ZeroSet filter_radius(const ZeroSet& zeros, double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("filter_radius: radius must be positive");
  ZeroSet out;
  out.radius = radius;
  for (std::size_t i = 0; i < zeros.zeros.size(); ++i) {
    if (std::abs(zeros.zeros[i]) < radius) {
      out.zeros.push_back(zeros.zeros[i]);
      if (i < zeros.residuals.size()) out.residuals.push_back(zeros.residuals[i]);
    }
  }
  return out;
}

double husimi(const BargmannPolynomial& poly, Complex z) {
  const Complex v = evaluate(poly.coefficients, z);
  return std::norm(v) * std::exp(-std::norm(z)) / std::numbers::pi;
}

Eigen::MatrixXd husimi_lattice(const BargmannPolynomial& poly, double extent, int n) {
  if (n < 2) throw std::invalid_argument("husimi_lattice: need n >= 2");
  Eigen::MatrixXd q(n, n);
  const double step = 2.0 * extent / (n - 1);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) q(r, c) = husimi(poly, Complex(-extent + c * step, -extent + r * step));
  return q;
}

ZeroPipelineResult bargmann_zeros(const Grid& grid, std::span<const double> psi, const ZeroPipelineConfig& config) {
  ZeroPipelineResult r;
  r.spectrum = project(psi, hermite_basis(grid, config.nmax), grid.spacing);
  auto poly = to_bargmann(r.spectrum);
  try {
    r.polynomial = threshold_and_trim(std::move(poly), config.rel_floor);
  } catch (const EmptyPolynomial&) {
    r.empty_polynomial = true;
    r.filtered.radius = config.radius;
    return r;
  }
  r.all = find_zeros(r.polynomial);
  r.filtered = filter_radius(r.all, config.radius);
  return r;
}

std::string fock_to_csv(const FockSpectrum& s) {
  const auto poly = to_bargmann(s);
  std::string out = "n,c_n,a_n\n";
  for (std::size_t n = 0; n < s.coefficients.size(); ++n)
    out += csv_row({std::to_string(n), csv_number(s.coefficients[n]), csv_number(poly.coefficients[n])});
  return out;
}

std::string zeros_to_csv(const ZeroSet& zs) {
  std::string out = "re,im,abs,residual\n";
  for (std::size_t i = 0; i < zs.zeros.size(); ++i) {
    const auto z = zs.zeros[i];
    out += csv_row({csv_number(z.real()), csv_number(z.imag()), csv_number(std::abs(z)),
                    csv_number(i < zs.residuals.size() ? zs.residuals[i] : 0.0)});
  }
  return out;
}

std::string fock_to_json(const FockSpectrum& s) {
  nlohmann::json j;
  j["format"] = "bargzero.fock/1";
  j["nmax"] = s.nmax;
  j["spacing"] = s.spacing;
  j["completeness_residual"] = s.completeness_residual;
  j["coefficients"] = s.coefficients;
  return j.dump(1);
}

std::string zeros_to_json(const ZeroSet& zs) {
  nlohmann::json j;
  j["format"] = "bargzero.zeros/1";
  if (std::isfinite(zs.radius)) j["radius"] = zs.radius;
  else j["radius"] = nullptr;
  auto arr = nlohmann::json::array();
  for (std::size_t i = 0; i < zs.zeros.size(); ++i)
    arr.push_back({{"re", zs.zeros[i].real()},
                   {"im", zs.zeros[i].imag()},
                   {"abs", std::abs(zs.zeros[i])},
                   {"residual", i < zs.residuals.size() ? zs.residuals[i] : 0.0}});
  j["zeros"] = arr;
  return j.dump(1);
}

}  // namespace bargzero
