#pragma once

// Hermite-basis projection, the truncated Bargmann polynomial, its complex
// zeros and the Husimi function.

#include <Eigen/Dense>
#include <complex>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "bargzero/model.hpp"

namespace bargzero {

using Complex = std::complex<double>;

/// Rows are phi_n(x_i), n = 0..nmax, from the normalised three-term recurrence.
Eigen::MatrixXd hermite_basis(const Grid& grid, int nmax);

struct FockSpectrum {
  std::vector<double> coefficients;  // c_n = dx sum_i phi_n(x_i) psi(x_i)
  int nmax = 0;
  double spacing = 0.0;
  double completeness_residual = 0.0;  // 1 - sum c_n^2
};

FockSpectrum project(std::span<const double> psi, const Eigen::MatrixXd& basis, double dx);

struct BargmannPolynomial {
  std::vector<double> coefficients;  // a_n, lowest order first
  int degree = 0;
  double threshold = 0.0;  // relative floor applied (0 = none)
};

/// a_n = c_n / sqrt(n!), with sqrt(n!) taken as exp(lgamma(n+1)/2).
BargmannPolynomial to_bargmann(const FockSpectrum& spectrum);

/// Zeroes |a_n| < rel_floor * max|a_n| and trims trailing zeros.
/// Throws EmptyPolynomial when every coefficient vanishes.
BargmannPolynomial threshold_and_trim(BargmannPolynomial poly, double rel_floor = 1e-4);

struct ZeroSet {
  std::vector<Complex> zeros;     // ascending |z|, ties by ascending arg
  std::vector<double> residuals;  // |p(z_k)|
  double radius = std::numeric_limits<double>::infinity();

  std::size_t size() const noexcept { return zeros.size(); }
  bool empty() const noexcept { return zeros.empty(); }
};

/// p(z) by Horner.
Complex evaluate(std::span<const double> coefficients, Complex z);

/// All roots of a real polynomial (lowest order first). Exact low-order
/// zero coefficients give exact roots at the origin; the rest come from
/// Aberth-Ehrlich iteration seeded on Newton-polygon circles, with a
/// companion-matrix fallback, Newton polishing and conjugate pairing.
/// Throws RootFindingFailure if a root misses the residual bound
/// |p(z)| <= 1e-10 max|a| max(1,|z|)^degree.
ZeroSet find_zeros(std::span<const double> coefficients);
ZeroSet find_zeros(const BargmannPolynomial& poly);

/// Keeps |z| < radius; order is preserved.
ZeroSet filter_radius(const ZeroSet& zeros, double radius);

/// Sorts by ascending |z|, ties by ascending argument.
void sort_zeros(ZeroSet& zeros);

/// Q(z) = |psi(z)|^2 exp(-|z|^2) / pi on the truncated polynomial.
double husimi(const BargmannPolynomial& poly, Complex z);

/// Q sampled on an n x n square lattice covering [-extent, extent]^2;
/// entry (row, col) is at z = x_col + i y_row with y increasing by row.
Eigen::MatrixXd husimi_lattice(const BargmannPolynomial& poly, double extent, int n);

struct ZeroPipelineConfig {
  int nmax = 30;
  double rel_floor = 1e-4;
  double radius = 6.0;
};

struct ZeroPipelineResult {
  FockSpectrum spectrum;
  BargmannPolynomial polynomial;  // after thresholding
  ZeroSet all;
  ZeroSet filtered;
  bool empty_polynomial = false;
};

/// psi (normalised on the grid) -> Fock spectrum -> thresholded Bargmann
/// polynomial -> zeros, both unfiltered and within the radius.
ZeroPipelineResult bargmann_zeros(const Grid& grid, std::span<const double> psi,
                                  const ZeroPipelineConfig& config = {});

/// CSV: one row per n (n, c_n, a_n).
std::string fock_to_csv(const FockSpectrum& spectrum);
/// CSV: one row per zero (re, im, abs, residual).
std::string zeros_to_csv(const ZeroSet& zeros);
std::string fock_to_json(const FockSpectrum& spectrum);
std::string zeros_to_json(const ZeroSet& zeros);

}  // namespace bargzero
