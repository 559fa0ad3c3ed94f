#pragma once

// Three-point Dirichlet finite-difference Hamiltonian and its lowest
// eigenpairs.

#include <span>
#include <vector>

#include "bargzero/model.hpp"

namespace bargzero {

/// H = -1/2 D2 + V on the grid. Off-diagonal entries are all -1/(2 dx^2);
/// there is no coupling past the end points (psi = 0 just outside [-L, L]).
struct TridiagonalHamiltonian {
  std::vector<double> diag;
  std::vector<double> offdiag;
  double spacing = 0.0;

  std::size_t size() const noexcept { return diag.size(); }

  /// out = H psi. The kinetic part is formed from second differences.
  void apply(std::span<const double> psi, std::span<double> out) const;
  std::vector<double> apply(std::span<const double> psi) const;
};

TridiagonalHamiltonian build_hamiltonian(const Grid& grid, const Potential& potential);

struct EigenPair {
  double energy = 0.0;
  std::vector<double> psi;  // dx * sum psi^2 == 1
  int index = 0;
};

/// The k algebraically smallest eigenpairs, by Sturm-sequence bisection and
/// inverse iteration. Eigenvectors are normalised with the dx-weighted sum
/// and signed so the first entry above 1e-3 of the peak is positive.
/// Throws SolverFailure when the residual check fails.
std::vector<EigenPair> lowest_eigenpairs(const TridiagonalHamiltonian& h, int k);

/// Number of eigenvalues strictly below `lambda`.
std::size_t sturm_count(const TridiagonalHamiltonian& h, double lambda);

/// dx * sum psi^2 = 1. Throws std::invalid_argument on a zero vector.
std::vector<double> normalize(std::span<const double> psi, double dx);

/// Flips the sign so that the first entry with |psi| > 1e-3 max|psi| is positive.
void fix_sign(std::span<double> psi);

double inner_product(std::span<const double> a, std::span<const double> b, double dx);

/// Convenience: grid + potential -> lowest k eigenpairs.
std::vector<EigenPair> solve_lowest(const Grid& grid, const Potential& potential, int k = 2);

}  // namespace bargzero
