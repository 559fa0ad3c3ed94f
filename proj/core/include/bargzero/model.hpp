#pragma once

// Grids and potentials.
//
// Every quantity in this library is dimensionless, measured in natural
// oscillator units (hbar = m = omega = 1): lengths in sqrt(hbar/(m omega)),
// energies in hbar*omega. Energies are reported as "Ha" in tables.

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace bargzero {

/// Uniform, endpoint-inclusive lattice on [-L, L].
///
/// The points are mirror-exact: points[n-1-i] == -points[i] bit for bit,
/// which lets parity-symmetrised quantities be evaluated by index reversal.
struct Grid {
  double half_width = 0.0;
  std::size_t n_points = 0;
  double spacing = 0.0;
  std::vector<double> points;

  std::size_t mirror(std::size_t i) const noexcept { return n_points - 1 - i; }
};

/// dx = 2L/(Nx-1). Throws std::invalid_argument for L <= 0 or Nx < 3.
Grid make_grid(double half_width, std::size_t n_points);

enum class PotentialKind { Harmonic, Anharmonic, DoubleWell };

class Potential {
 public:
  static Potential harmonic();
  /// V = x^2/2 + lambda x^4, lambda > 0.
  static Potential anharmonic(double lambda);
  /// V = (x^2 - a^2)^2 / 4, a > 0.
  static Potential double_well(double a);

  PotentialKind kind() const noexcept { return kind_; }
  /// lambda for Anharmonic, a for DoubleWell, 0 for Harmonic.
  double parameter() const noexcept { return param_; }
  /// Well position a; throws std::logic_error for other kinds.
  double barrier() const;

  double operator()(double x) const noexcept;

  friend bool operator==(const Potential&, const Potential&) = default;

 private:
  Potential(PotentialKind kind, double param) : kind_(kind), param_(param) {}
  PotentialKind kind_ = PotentialKind::Harmonic;
  double param_ = 0.0;
};

inline double eval_potential(const Potential& p, double x) noexcept { return p(x); }

std::vector<double> eval_potential(const Potential& p, std::span<const double> xs);

/// Parses "harmonic", "anharmonic:<lambda>", "dw:<a>".
Potential parse_potential(std::string_view text);

/// Inverse of parse_potential (shortest round-trip decimal).
std::string to_string(const Potential& p);

/// Filesystem-friendly label, e.g. "dw_1.5".
std::string file_label(const Potential& p);

/// Shortest decimal that round-trips the double.
std::string format_decimal(double v);

}  // namespace bargzero
