#pragma once

// Zero classification, the barrier sweep and the ablation protocols.

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bargzero/bargmann.hpp"
#include "bargzero/model.hpp"
#include "bargzero/train.hpp"

namespace bargzero {

enum class ZeroLabel { Origin, RealAxis, ImagAxis, QuartetMember };

struct ZeroClass {
  ZeroLabel label = ZeroLabel::Origin;
  double tolerance = 1e-6;
};

/// Checked in order: |z| < tol, |Im z| < tol, |Re z| < tol, otherwise quartet.
ZeroClass classify_zero(Complex z, double tol = 1e-6);
std::string to_string(ZeroLabel label);

/// One w = z^2 per {z, -z} pair, origin zeros giving w = 0, in the order the
/// pairs first appear. Throws PairingFailure for an unpaired non-origin zero.
std::vector<Complex> w_map(const ZeroSet& zeros, double pair_tol = 1e-6);

struct Drift {
  double mean = 0.0;
  double max = 0.0;
  int matched = 0;
  bool ambiguous = false;  // a match exceeded half the smallest gap between A's zeros
};

/// Greedy nearest-neighbour matching of the k smallest-|z| zeros of `a` to
/// zeros of `b`, taken in ascending |z| with removal. nullopt if either set
/// is empty.
std::optional<Drift> zero_drift(const ZeroSet& a, const ZeroSet& b, int k = 8);

/// (#ImagAxis + #Origin) / total at the given axis tolerance; nullopt for
/// an empty set.
std::optional<double> condensation_fraction(const ZeroSet& zeros, double tol = 1e-3);

/// n equally spaced values from lo to hi inclusive (lo when n == 1).
std::vector<double> linspace(double lo, double hi, int n);

/// Population mean and standard deviation of per-seed values.
struct SeedStats {
  std::vector<double> values;
  double mean = 0.0;
  double std = 0.0;
  int failed = 0;

  int count() const noexcept { return static_cast<int>(values.size()); }
};
SeedStats summarize(std::vector<double> values, int failed = 0);

// ---------------------------------------------------------------- sweep

struct SweepRecord {
  double a = 0.0;
  double e0 = 0.0;
  double e1 = 0.0;
  double delta = 0.0;
  ZeroSet ground;
  ZeroSet excited;
  std::optional<double> condensation_ground;
  std::optional<double> condensation_excited;
  bool ok = true;
  std::string status = "ok";
};

struct SweepConfig {
  double half_width = 8.0;
  std::size_t n_points = 1024;
  int nmax = 30;
  double rel_floor = 1e-4;
  double radius = 6.0;
  double condensation_tol = 1e-3;
};

/// Double-well FD eigenpairs and zero sets per a. Failures are recorded in
/// the record's status rather than thrown; order follows a_values.
std::vector<SweepRecord> barrier_sweep(const std::vector<double>& a_values, const SweepConfig& config = {},
                                       int jobs = 1);

struct SplittingProfile {
  double decades = 0.0;
  bool monotone_decreasing = true;
};

/// Over successful records in the given order (expected ascending a).
/// Throws std::invalid_argument with fewer than two.
SplittingProfile splitting_profile(const std::vector<SweepRecord>& records);

std::string sweep_to_csv(const std::vector<SweepRecord>& records);
std::string sweep_to_json(const std::vector<SweepRecord>& records);

// ---------------------------------------------------------------- ablations

struct GridRow {
  std::size_t n_points = 0;
  std::string system;
  double e0 = 0.0;
  double e1 = 0.0;
  double delta = 0.0;
  double seconds = 0.0;
};

/// Rows ordered by N, then by the given potential order.
std::vector<GridRow> grid_ablation(const std::vector<Potential>& systems, const std::vector<std::size_t>& n_list,
                                   double half_width = 8.0);

/// The six reference systems (harmonic, anharmonic 0.1/0.5, double well 1.0/1.5/2.0).
std::vector<Potential> reference_systems();

struct TrainedState {
  std::uint64_t seed = 0;
  bool failed = false;
  std::string message;
  double energy = 0.0;
  std::vector<double> psi;  // normalised, FD sign convention
};

/// Common inputs of the training-based ablations.
struct AblationSetup {
  Grid grid = make_grid(8.0, 1024);
  TrainConfig train{};
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4};
  int jobs = 1;
};

/// Trains one ground state per seed (seed replaces train.seed).
std::vector<TrainedState> train_ground_states(const AblationSetup& setup, const Potential& system,
                                              const TrainConfig& train);

struct CapacityRow {
  int depth = 0;
  int width = 0;
  std::size_t parameters = 0;
  SeedStats error;  // |E - E0_FD|
};

/// Double-well a = 1.5 ground state per (depth, width).
std::vector<CapacityRow> capacity_ablation(const std::vector<int>& depths, const std::vector<int>& widths,
                                           const AblationSetup& setup);
std::size_t capacity_parameter_count(int depth, int width);

struct EpsilonRow {
  double epsilon = 0.0;
  SeedStats error;
  SeedStats leading_zero;  // |z0| per seed
  SeedStats drift;         // mean drift of the leading zeros vs the epsilon = 0 baseline, per seed
  std::vector<std::vector<double>> states;  // normalised psi per successful seed, in seed order
};

struct EpsilonConfig {
  int nmax = 60;
  double rel_floor = 0.0;  // |z0| is read off the unthresholded projection
  int drift_zeros = 8;
};

/// Double-well a = 1.5 ground state trained with epsilon frozen at each
/// value. `seeds_for` picks the seed list per epsilon (defaults to setup.seeds).
std::vector<EpsilonRow> epsilon_ablation(const std::vector<double>& eps_values, const AblationSetup& setup,
                                         const EpsilonConfig& config = {},
                                         const std::vector<std::vector<std::uint64_t>>& seeds_for = {});
std::vector<double> reference_epsilons();

struct TruncationRow {
  int nmax = 0;
  double mean = 0.0;
  double max = 0.0;
  int states = 0;
  bool ambiguous = false;
};

/// Drift of the 8 leading zeros at each N_max against reference_nmax,
/// averaged over the given normalised states (standard 1e-4 floor).
std::vector<TruncationRow> truncation_ablation(const Grid& grid, const std::vector<std::vector<double>>& states,
                                               const std::vector<int>& nmax_list, int reference_nmax = 200);
std::vector<int> reference_truncation_orders();

struct WavefunctionError {
  double l2 = 0.0;
  double linf = 0.0;
};

/// Both inputs are normalised with the dx quadrature and the first is
/// sign-aligned with the second before subtracting.
WavefunctionError wavefunction_error(const std::vector<double>& trained, const std::vector<double>& reference,
                                     double dx);

struct L2Row {
  std::string system;
  SeedStats energy_error;
  SeedStats l2;
  SeedStats linf;
  double l2_max = 0.0;
};

/// Ground states of each system against its FD solution.
std::vector<L2Row> l2_validation(const std::vector<Potential>& systems, const AblationSetup& setup);
/// Seven systems: the six reference systems plus the double well at a = 2.5.
std::vector<Potential> l2_systems();

/// Builds an L2 row from already trained states.
L2Row l2_row(const Potential& system, const Grid& grid, const std::vector<TrainedState>& states);
CapacityRow capacity_row(int depth, int width, double reference_energy, const std::vector<TrainedState>& states);

std::string grid_to_csv(const std::vector<GridRow>& rows);
std::string capacity_to_csv(const std::vector<CapacityRow>& rows);
std::string epsilon_to_csv(const std::vector<EpsilonRow>& rows);
std::string truncation_to_csv(const std::vector<TruncationRow>& rows);
std::string l2_to_csv(const std::vector<L2Row>& rows);

}  // namespace bargzero
