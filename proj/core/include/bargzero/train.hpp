#pragma once

// Rayleigh-Ritz training of the variational ansatz against the discrete
// Hamiltonian: hand-written reverse-mode gradients, a four-phase Adam
// schedule, an L-BFGS polish with strong-Wolfe line search, and restarts.

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "bargzero/ansatz.hpp"
#include "bargzero/fdsolve.hpp"
#include "bargzero/model.hpp"

namespace bargzero {

/// (psi^T H psi) / (psi^T psi) with the three-point stencil.
/// Throws std::invalid_argument when psi has zero norm.
double rayleigh_quotient(std::span<const double> psi, const TridiagonalHamiltonian& h);

enum class Target { Ground, Excited };

struct LossSpec {
  Target target = Target::Ground;
  std::vector<double> reference_ground;  // normalised psi0, Excited only
  double alpha = 50.0;
};

struct LossValue {
  double loss = 0.0;
  double energy = 0.0;   // Rayleigh quotient
  double overlap = 0.0;  // dx * sum(psi_hat * psi0); 0 for Ground
};

/// Loss and gradient of one system on one grid. Immutable after construction.
class LossFunction {
 public:
  LossFunction(Grid grid, Potential system, LossSpec spec);

  const Grid& grid() const noexcept { return grid_; }
  const Potential& system() const noexcept { return system_; }
  const TridiagonalHamiltonian& hamiltonian() const noexcept { return h_; }
  const LossSpec& spec() const noexcept { return spec_; }

  LossValue evaluate(const AnsatzParams& params) const;
  /// Overwrites `grad` (same structure as params) with dLoss/dparams.
  LossValue evaluate(const AnsatzParams& params, AnsatzParams& grad) const;

  /// Unnormalised psi on the grid (uses the mirror symmetry of the grid).
  std::vector<double> wavefunction(const AnsatzParams& params) const;

 private:
  struct Forward;
  Forward forward(const AnsatzParams& params, bool keep_tape) const;

  Grid grid_;
  Potential system_;
  TridiagonalHamiltonian h_;
  LossSpec spec_;
};

double loss(const AnsatzParams& params, const LossFunction& fn);
AnsatzParams gradient(const AnsatzParams& params, const LossFunction& fn);

// ---------------------------------------------------------------- polish

struct PolishConfig {
  int outer_iterations = 4;
  int inner_iterations = 50;
  double gradient_tolerance = 1e-12;
  double step_tolerance = 1e-14;
  int history = 50;
  double c1 = 1e-4;
  double c2 = 0.9;
  int max_line_search = 25;
};

/// f(x, grad) -> value; grad is resized and overwritten.
using Objective = std::function<double(const Eigen::VectorXd&, Eigen::VectorXd&)>;

struct PolishResult {
  Eigen::VectorXd x;
  double value = 0.0;
  double start_value = 0.0;
  int iterations = 0;
  int evaluations = 0;
  std::string stop_reason;
  std::vector<double> trace;  // value after each accepted iteration
};

/// L-BFGS with strong-Wolfe line search. Never returns a point worse than x0;
/// a failed line search ends the polish with the best point seen.
PolishResult quasi_newton_polish(const Eigen::VectorXd& x0, const Objective& f,
                                 const PolishConfig& config = {});

// ---------------------------------------------------------------- training

struct TrainConfig {
  AnsatzConfig ansatz{};
  std::vector<double> learning_rates{3e-3, 1e-3, 3e-4, 5e-5};
  std::vector<double> phase_boundaries{0.30, 0.60, 0.85};
  int adam_steps = 10000;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  PolishConfig polish{};
  bool polish_enabled = true;
  double alpha = 50.0;
  int restarts = 1;
  std::uint64_t seed = 0;
  bool freeze_epsilon = false;

  /// Throws std::invalid_argument when the schedule is malformed.
  void validate() const;
  /// Learning rate for a 0-based Adam step.
  double learning_rate(int step) const;
};

/// Defaults plus 4 restarts for the double-well first excited state.
TrainConfig default_train_config(const Potential& system, int parity);

struct RestartReport {
  int index = 0;
  std::uint64_t seed = 0;
  bool failed = false;
  std::string message;
  double adam_best_loss = 0.0;
  double final_loss = 0.0;
  double final_energy = 0.0;
  int polish_iterations = 0;
};

struct TrainResult {
  AnsatzParams params;
  double energy = 0.0;
  double loss = 0.0;
  std::vector<double> trace;  // energy per Adam step, then per polish iteration
  int polish_start = 0;       // index in trace where the polish begins
  int restart_index = 0;
  std::vector<RestartReport> restarts;
  double wall_seconds = 0.0;
};

/// Seed for restart r (restart 0 uses the base seed).
std::uint64_t restart_seed(std::uint64_t base, int restart);

/// Runs all restarts (optionally on `jobs` workers) and keeps the strictly
/// lowest final loss, ties going to the lower restart index. Excited targets
/// need spec.reference_ground. Throws TrainingFailure if every restart fails.
TrainResult train(const TrainConfig& config, const Grid& grid, const Potential& system, int parity,
                  const LossSpec& spec, int jobs = 1);

/// JSON summary: energies, restart reports, trace every `trace_stride` steps.
std::string train_result_to_json(const TrainResult& result, const std::string& params_file,
                                 int trace_stride = 50);

}  // namespace bargzero
