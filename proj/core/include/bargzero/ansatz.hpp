#pragma once

// Variational trial wavefunction
//
//   psi(x) = f_env(x) * P(x) * [1 + eps * (M(x) + q M(-x)) / 2]
//
// f_env is a Gaussian (harmonic/anharmonic; times x for odd parity) or a
// parity-projected mixture of Gaussians centred at +-a (double well),
// P(x) = 1 + sum_k c_k u^k with u = x^2 or u = x^2 - a^2, and M is a small
// tanh MLP. The bracket parity is q = parity * envelope parity, so the
// bracket is always even and the product carries the envelope's parity.

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "bargzero/model.hpp"

namespace bargzero {

struct NetArchitecture {
  int depth = 4;
  int width = 128;

  friend bool operator==(const NetArchitecture&, const NetArchitecture&) = default;
};

/// Activations recorded by CorrectionNet::forward for the backward pass.
struct NetTape {
  Eigen::RowVectorXd input;
  std::vector<Eigen::MatrixXd> hidden;  // one width x n block per layer, post-tanh
};

/// 1 -> width -> ... -> width -> 1 MLP with tanh hidden activations and a
/// linear scalar head.
struct CorrectionNet {
  std::vector<Eigen::MatrixXd> weights;  // [0]: width x 1, then width x width
  std::vector<Eigen::VectorXd> biases;
  Eigen::RowVectorXd head_weights;
  double head_bias = 0.0;

  static CorrectionNet zeros(const NetArchitecture& arch);

  NetArchitecture architecture() const;
  std::size_t parameter_count() const;

  Eigen::RowVectorXd forward(const Eigen::RowVectorXd& x, NetTape* tape = nullptr) const;

  /// Accumulates d(sum_j g_j M(x_j)) / d(params) into `grad` (same shape).
  void backward(const NetTape& tape, const Eigen::RowVectorXd& grad_out, CorrectionNet& grad) const;
};

/// Elementwise tanh through exp; Eigen's double tanh is scalar and dominates
/// the forward pass otherwise.
void tanh_inplace(Eigen::MatrixXd& m);

enum class EnvelopeKind { Gaussian, DoubleWellMixture };

EnvelopeKind envelope_kind(PotentialKind kind) noexcept;

struct AnsatzParams {
  PotentialKind system = PotentialKind::Harmonic;
  int parity = +1;
  std::uint64_t seed = 0;

  double epsilon = 0.1;
  double log_barrier = 0.0;          // double well only
  std::vector<double> log_widths;    // 1 (Gaussian) or 3 (double well)
  std::vector<double> mix_weights;   // double well only
  std::vector<double> prefactor;     // c_1 .. c_K
  CorrectionNet net;

  EnvelopeKind envelope() const noexcept { return envelope_kind(system); }
  int envelope_parity() const noexcept { return parity; }
  int bracket_parity() const noexcept { return parity * envelope_parity(); }

  /// Trainable parameters excluding epsilon, as listed in capacity.csv:
  /// net + envelope + prefactor.
  std::size_t parameter_count() const;

  /// Flat layout: epsilon, [log_barrier], log_widths, mix_weights,
  /// prefactor, net (layer weights row-major, biases, head weights, head bias).
  std::size_t flat_size() const;
  Eigen::VectorXd pack() const;
  void unpack(const Eigen::VectorXd& flat);
  static constexpr std::size_t kEpsilonIndex = 0;

  /// Same structure, every value zero (used as a gradient container).
  AnsatzParams zeros_like() const;
};

struct AnsatzConfig {
  NetArchitecture arch{};
  double epsilon_init = 0.1;
  int prefactor_terms = 3;
  int mixture_components = 3;
  double weight_std = 0.3;
  double prefactor_std = 0.01;
  double gaussian_width_init = 1.0;
  double width_min = 0.35;
  double width_max = 1.0;
};

/// Deterministic for a fixed seed: net weights ~ N(0, weight_std^2), biases 0,
/// double-well widths log-spaced in [width_min, width_max], equal mixture
/// weights, barrier at the potential's a, c_k ~ N(0, prefactor_std^2).
AnsatzParams init_params(std::uint64_t seed, const AnsatzConfig& config, const Potential& system,
                         int parity);

/// Geometric spacing of `count` values between lo and hi (inclusive).
std::vector<double> log_spaced(double lo, double hi, int count);

std::vector<double> eval_envelope(const AnsatzParams& params, const Potential& system,
                                  std::span<const double> x);
std::vector<double> eval_prefactor(const AnsatzParams& params, const Potential& system,
                                   std::span<const double> x);
/// Unnormalised psi at arbitrary points; evaluates M at x and -x.
std::vector<double> eval_ansatz(const AnsatzParams& params, const Potential& system,
                                std::span<const double> x);

/// Serialises to a self-describing JSON document (architecture, seed, all arrays).
std::string params_to_json(const AnsatzParams& params, int indent = 1);
AnsatzParams params_from_json(const std::string& text);

}  // namespace bargzero
