#include <stdexcept>
#include <cmath>
#include <random>

#include "bargzero/errors.hpp"
#include "bargzero/fdsolve.hpp"
#include "bargzero/train.hpp"
#include "doctest.h"
#include "quad_loss.hpp"

using namespace bargzero;

namespace {

AnsatzParams random_params(std::uint64_t seed, const Potential& sys, int parity, int depth, int width) {
  AnsatzConfig cfg;
  cfg.arch = {depth, width};
  auto p = init_params(seed, cfg, sys, parity);
  std::mt19937_64 rng(seed * 7919 + 1);
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::VectorXd flat = p.pack();
  std::uniform_real_distribution<double> u(0.05, 0.5);
  flat[0] = u(rng);
  std::size_t k = 1;
  const std::size_t shape_end = 1 + (p.flat_size() - p.net.parameter_count() - 1);
  for (; k < shape_end; ++k) flat[static_cast<Eigen::Index>(k)] += 0.05 * n(rng);
  for (; k < p.flat_size(); ++k) flat[static_cast<Eigen::Index>(k)] = 0.4 * n(rng);
  p.unpack(flat);
  return p;
}

LossSpec spec_for(const Grid& g, const Potential& sys, int parity) {
  LossSpec s;
  if (parity < 0) {
    s.target = Target::Excited;
    s.reference_ground = solve_lowest(g, sys, 1)[0].psi;
  }
  return s;
}

}  // namespace

TEST_CASE("Rayleigh quotient: eigenvector, scale invariance, variational bound") {
  const auto g = make_grid(8.0, 512);
  const auto sys = Potential::double_well(1.5);
  const auto h = build_hamiltonian(g, sys);
  const auto e = solve_lowest(g, sys, 2);
  CHECK(rayleigh_quotient(e[0].psi, h) == doctest::Approx(e[0].energy).epsilon(1e-12));
  CHECK(rayleigh_quotient(e[1].psi, h) == doctest::Approx(e[1].energy).epsilon(1e-12));
  std::mt19937_64 rng(4);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int t = 0; t < 20; ++t) {
    std::vector<double> psi(g.n_points);
    for (std::size_t i = 0; i < psi.size(); ++i) psi[i] = std::exp(-0.3 * g.points[i] * g.points[i]) + 0.01 * n(rng);
    const double r = rayleigh_quotient(psi, h);
    CHECK(r >= e[0].energy - 1e-12);
    for (double c : {-3.0, 1e-3, 250.0}) {
      auto scaled = psi;
      for (double& v : scaled) v *= c;
      CHECK(rayleigh_quotient(scaled, h) == doctest::Approx(r).epsilon(1e-13));
    }
  }
  CHECK_THROWS_AS(rayleigh_quotient(std::vector<double>(g.n_points, 0.0), h), std::invalid_argument);
}

TEST_CASE("loss value matches the binary128 oracle") {
  const auto g = make_grid(8.0, 256);
  for (const auto& sys : {Potential::harmonic(), Potential::anharmonic(0.1), Potential::double_well(1.5)}) {
    for (int parity : {+1, -1}) {
      const auto p = random_params(3, sys, parity, 2, 8);
      const auto spec = spec_for(g, sys, parity);
      const LossFunction fn(g, sys, spec);
      const auto problem = oracle::make_problem(g, sys, spec, p);
      const Eigen::VectorXd flat = p.pack();
      std::vector<oracle::quad> qf(flat.data(), flat.data() + flat.size());
      const double q = static_cast<double>(oracle::quad_loss(problem, qf));
      CHECK(loss(p, fn) == doctest::Approx(q).epsilon(1e-12));
    }
  }
}

TEST_CASE("reverse-mode gradient against binary128 central differences") {
  const auto g = make_grid(8.0, 256);
  double worst = 0.0;
  for (const auto& sys : {Potential::harmonic(), Potential::anharmonic(0.1), Potential::double_well(1.5)}) {
    for (int parity : {+1, -1}) {
      for (std::uint64_t draw = 0; draw < 3; ++draw) {
        const auto p = random_params(100 + draw, sys, parity, 2, 8);
        const auto spec = spec_for(g, sys, parity);
        const LossFunction fn(g, sys, spec);
        const Eigen::VectorXd ad = gradient(p, fn).pack();
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < p.flat_size(); i += (i < 12 ? 1 : 5)) idx.push_back(i);
        const auto fd = oracle::central_gradient(oracle::make_problem(g, sys, spec, p), p.pack(), idx);
        for (std::size_t k = 0; k < idx.size(); ++k) {
          const double a = ad[static_cast<Eigen::Index>(idx[k])];
          const double err = std::abs(a - fd[k]) / std::max(std::abs(fd[k]), 1e-8);
          worst = std::max(worst, err);
        }
      }
    }
  }
  CHECK(worst <= 1e-6);
}

TEST_CASE("learning-rate schedule") {
  TrainConfig c;
  CHECK(c.learning_rate(0) == 3e-3);
  CHECK(c.learning_rate(2999) == 3e-3);
  CHECK(c.learning_rate(3000) == 1e-3);
  CHECK(c.learning_rate(5999) == 1e-3);
  CHECK(c.learning_rate(6000) == 3e-4);
  CHECK(c.learning_rate(8499) == 3e-4);
  CHECK(c.learning_rate(8500) == 5e-5);
  CHECK(c.learning_rate(9999) == 5e-5);
  c.validate();
  TrainConfig bad = c;
  bad.phase_boundaries = {0.6, 0.3, 0.85};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = c;
  bad.learning_rates = {1e-3, 3e-3, 1e-4, 1e-5};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = c;
  bad.restarts = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("default configuration") {
  CHECK(default_train_config(Potential::double_well(1.5), -1).restarts == 4);
  CHECK(default_train_config(Potential::double_well(1.5), +1).restarts == 1);
  CHECK(default_train_config(Potential::harmonic(), -1).restarts == 1);
  CHECK(default_train_config(Potential::harmonic(), +1).adam_steps == 10000);
}

TEST_CASE("restart seeds") {
  CHECK(restart_seed(42, 0) == 42);
  CHECK(restart_seed(42, 1) != 42);
  CHECK(restart_seed(42, 1) != restart_seed(42, 2));
  CHECK(restart_seed(42, 1) == restart_seed(42, 1));
}

TEST_CASE("L-BFGS polish minimises Rosenbrock and never gets worse") {
  const Objective rosen = [](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
    g.resize(2);
    const double a = 1.0 - x[0], b = x[1] - x[0] * x[0];
    g[0] = -2.0 * a - 400.0 * x[0] * b;
    g[1] = 200.0 * b;
    return a * a + 100.0 * b * b;
  };
  Eigen::VectorXd x0(2);
  x0 << -1.2, 1.0;
  PolishConfig cfg;
  cfg.outer_iterations = 4;
  cfg.inner_iterations = 100;
  const auto r = quasi_newton_polish(x0, rosen, cfg);
  CHECK(r.value <= r.start_value);
  CHECK(std::abs(r.x[0] - 1.0) < 1e-6);
  CHECK(std::abs(r.x[1] - 1.0) < 1e-6);
  CHECK(r.start_value == doctest::Approx(24.2));
}

TEST_CASE("reduced-budget harmonic ground state") {
  const auto g = make_grid(8.0, 1024);
  const auto sys = Potential::harmonic();
  TrainConfig c = default_train_config(sys, +1);
  c.ansatz.arch = {2, 16};
  c.adam_steps = 2000;
  const auto r = train(c, g, sys, +1, LossSpec{});
  const double e0 = solve_lowest(g, sys, 1)[0].energy;
  CHECK(r.energy >= e0 - 1e-12);
  CHECK(r.energy - e0 <= 1e-5);
  CHECK(r.energy <= 0.500002);
}

TEST_CASE("training is deterministic and independent of the worker count") {
  const auto g = make_grid(8.0, 256);
  const auto sys = Potential::double_well(1.5);
  TrainConfig c = default_train_config(sys, -1);
  c.ansatz.arch = {2, 8};
  c.adam_steps = 150;
  c.restarts = 3;
  c.polish.outer_iterations = 1;
  c.polish.inner_iterations = 10;
  const auto spec = spec_for(g, sys, -1);
  const auto a = train(c, g, sys, -1, spec, 1);
  const auto b = train(c, g, sys, -1, spec, 3);
  CHECK(a.params.pack() == b.params.pack());
  CHECK(a.restart_index == b.restart_index);
  CHECK(a.trace == b.trace);
  REQUIRE(a.restarts.size() == 3);
  double best = a.restarts[0].final_loss;
  for (const auto& r : a.restarts) best = std::min(best, r.final_loss);
  CHECK(a.loss == best);
  CHECK(a.restarts[static_cast<std::size_t>(a.restart_index)].final_loss == best);
}

TEST_CASE("frozen epsilon stays fixed") {
  const auto g = make_grid(8.0, 256);
  const auto sys = Potential::double_well(1.5);
  TrainConfig c = default_train_config(sys, +1);
  c.ansatz.arch = {2, 8};
  c.ansatz.epsilon_init = 0.25;
  c.freeze_epsilon = true;
  c.adam_steps = 100;
  const auto r = train(c, g, sys, +1, LossSpec{});
  CHECK(r.params.epsilon == 0.25);
}

TEST_CASE("excited target needs a reference state") {
  const auto g = make_grid(8.0, 64);
  LossSpec s;
  s.target = Target::Excited;
  CHECK_THROWS_AS(LossFunction(g, Potential::harmonic(), s), std::invalid_argument);
}
