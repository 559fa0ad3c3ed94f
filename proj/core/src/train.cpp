#include "bargzero/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "bargzero/errors.hpp"
#include "bargzero/parallel.hpp"

namespace bargzero {

double rayleigh_quotient(std::span<const double> psi, const TridiagonalHamiltonian& h) {
  double norm = 0.0;
  for (double v : psi) norm += v * v;
  if (!(norm > 0.0)) throw std::invalid_argument("rayleigh_quotient: zero-norm wavefunction");
  const auto hpsi = h.apply(psi);
  double num = 0.0;
  for (std::size_t i = 0; i < psi.size(); ++i) num += psi[i] * hpsi[i];
  return num / norm;
}

// ------------------------------------------------------------------ loss

struct LossFunction::Forward {
  std::vector<double> env, pre, u, sym, psi;
  Eigen::RowVectorXd m;
  NetTape tape;
  bool has_net = false;
};

LossFunction::LossFunction(Grid grid, Potential system, LossSpec spec)
    : grid_(std::move(grid)), system_(system), h_(build_hamiltonian(grid_, system_)), spec_(std::move(spec)) {
  if (spec_.target == Target::Excited && spec_.reference_ground.size() != grid_.n_points)
    throw std::invalid_argument("excited-state loss needs a reference ground state on the same grid");
}

LossFunction::Forward LossFunction::forward(const AnsatzParams& params, bool keep_tape) const {
  if (params.system != system_.kind())
    throw std::invalid_argument("ansatz parameters were built for a different potential family");
  const std::size_t n = grid_.n_points;
  const auto& x = grid_.points;
  Forward f;
  f.env = eval_envelope(params, system_, x);
  f.u.resize(n);
  f.pre.resize(n);
  const double shift =
      params.envelope() == EnvelopeKind::DoubleWellMixture ? std::exp(2.0 * params.log_barrier) : 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double u = x[i] * x[i] - shift;
    double acc = 0.0;
    for (std::size_t k = params.prefactor.size(); k-- > 0;) acc = (acc + params.prefactor[k]) * u;
    f.u[i] = u;
    f.pre[i] = 1.0 + acc;
  }

  f.sym.assign(n, 0.0);
  f.has_net = keep_tape || params.epsilon != 0.0;
  if (f.has_net) {
    Eigen::RowVectorXd xs = Eigen::Map<const Eigen::RowVectorXd>(x.data(), static_cast<Eigen::Index>(n));
    f.m = params.net.forward(xs, keep_tape ? &f.tape : nullptr);
    const double q = params.bracket_parity();
    for (std::size_t i = 0; i < n; ++i)
      f.sym[i] = 0.5 * (f.m[static_cast<Eigen::Index>(i)] + q * f.m[static_cast<Eigen::Index>(grid_.mirror(i))]);
  }
  f.psi.resize(n);
  for (std::size_t i = 0; i < n; ++i) f.psi[i] = f.env[i] * f.pre[i] * (1.0 + params.epsilon * f.sym[i]);
  return f;
}

std::vector<double> LossFunction::wavefunction(const AnsatzParams& params) const {
  return forward(params, false).psi;
}

namespace {

struct QuotientParts {
  LossValue value;
  std::vector<double> dpsi;  // dLoss/dpsi
};

QuotientParts quotient_and_penalty(const std::vector<double>& psi, const TridiagonalHamiltonian& h,
                                   const LossSpec& spec, double dx, bool want_grad) {
  const std::size_t n = psi.size();
  double norm = 0.0;
  for (double v : psi) norm += v * v;
  if (!(norm > 0.0) || !std::isfinite(norm))
    return {{std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN(), 0.0}, {}};
  std::vector<double> hpsi(n);
  h.apply(psi, hpsi);
  double num = 0.0;
  for (std::size_t i = 0; i < n; ++i) num += psi[i] * hpsi[i];
  QuotientParts out;
  const double energy = num / norm;
  out.value.energy = energy;
  out.value.loss = energy;
  if (want_grad) {
    out.dpsi.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.dpsi[i] = 2.0 * (hpsi[i] - energy * psi[i]) / norm;
  }
  if (spec.target == Target::Excited && spec.alpha != 0.0) {
    const auto& ref = spec.reference_ground;
    double s0 = 0.0;
    for (std::size_t i = 0; i < n; ++i) s0 += psi[i] * ref[i];
    const double sqrt_dx = std::sqrt(dx);
    const double rn = std::sqrt(norm);
    const double overlap = sqrt_dx * s0 / rn;
    out.value.overlap = overlap;
    out.value.loss += spec.alpha * overlap * overlap;
    if (want_grad) {
      const double c = 2.0 * spec.alpha * overlap * sqrt_dx;
      const double inv_rn = 1.0 / rn;
      const double k = s0 / (norm * rn);
      for (std::size_t i = 0; i < n; ++i) out.dpsi[i] += c * (ref[i] * inv_rn - k * psi[i]);
    }
  }
  return out;
}

}  // namespace

LossValue LossFunction::evaluate(const AnsatzParams& params) const {
  const auto f = forward(params, false);
  return quotient_and_penalty(f.psi, h_, spec_, grid_.spacing, false).value;
}

LossValue LossFunction::evaluate(const AnsatzParams& params, AnsatzParams& grad) const {
  const std::size_t n = grid_.n_points;
  const auto& x = grid_.points;
  const auto f = forward(params, true);
  auto parts = quotient_and_penalty(f.psi, h_, spec_, grid_.spacing, true);
  grad = params.zeros_like();
  if (!std::isfinite(parts.value.loss)) return parts.value;
  const auto& g = parts.dpsi;
  const double eps = params.epsilon;

  // epsilon and the net
  Eigen::RowVectorXd h(static_cast<Eigen::Index>(n));
  double d_eps = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double ep = g[i] * f.env[i] * f.pre[i];
    h[static_cast<Eigen::Index>(i)] = ep;
    d_eps += ep * f.sym[i];
  }
  grad.epsilon = d_eps;
  {
    const double q = params.bracket_parity();
    Eigen::RowVectorXd dm(static_cast<Eigen::Index>(n));
    for (std::size_t j = 0; j < n; ++j)
      dm[static_cast<Eigen::Index>(j)] =
          0.5 * eps * (h[static_cast<Eigen::Index>(j)] + q * h[static_cast<Eigen::Index>(grid_.mirror(j))]);
    params.net.backward(f.tape, dm, grad.net);
  }

  // prefactor
  const std::size_t kterms = params.prefactor.size();
  double d_u_total = 0.0;  // sum_i dL/du_i, used for the barrier
  for (std::size_t i = 0; i < n; ++i) {
    const double bracket = 1.0 + eps * f.sym[i];
    const double w = g[i] * f.env[i] * bracket;
    double upow = 1.0;
    double dpdu = 0.0;
    for (std::size_t k = 0; k < kterms; ++k) {
      dpdu += static_cast<double>(k + 1) * params.prefactor[k] * upow;
      upow *= f.u[i];
      grad.prefactor[k] += w * upow;
    }
    d_u_total += w * dpdu;
  }

  // envelope
  if (params.envelope() == EnvelopeKind::Gaussian) {
    const double sigma = std::exp(params.log_widths[0]);
    const double inv_s2 = 1.0 / (sigma * sigma);
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = g[i] * f.pre[i] * (1.0 + eps * f.sym[i]);
      acc += r * f.env[i] * x[i] * x[i] * inv_s2;
    }
    grad.log_widths[0] = acc;
  } else {
    const double a = std::exp(params.log_barrier);
    const double p = params.parity;
    const std::size_t kc = params.log_widths.size();
    std::vector<double> inv_s2(kc);
    for (std::size_t k = 0; k < kc; ++k) inv_s2[k] = std::exp(-2.0 * params.log_widths[k]);
    double d_a = -2.0 * a * d_u_total;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = g[i] * f.pre[i] * (1.0 + eps * f.sym[i]);
      const double dm = x[i] - a, dp = x[i] + a;
      for (std::size_t k = 0; k < kc; ++k) {
        const double gm = std::exp(-0.5 * dm * dm * inv_s2[k]);
        const double gp = std::exp(-0.5 * dp * dp * inv_s2[k]);
        const double wk = params.mix_weights[k];
        grad.mix_weights[k] += r * (gm + p * gp);
        grad.log_widths[k] += r * wk * (gm * dm * dm + p * gp * dp * dp) * inv_s2[k];
        d_a += r * wk * (gm * dm - p * gp * dp) * inv_s2[k];
      }
    }
    grad.log_barrier = a * d_a;
  }
  return parts.value;
}

double loss(const AnsatzParams& params, const LossFunction& fn) { return fn.evaluate(params).loss; }

AnsatzParams gradient(const AnsatzParams& params, const LossFunction& fn) {
  AnsatzParams grad;
  fn.evaluate(params, grad);
  return grad;
}

// ---------------------------------------------------------------- L-BFGS

namespace {

double cubic_interpolate(double x1, double f1, double g1, double x2, double f2, double g2, double lo,
                         double hi) {
  const double d1 = g1 + g2 - 3.0 * (f1 - f2) / (x1 - x2);
  const double d2_square = d1 * d1 - g1 * g2;
  if (d2_square >= 0.0) {
    const double d2 = std::sqrt(d2_square);
    double min_pos;
    if (x1 <= x2)
      min_pos = x2 - (x2 - x1) * ((g2 + d2 - d1) / (g2 - g1 + 2.0 * d2));
    else
      min_pos = x1 - (x1 - x2) * ((g1 + d2 - d1) / (g1 - g2 + 2.0 * d2));
    if (!std::isfinite(min_pos)) return 0.5 * (lo + hi);
    return std::min(std::max(min_pos, lo), hi);
  }
  return 0.5 * (lo + hi);
}

double cubic_interpolate(double x1, double f1, double g1, double x2, double f2, double g2) {
  return cubic_interpolate(x1, f1, g1, x2, f2, g2, std::min(x1, x2), std::max(x1, x2));
}

struct LineSearchResult {
  double f = 0.0;
  Eigen::VectorXd g;
  double t = 0.0;
  int evals = 0;
};

struct Probe {
  const Objective& f;
  const Eigen::VectorXd& x;
  const Eigen::VectorXd& d;
  double best_f;
  Eigen::VectorXd best_x;
  int evals = 0;

  double operator()(double t, Eigen::VectorXd& g) {
    Eigen::VectorXd xt = x + t * d;
    const double v = f(xt, g);
    ++evals;
    if (std::isfinite(v) && v < best_f) {
      best_f = v;
      best_x = std::move(xt);
    }
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  }
};

// Bracketing + zoom with cubic interpolation (strong Wolfe conditions).
LineSearchResult strong_wolfe(Probe& probe, double t, double f, const Eigen::VectorXd& g, double gtd,
                              const PolishConfig& cfg) {
  constexpr double tolerance_change = 1e-9;
  const double d_norm = probe.d.cwiseAbs().maxCoeff();
  Eigen::VectorXd g_new;
  double f_new = probe(t, g_new);
  double gtd_new = g_new.dot(probe.d);

  double t_prev = 0.0, f_prev = f, gtd_prev = gtd;
  Eigen::VectorXd g_prev = g;
  bool done = false;
  int ls_iter = 0;

  std::vector<double> bt, bf, bgtd;
  std::vector<Eigen::VectorXd> bg;
  while (ls_iter < cfg.max_line_search) {
    if (f_new > f + cfg.c1 * t * gtd || (ls_iter > 1 && f_new >= f_prev)) {
      bt = {t_prev, t};
      bf = {f_prev, f_new};
      bg = {g_prev, g_new};
      bgtd = {gtd_prev, gtd_new};
      break;
    }
    if (std::abs(gtd_new) <= -cfg.c2 * gtd) {
      bt = {t};
      bf = {f_new};
      bg = {g_new};
      bgtd = {gtd_new};
      done = true;
      break;
    }
    if (gtd_new >= 0.0) {
      bt = {t_prev, t};
      bf = {f_prev, f_new};
      bg = {g_prev, g_new};
      bgtd = {gtd_prev, gtd_new};
      break;
    }
    const double min_step = t + 0.01 * (t - t_prev);
    const double max_step = t * 10.0;
    const double tmp = t;
    t = cubic_interpolate(t_prev, f_prev, gtd_prev, t, f_new, gtd_new, min_step, max_step);
    t_prev = tmp;
    f_prev = f_new;
    g_prev = g_new;
    gtd_prev = gtd_new;
    f_new = probe(t, g_new);
    gtd_new = g_new.dot(probe.d);
    ++ls_iter;
  }
  if (ls_iter == cfg.max_line_search) {
    bt = {0.0, t};
    bf = {f, f_new};
    bg = {g, g_new};
    bgtd = {gtd, gtd_new};
  }

  bool insufficient_progress = false;
  std::size_t low = 0, high = 1;
  if (bt.size() == 2 && bf[0] > bf[1]) std::swap(low, high);
  while (!done && ls_iter < cfg.max_line_search && bt.size() == 2) {
    if (std::abs(bt[1] - bt[0]) * d_norm < tolerance_change) break;
    t = cubic_interpolate(bt[0], bf[0], bgtd[0], bt[1], bf[1], bgtd[1]);
    const double bmax = std::max(bt[0], bt[1]);
    const double bmin = std::min(bt[0], bt[1]);
    const double eps = 0.1 * (bmax - bmin);
    if (std::min(bmax - t, t - bmin) < eps) {
      if (insufficient_progress || t >= bmax || t <= bmin) {
        t = std::abs(t - bmax) < std::abs(t - bmin) ? bmax - eps : bmin + eps;
        insufficient_progress = false;
      } else {
        insufficient_progress = true;
      }
    } else {
      insufficient_progress = false;
    }
    f_new = probe(t, g_new);
    gtd_new = g_new.dot(probe.d);
    ++ls_iter;

    if (f_new > f + cfg.c1 * t * gtd || f_new >= bf[low]) {
      bt[high] = t;
      bf[high] = f_new;
      bg[high] = g_new;
      bgtd[high] = gtd_new;
      if (bf[0] <= bf[1]) {
        low = 0;
        high = 1;
      } else {
        low = 1;
        high = 0;
      }
    } else {
      if (std::abs(gtd_new) <= -cfg.c2 * gtd) {
        done = true;
      } else if (gtd_new * (bt[high] - bt[low]) >= 0.0) {
        bt[high] = bt[low];
        bf[high] = bf[low];
        bg[high] = bg[low];
        bgtd[high] = bgtd[low];
      }
      bt[low] = t;
      bf[low] = f_new;
      bg[low] = g_new;
      bgtd[low] = gtd_new;
    }
  }
  if (bt.size() == 1) low = 0;
  return {bf[low], bg[low], bt[low], probe.evals};
}

}  // namespace

PolishResult quasi_newton_polish(const Eigen::VectorXd& x0, const Objective& f, const PolishConfig& cfg) {
  PolishResult result;
  Eigen::VectorXd x = x0;
  Eigen::VectorXd g;
  double loss = f(x, g);
  result.evaluations = 1;
  result.start_value = loss;
  result.value = loss;
  result.x = x;
  if (!std::isfinite(loss)) {
    result.stop_reason = "non-finite start";
    return result;
  }

  std::vector<Eigen::VectorXd> dirs, steps;  // y and s pairs
  std::vector<double> rho;
  Eigen::VectorXd d, prev_g;
  double t = 1.0, h_diag = 1.0;
  int total_iter = 0;
  const int max_eval_per_outer = cfg.inner_iterations * 5 / 4;

  auto finish = [&](std::string why) {
    result.stop_reason = std::move(why);
    return result;
  };

  for (int outer = 0; outer < cfg.outer_iterations; ++outer) {
    if (g.cwiseAbs().maxCoeff() <= cfg.gradient_tolerance) return finish("gradient tolerance");
    int evals = 0;
    for (int inner = 0; inner < cfg.inner_iterations; ++inner) {
      ++total_iter;
      if (total_iter == 1) {
        d = -g;
        h_diag = 1.0;
      } else {
        const Eigen::VectorXd y = g - prev_g;
        const Eigen::VectorXd s = d * t;
        const double ys = y.dot(s);
        if (ys > 1e-10) {
          if (static_cast<int>(dirs.size()) == cfg.history) {
            dirs.erase(dirs.begin());
            steps.erase(steps.begin());
            rho.erase(rho.begin());
          }
          dirs.push_back(y);
          steps.push_back(s);
          rho.push_back(1.0 / ys);
          h_diag = ys / y.dot(y);
        }
        const std::size_t m = dirs.size();
        std::vector<double> al(m);
        Eigen::VectorXd q = -g;
        for (std::size_t i = m; i-- > 0;) {
          al[i] = steps[i].dot(q) * rho[i];
          q -= al[i] * dirs[i];
        }
        d = q * h_diag;
        for (std::size_t i = 0; i < m; ++i) {
          const double be = dirs[i].dot(d) * rho[i];
          d += steps[i] * (al[i] - be);
        }
      }
      prev_g = g;
      const double prev_loss = loss;
      t = total_iter == 1 ? std::min(1.0, 1.0 / g.cwiseAbs().sum()) : 1.0;
      const double gtd = g.dot(d);
      if (gtd > -cfg.step_tolerance) return finish("no descent direction");

      Probe probe{f, x, d, loss, x};
      auto ls = strong_wolfe(probe, t, loss, g, gtd, cfg);
      evals += ls.evals;
      result.evaluations += ls.evals;
      if (!(ls.f <= loss)) {
        // Line search failed to decrease: keep the best point seen.
        if (probe.best_f < result.value) {
          result.value = probe.best_f;
          result.x = probe.best_x;
        }
        return finish("line search failed");
      }
      t = ls.t;
      x += t * d;
      loss = ls.f;
      g = std::move(ls.g);
      ++result.iterations;
      result.trace.push_back(loss);
      if (loss < result.value) {
        result.value = loss;
        result.x = x;
      }
      if (g.cwiseAbs().maxCoeff() <= cfg.gradient_tolerance) return finish("gradient tolerance");
      if ((d * t).cwiseAbs().maxCoeff() <= cfg.step_tolerance) return finish("step tolerance");
      if (std::abs(loss - prev_loss) < cfg.step_tolerance) return finish("loss change tolerance");
      if (evals >= max_eval_per_outer) break;
    }
  }
  return finish("iteration cap");
}

// -------------------------------------------------------------- training

void TrainConfig::validate() const {
  if (learning_rates.size() != phase_boundaries.size() + 1)
    throw std::invalid_argument("train config: need one more learning rate than phase boundaries");
  for (std::size_t i = 1; i < learning_rates.size(); ++i)
    if (!(learning_rates[i] < learning_rates[i - 1]))
      throw std::invalid_argument("train config: learning rates must strictly decrease across phases");
  for (std::size_t i = 0; i < phase_boundaries.size(); ++i) {
    const double b = phase_boundaries[i];
    if (!(b > 0.0 && b < 1.0)) throw std::invalid_argument("train config: phase boundaries must lie in (0, 1)");
    if (i > 0 && !(b > phase_boundaries[i - 1]))
      throw std::invalid_argument("train config: phase boundaries must strictly increase");
  }
  if (adam_steps < 0) throw std::invalid_argument("train config: negative step count");
  if (restarts < 1) throw std::invalid_argument("train config: need at least one restart");
  if (!(learning_rates.front() > 0.0)) throw std::invalid_argument("train config: learning rate must be positive");
}

double TrainConfig::learning_rate(int step) const {
  const double frac = adam_steps > 0 ? static_cast<double>(step) / adam_steps : 0.0;
  std::size_t phase = 0;
  while (phase < phase_boundaries.size() && frac >= phase_boundaries[phase]) ++phase;
  return learning_rates[phase];
}

TrainConfig default_train_config(const Potential& system, int parity) {
  TrainConfig cfg;
  if (system.kind() == PotentialKind::DoubleWell && parity < 0) cfg.restarts = 4;
  return cfg;
}

std::uint64_t restart_seed(std::uint64_t base, int restart) {
  if (restart == 0) return base;
  // splitmix64 step keyed by the restart index
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(restart);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

namespace {

struct RunOutcome {
  RestartReport report;
  AnsatzParams params;
  std::vector<double> trace;
  int polish_start = 0;
};

RunOutcome run_single(const TrainConfig& cfg, const LossFunction& fn, int parity, int restart) {
  RunOutcome out;
  out.report.index = restart;
  out.report.seed = restart_seed(cfg.seed, restart);
  AnsatzParams params = init_params(out.report.seed, cfg.ansatz, fn.system(), parity);

  const auto dim = static_cast<Eigen::Index>(params.flat_size());
  Eigen::VectorXd theta = params.pack();
  Eigen::VectorXd m = Eigen::VectorXd::Zero(dim), v = Eigen::VectorXd::Zero(dim);
  AnsatzParams grad;
  double best_loss = std::numeric_limits<double>::infinity();
  Eigen::VectorXd best_theta = theta;
  out.trace.reserve(static_cast<std::size_t>(cfg.adam_steps) + 64);

  auto fail = [&](const std::string& why) {
    out.report.failed = true;
    out.report.message = why;
    return out;
  };

  double b1t = 1.0, b2t = 1.0;
  for (int step = 0; step <= cfg.adam_steps; ++step) {
    params.unpack(theta);
    const auto val = fn.evaluate(params, grad);
    if (!std::isfinite(val.loss)) {
      std::ostringstream msg;
      msg << "non-finite loss at Adam step " << step;
      return fail(msg.str());
    }
    out.trace.push_back(val.energy);
    if (val.loss < best_loss) {
      best_loss = val.loss;
      best_theta = theta;
    }
    if (step == cfg.adam_steps) break;
    Eigen::VectorXd gv = grad.pack();
    if (cfg.freeze_epsilon) gv[AnsatzParams::kEpsilonIndex] = 0.0;
    if (!gv.allFinite()) {
      std::ostringstream msg;
      msg << "non-finite gradient at Adam step " << step;
      return fail(msg.str());
    }
    const double lr = cfg.learning_rate(step);
    b1t *= cfg.beta1;
    b2t *= cfg.beta2;
    m = cfg.beta1 * m + (1.0 - cfg.beta1) * gv;
    v = cfg.beta2 * v + (1.0 - cfg.beta2) * gv.cwiseAbs2();
    const double step_size = lr / (1.0 - b1t);
    const double denom_scale = 1.0 / std::sqrt(1.0 - b2t);
    theta.array() -= step_size * m.array() / (v.array().sqrt() * denom_scale + cfg.adam_eps);
  }
  out.report.adam_best_loss = best_loss;
  out.polish_start = static_cast<int>(out.trace.size());

  theta = best_theta;
  if (cfg.polish_enabled) {
    AnsatzParams work = params;
    Objective objective = [&](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
      work.unpack(x);
      AnsatzParams gr;
      const auto val = fn.evaluate(work, gr);
      g = gr.pack();
      if (cfg.freeze_epsilon) g[AnsatzParams::kEpsilonIndex] = 0.0;
      return val.loss;
    };
    const auto polish = quasi_newton_polish(theta, objective, cfg.polish);
    out.report.polish_iterations = polish.iterations;
    if (polish.value <= best_loss) {
      theta = polish.x;
      best_loss = polish.value;
    }
    // The polish tracks the loss; for the excited target it differs from
    // the energy only by the (parity-suppressed) overlap penalty.
    out.trace.insert(out.trace.end(), polish.trace.begin(), polish.trace.end());
  }
  params.unpack(theta);
  const auto final_val = fn.evaluate(params);
  if (!std::isfinite(final_val.loss)) return fail("non-finite loss after polish");
  out.report.final_loss = final_val.loss;
  out.report.final_energy = final_val.energy;
  out.params = std::move(params);
  return out;
}

}  // namespace

TrainResult train(const TrainConfig& config, const Grid& grid, const Potential& system, int parity,
                  const LossSpec& spec, int jobs) {
  config.validate();
  if (parity != 1 && parity != -1) throw std::invalid_argument("parity must be +1 or -1");
  LossSpec effective = spec;
  effective.alpha = config.alpha;
  const LossFunction fn(grid, system, effective);

  const auto start = std::chrono::steady_clock::now();
  std::vector<RunOutcome> outcomes(static_cast<std::size_t>(config.restarts));
  parallel_for(outcomes.size(), jobs, [&](std::size_t r) {
    outcomes[r] = run_single(config, fn, parity, static_cast<int>(r));
  });

  TrainResult result;
  int best = -1;
  for (std::size_t r = 0; r < outcomes.size(); ++r) {
    result.restarts.push_back(outcomes[r].report);
    if (outcomes[r].report.failed) continue;
    if (best < 0 || outcomes[r].report.final_loss < outcomes[static_cast<std::size_t>(best)].report.final_loss)
      best = static_cast<int>(r);
  }
  if (best < 0) {
    std::ostringstream msg;
    msg << "training failed in all " << config.restarts << " restart(s):";
    for (const auto& rep : result.restarts) msg << " [" << rep.index << "] " << rep.message << ';';
    throw TrainingFailure(msg.str());
  }
  auto& chosen = outcomes[static_cast<std::size_t>(best)];
  result.params = std::move(chosen.params);
  result.energy = chosen.report.final_energy;
  result.loss = chosen.report.final_loss;
  result.trace = std::move(chosen.trace);
  result.polish_start = chosen.polish_start;
  result.restart_index = best;
  result.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

std::string train_result_to_json(const TrainResult& result, const std::string& params_file, int trace_stride) {
  using nlohmann::json;
  json j;
  j["format"] = "bargzero.train/1";
  j["energy"] = result.energy;
  j["loss"] = result.loss;
  j["restart_index"] = result.restart_index;
  j["params_file"] = params_file;
  j["parameter_count"] = result.params.parameter_count();
  json reps = json::array();
  for (const auto& r : result.restarts) {
    reps.push_back({{"index", r.index},
                    {"seed", r.seed},
                    {"failed", r.failed},
                    {"message", r.message},
                    {"adam_best_loss", r.adam_best_loss},
                    {"final_loss", r.final_loss},
                    {"final_energy", r.final_energy},
                    {"polish_iterations", r.polish_iterations}});
  }
  j["restarts"] = reps;
  json trace = json::array();
  const int stride = std::max(1, trace_stride);
  for (std::size_t i = 0; i < result.trace.size(); i += static_cast<std::size_t>(stride))
    trace.push_back({{"step", i}, {"energy", result.trace[i]}});
  if (!result.trace.empty() && (result.trace.size() - 1) % static_cast<std::size_t>(stride) != 0)
    trace.push_back({{"step", result.trace.size() - 1}, {"energy", result.trace.back()}});
  j["trace_stride"] = stride;
  j["polish_start"] = result.polish_start;
  j["trace"] = trace;
  return j.dump(1);
}

}  // namespace bargzero
