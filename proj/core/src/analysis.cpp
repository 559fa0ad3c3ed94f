#include "bargzero/analysis.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "bargzero/errors.hpp"
#include "bargzero/fdsolve.hpp"
#include "bargzero/io.hpp"
#include "bargzero/parallel.hpp"

namespace bargzero {

ZeroClass classify_zero(Complex z, double tol) {
  ZeroClass c;
  c.tolerance = tol;
  if (std::abs(z) < tol)
    c.label = ZeroLabel::Origin;
  else if (std::abs(z.imag()) < tol)
    c.label = ZeroLabel::RealAxis;
  else if (std::abs(z.real()) < tol)
    c.label = ZeroLabel::ImagAxis;
  else
    c.label = ZeroLabel::QuartetMember;
  return c;
}

std::string to_string(ZeroLabel label) {
  switch (label) {
    case ZeroLabel::Origin: return "Origin";
    case ZeroLabel::RealAxis: return "RealAxis";
    case ZeroLabel::ImagAxis: return "ImagAxis";
    case ZeroLabel::QuartetMember: return "QuartetMember";
  }
  return "?";
}

std::vector<Complex> w_map(const ZeroSet& zeros, double pair_tol) {
  const auto& z = zeros.zeros;
  std::vector<char> used(z.size(), 0);
  std::vector<Complex> w;
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (used[i]) continue;
    used[i] = 1;
    const double scale = std::max(1.0, std::abs(z[i]));
    if (std::abs(z[i]) < pair_tol) {
      w.emplace_back(0.0, 0.0);
      continue;
    }
    std::size_t partner = z.size();
    double best = pair_tol * scale;
    for (std::size_t j = 0; j < z.size(); ++j) {
      if (used[j]) continue;
      const double d = std::abs(z[j] + z[i]);
      if (d <= best) {
        best = d;
        partner = j;
      }
    }
    if (partner == z.size())
      throw PairingFailure("zero " + format_decimal(z[i].real()) + (z[i].imag() < 0 ? "" : "+") +
                           format_decimal(z[i].imag()) + "i has no -z partner");
    used[partner] = 1;
    w.push_back(z[i] * z[i]);
  }
  return w;
}

std::optional<Drift> zero_drift(const ZeroSet& a, const ZeroSet& b, int k) {
  if (a.empty() || b.empty()) return std::nullopt;
  ZeroSet sa = a;
  sort_zeros(sa);
  const auto kk = static_cast<std::size_t>(std::max(1, std::min<int>(k, static_cast<int>(std::min(a.size(), b.size())))));
  double min_gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < kk; ++i)
    for (std::size_t j = i + 1; j < kk; ++j) min_gap = std::min(min_gap, std::abs(sa.zeros[i] - sa.zeros[j]));

  std::vector<char> used(b.size(), 0);
  Drift d;
  double sum = 0.0;
  for (std::size_t i = 0; i < kk; ++i) {
    std::size_t best = b.size();
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (used[j]) continue;
      const double dist = std::abs(sa.zeros[i] - b.zeros[j]);
      if (dist < best_d) {
        best_d = dist;
        best = j;
      }
    }
    used[best] = 1;
    sum += best_d;
    d.max = std::max(d.max, best_d);
    if (best_d > 0.5 * min_gap) d.ambiguous = true;
  }
  d.matched = static_cast<int>(kk);
  d.mean = sum / static_cast<double>(kk);
  return d;
}

std::optional<double> condensation_fraction(const ZeroSet& zeros, double tol) {
  if (zeros.empty()) return std::nullopt;
  std::size_t on_axis = 0;
  for (auto z : zeros.zeros) {
    const auto label = classify_zero(z, tol).label;
    if (label == ZeroLabel::ImagAxis || label == ZeroLabel::Origin) ++on_axis;
  }
  return static_cast<double>(on_axis) / static_cast<double>(zeros.size());
}

std::vector<double> linspace(double lo, double hi, int n) {
  if (n < 1) throw std::invalid_argument("linspace: n must be >= 1");
  std::vector<double> v(static_cast<std::size_t>(n));
  if (n == 1) {
    v[0] = lo;
    return v;
  }
  const double step = (hi - lo) / (n - 1);
  for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = lo + i * step;
  v.back() = hi;
  return v;
}

SeedStats summarize(std::vector<double> values, int failed) {
  SeedStats s;
  s.values = std::move(values);
  s.failed = failed;
  if (s.values.empty()) {
    s.mean = s.std = std::numeric_limits<double>::quiet_NaN();
    return s;
  }
  const double n = static_cast<double>(s.values.size());
  s.mean = std::accumulate(s.values.begin(), s.values.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : s.values) ss += (v - s.mean) * (v - s.mean);
  s.std = std::sqrt(ss / n);
  return s;
}

// ---------------------------------------------------------------- sweep

std::vector<SweepRecord> barrier_sweep(const std::vector<double>& a_values, const SweepConfig& config, int jobs) {
  if (a_values.empty()) throw std::invalid_argument("barrier_sweep: no barrier values");
  for (double a : a_values)
    if (!(a > 0.0)) throw std::invalid_argument("barrier_sweep: barrier values must be positive");
  const Grid grid = make_grid(config.half_width, config.n_points);
  const ZeroPipelineConfig zc{config.nmax, config.rel_floor, config.radius};
  std::vector<SweepRecord> out(a_values.size());
  parallel_for(a_values.size(), jobs, [&](std::size_t i) {
    SweepRecord& r = out[i];
    r.a = a_values[i];
    try {
      const auto pairs = solve_lowest(grid, Potential::double_well(r.a), 2);
      r.e0 = pairs[0].energy;
      r.e1 = pairs[1].energy;
      r.delta = r.e1 - r.e0;
      const auto g = bargmann_zeros(grid, pairs[0].psi, zc);
      const auto e = bargmann_zeros(grid, pairs[1].psi, zc);
      r.ground = g.filtered;
      r.excited = e.filtered;
      r.condensation_ground = condensation_fraction(r.ground, config.condensation_tol);
      r.condensation_excited = condensation_fraction(r.excited, config.condensation_tol);
    } catch (const std::exception& ex) {
      r.ok = false;
      r.status = std::string("failed: ") + ex.what();
    }
  });
  return out;
}

SplittingProfile splitting_profile(const std::vector<SweepRecord>& records) {
  std::vector<double> d;
  for (const auto& r : records)
    if (r.ok) d.push_back(r.delta);
  if (d.size() < 2) throw std::invalid_argument("splitting_profile: need at least two successful records");
  SplittingProfile p;
  const auto [lo, hi] = std::minmax_element(d.begin(), d.end());
  p.decades = std::log10(*hi / *lo);
  for (std::size_t i = 1; i < d.size(); ++i)
    if (!(d[i] < d[i - 1])) p.monotone_decreasing = false;
  return p;
}

namespace {

std::string optional_number(const std::optional<double>& v) { return v ? csv_number(*v) : "na"; }

bool has_origin_zero(const ZeroSet& zs) {
  return std::any_of(zs.zeros.begin(), zs.zeros.end(),
                     [](Complex z) { return classify_zero(z).label == ZeroLabel::Origin; });
}

nlohmann::json zeros_json(const ZeroSet& zs) {
  auto arr = nlohmann::json::array();
  for (auto z : zs.zeros) arr.push_back({z.real(), z.imag()});
  return arr;
}

std::string joined(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ';';
    s += csv_number(v[i]);
  }
  return s;
}

}  // namespace

std::string sweep_to_csv(const std::vector<SweepRecord>& records) {
  std::string out =
      "a,E0,E1,delta,n_zeros_ground,n_zeros_excited,condensation_ground,condensation_excited,origin_zero_excited,"
      "status\n";
  for (const auto& r : records) {
    out += csv_row({csv_number(r.a), csv_number(r.e0), csv_number(r.e1), csv_number(r.delta),
                    std::to_string(r.ground.size()), std::to_string(r.excited.size()),
                    optional_number(r.condensation_ground), optional_number(r.condensation_excited),
                    has_origin_zero(r.excited) ? "1" : "0", r.ok ? "ok" : "failed"});
  }
  return out;
}

std::string sweep_to_json(const std::vector<SweepRecord>& records) {
  nlohmann::json j;
  j["format"] = "bargzero.sweep/1";
  auto arr = nlohmann::json::array();
  for (const auto& r : records) {
    nlohmann::json rec{{"a", r.a},           {"E0", r.e0},
                       {"E1", r.e1},         {"delta", r.delta},
                       {"status", r.status}, {"zeros_ground", zeros_json(r.ground)},
                       {"zeros_excited", zeros_json(r.excited)}};
    rec["condensation_ground"] = r.condensation_ground ? nlohmann::json(*r.condensation_ground) : nlohmann::json();
    rec["condensation_excited"] =
        r.condensation_excited ? nlohmann::json(*r.condensation_excited) : nlohmann::json();
    rec["radius"] = r.ground.radius;
    arr.push_back(std::move(rec));
  }
  j["records"] = arr;
  return j.dump(1);
}

// ---------------------------------------------------------------- ablations

std::vector<Potential> reference_systems() {
  return {Potential::harmonic(),          Potential::anharmonic(0.1),     Potential::anharmonic(0.5),
          Potential::double_well(1.0),    Potential::double_well(1.5),    Potential::double_well(2.0)};
}

std::vector<Potential> l2_systems() {
  auto v = reference_systems();
  v.push_back(Potential::double_well(2.5));
  return v;
}

std::vector<double> reference_epsilons() {
  return {0.005, 0.01, 0.015, 0.02, 0.03, 0.05, 0.075, 0.1, 0.15, 0.2, 0.25, 0.3, 0.4, 0.5, 0.7};
}

std::vector<int> reference_truncation_orders() { return {20, 30, 40, 60, 80, 100, 120, 160, 200}; }

std::vector<GridRow> grid_ablation(const std::vector<Potential>& systems, const std::vector<std::size_t>& n_list,
                                   double half_width) {
  std::vector<GridRow> rows;
  for (auto n : n_list) {
    const Grid grid = make_grid(half_width, n);
    for (const auto& p : systems) {
      const auto t0 = std::chrono::steady_clock::now();
      const auto pairs = solve_lowest(grid, p, 2);
      const auto t1 = std::chrono::steady_clock::now();
      rows.push_back({n, to_string(p), pairs[0].energy, pairs[1].energy, pairs[1].energy - pairs[0].energy,
                      std::chrono::duration<double>(t1 - t0).count()});
    }
  }
  return rows;
}

std::size_t capacity_parameter_count(int depth, int width) {
  AnsatzConfig cfg;
  cfg.arch = {depth, width};
  return init_params(0, cfg, Potential::double_well(1.5), +1).parameter_count();
}

namespace {

std::vector<double> trained_state(const AnsatzParams& params, const Grid& grid, const Potential& system) {
  const LossFunction fn(grid, system, LossSpec{});
  auto psi = normalize(fn.wavefunction(params), grid.spacing);
  fix_sign(psi);
  return psi;
}

}  // namespace

std::vector<TrainedState> train_ground_states(const AblationSetup& setup, const Potential& system,
                                              const TrainConfig& train_cfg) {
  std::vector<TrainedState> out(setup.seeds.size());
  parallel_for(setup.seeds.size(), setup.jobs, [&](std::size_t i) {
    TrainedState& s = out[i];
    s.seed = setup.seeds[i];
    TrainConfig cfg = train_cfg;
    cfg.seed = s.seed;
    try {
      const auto r = train(cfg, setup.grid, system, +1, LossSpec{}, 1);
      s.energy = r.energy;
      s.psi = trained_state(r.params, setup.grid, system);
    } catch (const NumericalError& ex) {
      s.failed = true;
      s.message = ex.what();
    }
  });
  return out;
}

CapacityRow capacity_row(int depth, int width, double reference_energy, const std::vector<TrainedState>& states) {
  CapacityRow row;
  row.depth = depth;
  row.width = width;
  row.parameters = capacity_parameter_count(depth, width);
  std::vector<double> err;
  int failed = 0;
  for (const auto& s : states) {
    if (s.failed)
      ++failed;
    else
      err.push_back(std::abs(s.energy - reference_energy));
  }
  row.error = summarize(std::move(err), failed);
  return row;
}

std::vector<CapacityRow> capacity_ablation(const std::vector<int>& depths, const std::vector<int>& widths,
                                           const AblationSetup& setup) {
  const Potential dw = Potential::double_well(1.5);
  const double e_ref = solve_lowest(setup.grid, dw, 1)[0].energy;
  std::vector<CapacityRow> rows;
  for (int d : depths) {
    for (int w : widths) {
      TrainConfig cfg = setup.train;
      cfg.ansatz.arch = {d, w};
      rows.push_back(capacity_row(d, w, e_ref, train_ground_states(setup, dw, cfg)));
    }
  }
  return rows;
}

std::vector<EpsilonRow> epsilon_ablation(const std::vector<double>& eps_values, const AblationSetup& setup,
                                         const EpsilonConfig& config,
                                         const std::vector<std::vector<std::uint64_t>>& seeds_for) {
  for (double e : eps_values)
    if (!(e > 0.0)) throw std::invalid_argument("epsilon_ablation: epsilon values must be positive");
  if (!seeds_for.empty() && seeds_for.size() != eps_values.size())
    throw std::invalid_argument("epsilon_ablation: one seed list per epsilon expected");
  const Potential dw = Potential::double_well(1.5);
  const double e_ref = solve_lowest(setup.grid, dw, 1)[0].energy;
  const ZeroPipelineConfig zc{config.nmax, config.rel_floor, std::numeric_limits<double>::infinity()};

  // epsilon = 0 baseline: the symbolic envelope and prefactor alone. The
  // correction net does not enter, so a minimal one is used.
  TrainConfig base = setup.train;
  base.ansatz.arch = {1, 1};
  base.ansatz.epsilon_init = 0.0;
  base.freeze_epsilon = true;
  base.seed = 0;
  base.restarts = 1;
  const auto baseline = train(base, setup.grid, dw, +1, LossSpec{}, 1);
  const auto baseline_zeros = bargmann_zeros(setup.grid, trained_state(baseline.params, setup.grid, dw), zc).all;

  std::vector<EpsilonRow> rows;
  for (std::size_t k = 0; k < eps_values.size(); ++k) {
    AblationSetup s = setup;
    if (!seeds_for.empty()) s.seeds = seeds_for[k];
    TrainConfig cfg = setup.train;
    cfg.ansatz.epsilon_init = eps_values[k];
    cfg.freeze_epsilon = true;
    const auto states = train_ground_states(s, dw, cfg);
    EpsilonRow row;
    row.epsilon = eps_values[k];
    std::vector<double> err, z0, drift;
    int failed = 0;
    for (const auto& st : states) {
      if (st.failed) {
        ++failed;
        continue;
      }
      err.push_back(std::abs(st.energy - e_ref));
      const auto zs = bargmann_zeros(setup.grid, st.psi, zc).all;
      z0.push_back(zs.empty() ? std::numeric_limits<double>::quiet_NaN() : std::abs(zs.zeros.front()));
      const auto d = zero_drift(zs, baseline_zeros, config.drift_zeros);
      drift.push_back(d ? d->mean : std::numeric_limits<double>::quiet_NaN());
      row.states.push_back(st.psi);
    }
    row.error = summarize(std::move(err), failed);
    row.leading_zero = summarize(std::move(z0), failed);
    row.drift = summarize(std::move(drift), failed);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<TruncationRow> truncation_ablation(const Grid& grid, const std::vector<std::vector<double>>& states,
                                               const std::vector<int>& nmax_list, int reference_nmax) {
  for (int n : nmax_list)
    if (n > reference_nmax) throw std::invalid_argument("truncation_ablation: N_max above the reference order");
  if (states.empty()) throw std::invalid_argument("truncation_ablation: no wavefunctions");
  std::vector<ZeroSet> refs;
  for (const auto& psi : states) refs.push_back(bargmann_zeros(grid, psi, {reference_nmax, 1e-4, 6.0}).filtered);

  std::vector<TruncationRow> rows;
  for (int n : nmax_list) {
    TruncationRow row;
    row.nmax = n;
    double sum = 0.0;
    for (std::size_t i = 0; i < states.size(); ++i) {
      const auto zs = bargmann_zeros(grid, states[i], {n, 1e-4, 6.0}).filtered;
      const auto d = zero_drift(zs, refs[i], 8);
      if (!d) {
        if (zs.empty() && refs[i].empty()) {
          ++row.states;
          continue;
        }
        row.mean = row.max = std::numeric_limits<double>::infinity();
        row.ambiguous = true;
        continue;
      }
      sum += d->mean;
      row.max = std::max(row.max, d->max);
      row.ambiguous = row.ambiguous || d->ambiguous || zs.size() != refs[i].size();
      ++row.states;
    }
    if (std::isfinite(row.mean)) row.mean = sum / static_cast<double>(states.size());
    rows.push_back(row);
  }
  return rows;
}

WavefunctionError wavefunction_error(const std::vector<double>& trained, const std::vector<double>& reference,
                                     double dx) {
  if (trained.size() != reference.size()) throw std::invalid_argument("wavefunction_error: size mismatch");
  auto a = normalize(trained, dx);
  const auto b = normalize(reference, dx);
  if (inner_product(a, b, dx) < 0.0)
    for (double& v : a) v = -v;
  WavefunctionError e;
  double ss = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    ss += d * d;
    e.linf = std::max(e.linf, std::abs(d));
  }
  e.l2 = std::sqrt(dx * ss);
  return e;
}

L2Row l2_row(const Potential& system, const Grid& grid, const std::vector<TrainedState>& states) {
  const auto fd = solve_lowest(grid, system, 1)[0];
  L2Row row;
  row.system = to_string(system);
  std::vector<double> de, l2, linf;
  int failed = 0;
  for (const auto& s : states) {
    if (s.failed) {
      ++failed;
      continue;
    }
    const auto e = wavefunction_error(s.psi, fd.psi, grid.spacing);
    de.push_back(std::abs(s.energy - fd.energy));
    l2.push_back(e.l2);
    linf.push_back(e.linf);
  }
  row.l2_max = l2.empty() ? std::numeric_limits<double>::quiet_NaN() : *std::max_element(l2.begin(), l2.end());
  row.energy_error = summarize(std::move(de), failed);
  row.l2 = summarize(std::move(l2), failed);
  row.linf = summarize(std::move(linf), failed);
  return row;
}

std::vector<L2Row> l2_validation(const std::vector<Potential>& systems, const AblationSetup& setup) {
  std::vector<L2Row> rows;
  for (const auto& p : systems) {
    const TrainConfig cfg = [&] {
      TrainConfig c = default_train_config(p, +1);
      c.ansatz = setup.train.ansatz;
      c.adam_steps = setup.train.adam_steps;
      c.polish_enabled = setup.train.polish_enabled;
      return c;
    }();
    rows.push_back(l2_row(p, setup.grid, train_ground_states(setup, p, cfg)));
  }
  return rows;
}

std::string grid_to_csv(const std::vector<GridRow>& rows) {
  std::string out = "N,system,E0,E1,delta,seconds\n";
  for (const auto& r : rows)
    out += csv_row({std::to_string(r.n_points), r.system, csv_number(r.e0), csv_number(r.e1), csv_number(r.delta),
                    csv_number(r.seconds)});
  return out;
}

std::string capacity_to_csv(const std::vector<CapacityRow>& rows) {
  std::string out = "depth,width,params,mean_abs_dE,std_abs_dE,seed_count,failed,abs_dE_per_seed\n";
  for (const auto& r : rows)
    out += csv_row({std::to_string(r.depth), std::to_string(r.width), std::to_string(r.parameters),
                    csv_number(r.error.mean), csv_number(r.error.std), std::to_string(r.error.count()),
                    std::to_string(r.error.failed), joined(r.error.values)});
  return out;
}

std::string epsilon_to_csv(const std::vector<EpsilonRow>& rows) {
  std::string out =
      "epsilon,mean_abs_dE,std_abs_dE,z0_mean,z0_std,drift_std,drift_mean,seed_count,failed,abs_dE_per_seed,"
      "z0_per_seed,drift_per_seed\n";
  for (const auto& r : rows)
    out += csv_row({csv_number(r.epsilon), csv_number(r.error.mean), csv_number(r.error.std),
                    csv_number(r.leading_zero.mean), csv_number(r.leading_zero.std), csv_number(r.drift.std),
                    csv_number(r.drift.mean), std::to_string(r.error.count()), std::to_string(r.error.failed),
                    joined(r.error.values), joined(r.leading_zero.values), joined(r.drift.values)});
  return out;
}

std::string truncation_to_csv(const std::vector<TruncationRow>& rows) {
  std::string out = "nmax,mean_drift,max_drift,states,ambiguous\n";
  for (const auto& r : rows)
    out += csv_row({std::to_string(r.nmax), csv_number(r.mean), csv_number(r.max), std::to_string(r.states),
                    r.ambiguous ? "1" : "0"});
  return out;
}

std::string l2_to_csv(const std::vector<L2Row>& rows) {
  std::string out =
      "system,mean_abs_dE,mean_l2,max_l2,mean_linf,std_abs_dE,std_l2,std_linf,seed_count,failed,l2_per_seed\n";
  for (const auto& r : rows)
    out += csv_row({r.system, csv_number(r.energy_error.mean), csv_number(r.l2.mean), csv_number(r.l2_max),
                    csv_number(r.linf.mean), csv_number(r.energy_error.std), csv_number(r.l2.std),
                    csv_number(r.linf.std), std::to_string(r.l2.count()), std::to_string(r.l2.failed),
                    joined(r.l2.values)});
  return out;
}

}  // namespace bargzero
