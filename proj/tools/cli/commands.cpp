#include "commands.hpp"

#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>

#include "bargzero/analysis.hpp"
#include "bargzero/bargmann.hpp"
#include "bargzero/errors.hpp"
#include "bargzero/fdsolve.hpp"
#include "bargzero/io.hpp"
#include "bargzero/parallel.hpp"
#include "bargzero/plot.hpp"
#include "bargzero/train.hpp"

namespace bargzero::cli {
namespace fs = std::filesystem;

namespace {

Grid grid_from(RunConfig& cfg) {
  const auto spec = cfg.text("grid", "8:1024");
  const auto parts = split(spec, ':');
  if (parts.size() != 2) throw UsageError("grid: expected L:Nx, got '" + spec + "'");
  const double half_width = parse_real("grid", parts[0]);
  const long n = parse_integer("grid", parts[1]);
  if (!(half_width > 0.0) || n < 3) throw UsageError("grid: need L > 0 and Nx >= 3, got '" + spec + "'");
  return make_grid(half_width, static_cast<std::size_t>(n));
}

Potential system_from(const std::string& text) {
  try {
    return parse_potential(text);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

int parity_from(RunConfig& cfg) {
  const long p = cfg.integer("parity", +1);
  if (p != 1 && p != -1) throw UsageError("parity must be +1 or -1");
  return static_cast<int>(p);
}

int jobs_from(RunConfig& cfg) { return resolve_jobs(static_cast<int>(cfg.integer("jobs", 0))); }

std::vector<double> fd_state(const Grid& grid, const Potential& p, int parity) {
  return solve_lowest(grid, p, 2)[parity > 0 ? 0 : 1].psi;
}

std::string psi_csv(const Grid& grid, const std::vector<double>& psi) {
  std::string s = "x,psi\n";
  for (std::size_t i = 0; i < psi.size(); ++i) s += csv_row({csv_number(grid.points[i]), csv_number(psi[i])});
  return s;
}

TrainConfig train_config_from(RunConfig& cfg, const Potential& sys, int parity) {
  TrainConfig tc = default_train_config(sys, parity);
  tc.adam_steps = static_cast<int>(cfg.integer("steps", tc.adam_steps));
  tc.ansatz.arch.depth = static_cast<int>(cfg.integer("depth", tc.ansatz.arch.depth));
  tc.ansatz.arch.width = static_cast<int>(cfg.integer("width", tc.ansatz.arch.width));
  tc.ansatz.epsilon_init = cfg.real("epsilon", tc.ansatz.epsilon_init);
  tc.freeze_epsilon = cfg.boolean("freeze_epsilon", tc.freeze_epsilon);
  tc.polish_enabled = cfg.boolean("polish", tc.polish_enabled);
  tc.alpha = cfg.real("alpha", tc.alpha);
  tc.restarts = static_cast<int>(cfg.integer("restarts", tc.restarts));
  tc.seed = static_cast<std::uint64_t>(cfg.integer("seed", 0));
  if (tc.adam_steps < 0 || tc.restarts < 1 || tc.ansatz.arch.depth < 1 || tc.ansatz.arch.width < 1)
    throw UsageError("steps >= 0, restarts >= 1, depth >= 1 and width >= 1 are required");
  try {
    tc.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  return tc;
}

LossSpec loss_spec_for(const Grid& grid, const Potential& sys, int parity, double alpha) {
  LossSpec spec;
  spec.alpha = alpha;
  if (parity < 0) {
    spec.target = Target::Excited;
    spec.reference_ground = solve_lowest(grid, sys, 1)[0].psi;
  }
  return spec;
}

std::vector<double> ansatz_state(const Grid& grid, const Potential& sys, const AnsatzParams& params) {
  const LossFunction fn(grid, sys, LossSpec{});
  auto psi = normalize(fn.wavefunction(params), grid.spacing);
  fix_sign(psi);
  return psi;
}

AnsatzParams read_params(const std::string& path) {
  try {
    return params_from_json(read_text_file(path));
  } catch (const std::exception& e) {
    throw UsageError("cannot load parameters from '" + path + "': " + e.what());
  }
}

// The parameter file records the potential kind only, so lambda or a must
// come from the configuration unless the file is harmonic.
std::pair<Potential, AnsatzParams> load_params(RunConfig& cfg, const std::string& path) {
  auto p = read_params(path);
  if (!cfg.has("system") && p.system != PotentialKind::Harmonic)
    throw UsageError("parameter file '" + path + "' needs system=<potential> (lambda or a is not stored)");
  const Potential sys = system_from(cfg.text("system", "harmonic"));
  if (p.system != sys.kind()) throw UsageError("parameter file '" + path + "' was trained for another system");
  return {sys, std::move(p)};
}

std::string zeros_csv_with_class(const ZeroSet& zs) {
  std::string out = "re,im,abs,residual,class\n";
  for (std::size_t i = 0; i < zs.size(); ++i) {
    const auto z = zs.zeros[i];
    out += csv_row({csv_number(z.real()), csv_number(z.imag()), csv_number(std::abs(z)),
                    csv_number(zs.residuals[i]), to_string(classify_zero(z).label)});
  }
  return out;
}

}  // namespace

int cmd_solve(RunConfig& cfg, const fs::path& out) {
  const Grid grid = grid_from(cfg);
  const auto systems = cfg.texts("system", "harmonic,anharmonic:0.1,dw:1.5");
  const long states = cfg.integer("states", 2);
  if (systems.empty()) throw UsageError("solve: no system given");
  if (states < 1) throw UsageError("solve: states must be >= 1");
  std::string energies = "system,n,energy\n";
  for (const auto& name : systems) {
    const Potential p = system_from(name);
    const auto pairs = solve_lowest(grid, p, static_cast<int>(states));
    for (const auto& e : pairs) {
      energies += csv_row({to_string(p), std::to_string(e.index), csv_number(e.energy)});
      write_text_file(out / ("psi_" + file_label(p) + "_" + std::to_string(e.index) + ".csv"), psi_csv(grid, e.psi));
      std::printf("%-16s n=%d  E=%.6f\n", to_string(p).c_str(), e.index, e.energy);
    }
  }
  write_text_file(out / "energies.csv", energies);
  return kOk;
}

int cmd_train(RunConfig& cfg, const fs::path& out) {
  const Grid grid = grid_from(cfg);
  const Potential sys = system_from(cfg.text("system", "dw:1.5"));
  const int parity = parity_from(cfg);
  const TrainConfig tc = train_config_from(cfg, sys, parity);
  const int stride = static_cast<int>(cfg.integer("trace_stride", 50));
  const int jobs = jobs_from(cfg);
  const LossSpec spec = loss_spec_for(grid, sys, parity, tc.alpha);
  TrainResult r;
  try {
    r = train(tc, grid, sys, parity, spec, jobs);
  } catch (const TrainingFailure& e) {
    std::cerr << "training failed: " << e.what() << "\n";
    return kNumerical;
  }
  for (const auto& rep : r.restarts)
    std::fprintf(stderr, "restart %d seed %llu: %s loss=%.12g E=%.12g\n", rep.index,
                 static_cast<unsigned long long>(rep.seed), rep.failed ? rep.message.c_str() : "ok", rep.final_loss,
                 rep.final_energy);
  write_text_file(out / "params.json", params_to_json(r.params));
  write_text_file(out / "result.json", train_result_to_json(r, "params.json", stride));
  std::string trace = "iteration,stage,value\n";
  for (std::size_t i = 0; i < r.trace.size(); ++i)
    trace += csv_row({std::to_string(i), static_cast<int>(i) < r.polish_start ? "adam" : "polish",
                      csv_number(r.trace[i])});
  write_text_file(out / "trace.csv", trace);
  const double e_fd = solve_lowest(grid, sys, 2)[parity > 0 ? 0 : 1].energy;
  std::printf("%s parity %+d: E_VA = %.9f  E_FD = %.9f  |dE| = %.3g  (restart %d)\n", to_string(sys).c_str(), parity,
              r.energy, e_fd, std::abs(r.energy - e_fd), r.restart_index);
  return kOk;
}

int cmd_zeros(RunConfig& cfg, const fs::path& out) {
  const Grid grid = grid_from(cfg);
  const auto params_path = cfg.text("params", "");
  std::optional<std::pair<Potential, AnsatzParams>> loaded;
  if (!params_path.empty()) loaded = load_params(cfg, params_path);
  const Potential sys = loaded ? loaded->first : system_from(cfg.text("system", "dw:1.5"));
  ZeroPipelineConfig zc;
  zc.nmax = static_cast<int>(cfg.integer("nmax", zc.nmax));
  zc.radius = cfg.real("radius", zc.radius);
  zc.rel_floor = cfg.real("floor", zc.rel_floor);
  const long husimi_n = cfg.integer("husimi_points", 0);
  if (zc.nmax < 0 || !(zc.radius > 0.0) || zc.rel_floor < 0.0 || husimi_n < 0 || husimi_n == 1)
    throw UsageError("zeros: need nmax >= 0, radius > 0, floor >= 0, husimi_points 0 or >= 2");

  std::vector<double> psi;
  int parity;
  if (params_path.empty()) {
    parity = parity_from(cfg);
    psi = fd_state(grid, sys, parity);
  } else {
    const auto& params = loaded->second;
    parity = params.parity;
    cfg.set("parity", std::to_string(parity));
    psi = ansatz_state(grid, sys, params);
  }
  const auto r = bargmann_zeros(grid, psi, zc);
  write_text_file(out / "fock.csv", fock_to_csv(r.spectrum));
  if (r.empty_polynomial) {
    std::cout << "notice: every Bargmann coefficient is below the noise floor; no zeros\n";
  }
  write_text_file(out / "zeros.csv", zeros_csv_with_class(r.filtered));
  write_text_file(out / "fock.json", fock_to_json(r.spectrum));
  write_text_file(out / "zeros.json", zeros_to_json(r.filtered));
  write_text_file(out / "zeros.svg",
                  svg_zero_map(r.filtered, zc.radius, to_string(sys) + (parity > 0 ? " even" : " odd")));
  if (husimi_n > 0) {
    const auto q = husimi_lattice(r.polynomial, zc.radius, static_cast<int>(husimi_n));
    const double step = 2.0 * zc.radius / static_cast<double>(husimi_n - 1);
    std::string s = "re,im,q\n";
    for (Eigen::Index i = 0; i < q.rows(); ++i)
      for (Eigen::Index j = 0; j < q.cols(); ++j)
        s += csv_row({csv_number(-zc.radius + static_cast<double>(j) * step),
                      csv_number(-zc.radius + static_cast<double>(i) * step), csv_number(q(i, j))});
    write_text_file(out / "husimi.csv", s);
  }
  std::printf("%s parity %+d: degree %d, %zu zeros with |z| < %g\n", to_string(sys).c_str(), parity,
              r.polynomial.degree, r.filtered.size(), zc.radius);
  for (auto z : r.filtered.zeros)
    std::printf("  %+.6f %+.6fi  |z| = %.6f  %s\n", z.real(), z.imag(), std::abs(z),
                to_string(classify_zero(z).label).c_str());
  return kOk;
}

int cmd_sweep(RunConfig& cfg, const fs::path& out) {
  const auto range = split(cfg.text("a_range", "0.5:2.3:20"), ':');
  if (range.size() != 3) throw UsageError("a_range: expected lo:hi:n");
  const double lo = parse_real("a_range", range[0]), hi = parse_real("a_range", range[1]);
  const long n = parse_integer("a_range", range[2]);
  if (n < 1 || !(lo > 0.0) || !(hi > 0.0)) throw UsageError("a_range: need positive endpoints and n >= 1");
  const Grid grid = grid_from(cfg);
  SweepConfig sc;
  sc.half_width = grid.half_width;
  sc.n_points = grid.n_points;
  sc.nmax = static_cast<int>(cfg.integer("nmax", sc.nmax));
  sc.radius = cfg.real("radius", sc.radius);
  sc.rel_floor = cfg.real("floor", sc.rel_floor);
  sc.condensation_tol = cfg.real("condensation_tol", sc.condensation_tol);
  const int jobs = jobs_from(cfg);

  const auto records = barrier_sweep(linspace(lo, hi, static_cast<int>(n)), sc, jobs);
  write_text_file(out / "sweep.csv", sweep_to_csv(records));
  write_text_file(out / "sweep.json", sweep_to_json(records));
  write_text_file(out / "splitting.svg", svg_splitting(records, "tunnelling splitting"));
  write_text_file(out / "trajectories.svg", svg_trajectories(records, "zero trajectories"));
  int ok = 0;
  for (const auto& r : records) {
    if (!r.ok) {
      std::cerr << "a = " << format_decimal(r.a) << ": " << r.status << "\n";
      continue;
    }
    ++ok;
    const auto label = format_decimal(r.a);
    write_text_file(out / "maps" / (label + ".svg"), svg_zero_map(r.ground, sc.radius, "a = " + label + " even"));
    write_text_file(out / "maps" / (label + "_odd.svg"),
                    svg_zero_map(r.excited, sc.radius, "a = " + label + " odd"));
  }
  if (ok >= 2) {
    auto sorted = records;
    std::stable_sort(sorted.begin(), sorted.end(), [](const auto& x, const auto& y) { return x.a < y.a; });
    const auto prof = splitting_profile(sorted);
    std::printf("%d points, splitting spans %.3f decades, monotone decreasing: %s\n", ok, prof.decades,
                prof.monotone_decreasing ? "yes" : "no");
  } else {
    std::printf("%d successful point(s)\n", ok);
  }
  return ok >= 1 ? kOk : kNumerical;
}

int cmd_ablate(RunConfig& cfg, const fs::path& out) {
  const auto protocol = cfg.text("protocol", "");
  const Grid grid = grid_from(cfg);
  const int jobs = jobs_from(cfg);

  const auto setup_from = [&](const Potential& sys) {
    AblationSetup s;
    s.grid = grid;
    s.train = train_config_from(cfg, sys, +1);
    const long seeds = cfg.integer("seeds", 5);
    const long first = cfg.integer("first_seed", 0);
    if (seeds < 1) throw UsageError("seeds must be >= 1");
    s.seeds.clear();
    for (long i = 0; i < seeds; ++i) s.seeds.push_back(static_cast<std::uint64_t>(first + i));
    s.jobs = jobs;
    return s;
  };

  if (protocol == "grid") {
    std::vector<Potential> systems;
    for (const auto& s : cfg.texts("systems", "harmonic,anharmonic:0.1,anharmonic:0.5,dw:1,dw:1.5,dw:2"))
      systems.push_back(system_from(s));
    std::vector<std::size_t> ns;
    for (long n : cfg.integers("n_list", "512,1024,2048,4096")) {
      if (n < 3) throw UsageError("n_list entries must be >= 3");
      ns.push_back(static_cast<std::size_t>(n));
    }
    const auto rows = grid_ablation(systems, ns, grid.half_width);
    std::string csv = "N,system,E0,E1,delta\n", timing = "N,system,seconds\n";
    for (const auto& r : rows) {
      csv += csv_row({std::to_string(r.n_points), r.system, csv_number(r.e0), csv_number(r.e1), csv_number(r.delta)});
      timing += csv_row({std::to_string(r.n_points), r.system, csv_number(r.seconds)});
    }
    write_text_file(out / "grid.csv", csv);
    write_text_file(out / "grid_timing.csv", timing);
    std::printf("grid: %zu rows\n", rows.size());
  } else if (protocol == "capacity") {
    std::vector<int> depths, widths;
    for (long d : cfg.integers("depths", "2,3,4")) depths.push_back(static_cast<int>(d));
    for (long w : cfg.integers("widths", "16,32,64,128")) widths.push_back(static_cast<int>(w));
    const auto rows = capacity_ablation(depths, widths, setup_from(Potential::double_well(1.5)));
    write_text_file(out / "capacity.csv", capacity_to_csv(rows));
    std::printf("capacity: %zu rows\n", rows.size());
  } else if (protocol == "epsilon") {
    EpsilonConfig ec;
    ec.nmax = static_cast<int>(cfg.integer("nmax", ec.nmax));
    ec.rel_floor = cfg.real("floor", ec.rel_floor);
    const auto eps = cfg.reals("eps_values", "0.005,0.01,0.015,0.02,0.03,0.05,0.075,0.1,0.15,0.2,0.25,0.3,0.4,0.5,0.7");
    for (double e : eps)
      if (!(e > 0.0)) throw UsageError("eps_values must be positive");
    const auto rows = epsilon_ablation(eps, setup_from(Potential::double_well(1.5)), ec);
    write_text_file(out / "epsilon.csv", epsilon_to_csv(rows));
    std::printf("epsilon: %zu rows\n", rows.size());
  } else if (protocol == "truncation") {
    std::vector<int> orders;
    for (long n : cfg.integers("nmax_list", "20,30,40,60,80,100,120,160,200")) orders.push_back(static_cast<int>(n));
    const int ref = static_cast<int>(cfg.integer("reference_nmax", 200));
    for (int n : orders)
      if (n < 0 || n > ref) throw UsageError("nmax_list entries must lie in [0, reference_nmax]");
    const auto source = cfg.text("source", "fd");
    std::vector<std::vector<double>> states;
    if (source == "fd") {
      for (const auto& p : reference_systems())
        for (const auto& e : solve_lowest(grid, p, 2)) states.push_back(e.psi);
    } else if (source == "epsilon") {
      auto setup = setup_from(Potential::double_well(1.5));
      setup.seeds = {static_cast<std::uint64_t>(cfg.integer("first_seed", 0))};
      for (auto& row : epsilon_ablation(reference_epsilons(), setup))
        for (auto& s : row.states) states.push_back(std::move(s));
    } else {
      throw UsageError("source must be 'fd' or 'epsilon'");
    }
    const auto rows = truncation_ablation(grid, states, orders, ref);
    write_text_file(out / "truncation.csv", truncation_to_csv(rows));
    std::printf("truncation: %zu rows over %zu wavefunctions\n", rows.size(), states.size());
  } else if (protocol == "l2") {
    std::vector<Potential> systems;
    for (const auto& s : cfg.texts("systems", "harmonic,anharmonic:0.1,anharmonic:0.5,dw:1,dw:1.5,dw:2,dw:2.5"))
      systems.push_back(system_from(s));
    const auto rows = l2_validation(systems, setup_from(Potential::double_well(1.5)));
    write_text_file(out / "l2.csv", l2_to_csv(rows));
    std::printf("l2: %zu rows\n", rows.size());
  } else {
    throw UsageError("ablate: unknown protocol '" + protocol + "' (grid, capacity, epsilon, truncation, l2)");
  }
  return kOk;
}

int cmd_validate(RunConfig& cfg, const fs::path& out) {
  const Grid grid = grid_from(cfg);
  const auto params_path = cfg.text("params", "");
  std::string csv = "check,value,target,tolerance,pass\n";
  bool all = true;
  const auto check = [&](const std::string& name, double value, double target, double tol) {
    const bool pass = std::abs(value - target) <= tol;
    all = all && pass;
    csv += csv_row({name, csv_number(value), csv_number(target), csv_number(tol), pass ? "1" : "0"});
    std::printf("%-34s %.9g (target %.9g +- %.1e) %s\n", name.c_str(), value, target, tol, pass ? "PASS" : "FAIL");
  };

  if (!params_path.empty()) {
    const auto [sys, params] = load_params(cfg, params_path);
    const auto fd = solve_lowest(grid, sys, 2)[params.parity > 0 ? 0 : 1];
    const LossFunction fn(grid, sys, LossSpec{});
    const double e = rayleigh_quotient(fn.wavefunction(params), fn.hamiltonian());
    const auto err = wavefunction_error(ansatz_state(grid, sys, params), fd.psi, grid.spacing);
    check("abs_energy_error", std::abs(e - fd.energy), 0.0, cfg.real("energy_tol", 1e-5));
    check("l2_error", err.l2, 0.0, cfg.real("l2_tol", 1e-4));
    csv += csv_row({"linf_error", csv_number(err.linf), "", "", ""});
  } else {
    const std::pair<const char*, std::pair<double, double>> table[] = {
        {"harmonic", {0.499992, 1.499962}}, {"anharmonic:0.1", {0.559135, 1.769438}}, {"dw:1.5", {0.801076, 1.062985}}};
    for (const auto& [name, e] : table) {
      const auto pairs = solve_lowest(grid, parse_potential(name), 2);
      check(std::string(name) + "_E0", pairs[0].energy, e.first, 1e-6);
      check(std::string(name) + "_E1", pairs[1].energy, e.second, 1e-6);
    }
    const auto dw = Potential::double_well(1.5);
    const auto zs = bargmann_zeros(grid, fd_state(grid, dw, +1)).filtered;
    check("dw:1.5_leading_zero_abs", zs.empty() ? 0.0 : std::abs(zs.zeros.front()), 1.6143, 1e-3);
    check("dw:1.5_leading_zero_re", zs.empty() ? 1.0 : zs.zeros.front().real(), 0.0, 1e-6);
  }
  write_text_file(out / "validate.csv", csv);
  return all ? kOk : kNumerical;
}

int run_command(const std::string& name, RunConfig& cfg, const fs::path& out) {
  if (name == "solve") return cmd_solve(cfg, out);
  if (name == "train") return cmd_train(cfg, out);
  if (name == "zeros") return cmd_zeros(cfg, out);
  if (name == "sweep") return cmd_sweep(cfg, out);
  if (name == "ablate") return cmd_ablate(cfg, out);
  if (name == "validate") return cmd_validate(cfg, out);
  throw UsageError("unknown command '" + name + "'");
}

}  // namespace bargzero::cli
