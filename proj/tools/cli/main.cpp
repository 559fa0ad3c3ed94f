#include <cstdlib>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bargzero/errors.hpp"
#include "bargzero/io.hpp"
#include "commands.hpp"

namespace fs = std::filesystem;
using namespace bargzero::cli;

namespace {

struct Flag {
  const char* name;  // long option without dashes; config key uses '_'
  const char* help;
};

const std::vector<Flag> kCommon = {
    {"grid", "half-width and point count, L:Nx (default 8:1024)"},
    {"jobs", "worker threads (default: available parallelism)"},
};

const std::map<std::string, std::vector<Flag>> kFlags = {
    {"solve", {{"system", "comma-separated systems: harmonic, anharmonic:<lambda>, dw:<a>"},
               {"states", "number of eigenpairs per system (default 2)"}}},
    {"train", {{"system", "potential (default dw:1.5)"},
               {"parity", "+1 ground state, -1 first excited state"},
               {"steps", "Adam steps (default 10000)"},
               {"restarts", "independent restarts; best final loss wins"},
               {"seed", "base seed (default 0)"},
               {"depth", "hidden layers of the correction net"},
               {"width", "hidden width of the correction net"},
               {"epsilon", "initial perturbation scale"},
               {"freeze-epsilon", "hold epsilon fixed (true/false)"},
               {"polish", "run the L-BFGS polish (true/false)"},
               {"alpha", "orthogonality penalty weight"},
               {"trace-stride", "trace sampling stride in result.json"}}},
    {"zeros", {{"system", "potential (default dw:1.5)"},
               {"parity", "+1 or -1, selects the FD state"},
               {"params", "params.json from train; replaces the FD state"},
               {"nmax", "Hermite truncation order (default 30)"},
               {"radius", "keep zeros with |z| < radius (default 6)"},
               {"floor", "relative coefficient floor (default 1e-4)"},
               {"husimi-points", "also write an n x n Husimi lattice"}}},
    {"sweep", {{"a-range", "lo:hi:n barrier values (default 0.5:2.3:20)"},
               {"nmax", "Hermite truncation order"},
               {"radius", "zero radius"},
               {"floor", "relative coefficient floor"},
               {"condensation-tol", "axis tolerance for the condensation fraction"}}},
    {"ablate", {{"seeds", "seeds per configuration (default 5)"},
                {"first-seed", "first seed (default 0)"},
                {"steps", "Adam steps"},
                {"depth", "correction-net depth (epsilon, l2)"},
                {"width", "correction-net width (epsilon, l2)"},
                {"depths", "capacity depths, comma-separated"},
                {"widths", "capacity widths, comma-separated"},
                {"eps-values", "epsilon values, comma-separated"},
                {"nmax", "epsilon protocol: projection order (default 60)"},
                {"floor", "epsilon protocol: coefficient floor (default 0)"},
                {"nmax-list", "truncation orders"},
                {"reference-nmax", "truncation reference order (default 200)"},
                {"source", "truncation wavefunctions: fd or epsilon"},
                {"systems", "systems for grid and l2"},
                {"n-list", "grid sizes for the grid protocol"},
                {"polish", "run the L-BFGS polish"}}},
    {"validate", {{"params", "params.json to compare against the FD state"},
                  {"system", "system of the parameter file"},
                  {"energy-tol", "energy tolerance"},
                  {"l2-tol", "L2 tolerance"}}},
};

std::string key_of(const std::string& flag) {
  std::string k = flag;
  for (char& c : k)
    if (c == '-') c = '_';
  return k;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bargmann-zero analysis of 1D bound states"};
  app.require_subcommand(1);

  std::map<std::string, std::string> given;  // key -> value from the command line
  std::string config_path, out_flag, protocol;
  std::map<std::string, CLI::App*> subs;

  for (const auto& [name, flags] : kFlags) {
    auto* sub = app.add_subcommand(name);
    subs[name] = sub;
    sub->add_option("--config", config_path, "key=value file; command-line flags take precedence");
    sub->add_option("--out", out_flag, "output directory (else $BARGZERO_OUTPUT_DIR, config 'out', ./out)");
    if (name == "ablate")
      sub->add_option("protocol", protocol, "grid, capacity, epsilon, truncation or l2");
    for (const auto* list : {&kCommon, &flags}) {
      for (const auto& f : *list) {
        const std::string key = key_of(f.name);
        sub->add_option_function<std::string>(
            std::string("--") + f.name, [&given, key](const std::string& v) { given[key] = v; }, f.help);
      }
    }
  }
  subs["solve"]->description("finite-difference eigenpairs; writes energies.csv and psi_<system>_<n>.csv");
  subs["train"]->description("variational training; writes result.json, params.json, trace.csv");
  subs["zeros"]->description("Bargmann zeros of an FD or trained state; writes fock.csv, zeros.csv, zeros.svg");
  subs["sweep"]->description("double-well barrier sweep; writes sweep.csv, sweep.json and SVG plots");
  subs["ablate"]->description("grid, capacity, epsilon, truncation or l2 protocol; writes <protocol>.csv");
  subs["validate"]->description("reference checks, or a trained parameter file against FD");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  std::string command;
  for (const auto& [name, sub] : subs)
    if (sub->parsed()) command = name;

  try {
    RunConfig cfg = config_path.empty() ? RunConfig{} : RunConfig::load(config_path);
    for (const auto& [k, v] : given) cfg.set(k, v);
    if (!protocol.empty()) cfg.set("protocol", protocol);
    cfg.set("command", command);
    if (!out_flag.empty()) {
      cfg.set("out", out_flag);
    } else if (const char* env = std::getenv("BARGZERO_OUTPUT_DIR"); env && *env) {
      cfg.set("out", env);
    }
    const fs::path out = cfg.text("out", "out");
    fs::create_directories(out);
    int code = run_command(command, cfg, out);
    bargzero::write_text_file(out / "run.cfg", cfg.serialize());
    return code;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const bargzero::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumerical;
  }
}
