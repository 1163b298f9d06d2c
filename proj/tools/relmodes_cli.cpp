// relmodes command-line front end.
#include "relmodes/commands.hpp"

#include <CLI11.hpp>

#include <iostream>

using namespace relmodes;

int main(int argc, char** argv) {
  CLI::App app{"Relative-motion modal decomposition and Floquet tools"};
  app.require_subcommand(1);

  std::string config_path;
  std::string rep;
  CommandOptions opts;
  double periods = 0.0;
  double tol = 0.0;

  struct Sub {
    const char* name;
    const char* help;
    CommandResult (*fn)(const RunConfig&, const CommandOptions&);
  };
  const Sub subs[] = {
      {"modes", "emit the six normalized mode trajectories", cmd_modes},
      {"decompose", "modal constants and per-mode contributions of an initial state", cmd_decompose},
      {"reconstruct", "trajectory from modal constants or an initial state", cmd_reconstruct},
      {"sweep", "bounded planar family through (x0, y0)", cmd_sweep},
      {"floquet-num", "numeric Floquet pipeline on the cw, cartesian or qns plant", cmd_floquet_numeric},
      {"validate", "run the invariant suites and write a report", cmd_validate},
  };
  for (const auto& s : subs) {
    CLI::App* sc = app.add_subcommand(s.name, s.help);
    sc->add_option("--config", config_path, "JSON run configuration");
    sc->add_option("--rep", rep, "representation: qns, cart or sph")
        ->check(CLI::IsMember({"qns", "cart", "cartesian", "sph", "spherical"}));
    sc->add_option("--out", opts.out_dir, "output directory")->capture_default_str();
    sc->add_option("--periods", periods, "number of chief periods")->check(CLI::PositiveNumber);
    sc->add_option("--tol", tol, "tolerance for drift flags and reports")->check(CLI::PositiveNumber);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // --help and friends exit 0; everything else is a usage error
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    CLI::App* used = app.get_subcommands().front();
    RunConfig cfg = config_path.empty() ? RunConfig{} : load_config(config_path);
    if (!rep.empty()) opts.rep = parse_domain(rep);
    if (used->count("--periods")) opts.periods = periods;
    if (used->count("--tol")) opts.tol = tol;
    for (const auto& s : subs) {
      if (used->get_name() != s.name) continue;
      const CommandResult r = s.fn(cfg, opts);
      for (const auto& f : r.files) log_message(LogLevel::Info, "wrote " + f);
      for (const auto& e : r.errors) log_message(LogLevel::Error, e);
      std::cout << s.name << ": " << (r.exit_code() == 0 ? "ok" : "failed") << " ("
                << r.files.size() << " files in " << opts.out_dir << ", " << r.warnings.size()
                << " warnings)\n";
      return r.exit_code();
    }
  } catch (const InvalidInput& e) {
    log_message(LogLevel::Error, e.what());
    return 2;
  } catch (const Error& e) {
    log_message(LogLevel::Error, e.what());
    return 3;
  } catch (const std::exception& e) {
    log_message(LogLevel::Error, std::string("unexpected failure: ") + e.what());
    return 1;
  }
  return 1;
}
