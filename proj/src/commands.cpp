#include "relmodes/commands.hpp"

#include "relmodes/modal_engine.hpp"
#include "relmodes/numeric_floquet.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <random>

namespace relmodes {

namespace fs = std::filesystem;

LogLevel log_level_from_env() {
  const char* v = std::getenv("RELMODES_LOG");
  if (!v) return LogLevel::Warn;
  const std::string s(v);
  if (s == "error") return LogLevel::Error;
  if (s == "info") return LogLevel::Info;
  if (s == "debug") return LogLevel::Debug;
  return LogLevel::Warn;
}

void log_message(LogLevel level, const std::string& msg) {
  if (level > log_level_from_env()) return;
  static const char* names[] = {"error", "warn", "info", "debug"};
  std::cerr << "relmodes [" << names[static_cast<int>(level)] << "] " << msg << '\n';
}

RunConfig apply_options(RunConfig cfg, const CommandOptions& opts) {
  if (opts.rep) cfg.rep = *opts.rep;
  if (opts.periods) {
    if (!(*opts.periods > 0.0)) throw InvalidInput("--periods must be positive");
    cfg.periods = *opts.periods;
  }
  if (opts.tol) {
    if (!(*opts.tol > 0.0)) throw InvalidInput("--tol must be positive");
    cfg.tol = *opts.tol;
  }
  return cfg;
}

namespace {

std::string out_path(const CommandOptions& opts, const std::string& name, CommandResult& res) {
  fs::create_directories(opts.out_dir);
  const std::string p = (fs::path(opts.out_dir) / name).string();
  res.files.push_back(p);
  return p;
}

void warn(CommandResult& res, const std::string& msg) {
  res.warnings.push_back(msg);
  log_message(LogLevel::Warn, msg);
}

std::vector<double> grid_for(const RunConfig& cfg, double periods) {
  const int steps = std::max(2, static_cast<int>(std::lround(cfg.steps_per_period * periods)) + 1);
  return theta_grid(cfg.chief, periods, steps);
}

CsvCurve curve_from(const ChiefOrbit& chief, const std::vector<double>& grid,
                    const std::function<Vec6(double)>& f, std::string label) {
  CsvCurve c;
  c.label = std::move(label);
  c.theta = grid;
  for (double th : grid) {
    c.t.push_back(theta_to_time(chief, th));
    c.x.push_back(f(th));
  }
  return c;
}

void note_singularities(const ModalBasis& basis, CommandResult& res) {
  if (basis.regularized())
    warn(res, "e sin f0 is (near) zero at the epoch: eigenvectors use the regularized chief. "
              "Shift f0 away from 0 or 180 deg for the closed-form path.");
  if (basis.q1_regularized())
    warn(res, "|q1| < 1e-6: LF transform evaluated in its 1/q1-free form");
}

LtiSystem closed_lti(const ChiefOrbit& chief, Domain d) {
  const ChiefOrbit eff = regularize_chief(chief);
  switch (d) {
    case Domain::Cartesian: return lti_cartesian_closed(eff);
    case Domain::Spherical: return lti_spherical_closed(eff);
    case Domain::Qns: return lti_qns(eff);
  }
  return lti_qns(eff);
}

double drift_per_orbit(const ModalBasis& basis, double c6) {
  return kTwoPi * std::abs(c6) * basis.V().col(4).head<3>().norm();
}

Json constants_json(const ModalConstants& mc) {
  return Json{{"c", to_json(mc.c)},
              {"domain", to_string(mc.domain)},
              {"regularized", mc.regularized},
              {"numeric_fallback", mc.numeric_fallback}};
}

double rel_entry_error(const Mat6& a, const Mat6& b) {
  const double scale = std::max(b.cwiseAbs().maxCoeff(), 1e-300);
  return (a - b).cwiseAbs().maxCoeff() / scale;
}

// Velocities divided by the mean motion so all entries share position units.
Mat6 unit_scaled(const Mat6& M, double n, bool velocity_rows) {
  if (!velocity_rows) return M;
  Vec6 s;
  s << 1, 1, 1, 1 / n, 1 / n, 1 / n;
  return s.asDiagonal() * M * s.cwiseInverse().asDiagonal();
}

struct FloquetRun {
  NumericFloquetResult result;
  Json analytic = Json::object();
  double lambda_error = 0.0;
  double lf_error = 0.0;
  double eig_error = 0.0;
};

FloquetRun run_floquet(const RunConfig& cfg, const std::string& plant, int n_samples) {
  const ChiefOrbit& chief = cfg.chief;
  NumericFloquetOptions o;
  o.n_samples = n_samples;
  o.n_harmonics = cfg.n_harmonics;
  FloquetRun fr;
  const double n = chief.n();
  if (plant == "cw") {
    const Mat6 A = cw_plant(n);
    // Over a full period the CW monodromy is unipotent and its principal
    // logarithm loses the +-ni pair; a quarter period keeps them.
    fr.result = numeric_modal_decomp([A](double) { return A; }, 0.0, chief.period() / 4.0, o);
    double err = 0.0;
    for (const auto& c : fr.result.eigen.clusters) {
      const double target = std::abs(c.lambda.imag()) > 0.5 * n ? n : 0.0;
      err = std::max(err, std::abs(std::abs(c.lambda) - target));
    }
    fr.eig_error = err / n;
    fr.lambda_error = rel_entry_error(fr.result.Lambda, A);
    for (std::size_t k = 0; k < fr.result.t.size(); ++k)
      fr.lf_error = std::max(fr.lf_error, (fr.result.lf_samples[k] - Mat6::Identity()).cwiseAbs().maxCoeff());
    fr.analytic = Json{{"Lambda", to_json(MatX(A))},
                       {"eigenvalues", Json::array({to_json(Complex(0, 0)), to_json(Complex(0, 0)),
                                                    to_json(Complex(0, n)), to_json(Complex(0, -n)),
                                                    to_json(Complex(0, n)), to_json(Complex(0, -n))})}};
  } else if (plant == "cartesian") {
    fr.result = numeric_modal_decomp(
        [chief](double t) { return cartesian_plant_at_time(chief, t); }, 0.0, chief.period(), o);
    const ChiefOrbit eff = regularize_chief(chief);
    const Mat6 La = n * map_lti(g_cartesian(eff, eff.theta0()).entries, lti_qns(eff).R);
    fr.lambda_error = rel_entry_error(unit_scaled(fr.result.Lambda, n, true), unit_scaled(La, n, true));
    const LfTransform lf = lf_for_domain(eff, Domain::Cartesian, IndepVar::Time);
    for (std::size_t k = 0; k < fr.result.t.size(); ++k) {
      const Mat6 Pa = lf(time_to_theta(chief, fr.result.t[k]));
      fr.lf_error = std::max(fr.lf_error, (unit_scaled(fr.result.lf_samples[k] - Pa, n, true)).cwiseAbs().maxCoeff());
    }
    double mx = 0.0;
    for (const auto& c : fr.result.eigen.clusters) mx = std::max(mx, std::abs(c.lambda));
    fr.eig_error = mx * chief.period();
    const Mat6 G0 = g_cartesian(eff, eff.theta0()).entries;
    const Mat6 Lq = G0.partialPivLu().solve(fr.result.Lambda * G0);
    const double l21 = lti_qns(eff, IndepVar::Time).R(1, 0);
    fr.analytic = Json{{"Lambda", to_json(MatX(La))},
                       {"Lambda21_qns", l21},
                       {"Lambda21_qns_numeric", Lq(1, 0)},
                       {"Lambda21_rel_error", std::abs(Lq(1, 0) - l21) / std::abs(l21)}};
  } else if (plant == "qns") {
    fr.result = numeric_modal_decomp(
        [chief](double th) { return qns_plant_theta(chief, th).entries; }, chief.theta0(), kTwoPi, o);
    const Mat6 R = lti_qns(chief).R;
    const Mat6 Ma = Mat6::Identity() + kTwoPi * R;
    fr.lambda_error = rel_entry_error(fr.result.Lambda, R);
    for (std::size_t k = 0; k < fr.result.t.size(); ++k)
      fr.lf_error = std::max(fr.lf_error, (fr.result.lf_samples[k] - lf_qns(chief, fr.result.t[k])).cwiseAbs().maxCoeff());
    double mx = 0.0;
    for (const auto& c : fr.result.eigen.clusters) mx = std::max(mx, std::abs(c.lambda));
    fr.eig_error = mx * kTwoPi;
    fr.analytic = Json{{"R", to_json(MatX(R))},
                       {"monodromy", to_json(MatX(Ma))},
                       {"monodromy_rel_error", rel_entry_error(fr.result.monodromy, Ma)}};
  } else {
    throw InvalidInput("unknown plant '" + plant + "' (cw, cartesian, qns)");
  }
  return fr;
}

Json floquet_json(const FloquetRun& fr, const std::string& plant) {
  const auto& r = fr.result;
  Json clusters = Json::array();
  for (const auto& c : r.eigen.clusters)
    clusters.push_back(Json{{"lambda", to_json(c.lambda)},
                            {"algebraic", c.algebraic},
                            {"geometric", c.geometric},
                            {"chains", c.chains}});
  Json eig = Json::array();
  for (const auto& l : r.eigen.eigenvalues) eig.push_back(to_json(l));
  return Json{{"plant", plant},
              {"independent_variable", plant == "qns" ? "theta_rad" : "t_s"},
              {"t0", r.t0},
              {"T", r.T},
              {"eigenvalues", eig},
              {"clusters", clusters},
              {"Lambda", to_json(MatX(r.Lambda))},
              {"monodromy", to_json(MatX(r.monodromy))},
              {"V", to_json(CMatX(r.eigen.V))},
              {"J", to_json(CMatX(r.eigen.J))},
              {"residuals",
               {{"periodic_fit_relative", r.periodic_fit_residual},
                {"periodicity_defect", r.periodicity_defect},
                {"log_exp_relative", r.log_residual},
                {"liouville_relative", r.liouville_residual}}},
              {"analytic", fr.analytic},
              {"comparison",
               {{"Lambda_rel_error", fr.lambda_error},
                {"lf_max_error", fr.lf_error},
                {"eigenvalue_error", fr.eig_error}}}};
}

}  // namespace

CommandResult cmd_modes(const RunConfig& cfg0, const CommandOptions& opts) {
  const RunConfig cfg = apply_options(cfg0, opts);
  CommandResult res;
  const ModalBasis basis(cfg.chief, cfg.rep);
  note_singularities(basis, res);
  Json scales = Json::object();
  Json partition = Json::object();
  for (int i = 1; i <= 6; ++i) {
    const double periods = i == 6 ? 3.0 * cfg.periods : cfg.periods;
    const auto grid = grid_for(cfg, periods);
    const SampledCurve sc = mode_trajectory(cfg.chief, i, grid, cfg.rep, true);
    CsvCurve c{std::to_string(i), sc.theta, sc.t, sc.x};
    write_curve_csv(out_path(opts, "mode_" + std::to_string(i) + ".csv", res), c, cfg.rep);
    scales[std::to_string(i)] = sc.scale;
    double inplane = 0.0, outplane = 0.0;
    for (const auto& x : sc.x) {
      inplane = std::max({inplane, std::abs(x(0)), std::abs(x(1)), std::abs(x(3)), std::abs(x(4))});
      outplane = std::max({outplane, std::abs(x(2)), std::abs(x(5))});
    }
    partition[std::to_string(i)] = Json{{"max_in_plane", inplane}, {"max_out_of_plane", outplane}};
  }
  const LtiSystem lti = closed_lti(cfg.chief, cfg.rep);
  res.report = Json{{"command", "modes"},
                    {"chief", chief_to_json(cfg.chief)},
                    {"representation", to_string(cfg.rep)},
                    {"independent_variable", "theta_rad"},
                    {"eigenvalues", Json::array({0, 0, 0, 0, 0, 0})},
                    {"R", to_json(MatX(lti.R))},
                    {"V", to_json(MatX(basis.V()))},
                    {"J", to_json(MatX(lti.J))},
                    {"normalization_scale", scales},
                    {"plane_partition", partition},
                    {"periods", cfg.periods},
                    {"drift_mode_periods", 3.0 * cfg.periods},
                    {"regularized", basis.regularized()},
                    {"q1_regularized", basis.q1_regularized()},
                    {"units", "km, km/s, rad; modes divided by their max position norm"}};
  try {
    const Vec6 x0 = initial_state(cfg, cfg.rep);
    res.report["constants"] = constants_json(basis.constants(x0));
  } catch (const InvalidInput&) {
  }
  res.report["warnings"] = res.warnings;
  write_json(out_path(opts, "modes.json", res), res.report);
  return res;
}

CommandResult cmd_decompose(const RunConfig& cfg0, const CommandOptions& opts) {
  const RunConfig cfg = apply_options(cfg0, opts);
  CommandResult res;
  const ModalBasis basis(cfg.chief, cfg.rep);
  note_singularities(basis, res);
  const Vec6 x0 = initial_state(cfg, cfg.rep);
  const ModalConstants mc = basis.constants(x0);
  const auto grid = grid_for(cfg, cfg.periods);

  std::vector<CsvCurve> parts;
  for (int i = 1; i <= 6; ++i)
    parts.push_back(curve_from(cfg.chief, grid,
                               [&, i](double th) { return Vec6(mc.c(i - 1) * basis.mode(i, th)); },
                               std::to_string(i)));
  CsvCurve sum = curve_from(cfg.chief, grid, [&](double th) {
    Vec6 s = Vec6::Zero();
    for (int i = 1; i <= 6; ++i) s += mc.c(i - 1) * basis.mode(i, th);
    return s;
  }, "sum");
  const CsvCurve traj = curve_from(cfg.chief, grid, [&](double th) { return basis.reconstruct(mc.c, th); }, "sum");
  double sum_err = 0.0, scale = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    sum_err = std::max(sum_err, (sum.x[k] - traj.x[k]).norm());
    scale = std::max(scale, traj.x[k].norm());
  }
  parts.push_back(sum);
  write_curves_csv(out_path(opts, "modes_contributions.csv", res), parts, cfg.rep);
  const std::string traj_path = out_path(opts, "trajectory.csv", res);
  write_curve_csv(traj_path, traj, cfg.rep);

  // Round trip through the emitted file.
  const auto back = read_curves_csv(traj_path);
  const ModalConstants mc_back = modal_constants(cfg.chief, back.front().x.front(), cfg.rep);
  const double roundtrip = (mc_back.c - mc.c).norm() / std::max(mc.c.norm(), 1e-300);

  const double drift = drift_per_orbit(basis, mc.c(5));
  const double ref = std::max(x0.head<3>().norm(), 1e-300);
  const bool drifting = drift > cfg.tol * ref;
  if (drifting) warn(res, "c6 != 0: the motion drifts by about " + std::to_string(drift) + " per orbit");
  double oop_modes = 0.0, oop_total = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    oop_total = std::max(oop_total, std::abs(traj.x[k](2)));
    oop_modes = std::max(oop_modes, std::abs(parts[1].x[k](2) + parts[3].x[k](2) - traj.x[k](2)));
  }
  if (sum_err > 1e-9 * std::max(scale, 1e-300))
    res.errors.push_back("sum of mode contributions differs from the reconstruction");
  res.report = Json{{"command", "decompose"},
                    {"chief", chief_to_json(cfg.chief)},
                    {"representation", to_string(cfg.rep)},
                    {"state0", to_json(x0)},
                    {"constants", constants_json(mc)},
                    {"c6", mc.c(5)},
                    {"drifting", drifting},
                    {"drift_per_orbit", drift},
                    {"sum_vs_reconstruct_max_error", sum_err},
                    {"csv_roundtrip_constants_rel_error", roundtrip},
                    {"out_of_plane_not_in_modes_2_4", oop_modes},
                    {"out_of_plane_max", oop_total},
                    {"regularized", basis.regularized()},
                    {"warnings", res.warnings}};
  write_json(out_path(opts, "decompose.json", res), res.report);
  return res;
}

CommandResult cmd_reconstruct(const RunConfig& cfg0, const CommandOptions& opts) {
  const RunConfig cfg = apply_options(cfg0, opts);
  CommandResult res;
  const ModalBasis basis(cfg.chief, cfg.rep);
  note_singularities(basis, res);
  ModalConstants mc;
  if (cfg.constants) {
    mc.c = *cfg.constants;
    mc.domain = cfg.rep;
  } else {
    mc = basis.constants(initial_state(cfg, cfg.rep));
  }
  const auto grid = grid_for(cfg, cfg.periods);
  const CsvCurve traj = curve_from(cfg.chief, grid, [&](double th) { return basis.reconstruct(mc.c, th); }, "sum");
  write_curve_csv(out_path(opts, "trajectory.csv", res), traj, cfg.rep);
  res.report = Json{{"command", "reconstruct"},
                    {"chief", chief_to_json(cfg.chief)},
                    {"representation", to_string(cfg.rep)},
                    {"constants", constants_json(mc)},
                    {"regularized", basis.regularized()}};
  if (cfg.rep != Domain::Spherical) {
    const PlantFn plant = cfg.rep == Domain::Cartesian
                              ? PlantFn([&](double th) { return cartesian_plant_theta(cfg.chief, th); })
                              : PlantFn([&](double th) { return qns_plant_theta(cfg.chief, th).entries; });
    const Trajectory lin = propagate_linear_at(plant, IndepVar::Theta, traj.x.front(), grid);
    double err = 0.0, scale = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
      err = std::max(err, (lin.x[k] - traj.x[k]).norm());
      scale = std::max(scale, lin.x[k].norm());
    }
    res.report["linear_propagation_rel_error"] = err / std::max(scale, 1e-300);
  }
  res.report["warnings"] = res.warnings;
  write_json(out_path(opts, "reconstruct.json", res), res.report);
  return res;
}

CommandResult cmd_sweep(const RunConfig& cfg0, const CommandOptions& opts) {
  const RunConfig cfg = apply_options(cfg0, opts);
  CommandResult res;
  if (cfg.sweep_xdot0.empty()) throw InvalidInput("sweep needs a non-empty sweep.xdot0_km_s list");
  if (cfg.rep != Domain::Cartesian) warn(res, "sweep is defined in Cartesian coordinates; --rep ignored");
  const ModalBasis basis(cfg.chief, Domain::Cartesian);
  note_singularities(basis, res);
  const auto family = sweep_bounded_family(cfg.chief, cfg.sweep_x0, cfg.sweep_y0, cfg.sweep_xdot0);
  const auto grid = grid_for(cfg, cfg.periods);
  Json members = Json::array();
  for (std::size_t k = 0; k < family.size(); ++k) {
    const auto& m = family[k];
    const CsvCurve c = curve_from(cfg.chief, grid, [&](double th) { return basis.reconstruct(m.constants.c, th); },
                                  "sum");
    write_curve_csv(out_path(opts, "family_" + std::to_string(k) + ".csv", res), c, Domain::Cartesian);
    const double anchor = std::hypot(c.x.front()(0) - cfg.sweep_x0, c.x.front()(1) - cfg.sweep_y0);
    const double closure = (c.x.back() - c.x.front()).norm() / std::max(c.x.front().norm(), 1e-300);
    members.push_back(Json{{"xdot0_km_s", m.xdot0},
                           {"ydot0_km_s", m.ydot0},
                           {"constants", to_json(m.constants.c)},
                           {"c6", m.constants.c(5)},
                           {"anchor_error_km", anchor},
                           {"closure_rel_error", closure}});
  }
  res.report = Json{{"command", "sweep"},
                    {"chief", chief_to_json(cfg.chief)},
                    {"x0_km", cfg.sweep_x0},
                    {"y0_km", cfg.sweep_y0},
                    {"members", members},
                    {"warnings", res.warnings}};
  write_json(out_path(opts, "sweep.json", res), res.report);
  return res;
}

CommandResult cmd_floquet_numeric(const RunConfig& cfg0, const CommandOptions& opts) {
  const RunConfig cfg = apply_options(cfg0, opts);
  CommandResult res;
  const FloquetRun fr = run_floquet(cfg, cfg.plant, cfg.n_samples);
  res.report = floquet_json(fr, cfg.plant);
  res.report["command"] = "floquet-num";
  res.report["chief"] = chief_to_json(cfg.chief);
  if (fr.result.periodic_fit_residual > 1e-3)
    warn(res, "plant Fourier fit residual " + std::to_string(fr.result.periodic_fit_residual) +
                  " is not small: raise n_harmonics or check periodicity");
  res.report["warnings"] = res.warnings;
  write_json(out_path(opts, "floquet.json", res), res.report);
  write_matrix_grid_csv(out_path(opts, "lf_samples.csv", res), fr.result.t, fr.result.lf_samples);
  return res;
}

CommandResult cmd_validate(const RunConfig& cfg0, const CommandOptions& opts) {
  const RunConfig cfg = apply_options(cfg0, opts);
  CommandResult res;
  const ChiefOrbit& chief = cfg.chief;
  const ChiefOrbit eff = regularize_chief(chief);
  Json suites = Json::array();
  auto add = [&](const std::string& name, double residual, double threshold, Json notes) {
    const bool pass = std::isfinite(residual) && residual < threshold;
    suites.push_back(Json{{"suite", name}, {"pass", pass}, {"residual", residual},
                          {"threshold", threshold}, {"notes", std::move(notes)}});
    if (!pass) res.errors.push_back("suite " + name + " failed");
  };
  auto guarded = [&](const std::string& name, const std::function<void()>& f) {
    try {
      f();
    } catch (const Error& e) {
      suites.push_back(Json{{"suite", name}, {"pass", false}, {"error", e.what()}});
      res.errors.push_back("suite " + name + " raised: " + e.what());
    }
  };

  guarded("cross_coordinate", [&] {
    const Mat6 Rq = lti_qns(eff).R;
    const double ec = rel_entry_error(map_lti(g_cartesian(eff, eff.theta0()).entries, Rq), lti_cartesian_closed(eff).R);
    const double es = rel_entry_error(map_lti(g_spherical(eff, eff.theta0()).entries, Rq), lti_spherical_closed(eff).R);
    add("cross_coordinate", std::max(ec, es), 1e-9, Json{{"cartesian", ec}, {"spherical", es}});
  });

  const bool reg = std::abs(shorthand_abc(chief).A) < kAClosedForm || std::abs(chief.q1()) < kQ1Threshold;
  guarded("lf_ode_residual", [&] {
    double r = 0.0;
    for (int k = 0; k < 8; ++k) r = std::max(r, lf_ode_residual(chief, chief.theta0() + 0.7 * k + 0.1));
    add("lf_ode_residual", r, reg ? 1e-5 : 1e-7, Json{{"q1_regularized", std::abs(chief.q1()) < kQ1Threshold}});
  });

  guarded("oracle_propagation", [&] {
    const ModalBasis basis(chief, Domain::Cartesian);
    std::mt19937_64 rng(12345);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const auto grid = uniform_grid(chief.theta0(), chief.theta0() + kTwoPi, 145);
    const PlantFn plant = [&](double th) { return cartesian_plant_theta(chief, th); };
    double worst = 0.0;
    for (int s = 0; s < 5; ++s) {
      Vec6 x0;
      x0 << u(rng), u(rng), u(rng), u(rng) * chief.n(), u(rng) * chief.n(), u(rng) * chief.n();
      const ModalConstants mc = basis.constants(x0);
      const Trajectory lin = propagate_linear_at(plant, IndepVar::Theta, x0, grid);
      double err = 0.0, scale = 0.0;
      for (std::size_t k = 0; k < grid.size(); ++k) {
        err = std::max(err, (basis.reconstruct(mc.c, grid[k]) - lin.x[k]).norm());
        scale = std::max(scale, lin.x[k].norm());
      }
      worst = std::max(worst, err / scale);
    }
    add("oracle_propagation", worst, reg ? 1e-5 : 1e-6, Json{{"states", 5}});
  });

  guarded("singularity", [&] {
    const ModalBasis basis(chief, Domain::Cartesian);
    double r = 0.0;
    for (int k = 0; k < 8; ++k) {
      const double th = chief.theta0() + 0.7 * k + 0.1;
      const Mat6 A = cartesian_plant_theta(chief, th);
      const Mat6 lhs = basis.psi_prime(th);
      const Mat6 rhs = A * basis.psi(th);
      r = std::max(r, (lhs - rhs).norm() / rhs.norm());
    }
    add("singularity", r, reg ? 1e-5 : 1e-7,
        Json{{"regularized_path", basis.regularized()},
             {"q1_regularized", basis.q1_regularized()},
             {"e_sin_f0", shorthand_abc(chief).A},
             {"q1", chief.q1()}});
  });

  guarded("cw_limit", [&] {
    const bool own = chief.e() <= 1e-3;
    const ChiefOrbit c = own ? chief
                             : make_chief(chief.a(), 1e-4, chief.inc(), chief.raan(), chief.argp(),
                                          deg2rad(90.0), chief.mu());
    const auto fam = sweep_bounded_family(c, 1.0, 0.0, {0.0});
    const ModalBasis basis(c, Domain::Cartesian);
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (double th : uniform_grid(c.theta0(), c.theta0() + kTwoPi, 2001)) {
      const Vec6 x = basis.reconstruct(fam.front().constants.c, th);
      xmin = std::min(xmin, x(0));
      xmax = std::max(xmax, x(0));
      ymin = std::min(ymin, x(1));
      ymax = std::max(ymax, x(1));
    }
    const double ratio = (ymax - ymin) / (xmax - xmin);
    add("cw_limit", std::abs(ratio - 2.0) / 2.0, 0.01,
        Json{{"axis_ratio", ratio}, {"e", c.e()}, {"config_chief_used", own}});
  });

  guarded("numeric_vs_analytic", [&] {
    const FloquetRun fr = run_floquet(cfg, "cartesian", 256);
    add("numeric_vs_analytic", fr.lambda_error, 1e-6,
        Json{{"lf_max_error", fr.lf_error}, {"eigenvalue_T", fr.eig_error},
             {"log_exp_relative", fr.result.log_residual}});
  });

  res.report = Json{{"command", "validate"},
                    {"chief", chief_to_json(chief)},
                    {"suites", suites},
                    {"all_pass", res.errors.empty()}};
  write_json(out_path(opts, "validate.json", res), res.report);
  return res;
}

}  // namespace relmodes
