// Run configuration (JSON), CSV trajectory files and JSON helpers.
#pragma once

#include "relmodes/analytic_floquet.hpp"
#include "relmodes/matrix_functions.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace relmodes {

using Json = nlohmann::json;

/// Classical element differences as read from a config (angles in degrees).
struct ClassicalDiff {
  double da_km = 0.0, de = 0.0, di_deg = 0.0, draan_deg = 0.0, dargp_deg = 0.0, df0_deg = 0.0;
};

/// Everything a CLI command may need. Angles are degrees only at the file boundary.
struct RunConfig {
  ChiefOrbit chief = make_chief(26600.0, 0.74, deg2rad(63.4), 0.0, deg2rad(270.0), deg2rad(90.0));
  Domain rep = Domain::Cartesian;

  std::optional<Vec6> state0;     ///< Cartesian LVLH state [km, km/s]
  std::optional<Vec6> qns_diff;   ///< (da, dtheta, di, dq1, dq2, draan) [km, rad]
  std::optional<ClassicalDiff> classical_diff;
  std::optional<Vec6> constants;  ///< modal constants in `rep`

  double periods = 1.0;
  int steps_per_period = 720;

  double sweep_x0 = 0.0, sweep_y0 = 0.0;
  std::vector<double> sweep_xdot0;

  std::string plant = "cartesian";  ///< floquet-num: cw | cartesian | qns
  int n_samples = 1024;
  int n_harmonics = 32;

  double tol = 1e-9;
};

/// Reads "chief" {a_km, e, i_deg, raan_deg, argp_deg, f0_deg, mu_km3_s2?} and the
/// optional command fields. Throws InvalidInput with the offending key.
RunConfig parse_config(const Json& j);
RunConfig load_config(const std::string& path);

/// QNS differences from classical ones at the chief epoch.
Vec6 qns_from_classical(const ChiefOrbit& chief, const ClassicalDiff& d);

/// Initial relative state of the config in `domain` (from state0, qns_diff or
/// classical_diff, in that order). Throws InvalidInput when none is given.
Vec6 initial_state(const RunConfig& cfg, Domain domain);

/// Column names of the six state components in `domain`.
std::vector<std::string> state_labels(Domain domain);

struct CsvCurve {
  std::string label;  ///< mode index or "sum"
  std::vector<double> theta;
  std::vector<double> t;
  std::vector<Vec6> x;
};

/// Columns theta, t_s, six states, mode. Full double precision.
void write_curve_csv(const std::string& path, const CsvCurve& curve, Domain domain);
void write_curves_csv(const std::string& path, const std::vector<CsvCurve>& curves,
                      Domain domain);
/// Groups rows by the mode column, in order of first appearance.
std::vector<CsvCurve> read_curves_csv(const std::string& path);

/// Samples P(t) as rows t_s followed by the 36 entries in row-major order.
void write_matrix_grid_csv(const std::string& path, const std::vector<double>& t,
                           const std::vector<Mat6>& samples);

Json to_json(const MatX& m);   ///< row-major array of rows
Json to_json(const CMatX& m);  ///< row-major, entries [re, im]
Json to_json(const Vec6& v);
Json to_json(Complex z);
Json chief_to_json(const ChiefOrbit& chief);

void write_json(const std::string& path, const Json& j);

}  // namespace relmodes
