#include "relmodes/io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace relmodes {

namespace {

double get_number(const Json& j, const char* key, double fallback, bool required = false) {
  if (!j.contains(key)) {
    if (required) throw InvalidInput(std::string("config: missing key '") + key + "'");
    return fallback;
  }
  if (!j.at(key).is_number()) throw InvalidInput(std::string("config: '") + key + "' must be a number");
  return j.at(key).get<double>();
}

Vec6 get_vec6(const Json& j, const char* key) {
  const Json& v = j.at(key);
  if (!v.is_array() || v.size() != 6) throw InvalidInput(std::string("config: '") + key + "' must be an array of 6 numbers");
  Vec6 out;
  for (int i = 0; i < 6; ++i) {
    if (!v[static_cast<std::size_t>(i)].is_number())
      throw InvalidInput(std::string("config: '") + key + "' must contain numbers");
    out(i) = v[static_cast<std::size_t>(i)].get<double>();
  }
  return out;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

RunConfig parse_config(const Json& j) {
  RunConfig cfg;
  if (!j.is_object()) throw InvalidInput("config: top level must be an object");
  if (j.contains("chief")) {
    const Json& c = j.at("chief");
    cfg.chief = make_chief(get_number(c, "a_km", 0.0, true), get_number(c, "e", 0.0, true),
                           deg2rad(get_number(c, "i_deg", 0.0)),
                           deg2rad(get_number(c, "raan_deg", 0.0)),
                           deg2rad(get_number(c, "argp_deg", 0.0)),
                           deg2rad(get_number(c, "f0_deg", 0.0)),
                           get_number(c, "mu_km3_s2", kMuEarth));
  }
  if (j.contains("representation")) cfg.rep = parse_domain(j.at("representation").get<std::string>());
  if (j.contains("state0")) cfg.state0 = get_vec6(j, "state0");
  if (j.contains("qns_diff")) cfg.qns_diff = get_vec6(j, "qns_diff");
  if (j.contains("constants")) cfg.constants = get_vec6(j, "constants");
  if (j.contains("classical_diff")) {
    const Json& d = j.at("classical_diff");
    ClassicalDiff cd;
    cd.da_km = get_number(d, "da_km", 0.0);
    cd.de = get_number(d, "de", 0.0);
    cd.di_deg = get_number(d, "di_deg", 0.0);
    cd.draan_deg = get_number(d, "draan_deg", 0.0);
    cd.dargp_deg = get_number(d, "dargp_deg", 0.0);
    cd.df0_deg = get_number(d, "df0_deg", 0.0);
    cfg.classical_diff = cd;
  }
  cfg.periods = get_number(j, "periods", cfg.periods);
  if (!(cfg.periods > 0.0)) throw InvalidInput("config: 'periods' must be positive");
  cfg.steps_per_period = static_cast<int>(get_number(j, "steps_per_period", cfg.steps_per_period));
  if (cfg.steps_per_period < 2) throw InvalidInput("config: 'steps_per_period' must be at least 2");
  if (j.contains("sweep")) {
    const Json& s = j.at("sweep");
    cfg.sweep_x0 = get_number(s, "x0_km", 0.0);
    cfg.sweep_y0 = get_number(s, "y0_km", 0.0);
    if (s.contains("xdot0_km_s")) {
      for (const auto& v : s.at("xdot0_km_s")) {
        if (!v.is_number()) throw InvalidInput("config: 'xdot0_km_s' must contain numbers");
        cfg.sweep_xdot0.push_back(v.get<double>());
      }
    }
  }
  if (j.contains("floquet")) {
    const Json& f = j.at("floquet");
    if (f.contains("plant")) cfg.plant = f.at("plant").get<std::string>();
    cfg.n_samples = static_cast<int>(get_number(f, "n_samples", cfg.n_samples));
    cfg.n_harmonics = static_cast<int>(get_number(f, "n_harmonics", cfg.n_harmonics));
  }
  if (cfg.plant != "cw" && cfg.plant != "cartesian" && cfg.plant != "qns")
    throw InvalidInput("config: plant must be one of cw, cartesian, qns (got '" + cfg.plant + "')");
  cfg.tol = get_number(j, "tol", cfg.tol);
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open config file '" + path + "'");
  Json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput("config '" + path + "' is not valid JSON: " + e.what());
  }
  try {
    return parse_config(j);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput("config '" + path + "': " + e.what());
  }
}

Vec6 qns_from_classical(const ChiefOrbit& chief, const ClassicalDiff& d) {
  const double w = chief.argp();
  const double e = chief.e();
  const double dw = deg2rad(d.dargp_deg);
  Vec6 q;
  q << d.da_km, dw + deg2rad(d.df0_deg), deg2rad(d.di_deg),
      d.de * std::cos(w) - e * std::sin(w) * dw, d.de * std::sin(w) + e * std::cos(w) * dw,
      deg2rad(d.draan_deg);
  return q;
}

Vec6 initial_state(const RunConfig& cfg, Domain domain) {
  const ChiefOrbit& c = cfg.chief;
  const double th0 = c.theta0();
  if (cfg.state0) {
    const Vec6& x = *cfg.state0;
    switch (domain) {
      case Domain::Cartesian: return x;
      case Domain::Spherical: return cart_sph_linear_at(c, th0) * x;
      case Domain::Qns: return g_inverse(g_cartesian(c, th0)) * x;
    }
  }
  std::optional<Vec6> q = cfg.qns_diff;
  if (!q && cfg.classical_diff) q = qns_from_classical(c, *cfg.classical_diff);
  if (!q) throw InvalidInput("config gives no initial state (state0, qns_diff or classical_diff)");
  return g_for_domain(c, th0, domain).entries * *q;
}

std::vector<std::string> state_labels(Domain domain) {
  switch (domain) {
    case Domain::Cartesian: return {"x_km", "y_km", "z_km", "xdot_km_s", "ydot_km_s", "zdot_km_s"};
    case Domain::Spherical:
      return {"dr_km", "theta_r_rad", "phi_r_rad", "drdot_km_s", "theta_r_dot_rad_s", "phi_r_dot_rad_s"};
    case Domain::Qns: return {"da_km", "dtheta_rad", "di_rad", "dq1", "dq2", "draan_rad"};
  }
  return {};
}

void write_curves_csv(const std::string& path, const std::vector<CsvCurve>& curves,
                      Domain domain) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write '" + path + "'");
  out << "theta_rad,t_s";
  for (const auto& l : state_labels(domain)) out << ',' << l;
  out << ",mode\n";
  for (const auto& c : curves) {
    if (c.theta.size() != c.x.size() || c.t.size() != c.x.size())
      throw InvalidInput("curve columns have different lengths");
    for (std::size_t k = 0; k < c.x.size(); ++k) {
      out << fmt(c.theta[k]) << ',' << fmt(c.t[k]);
      for (int i = 0; i < 6; ++i) out << ',' << fmt(c.x[k](i));
      out << ',' << c.label << '\n';
    }
  }
  if (!out) throw InvalidInput("write failed for '" + path + "'");
}

void write_curve_csv(const std::string& path, const CsvCurve& curve, Domain domain) {
  write_curves_csv(path, {curve}, domain);
}

std::vector<CsvCurve> read_curves_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw InvalidInput("'" + path + "' is empty");
  std::vector<CsvCurve> curves;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 9) throw InvalidInput("'" + path + "' row " + std::to_string(row) + ": expected 9 columns");
    double v[8];
    try {
      for (int i = 0; i < 8; ++i) v[i] = std::stod(cells[static_cast<std::size_t>(i)]);
    } catch (const std::exception&) {
      throw InvalidInput("'" + path + "' row " + std::to_string(row) + ": not a number");
    }
    const std::string& label = cells[8];
    auto it = std::find_if(curves.begin(), curves.end(), [&](const CsvCurve& c) { return c.label == label; });
    if (it == curves.end()) {
      curves.push_back(CsvCurve{label, {}, {}, {}});
      it = curves.end() - 1;
    }
    it->theta.push_back(v[0]);
    it->t.push_back(v[1]);
    it->x.emplace_back(Vec6(v[2], v[3], v[4], v[5], v[6], v[7]));
  }
  return curves;
}

void write_matrix_grid_csv(const std::string& path, const std::vector<double>& t,
                           const std::vector<Mat6>& samples) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write '" + path + "'");
  out << "t";
  for (int i = 1; i <= 6; ++i)
    for (int j = 1; j <= 6; ++j) out << ",P" << i << j;
  out << '\n';
  for (std::size_t k = 0; k < samples.size(); ++k) {
    out << fmt(t[k]);
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j) out << ',' << fmt(samples[k](i, j));
    out << '\n';
  }
}

Json to_json(const MatX& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json r = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) r.push_back(m(i, j));
    rows.push_back(r);
  }
  return rows;
}

Json to_json(const CMatX& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json r = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) r.push_back(to_json(m(i, j)));
    rows.push_back(r);
  }
  return rows;
}

Json to_json(const Vec6& v) { return Json(std::vector<double>(v.data(), v.data() + 6)); }

Json to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

Json chief_to_json(const ChiefOrbit& chief) {
  return Json{{"a_km", chief.a()},
              {"e", chief.e()},
              {"i_deg", rad2deg(chief.inc())},
              {"raan_deg", rad2deg(chief.raan())},
              {"argp_deg", rad2deg(chief.argp())},
              {"f0_deg", rad2deg(chief.f0())},
              {"theta0_rad", chief.theta0()},
              {"q1", chief.q1()},
              {"q2", chief.q2()},
              {"mu_km3_s2", chief.mu()},
              {"period_s", chief.period()},
              {"mean_motion_rad_s", chief.n()}};
}

void write_json(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write '" + path + "'");
  out << std::setw(2) << j << '\n';
}

}  // namespace relmodes
