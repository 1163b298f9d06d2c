#include "relmodes/commands.hpp"
#include "doctest_support.hpp"

#include <filesystem>
#include <fstream>

using namespace relmodes;
using relmodes::testing::rapprox;

namespace fs = std::filesystem;

namespace {

std::string scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("relmodes_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p.string();
}

Json molniya_config() {
  return Json::parse(R"({
    "chief": {"a_km": 26600, "e": 0.74, "i_deg": 63.4, "raan_deg": 0, "argp_deg": 270, "f0_deg": 90},
    "classical_diff": {"de": 0.002, "di_deg": 0.2},
    "periods": 1,
    "steps_per_period": 180
  })");
}

}  // namespace

TEST_CASE("config parsing") {
  const RunConfig cfg = parse_config(molniya_config());
  CHECK(cfg.chief.a() == 26600.0);
  CHECK(cfg.chief.inc() == rapprox(deg2rad(63.4)));
  CHECK(cfg.classical_diff.has_value());
  CHECK(cfg.steps_per_period == 180);
  CHECK(cfg.rep == Domain::Cartesian);

  const Vec6 q = qns_from_classical(cfg.chief, *cfg.classical_diff);
  // argp = 270 deg: dq1 = de cos w, dq2 = de sin w
  CHECK(std::abs(q(3)) < 1e-15);
  CHECK(q(4) == rapprox(-0.002));
  CHECK(q(2) == rapprox(deg2rad(0.2)));

  Json bad = molniya_config();
  bad["chief"].erase("a_km");
  CHECK_THROWS_AS(parse_config(bad), InvalidInput);
  bad = molniya_config();
  bad["chief"]["e"] = 1.2;
  CHECK_THROWS_AS(parse_config(bad), InvalidInput);
  bad = molniya_config();
  bad["state0"] = Json::array({1, 2, 3});
  CHECK_THROWS_AS(parse_config(bad), InvalidInput);
  bad = molniya_config();
  bad["periods"] = -1;
  CHECK_THROWS_AS(parse_config(bad), InvalidInput);
  bad = molniya_config();
  bad["floquet"] = Json{{"plant", "j2"}};
  CHECK_THROWS_AS(parse_config(bad), InvalidInput);
  CHECK_THROWS_AS(parse_config(Json::array()), InvalidInput);
  CHECK_THROWS_AS(load_config("/nonexistent/relmodes.json"), InvalidInput);

  RunConfig none = parse_config(Json::parse(R"({"periods": 2})"));
  CHECK_THROWS_AS(initial_state(none, Domain::Cartesian), InvalidInput);
}

TEST_CASE("initial state in every domain") {
  RunConfig cfg = parse_config(molniya_config());
  const Vec6 xq = initial_state(cfg, Domain::Qns);
  const Vec6 xc = initial_state(cfg, Domain::Cartesian);
  const Vec6 xs = initial_state(cfg, Domain::Spherical);
  const double th0 = cfg.chief.theta0();
  CHECK(relmodes::testing::rel_max(xc, Vec6(g_cartesian(cfg.chief, th0).entries * xq)) < 1e-14);
  CHECK(relmodes::testing::rel_max(xs, Vec6(cart_sph_linear_at(cfg.chief, th0) * xc)) < 1e-10);

  cfg.classical_diff.reset();
  cfg.state0 = xc;
  CHECK(relmodes::testing::rel_max(initial_state(cfg, Domain::Qns), xq) < 1e-9);
}

TEST_CASE("CSV curves keep full precision") {
  const std::string dir = scratch_dir("csv");
  CsvCurve a{"1", {0.0, 0.1}, {0.0, 12.5}, {Vec6::Constant(1.0 / 3.0), Vec6::Constant(-2.0e-7)}};
  CsvCurve b{"sum", {0.0}, {0.0}, {Vec6::LinSpaced(6, 1.0, 6.0)}};
  const std::string path = dir + "/c.csv";
  write_curves_csv(path, {a, b}, Domain::Spherical);
  const auto back = read_curves_csv(path);
  REQUIRE(back.size() == 2);
  CHECK(back[0].label == "1");
  CHECK(back[1].label == "sum");
  CHECK(back[0].x[0] == a.x[0]);
  CHECK(back[0].x[1] == a.x[1]);
  CHECK(back[0].t[1] == 12.5);
  CHECK(back[1].x[0] == b.x[0]);

  std::ofstream(dir + "/bad.csv") << "theta,t_s,a,b\n1,2,3,4\n";
  CHECK_THROWS_AS(read_curves_csv(dir + "/bad.csv"), InvalidInput);
  CHECK_THROWS_AS(read_curves_csv(dir + "/missing.csv"), InvalidInput);
  CHECK(state_labels(Domain::Cartesian).size() == 6);
}

TEST_CASE("modes command") {
  CommandOptions opts;
  opts.out_dir = scratch_dir("modes");
  const CommandResult r = cmd_modes(parse_config(molniya_config()), opts);
  CHECK(r.exit_code() == 0);
  for (int i = 1; i <= 6; ++i) CHECK(fs::exists(opts.out_dir + "/mode_" + std::to_string(i) + ".csv"));
  CHECK(fs::exists(opts.out_dir + "/modes.json"));
  const auto& part = r.report.at("plane_partition");
  // normalized modes: leakage across the plane partition is roundoff only
  for (const char* k : {"1", "3", "5", "6"})
    CHECK(part.at(k).at("max_out_of_plane").get<double>() < 1e-13);
  for (const char* k : {"2", "4"}) CHECK(part.at(k).at("max_in_plane").get<double>() < 1e-13);
  CHECK(r.report.at("drift_mode_periods").get<double>() == 3.0);

  const auto m6 = read_curves_csv(opts.out_dir + "/mode_6.csv");
  const auto m1 = read_curves_csv(opts.out_dir + "/mode_1.csv");
  CHECK(m6.front().theta.back() - m6.front().theta.front() == rapprox(3.0 * kTwoPi).epsilon(1e-12));
  CHECK(m1.front().theta.back() - m1.front().theta.front() == rapprox(kTwoPi).epsilon(1e-12));
  double peak = 0.0;
  for (const auto& x : m1.front().x) peak = std::max(peak, x.head<3>().norm());
  CHECK(peak == rapprox(1.0));
}

TEST_CASE("decompose command") {
  CommandOptions opts;
  opts.out_dir = scratch_dir("decompose");
  const CommandResult r = cmd_decompose(parse_config(molniya_config()), opts);
  CHECK(r.exit_code() == 0);
  CHECK_FALSE(r.report.at("drifting").get<bool>());
  CHECK(r.report.at("csv_roundtrip_constants_rel_error").get<double>() < 1e-8);
  CHECK(r.report.at("out_of_plane_not_in_modes_2_4").get<double>() <
        1e-12 * r.report.at("out_of_plane_max").get<double>());
  const auto parts = read_curves_csv(opts.out_dir + "/modes_contributions.csv");
  REQUIRE(parts.size() == 7);
  CHECK(parts.back().label == "sum");
  const auto traj = read_curves_csv(opts.out_dir + "/trajectory.csv");
  double err = 0.0, scale = 0.0;
  for (std::size_t k = 0; k < traj.front().x.size(); ++k) {
    Vec6 s = Vec6::Zero();
    for (int i = 0; i < 6; ++i) s += parts[i].x[k];
    err = std::max(err, (s - traj.front().x[k]).norm());
    scale = std::max(scale, traj.front().x[k].norm());
  }
  CHECK(err < 1e-9 * scale);

  Json drifting = molniya_config();
  drifting["classical_diff"]["da_km"] = 0.1;
  const CommandResult rd = cmd_decompose(parse_config(drifting), opts);
  CHECK(rd.report.at("drifting").get<bool>());
  CHECK_FALSE(rd.warnings.empty());
}

TEST_CASE("reconstruct command agrees with linear propagation") {
  CommandOptions opts;
  opts.out_dir = scratch_dir("reconstruct");
  for (Domain d : {Domain::Cartesian, Domain::Qns}) {
    opts.rep = d;
    const CommandResult r = cmd_reconstruct(parse_config(molniya_config()), opts);
    CHECK(r.report.at("linear_propagation_rel_error").get<double>() < 1e-6);
  }
}

TEST_CASE("sweep command") {
  Json j = molniya_config();
  j["sweep"] = Json{{"x0_km", 0.0}, {"y0_km", 1.0}, {"xdot0_km_s", Json::array({-1e-4, 0.0, 1e-4})}};
  CommandOptions opts;
  opts.out_dir = scratch_dir("sweep");
  const CommandResult r = cmd_sweep(parse_config(j), opts);
  const auto& members = r.report.at("members");
  REQUIRE(members.size() == 3);
  for (const auto& m : members) {
    CHECK(std::abs(m.at("c6").get<double>()) < 1e-12);
    CHECK(m.at("anchor_error_km").get<double>() < 1e-9);
    CHECK(m.at("closure_rel_error").get<double>() < 1e-8);
  }
  j["sweep"]["xdot0_km_s"] = Json::array();
  CHECK_THROWS_AS(cmd_sweep(parse_config(j), opts), InvalidInput);
}

TEST_CASE("numeric Floquet command on the CW plant") {
  Json j = molniya_config();
  j["chief"]["e"] = 0.0;
  j["floquet"] = Json{{"plant", "cw"}, {"n_samples", 64}, {"n_harmonics", 16}};
  CommandOptions opts;
  opts.out_dir = scratch_dir("floquet");
  const CommandResult r = cmd_floquet_numeric(parse_config(j), opts);
  CHECK(r.exit_code() == 0);
  CHECK(r.report.at("comparison").at("Lambda_rel_error").get<double>() < 1e-8);
  CHECK(fs::exists(opts.out_dir + "/lf_samples.csv"));
  CHECK(r.report.at("eigenvalues").size() == 6);
}

TEST_CASE("validate command") {
  CommandOptions opts;
  opts.out_dir = scratch_dir("validate");
  const CommandResult r = cmd_validate(parse_config(molniya_config()), opts);
  CHECK(r.exit_code() == 0);
  CHECK(r.report.at("all_pass").get<bool>());
  CHECK(r.report.at("suites").size() == 6);

  Json sing = molniya_config();
  sing["chief"]["f0_deg"] = 0.0;
  sing["chief"]["argp_deg"] = 90.0;
  const CommandResult rs = cmd_validate(parse_config(sing), opts);
  CHECK(rs.exit_code() == 0);
  bool seen = false;
  for (const auto& s : rs.report.at("suites"))
    if (s.at("suite") == "singularity") {
      seen = true;
      CHECK(s.at("notes").at("regularized_path").get<bool>());
    }
  CHECK(seen);
}
