#include "relmodes/analytic_floquet.hpp"
#include "relmodes/linear_dynamics.hpp"
#include "relmodes/matrix_functions.hpp"
#include "doctest_support.hpp"

using namespace relmodes;
using relmodes::testing::rapprox;
using relmodes::testing::molniya;
using relmodes::testing::random_chief;
using relmodes::testing::rel_max;

namespace {

int numeric_rank(const Mat6& M) {
  Eigen::FullPivLU<Mat6> lu(M);
  lu.setThreshold(1e-10);
  return static_cast<int>(lu.rank());
}

// Velocity rows and columns rescaled by the mean motion so all entries share units.
Mat6 unit_scaled(const Mat6& M, double n) {
  Vec6 s;
  s << 1, 1, 1, 1 / n, 1 / n, 1 / n;
  return s.asDiagonal() * M * s.cwiseInverse().asDiagonal();
}

}  // namespace

TEST_CASE("QNS LF transform structure") {
  const ChiefOrbit c = make_chief(9000.0, 0.4, 0.9, 0.2, 1.0, 0.6);
  const double th0 = c.theta0();
  CHECK((lf_qns(c, th0) - Mat6::Identity()).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((lf_qns(c, th0, IndepVar::Time) - Mat6::Identity()).cwiseAbs().maxCoeff() < 1e-12);
  const double k0 = eval_at_theta(c, th0).kappa;
  for (double th : {0.2, 1.5, 3.3, 5.9, 9.0, -4.0}) {
    const Mat6 P = lf_qns(c, th);
    const double k = eval_at_theta(c, th).kappa;
    CHECK(P(1, 1) == rapprox(k * k / (k0 * k0)).epsilon(1e-13));
    for (int i = 0; i < 6; ++i) {
      if (i == 1) continue;
      Vec6 e = Vec6::Zero();
      e(i) = 1.0;
      CHECK((P.row(i).transpose() - e).norm() == 0.0);
    }
    CHECK(rel_max(P, lf_qns(c, th + kTwoPi)) < 1e-10);
    const Mat6 Pt = lf_qns(c, th, IndepVar::Time);
    CHECK(Pt(1, 0) == 0.0);
    Mat6 diff = Pt - P;
    diff(1, 0) = 0.0;
    CHECK(diff.norm() == 0.0);
    CHECK(P(1, 0) == rapprox(p21_mean_anomaly(c, th)).epsilon(1e-12));
  }

  const ChiefOrbit c0 = make_chief(7000.0, 0.0, 0.5, 0, 0, 0.4);
  for (double th : {0.4, 2.0, 4.0}) CHECK(lf_qns(c0, th)(1, 1) == rapprox(1.0));
  CHECK(rel_max(lf_qns(c0, c0.theta0() + kTwoPi), lf_qns(c0, c0.theta0())) < 1e-12);
}

TEST_CASE("cancellation-free and printed P21/P25 agree") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-6.0, 12.0);
  for (int k = 0; k < 50; ++k) {
    const ChiefOrbit c = random_chief(rng, 0.05, 0.9);
    if (std::abs(c.q1()) < 1e-2) continue;
    const double th = u(rng);
    CHECK(rel_max(lf_qns(c, th), lf_qns_printed(c, th)) < 1e-8);
  }
  CHECK_THROWS_AS(lf_qns_printed(molniya().with_q(0.0, -0.74), 0.5), SingularConfiguration);
}

TEST_CASE("QNS LF defining ODE residual") {
  std::mt19937_64 rng(32);
  std::uniform_real_distribution<double> u(0.0, kTwoPi);
  const ChiefOrbit c = make_chief(12000.0, 0.6, 1.0, 0.3, 0.8, 1.1);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) worst = std::max(worst, lf_ode_residual(c, u(rng)));
  CHECK(worst < 1e-8);

  bool reg = false;
  lf_qns(molniya(), 1.0, IndepVar::Theta, &reg);
  CHECK(reg);
  CHECK(lf_qns_transform(molniya()).regularized);
  CHECK(lf_ode_residual(molniya(), 1.0) < 1e-7);
}

TEST_CASE("QNS LTI matrix") {
  const ChiefOrbit m = molniya();
  const LtiSystem q = lti_qns(m, IndepVar::Time);
  CHECK(q.R(1, 0) == rapprox(-2.70e-8).epsilon(2e-3));
  CHECK(q.R(1, 0) == rapprox(m.n() * r21(m)).epsilon(1e-15));
  CHECK(q.R.cwiseAbs().sum() == rapprox(std::abs(q.R(1, 0))));

  const ChiefOrbit c0 = make_chief(7000.0, 0.0, 0.5, 0, 0, 0);
  CHECK(lti_qns(c0, IndepVar::Time).R(1, 0) == rapprox(-3 * c0.n() / (2 * c0.a())));

  const Mat6 R = lti_qns(m).R;
  CHECK((R * R).norm() == 0.0);
  const Mat6 M = expm(kTwoPi * R);
  CHECK(rel_max(M, (Mat6::Identity() + kTwoPi * R).eval()) < 1e-15);
}

TEST_CASE("delta theta solution") {
  const ChiefOrbit c = make_chief(10000.0, 0.3, 0.7, 0.1, 0.5, 0.9);
  const double th0 = c.theta0();
  for (double th : {th0 + 0.5, th0 + 3.0})
    CHECK(delta_theta_solution(c, th, theta_to_time(c, th), 0.0, 1e-4, 0.0, 0.0) ==
          rapprox(lf_qns(c, th)(1, 1) * 1e-4));

  Vec6 doe;
  doe << 0.2, 1e-4, 2e-4, -3e-4, 5e-5, 1e-4;
  const auto grid = uniform_grid(th0, th0 + kTwoPi, 25);
  const Trajectory tr = propagate_linear_at([&](double s) { return qns_plant_theta(c, s).entries; },
                                            IndepVar::Theta, doe, grid);
  double worst = 0.0, scale = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double dth = delta_theta_solution(c, grid[k], theta_to_time(c, grid[k]), doe(0), doe(1), doe(3), doe(4));
    worst = std::max(worst, std::abs(dth - tr.x[k](1)));
    scale = std::max(scale, std::abs(tr.x[k](1)));
    const Mat6 P = lf_qns(c, grid[k]);
    const Vec6 via_lf = P * (Mat6::Identity() + (grid[k] - th0) * lti_qns(c).R) * doe;
    CHECK(std::abs(via_lf(1) - dth) < 1e-12 * scale + 1e-18);
  }
  CHECK(worst / scale < 1e-9);

  // secular growth is linear in time
  const double d1 = delta_theta_solution(c, th0 + kTwoPi, c.period(), 0.1, 0, 0, 0);
  const double d2 = delta_theta_solution(c, th0 + 2 * kTwoPi, 2 * c.period(), 0.1, 0, 0, 0);
  CHECK(d2 == rapprox(2 * d1).epsilon(1e-12));
  CHECK(std::abs(d1) > 0.0);
}

TEST_CASE("cross-coordinate LTI mapping") {
  const Mat6 R = lti_qns(molniya()).R;
  CHECK((map_lti(Mat6::Identity(), R) - R).norm() == 0.0);
  CHECK_THROWS_AS(map_lti(Mat6::Zero(), R), NearSingular);

  std::mt19937_64 rng(33);
  for (int k = 0; k < 100; ++k) {
    const ChiefOrbit c = random_chief(rng);
    const Mat6 Rq = lti_qns(c).R;
    const Mat6 Rc = map_lti(g_cartesian(c, c.theta0()).entries, Rq);
    const Mat6 Rs = map_lti(g_spherical(c, c.theta0()).entries, Rq);
    REQUIRE(rel_max(Rc, lti_cartesian_closed(c).R) < 1e-9);
    REQUIRE(rel_max(Rs, lti_spherical_closed(c).R) < 1e-9);
    for (const Mat6& M : {Rc, Rs}) {
      const Mat6 Ms = unit_scaled(M, c.n());
      CHECK(numeric_rank(Ms) == 1);
      CHECK((Ms * Ms).cwiseAbs().maxCoeff() < 1e-10 * Ms.cwiseAbs().maxCoeff() * Ms.cwiseAbs().maxCoeff());
    }
  }
}

TEST_CASE("closed-form LTI matrices") {
  std::mt19937_64 rng(34);
  for (int k = 0; k < 50; ++k) {
    const ChiefOrbit c = random_chief(rng);
    const Shorthands s = shorthand_abc(c);
    CHECK(alpha_scale(c) == rapprox(3 * (s.B + 1) * (s.B + 1) / std::pow(1 - s.A * s.A - s.B * s.B, 2.5)).epsilon(1e-12));
    for (const LtiSystem& sys : {lti_cartesian_closed(c), lti_spherical_closed(c)}) {
      for (int i : {2, 5}) {
        CHECK(sys.R.col(i).norm() == 0.0);
        CHECK(sys.R.row(i).norm() == 0.0);
      }
      const Mat6 Rs = unit_scaled(sys.R, c.n());
      CHECK((Rs * Rs).cwiseAbs().maxCoeff() < 1e-12 * Rs.squaredNorm());
      // Jordan relations R V = V J
      const Mat6 res = sys.R * sys.V - sys.V * sys.J;
      for (int j = 0; j < 6; ++j)
        CHECK(res.col(j).norm() <= 1e-10 * (sys.R.norm() * sys.V.col(j).norm() + sys.V.col(std::max(j - 1, 0)).norm()));
      CHECK(std::abs(sys.V.determinant()) > 0.0);
    }
    const Mat6 Rsph = lti_spherical_closed(c).R;
    const double ga = s.gamma * c.a();
    const Vec6 f1 = Rsph.col(0) * s.C / (s.B + 2);
    const Vec6 f4 = Rsph.col(3) / s.A;
    const Vec6 f5 = Rsph.col(4) / ga;
    CHECK(rel_max(f4, f1) < 1e-12);
    CHECK(rel_max(f5, f1) < 1e-12);
  }

  const ChiefOrbit tiny = regularize_chief(make_chief(7000.0, 1e-9, 0.5, 0, 0.3, 0.2));
  const Mat6 Rt = unit_scaled(lti_cartesian_closed(tiny).R, tiny.n());
  CHECK((Rt * Rt).cwiseAbs().maxCoeff() < 1e-10 * Rt.squaredNorm());
}

TEST_CASE("printed eigenvectors") {
  const ChiefOrbit m = molniya();
  CHECK(std::abs(shorthand_abc(m).A) == rapprox(0.74));
  for (Domain d : {Domain::Cartesian, Domain::Spherical}) {
    const Mat6 V = eigvecs_closed(m, d);
    CHECK(V.allFinite());
    Vec6 e3 = Vec6::Zero(), e6 = Vec6::Zero();
    e3(2) = 1;
    e6(5) = 1;
    CHECK((V.col(1) - e3).norm() == 0.0);
    CHECK((V.col(3) - e6).norm() == 0.0);
  }
  const ChiefOrbit sing = make_chief(26600.0, 0.74, 1.1, 0, 0.5, 0.0);
  CHECK_THROWS_AS(eigvecs_closed(sing, Domain::Cartesian), SingularConfiguration);
  bool changed = false;
  const ChiefOrbit r = regularize_chief(sing, &changed);
  CHECK(changed);
  CHECK(std::abs(shorthand_abc(r).A) >= kASingular);
  CHECK(std::abs(r.e() - 0.74) < 1e-7);
  CHECK_NOTHROW(eigvecs_closed(r, Domain::Cartesian));
  const Mat6 Vq = eigvecs_for_domain(m, Domain::Qns);
  CHECK(rel_max((g_cartesian(m, m.theta0()).entries * Vq).eval(), eigvecs_closed(m, Domain::Cartesian)) < 1e-12);
}

TEST_CASE("modal constants") {
  std::mt19937_64 rng(35);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int k = 0; k < 100; ++k) {
    const ChiefOrbit c = random_chief(rng);
    for (Domain d : {Domain::Cartesian, Domain::Spherical}) {
      Vec6 doe;
      doe << u(rng), 1e-4 * u(rng), 1e-4 * u(rng), 1e-4 * u(rng), 1e-4 * u(rng), 1e-4 * u(rng);
      const Vec6 x = g_for_domain(c, c.theta0(), d).entries * doe;
      const ModalConstants mc = modal_constants(c, x, d);
      CHECK_FALSE(mc.regularized);
      CHECK_FALSE(mc.numeric_fallback);
      const Mat6 V = eigvecs_closed(c, d);
      CHECK(rel_max((V * mc.c).eval(), x) < 1e-10);
      const Vec6 cn = balanced_solve(V, x);
      CHECK((cn - mc.c).norm() < 1e-9 * mc.c.norm());
      // linearity
      Vec6 y;
      y << u(rng), u(rng), u(rng), 1e-4 * u(rng), 1e-4 * u(rng), 1e-4 * u(rng);
      if (d == Domain::Spherical) y.segment<2>(1) *= 1e-4, y.tail<2>() *= 1e-4;
      const Vec6 lin = modal_constants(c, 2.0 * x - 3.0 * y, d).c;
      const Vec6 sep = 2.0 * mc.c - 3.0 * modal_constants(c, y, d).c;
      CHECK((lin - sep).norm() <= 1e-12 * (2 * mc.c.norm() + 3 * modal_constants(c, y, d).c.norm()));
    }
  }

  // circular limit of the drift constant
  const ChiefOrbit c0 = make_chief(7000.0, 0.0, 0.5, 0, 0, 0.3);
  Vec6 x0;
  x0 << 0.3, -0.2, 0.1, 2e-4, -1e-4, 5e-5;
  const ModalConstants m0 = modal_constants(c0, x0, Domain::Cartesian);
  CHECK(m0.regularized);
  CHECK(m0.c(5) == rapprox(2 * c0.n() * x0(0) + x0(4)).epsilon(1e-12));
  const ChiefOrbit c1 = make_chief(7000.0, 1e-7, 0.5, 0, 0.4, 1.0);
  CHECK(drift_constant(c1, x0, Domain::Cartesian) == rapprox(2 * c1.n() * x0(0) + x0(4)).epsilon(1e-6));

  // no drift without a semimajor-axis difference
  const ChiefOrbit m = molniya();
  Vec6 doe;
  doe << 0.0, 1e-4, 3e-4, -2e-4, 1e-4, 2e-4;
  for (Domain d : {Domain::Cartesian, Domain::Spherical}) {
    const Vec6 x = g_for_domain(m, m.theta0(), d).entries * doe;
    CHECK(std::abs(drift_constant(m, x, d)) < 1e-14 * x.cwiseAbs().maxCoeff() * 10);
  }
  Vec6 qonly = Vec6::Zero();
  qonly(1) = 1e-4;
  CHECK(std::abs(modal_constants(m, g_spherical(m, m.theta0()).entries * qonly, Domain::Spherical).c(5)) < 1e-15);
}

TEST_CASE("planar CW modal decomposition") {
  const double n = 1.2e-3;
  CwModal a = cw_modal_decomp(n, Vec4(0, 1, 0, 0));
  CHECK(a.c1 == rapprox(1.0));
  CHECK(a.c2 == 0.0);
  CHECK(a.cR == 0.0);
  CHECK(a.cI == 0.0);
  CwModal b = cw_modal_decomp(n, Vec4(1, 0, 0, 0));
  CHECK(b.c1 == 0.0);
  CHECK(b.c2 == rapprox(-6 * n));
  CHECK(b.cR == rapprox(3 * n));
  CHECK(b.cI == 0.0);

  const Vec4 x0(0.2, -0.4, 3e-4, -2e-4);
  const CwModal c = cw_modal_decomp(n, x0);
  for (double t : {0.0, 500.0, 4000.0, 20000.0}) {
    const Vec4 ref = cw_stm_planar(n, t) * x0;
    CHECK((c.state(t) - ref).norm() < 1e-10 * ref.norm());
    Vec4 sum = Vec4::Zero();
    for (int k = 1; k <= 4; ++k) sum += c.mode(k, t);
    CHECK((sum - c.state(t)).norm() < 1e-14 * ref.norm());
  }

  // bounded iff ydot0 = -2 n x0
  const Vec4 bnd(0.3, 0.1, 1e-4, -2 * n * 0.3);
  const CwModal cb = cw_modal_decomp(n, bnd);
  CHECK(std::abs(cb.c2) < 1e-18);
  CHECK((cb.state(kTwoPi / n) - bnd).norm() < 1e-12);
  CHECK((c.state(kTwoPi / n) - x0).norm() > 1e-3);

  Eigen::Matrix<Complex, 4, 4> V = cw_eigvecs(n);
  Eigen::Matrix<Complex, 4, 4> A = cw_planar_plant(n).cast<Complex>();
  CHECK((A * V.col(0)).norm() < 1e-15);
  CHECK((A * V.col(2) - Complex(0, n) * V.col(2)).norm() < 1e-15);
  CHECK((A * V.col(3) - Complex(0, -n) * V.col(3)).norm() < 1e-15);
  CHECK_THROWS_AS(cw_modal_decomp(0.0, x0), InvalidInput);
}

TEST_CASE("LF transform in local coordinates satisfies its defining ODE") {
  for (const ChiefOrbit& c : {make_chief(12000.0, 0.6, 1.0, 0.3, 0.8, 1.1), molniya()}) {
    const ChiefOrbit eff = regularize_chief(c);
    for (Domain d : {Domain::Cartesian, Domain::Spherical}) {
      const LfTransform P = lf_for_domain(eff, d);
      CHECK(P.domain == d);
      const Mat6 R = d == Domain::Cartesian ? lti_cartesian_closed(eff).R : lti_spherical_closed(eff).R;
      const Mat6 L0 = cart_sph_linear_at(eff, eff.theta0());
      // P = I at the epoch and after one period, in velocity-scaled Cartesian units
      const auto scaled_defect = [&](double th) {
        const Mat6 D = P(th) - Mat6::Identity();
        return (d == Domain::Cartesian ? unit_scaled(D, eff.n()) : unit_scaled(L0.inverse() * D * L0, eff.n()))
            .cwiseAbs()
            .maxCoeff();
      };
      MESSAGE("scaled P defect at epoch " << scaled_defect(eff.theta0()) << ", after one period "
                                          << scaled_defect(eff.theta0() + kTwoPi));
      CHECK(scaled_defect(eff.theta0()) < 1e-12);
      CHECK(scaled_defect(eff.theta0() + kTwoPi) < 1e-9);
      const double h = 1e-6;
      double worst = 0.0;
      for (double th : {0.3, 1.4, 2.9, 4.4, 5.8}) {
        Mat6 A = cartesian_plant_theta(eff, th);
        if (d == Domain::Spherical) {
          const Mat6 L = cart_sph_linear_at(eff, th);
          const Mat6 Ld = (cart_sph_linear_at(eff, th + h) - cart_sph_linear_at(eff, th - h)) / (2 * h);
          A = L * A * L.inverse() + Ld * L.inverse();
        }
        const Mat6 Pm = P(th);
        const Mat6 dP = (P(th + h) - P(th - h)) / (2 * h);
        const Mat6 res = Pm.inverse() * (A * Pm - dP) - R;
        const double n = eff.n();
        // rescale so position-like and rate-like entries compare on one footing
        const Mat6 S = d == Domain::Cartesian ? unit_scaled(res, n) : unit_scaled(L0.inverse() * res * L0, n);
        const Mat6 Rs = d == Domain::Cartesian ? unit_scaled(R, n) : unit_scaled(L0.inverse() * R * L0, n);
        worst = std::max(worst, S.cwiseAbs().maxCoeff() / Rs.cwiseAbs().maxCoeff());
      }
      MESSAGE("relative LF ODE residual " << worst);
      CHECK(worst < 1e-7);
    }
  }
}
