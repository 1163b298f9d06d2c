#include "relmodes/linear_dynamics.hpp"
#include "relmodes/matrix_functions.hpp"
#include "doctest_support.hpp"

#include <unsupported/Eigen/MatrixFunctions>

using namespace relmodes;
using relmodes::testing::rapprox;
using relmodes::testing::rel_max;

namespace {

MatX random_matrix(std::mt19937_64& rng, int n, double scale) {
  std::normal_distribution<double> g(0.0, 1.0);
  MatX A(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) A(i, j) = scale * g(rng);
  return A;
}

std::vector<int> sorted_chains(const JordanStructure& js) {
  std::vector<int> all;
  for (const auto& c : js.clusters) all.insert(all.end(), c.chains.begin(), c.chains.end());
  std::sort(all.rbegin(), all.rend());
  return all;
}

}  // namespace

TEST_CASE("nilpotency detection") {
  MatX N = MatX::Zero(6, 6);
  N(1, 0) = 3.0;
  N(4, 5) = -2.0;
  CHECK(is_nilpotent(N));
  CHECK_FALSE(is_nilpotent(MatX::Identity(6, 6)));
  CHECK(is_nilpotent(MatX::Zero(3, 3)));
  MatX strict = MatX::Zero(4, 4);
  strict.triangularView<Eigen::StrictlyUpper>().setConstant(1.0);
  CHECK(is_nilpotent(strict));
}

TEST_CASE("matrix exponential") {
  std::mt19937_64 rng(51);
  for (int k = 0; k < 20; ++k) {
    const MatX A = random_matrix(rng, 6, 0.1 + 0.3 * k);
    const MatX ref = A.exp();
    CHECK((expm(A) - ref).norm() < 1e-12 * ref.norm());
  }
  MatX N = MatX::Zero(6, 6);
  N(1, 0) = 5.0;
  N(2, 1) = 0.5;
  const MatX E = expm(N);
  const MatX series = MatX::Identity(6, 6) + N + 0.5 * N * N;
  CHECK((E - series).norm() == 0.0);
  CHECK((expm(MatX::Zero(6, 6)) - MatX::Identity(6, 6)).norm() == 0.0);
}

TEST_CASE("balancing and square roots") {
  MatX A(3, 3);
  A << 1, 1e6, 0, 1e-6, 2, 1e3, 0, 1e-3, 3;
  const VecX d = balance_scaling(A);
  for (int i = 0; i < 3; ++i) {
    const double l = std::log2(d(i));
    CHECK(l == rapprox(std::round(l)));
  }
  const MatX B = d.cwiseInverse().asDiagonal() * A * d.asDiagonal();
  CHECK(B.cwiseAbs().maxCoeff() < A.cwiseAbs().maxCoeff());

  std::mt19937_64 rng(52);
  const MatX X = (random_matrix(rng, 6, 0.2)).exp();
  const MatX S = sqrtm_denman_beavers(X);
  CHECK((S * S - X).norm() < 1e-12 * X.norm());
}

TEST_CASE("real matrix logarithm") {
  const double T = 3.0;
  CHECK(real_matrix_log(MatX::Identity(6, 6), T).norm() == 0.0);

  MatX N = MatX::Zero(6, 6);
  N(1, 0) = 0.7;
  N(3, 5) = -2.0;
  const MatX L = real_matrix_log(MatX::Identity(6, 6) + N, T);
  CHECK((L - N / T).norm() < 1e-15 * N.norm());

  std::mt19937_64 rng(53);
  for (int k = 0; k < 30; ++k) {
    const MatX A = random_matrix(rng, 6, 0.05 + 0.1 * (k % 10));
    const MatX M = A.exp();
    const MatX Lk = real_matrix_log(M, T);
    CHECK(rel_max(MatX((Lk * T).exp()), M) < 1e-8);
  }
  // unipotent and defective with a large nilpotent part
  MatX U = MatX::Identity(6, 6);
  U(1, 0) = 400.0;
  U(4, 3) = 1e-3;
  CHECK(rel_max(MatX((real_matrix_log(U, T) * T).exp()), U) < 1e-10);

  // rotation by more than pi/2 takes the square-root branch
  MatX Rm = MatX::Identity(6, 6);
  const double a = 2.5;
  Rm(0, 0) = std::cos(a);
  Rm(0, 1) = -std::sin(a);
  Rm(1, 0) = std::sin(a);
  Rm(1, 1) = std::cos(a);
  const MatX Lr = real_matrix_log(Rm, 1.0);
  CHECK(Lr(1, 0) == rapprox(a).epsilon(1e-10));
  CHECK(rel_max(MatX(Lr.exp()), Rm) < 1e-10);

  MatX neg = MatX::Identity(6, 6);
  neg(2, 2) = -1.5;
  CHECK_THROWS_AS(real_matrix_log(neg, T), InvalidInput);
  MatX sing = MatX::Identity(6, 6);
  sing(4, 4) = 0.0;
  CHECK_THROWS_AS(real_matrix_log(sing, T), InvalidInput);
}

TEST_CASE("Jordan structure of known matrices") {
  MatX D = MatX::Zero(4, 4);
  D.diagonal() << 1.0, 2.0, 3.0, 4.0;
  const JordanStructure jd = jordan_decompose(D);
  CHECK(jd.clusters.size() == 4);
  CHECK(sorted_chains(jd) == std::vector<int>{1, 1, 1, 1});

  // similarity of a Jordan form with one 2-chain at zero, a 1-chain at zero and a pair
  MatX J = MatX::Zero(6, 6);
  J(0, 1) = 1.0;
  J(3, 4) = 0.5;
  J(4, 3) = -0.5;
  std::mt19937_64 rng(54);
  const MatX S = MatX::Identity(6, 6) + random_matrix(rng, 6, 0.3);
  const MatX L = S * J * S.inverse();
  const JordanStructure js = jordan_decompose(L);
  int zero_alg = 0;
  std::vector<int> zero_chains;
  for (const auto& c : js.clusters) {
    if (std::abs(c.lambda) < 1e-8) {
      zero_alg += c.algebraic;
      zero_chains = c.chains;
    } else {
      CHECK(std::abs(std::abs(c.lambda.imag()) - 0.5) < 1e-10);
      CHECK(c.chains == std::vector<int>{1});
    }
  }
  CHECK(zero_alg == 4);
  std::sort(zero_chains.rbegin(), zero_chains.rend());
  CHECK(zero_chains == std::vector<int>{2, 1, 1});
  const CMatX Lc = L.cast<Complex>();
  CHECK((Lc * js.V - js.V * js.J).norm() < 1e-10 * L.norm());
  for (int j = 0; j < 6; ++j) CHECK(js.V.col(j).norm() == rapprox(1.0));
  CHECK(js.eigenvalues.size() == 6);
}

TEST_CASE("Jordan structure of the CW plant") {
  const double n = 1.1e-3;
  const JordanStructure js = jordan_decompose(cw_plant(n));
  int zero = 0, pair = 0;
  for (const auto& c : js.clusters) {
    if (std::abs(c.lambda) < 1e-6 * n) {
      zero += c.algebraic;
      CHECK(c.chains == std::vector<int>{2});
    } else {
      CHECK(std::abs(c.lambda.imag()) == rapprox(n).epsilon(1e-9));
      pair += c.algebraic;
    }
  }
  CHECK(zero == 2);
  CHECK(pair == 4);
}
