#include "relmodes/matrix_functions.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>
#include <unsupported/Eigen/MatrixFunctions>

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace relmodes {

bool is_nilpotent(const MatX& A, double rel_tol) {
  const double nrm = A.norm();
  if (nrm == 0.0) return true;
  MatX Ak = A / nrm;
  for (int k = 1; k < A.rows(); ++k) Ak = Ak * (A / nrm);
  return Ak.norm() <= std::pow(rel_tol, static_cast<double>(A.rows()));
}

MatX expm(const MatX& A) {
  if (A.rows() != A.cols()) throw InvalidInput("expm needs a square matrix");
  if (is_nilpotent(A)) {
    MatX term = MatX::Identity(A.rows(), A.cols());
    MatX sum = term;
    for (int k = 1; k < A.rows(); ++k) {
      term = term * A / static_cast<double>(k);
      sum += term;
    }
    return sum;
  }
  // Taylor series when it settles without cancellation (near-nilpotent input
  // of large norm, where scaling and squaring loses digits).
  const MatX I = MatX::Identity(A.rows(), A.cols());
  MatX term = I;
  MatX sum = I;
  double biggest = 1.0;
  for (int k = 1; k <= 60; ++k) {
    term = term * A / static_cast<double>(k);
    sum += term;
    const double tn = term.norm();
    biggest = std::max(biggest, tn);
    if (!std::isfinite(tn) || biggest > 10.0 * sum.norm()) break;
    if (tn <= 1e-17 * sum.norm()) return sum;
  }
  return A.exp();
}

VecX balance_scaling(const MatX& A) {
  const Eigen::Index n = A.rows();
  VecX d = VecX::Ones(n);
  MatX B = A;
  constexpr double radix = 2.0;
  bool done = false;
  for (int sweep = 0; sweep < 100 && !done; ++sweep) {
    done = true;
    for (Eigen::Index i = 0; i < n; ++i) {
      double c = 0.0, r = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j == i) continue;
        c += std::abs(B(j, i));
        r += std::abs(B(i, j));
      }
      if (c == 0.0 || r == 0.0) continue;
      double f = 1.0;
      const double s = c + r;
      double cc = c;
      double rr = r;
      while (cc < rr / radix) {
        cc *= radix;
        rr /= radix;
        f *= radix;
      }
      while (cc >= rr * radix) {
        cc /= radix;
        rr *= radix;
        f /= radix;
      }
      if ((cc + rr) < 0.95 * s) {
        done = false;
        d(i) *= f;
        B.row(i) /= f;
        B.col(i) *= f;
      }
    }
  }
  return d;
}

MatX sqrtm_denman_beavers(const MatX& X) {
  const Eigen::Index n = X.rows();
  MatX Y = X;
  MatX Z = MatX::Identity(n, n);
  for (int it = 0; it < 100; ++it) {
    const MatX Yi = Y.partialPivLu().inverse();
    const MatX Zi = Z.partialPivLu().inverse();
    const MatX Yn = 0.5 * (Y + Zi);
    Z = 0.5 * (Z + Yi);
    const double change = (Yn - Y).norm();
    Y = Yn;
    if (!Y.allFinite()) break;
    if (change <= 1e-15 * Y.norm()) return Y;
  }
  throw ConvergenceError("Denman-Beavers square root did not converge");
}

namespace {

void check_log_domain(const MatX& M) {
  const Eigen::EigenSolver<MatX> es(M, false);
  const auto& ev = es.eigenvalues();
  double max_abs = 0.0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) max_abs = std::max(max_abs, std::abs(ev(i)));
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    const Complex l = ev(i);
    if (std::abs(l) <= 1e-14 * max_abs) throw InvalidInput("matrix logarithm of a singular matrix");
    if (l.real() < 0.0 && std::abs(l.imag()) <= 1e-10 * std::abs(l)) {
      std::ostringstream os;
      os << "monodromy has eigenvalue " << l.real()
         << " on the negative real axis: no real principal logarithm (integrate over twice "
            "the period)";
      throw InvalidInput(os.str());
    }
  }
}

// log(I + N) by the Mercator series; returns false when it does not settle.
bool mercator_log(const MatX& N, MatX& out) {
  const Eigen::Index n = N.rows();
  const double nrm = N.norm();
  out = MatX::Zero(n, n);
  if (nrm == 0.0) return true;
  MatX power = N;
  for (int k = 1; k <= 400; ++k) {
    const double sign = (k % 2 == 1) ? 1.0 : -1.0;
    out += sign / static_cast<double>(k) * power;
    const double pn = power.norm();
    if (!std::isfinite(pn)) return false;
    if (pn <= 1e-17 * nrm) return true;
    power = power * N;
  }
  return false;
}

// Gauss-Legendre form of the diagonal Pade approximant of log(I + X).
MatX pade_log(const MatX& X) {
  using Rule = boost::math::quadrature::gauss<double, 8>;
  const Eigen::Index n = X.rows();
  const MatX I = MatX::Identity(n, n);
  MatX sum = MatX::Zero(n, n);
  const auto& nodes = Rule::abscissa();
  const auto& weights = Rule::weights();
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    // Nodes on [-1, 1] are stored as non-negative halves; map both signs to [0, 1].
    for (int sgn : {1, -1}) {
      if (nodes[j] == 0.0 && sgn < 0) continue;
      const double x = 0.5 * (1.0 + sgn * nodes[j]);
      const double w = 0.5 * weights[j];
      sum += w * (I + x * X).partialPivLu().solve(X);
    }
  }
  return sum;
}

}  // namespace

MatX real_matrix_log(const MatX& M, double T) {
  if (M.rows() != M.cols()) throw InvalidInput("matrix logarithm needs a square matrix");
  if (!(T > 0.0)) throw InvalidInput("period must be positive");
  if (!M.allFinite()) throw InvalidInput("matrix logarithm of a non-finite matrix");
  const Eigen::Index n = M.rows();
  const MatX I = MatX::Identity(n, n);

  const VecX d = balance_scaling(M);
  const MatX B = d.cwiseInverse().asDiagonal() * M * d.asDiagonal();
  check_log_domain(B);

  MatX L;
  const MatX N = B - I;
  const Eigen::EigenSolver<MatX> es(N, false);
  double rho = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) rho = std::max(rho, std::abs(es.eigenvalues()(i)));
  bool have = false;
  if (rho < 0.5) have = mercator_log(N, L);
  if (!have) {
    MatX X = B;
    int s = 0;
    while ((X - I).lpNorm<1>() > 0.25) {
      if (++s > 60) throw ConvergenceError("inverse scaling and squaring did not converge");
      X = sqrtm_denman_beavers(X);
    }
    L = std::ldexp(1.0, s) * pade_log(X - I);
  }
  return d.asDiagonal() * L * d.cwiseInverse().asDiagonal() / T;
}

namespace {

// Orthonormal basis of the numerical null space of K.
CMatX null_space(const CMatX& K, double abs_tol) {
  const Eigen::JacobiSVD<CMatX> svd(K, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > abs_tol) ++rank;
  return svd.matrixV().rightCols(K.cols() - rank);
}

Eigen::Index numerical_rank(const CMatX& K, double abs_tol) {
  const Eigen::JacobiSVD<CMatX> svd(K);
  const auto& sv = svd.singularValues();
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > abs_tol) ++rank;
  return rank;
}

double min_normalized_sv(const CMatX& cols) {
  CMatX c = cols;
  for (Eigen::Index j = 0; j < c.cols(); ++j) {
    const double nrm = c.col(j).norm();
    if (nrm > 0.0) c.col(j) /= nrm;
  }
  const Eigen::JacobiSVD<CMatX> svd(c);
  return svd.singularValues()(svd.singularValues().size() - 1);
}

// Chains of every cluster in the coordinates diag(d)^-1 L diag(d); false when
// no complete basis was found.
bool build_chains(const MatX& L, const VecX& d, double ctol, double rank_rel_tol,
                  JordanStructure& js) {
  const Eigen::Index n = L.rows();
  const CMatX Bc = (d.cwiseInverse().asDiagonal() * L * d.asDiagonal()).cast<Complex>();
  const CMatX I = CMatX::Identity(n, n);
  CMatX basis(n, 0);
  std::vector<std::pair<Complex, int>> blocks;
  for (auto& c : js.clusters) {
    const CMatX K = Bc - c.lambda * I;
    const double knorm = K.norm();
    // ranks r_j of K^j, j = 0..m
    std::vector<Eigen::Index> ranks{n};
    std::vector<CMatX> powers{I};
    for (int j = 1; j <= c.algebraic; ++j) {
      powers.push_back(powers.back() * K);
      const double tol = rank_rel_tol * std::pow(knorm, j);
      ranks.push_back(knorm == 0.0 ? 0 : numerical_rank(powers.back(), tol));
    }
    c.geometric = static_cast<int>(ranks[0] - ranks[1]);
    // chains of length >= j: ranks[j-1] - ranks[j]
    std::vector<int> at_least(static_cast<std::size_t>(c.algebraic) + 2, 0);
    for (int j = 1; j <= c.algebraic; ++j)
      at_least[static_cast<std::size_t>(j)] = static_cast<int>(ranks[static_cast<std::size_t>(j) - 1] - ranks[static_cast<std::size_t>(j)]);
    int total = 0;
    for (int k = c.algebraic; k >= 1; --k) {
      const int exact = at_least[static_cast<std::size_t>(k)] - at_least[static_cast<std::size_t>(k) + 1];
      for (int q = 0; q < exact; ++q) c.chains.push_back(k);
      total += exact * k;
    }
    if (total != c.algebraic) {
      // Rank pattern inconsistent with the multiplicity: treat as semisimple.
      c.chains.assign(static_cast<std::size_t>(c.algebraic), 1);
      c.geometric = c.algebraic;
    }

    // Chain vectors: tops in N(K^k) but outside N(K^(k-1)), accepted greedily.
    int idx = 0;
    while (idx < static_cast<int>(c.chains.size())) {
      const int k = c.chains[static_cast<std::size_t>(idx)];
      int need = 0;
      while (idx + need < static_cast<int>(c.chains.size()) && c.chains[static_cast<std::size_t>(idx + need)] == k) ++need;
      const double tol_k = (knorm == 0.0) ? 0.0 : rank_rel_tol * std::pow(knorm, k);
      CMatX Nk = knorm == 0.0 ? I : null_space(powers[static_cast<std::size_t>(k)], tol_k);
      if (Nk.cols() == 0) Nk = I;
      if (k > 1) {
        const double tol_km1 = rank_rel_tol * std::pow(knorm, k - 1);
        const CMatX Nkm1 = null_space(powers[static_cast<std::size_t>(k) - 1], tol_km1);
        Nk = Nk - Nkm1 * (Nkm1.adjoint() * Nk);
      }
      int accepted = 0;
      for (Eigen::Index cand = 0; cand < Nk.cols() && accepted < need; ++cand) {
        CMatX chain(n, k);
        chain.col(k - 1) = Nk.col(cand);
        if (chain.col(k - 1).norm() < 1e-8) continue;
        for (int j = k - 2; j >= 0; --j) chain.col(j) = K * chain.col(j + 1);
        CMatX trial(n, basis.cols() + k);
        trial << basis, chain;
        if (min_normalized_sv(trial) > 1e-7) {
          basis = trial;
          ++accepted;
        }
      }
      if (accepted < need) {
        // Fall back to eigenvectors for the missing chains.
        for (int q = accepted; q < need; ++q)
          for (int j = 0; j < k; ++j) c.chains.push_back(1);
        c.chains.erase(c.chains.begin() + idx + accepted, c.chains.begin() + idx + need);
        const Eigen::ComplexEigenSolver<CMatX> ces(Bc);
        for (Eigen::Index i = 0; i < n && basis.cols() < n; ++i) {
          if (std::abs(ces.eigenvalues()(i) - c.lambda) > std::max(ctol, 1e-12)) continue;
          CMatX trial(n, basis.cols() + 1);
          trial << basis, ces.eigenvectors().col(i);
          if (min_normalized_sv(trial) > 1e-10) basis = trial;
        }
        break;
      }
      for (int q = 0; q < need; ++q) blocks.emplace_back(c.lambda, k);
      idx += need;
    }
    for (std::size_t q = static_cast<std::size_t>(idx); q < c.chains.size(); ++q)
      blocks.emplace_back(c.lambda, c.chains[q]);
    for (int q = 0; q < c.algebraic; ++q) js.eigenvalues.push_back(c.lambda);
  }

  js.J = CMatX::Zero(n, n);
  Eigen::Index pos = 0;
  for (const auto& [lam, len] : blocks) {
    for (int j = 0; j < len && pos + j < n; ++j) {
      js.J(pos + j, pos + j) = lam;
      if (j + 1 < len && pos + j + 1 < n) js.J(pos + j, pos + j + 1) = 1.0;
    }
    pos += len;
  }
  if (basis.cols() != n) return false;
  js.V = d.cast<Complex>().asDiagonal() * basis;
  // Unit columns; the chain scaling moves into the superdiagonal of J.
  const Eigen::VectorXd s = js.V.colwise().norm().transpose();
  for (Eigen::Index j = 0; j < n; ++j) js.V.col(j) /= s(j);
  for (Eigen::Index j = 0; j + 1 < n; ++j)
    if (js.J(j, j + 1) != Complex(0.0)) js.J(j, j + 1) = s(j) / s(j + 1);
  return true;
}

}  // namespace

JordanStructure jordan_decompose(const MatX& L, double cluster_rel_tol, double rank_rel_tol) {
  const Eigen::Index n = L.rows();
  if (n == 0 || L.cols() != n) throw InvalidInput("Jordan decomposition needs a square matrix");
  const VecX d = balance_scaling(L);
  const MatX B = d.cwiseInverse().asDiagonal() * L * d.asDiagonal();

  const Eigen::EigenSolver<MatX> es(B, false);
  const auto ev = es.eigenvalues();

  // Single-linkage clustering.
  std::vector<int> label(static_cast<std::size_t>(n));
  std::iota(label.begin(), label.end(), 0);
  const double ctol = cluster_rel_tol * std::max(L.norm(), 1e-300);
  auto find = [&](int i) {
    while (label[static_cast<std::size_t>(i)] != i) i = label[static_cast<std::size_t>(i)];
    return i;
  };
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j)
      if (std::abs(ev(i) - ev(j)) <= ctol) {
        const int a = find(static_cast<int>(i)), b = find(static_cast<int>(j));
        if (a != b) label[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
      }

  JordanStructure js;
  std::vector<int> roots;
  for (Eigen::Index i = 0; i < n; ++i) {
    const int r = find(static_cast<int>(i));
    if (std::find(roots.begin(), roots.end(), r) == roots.end()) roots.push_back(r);
  }
  for (int r : roots) {
    JordanCluster c;
    Complex sum = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
      if (find(static_cast<int>(i)) == r) {
        sum += ev(i);
        ++c.algebraic;
      }
    c.lambda = sum / static_cast<double>(c.algebraic);
    js.clusters.push_back(c);
  }
  std::sort(js.clusters.begin(), js.clusters.end(), [](const JordanCluster& a, const JordanCluster& b) {
    if (std::abs(a.lambda.imag() - b.lambda.imag()) > 1e-300) return a.lambda.imag() < b.lambda.imag();
    return a.lambda.real() < b.lambda.real();
  });

  // Candidates from the balanced and the raw coordinates: keep those whose
  // Jordan residual is within 100x of the smallest, then the best conditioned.
  std::vector<JordanStructure> cands;
  std::vector<double> resid;
  for (const VecX& scaling : {d, VecX(VecX::Ones(n))}) {
    JordanStructure trial = js;
    if (!build_chains(L, scaling, ctol, rank_rel_tol, trial)) continue;
    const CMatX Lc = L.cast<Complex>();
    resid.push_back((Lc * trial.V - trial.V * trial.J).norm() / std::max(L.norm(), 1e-300));
    cands.push_back(std::move(trial));
  }
  if (cands.empty()) throw ConvergenceError("could not assemble a complete Jordan basis");
  const double rmin = *std::min_element(resid.begin(), resid.end());
  std::size_t pick = 0;
  double best_quality = -1.0;
  for (std::size_t k = 0; k < cands.size(); ++k) {
    if (resid[k] > 100.0 * rmin + 1e-300) continue;
    const double q = min_normalized_sv(cands[k].V);
    if (q > best_quality) {
      best_quality = q;
      pick = k;
    }
  }
  JordanStructure best = std::move(cands[pick]);
  return best;
}

}  // namespace relmodes
