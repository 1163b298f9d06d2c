// Matrix exponential, real matrix logarithm, diagonal balancing and numerical
// Jordan structure for small dense matrices.
#pragma once

#include "relmodes/types.hpp"

#include <vector>

namespace relmodes {

using MatX = Eigen::MatrixXd;
using VecX = Eigen::VectorXd;
using CMatX = Eigen::MatrixXcd;

/// True when ||A^n||^(1/n) <= rel_tol ||A|| (n = rows), i.e. A is nilpotent up to roundoff.
bool is_nilpotent(const MatX& A, double rel_tol = 1e-12);

/// exp(A). Nilpotent inputs use the finite series, near-nilpotent ones the
/// Taylor series when it shows no cancellation; otherwise Pade scaling and squaring.
MatX expm(const MatX& A);

/// Diagonal d (powers of two) such that diag(d)^-1 A diag(d) has balanced
/// row and column norms.
VecX balance_scaling(const MatX& A);

/// Principal square root by the Denman-Beavers iteration.
MatX sqrtm_denman_beavers(const MatX& X);

/// Lambda = log(M) / T with log the principal real logarithm.
/// Near-unipotent M use the Mercator series; otherwise inverse scaling and
/// squaring with an 8-point Gauss-Legendre Pade form.
/// Throws InvalidInput when M is singular or has a negative real eigenvalue
/// (use twice the period), ConvergenceError when the square roots stall.
MatX real_matrix_log(const MatX& M, double T);

struct JordanCluster {
  Complex lambda;           ///< mean of the clustered eigenvalues
  int algebraic = 0;
  int geometric = 0;
  std::vector<int> chains;  ///< chain lengths, longest first
};

struct JordanStructure {
  std::vector<JordanCluster> clusters;
  std::vector<Complex> eigenvalues;  ///< cluster means, repeated by multiplicity
  CMatX V;  ///< unit-norm chain columns: eigenvector first, then generalized vectors
  CMatX J;  ///< L V = V J; nonzero superdiagonal entries carry the chain scaling
};

/// Numerical Jordan structure. Eigenvalues closer than cluster_rel_tol * ||L||
/// are grouped (cluster means are reported); chain lengths come from the
/// numerical ranks of (B - lambda I)^j with threshold rank_rel_tol * ||B - lambda I||^j,
/// B being L in balanced or in raw coordinates, whichever gives the smaller
/// Jordan residual and the better conditioned basis.
JordanStructure jordan_decompose(const MatX& L, double cluster_rel_tol = 1e-6,
                                 double rank_rel_tol = 1e-6);

}  // namespace relmodes
