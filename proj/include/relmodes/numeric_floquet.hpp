// Numerical Floquet pipeline for a sampled or callable periodic plant: STM
// integration, monodromy, real logarithm, LF samples, Fourier periodic fit,
// eigenstructure and first-order LF correction.
#pragma once

#include "relmodes/linear_dynamics.hpp"
#include "relmodes/matrix_functions.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace relmodes {

struct StmSamples {
  std::vector<double> t;
  std::vector<Mat6> phi;       ///< Phi(t_k, t0)
  double trace_integral = 0.0; ///< integral of tr A over [t0, t0 + T]

  const Mat6& monodromy() const { return phi.back(); }
};

/// Integrates dPhi/dt = A(t) Phi from Phi(t0) = I over [t0, t0 + T] and samples
/// on n_samples + 1 uniform points (both ends included).
StmSamples integrate_stm(const PlantFn& plant, double t0, double T, int n_samples,
                         const IntegratorOptions& opts = {});

/// P(t_k) = Phi(t_k) exp(-Lambda (t_k - t0)).
std::vector<Mat6> lf_from_monodromy(const StmSamples& stm, const Mat6& Lambda);

/// Truncated real Fourier series of a matrix function on one period.
struct FourierFit {
  double t0 = 0.0;
  double T = 1.0;
  Mat6 mean = Mat6::Zero();
  std::vector<Mat6> cos_coeffs;  ///< harmonics 1..n
  std::vector<Mat6> sin_coeffs;
  double residual = 0.0;           ///< max entry of A(t_k) - fit(t_k)
  double relative_residual = 0.0;  ///< residual / max entry of A

  int harmonics() const { return static_cast<int>(cos_coeffs.size()); }
  Mat6 operator()(double t) const;
};

/// Fit from n + 1 uniform samples covering [t0, t0 + T] (trapezoidal projection).
/// Throws InvalidInput when n <= 2 n_harmonics.
FourierFit fourier_periodic_fit(const std::vector<Mat6>& samples, double t0, double T,
                                int n_harmonics);

/// T in [T_lo, T_hi] minimizing ||A(t0) - A(t0 + T)|| (golden-section search).
double find_period(const PlantFn& plant, double t0, double T_lo, double T_hi,
                   double tol = 1e-10);

struct NumericFloquetOptions {
  int n_samples = 1024;
  int n_harmonics = 32;
  /// Integrate the Fourier fit (true) or the plant itself (false). The fit
  /// residual is checked and reported either way.
  bool integrate_fit = false;
  /// Largest accepted relative fit residual.
  double fit_threshold = 0.05;
  double cluster_rel_tol = 1e-6;
  double rank_rel_tol = 1e-6;
  IntegratorOptions integrator{1e-13, 1e-16, 5'000'000};
};

struct NumericFloquetResult {
  double t0 = 0.0;
  double T = 0.0;
  Mat6 monodromy = Mat6::Identity();
  Mat6 Lambda = Mat6::Zero();
  std::vector<double> t;
  std::vector<Mat6> lf_samples;
  std::vector<Mat6> lf_derivatives;  ///< dP/dt = A P - P Lambda at the samples
  JordanStructure eigen;
  double periodic_fit_residual = 0.0;  ///< relative
  double periodicity_defect = 0.0;     ///< ||P(t0 + T) - I||
  double log_residual = 0.0;           ///< ||exp(Lambda T) - M|| / ||M||
  double liouville_residual = 0.0;     ///< |det M - exp(int tr A)| / |det M|

  /// P at any t (periodic extension, cubic Hermite between samples).
  Mat6 P(double t) const;
};

/// Complex fundamental solution of the numeric pipeline.
struct ComplexModeSampler {
  int index = 1;
  Complex lambda;
  std::function<CVec6(double)> eval;
};

/// fit -> STM -> monodromy -> log -> LF samples -> Jordan structure.
/// Stage failures are rethrown as PipelineError with the stage name
/// ("fit", "stm", "log", "lf", "eigen").
NumericFloquetResult numeric_modal_decomp(const PlantFn& plant, double t0, double T,
                                          const NumericFloquetOptions& opts = {});

/// Modal view of a numeric result: x(t) = Re P(t) V exp(J (t - t0)) c.
class NumericModalBasis {
 public:
  explicit NumericModalBasis(NumericFloquetResult result);

  const NumericFloquetResult& result() const { return res_; }
  CMat6 V() const { return V_; }
  CMat6 J() const { return J_; }
  CMat6 psi(double t) const;
  CVec6 mode(int i, double t) const;
  ComplexModeSampler sampler(int i) const;
  CVec6 constants(const Vec6& x0) const;
  Vec6 reconstruct(const CVec6& c, double t) const;

 private:
  NumericFloquetResult res_;
  CMat6 V_;
  CMat6 J_;
};

struct DeltaPResult {
  std::vector<double> t;
  std::vector<Mat6> dP;
  double periodicity_defect = 0.0;  ///< ||dP(t0 + T) - dP(t0)||
};

/// Integrates d(dP)/dt = -dP Lambda0 + A0 dP - P0 dLambda + dA P0 from dP(t0) = 0.
DeltaPResult delta_p_correction(const PlantFn& A0, const PlantFn& P0, const Mat6& Lambda0,
                                const PlantFn& dA, double t0, double T, int n_samples,
                                const Mat6& dLambda = Mat6::Zero(),
                                const IntegratorOptions& opts = {});

}  // namespace relmodes
