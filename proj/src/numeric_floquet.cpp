#include "relmodes/numeric_floquet.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <memory>
#include <cmath>
#include <sstream>

namespace relmodes {

namespace {

double max_abs(const Mat6& M) { return M.cwiseAbs().maxCoeff(); }

std::vector<double> period_grid(double t0, double T, int n) {
  if (n < 2) throw InvalidInput("need at least two sample intervals");
  if (!(T > 0.0) || !std::isfinite(T)) throw InvalidInput("period must be positive and finite");
  std::vector<double> g(static_cast<std::size_t>(n) + 1);
  for (int k = 0; k <= n; ++k) g[static_cast<std::size_t>(k)] = t0 + T * k / n;
  g.back() = t0 + T;
  return g;
}

Mat6 to_mat(const std::vector<double>& v, std::size_t offset = 0) {
  return Eigen::Map<const Mat6>(v.data() + offset);
}

// exp(J s) for a Jordan matrix; blocks are runs of nonzero superdiagonal entries.
CMat6 jordan_exp(const CMat6& J, double s) {
  CMat6 E = CMat6::Zero();
  int start = 0;
  while (start < 6) {
    int end = start;
    while (end + 1 < 6 && J(end, end + 1) != Complex(0.0)) ++end;
    const int len = end - start + 1;
    const CMatX N = J.block(start, start, len, len) - J(start, start) * CMatX::Identity(len, len);
    CMatX term = CMatX::Identity(len, len);
    CMatX sum = term;
    for (int k = 1; k < len; ++k) {
      term = term * N * (s / k);
      sum += term;
    }
    E.block(start, start, len, len) = std::exp(J(start, start) * s) * sum;
    start = end + 1;
  }
  return E;
}

}  // namespace

StmSamples integrate_stm(const PlantFn& plant, double t0, double T, int n_samples,
                         const IntegratorOptions& opts) {
  StmSamples out;
  out.t = period_grid(t0, T, n_samples);
  std::vector<double> y0(37, 0.0);
  for (int i = 0; i < 6; ++i) y0[static_cast<std::size_t>(i * 7)] = 1.0;
  OdeRhs rhs = [&plant](double t, const std::vector<double>& y, std::vector<double>& dy) {
    const Mat6 A = plant(t);
    const Mat6 dphi = A * to_mat(y);
    dy.resize(37);
    std::copy(dphi.data(), dphi.data() + 36, dy.begin());
    dy[36] = A.trace();
  };
  const auto raw = integrate_samples(rhs, y0, out.t, opts);
  out.phi.reserve(raw.size());
  for (const auto& y : raw) out.phi.push_back(to_mat(y));
  out.trace_integral = raw.back()[36];
  return out;
}

std::vector<Mat6> lf_from_monodromy(const StmSamples& stm, const Mat6& Lambda) {
  std::vector<Mat6> P;
  P.reserve(stm.phi.size());
  const double t0 = stm.t.front();
  for (std::size_t k = 0; k < stm.phi.size(); ++k) {
    const MatX E = expm(-Lambda * (stm.t[k] - t0));
    P.push_back(stm.phi[k] * Mat6(E));
  }
  return P;
}

Mat6 FourierFit::operator()(double t) const {
  const double w = kTwoPi / T;
  Mat6 A = mean;
  for (std::size_t k = 0; k < cos_coeffs.size(); ++k) {
    const double arg = w * static_cast<double>(k + 1) * (t - t0);
    A += std::cos(arg) * cos_coeffs[k] + std::sin(arg) * sin_coeffs[k];
  }
  return A;
}

FourierFit fourier_periodic_fit(const std::vector<Mat6>& samples, double t0, double T,
                                int n_harmonics) {
  if (samples.size() < 3) throw InvalidInput("Fourier fit needs at least three samples");
  const int n = static_cast<int>(samples.size()) - 1;
  if (n_harmonics < 0) throw InvalidInput("number of harmonics must be non-negative");
  if (n <= 2 * n_harmonics) {
    std::ostringstream os;
    os << "underdetermined Fourier fit: " << n << " sample intervals for " << n_harmonics
       << " harmonics (need more than " << 2 * n_harmonics << ")";
    throw InvalidInput(os.str());
  }
  if (!(T > 0.0)) throw InvalidInput("period must be positive");
  FourierFit fit;
  fit.t0 = t0;
  fit.T = T;
  // Trapezoidal weights over the closed period.
  auto weight = [n](int k) { return (k == 0 || k == n) ? 0.5 / n : 1.0 / n; };
  for (int k = 0; k <= n; ++k) fit.mean += weight(k) * samples[static_cast<std::size_t>(k)];
  for (int h = 1; h <= n_harmonics; ++h) {
    Mat6 a = Mat6::Zero(), b = Mat6::Zero();
    for (int k = 0; k <= n; ++k) {
      const double arg = kTwoPi * h * k / n;
      a += 2.0 * weight(k) * std::cos(arg) * samples[static_cast<std::size_t>(k)];
      b += 2.0 * weight(k) * std::sin(arg) * samples[static_cast<std::size_t>(k)];
    }
    fit.cos_coeffs.push_back(a);
    fit.sin_coeffs.push_back(b);
  }
  double scale = 0.0;
  for (int k = 0; k <= n; ++k) {
    const double tk = t0 + T * k / n;
    fit.residual = std::max(fit.residual, max_abs(samples[static_cast<std::size_t>(k)] - fit(tk)));
    scale = std::max(scale, max_abs(samples[static_cast<std::size_t>(k)]));
  }
  fit.relative_residual = scale > 0.0 ? fit.residual / scale : fit.residual;
  return fit;
}

double find_period(const PlantFn& plant, double t0, double T_lo, double T_hi, double tol) {
  if (!(T_hi > T_lo) || !(T_lo > 0.0)) throw InvalidInput("period bracket must satisfy 0 < lo < hi");
  const Mat6 A0 = plant(t0);
  auto f = [&](double T) { return (plant(t0 + T) - A0).norm(); };
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = T_lo, b = T_hi;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < 500 && (b - a) > tol * std::max(1.0, std::abs(b)); ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

Mat6 NumericFloquetResult::P(double t) const {
  if (lf_samples.empty()) throw InvalidInput("empty numeric Floquet result");
  double tau = std::fmod(t - t0, T);
  if (tau < 0.0) tau += T;
  const int n = static_cast<int>(lf_samples.size()) - 1;
  const double h = T / n;
  int k = std::min(static_cast<int>(tau / h), n - 1);
  const double s = (tau - k * h) / h;
  const double s2 = s * s, s3 = s2 * s;
  const auto ku = static_cast<std::size_t>(k);
  return (2 * s3 - 3 * s2 + 1) * lf_samples[ku] + (s3 - 2 * s2 + s) * h * lf_derivatives[ku] +
         (-2 * s3 + 3 * s2) * lf_samples[ku + 1] + (s3 - s2) * h * lf_derivatives[ku + 1];
}

NumericFloquetResult numeric_modal_decomp(const PlantFn& plant, double t0, double T,
                                          const NumericFloquetOptions& opts) {
  NumericFloquetResult res;
  res.t0 = t0;
  res.T = T;

  PlantFn used = plant;
  try {
    const auto grid = period_grid(t0, T, opts.n_samples);
    std::vector<Mat6> samples;
    samples.reserve(grid.size());
    for (double t : grid) {
      samples.push_back(plant(t));
      if (!samples.back().allFinite()) throw InvalidInput("plant is not finite on the period");
    }
    auto fit = std::make_shared<FourierFit>(
        fourier_periodic_fit(samples, t0, T, opts.n_harmonics));
    res.periodic_fit_residual = fit->relative_residual;
    if (fit->relative_residual > opts.fit_threshold) {
      std::ostringstream os;
      os << "plant is not periodic enough over T = " << T << ": relative fit residual "
         << fit->relative_residual << " exceeds " << opts.fit_threshold;
      throw InvalidInput(os.str());
    }
    if (opts.integrate_fit) used = [fit](double t) { return (*fit)(t); };
  } catch (const PipelineError&) {
    throw;
  } catch (const Error& e) {
    throw PipelineError("fit", e.what());
  }

  StmSamples stm;
  try {
    stm = integrate_stm(used, t0, T, opts.n_samples, opts.integrator);
  } catch (const Error& e) {
    throw PipelineError("stm", e.what());
  }
  res.t = stm.t;
  res.monodromy = stm.monodromy();
  const double det = res.monodromy.determinant();
  res.liouville_residual = std::abs(det - std::exp(stm.trace_integral)) / std::abs(det);

  try {
    res.Lambda = Mat6(real_matrix_log(res.monodromy, T));
    const MatX E = expm(res.Lambda * T);
    res.log_residual = (Mat6(E) - res.monodromy).norm() / res.monodromy.norm();
  } catch (const Error& e) {
    throw PipelineError("log", e.what());
  }

  try {
    res.lf_samples = lf_from_monodromy(stm, res.Lambda);
    res.lf_derivatives.reserve(res.lf_samples.size());
    for (std::size_t k = 0; k < res.t.size(); ++k)
      res.lf_derivatives.push_back(used(res.t[k]) * res.lf_samples[k] -
                                   res.lf_samples[k] * res.Lambda);
    res.periodicity_defect = (res.lf_samples.back() - Mat6::Identity()).norm();
  } catch (const Error& e) {
    throw PipelineError("lf", e.what());
  }

  try {
    res.eigen = jordan_decompose(res.Lambda, opts.cluster_rel_tol, opts.rank_rel_tol);
  } catch (const Error& e) {
    throw PipelineError("eigen", e.what());
  }
  return res;
}

NumericModalBasis::NumericModalBasis(NumericFloquetResult result) : res_(std::move(result)) {
  V_ = res_.eigen.V;
  J_ = res_.eigen.J;
}

CMat6 NumericModalBasis::psi(double t) const {
  return res_.P(t).cast<Complex>() * V_ * jordan_exp(J_, t - res_.t0);
}

CVec6 NumericModalBasis::mode(int i, double t) const {
  if (i < 1 || i > 6) throw InvalidInput("mode index must be in 1..6");
  return psi(t).col(i - 1);
}

ComplexModeSampler NumericModalBasis::sampler(int i) const {
  if (i < 1 || i > 6) throw InvalidInput("mode index must be in 1..6");
  ComplexModeSampler s;
  s.index = i;
  s.lambda = J_(i - 1, i - 1);
  s.eval = [basis = *this, i](double t) { return basis.mode(i, t); };
  return s;
}

CVec6 NumericModalBasis::constants(const Vec6& x0) const {
  const Eigen::FullPivLU<CMat6> lu(V_);
  if (!lu.isInvertible()) throw NearSingular("numeric eigenvector matrix is singular");
  return lu.solve(x0.cast<Complex>());
}

Vec6 NumericModalBasis::reconstruct(const CVec6& c, double t) const {
  return (psi(t) * c).real();
}

DeltaPResult delta_p_correction(const PlantFn& A0, const PlantFn& P0, const Mat6& Lambda0,
                                const PlantFn& dA, double t0, double T, int n_samples,
                                const Mat6& dLambda, const IntegratorOptions& opts) {
  DeltaPResult out;
  out.t = period_grid(t0, T, n_samples);
  OdeRhs rhs = [&](double t, const std::vector<double>& y, std::vector<double>& dy) {
    const Mat6 dP = to_mat(y);
    const Mat6 P = P0(t);
    const Mat6 d = -dP * Lambda0 + A0(t) * dP - P * dLambda + dA(t) * P;
    dy.assign(d.data(), d.data() + 36);
  };
  const auto raw = integrate_samples(rhs, std::vector<double>(36, 0.0), out.t, opts);
  out.dP.reserve(raw.size());
  for (const auto& y : raw) out.dP.push_back(to_mat(y));
  out.periodicity_defect = (out.dP.back() - out.dP.front()).norm();
  return out;
}

}  // namespace relmodes
