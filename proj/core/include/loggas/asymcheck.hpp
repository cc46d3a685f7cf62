#pragma once

#include <string>
#include <vector>

#include "loggas/mpnum.hpp"

namespace loggas {

struct SlopeFit {
  double slope = 0;
  double intercept = 0;
  double stderr_slope = 0;  // least-squares standard error (0 for two points)
  double residual = 0;      // rms of the log–log residuals
};
// Least-squares line through (log N_j, log err_j). Needs ≥ 2 points with err > 0.
SlopeFit loglog_fit(const std::vector<int>& N, const std::vector<double>& err);

struct AsymptoticReport {
  std::string quantity;
  Complex t;
  std::vector<int> N_list;
  std::vector<double> errors;
  std::vector<Complex> signed_errors;
  double fitted_slope = 0;
  double slope_ci = 0;
  double fit_residual = 0;
  double expected_slope = 0;
  double band = 0;
  bool pass = false;
};

// Expected decay exponent of γ_N² + 1/(2x(t)) and its test band, from the phase of t:
// −2 ± 0.3 interior, −1 ± 0.3 on the split and birth arcs, −0.4 ± 0.15 at the critical points.
std::pair<double, double> expected_gamma_slope(const Complex& t, const PrecisionContext& ctx);

// Working precision for a diagonal run at size N: max(ctx.bits, 64 + 16N). The moment to
// recurrence step loses about 10N bits at t = 2, so 64 + 8N is not enough beyond N ≈ 32.
PrecisionContext precision_for(int N, const PrecisionContext& ctx);

// errors_j = |γ_N² + 1/(2x(t))| at N = N_j (n = N).
AsymptoticReport rate_gamma(const Complex& t, const std::vector<int>& N_list, const PrecisionContext& ctx);

// Two series: raw |β_N − x(t)| (expected −1) and half-shifted |β_N − x(tv)/√v| with
// v = ((N+½)/N)^{−2/3} (expected −2).
struct BetaReports {
  AsymptoticReport raw, shifted;
};
BetaReports rate_beta(const Complex& t, const std::vector<int>& N_list, const PrecisionContext& ctx);
Real half_shift_v(int N);

// P_N(z) e^{−Ng(z)} by the three-term recurrence, rescaled at every step.
Complex scaled_polynomial(const std::vector<Complex>& beta, const std::vector<Complex>& gamma2, int n,
                          const Complex& z, const Complex& g);

// errors_j = |P_N(z)/(A(z)e^{Ng(z)}) − 1|; z must be ≥ 0.2|a−b| away from J. Expected −1 ± 0.4
// in the interior.
AsymptoticReport strong_asymptotics_check(const Complex& t, const Complex& z, const std::vector<int>& N_list,
                                          const PrecisionContext& ctx);

// |P_N(s) − (A₊e^{Ng₊} + A₋e^{Ng₋})| / (|A₊e^{Ng₊}| + |A₋e^{Ng₋}|) at the point of J at
// the given fraction of its arclength.
double on_cut_check(const Complex& t, int N, double fraction, const PrecisionContext& ctx);

// errors_j = |Δ²_t F_{N_j}/h² − target| with target −1/(2x(t)), or the second difference of
// genus_zero_free_energy with the same step when against_F0 is set. Expected −2 ± 0.5.
AsymptoticReport free_energy_check(const Complex& t, const std::vector<int>& N_list, double h,
                                   const PrecisionContext& ctx, bool against_F0 = false);

// s_k = Γ(3k+½)/(54^k k! Γ(k+½)), t_k = −(6k+1)/(6k−1) s_k.
std::pair<Real, Real> airy_constants(int k);

}  // namespace loggas
