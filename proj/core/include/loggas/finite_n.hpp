#pragma once

#include <string>
#include <vector>

#include "loggas/mpnum.hpp"

namespace loggas {

enum class MomentSource { Recursion, Quadrature };

// m_k = ∫_Γ z^k e^{−NV(z;t)} dz, k = 0..K.
struct MomentTable {
  Complex t;
  int N = 0;
  std::vector<Complex> m;
  MomentSource source = MomentSource::Quadrature;
  int bits = 0;
  // Recursion only: largest relative deviation from quadrature over k ≤ 12. When it
  // exceeds 10^{−bits/4} the table falls back to quadrature for every k.
  double cross_check = 0;
  std::string contour;  // "S-contour" or "rays" (fallback when no S-contour exists)
};

// Truncated integration path for the weight e^{−NV}: the S-contour of t (simplified)
// or, when t has none, the rays e^{πi}∞ → 0 → e^{πi/3}∞. Cut where |z^k e^{−NV}|
// drops below rel_cut times its maximum for every k ≤ K.
std::vector<Complex> weight_contour(const Complex& t, int N, int K, double log2_rel_cut,
                                    const PrecisionContext& ctx, std::string* kind = nullptr);

// K ≥ 2. Recursion seeds m_0, m_1 by quadrature and runs m_{k+2} = t m_k − (k/N) m_{k−1}.
MomentTable moments(const Complex& t, int N, int K, MomentSource method, const PrecisionContext& ctx);

struct RecurrenceTable {
  std::vector<Complex> h;       // h_0..
  std::vector<Complex> gamma2;  // gamma2[n] = γ_n² = h_n/h_{n−1}; gamma2[0] = 0
  std::vector<Complex> beta;    // β_0..
  int N = 0;
  Complex t;
  bool has_Z = false;  // n_max ≥ N−1
  Complex log_Z;       // log N! + Σ_{n<N} log h_n, continuity-corrected across terms
  Complex Z_N;
  Complex F_N;  // log Z_N / N²
  // max over n of the two string-equation residuals
  double string_residual = 0;
};

// Stieltjes bootstrap from the moments: P_{n+1} = (z − β_n)P_n − γ_n²P_{n−1}, inner
// products ∫ f g e^{−NV} dz without conjugation. Needs K ≥ 2 n_max + 2 and
// bits ≥ 64 + 8 n_max. Computes h, β up to n_max and h_{n_max+1}. Throws NumericalError
// when |γ_n²| < 2^{−bits/2}(1 + |t|) (the orthogonal polynomial of degree n may not exist).
// Throws NumericalError when the string-equation residuals exceed 1e−8 (precision
// exhausted). log_Z_hint, when given, picks the 2πi-branch of log Z nearest to it.
RecurrenceTable recurrence(const MomentTable& mt, int n_max, const PrecisionContext& ctx,
                           const Complex* log_Z_hint = nullptr);

// γ_n²(β_{n−1} + β_n) + n/N and γ_{n+1}² + γ_n² + β_n² − t.
std::vector<std::pair<Complex, Complex>> string_residuals(const RecurrenceTable& rt);

struct TodaReport {
  Complex F_minus, F_0, F_plus;
  Complex second_difference;  // (F₊ − 2F₀ + F₋)/h²
  Complex gamma2;             // γ_N²(t, N)
  double residual = 0;        // max of the real and imaginary parts of the difference
};
TodaReport toda_check(const Complex& t, int N, double h_step, const PrecisionContext& ctx);

// Z_N(t) for N ≤ 3 by an N-fold product tanh–sinh rule on the truncated contour.
Complex brute_force_Z(const Complex& t, int N, const PrecisionContext& ctx);

// z = (3u)^{−1/3}ζ + 1/(6u) maps the t-model with t = 1/(4(3u)^{4/3}) to the u-model
// weight e^{−N(z²/2 − u z³)}; Z_N(u) = prefactor · Z_N(t).
struct UBridge {
  Complex t;
  Complex prefactor;  // (3u)^{−N²/3} e^{−N²/(108u²)}
  Complex c;          // (3u)^{1/3}, principal
};
UBridge u_model_bridge(const Complex& u, int N, const PrecisionContext& ctx);

// Z_N(u) by the product rule in the z variable on the image of the t-model contour.
Complex brute_force_Z_u(const Complex& u, int N, const PrecisionContext& ctx);

}  // namespace loggas
