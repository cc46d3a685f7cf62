#pragma once

#include <functional>
#include <vector>

#include "loggas/mpnum.hpp"
#include "loggas/quaddiff.hpp"
#include "loggas/spectral.hpp"

namespace loggas {

// Side of a cut. Plus is the left of Γ_t (J oriented from a to b), Minus the right.
// Near a cut a side flag selects the branch continued from that side.
enum class Side { None, Plus, Minus };

// The cuts in double precision: the support J, the contour arcs before it (from
// e^{πi}∞ to a) and after it (from b on). Open ends are extended by their rays.
// The traced polylines are the cuts; every evaluator resolves branches against them.
class CutGeometry {
 public:
  enum Group : unsigned { Before = 1, Support = 2, After = 4 };

  CutGeometry() = default;
  CutGeometry(const SpectralData& sd, const SContour& sc);

  const Polyline& support() const { return support_; }
  double scale() const { return scale_; }
  double extent() const { return extent_; }

  // Distance to the arcs (and rays) of the given groups.
  double distance(cd z, unsigned groups) const;
  // A point where the branch requested by (z, side) can be read off without
  // ambiguity. Throws NumericalError when z lies on a cut of `groups` and side is None.
  cd reference_point(cd z, Side side, unsigned groups) const;
  // Principal √((z−a)(z−b)), sign-flipped between J and the segment [a,b]: ~z at ∞, cut on J.
  cd R(cd z) const;
  bool inside_lens(cd z) const;
  // Left of the simple curve formed by the arc chain reaching a, J and the chain leaving b.
  bool left_of_contour(cd z) const;
  // arg w(z) continued from infinity, where it agrees with arg z away from e^{πi}∞,
  // along a path that avoids the cuts of `groups`. z must be a reference point.
  double unwrapped_arg(const std::function<cd(cd)>& w, cd z, unsigned groups) const;

 private:
  struct Arc {
    Polyline poly;
    unsigned group = 0;
    bool has_ray_in = false, has_ray_out = false;
    cd dir_in, dir_out;  // unit directions of the rays, pointing to infinity
  };
  struct EndDir {
    double theta;  // direction leaving the endpoint
    bool leaving;  // arc orientation leaves the endpoint
    unsigned group;
  };
  struct Hit {
    double d = 1e300;
    cd p, tangent;
  };

  Hit nearest(cd z, unsigned groups) const;
  bool blocked(cd p, cd q, unsigned groups) const;
  double walk(const std::function<cd(cd)>& w, const std::vector<cd>& path) const;

  cd a_, b_;
  double scale_ = 1, extent_ = 1;
  std::vector<Arc> arcs_;
  Polyline support_;
  std::vector<EndDir> dirs_a_, dirs_b_;
  std::vector<cd> chain_;  // simple curve for left_of_contour
  cd chain_in_, chain_out_;
};

// Szegő-type data of the one-cut configuration: evaluators for R, Q^{1/2}, D, A, B,
// F, g, φ_a, φ_b with the branches of the g-function construction. Values can be
// shared read-only between threads.
class SzegoData {
 public:
  SzegoData(const SpectralData& sd, const SContour& sc, const PrecisionContext& ctx);

  const SpectralData& spectral() const { return sd_; }
  const SContour& contour() const { return sc_; }
  const CutGeometry& cuts() const { return cuts_; }
  const PrecisionContext& context() const { return ctx_; }

  Complex V(const Complex& z) const;  // −z³/3 + t z
  Complex R(const Complex& z, Side side = Side::None) const;
  Complex sqrtQ(const Complex& z, Side side = Side::None) const;  // ½(z−c)R ~ z²/2
  Complex log_D(const Complex& z, Side side = Side::None) const;
  Complex D(const Complex& z, Side side = Side::None) const;
  Complex A(const Complex& z, Side side = Side::None) const;
  Complex B(const Complex& z, Side side = Side::None) const;
  Complex F(const Complex& z, Side side = Side::None) const;
  // g(z) = log D + log((z − x + R)/2), cut along Γ_t(e^{πi}∞, b].
  Complex g(const Complex& z, Side side = Side::None) const;
  Complex phi_b(const Complex& z, Side side = Side::None) const;
  Complex phi_a(const Complex& z, Side side = Side::None) const;
  // φ_b with the logarithm's branch chosen nearest to Im φ_b = im_hint. Cheap; for
  // iterations that already know the value approximately.
  Complex phi_b_near(const Complex& z, Side side, double im_hint) const;

 private:
  Complex log_w(const Complex& z, Side side, const Complex& Rz) const;
  Complex polynomial_part(const Complex& z, const Complex& Rz) const;

  SpectralData sd_;
  SContour sc_;
  CutGeometry cuts_;
  PrecisionContext ctx_;
  Complex h_;      // (b−a)/4
  Complex log_h_;  // branch fixed by φ_b(b) = 0
};

// Builds the critical graph and S-contour of sd first.
SzegoData szego(const SpectralData& sd, const PrecisionContext& ctx);

// φ_e for e = 'a' or 'b'.
Complex phi(char e, const SzegoData& sz, const Complex& z, Side side = Side::None);

Complex g_eval(const SzegoData& sz, const Complex& z, const PrecisionContext& ctx,
               Side side = Side::None);
// ∫ log(z−s) dμ(s) by quadrature along J, the logarithm continued along J from its
// branch at a with the cut Γ_t(e^{πi}∞, a].
Complex g_quadrature(const SzegoData& sz, const Complex& z, const PrecisionContext& ctx);

// lim (V(Z) + φ_b(Z) − 2 log Z) from Z = iρ, ρ ∈ {10², 10³, 10⁴}(1+|t|), extrapolated
// in 1/Z from values and exact derivatives. Throws NumericalError when the pairwise
// estimates differ from the three-radius value by more than 1e−10.
struct LagrangeEstimate {
  Complex value;
  std::vector<Complex> raw;  // V + φ_b − 2 log Z at the three radii
  double spread = 0;         // max distance of the pairwise estimates from value
};
LagrangeEstimate lagrange_estimate(const SzegoData& sz, const PrecisionContext& ctx);
Complex lagrange_constant(const SzegoData& sz, const PrecisionContext& ctx);
Complex lagrange_constant(const SpectralData& sd, const PrecisionContext& ctx);

struct DensitySample {
  cd z;
  double arclength = 0;  // along the traced support from a
  double density = 0;    // dμ/|dz|
};

struct MeasureData {
  SzegoData sz;
  std::vector<DensitySample> density;
  double mass = 0;
  Complex ell_star;
  double min_density = 0;
  // log–log slopes of the density at the two endpoints
  double rate_a = 0, rate_b = 0;
};

// Samples dμ = −(1/πi) Q_+^{1/2} dz along J (evenly in arclength plus geometric
// refinements at both ends), integrates the mass, and fills ℓ*. Throws NumericalError
// on density below −1e−12.
MeasureData equilibrium_measure(const SzegoData& sz, int samples, const PrecisionContext& ctx);
void density(MeasureData& md, int samples, const PrecisionContext& ctx);

// U^μ(z) = ∫ log 1/|z−s| dμ(s), by quadrature along J.
double log_potential(const MeasureData& md, cd z, const PrecisionContext& ctx);

struct ELProbe {
  cd z;
  bool on_support = false;
  // on the contour arcs; off Γ the inequality need not hold (2U + Re V − ℓ is
  // negative next to J in the normal direction), so such probes are only reported
  bool on_contour = false;
  double value = 0;  // 2U^μ(z) + Re V(z) − ℓ
};
struct ELReport {
  std::vector<ELProbe> probes;
  double ell = 0;
  double max_support_deviation = 0;
  double min_slack = 0;  // over probes on Γ off J (0 if none)
  bool ok = true;        // deviation ≤ 1e−6 and slack ≥ −1e−8
};
ELReport euler_lagrange_check(const MeasureData& md, const std::vector<cd>& probes,
                              const PrecisionContext& ctx);

// Normal derivatives of 2U^μ + Re V from both sides at interior points of J.
struct SPropertyReport {
  std::vector<cd> points;
  std::vector<double> d_plus, d_minus;
  double max_mismatch = 0;
};
SPropertyReport s_property_check(const MeasureData& md, int points, double step,
                                 const PrecisionContext& ctx);

// Genus-zero free energy 1 − (2/3)x³ − ½log(−2x) + ∫_∞^t∫_∞^τ(−1/(2x) + (7x′ + 2σx″)/6),
// integrated from ∞ along the real ray to Σ₀ = 50, an arc to arg t, then a ray to t.
Complex genus_zero_free_energy(const Complex& t, const PrecisionContext& ctx);
// The same along straight legs Σ₀ → waypoints → t. Throws ValidationError when the
// path leaves the one-cut region or ends on another branch of x.
Complex genus_zero_free_energy(const Complex& t, const std::vector<Complex>& waypoints,
                               const PrecisionContext& ctx);

}  // namespace loggas
