#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "loggas/eqmeasure.hpp"

namespace loggas {

namespace {

constexpr double kSigma0 = 50;
constexpr int kOrder = 72;  // truncation order in s = σ^{−1/2}

using Series = std::vector<Real>;

Series s_mul(const Series& a, const Series& b) {
  Series c(kOrder, Real(0));
  for (int i = 0; i < kOrder; ++i) {
    if (a[i] == 0) continue;
    for (int j = 0; i + j < kOrder; ++j) c[i + j] += a[i] * b[j];
  }
  return c;
}

Series s_div(const Series& a, const Series& b) {
  Series c(kOrder, Real(0));
  for (int n = 0; n < kOrder; ++n) {
    Real acc = a[n];
    for (int j = 1; j <= n; ++j) acc -= b[j] * c[n - j];
    c[n] = acc / b[0];
  }
  return c;
}

Series s_add(const Series& a, const Series& b, const Real& cb = Real(1)) {
  Series c(kOrder);
  for (int i = 0; i < kOrder; ++i) c[i] = a[i] + cb * b[i];
  return c;
}

Series monomial(int k, const Real& c = Real(1)) {
  Series s(kOrder, Real(0));
  if (k < kOrder) s[k] = c;
  return s;
}

// h(σ) = −1/(2x) + 7x′/6 + σx″/3 = Σ_k H_k σ^{−(k+1)/2} for σ → +∞ on the branch
// x = −√σ + 1/(2σ) + …. With x = X/s, s = σ^{−1/2}:
//   −1/(2x) = −s/(2X), x′ = X²s/(2X³+s³), σx″ = 2X³(s³−X³)s/(2X³+s³)³.
Series tail_coefficients() {
  // X = −y with y³ − y + s³ = 0, y(0) = 1, by Newton iteration on series
  Series y = monomial(0);
  Series u = monomial(3);
  for (int it = 0; it < 10; ++it) {
    Series y2 = s_mul(y, y);
    Series f = s_add(s_add(s_mul(y2, y), y, Real(-1)), u);
    Series fp = s_add(s_mul(y2, monomial(0, Real(3))), monomial(0), Real(-1));
    y = s_add(y, s_div(f, fp), Real(-1));
  }
  Series X = s_mul(y, monomial(0, Real(-1)));
  Series X3 = s_mul(s_mul(X, X), X);
  Series den = s_add(s_mul(X3, monomial(0, Real(2))), u);  // 2X³ + s³
  Series t1 = s_div(monomial(0, Real(-0.5)), X);
  Series t2 = s_div(s_mul(s_mul(X, X), monomial(0, Real(7) / 6)), den);
  Series num3 = s_mul(s_mul(X3, s_add(u, X3, Real(-1))), monomial(0, Real(2) / 3));
  Series t3 = s_div(num3, s_mul(s_mul(den, den), den));
  return s_add(s_add(t1, t2), t3);  // H, with h = s·H(s)
}

// −∫_{Σ₀}^{∞} (t − σ) h(σ) dσ from the series.
Complex tail_integral(const Complex& t) {
  Series H = tail_coefficients();
  const Real sig0(kSigma0);
  for (int k = 0; k <= 3; ++k)
    if (abs(H[k]) > Real(1e-30))
      throw NumericalError("free-energy tail series does not decay fast enough");
  Complex acc;
  for (int k = 4; k < kOrder; ++k) {
    if (H[k] == 0) continue;
    Real p = Real(k + 1) / 2;
    Real i1 = pow(sig0, 1 - p) / (p - 1);
    Real i2 = pow(sig0, 2 - p) / (p - 2);
    acc -= H[k] * (t * i1 - Complex(i2));
  }
  return acc;
}

Complex newton_x(const Complex& sigma, Complex x) {
  const Real eps = pow(Real(2), 8 - static_cast<int>(Real::default_precision() * 3.32));
  for (int it = 0; it < 60; ++it) {
    Complex f = x * x * x - sigma * x - 1;
    Complex dx = f / (3 * x * x - sigma);
    x -= dx;
    if (abs(dx) <= abs(x) * eps) break;
  }
  return x;
}

struct Leg {
  Complex p0, p1;
  std::vector<double> us;   // fractions along the leg
  std::vector<Complex> xs;  // x there
};

// distance from the segment [p, q] to the nearest branch point of x(t), 4t³ = 27
double branch_point_gap(cd p, cd q) {
  const double tc = 3 * std::pow(2.0, -2.0 / 3);
  double best = 1e300;
  for (int k = 0; k < 3; ++k) {
    cd bp = std::polar(tc, 2 * std::numbers::pi * k / 3);
    cd d = q - p;
    double u = std::clamp(((bp - p) * std::conj(d)).real() / std::norm(d), 0.0, 1.0);
    best = std::min(best, std::abs(p + u * d - bp));
  }
  return best;
}

// F⁽⁰⁾ along the polygon verts, which starts at Σ₀ and ends at t. Returns false with a
// message when the path leaves the one-cut region or lands on another branch of x.
bool evaluate_along(const Complex& t, const std::vector<Complex>& verts, const PrecisionContext& ctx,
                    Complex& out, std::string& err) {
  // the region test only needs the sign of the classifier integral
  PrecisionContext region_ctx = PrecisionContext::with_bits(64);
  region_ctx.quad_tol = 1e-12;
  std::vector<Leg> legs;
  Complex x = newton_x(verts.front(), Complex(Real(-std::sqrt(kSigma0))));
  Real arg_track = arg(-2 * x);
  for (std::size_t k = 1; k < verts.size(); ++k) {
    Leg leg{verts[k - 1], verts[k], {}, {}};
    const cd p0 = leg.p0.to_cd(), d = (leg.p1 - leg.p0).to_cd();
    const double len = std::abs(d);
    if (len == 0) continue;
    if (branch_point_gap(p0, p0 + d) < 0.05) {
      err = "free-energy path runs through a branch point of x(t)";
      return false;
    }
    leg.us.push_back(0);
    leg.xs.push_back(x);
    double u = 0;
    for (int j = 1; u < 1; ++j) {
      const double r = std::abs(p0 + u * d);
      u = std::min(1.0, u + 0.02 * std::max(r, 1.0) / len);
      Complex sig = u == 1 ? leg.p1 : leg.p0 + (leg.p1 - leg.p0) * Real(u);
      Complex nx = newton_x(sig, x);
      arg_track += arg(nx / x);
      x = nx;
      leg.us.push_back(u);
      leg.xs.push_back(x);
      if (j % 16 == 0 || u == 1) {
        if (classify(sig, region_ctx).phase == Phase::OutsideOneCut) {
          std::ostringstream os;
          os << "free-energy path leaves the one-cut region near t = " << sig.to_cd();
          err = os.str();
          return false;
        }
      }
    }
    legs.push_back(std::move(leg));
  }
  SpectralData sd = branch_x(t, ctx);
  if (abs(sd.x - x) > Real(1e-20) * (1 + abs(x))) {
    err = "free-energy path ends on a different branch of x(t)";
    return false;
  }

  Complex path_part;
  for (const Leg& leg : legs) {
    Integrand f = [&](const Complex& sig) {
      const double u = ((sig - leg.p0) / (leg.p1 - leg.p0)).re.convert_to<double>();
      auto it = std::lower_bound(leg.us.begin(), leg.us.end(), u);
      std::size_t j = std::min<std::size_t>(it - leg.us.begin(), leg.us.size() - 1);
      if (j > 0 && u - leg.us[j - 1] < leg.us[j] - u) --j;
      Complex xx = newton_x(sig, leg.xs[j]);
      Complex x3 = xx * xx * xx;
      Complex xp = xx * xx / (2 * x3 + 1);
      Complex xpp = 2 * xx * xp * (1 - x3) / ((2 * x3 + 1) * (2 * x3 + 1));
      Complex h = -1 / (2 * xx) + (7 * xp + 2 * sig * xpp) / 6;
      return (t - sig) * h;
    };
    // pieces short against the distance to the branch points and to 0
    const cd q0 = leg.p0.to_cd(), dq = (leg.p1 - leg.p0).to_cd();
    double u0 = 0;
    while (u0 < 1) {
      double u1 = 1;
      for (;;) {
        cd a = q0 + u0 * dq, b = q0 + u1 * dq;
        double lim = 0.5 * std::min(branch_point_gap(a, b), std::max(1.0, std::min(std::abs(a), std::abs(b))));
        if (std::abs(b - a) <= lim || u1 - u0 < 1e-6) break;
        u1 = u0 + 0.5 * (u1 - u0);
      }
      Complex s0 = leg.p0 + (leg.p1 - leg.p0) * Real(u0);
      Complex s1 = u1 == 1 ? leg.p1 : leg.p0 + (leg.p1 - leg.p0) * Real(u1);
      path_part += integrate_segment(f, s0, s1, Endpoint::Regular, ctx);
      u0 = u1;
    }
  }

  Complex lg = log(-2 * x);
  Real k = round((arg_track - lg.im) / (2 * real_pi()));
  lg.im += 2 * real_pi() * k;
  out = 1 - Real(2) / 3 * x * x * x - lg / 2 + tail_integral(t) + path_part;
  return true;
}

}  // namespace

Complex genus_zero_free_energy(const Complex& t, const PrecisionContext& ctx) {
  ctx.validate();
  PrecisionScope ps(ctx);
  const cd td = t.to_cd();
  const double r = std::abs(td);
  if (r == 0) throw ValidationError("free energy path needs t ≠ 0");
  const double th = std::arg(td);

  // arc from Σ₀ to Σ₀e^{iψ}, then straight to t. ψ = arg t first; nearby angles and the
  // long way round step off rays through t_cr, ωt_cr, ω²t_cr, where x(t) branches.
  std::string err;
  // offsets turning away from the two-cut sector around arg π/3 are tried first
  const double away = std::remainder(th - std::numbers::pi / 3, 2 * std::numbers::pi) >= 0 ? 1 : -1;
  for (int way = 0; way < 2; ++way) {
    for (double dpsi : {0.0, 0.3, -0.3, 0.7, -0.7, 1.2, -1.2}) {
      dpsi *= away;
      double sweep = th + dpsi;
      if (way == 1) sweep += sweep >= 0 ? -2 * std::numbers::pi : 2 * std::numbers::pi;
      std::vector<Complex> verts{Complex(Real(kSigma0))};
      const int narc = std::max(1, static_cast<int>(std::ceil(std::abs(sweep) / 0.05)));
      for (int k = 1; k <= narc; ++k) verts.push_back(polar(Real(kSigma0), Real(sweep * k / narc)));
      if (abs(verts.back() - t) > Real(1e-14 * kSigma0)) verts.push_back(t);
      else verts.back() = t;
      Complex out;
      try {
        if (evaluate_along(t, verts, ctx, out, err)) return out;
      } catch (const NumericalError& e) {
        err = e.what();
      }
    }
  }
  throw ValidationError(err.empty() ? "no admissible free-energy path" : err);
}

Complex genus_zero_free_energy(const Complex& t, const std::vector<Complex>& waypoints,
                               const PrecisionContext& ctx) {
  ctx.validate();
  PrecisionScope ps(ctx);
  std::vector<Complex> verts{Complex(Real(kSigma0))};
  verts.insert(verts.end(), waypoints.begin(), waypoints.end());
  verts.push_back(t);
  Complex out;
  std::string err;
  if (!evaluate_along(t, verts, ctx, out, err)) throw ValidationError(err);
  return out;
}

}  // namespace loggas
