#include "loggas/eqmeasure.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace loggas {

namespace {

constexpr double kPi = std::numbers::pi;

constexpr unsigned kG = CutGeometry::Before | CutGeometry::Support;

cd unit(const Complex& z) {
  Real m = abs(z);
  if (m == 0) return 0;
  return (z / m).to_cd();
}

// Lower precision and a fixed tolerance for potential-theoretic checks at the 1e−8 level.
PrecisionContext check_context(const PrecisionContext& ctx) {
  PrecisionContext c = ctx;
  c.bits = std::min(ctx.bits, 128);
  c.quad_tol = 1e-16;
  return c;
}

}  // namespace

SzegoData::SzegoData(const SpectralData& sd, const SContour& sc, const PrecisionContext& ctx)
    : sd_(sd), sc_(sc), cuts_(sd, sc), ctx_(ctx) {
  PrecisionScope ps(ctx_);
  h_ = (sd_.b - sd_.a) / 4;
  log_h_ = log(h_);
  // fix the constant so that log ζ vanishes at b: probe just outside b, opposite to J
  const auto& sp = cuts_.support().points();
  cd bd = sd_.b.to_cd();
  cd back = sp[sp.size() - 2] - bd;
  cd probe = bd - 1e-3 * cuts_.scale() * back / std::abs(back);
  Complex z(probe);
  Complex lz = log_w(z, Side::None, R(z)) - log_h_;
  Real k = round(lz.im / (2 * real_pi()));
  log_h_.im += 2 * real_pi() * k;
}

Complex SzegoData::V(const Complex& z) const {
  PrecisionScope ps(ctx_);
  return -(z * z * z) / 3 + sd_.t * z;
}

Complex SzegoData::R(const Complex& z, Side side) const {
  PrecisionScope ps(ctx_);
  Complex za = z - sd_.a;
  if (norm(za) == 0 || norm(z - sd_.b) == 0) return Complex(0);
  Complex r = za * sqrt((z - sd_.b) / za);
  cd zr = cuts_.reference_point(z.to_cd(), side, CutGeometry::Support);
  cd rr = cuts_.R(zr);
  if ((unit(r) * std::conj(rr)).real() < 0) r = -r;
  return r;
}

Complex SzegoData::sqrtQ(const Complex& z, Side side) const {
  PrecisionScope ps(ctx_);
  return (z - sd_.c) * R(z, side) / 2;
}

Complex SzegoData::log_D(const Complex& z, Side side) const {
  PrecisionScope ps(ctx_);
  const Complex& x = sd_.x;
  Complex Rz = R(z, side);
  return (3 * V(z) - 2 * x * x * x + (z * z + z * x - 2 * sd_.t) * Rz) / 6;
}

Complex SzegoData::D(const Complex& z, Side side) const {
  PrecisionScope ps(ctx_);
  return exp(log_D(z, side));
}

Complex SzegoData::F(const Complex& z, Side side) const {
  PrecisionScope ps(ctx_);
  return (z - sd_.x + R(z, side)) / (2 * h_);
}

// A = ½(u + 1/u), B = (i/2)(u − 1/u) with u = ((z−b)/(z−a))^{1/4} = √((F−1)/(F+1)).
Complex SzegoData::A(const Complex& z, Side side) const {
  PrecisionScope ps(ctx_);
  Complex f = F(z, side);
  Complex u = sqrt((f - 1) / (f + 1));
  return (u + 1 / u) / 2;
}

Complex SzegoData::B(const Complex& z, Side side) const {
  PrecisionScope ps(ctx_);
  Complex f = F(z, side);
  Complex u = sqrt((f - 1) / (f + 1));
  return unit_i() * (u - 1 / u) / 2;
}

Complex SzegoData::log_w(const Complex& z, Side side, const Complex& Rz) const {
  PrecisionScope ps(ctx_);
  Complex w = (z - sd_.x + Rz) / 2;
  cd zr = cuts_.reference_point(z.to_cd(), side, kG);
  cd xd = sd_.x.to_cd();
  const CutGeometry& cg = cuts_;
  double th = cg.unwrapped_arg([&](cd p) { return (p - xd + cg.R(p)) / 2.0; }, zr, kG);
  Complex L = log(w);
  Real k = round((Real(th) - L.im) / (2 * real_pi()));
  L.im += 2 * real_pi() * k;
  return L;
}

Complex SzegoData::g(const Complex& z, Side side) const {
  PrecisionScope ps(ctx_);
  return log_D(z, side) + log_w(z, side, R(z, side));
}

Complex SzegoData::polynomial_part(const Complex& z, const Complex& Rz) const {
  const Complex& x = sd_.x;
  return Rz * Rz * Rz / 3 + x * (z - x) * Rz;
}

Complex SzegoData::phi_b(const Complex& z, Side side) const {
  PrecisionScope ps(ctx_);
  Complex Rz = R(z, side);
  return polynomial_part(z, Rz) + 2 * (log_w(z, side, Rz) - log_h_);
}

Complex SzegoData::phi_b_near(const Complex& z, Side side, double im_hint) const {
  PrecisionScope ps(ctx_);
  Complex Rz = R(z, side);
  Complex p = polynomial_part(z, Rz);
  Complex lz = log((z - sd_.x + Rz) / (2 * h_));
  Real twopi = 2 * real_pi();
  // Im φ_b = Im p + 2 Im log ζ; pick the branch of log ζ nearest the hint
  Real k = round((Real(im_hint) - p.im - 2 * lz.im) / (2 * twopi));
  lz.im += twopi * k;
  return p + 2 * lz;
}

Complex SzegoData::phi_a(const Complex& z, Side side) const {
  PrecisionScope ps(ctx_);
  cd zd = z.to_cd();
  Side sb = side;
  // φ_a is continuous across the arcs before J, where φ_b needs a side
  if (sb == Side::None && cuts_.distance(zd, CutGeometry::Before) < 1e-9 * std::max(cuts_.scale(), std::abs(zd)))
    sb = Side::Plus;
  Complex pb = phi_b(z, sb);
  cd zr = cuts_.reference_point(zd, sb, CutGeometry::Before | CutGeometry::Support | CutGeometry::After);
  Real s = cuts_.left_of_contour(zr) ? 1 : -1;
  return pb - Complex(Real(0), 2 * real_pi() * s);
}

SzegoData szego(const SpectralData& sd, const PrecisionContext& ctx) {
  CriticalGraph g = critical_graph(sd, ctx);
  validate_graph(g, sd);
  SContour sc = build_scontour(sd, g, ctx);
  return SzegoData(sd, sc, ctx);
}

Complex phi(char e, const SzegoData& sz, const Complex& z, Side side) {
  if (e == 'a') return sz.phi_a(z, side);
  if (e == 'b') return sz.phi_b(z, side);
  throw ValidationError(std::string("phi: endpoint must be 'a' or 'b', got '") + e + "'");
}

Complex g_eval(const SzegoData& sz, const Complex& z, const PrecisionContext& ctx, Side side) {
  PrecisionScope ps(ctx);
  return sz.g(z, side);
}

// ---------------------------------------------------------------------------
// Integrals against dμ along J

namespace {

struct JPath {
  std::vector<cd> verts;  // a … b, with the probe's foot inserted when it is close to J
  int foot = -1;          // index of the inserted point
};

JPath support_path(const CutGeometry& cg, cd z) {
  const Polyline& sp = cg.support();
  Polyline simp = sp.simplified(1e-4 * cg.scale());
  JPath p;
  p.verts = simp.points();
  // insert the nearest point of J when z is near the support, so that z never lies
  // between the simplified path and J
  std::size_t ni = sp.nearest_index(z);
  double best = 1e300;
  cd foot;
  double foot_s = 0;
  const auto& pts = sp.points();
  const auto& cum = sp.cumulative_length();
  for (std::size_t i = (ni > 0 ? ni - 1 : 0); i + 1 < pts.size() && i <= ni; ++i) {
    cd d = pts[i + 1] - pts[i];
    double l2 = std::norm(d);
    double u = l2 > 0 ? std::clamp(((z - pts[i]) * std::conj(d)).real() / l2, 0.0, 1.0) : 0.0;
    cd c = pts[i] + u * d;
    if (std::abs(z - c) < best) {
      best = std::abs(z - c);
      foot = c;
      foot_s = cum[i] + u * std::sqrt(l2);
    }
  }
  if (best > 1e-3 * cg.scale()) return p;
  if (std::abs(foot - pts.front()) < 1e-14 * cg.scale()) {
    p.foot = 0;
    return p;
  }
  if (std::abs(foot - pts.back()) < 1e-14 * cg.scale()) {
    p.foot = static_cast<int>(p.verts.size()) - 1;
    return p;
  }
  std::size_t k = 1;
  while (k < p.verts.size() && cum[sp.nearest_index(p.verts[k])] < foot_s) ++k;
  const double hair = 1e-12 * cg.scale();
  if (std::abs(p.verts[k - 1] - foot) < hair) {
    p.foot = static_cast<int>(k - 1);
    return p;
  }
  if (k < p.verts.size() && std::abs(p.verts[k] - foot) < hair) {
    p.foot = static_cast<int>(k);
    return p;
  }
  p.verts.insert(p.verts.begin() + static_cast<long>(k), foot);
  p.foot = static_cast<int>(k);
  return p;
}

// ∫ log(z−s) dμ(s) along J with the logarithm continuous in s; at s = a its argument
// is anchor_arg (mod 2π) when anchor_arg is finite. When z lies on J the argument jumps
// by ±π at s = z; the real part does not depend on that choice because ∫dμ is real
// on both sub-arcs.
Complex log_integral(const SzegoData& sz, cd z, double anchor_arg, const PrecisionContext& ctx) {
  PrecisionScope ps(ctx);
  const CutGeometry& cg = sz.cuts();
  JPath path = support_path(cg, z);
  const auto& v = path.verts;
  const std::size_t nseg = v.size() - 1;
  const bool on_path = path.foot >= 0 && std::abs(z - v[path.foot]) <= 1e-12 * cg.scale();
  const int foot = on_path ? path.foot : -1;
  std::vector<Complex> vm;
  for (cd p : v) vm.emplace_back(p);
  vm.front() = sz.spectral().a;
  vm.back() = sz.spectral().b;
  Complex zm = on_path ? vm[foot] : Complex(z);

  const Complex w0 = -1 / (real_pi() * unit_i());
  Complex total;
  double prev_im = std::nan("");  // Im log(z−s) at the end of the previous segment
  for (std::size_t k = 0; k < nseg; ++k) {
    const int ki = static_cast<int>(k);
    double beta;
    if (foot == ki)
      beta = std::arg(v[k] - v[k + 1]);
    else if (foot == ki + 1)
      beta = std::arg(v[k + 1] - v[k]);
    else
      beta = std::arg(z - 0.5 * (v[k] + v[k + 1]));
    const Complex rot = expi(Real(-beta));
    double offset = 0;
    auto lg = [&](const Complex& s) {
      Complex l = log((zm - s) * rot);
      l.im += Real(beta + offset);
      return l;
    };
    if (foot != ki) {
      double target = k == 0 ? anchor_arg : prev_im;
      if (std::isfinite(target)) {
        double im0 = lg(vm[k]).im.convert_to<double>();
        offset = 2 * kPi * std::round((target - im0) / (2 * kPi));
      }
    }
    Endpoint ep = Endpoint::Regular;
    if (k == 0 && nseg == 1) ep = Endpoint::SqrtBoth;
    else if (k == 0) ep = Endpoint::SqrtStart;
    else if (k + 1 == nseg) ep = Endpoint::SqrtEnd;
    Integrand f = [&](const Complex& s) {
      // a node that rounds onto the probe carries no weight in the limit
      if (norm(zm - s) == 0) return Complex(0);
      return lg(s) * w0 * sz.sqrtQ(s, Side::Plus);
    };
    total += integrate_segment(f, vm[k], vm[k + 1], ep, ctx);
    prev_im = foot == ki + 1 ? std::nan("") : lg(vm[k + 1]).im.convert_to<double>();
  }
  return total;
}

}  // namespace

Complex g_quadrature(const SzegoData& sz, const Complex& z, const PrecisionContext& ctx) {
  const CutGeometry& cg = sz.cuts();
  cd zd = z.to_cd();
  cg.reference_point(zd, Side::None, kG);  // rejects points on the cut
  cd ad = sz.spectral().a.to_cd();
  double anchor = cg.unwrapped_arg([&](cd p) { return p - ad; }, zd, CutGeometry::Before);
  return log_integral(sz, zd, anchor, ctx);
}

double log_potential(const MeasureData& md, cd z, const PrecisionContext& ctx) {
  PrecisionContext c = check_context(ctx);
  PrecisionScope ps(c);
  return -log_integral(md.sz, z, std::nan(""), c).re.convert_to<double>();
}

// ---------------------------------------------------------------------------
// Lagrange constant

namespace {

// Value at 0 of the polynomial matching f and f′ at the nodes (Hermite divided differences).
Complex hermite_at_zero(const std::vector<Complex>& h, const std::vector<Complex>& f,
                        const std::vector<Complex>& fp) {
  const std::size_t n = 2 * h.size();
  std::vector<Complex> z(n), q(n);
  for (std::size_t i = 0; i < h.size(); ++i) {
    z[2 * i] = z[2 * i + 1] = h[i];
    q[2 * i] = q[2 * i + 1] = f[i];
  }
  std::vector<Complex> coef{q[0]};
  std::vector<Complex> col = q;
  for (std::size_t lvl = 1; lvl < n; ++lvl) {
    std::vector<Complex> next(n - lvl);
    for (std::size_t i = 0; i + lvl < n; ++i) {
      if (lvl == 1 && i % 2 == 0)
        next[i] = fp[i / 2];
      else
        next[i] = (col[i + 1] - col[i]) / (z[i + lvl] - z[i]);
    }
    coef.push_back(next[0]);
    col = std::move(next);
  }
  // Newton form evaluated at 0
  Complex acc = coef[n - 1];
  for (std::size_t k = n - 1; k-- > 0;) acc = coef[k] + (Complex(0) - z[k]) * acc;
  return acc;
}

}  // namespace

// E(Z) = V(Z) + φ_b(Z) − 2 log Z = ℓ* + O(1/Z), with the exact derivative
// E′(Z) = V′(Z) + 2Q^{1/2}(Z) − 2/Z. The extrapolation in h = 1/Z uses values and
// derivatives: each pair of radii gives an estimate, all three radii the returned value.
LagrangeEstimate lagrange_estimate(const SzegoData& sz, const PrecisionContext& ctx) {
  PrecisionScope ps(ctx);
  LagrangeEstimate est;
  const Complex& t = sz.spectral().t;
  const double base = 1 + abs(t).convert_to<double>();
  std::vector<Complex> h, f, fp;
  for (double p : {1e2, 1e3, 1e4}) {
    Complex Z(Real(0), Real(p) * Real(base));
    Complex e = sz.V(Z) + sz.phi_b(Z) - 2 * log(Z);
    Complex de = -Z * Z + t + 2 * sz.sqrtQ(Z) - 2 / Z;
    est.raw.push_back(e);
    h.push_back(1 / Z);
    f.push_back(e);
    fp.push_back(-Z * Z * de);  // dE/dh
  }
  est.value = hermite_at_zero(h, f, fp);
  Real spread = 0;
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j) {
      Complex pij = hermite_at_zero({h[i], h[j]}, {f[i], f[j]}, {fp[i], fp[j]});
      spread = rmax(spread, abs(pij - est.value));
    }
  est.spread = spread.convert_to<double>();
  return est;
}

Complex lagrange_constant(const SzegoData& sz, const PrecisionContext& ctx) {
  LagrangeEstimate e = lagrange_estimate(sz, ctx);
  if (!(e.spread <= 1e-10)) {
    std::ostringstream os;
    os << "Lagrange constant: extrapolated estimates disagree by " << e.spread;
    throw NumericalError(os.str());
  }
  return e.value;
}

Complex lagrange_constant(const SpectralData& sd, const PrecisionContext& ctx) {
  return lagrange_constant(szego(sd, ctx), ctx);
}

// ---------------------------------------------------------------------------
// Density

namespace {

double slope_fit(const std::vector<double>& lx, const std::vector<double>& ly) {
  const double n = static_cast<double>(lx.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

void density(MeasureData& md, int samples, const PrecisionContext& ctx) {
  if (samples < 2) throw ValidationError("density needs at least two samples");
  PrecisionScope ps(ctx);
  const SzegoData& sz = md.sz;
  const Polyline& sp = sz.cuts().support();
  const double L = sp.length();
  const Complex i = unit_i();

  std::vector<double> s_list;
  for (int k = 0; k < samples; ++k) s_list.push_back(L * k / (samples - 1));
  std::vector<double> geo;
  for (int k = 2; k <= 8; ++k) geo.push_back(L * std::pow(10.0, -k));
  for (double g : geo) {
    s_list.push_back(g);
    s_list.push_back(L - g);
  }
  std::sort(s_list.begin(), s_list.end());

  md.density.clear();
  md.min_density = 1e300;
  std::vector<double> la_x, la_y, lb_x, lb_y;
  const auto& pts = sp.points();
  const auto& cum = sp.cumulative_length();
  for (double s : s_list) {
    cd z = sp.at_length(s);
    std::size_t seg = std::upper_bound(cum.begin(), cum.end(), s) - cum.begin();
    seg = std::clamp<std::size_t>(seg, 1, pts.size() - 1);
    cd tau = pts[seg] - pts[seg - 1];
    tau /= std::abs(tau);
    Complex zm(z);
    if (s == 0) zm = sz.spectral().a;
    if (s == L) zm = sz.spectral().b;
    Complex q = sz.sqrtQ(zm, Side::Plus);
    Complex dmu = -(q * Complex(tau)) / (real_pi() * i);
    double mag = (abs(q) / real_pi()).convert_to<double>();
    double dens = dmu.re < 0 ? -mag : mag;
    md.density.push_back({z, s, dens});
    md.min_density = std::min(md.min_density, dens);
    if (dens > 0) {
      for (double g : geo) {
        if (std::abs(s - g) < 1e-15 * L && g <= L * 1e-3) {
          la_x.push_back(std::log(g));
          la_y.push_back(std::log(dens));
        }
        if (std::abs(s - (L - g)) < 1e-15 * L && g <= L * 1e-3) {
          lb_x.push_back(std::log(g));
          lb_y.push_back(std::log(dens));
        }
      }
    }
  }
  if (md.min_density < -1e-12) {
    std::ostringstream os;
    os << "negative equilibrium density " << md.min_density << " (branch misassignment)";
    throw NumericalError(os.str());
  }
  md.rate_a = la_x.size() >= 2 ? slope_fit(la_x, la_y) : std::nan("");
  md.rate_b = lb_x.size() >= 2 ? slope_fit(lb_x, lb_y) : std::nan("");

  // mass along a simplified copy of J; the + branch is continued off the cut, so any
  // nearby path from a to b gives the same integral
  Polyline simp = sp.simplified(1e-4 * sz.cuts().scale());
  std::vector<Complex> verts;
  for (cd p : simp.points()) verts.emplace_back(p);
  verts.front() = sz.spectral().a;
  verts.back() = sz.spectral().b;
  const Complex w0 = -1 / (real_pi() * i);
  Integrand f = [&](const Complex& s) { return w0 * sz.sqrtQ(s, Side::Plus); };
  Complex m = integrate_contour(f, verts, Endpoint::SqrtBoth, ctx);
  md.mass = m.re.convert_to<double>();
  if (abs(m.im) > Real(1e-8)) throw NumericalError("equilibrium mass is not real");
}

MeasureData equilibrium_measure(const SzegoData& sz, int samples, const PrecisionContext& ctx) {
  MeasureData md{sz, {}, 0, Complex(), 0, 0, 0};
  density(md, samples, ctx);
  md.ell_star = lagrange_constant(sz, ctx);
  return md;
}

// ---------------------------------------------------------------------------
// Variational checks

namespace {

double el_value(const MeasureData& md, cd z, double ell, const PrecisionContext& ctx) {
  PrecisionScope ps(ctx);
  double u = log_potential(md, z, ctx);
  double v = md.sz.V(Complex(z)).re.convert_to<double>();
  return 2 * u + v - ell;
}

}  // namespace

ELReport euler_lagrange_check(const MeasureData& md, const std::vector<cd>& probes,
                              const PrecisionContext& ctx) {
  ELReport rep;
  rep.ell = md.ell_star.re.convert_to<double>();
  bool any_off = false;
  rep.min_slack = 0;
  const CutGeometry& cg = md.sz.cuts();
  for (cd z : probes) {
    ELProbe p;
    p.z = z;
    p.on_support = cg.distance(z, CutGeometry::Support) <= 1e-8 * std::max(1.0, cg.scale());
    p.on_contour = p.on_support || cg.distance(z, CutGeometry::Before | CutGeometry::After) <=
                                       1e-6 * std::max(cg.scale(), std::abs(z));
    p.value = el_value(md, z, rep.ell, ctx);
    if (p.on_support) {
      rep.max_support_deviation = std::max(rep.max_support_deviation, std::abs(p.value));
    } else if (p.on_contour) {
      rep.min_slack = any_off ? std::min(rep.min_slack, p.value) : p.value;
      any_off = true;
    }
    rep.probes.push_back(p);
  }
  rep.ok = rep.max_support_deviation <= 1e-6 && (!any_off || rep.min_slack >= -1e-8);
  return rep;
}

SPropertyReport s_property_check(const MeasureData& md, int points, double step,
                                 const PrecisionContext& ctx) {
  SPropertyReport rep;
  const SzegoData& sz = md.sz;
  const Polyline& sp = sz.cuts().support();
  const auto& pts = sp.points();
  const double ell = md.ell_star.re.convert_to<double>();
  const double h = step * sz.cuts().scale();
  PrecisionScope ps(ctx);
  for (int k = 0; k < points; ++k) {
    double s = sp.length() * (k + 0.5) / points;
    std::size_t idx = sp.nearest_index(sp.at_length(s));
    idx = std::clamp<std::size_t>(idx, 1, pts.size() - 2);
    cd p0 = pts[idx];
    // exact trajectory direction at p0: Q^{1/2} dz imaginary
    cd q = sz.sqrtQ(Complex(p0), Side::Plus).to_cd();
    cd tau = cd(0, 1) * std::conj(q) / std::abs(q);
    if ((tau * std::conj(pts[idx + 1] - pts[idx - 1])).real() < 0) tau = -tau;
    cd n = cd(0, 1) * tau;
    double f0 = el_value(md, p0, ell, ctx);
    double fp1 = el_value(md, p0 + h * n, ell, ctx), fp2 = el_value(md, p0 + 2 * h * n, ell, ctx);
    double fm1 = el_value(md, p0 - h * n, ell, ctx), fm2 = el_value(md, p0 - 2 * h * n, ell, ctx);
    double dp = (-3 * f0 + 4 * fp1 - fp2) / (2 * h);
    double dm = (-3 * f0 + 4 * fm1 - fm2) / (2 * h);
    rep.points.push_back(p0);
    rep.d_plus.push_back(dp);
    rep.d_minus.push_back(dm);
    rep.max_mismatch = std::max(rep.max_mismatch, std::abs(dp - dm));
  }
  return rep;
}

}  // namespace loggas
