#include "loggas/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <sstream>

namespace loggas {

namespace mp = boost::multiprecision;

namespace {

const double kTcr = 3.0 * std::pow(2.0, -2.0 / 3.0);
const cd kOmega = std::polar(1.0, 2 * M_PI / 3);

std::string fmt(cd z) {
  std::ostringstream os;
  os.precision(12);
  os << z.real() << (z.imag() < 0 ? "-" : "+") << std::abs(z.imag()) << "i";
  return os.str();
}

// A cut system for the one-cut branch of x(t): it joins both branch points to a
// common point and runs off to infinity, staying inside the two-cut side.
bool crosses_cut(cd p, cd q) {
  const cd P = 2.0 * std::polar(1.0, M_PI / 3);
  const cd Far = P + 1e7 * std::polar(1.0, M_PI / 3);
  const std::array<std::pair<cd, cd>, 3> cuts{
      {{cd(kTcr, 0), P}, {kOmega * kTcr, P}, {P, Far}}};
  auto cross = [](cd a, cd b, cd c, cd d) {
    auto orient = [](cd u, cd v, cd w) { return ((v - u) * std::conj(w - u)).imag(); };
    double o1 = orient(a, b, c), o2 = orient(a, b, d);
    double o3 = orient(c, d, a), o4 = orient(c, d, b);
    return ((o1 > 0) != (o2 > 0)) && ((o3 > 0) != (o4 > 0));
  };
  for (auto& [c, d] : cuts)
    if (cross(p, q, c, d)) return true;
  return false;
}

double seg_point_dist(cd p, cd a, cd b) {
  cd d = b - a;
  double l2 = std::norm(d);
  double s = l2 > 0 ? std::clamp(((p - a) * std::conj(d)).real() / l2, 0.0, 1.0) : 0.0;
  return std::abs(p - (a + s * d));
}

std::vector<cd> continuation_path(cd t) {
  const cd w1 = kTcr * cd(1, -0.3);
  const cd w2 = kOmega * kTcr * cd(1, 0.3);
  const std::vector<std::vector<cd>> candidates{
      {0, t}, {0, w1, t}, {0, w2, t}, {0, w1, cd(3 * kTcr, -kTcr), t}};
  const std::array<cd, 2> bps{cd(kTcr, 0), kOmega * kTcr};
  for (const auto& path : candidates) {
    bool ok = true;
    for (std::size_t i = 1; i < path.size() && ok; ++i) {
      if (crosses_cut(path[i - 1], path[i])) ok = false;
      // legs must not graze a branch point unless the path ends there
      for (cd bp : bps) {
        double d = seg_point_dist(bp, path[i - 1], path[i]);
        double dend = std::abs(bp - path[i]);
        if (d < 1e-3 * kTcr && !(i + 1 == path.size() && std::abs(d - dend) < 1e-12)) ok = false;
      }
    }
    if (ok) return path;
  }
  return {};
}

struct Tracked {
  cd x;
  cd sqrt_x;
};

Tracked track_root(const std::vector<cd>& path) {
  cd x = kOmega;
  cd sx = std::polar(1.0, M_PI / 3);
  for (std::size_t leg = 1; leg < path.size(); ++leg) {
    cd a = path[leg - 1], b = path[leg];
    double tau = 0, h = 0.01;
    while (tau < 1) {
      double hn = std::min(h, 1 - tau);
      cd t = a + (b - a) * (tau + hn);
      cd xn = x;
      for (int it = 0; it < 30; ++it) {
        cd f = xn * xn * xn - t * xn - 1.0;
        cd fp = 3.0 * xn * xn - t;
        if (std::abs(fp) == 0) break;
        cd dx = f / fp;
        xn -= dx;
        if (std::abs(dx) < 1e-16 * (1 + std::abs(xn))) break;
      }
      // the other two roots solve r² + x r + x² − t = 0
      cd disc = std::sqrt(4.0 * t - 3.0 * xn * xn);
      cd r1 = (-xn + disc) / 2.0, r2 = (-xn - disc) / 2.0;
      double dmin = std::min(std::abs(xn - r1), std::abs(xn - r2));
      double resid = std::abs(xn * xn * xn - t * xn - 1.0);
      if (std::abs(xn - x) > 0.2 * dmin || resid > 1e-8 * (1 + std::abs(t))) {
        h = hn / 2;
        if (h < 1e-13) {
          std::ostringstream os;
          os << "branch continuation collides with another root near t = " << fmt(t);
          throw NumericalError(os.str());
        }
        continue;
      }
      tau += hn;
      x = xn;
      cd s = std::sqrt(x);
      sx = std::abs(s - sx) <= std::abs(s + sx) ? s : -s;
      h = std::min(2 * hn, 0.02);
    }
  }
  return {x, sx};
}

SpectralData finish_branch(const Complex& t, const Tracked& tr, const PrecisionContext& ctx) {
  PrecisionScope scope(ctx);
  SpectralData sd;
  sd.bits = ctx.bits;
  sd.t = t;
  CubicRoots cr = cubic_roots(t, ctx);
  Complex xd(tr.x);
  int best = 0;
  for (int i = 1; i < 3; ++i)
    if (abs(cr.roots[i] - xd) < abs(cr.roots[best] - xd)) best = i;
  sd.x = cr.roots[best];
  Complex s = sqrt(sd.x);
  Complex sxd(tr.sqrt_x);
  sd.sqrt_x = abs(s - sxd) <= abs(s + sxd) ? s : -s;
  return sd;
}

}  // namespace

std::string to_string(Phase p) {
  switch (p) {
    case Phase::OneCutInterior: return "one-cut-interior";
    case Phase::SplitBoundary: return "split-boundary";
    case Phase::BirthBoundaryA: return "birth-boundary-a";
    case Phase::BirthBoundaryB: return "birth-boundary-b";
    case Phase::CriticalPoint: return "critical-point";
    case Phase::CriticalPointRotated: return "critical-point-rotated";
    case Phase::OutsideOneCut: return "outside-one-cut";
  }
  return "?";
}

std::string to_string(GraphCase g) {
  switch (g) {
    case GraphCase::A: return "a";
    case GraphCase::B: return "b";
    case GraphCase::C: return "c";
    case GraphCase::D: return "d";
    case GraphCase::E: return "e";
    case GraphCase::F: return "f";
    case GraphCase::G: return "g";
    case GraphCase::BoundaryCrit: return "boundary-critical";
    case GraphCase::BoundarySplit: return "boundary-split";
    case GraphCase::BoundaryBirth: return "boundary-birth";
    case GraphCase::None: return "none";
  }
  return "?";
}

Complex t_critical(const PrecisionContext& ctx) {
  PrecisionScope scope(ctx);
  return Complex(Real(3) / mp::cbrt(Real(4)));
}

Complex t_of_x(const Complex& x) { return x * x - Complex(1) / x; }

SpectralData branch_x_along(const std::vector<cd>& path, const Complex& t,
                            const PrecisionContext& ctx) {
  if (path.size() < 2 || std::abs(path.front()) != 0)
    throw ValidationError("continuation path must start at t = 0");
  Tracked tr = track_root(path);
  SpectralData sd = finish_branch(t, tr, ctx);
  endpoints(sd, ctx);
  return sd;
}

SpectralData branch_x(const Complex& t, const PrecisionContext& ctx) {
  ctx.validate();
  cd td = t.to_cd();
  if (!std::isfinite(td.real()) || !std::isfinite(td.imag())) throw ValidationError("t is not finite");
  std::vector<cd> path = continuation_path(td);
  if (path.empty())
    throw NumericalError("no continuation path from 0 to t = " + fmt(td) +
                         " avoids the two-cut side");
  path.back() = td;
  return branch_x_along(path, t, ctx);
}

void endpoints(SpectralData& sd, const PrecisionContext& ctx) {
  PrecisionScope scope(ctx);
  Complex i = unit_i();
  Complex r = i * mp::sqrt(Real(2)) / sd.sqrt_x;
  sd.a = sd.x - r;
  sd.b = sd.x + r;
  sd.c = -sd.x;
  sd.C = (sd.a * sd.b * sd.c * sd.c - sd.t * sd.t) / 4;
}

SpectralResiduals spectral_residuals(const SpectralData& sd, const PrecisionContext& ctx) {
  PrecisionScope scope(ctx);
  SpectralResiduals r;
  const Complex &a = sd.a, &b = sd.b, &c = sd.c, &t = sd.t, &x = sd.x;
  r.cubic = abs(x * x * x - t * x - 1);
  Real r1 = abs(a + b + 2 * c);
  Real r2 = abs(a * b + c * c + 2 * (a + b) * c + 2 * t);
  Real r3 = abs(2 * a * b * c + (a + b) * c * c + 4);
  r.relations = rmax(r1, rmax(r2, r3));
  Complex rr = unit_i() * mp::sqrt(Real(2)) / sd.sqrt_x;
  r.endpoint_form = rmax(abs(a - (x - rr)), rmax(abs(b - (x + rr)), abs(c + x)));
  // ¼(z−a)(z−b)(z−c)² = ¼[z⁴ + p3 z³ + p2 z² + p1 z + p0]
  Complex s = a + b, p = a * b;
  Complex p3 = -(s + 2 * c);
  Complex p2 = p + 2 * s * c + c * c;
  Complex p1 = -(2 * p * c + s * c * c);
  Complex p0 = p * c * c;
  // (z²−t)²/4 + z + C = ¼[z⁴ − 2t z² + 4z + t² + 4C]
  Real e = abs(p3);
  e = rmax(e, abs(p2 + 2 * t));
  e = rmax(e, abs(p1 - 4));
  e = rmax(e, abs(p0 - t * t - 4 * sd.C));
  r.coefficients = e / 4;
  return r;
}

// ---------------------------------------------------------------------------
// Classifier

namespace {

Complex pow32_upper(const Complex& s) {
  Complex w = 1 + Complex(1) / s;
  Complex r;
  if (w.im == 0 && w.re < 0) {
    // limit from the upper half s-plane, where Im(1 + 1/s) < 0
    r = Complex(Real(0), -mp::sqrt(-w.re));
  } else {
    r = sqrt(w);
  }
  return w * r;
}

}  // namespace

Complex classifier_integral_s(const Complex& s, const PrecisionContext& ctx) {
  PrecisionScope scope(ctx);
  Real tol = mp::ldexp(Real(1), -ctx.bits / 2);
  if (abs(s) <= tol) throw NumericalError("classifier endpoint coincides with the pole s = 0");
  if (s.im < 0) return conj(classifier_integral_s(conj(s), ctx));
  if (abs(s + 1) == 0) return Complex(0);
  Real H = rmax(Real(1), abs(s + 1));
  Complex apex((s.re - 1) / 2, H);
  auto f = [](const Complex& z) { return pow32_upper(z); };
  Complex leg1 = integrate_segment(f, Complex(-1), apex, Endpoint::SqrtStart, ctx);
  Complex leg2 = integrate_segment(f, apex, s, Endpoint::Regular, ctx);
  return (leg1 + leg2) * Real(2) / Real(3);
}

Complex classifier_integral(const Complex& x, const PrecisionContext& ctx) {
  PrecisionScope scope(ctx);
  if (abs(x) == 0) throw ValidationError("classifier needs x != 0");
  return classifier_integral_s(2 * x * x * x, ctx);
}

double boundary_tol(const Complex& t) { return 1e-10 * (1 + abs(t).convert_to<double>()); }

namespace {

// Closed trajectory of −(1+1/s)³ds² from s = −1 at angle 2π/5, traced once.
const std::vector<cd>& split_loop() {
  static std::once_flag once;
  static std::vector<cd> loop;
  std::call_once(once, [] {
    PrecisionContext ctx;
    auto field = [](cd s) {
      cd r = std::sqrt(std::pow(1.0 + 1.0 / s, 3));
      return cd(0, 1) * std::conj(r) / std::abs(r);
    };
    StopRule stop;
    stop.targets = {cd(-1, 0)};
    stop.target_radius = 1e-3;
    stop.target_min_arclength = 0.5;
    stop.max_step = 0.01;
    cd dir = std::polar(1.0, 2 * M_PI / 5);
    TraceResult tr = trace_unit_speed(field, cd(-1, 0) + 1e-6 * dir, dir, stop, ctx);
    loop = tr.path.points();
    loop.insert(loop.begin(), cd(-1, 0));
    loop.push_back(cd(-1, 0));
  });
  return loop;
}

bool inside_polygon(cd p, const std::vector<cd>& poly) {
  bool in = false;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    cd a = poly[i], b = poly[j];
    if ((a.imag() > p.imag()) != (b.imag() > p.imag())) {
      double xc = a.real() + (p.imag() - a.imag()) * (b.real() - a.real()) / (b.imag() - a.imag());
      if (p.real() < xc) in = !in;
    }
  }
  return in;
}

struct Reduced {
  Complex x;
  bool mirrored = false;
  bool conj = false;
  bool outside = false;
};

Reduced reduce(const Complex& x) {
  Reduced r;
  const Real pi = real_pi();
  Real th = arg(x);
  if (th < 0) th += 2 * pi;
  Complex w2 = expi(4 * pi / 3);
  Complex xr = x;
  // x on the symmetry rays arg = 2π/3 or π is fixed by the reflection; rounding
  // must not push it to the reflected side.
  const Real eps = mp::ldexp(Real(1), -static_cast<int>(Real::default_precision() * 3.32 / 2));
  if (mp::abs(th - 2 * pi / 3) <= eps) th = 2 * pi / 3;
  if (th < 2 * pi / 3) {
    r.mirrored = true;
    xr = conj(x) * w2;
    th = 4 * pi / 3 - th;
  }
  if (mp::abs(th - pi) <= eps) th = pi;
  if (th > pi && th <= 4 * pi / 3) {
    r.conj = true;
    xr = conj(xr);
  } else if (th > 4 * pi / 3) {
    r.outside = true;
  }
  r.x = xr;
  return r;
}

}  // namespace

SpectralData classify_full(const Complex& t, const PrecisionContext& ctx) {
  PrecisionScope scope(ctx);
  SpectralData sd;
  RegionLabel lab;
  const double tol = boundary_tol(t);
  const Complex tcr = t_critical(ctx);
  const Complex tcr_rot = tcr * expi(2 * real_pi() / 3);
  const bool at_cr = abs(t - tcr) <= tol;
  const bool at_cr_rot = abs(t - tcr_rot) <= tol;
  try {
    sd = branch_x(t, ctx);
  } catch (const NumericalError& e) {
    if (at_cr || at_cr_rot) {
      // Continuation may stall on the branch point itself; there the one-cut
      // value is the double root, −2^{−1/3} or its rotation.
      sd.t = t;
      sd.bits = ctx.bits;
      Complex d = sqrt(t / 3);
      Complex want = at_cr ? Complex(-1) : expi(real_pi() / 3);
      if (abs(d - want * abs(d)) > abs(-d - want * abs(d))) d = -d;
      sd.x = d;
      sd.sqrt_x = sqrt(d);
      if (sd.sqrt_x.im < 0) sd.sqrt_x = -sd.sqrt_x;
      endpoints(sd, ctx);
      lab.phase = at_cr_rot ? Phase::CriticalPointRotated : Phase::CriticalPoint;
      lab.graph_case = GraphCase::BoundaryCrit;
      lab.mirrored = at_cr_rot;
      sd.region = lab;
      return sd;
    }
    sd.t = t;
    sd.bits = ctx.bits;
    lab.phase = Phase::OutsideOneCut;
    lab.diagnostic = e.what();
    sd.region = lab;
    return sd;
  }
  Complex I = classifier_integral(sd.x, ctx);
  lab.classifier = {I.re.convert_to<double>(), I.im.convert_to<double>()};
  if (abs(t - tcr) <= tol || abs(t - tcr_rot) <= tol) {
    bool rot = abs(t - tcr_rot) <= tol;
    lab.phase = rot ? Phase::CriticalPointRotated : Phase::CriticalPoint;
    lab.graph_case = GraphCase::BoundaryCrit;
    lab.mirrored = rot;
    sd.region = lab;
    return sd;
  }
  Reduced red = reduce(sd.x);
  if (red.outside) {
    lab.phase = Phase::OutsideOneCut;
    lab.diagnostic = "branch value outside the one-cut sector of the x-plane";
    sd.region = lab;
    return sd;
  }
  lab.mirrored = red.mirrored;
  Complex s = 2 * red.x * red.x * red.x;
  Complex Ir = classifier_integral_s(s, ctx);
  double U = Ir.re.convert_to<double>(), V = Ir.im.convert_to<double>();
  double xtol = tol;
  auto set = [&](Phase p, GraphCase g) {
    lab.phase = p;
    lab.graph_case = g;
  };
  if (std::abs(U) <= xtol) {
    if (V > xtol) {
      if (red.conj) set(red.mirrored ? Phase::BirthBoundaryA : Phase::BirthBoundaryB, GraphCase::BoundaryBirth);
      else set(Phase::OneCutInterior, GraphCase::D);
    } else if (V < -xtol) {
      set(Phase::SplitBoundary, GraphCase::BoundarySplit);
      lab.mirrored = false;  // the split arc is its own mirror image
    } else {
      set(red.mirrored ? Phase::CriticalPointRotated : Phase::CriticalPoint, GraphCase::BoundaryCrit);
    }
  } else if (inside_polygon(s.to_cd(), split_loop())) {
    set(Phase::OutsideOneCut, GraphCase::None);
    lab.diagnostic = "s = 2x^3 lies inside the split loop";
  } else if (U < 0) {
    if (red.conj) {
      set(Phase::OneCutInterior, GraphCase::G);
    } else {
      bool on_ray = std::abs(V) <= xtol && s.re < -1;
      set(Phase::OneCutInterior, on_ray ? GraphCase::F : GraphCase::E);
    }
  } else {
    if (red.conj) {
      set(Phase::OutsideOneCut, GraphCase::None);
      lab.diagnostic = "reflected branch value has positive classifier real part";
    } else if (std::abs(V) <= xtol) {
      set(Phase::OneCutInterior, GraphCase::B);
    } else {
      set(Phase::OneCutInterior, V < 0 ? GraphCase::A : GraphCase::C);
    }
  }
  sd.region = lab;
  return sd;
}

RegionLabel classify(const Complex& t, const PrecisionContext& ctx) {
  return classify_full(t, ctx).region;
}

// ---------------------------------------------------------------------------
// Boundary curves

std::string to_string(BoundaryArc a) {
  switch (a) {
    case BoundaryArc::Split: return "split";
    case BoundaryArc::BirthA: return "birth-a";
    case BoundaryArc::BirthB: return "birth-b";
    case BoundaryArc::CritA: return "crit-a";
    case BoundaryArc::CritB: return "crit-b";
    case BoundaryArc::SRay: return "s-ray";
    case BoundaryArc::SRayRotated: return "s-ray-rotated";
    case BoundaryArc::SCritA: return "s-crit-a";
    case BoundaryArc::SCritB: return "s-crit-b";
  }
  return "?";
}

BoundaryArc boundary_arc_from_string(const std::string& s) {
  for (auto a : {BoundaryArc::Split, BoundaryArc::BirthA, BoundaryArc::BirthB, BoundaryArc::CritA,
                 BoundaryArc::CritB, BoundaryArc::SRay, BoundaryArc::SRayRotated,
                 BoundaryArc::SCritA, BoundaryArc::SCritB})
    if (to_string(a) == s) return a;
  throw ValidationError("unknown arc '" + s + "'");
}

namespace {

struct ArcSpec {
  double angle;     // launch angle at s = −1
  bool orthogonal;  // level set V = 0 rather than U = 0
  bool rotated;     // seed x at 2^{−1/3}e^{iπ/3} instead of −2^{−1/3}
  bool closed;      // returns to s = −1
};

ArcSpec arc_spec(BoundaryArc a) {
  switch (a) {
    case BoundaryArc::Split: return {2 * M_PI / 5, false, false, true};
    case BoundaryArc::BirthB: return {6 * M_PI / 5, false, false, false};
    case BoundaryArc::CritB: return {4 * M_PI / 5, false, false, false};
    case BoundaryArc::BirthA: return {4 * M_PI / 5, false, true, false};
    case BoundaryArc::CritA: return {6 * M_PI / 5, false, true, false};
    case BoundaryArc::SRay: return {M_PI, true, false, false};
    case BoundaryArc::SRayRotated: return {M_PI, true, true, false};
    case BoundaryArc::SCritB: return {3 * M_PI / 5, true, false, false};
    case BoundaryArc::SCritA: return {7 * M_PI / 5, true, true, false};
  }
  return {};
}

cd aux_field(cd s, bool orthogonal) {
  cd r = std::sqrt(std::pow(1.0 + 1.0 / s, 3));
  cd d = std::conj(r) / std::abs(r);
  return orthogonal ? d : cd(0, 1) * d;
}

// continuous cube root of s/2 along a polyline
std::vector<cd> cube_root_path(const std::vector<cd>& s, cd seed) {
  std::vector<cd> xs;
  xs.reserve(s.size());
  cd x = seed;
  for (cd si : s) {
    for (int it = 0; it < 40; ++it) {
      cd dx = (2.0 * x * x * x - si) / (6.0 * x * x);
      x -= dx;
      if (std::abs(dx) < 1e-16 * std::abs(x)) break;
    }
    xs.push_back(x);
  }
  return xs;
}

}  // namespace

std::vector<Complex> boundary_curves(BoundaryArc arc, int samples, const PrecisionContext& ctx,
                                     double t_radius) {
  if (samples < 2) throw ValidationError("samples must be >= 2");
  ctx.validate();
  ArcSpec spec = arc_spec(arc);
  const cd seed = spec.rotated ? std::pow(2.0, -1.0 / 3) * std::polar(1.0, M_PI / 3)
                               : cd(-std::pow(2.0, -1.0 / 3), 0);
  const double s_radius = 2 * std::pow(t_radius + 2, 1.5) + 4;

  std::vector<cd> spath;
  if (spec.angle == M_PI && spec.orthogonal) {
    int n = 4000;
    for (int i = 0; i <= n; ++i) spath.push_back(cd(-1 - (s_radius - 1) * i / double(n), 0));
  } else if (spec.closed) {
    spath = split_loop();
  } else {
    PrecisionContext tctx = ctx;
    tctx.ode_tol = std::max(ctx.ode_tol, 1e-10);
    StopRule stop;
    stop.radius = s_radius;
    stop.max_step = 0.01;
    cd dir = std::polar(1.0, spec.angle);
    bool orth = spec.orthogonal;
    TraceResult tr = trace_unit_speed([orth](cd s) { return aux_field(s, orth); },
                                      cd(-1, 0) + 1e-6 * dir, dir, stop, tctx);
    spath = tr.path.points();
    spath.insert(spath.begin(), cd(-1, 0));
  }

  std::vector<cd> xs = cube_root_path(spath, seed);
  std::vector<cd> ts;
  std::size_t keep = xs.size();
  for (std::size_t i = 0; i < xs.size(); ++i) {
    cd t = xs[i] * xs[i] - 1.0 / xs[i];
    if (std::abs(t) > t_radius && !spec.closed) {
      keep = i;
      break;
    }
    ts.push_back(t);
  }
  if (ts.size() < 2) throw NumericalError("boundary arc " + to_string(arc) + " too short");
  spath.resize(keep);
  xs.resize(keep);

  std::vector<double> cum(ts.size(), 0.0);
  for (std::size_t i = 1; i < ts.size(); ++i) cum[i] = cum[i - 1] + std::abs(ts[i] - ts[i - 1]);

  PrecisionScope scope(ctx);
  std::vector<Complex> out;
  out.reserve(samples);
  PrecisionContext pctx = PrecisionContext::with_bits(std::max(64, std::min(ctx.bits, 160)));
  for (int k = 0; k < samples; ++k) {
    double target = cum.back() * k / double(samples - 1);
    std::size_t j = std::upper_bound(cum.begin(), cum.end(), target) - cum.begin();
    j = std::clamp<std::size_t>(j, 1, cum.size() - 1);
    double f = cum[j] > cum[j - 1] ? (target - cum[j - 1]) / (cum[j] - cum[j - 1]) : 0.0;
    f = std::clamp(f, 0.0, 1.0);
    cd sd = spath[j - 1] + f * (spath[j] - spath[j - 1]);
    cd xd = xs[j - 1] + f * (xs[j] - xs[j - 1]);
    bool endpoint = (k == 0) || (spec.closed && k == samples - 1);
    Complex s(sd);
    if (endpoint) {
      s = Complex(-1);
    } else if (!(spec.orthogonal && spec.angle == M_PI)) {
      // Newton onto the level set U = 0 (trajectories) or V = 0 (orthogonal ones)
      for (int it = 0; it < 6; ++it) {
        Complex I = classifier_integral_s(s, pctx);
        Complex fp = pow32_upper(s) * Real(2) / Real(3);
        if (s.im < 0) fp = conj(pow32_upper(conj(s))) * Real(2) / Real(3);
        Complex delta = spec.orthogonal ? -(unit_i() * I.im) * conj(fp) / norm(fp)
                                        : -Complex(I.re) * conj(fp) / norm(fp);
        s += delta;
        if (abs(delta) < mp::ldexp(Real(1), -pctx.bits + 8) * (1 + abs(s))) break;
      }
    }
    Complex x(xd);
    if (endpoint) {
      // the cube root of −1/2 reached by continuation; the closed loop ends on a rotated one
      const Real r = mp::cbrt(Real(2));
      int best = 0;
      auto root = [](int m) { return -std::polar(std::pow(2.0, -1.0 / 3), 2 * M_PI * m / 3); };
      for (int m = 1; m < 3; ++m)
        if (std::abs(xd - root(m)) < std::abs(xd - root(best))) best = m;
      x = -expi(2 * real_pi() * best / 3) / r;
    } else {
      const Real eps = mp::ldexp(Real(1), -ctx.bits + 4);
      for (int it = 0; it < 100; ++it) {
        Complex dx = (2 * x * x * x - s) / (6 * x * x);
        x -= dx;
        if (abs(dx) <= eps * abs(x)) break;
      }
    }
    out.push_back(t_of_x(x));
  }
  return out;
}

TraceResult aux_trajectory(double angle, bool orthogonal, const StopRule& stop, const PrecisionContext& ctx) {
  const cd dir = std::polar(1.0, angle);
  return trace_unit_speed([orthogonal](cd s) { return aux_field(s, orthogonal); }, cd(-1, 0) + 1e-6 * dir, dir,
                          stop, ctx);
}

double split_loop_crossing(const PrecisionContext& ctx) {
  StopRule stop;
  stop.event = [](cd s) { return s.real() > 0 ? s.imag() : 1.0; };
  stop.event_min_arclength = 0.1;
  stop.radius = 100;
  TraceResult tr = aux_trajectory(2 * M_PI / 5, false, stop, ctx);
  if (tr.reason != StopReason::Event) throw NumericalError("split loop never reached the positive real axis");
  return tr.path.back().real();
}

Complex representative_t(GraphCase g, bool mirrored, const PrecisionContext& ctx) {
  PrecisionScope scope(ctx);
  auto mid = [&](BoundaryArc a) { return boundary_curves(a, 3, ctx, 4.0)[1]; };
  Complex t;
  switch (g) {
    case GraphCase::A: t = Complex(1); break;
    case GraphCase::B: t = mid(BoundaryArc::SCritB); break;
    case GraphCase::C: t = Complex(1.5, -0.5); break;
    case GraphCase::D: t = mid(BoundaryArc::CritB); break;
    case GraphCase::E: t = Complex(3, -1); break;
    case GraphCase::F: t = Complex(2); break;
    case GraphCase::G: t = Complex(3, 1); break;
    case GraphCase::BoundaryCrit: t = t_critical(ctx); break;
    case GraphCase::BoundarySplit: t = mid(BoundaryArc::Split); break;
    case GraphCase::BoundaryBirth: t = mid(BoundaryArc::BirthB); break;
    case GraphCase::None: throw ValidationError("no representative for an unclassified case");
  }
  if (mirrored) t = conj(t) * expi(2 * real_pi() / 3);
  return t;
}

}  // namespace loggas
