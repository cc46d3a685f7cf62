#include "loggas/asymcheck.hpp"

#include <algorithm>
#include <cmath>

#include "loggas/eqmeasure.hpp"
#include "loggas/finite_n.hpp"
#include "loggas/spectral.hpp"

namespace loggas {

namespace {

RecurrenceTable diagonal_run(const Complex& t, int N, const PrecisionContext& ctx) {
  PrecisionContext c = precision_for(N, ctx);
  PrecisionScope ps(c);
  MomentTable mt = moments(t, N, 2 * N + 2, MomentSource::Recursion, c);
  return recurrence(mt, N, c);
}

void finish(AsymptoticReport& rep) {
  SlopeFit f = loglog_fit(rep.N_list, rep.errors);
  rep.fitted_slope = f.slope;
  rep.slope_ci = f.stderr_slope;
  rep.fit_residual = f.residual;
  rep.pass = std::abs(f.slope - rep.expected_slope) <= rep.band;
}

void check_sizes(const std::vector<int>& N_list) {
  if (N_list.size() < 3) throw ValidationError("a rate fit needs at least three sizes");
  for (std::size_t i = 0; i < N_list.size(); ++i) {
    if (N_list[i] < 1) throw ValidationError("sizes must be positive");
    if (i > 0 && N_list[i] <= N_list[i - 1]) throw ValidationError("sizes must be strictly increasing");
  }
}

double positive(const Real& e) {
  double d = e.convert_to<double>();
  if (!(d > 0)) throw NumericalError("asymptotic error vanished or is not finite; no rate can be fitted");
  return d;
}

}  // namespace

SlopeFit loglog_fit(const std::vector<int>& N, const std::vector<double>& err) {
  const std::size_t n = N.size();
  if (n < 2 || err.size() != n) throw ValidationError("fit needs at least two (N, error) pairs");
  std::vector<double> x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(err[i] > 0)) throw ValidationError("fit needs positive errors");
    x[i] = std::log(static_cast<double>(N[i]));
    y[i] = std::log(err[i]);
  }
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i] / n;
    my += y[i] / n;
  }
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  SlopeFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double r = y[i] - f.intercept - f.slope * x[i];
    ss += r * r;
  }
  f.residual = std::sqrt(ss / n);
  if (n > 2) f.stderr_slope = std::sqrt(ss / (n - 2) / sxx);
  return f;
}

std::pair<double, double> expected_gamma_slope(const Complex& t, const PrecisionContext& ctx) {
  switch (classify(t, ctx).phase) {
    case Phase::OneCutInterior: return {-2.0, 0.3};
    case Phase::SplitBoundary:
    case Phase::BirthBoundaryA:
    case Phase::BirthBoundaryB: return {-1.0, 0.3};
    case Phase::CriticalPoint:
    case Phase::CriticalPointRotated: return {-0.4, 0.15};
    case Phase::OutsideOneCut: break;
  }
  throw ValidationError("t lies outside the one-cut region");
}

PrecisionContext precision_for(int N, const PrecisionContext& ctx) {
  PrecisionContext c = ctx;
  c.bits = std::max(ctx.bits, 64 + 16 * N);
  return c;
}

AsymptoticReport rate_gamma(const Complex& t, const std::vector<int>& N_list, const PrecisionContext& ctx) {
  ctx.validate();
  check_sizes(N_list);
  PrecisionScope ps(ctx);
  AsymptoticReport rep;
  rep.quantity = "gamma2";
  rep.t = t;
  rep.N_list = N_list;
  std::tie(rep.expected_slope, rep.band) = expected_gamma_slope(t, ctx);
  const Complex limit = -1 / (2 * classify_full(t, ctx).x);
  for (int N : N_list) {
    RecurrenceTable rt = diagonal_run(t, N, ctx);
    PrecisionScope back(ctx);
    Complex e = rt.gamma2[N] - limit;
    rep.signed_errors.push_back(e);
    rep.errors.push_back(positive(abs(e)));
  }
  finish(rep);
  return rep;
}

Real half_shift_v(int N) { return pow(Real(2 * N + 1) / (2 * N), Real(-2) / 3); }

BetaReports rate_beta(const Complex& t, const std::vector<int>& N_list, const PrecisionContext& ctx) {
  ctx.validate();
  check_sizes(N_list);
  PrecisionScope ps(ctx);
  BetaReports br;
  for (AsymptoticReport* r : {&br.raw, &br.shifted}) {
    r->t = t;
    r->N_list = N_list;
    r->band = 0.3;
  }
  br.raw.quantity = "beta";
  br.raw.expected_slope = -1;
  br.shifted.quantity = "beta-half-shifted";
  br.shifted.expected_slope = -2;
  const Complex x = classify_full(t, ctx).x;
  for (int N : N_list) {
    RecurrenceTable rt = diagonal_run(t, N, ctx);
    PrecisionScope back(ctx);
    const Complex bN = rt.beta[N];
    Complex e = bN - x;
    br.raw.signed_errors.push_back(e);
    br.raw.errors.push_back(positive(abs(e)));
    const Real v = half_shift_v(N);
    Complex es = bN - branch_x(t * v, ctx).x / sqrt(v);
    br.shifted.signed_errors.push_back(es);
    br.shifted.errors.push_back(positive(abs(es)));
  }
  finish(br.raw);
  finish(br.shifted);
  return br;
}

Complex scaled_polynomial(const std::vector<Complex>& beta, const std::vector<Complex>& gamma2, int n,
                          const Complex& z, const Complex& g) {
  // q_k = P_k(z) e^{−kg}: q_{k+1} = e^{−g}((z − β_k) q_k − γ_k² e^{−g} q_{k−1})
  const Complex eg = exp(-g);
  Complex prev, cur(1);
  for (int k = 0; k < n; ++k) {
    Complex next = (z - beta.at(k)) * cur;
    if (k > 0) next -= gamma2.at(k) * eg * prev;
    prev = cur;
    cur = next * eg;
  }
  return cur;
}

AsymptoticReport strong_asymptotics_check(const Complex& t, const Complex& z, const std::vector<int>& N_list,
                                          const PrecisionContext& ctx) {
  ctx.validate();
  check_sizes(N_list);
  PrecisionScope ps(ctx);
  SzegoData sz = szego(classify_full(t, ctx), ctx);
  const CutGeometry& cg = sz.cuts();
  if (cg.distance(z.to_cd(), CutGeometry::Support) < 0.2 * cg.scale())
    throw ValidationError("strong asymptotics probe must stay 0.2|a-b| away from J");
  AsymptoticReport rep;
  rep.quantity = "strong";
  rep.t = t;
  rep.N_list = N_list;
  rep.expected_slope = expected_gamma_slope(t, ctx).first / 2;
  rep.band = 0.4;
  const Complex g = sz.g(z);
  const Complex A = sz.A(z);
  for (int N : N_list) {
    RecurrenceTable rt = diagonal_run(t, N, ctx);
    PrecisionScope back(ctx);
    Complex ratio = scaled_polynomial(rt.beta, rt.gamma2, N, z, g) / A;
    rep.signed_errors.push_back(ratio - 1);
    rep.errors.push_back(positive(abs(ratio - 1)));
  }
  finish(rep);
  return rep;
}

double on_cut_check(const Complex& t, int N, double fraction, const PrecisionContext& ctx) {
  ctx.validate();
  PrecisionScope ps(ctx);
  SzegoData sz = szego(classify_full(t, ctx), ctx);
  const Polyline& sp = sz.cuts().support();
  const Complex s(sp.at_length(fraction * sp.length()));
  const Complex gp = sz.g(s, Side::Plus), gm = sz.g(s, Side::Minus);
  const Complex Ap = sz.A(s, Side::Plus), Am = sz.A(s, Side::Minus);
  RecurrenceTable rt = diagonal_run(t, N, ctx);
  PrecisionScope back(ctx);
  // compare after scaling by e^{−N g₊}
  const Complex P = scaled_polynomial(rt.beta, rt.gamma2, N, s, gp);
  const Complex tp = Ap, tm = Am * exp(N * (gm - gp));
  return (abs(P - tp - tm) / (abs(tp) + abs(tm))).convert_to<double>();
}

AsymptoticReport free_energy_check(const Complex& t, const std::vector<int>& N_list, double h,
                                   const PrecisionContext& ctx, bool against_F0) {
  ctx.validate();
  check_sizes(N_list);
  PrecisionScope ps(ctx);
  AsymptoticReport rep;
  rep.quantity = against_F0 ? "free-energy-vs-F0" : "free-energy";
  rep.t = t;
  rep.N_list = N_list;
  rep.expected_slope = -2;
  rep.band = 0.5;
  Complex target;
  if (against_F0) {
    const Real hh(h);
    target = (genus_zero_free_energy(t + hh, ctx) - 2 * genus_zero_free_energy(t, ctx) +
              genus_zero_free_energy(t - hh, ctx)) / (hh * hh);
  } else {
    target = -1 / (2 * classify_full(t, ctx).x);
  }
  for (int N : N_list) {
    PrecisionContext c = precision_for(N, ctx);
    TodaReport tr = toda_check(t, N, h, c);
    PrecisionScope back(ctx);
    Complex e = tr.second_difference - target;
    rep.signed_errors.push_back(e);
    rep.errors.push_back(positive(abs(e)));
  }
  finish(rep);
  return rep;
}

std::pair<Real, Real> airy_constants(int k) {
  if (k < 1) throw ValidationError("Airy constants start at k = 1");
  Real fact = 1;
  for (int j = 2; j <= k; ++j) fact *= j;
  const Real half = Real(1) / 2;
  Real s = tgamma(Real(3 * k) + half) / (pow(Real(54), k) * fact * tgamma(Real(k) + half));
  Real tk = -Real(6 * k + 1) / Real(6 * k - 1) * s;
  return {s, tk};
}

}  // namespace loggas
