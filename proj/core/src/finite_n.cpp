#include "loggas/finite_n.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss.hpp>

#include "loggas/quaddiff.hpp"
#include "loggas/spectral.hpp"

namespace loggas {

namespace {

constexpr double kPi = std::numbers::pi;

// double-precision log|z^k e^{−NV(z)}|
double log_weight(cd z, cd t, int N, int k) {
  cd V = -z * z * z / 3.0 + t * z;
  return (k > 0 ? k * std::log(std::abs(z)) : 0.0) - N * V.real();
}

std::vector<cd> untrimmed_path(cd t, std::string& kind) {
  // contour geometry only needs double precision
  PrecisionContext geo = PrecisionContext::with_bits(64);
  try {
    SpectralData sd = classify_full(Complex(t), geo);
    if (sd.region.phase != Phase::OutsideOneCut) {
      CriticalGraph g = critical_graph(sd, geo);
      SContour sc = build_scontour(sd, g, geo);
      Polyline all;
      for (const ContourArc& arc : sc.arcs) all.append(arc.polyline);
      const double scale = std::abs((sd.a - sd.b).to_cd());
      std::vector<cd> pts = all.simplified(0.02 * std::max(scale, 0.1)).points();
      if (!std::isnan(sc.arcs.front().ray_in) && !std::isnan(sc.arcs.back().ray_out)) {
        kind = "S-contour";
        pts.insert(pts.begin(), pts.front() + 1e3 * std::polar(1.0, sc.arcs.front().ray_in));
        pts.push_back(pts.back() + 1e3 * std::polar(1.0, sc.arcs.back().ray_out));
        return pts;
      }
    }
  } catch (const std::exception&) {
    // no S-contour for this t: fall through to the rays
  }
  kind = "rays";
  return {std::polar(1e3, kPi), cd(0, 0), std::polar(1e3, kPi / 3)};
}

// Cuts the far ends of path where the weight is below max·2^{log2_rel_cut} from there on.
std::vector<Complex> trim(const std::vector<cd>& path, cd t, int N, int K, double log2_rel_cut) {
  struct Sample {
    std::size_t seg;
    double u;
    double lw;
  };
  std::vector<Sample> s;
  for (std::size_t i = 1; i < path.size(); ++i) {
    const double len = std::abs(path[i] - path[i - 1]);
    const int n = std::max(4, static_cast<int>(std::ceil(len / 0.01)));
    for (int j = i == 1 ? 0 : 1; j <= n; ++j) {
      double u = double(j) / n;
      cd z = path[i - 1] + u * (path[i] - path[i - 1]);
      s.push_back({i, u, std::max(log_weight(z, t, N, 0), log_weight(z, t, N, K))});
    }
  }
  double mx = -1e300;
  for (const Sample& q : s) mx = std::max(mx, q.lw);
  const double cut = mx + log2_rel_cut * std::log(2.0);
  std::size_t lo = 0, hi = s.size() - 1;
  while (lo < s.size() && s[lo].lw < cut) ++lo;
  while (hi > lo && s[hi].lw < cut) --hi;
  if (lo == 0 || hi == s.size() - 1)
    throw NumericalError("weight does not decay below the truncation bound on the contour");
  --lo;
  ++hi;
  auto point = [&](const Sample& q) { return path[q.seg - 1] + q.u * (path[q.seg] - path[q.seg - 1]); };
  std::vector<Complex> out{Complex(point(s[lo]))};
  for (std::size_t i = s[lo].seg; i < s[hi].seg; ++i) out.emplace_back(path[i]);
  out.emplace_back(point(s[hi]));
  return out;
}

std::vector<Complex> quadrature_moments(const Complex& t, int N, int K, const std::vector<Complex>& path,
                                        const PrecisionContext& ctx) {
  MultiIntegrand f = [&](const Complex& z, std::vector<Complex>& out) {
    Complex w = exp(-N * (-(z * z * z) / 3 + t * z));
    for (int k = 0; k <= K; ++k) {
      out[k] = w;
      w *= z;
    }
  };
  return integrate_contour_multi(f, K + 1, path, ctx);
}

double rel_dev(const Complex& a, const Complex& b) {
  Real d = abs(a - b), s = rmax(abs(a), abs(b));
  return s > 0 ? (d / s).convert_to<double>() : 0.0;
}

using Poly = std::vector<Complex>;  // coefficients, constant term first

Complex functional(const Poly& p, const std::vector<Complex>& m) {
  Complex acc;
  for (std::size_t j = 0; j < p.size(); ++j) acc += p[j] * m.at(j);
  return acc;
}

Poly product(const Poly& a, const Poly& b) {
  Poly c(a.size() + b.size() - 1);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
  return c;
}

// 30-point Gauss–Legendre nodes and weights on [p, q].
void gauss_rule(const Complex& p, const Complex& q, std::vector<Complex>& z, std::vector<Complex>& w) {
  using G = boost::math::quadrature::gauss<Real, 30>;
  const Complex mid = (p + q) / 2, rad = (q - p) / 2;
  const auto& x = G::abscissa();
  const auto& wt = G::weights();
  for (std::size_t k = 0; k < x.size(); ++k) {
    z.push_back(mid + rad * x[k]);
    w.push_back(rad * wt[k]);
    if (x[k] != 0) {
      z.push_back(mid - rad * x[k]);
      w.push_back(rad * wt[k]);
    }
  }
}

// Nodes z_i and weights W_i = w_i·weight(z_i) of a product rule for Γ: Gauss–Legendre
// pieces, halved until the moments of order ≤ 2N−2 of two consecutive rules agree to
// 1e−14; the coarser one is kept (cost grows like M^N). Negligible nodes are dropped.
void product_rule(const std::vector<Complex>& path, int N, const std::function<Complex(const Complex&)>& weight,
                  std::vector<Complex>& zs, std::vector<Complex>& ws) {
  std::vector<Complex> prev, prev_z, prev_w;
  double piece = 1.0;
  for (int round = 0; round < 8; ++round, piece /= 2) {
    std::vector<Complex> z, w;
    for (std::size_t i = 1; i < path.size(); ++i) {
      const int n = std::max(1, static_cast<int>(std::ceil(abs(path[i] - path[i - 1]).convert_to<double>() / piece)));
      for (int j = 0; j < n; ++j)
        gauss_rule(path[i - 1] + (path[i] - path[i - 1]) * (Real(j) / n),
                   path[i - 1] + (path[i] - path[i - 1]) * (Real(j + 1) / n), z, w);
    }
    for (std::size_t i = 0; i < z.size(); ++i) w[i] *= weight(z[i]);
    std::vector<Complex> mom(2 * N - 1);
    Real l1 = 0;
    for (std::size_t i = 0; i < z.size(); ++i) {
      Complex p = w[i];
      l1 += abs(p);
      for (auto& mk : mom) {
        mk += p;
        p *= z[i];
      }
    }
    bool settled = !prev.empty();
    for (std::size_t k = 0; k < mom.size() && settled; ++k)
      if (abs(mom[k] - prev[k]) > Real(1e-14) * rmax(abs(mom[k]), l1 * Real(1e-6))) settled = false;
    prev = mom;
    if (settled) {
      Real mx = 0;
      for (const Complex& x : prev_w) mx = rmax(mx, abs(x));
      for (std::size_t i = 0; i < prev_z.size(); ++i) {
        if (abs(prev_w[i]) < Real(1e-22) * mx) continue;
        zs.push_back(prev_z[i]);
        ws.push_back(prev_w[i]);
      }
      return;
    }
    prev_z = std::move(z);
    prev_w = std::move(w);
  }
  throw NumericalError("product rule for the partition function did not settle");
}

Complex product_sum(const std::vector<Complex>& z, const std::vector<Complex>& w, int N) {
  const std::size_t M = z.size();
  if (N == 1) {
    Complex acc;
    for (const Complex& x : w) acc += x;
    return acc;
  }
  std::vector<Complex> d(M * M);
  for (std::size_t i = 0; i < M; ++i)
    for (std::size_t j = 0; j < M; ++j) {
      Complex e = z[i] - z[j];
      d[i * M + j] = e * e;
    }
  Complex acc;
  if (N == 2) {
    for (std::size_t i = 0; i < M; ++i) {
      Complex inner;
      for (std::size_t j = 0; j < i; ++j) inner += w[j] * d[i * M + j];
      acc += w[i] * inner;
    }
    return 2 * acc;
  }
  // N = 3: ordered triples i > j > k, times 3!
  for (std::size_t i = 0; i < M; ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      Complex inner;
      for (std::size_t k = 0; k < j; ++k) inner += w[k] * d[i * M + k] * d[j * M + k];
      acc += w[i] * w[j] * d[i * M + j] * inner;
    }
  }
  return 6 * acc;
}

}  // namespace

std::vector<Complex> weight_contour(const Complex& t, int N, int K, double log2_rel_cut,
                                    const PrecisionContext& ctx, std::string* kind) {
  ctx.validate();
  std::string k;
  std::vector<cd> path = untrimmed_path(t.to_cd(), k);
  if (kind) *kind = k;
  PrecisionScope ps(ctx);
  return trim(path, t.to_cd(), N, K, log2_rel_cut);
}

MomentTable moments(const Complex& t, int N, int K, MomentSource method, const PrecisionContext& ctx) {
  ctx.validate();
  if (K < 2) throw ValidationError("moments need K >= 2");
  if (N < 1) throw ValidationError("N must be positive");
  PrecisionScope ps(ctx);
  MomentTable mt;
  mt.t = t;
  mt.N = N;
  mt.bits = ctx.bits;
  std::vector<Complex> path = weight_contour(t, N, K, -(ctx.bits + 32), ctx, &mt.contour);

  if (method == MomentSource::Quadrature) {
    mt.m = quadrature_moments(t, N, K, path, ctx);
    mt.source = MomentSource::Quadrature;
    return mt;
  }
  const int kq = std::min(K, 12);
  std::vector<Complex> q = quadrature_moments(t, N, kq, path, ctx);
  mt.m.assign(K + 1, Complex());
  mt.m[0] = q[0];
  mt.m[1] = q[1];
  for (int k = 0; k + 2 <= K; ++k) {
    mt.m[k + 2] = t * mt.m[k];
    if (k >= 1) mt.m[k + 2] -= Real(k) / N * mt.m[k - 1];
  }
  for (int k = 0; k <= kq; ++k) mt.cross_check = std::max(mt.cross_check, rel_dev(mt.m[k], q[k]));
  mt.source = MomentSource::Recursion;
  if (mt.cross_check > std::pow(10.0, -ctx.bits / 4.0)) {
    mt.m = quadrature_moments(t, N, K, path, ctx);
    mt.source = MomentSource::Quadrature;
  }
  return mt;
}

RecurrenceTable recurrence(const MomentTable& mt, int n_max, const PrecisionContext& ctx,
                           const Complex* log_Z_hint) {
  ctx.validate();
  if (n_max < 0) throw ValidationError("n_max must be non-negative");
  if (static_cast<int>(mt.m.size()) < 2 * n_max + 3)
    throw ValidationError("recurrence needs moments up to order 2 n_max + 2");
  if (ctx.bits < 64 + 8 * n_max) throw ValidationError("recurrence needs bits >= 64 + 8 n_max");
  PrecisionScope ps(ctx);

  RecurrenceTable rt;
  rt.N = mt.N;
  rt.t = mt.t;
  const Real floor = ldexp(Real(1), -ctx.bits / 2) * (1 + abs(mt.t));
  Poly prev, cur{Complex(1)};
  for (int n = 0; n <= n_max + 1; ++n) {
    // h_n = L(P_n z^n) by orthogonality
    Complex hn;
    for (std::size_t j = 0; j < cur.size(); ++j) hn += cur[j] * mt.m.at(j + n);
    if (n == 0 && abs(hn) == 0) throw NumericalError("m_0 vanishes");
    if (n > 0) {
      Complex g2 = hn / rt.h.back();
      if (abs(g2) < floor)
        throw NumericalError("h_" + std::to_string(n) +
                             " vanishes to working precision: orthogonal polynomial of that degree may not exist");
      rt.gamma2.push_back(g2);
    } else {
      rt.gamma2.push_back(Complex());
    }
    rt.h.push_back(hn);
    if (n == n_max + 1) break;
    Poly zp(cur.size() + 1);
    for (std::size_t j = 0; j < cur.size(); ++j) zp[j + 1] = cur[j];
    Complex bn = functional(product(zp, cur), mt.m) / hn;
    rt.beta.push_back(bn);
    Poly next = zp;
    for (std::size_t j = 0; j < cur.size(); ++j) next[j] -= bn * cur[j];
    if (n > 0)
      for (std::size_t j = 0; j < prev.size(); ++j) next[j] -= rt.gamma2[n] * prev[j];
    prev = std::move(cur);
    cur = std::move(next);
  }

  for (const auto& [r1, r2] : string_residuals(rt))
    rt.string_residual = std::max({rt.string_residual, abs(r1).convert_to<double>(), abs(r2).convert_to<double>()});
  // the bootstrap from moments is ill-conditioned; exact identities expose exhausted precision
  if (!(rt.string_residual <= 1e-8))
    throw NumericalError("recurrence lost all precision (string-equation residual " +
                         std::to_string(rt.string_residual) + "); raise bits");

  const int N = mt.N;
  if (n_max >= N - 1) {
    rt.has_Z = true;
    Complex lz;
    for (int k = 2; k <= N; ++k) lz.re += log(Real(k));
    Real prev_im = 0;
    for (int n = 0; n < N; ++n) {
      Complex l = log(rt.h[n]);
      // keep consecutive terms on neighbouring branches
      if (n > 0) l.im += 2 * real_pi() * round((prev_im - l.im) / (2 * real_pi()));
      prev_im = l.im;
      lz += l;
    }
    if (log_Z_hint) lz.im += 2 * real_pi() * round((log_Z_hint->im - lz.im) / (2 * real_pi()));
    rt.log_Z = lz;
    rt.Z_N = exp(lz);
    rt.F_N = lz / Real(N * N);
  }
  return rt;
}

std::vector<std::pair<Complex, Complex>> string_residuals(const RecurrenceTable& rt) {
  std::vector<std::pair<Complex, Complex>> out;
  const Real N(rt.N);
  for (std::size_t n = 0; n < rt.beta.size() && n + 1 < rt.gamma2.size(); ++n) {
    Complex r1 = n == 0 ? Complex() : rt.gamma2[n] * (rt.beta[n - 1] + rt.beta[n]) + Real(n) / N;
    Complex r2 = rt.gamma2[n + 1] + rt.gamma2[n] + rt.beta[n] * rt.beta[n] - rt.t;
    out.emplace_back(r1, r2);
  }
  return out;
}

TodaReport toda_check(const Complex& t, int N, double h_step, const PrecisionContext& ctx) {
  ctx.validate();
  if (!(h_step > 0 && h_step <= 1e-2)) throw ValidationError("toda_check needs 0 < h_step <= 1e-2");
  PrecisionScope ps(ctx);
  const Real h(h_step);
  auto run = [&](const Complex& tt, const Complex* hint) {
    MomentTable mt = moments(tt, N, 2 * N + 2, MomentSource::Quadrature, ctx);
    return recurrence(mt, N, ctx, hint);
  };
  RecurrenceTable r0 = run(t, nullptr);
  RecurrenceTable rp = run(t + h, &r0.log_Z);
  RecurrenceTable rm = run(t - h, &r0.log_Z);
  TodaReport rep;
  rep.F_0 = r0.F_N;
  rep.F_plus = rp.F_N;
  rep.F_minus = rm.F_N;
  rep.second_difference = (rp.F_N - 2 * r0.F_N + rm.F_N) / (h * h);
  rep.gamma2 = r0.gamma2[N];
  Complex d = rep.second_difference - rep.gamma2;
  rep.residual = rmax(abs(d.re), abs(d.im)).convert_to<double>();
  return rep;
}

Complex brute_force_Z(const Complex& t, int N, const PrecisionContext& ctx) {
  ctx.validate();
  if (N < 1 || N > 3) throw ValidationError("brute_force_Z supports N in {1,2,3}");
  PrecisionScope ps(ctx);
  std::vector<Complex> path = weight_contour(t, N, 2 * N - 2, -80, ctx);
  std::vector<Complex> z, w;
  product_rule(path, N, [&](const Complex& s) { return exp(-N * (-(s * s * s) / 3 + t * s)); }, z, w);
  return product_sum(z, w, N);
}

UBridge u_model_bridge(const Complex& u, int N, const PrecisionContext& ctx) {
  ctx.validate();
  PrecisionScope ps(ctx);
  if (u.im == 0 && u.re <= 0) throw ValidationError("u must lie off (-inf, 0]");
  UBridge br;
  br.c = pow(3 * u, Real(1) / 3);
  Complex c4 = br.c * br.c * br.c * br.c;
  br.t = 1 / (4 * c4);
  const Real n2(N * N);
  br.prefactor = exp(-n2 * log(br.c) - n2 / (108 * u * u));
  return br;
}

Complex brute_force_Z_u(const Complex& u, int N, const PrecisionContext& ctx) {
  ctx.validate();
  if (N < 1 || N > 3) throw ValidationError("brute_force_Z_u supports N in {1,2,3}");
  PrecisionScope ps(ctx);
  UBridge br = u_model_bridge(u, N, ctx);
  std::vector<Complex> zeta = weight_contour(br.t, N, 2 * N - 2, -80, ctx);
  std::vector<Complex> path;
  const Complex shift = 1 / (6 * u);
  for (const Complex& s : zeta) path.push_back(s / br.c + shift);
  std::vector<Complex> z, w;
  product_rule(path, N, [&](const Complex& s) { return exp(-N * (s * s / 2 - u * s * s * s)); }, z, w);
  return product_sum(z, w, N);
}

}  // namespace loggas
