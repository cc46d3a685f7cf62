// Double-exponential (tanh-sinh) contour quadrature in MPFR precision.
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>

#include "loggas/mpnum.hpp"

namespace loggas {

namespace mp = boost::multiprecision;

namespace {

constexpr int kMaxLevel = 9;
constexpr int kMaxDepth = 7;

// Nodes of one refinement level. Abscissae are stored as 1 − x so that points
// hugging the endpoints keep full relative precision.
struct Level {
  std::vector<Real> om;  // 1 − x_k, x_k > 0 (the mirrored node is implied)
  std::vector<Real> w;
  Real w0;  // weight of x = 0 (level 0 only)
};

struct Table {
  std::vector<Level> levels;
};

std::mutex g_table_mutex;
std::map<unsigned, std::shared_ptr<Table>> g_tables;

Level make_level(int l, int bits) {
  Level lv;
  const Real pi = real_pi();
  const Real h = mp::ldexp(Real(1), -l);
  const Real cut = mp::ldexp(Real(1), -bits - 24);
  lv.w0 = l == 0 ? pi / 2 : Real(0);
  const int step = l == 0 ? 1 : 2;
  for (long k = 1;; k += step) {
    Real s = h * k;
    Real u = pi / 2 * mp::sinh(s);
    Real e2u = mp::exp(2 * u);
    Real om = 2 / (e2u + 1);
    Real w = pi / 2 * mp::cosh(s) * 4 * e2u / ((e2u + 1) * (e2u + 1));
    if (l == 0) w *= h;
    if (w < cut) break;
    lv.om.push_back(om);
    lv.w.push_back(w);
  }
  return lv;
}

const Table& table_for(int bits, int levels) {
  unsigned key = Real::default_precision();
  std::lock_guard<std::mutex> lock(g_table_mutex);
  auto& slot = g_tables[key];
  if (!slot) slot = std::make_shared<Table>();
  while (static_cast<int>(slot->levels.size()) < levels)
    slot->levels.push_back(make_level(static_cast<int>(slot->levels.size()), bits));
  return *slot;
}

// Maps a tanh-sinh node (sign, om = 1 − |x|) onto the segment with the declared
// endpoint substitution and returns (z, dz/dx).
struct SegmentMap {
  Complex z0, z1, d;
  Endpoint ep;

  void at(int sign, const Real& om, Complex& z, Complex& jac) const {
    // s ∈ [0,1] with 1 − s or s small stored exactly.
    Real s_lo, s_hi;  // s and 1 − s
    if (sign < 0) {
      s_lo = om / 2;
      s_hi = 1 - s_lo;
    } else {
      s_hi = om / 2;
      s_lo = 1 - s_hi;
    }
    switch (ep) {
      case Endpoint::Regular:
      case Endpoint::SqrtBoth:  // split by the caller
        z = sign < 0 ? z0 + d * s_lo : z1 - d * s_hi;
        jac = d / 2;
        return;
      case Endpoint::SqrtStart: {
        // z = z0 + d s², dz = 2 d s ds
        Real q = s_lo * s_lo;
        z = sign < 0 ? z0 + d * q : z1 - d * (s_hi * (2 - s_hi));
        jac = d * s_lo;
        return;
      }
      case Endpoint::SqrtEnd: {
        // z = z1 − d (1−s)², dz = 2 d (1−s) ds
        Real q = s_hi * s_hi;
        z = sign > 0 ? z1 - d * q : z0 + d * (s_lo * (2 - s_lo));
        jac = d * s_hi;
        return;
      }
    }
  }
};

struct Attempt {
  bool ok = false;
  std::vector<Complex> value;
  std::vector<Complex> previous;
};

Attempt run_levels(const MultiIntegrand& f, std::size_t n, const SegmentMap& map,
                   const PrecisionContext& ctx, const Real& tol, QuadratureStats* stats) {
  const Table& tab = table_for(ctx.bits, kMaxLevel + 1);
  const Real floor_rel = mp::ldexp(Real(1), -ctx.bits + 24);
  std::vector<Complex> sum(n), val(n), last(n), buf(n);
  std::vector<Real> l1(n, Real(0));
  Real prev_rel = -1;
  Attempt a;
  Complex z, jac;

  auto accumulate = [&](int sign, const Real& om, const Real& w) {
    map.at(sign, om, z, jac);
    f(z, buf);
    Complex wj = jac * w;
    for (std::size_t c = 0; c < n; ++c) {
      Complex term = buf[c] * wj;
      sum[c] += term;
      l1[c] += abs(term);
    }
    if (stats) ++stats->evaluations;
  };

  for (int l = 0; l <= kMaxLevel; ++l) {
    const Level& lv = tab.levels[l];
    if (l == 0) {
      Complex jz;
      // centre node
      map.at(-1, Real(1), z, jz);
      f(z, buf);
      for (std::size_t c = 0; c < n; ++c) {
        Complex term = buf[c] * jz * lv.w0;
        sum[c] += term;
        l1[c] += abs(term);
      }
      if (stats) ++stats->evaluations;
    }
    for (std::size_t k = 0; k < lv.om.size(); ++k) {
      accumulate(-1, lv.om[k], lv.w[k]);
      accumulate(+1, lv.om[k], lv.w[k]);
    }
    // level l uses step 2^{-l}; sums from coarser levels are rescaled by halving.
    for (std::size_t c = 0; c < n; ++c) val[c] = l == 0 ? sum[c] : sum[c] / Real(mp::ldexp(Real(1), l));
    if (stats) stats->levels = std::max(stats->levels, l);
    if (l >= 2) {
      Real worst_rel = 0;
      bool ok = true;
      for (std::size_t c = 0; c < n; ++c) {
        Real scale = abs(val[c]);
        Real l1c = l1[c] / mp::ldexp(Real(1), l);
        Real err = abs(val[c] - last[c]);
        Real allow = tol * scale + floor_rel * l1c;
        Real rel = scale > 0 ? err / scale : (err > 0 ? Real(1) : Real(0));
        if (err > allow) {
          // Accept on evident quadratic convergence: the error of the
          // current estimate is roughly the square of the last difference.
          bool quad = prev_rel >= 0 && rel < prev_rel && rel * rel <= tol / 16 && rel < Real(1e-3);
          if (!quad) ok = false;
        }
        if (rel > worst_rel) worst_rel = rel;
      }
      if (ok) {
        a.ok = true;
        a.value = val;
        return a;
      }
      prev_rel = worst_rel;
    }
    last = val;
  }
  a.value = val;
  a.previous = last;
  return a;
}

void integrate_piece(const MultiIntegrand& f, std::size_t n, const Complex& z0,
                     const Complex& z1, Endpoint ep, const PrecisionContext& ctx,
                     const Real& tol, QuadratureStats* stats, int depth,
                     std::vector<Complex>& acc) {
  if (ep == Endpoint::SqrtBoth) {
    Complex m = (z0 + z1) / 2;
    integrate_piece(f, n, z0, m, Endpoint::SqrtStart, ctx, tol, stats, depth, acc);
    integrate_piece(f, n, m, z1, Endpoint::SqrtEnd, ctx, tol, stats, depth, acc);
    return;
  }
  SegmentMap map{z0, z1, z1 - z0, ep};
  Attempt a = run_levels(f, n, map, ctx, tol, stats);
  if (a.ok) {
    for (std::size_t c = 0; c < n; ++c) acc[c] += a.value[c];
    return;
  }
  if (depth >= kMaxDepth) {
    std::ostringstream os;
    os.precision(20);
    os << "quadrature did not converge on segment [" << z0.to_cd() << ", " << z1.to_cd()
       << "]: last estimates " << a.value[0].to_cd() << " and " << a.previous[0].to_cd();
    throw NumericalError(os.str());
  }
  if (stats) ++stats->subdivisions;
  Complex m = (z0 + z1) / 2;
  Endpoint left = ep == Endpoint::SqrtStart ? Endpoint::SqrtStart : Endpoint::Regular;
  Endpoint right = ep == Endpoint::SqrtEnd ? Endpoint::SqrtEnd : Endpoint::Regular;
  integrate_piece(f, n, z0, m, left, ctx, tol, stats, depth + 1, acc);
  integrate_piece(f, n, m, z1, right, ctx, tol, stats, depth + 1, acc);
}

Real tolerance(const PrecisionContext& ctx) {
  if (ctx.quad_tol > 0) return Real(ctx.quad_tol);
  return mp::ldexp(Real(1), -ctx.bits + 32);
}

MultiIntegrand lift(const Integrand& f) {
  return [&f](const Complex& z, std::vector<Complex>& out) { out[0] = f(z); };
}

}  // namespace

Complex integrate_segment(const Integrand& f, const Complex& z0, const Complex& z1,
                          Endpoint ep, const PrecisionContext& ctx, QuadratureStats* stats) {
  PrecisionScope scope(ctx);
  std::vector<Complex> acc(1);
  integrate_piece(lift(f), 1, z0, z1, ep, ctx, tolerance(ctx), stats, 0, acc);
  return acc[0];
}

std::vector<Complex> integrate_contour_multi(const MultiIntegrand& f, std::size_t n,
                                             const std::vector<Complex>& vertices,
                                             const PrecisionContext& ctx,
                                             QuadratureStats* stats) {
  PrecisionScope scope(ctx);
  if (vertices.size() < 2) throw ValidationError("contour needs at least two vertices");
  std::vector<Complex> acc(n);
  Real tol = tolerance(ctx);
  for (std::size_t i = 1; i < vertices.size(); ++i)
    integrate_piece(f, n, vertices[i - 1], vertices[i], Endpoint::Regular, ctx, tol, stats, 0, acc);
  return acc;
}

Complex integrate_contour(const Integrand& f, const std::vector<Complex>& vertices, Endpoint ep,
                          const PrecisionContext& ctx, QuadratureStats* stats) {
  PrecisionScope scope(ctx);
  if (vertices.size() < 2) throw ValidationError("contour needs at least two vertices");
  std::vector<Complex> acc(1);
  Real tol = tolerance(ctx);
  const std::size_t last = vertices.size() - 1;
  for (std::size_t i = 1; i <= last; ++i) {
    bool s = (i == 1) && (ep == Endpoint::SqrtStart || ep == Endpoint::SqrtBoth);
    bool e = (i == last) && (ep == Endpoint::SqrtEnd || ep == Endpoint::SqrtBoth);
    Endpoint piece = s && e ? Endpoint::SqrtBoth
                     : s    ? Endpoint::SqrtStart
                     : e    ? Endpoint::SqrtEnd
                            : Endpoint::Regular;
    integrate_piece(lift(f), 1, vertices[i - 1], vertices[i], piece, ctx, tol, stats, 0, acc);
  }
  return acc[0];
}

Complex integrate_contour(const Integrand& f, const Polyline& path, Endpoint ep,
                          const PrecisionContext& ctx, QuadratureStats* stats) {
  PrecisionScope scope(ctx);
  std::vector<Complex> v;
  v.reserve(path.size());
  for (cd z : path.points()) v.emplace_back(z);
  return integrate_contour(f, v, ep, ctx, stats);
}

}  // namespace loggas
