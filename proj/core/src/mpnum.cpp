#include "loggas/mpnum.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace loggas {

namespace mp = boost::multiprecision;

Real abs(const Complex& z) {
  if (z.im == 0) return mp::abs(z.re);
  if (z.re == 0) return mp::abs(z.im);
  return mp::hypot(z.re, z.im);
}

Real norm(const Complex& z) { return z.re * z.re + z.im * z.im; }

Real arg(const Complex& z) { return mp::atan2(z.im, z.re); }

Complex conj(const Complex& z) { return {z.re, -z.im}; }

Complex exp(const Complex& z) {
  Real m = mp::exp(z.re);
  if (z.im == 0) return {m, Real(0)};
  return {m * mp::cos(z.im), m * mp::sin(z.im)};
}

Complex log(const Complex& z) {
  if (z.re == 0 && z.im == 0) throw NumericalError("log of zero");
  return {mp::log(abs(z)), arg(z)};
}

Complex sqrt(const Complex& z) {
  if (z.re == 0 && z.im == 0) return {};
  Real r = abs(z);
  if (z.re >= 0) {
    Real s = mp::sqrt((r + z.re) / 2);
    return {s, z.im / (2 * s)};
  }
  Real s = mp::sqrt((r - z.re) / 2);
  Real re = mp::abs(z.im) / (2 * s);
  return {re, z.im < 0 ? Real(-s) : s};
}

Complex pow(const Complex& z, const Real& p) {
  if (z.re == 0 && z.im == 0) return {};
  return exp(log(z) * p);
}

Complex pow(const Complex& z, int n) {
  if (n < 0) return Complex(1) / pow(z, -n);
  Complex result(1), base = z;
  while (n) {
    if (n & 1) result *= base;
    base *= base;
    n >>= 1;
  }
  return result;
}

Complex polar(const Real& r, const Real& theta) { return {r * mp::cos(theta), r * mp::sin(theta)}; }

Complex expi(const Real& theta) { return {mp::cos(theta), mp::sin(theta)}; }

Real real_pi() {
  Real r;
  mpfr_const_pi(r.backend().data(), MPFR_RNDN);
  return r;
}

Real real_ln2() {
  Real r;
  mpfr_const_log2(r.backend().data(), MPFR_RNDN);
  return r;
}

Complex unit_i() { return {Real(0), Real(1)}; }

unsigned digits10_for_bits(int bits) {
  return static_cast<unsigned>(std::ceil(bits * 0.30102999566398120));
}

PrecisionContext PrecisionContext::with_bits(int bits) {
  PrecisionContext c;
  c.bits = bits;
  return c;
}

double PrecisionContext::effective_quad_tol() const {
  return quad_tol > 0 ? quad_tol : std::ldexp(1.0, -bits + 32);
}

void PrecisionContext::validate() const {
  if (bits < 64) throw ValidationError("bits must be >= 64");
  const double floor = std::ldexp(1.0, -bits + 16);
  if (quad_tol != 0 && quad_tol < floor) throw ValidationError("quad_tol below 2^(-bits+16)");
  if (ode_tol < floor) throw ValidationError("ode_tol below 2^(-bits+16)");
  if (ode_tol <= 0 || ode_tol >= 1) throw ValidationError("ode_tol must lie in (0,1)");
  if (max_steps <= 0) throw ValidationError("max_steps must be positive");
}

PrecisionScope::PrecisionScope(int bits) : saved_(Real::default_precision()) {
  unsigned d = digits10_for_bits(bits);
  if (d != saved_) Real::default_precision(d);
}

PrecisionScope::~PrecisionScope() {
  if (Real::default_precision() != saved_) Real::default_precision(saved_);
}

// ---------------------------------------------------------------------------
// Polyline

Polyline::Polyline(const std::vector<cd>& pts) {
  for (cd z : pts) push_back(z);
}

void Polyline::push_back(cd z) {
  if (points_.empty()) {
    points_.push_back(z);
    cum_.push_back(0.0);
    return;
  }
  double d = std::abs(z - points_.back());
  if (!(d > 0)) return;  // drop duplicates to keep arclength strictly increasing
  points_.push_back(z);
  cum_.push_back(cum_.back() + d);
}

void Polyline::append(const Polyline& other) {
  for (cd z : other.points_) push_back(z);
}

Polyline Polyline::reversed() const {
  std::vector<cd> r(points_.rbegin(), points_.rend());
  return Polyline(r);
}

cd Polyline::at_length(double s) const {
  if (points_.empty()) throw ValidationError("empty polyline");
  if (s <= 0) return points_.front();
  if (s >= cum_.back()) return points_.back();
  auto it = std::upper_bound(cum_.begin(), cum_.end(), s);
  std::size_t i = static_cast<std::size_t>(it - cum_.begin());
  double f = (s - cum_[i - 1]) / (cum_[i] - cum_[i - 1]);
  return points_[i - 1] + f * (points_[i] - points_[i - 1]);
}

static double seg_dist(cd p, cd a, cd b) {
  cd d = b - a;
  double l2 = std::norm(d);
  if (l2 == 0) return std::abs(p - a);
  double s = std::clamp(((p - a) * std::conj(d)).real() / l2, 0.0, 1.0);
  return std::abs(p - (a + s * d));
}

double Polyline::distance_to(cd z) const {
  if (points_.empty()) return std::numeric_limits<double>::infinity();
  if (points_.size() == 1) return std::abs(z - points_[0]);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < points_.size(); ++i)
    best = std::min(best, seg_dist(z, points_[i - 1], points_[i]));
  return best;
}

std::size_t Polyline::nearest_index(cd z) const {
  std::size_t best = 0;
  double bd = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < points_.size(); ++i) {
    double d = std::abs(z - points_[i]);
    if (d < bd) {
      bd = d;
      best = i;
    }
  }
  return best;
}

Polyline Polyline::resampled(std::size_t n) const {
  if (n < 2 || points_.size() < 2) return *this;
  std::vector<cd> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i)
    out.push_back(at_length(length() * static_cast<double>(i) / static_cast<double>(n - 1)));
  return Polyline(out);
}

Polyline Polyline::simplified(double tol) const {
  if (points_.size() < 3) return *this;
  std::vector<char> keep(points_.size(), 0);
  keep[0] = 1;
  keep[points_.size() - 1] = 1;
  std::vector<std::pair<std::size_t, std::size_t>> stack{{0, points_.size() - 1}};
  while (!stack.empty()) {
    auto [i, j] = stack.back();
    stack.pop_back();
    double worst = -1;
    std::size_t k = i;
    for (std::size_t m = i + 1; m < j; ++m) {
      double d = seg_dist(points_[m], points_[i], points_[j]);
      if (d > worst) {
        worst = d;
        k = m;
      }
    }
    if (worst > tol) {
      keep[k] = 1;
      stack.push_back({i, k});
      stack.push_back({k, j});
    }
  }
  std::vector<cd> out;
  for (std::size_t m = 0; m < points_.size(); ++m)
    if (keep[m]) out.push_back(points_[m]);
  return Polyline(out);
}

// ---------------------------------------------------------------------------
// Cubic roots

namespace {

std::array<cd, 3> durand_kerner(cd t) {
  std::array<cd, 3> r{cd(0.4, 0.9), cd(0.4, 0.9) * cd(0.4, 0.9),
                      cd(0.4, 0.9) * cd(0.4, 0.9) * cd(0.4, 0.9)};
  double scale = std::max(1.0, std::sqrt(std::abs(t)));
  for (auto& z : r) z *= scale;
  auto p = [t](cd x) { return x * x * x - t * x - 1.0; };
  for (int it = 0; it < 500; ++it) {
    double move = 0;
    for (int i = 0; i < 3; ++i) {
      cd den = 1.0;
      for (int j = 0; j < 3; ++j)
        if (j != i) den *= r[i] - r[j];
      if (std::abs(den) == 0) den = 1e-300;
      cd d = p(r[i]) / den;
      r[i] -= d;
      move = std::max(move, std::abs(d));
    }
    if (move < 1e-15 * scale) break;
  }
  return r;
}

}  // namespace

CubicRoots cubic_roots(const Complex& t, const PrecisionContext& ctx) {
  PrecisionScope scope(ctx);
  auto seeds = durand_kerner(t.to_cd());
  CubicRoots out;
  const Real eps = mp::ldexp(Real(1), -ctx.bits + 4);
  for (int i = 0; i < 3; ++i) {
    Complex x(seeds[i]);
    for (int it = 0; it < 200; ++it) {
      Complex x2 = x * x;
      Complex f = x2 * x - t * x - 1;
      Complex fp = 3 * x2 - t;
      if (abs(fp) == 0) break;
      Complex dx = f / fp;
      x -= dx;
      if (abs(dx) <= eps * (1 + abs(x))) break;
    }
    out.roots[i] = x;
  }
  const Real merge = mp::ldexp(Real(1), -ctx.bits / 4);
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j) {
      if (abs(out.roots[i] - out.roots[j]) > merge) continue;
      // A double root of x³ − t x − 1 satisfies 3x² = t.
      Complex d = sqrt(t / 3);
      Complex mid = (out.roots[i] + out.roots[j]) / 2;
      if (abs(mid + d) < abs(mid - d)) d = -d;
      int k = 3 - i - j;
      out.roots[i] = d;
      out.roots[j] = d;
      out.roots[k] = -2 * d;
      out.multiplicity = {1, 1, 1};
      out.multiplicity[i] = 2;
      out.multiplicity[j] = 2;
      return out;
    }
  return out;
}

}  // namespace loggas
