#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include <boost/multiprecision/mpfr.hpp>

#include "loggas/errors.hpp"

namespace loggas {

using Real = boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<0>,
                                           boost::multiprecision::et_off>;
using cd = std::complex<double>;

// Extended-precision complex number over MPFR reals.
class Complex {
 public:
  Real re;
  Real im;

  Complex() : re(0), im(0) {}
  Complex(const Real& r) : re(r), im(0) {}  // NOLINT(google-explicit-constructor)
  Complex(const Real& r, const Real& i) : re(r), im(i) {}
  Complex(double r) : re(r), im(0) {}  // NOLINT(google-explicit-constructor)
  Complex(int r) : re(r), im(0) {}     // NOLINT(google-explicit-constructor)
  Complex(double r, double i) : re(r), im(i) {}
  explicit Complex(cd z) : re(z.real()), im(z.imag()) {}

  cd to_cd() const { return {re.convert_to<double>(), im.convert_to<double>()}; }

  Complex& operator+=(const Complex& o) {
    re += o.re;
    im += o.im;
    return *this;
  }
  Complex& operator-=(const Complex& o) {
    re -= o.re;
    im -= o.im;
    return *this;
  }
  Complex& operator*=(const Complex& o) {
    Real r = re * o.re - im * o.im;
    im = re * o.im + im * o.re;
    re = r;
    return *this;
  }
  Complex& operator/=(const Complex& o) {
    Real d = o.re * o.re + o.im * o.im;
    Real r = (re * o.re + im * o.im) / d;
    im = (im * o.re - re * o.im) / d;
    re = r;
    return *this;
  }
  Complex& operator*=(const Real& s) {
    re *= s;
    im *= s;
    return *this;
  }
  Complex& operator/=(const Real& s) {
    re /= s;
    im /= s;
    return *this;
  }
};

inline Complex operator-(const Complex& a) { return {-a.re, -a.im}; }
inline Complex operator+(Complex a, const Complex& b) { return a += b; }
inline Complex operator-(Complex a, const Complex& b) { return a -= b; }
inline Complex operator*(Complex a, const Complex& b) { return a *= b; }
inline Complex operator/(Complex a, const Complex& b) { return a /= b; }
inline Complex operator*(Complex a, const Real& s) { return a *= s; }
inline Complex operator*(const Real& s, Complex a) { return a *= s; }
inline Complex operator/(Complex a, const Real& s) { return a /= s; }
inline Complex operator+(Complex a, const Real& s) { a.re += s; return a; }
inline Complex operator-(Complex a, const Real& s) { a.re -= s; return a; }
inline Complex operator+(const Real& s, Complex a) { a.re += s; return a; }
inline Complex operator-(const Real& s, const Complex& a) { return {s - a.re, -a.im}; }
inline Complex operator*(Complex a, double s) { return a *= Real(s); }
inline Complex operator*(double s, Complex a) { return a *= Real(s); }
inline Complex operator/(Complex a, double s) { return a /= Real(s); }
inline Complex operator+(Complex a, double s) { a.re += s; return a; }
inline Complex operator-(Complex a, double s) { a.re -= s; return a; }
inline Complex operator+(double s, Complex a) { a.re += s; return a; }
inline Complex operator-(double s, const Complex& a) { return {Real(s) - a.re, -a.im}; }
inline Complex operator/(double s, const Complex& a) { return Complex(s) / a; }
inline Complex operator*(Complex a, int s) { return a *= Real(s); }
inline Complex operator*(int s, Complex a) { return a *= Real(s); }
inline Complex operator/(Complex a, int s) { return a /= Real(s); }
inline Complex operator/(int s, const Complex& a) { return Complex(s) / a; }
inline Complex operator+(Complex a, int s) { a.re += s; return a; }
inline Complex operator-(Complex a, int s) { a.re -= s; return a; }
inline Complex operator-(int s, const Complex& a) { return {Real(s) - a.re, -a.im}; }

Real abs(const Complex& z);
Real norm(const Complex& z);
Real arg(const Complex& z);
Complex conj(const Complex& z);
Complex exp(const Complex& z);
Complex log(const Complex& z);   // principal branch
Complex sqrt(const Complex& z);  // principal branch, Re ≥ 0
Complex pow(const Complex& z, const Real& p);
Complex pow(const Complex& z, int n);
Complex polar(const Real& r, const Real& theta);
Complex expi(const Real& theta);  // e^{iθ}

inline Real rmax(const Real& a, const Real& b) { return a < b ? b : a; }
inline Real rmin(const Real& a, const Real& b) { return b < a ? b : a; }

Real real_pi();
Real real_ln2();
Complex unit_i();

// Decimal digits needed to carry the given number of bits.
unsigned digits10_for_bits(int bits);

struct PrecisionContext {
  int bits = 256;
  double quad_tol = 0;  // 0 selects 2^(−bits+32)
  double ode_tol = 1e-10;
  int max_steps = 400000;

  static PrecisionContext with_bits(int bits);
  double effective_quad_tol() const;
  void validate() const;  // throws ValidationError
};

// Sets the working precision of newly created Real values for the lifetime of the guard.
class PrecisionScope {
 public:
  explicit PrecisionScope(int bits);
  explicit PrecisionScope(const PrecisionContext& ctx) : PrecisionScope(ctx.bits) {}
  ~PrecisionScope();
  PrecisionScope(const PrecisionScope&) = delete;
  PrecisionScope& operator=(const PrecisionScope&) = delete;

 private:
  unsigned saved_;
};

class Polyline {
 public:
  Polyline() = default;
  explicit Polyline(const std::vector<cd>& pts);

  void push_back(cd z);
  void append(const Polyline& other);  // skips a duplicated joint point
  Polyline reversed() const;

  const std::vector<cd>& points() const { return points_; }
  const std::vector<double>& cumulative_length() const { return cum_; }
  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  cd front() const { return points_.front(); }
  cd back() const { return points_.back(); }
  double length() const { return cum_.empty() ? 0.0 : cum_.back(); }

  cd at_length(double s) const;  // linear interpolation by arclength
  double distance_to(cd z) const;
  std::size_t nearest_index(cd z) const;
  Polyline resampled(std::size_t n) const;  // n points evenly spaced in arclength
  Polyline simplified(double tol) const;    // Douglas–Peucker, endpoints kept

 private:
  std::vector<cd> points_;
  std::vector<double> cum_;
};

// ---------------------------------------------------------------------------
// Quadrature

enum class Endpoint { Regular, SqrtStart, SqrtEnd, SqrtBoth };

using Integrand = std::function<Complex(const Complex&)>;
// Vector-valued integrand: fills out[0..n).
using MultiIntegrand = std::function<void(const Complex&, std::vector<Complex>&)>;

struct QuadratureStats {
  int levels = 0;
  long evaluations = 0;
  int subdivisions = 0;
};

Complex integrate_segment(const Integrand& f, const Complex& z0, const Complex& z1,
                          Endpoint ep, const PrecisionContext& ctx,
                          QuadratureStats* stats = nullptr);

Complex integrate_contour(const Integrand& f, const std::vector<Complex>& vertices,
                          Endpoint ep, const PrecisionContext& ctx,
                          QuadratureStats* stats = nullptr);

Complex integrate_contour(const Integrand& f, const Polyline& path, Endpoint ep,
                          const PrecisionContext& ctx, QuadratureStats* stats = nullptr);

std::vector<Complex> integrate_contour_multi(const MultiIntegrand& f, std::size_t n,
                                             const std::vector<Complex>& vertices,
                                             const PrecisionContext& ctx,
                                             QuadratureStats* stats = nullptr);

// ---------------------------------------------------------------------------
// Unit-speed path tracing (double precision)

using DirectionField = std::function<cd(cd)>;

enum class StopReason { Radius, Target, Arclength, Event, MaxSteps };

struct StopRule {
  double radius = std::numeric_limits<double>::infinity();
  std::vector<cd> targets;
  double target_radius = 0;
  double target_min_arclength = 0;  // targets ignored before this arclength
  double arclength_cap = std::numeric_limits<double>::infinity();
  // Stops where event(z) changes sign, located on the dense output.
  std::function<double(cd)> event;
  double event_min_arclength = 0;
  double max_step = 0.05;
};

struct TraceResult {
  Polyline path;
  StopReason reason = StopReason::MaxSteps;
  int target = -1;
  double max_tangency_residual = 0;  // measured at chord midpoints
};

// Integrates z' = field(z) at unit speed. The field is treated as a line field:
// each evaluation is sign-aligned with the current heading, which starts at
// initial_direction (or field(z0) when zero).
TraceResult trace_unit_speed(const DirectionField& field, cd z0, cd initial_direction,
                             const StopRule& stop, const PrecisionContext& ctx);

// ---------------------------------------------------------------------------
// Roots of x³ − t x − 1

struct CubicRoots {
  std::array<Complex, 3> roots;
  std::array<int, 3> multiplicity{1, 1, 1};
};

CubicRoots cubic_roots(const Complex& t, const PrecisionContext& ctx);

}  // namespace loggas
