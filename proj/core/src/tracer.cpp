// Unit-speed tracing of line fields with the Dormand–Prince 5(4) pair.
#include <algorithm>
#include <cmath>
#include <sstream>

#include "loggas/mpnum.hpp"

namespace loggas {

namespace {

constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

struct Hermite {
  cd p0, p1, m0, m1;  // m = h·z'
  cd at(double s) const {
    double s2 = s * s, s3 = s2 * s;
    return (2 * s3 - 3 * s2 + 1) * p0 + (s3 - 2 * s2 + s) * m0 + (-2 * s3 + 3 * s2) * p1 +
           (s3 - s2) * m1;
  }
  cd tangent(double s) const {
    double s2 = s * s;
    return (6 * s2 - 6 * s) * p0 + (3 * s2 - 4 * s + 1) * m0 + (-6 * s2 + 6 * s) * p1 +
           (3 * s2 - 2 * s) * m1;
  }
};

double seg_param(cd p, cd a, cd b) {
  cd d = b - a;
  double l2 = std::norm(d);
  if (l2 == 0) return 0;
  return std::clamp(((p - a) * std::conj(d)).real() / l2, 0.0, 1.0);
}

}  // namespace

TraceResult trace_unit_speed(const DirectionField& field, cd z0, cd initial_direction,
                             const StopRule& stop, const PrecisionContext& ctx) {
  TraceResult res;
  res.path.push_back(z0);

  cd heading = initial_direction;
  auto eval = [&](cd z, cd ref) {
    cd f = field(z);
    double m = std::abs(f);
    if (!(m > 0) || !std::isfinite(m)) {
      std::ostringstream os;
      os << "direction field degenerate at " << z;
      throw NumericalError(os.str());
    }
    f /= m;
    if ((f * std::conj(ref)).real() < 0) f = -f;
    return f;
  };
  if (std::abs(heading) == 0) heading = field(z0);
  heading /= std::abs(heading);

  const double tol = ctx.ode_tol;
  const double tang_tol = 50 * ctx.ode_tol;
  double s = 0;
  cd z = z0;
  cd k1 = eval(z, heading);
  double hmax0 = stop.max_step > 0 ? stop.max_step : 0.05;
  double h = hmax0 / 64;
  double prev_event = stop.event ? stop.event(z0) : 0.0;

  for (int step = 0; step < ctx.max_steps; ++step) {
    double hmax = hmax0 * std::max(1.0, 0.1 * std::abs(z));
    h = std::min(h, hmax);
    bool capped = false;
    if (s + h >= stop.arclength_cap) {
      h = stop.arclength_cap - s;
      capped = true;
    }
    if (h < 1e-14 * (1 + std::abs(z))) {
      std::ostringstream os;
      os << "step size underflow at " << z;
      throw NumericalError(os.str());
    }
    cd ref = k1;
    cd k2 = eval(z + h * (a21 * k1), ref);
    cd k3 = eval(z + h * (a31 * k1 + a32 * k2), ref);
    cd k4 = eval(z + h * (a41 * k1 + a42 * k2 + a43 * k3), ref);
    cd k5 = eval(z + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4), ref);
    cd k6 = eval(z + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5), ref);
    cd z1 = z + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    cd k7 = eval(z1, ref);
    double err = h * std::abs(e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    double scale = tol * (1 + 0.01 * std::abs(z));

    bool accept = err <= scale;
    Hermite H{z, z1, h * k1, h * k7};
    double resid = 0;
    if (accept) {
      cd mid = H.at(0.5);
      cd u = H.tangent(0.5);
      u /= std::abs(u);
      resid = std::abs(u - eval(mid, ref));
      if (resid > tang_tol) accept = false;
    }
    if (!accept) {
      double fac = err > 0 ? 0.9 * std::pow(scale / err, 0.2) : 0.5;
      h *= std::clamp(fac, 0.1, 0.5);
      continue;
    }
    res.max_tangency_residual = std::max(res.max_tangency_residual, resid);

    // stop checks on the accepted step
    if (std::abs(z1) >= stop.radius) {
      double lo = 0, hi = 1;
      for (int i = 0; i < 60; ++i) {
        double m = 0.5 * (lo + hi);
        (std::abs(H.at(m)) < stop.radius ? lo : hi) = m;
      }
      res.path.push_back(H.at(hi));
      res.reason = StopReason::Radius;
      return res;
    }
    if (stop.event && s + h >= stop.event_min_arclength) {
      double ev = stop.event(z1);
      if ((prev_event < 0 && ev >= 0) || (prev_event > 0 && ev <= 0)) {
        double lo = 0, hi = 1;
        for (int i = 0; i < 60; ++i) {
          double m = 0.5 * (lo + hi);
          double v = stop.event(H.at(m));
          if ((prev_event < 0) == (v < 0)) lo = m;
          else hi = m;
        }
        res.path.push_back(H.at(0.5 * (lo + hi)));
        res.reason = StopReason::Event;
        return res;
      }
      prev_event = ev;
    } else if (stop.event) {
      prev_event = stop.event(z1);
    }
    if (!stop.targets.empty() && s + h >= stop.target_min_arclength) {
      for (std::size_t i = 0; i < stop.targets.size(); ++i) {
        cd tg = stop.targets[i];
        double p = seg_param(tg, z, z1);
        cd q = z + p * (z1 - z);
        if (std::abs(q - tg) <= stop.target_radius) {
          res.path.push_back(q);
          res.reason = StopReason::Target;
          res.target = static_cast<int>(i);
          return res;
        }
      }
    }
    res.path.push_back(z1);
    s += h;
    z = z1;
    k1 = k7;
    if (capped) {
      res.reason = StopReason::Arclength;
      return res;
    }
    double fac = err > 0 ? 0.9 * std::pow(scale / err, 0.2) : 5.0;
    h *= std::clamp(fac, 0.2, 5.0);
  }
  res.reason = StopReason::MaxSteps;
  return res;
}

}  // namespace loggas
