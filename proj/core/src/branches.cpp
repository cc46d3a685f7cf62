#include <algorithm>
#include <cmath>
#include <numbers>

#include "loggas/eqmeasure.hpp"

namespace loggas {

namespace {

constexpr double kPi = std::numbers::pi;
const cd kI(0, 1);

double angle_gap(double x, double y) {
  double d = std::fmod(std::abs(x - y), 2 * kPi);
  return d > kPi ? 2 * kPi - d : d;
}

double cross(cd u, cd v) { return u.real() * v.imag() - u.imag() * v.real(); }

bool segments_intersect(cd p, cd q, cd r, cd s) {
  cd d1 = q - p, d2 = s - r;
  double den = cross(d1, d2);
  if (den == 0) return false;  // parallel: treated as disjoint
  double u = cross(r - p, d2) / den;
  double v = cross(r - p, d1) / den;
  return u >= 0 && u <= 1 && v >= 0 && v <= 1;
}

// Distance from z to segment [p,q] and the closest point.
double seg_distance(cd z, cd p, cd q, cd& closest) {
  cd d = q - p;
  double l2 = std::norm(d);
  double u = l2 > 0 ? std::clamp(((z - p) * std::conj(d)).real() / l2, 0.0, 1.0) : 0.0;
  closest = p + u * d;
  return std::abs(z - closest);
}

bool inside_polygon(const std::vector<cd>& poly, cd z) {
  bool in = false;
  const std::size_t n = poly.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    cd p = poly[i], q = poly[j];
    if ((p.imag() > z.imag()) != (q.imag() > z.imag())) {
      double xc = p.real() + (z.imag() - p.imag()) * (q.real() - p.real()) / (q.imag() - p.imag());
      if (z.real() < xc) in = !in;
    }
  }
  return in;
}

}  // namespace

CutGeometry::CutGeometry(const SpectralData& sd, const SContour& sc)
    : a_(sd.a.to_cd()), b_(sd.b.to_cd()) {
  scale_ = std::abs(a_ - b_);
  if (sc.J_support.empty()) throw ValidationError("S-contour has no support arcs");
  const std::size_t j0 = sc.J_support.front(), j1 = sc.J_support.back();
  for (std::size_t k = 0; k < sc.arcs.size(); ++k) {
    const ContourArc& ca = sc.arcs[k];
    Arc arc;
    arc.poly = ca.polyline;
    arc.group = k < j0 ? Before : (k > j1 ? After : Support);
    if (!std::isnan(ca.ray_in)) {
      arc.has_ray_in = true;
      arc.dir_in = std::polar(1.0, ca.ray_in);
    }
    if (!std::isnan(ca.ray_out)) {
      arc.has_ray_out = true;
      arc.dir_out = std::polar(1.0, ca.ray_out);
    }
    for (cd p : arc.poly.points()) extent_ = std::max(extent_, std::abs(p));
    if (arc.group == Support) support_.append(arc.poly);
    arcs_.push_back(std::move(arc));
  }

  const double etol = 1e-12 * (1 + std::max(std::abs(a_), std::abs(b_)));
  for (const Arc& arc : arcs_) {
    const auto& p = arc.poly.points();
    if (p.size() < 2) continue;
    for (int e = 0; e < 2; ++e) {
      cd ep = e == 0 ? a_ : b_;
      auto& dirs = e == 0 ? dirs_a_ : dirs_b_;
      if (std::abs(p.front() - ep) < etol) dirs.push_back({std::arg(p[1] - p[0]), true, arc.group});
      if (std::abs(p.back() - ep) < etol)
        dirs.push_back({std::arg(p[p.size() - 2] - p.back()), false, arc.group});
    }
  }
  // support directions first, so an exact endpoint with a side flag uses J
  auto by_group = [](const EndDir& u, const EndDir& v) {
    return (u.group == Support) > (v.group == Support);
  };
  std::stable_sort(dirs_a_.begin(), dirs_a_.end(), by_group);
  std::stable_sort(dirs_b_.begin(), dirs_b_.end(), by_group);

  // chain for left_of_contour: from the last arc entering from infinity before J to
  // the first arc leaving to infinity after J
  std::size_t first = j0, last = j1;
  while (first > 0 && !arcs_[first].has_ray_in) --first;
  while (last + 1 < arcs_.size() && !arcs_[last].has_ray_out) ++last;
  if (!arcs_[first].has_ray_in || !arcs_[last].has_ray_out)
    throw ValidationError("S-contour does not run from infinity to infinity");
  Polyline chain;
  for (std::size_t k = first; k <= last; ++k) chain.append(arcs_[k].poly);
  chain_ = chain.points();
  chain_in_ = arcs_[first].dir_in;
  chain_out_ = arcs_[last].dir_out;
}

CutGeometry::Hit CutGeometry::nearest(cd z, unsigned groups) const {
  Hit h;
  for (const Arc& arc : arcs_) {
    if (!(arc.group & groups)) continue;
    const auto& p = arc.poly.points();
    for (std::size_t i = 1; i < p.size(); ++i) {
      cd c;
      double d = seg_distance(z, p[i - 1], p[i], c);
      if (d < h.d) {
        h.d = d;
        h.p = c;
        h.tangent = (p[i] - p[i - 1]) / std::abs(p[i] - p[i - 1]);
      }
    }
    auto ray = [&](cd origin, cd dir, bool outward) {
      double u = std::max(0.0, ((z - origin) * std::conj(dir)).real());
      cd c = origin + u * dir;
      double d = std::abs(z - c);
      if (d < h.d) {
        h.d = d;
        h.p = c;
        h.tangent = outward ? dir : -dir;
      }
    };
    if (arc.has_ray_in) ray(p.front(), arc.dir_in, false);
    if (arc.has_ray_out) ray(p.back(), arc.dir_out, true);
  }
  // at a vertex (a corner of J at a double zero, say) use the bisector of all
  // segments meeting there, so a normal offset clears both
  if (h.d < 1e300) {
    cd sum = 0;
    const double hair = 1e-12 * (scale_ + std::abs(h.p));
    for (const Arc& arc : arcs_) {
      if (!(arc.group & groups)) continue;
      const auto& p = arc.poly.points();
      for (std::size_t i = 1; i < p.size(); ++i) {
        cd c;
        if (seg_distance(h.p, p[i - 1], p[i], c) < hair) sum += (p[i] - p[i - 1]) / std::abs(p[i] - p[i - 1]);
      }
    }
    if (std::abs(sum) > 1e-3) h.tangent = sum / std::abs(sum);
  }
  return h;
}

double CutGeometry::distance(cd z, unsigned groups) const { return nearest(z, groups).d; }

cd CutGeometry::reference_point(cd z, Side side, unsigned groups) const {
  const double r_loc = 1e-4 * scale_;
  for (int e = 0; e < 2; ++e) {
    cd ep = e == 0 ? a_ : b_;
    double d = std::abs(z - ep);
    if (d >= r_loc) continue;
    std::vector<EndDir> dirs;
    for (const EndDir& dd : e == 0 ? dirs_a_ : dirs_b_)
      if (dd.group & groups) dirs.push_back(dd);
    auto nudge = [&](const EndDir& dd) {
      double s = (side == Side::Plus) == dd.leaving ? 0.3 : -0.3;
      return dd.theta + s;
    };
    double phi;
    if (dirs.empty()) {
      phi = d > 0 ? std::arg(z - ep) : 0.0;
    } else if (d == 0) {
      if (side != Side::None) {
        phi = nudge(dirs.front());
      } else if (dirs.size() == 1) {
        phi = dirs.front().theta + kPi;
      } else {
        throw NumericalError("evaluation at a branch point joined by two cuts needs a side flag");
      }
    } else {
      phi = std::arg(z - ep);
      const EndDir* best = nullptr;
      double gap = 1e9;
      for (const EndDir& dd : dirs) {
        double g = angle_gap(phi, dd.theta);
        if (g < gap) {
          gap = g;
          best = &dd;
        }
      }
      if (side != Side::None && gap < 0.3) {
        phi = nudge(*best);
      } else if (side == Side::None && gap < 1e-7) {
        throw NumericalError("evaluation on a branch cut without a side flag");
      }
    }
    return ep + 0.5 * r_loc * std::polar(1.0, phi);
  }
  Hit h = nearest(z, groups);
  const double tol = 1e-9 * std::max(scale_, std::abs(z));
  if (side == Side::None) {
    if (h.d < tol) throw NumericalError("evaluation on a branch cut without a side flag");
    return z;
  }
  if (h.d > 1e-2 * std::max(scale_, std::abs(h.p))) return z;
  cd n = (side == Side::Plus ? kI : -kI) * h.tangent;
  return h.p + 1e-6 * std::max(scale_, std::abs(h.p)) * n;
}

bool CutGeometry::inside_lens(cd z) const { return inside_polygon(support_.points(), z); }

cd CutGeometry::R(cd z) const {
  if (z == a_ || z == b_) return 0;
  cd r = (z - a_) * std::sqrt((z - b_) / (z - a_));
  return inside_lens(z) ? -r : r;
}

bool CutGeometry::left_of_contour(cd z) const {
  const double rc = 100 * std::max(extent_, std::abs(z));
  std::vector<cd> poly;
  cd pin = chain_.front() + rc * chain_in_;
  cd pout = chain_.back() + rc * chain_out_;
  poly.push_back(pin);
  poly.insert(poly.end(), chain_.begin(), chain_.end());
  poly.push_back(pout);
  double ao = std::arg(pout), ai = std::arg(pin);
  double sweep = std::fmod(ai - ao + 4 * kPi, 2 * kPi);
  const int n = 128;
  for (int k = 1; k < n; ++k) poly.push_back(std::polar(std::abs(pout), ao + sweep * k / n));
  return inside_polygon(poly, z);
}

bool CutGeometry::blocked(cd p, cd q, unsigned groups) const {
  const double far = 1e6 * std::max({extent_, std::abs(p), std::abs(q)});
  for (const Arc& arc : arcs_) {
    if (!(arc.group & groups)) continue;
    const auto& v = arc.poly.points();
    for (std::size_t i = 1; i < v.size(); ++i)
      if (segments_intersect(p, q, v[i - 1], v[i])) return true;
    if (arc.has_ray_in && segments_intersect(p, q, v.front(), v.front() + far * arc.dir_in)) return true;
    if (arc.has_ray_out && segments_intersect(p, q, v.back(), v.back() + far * arc.dir_out)) return true;
  }
  return false;
}

double CutGeometry::walk(const std::function<cd(cd)>& w, const std::vector<cd>& path) const {
  std::function<double(cd, cd, cd, cd, int)> incr = [&](cd p, cd q, cd wp, cd wq, int depth) {
    double d = std::arg(wq / wp);
    if (std::abs(d) < 0.2 || depth > 40) return d;
    cd m = 0.5 * (p + q);
    cd wm = w(m);
    return incr(p, m, wp, wm, depth + 1) + incr(m, q, wm, wq, depth + 1);
  };
  double theta = std::arg(w(path.front()));
  for (std::size_t i = 1; i < path.size(); ++i) {
    const int n = 64;
    cd prev = path[i - 1], wprev = w(prev);
    for (int k = 1; k <= n; ++k) {
      cd nxt = path[i - 1] + (path[i] - path[i - 1]) * (double(k) / n);
      cd wn = w(nxt);
      theta += incr(prev, nxt, wprev, wn, 0);
      prev = nxt;
      wprev = wn;
    }
  }
  return theta;
}

double CutGeometry::unwrapped_arg(const std::function<cd(cd)>& w, cd z, unsigned groups) const {
  const double rf = 4 * std::max(extent_, std::abs(z)) + scale_;
  auto far_from = [&](cd p, cd& out) {
    double base = std::arg(p);
    for (int j = 0; j < 64; ++j) {
      double th = base + ((j + 1) / 2) * (j % 2 ? 1.0 : -1.0) * kPi / 32;
      if (angle_gap(th, kPi) < 0.3) continue;
      cd f = std::polar(rf, th);
      if (!blocked(p, f, groups)) {
        out = f;
        return true;
      }
    }
    return false;
  };
  cd far;
  if (far_from(z, far)) return walk(w, {far, z});
  for (double r : {1.5 * extent_, 3.0 * extent_, 0.5 * extent_}) {
    for (int k = 0; k < 48; ++k) {
      cd mid = std::polar(r, 2 * kPi * k / 48);
      if (blocked(z, mid, groups)) continue;
      if (far_from(mid, far)) return walk(w, {far, mid, z});
    }
  }
  throw NumericalError("no cut-free path from infinity to the evaluation point");
}

}  // namespace loggas
