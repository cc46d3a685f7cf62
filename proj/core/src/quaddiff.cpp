// Critical and critical orthogonal graphs of −Q(z;t)dz², and the S-contour.
#include "loggas/quaddiff.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

namespace loggas {

namespace {

constexpr double kTwoPi = 2 * M_PI;

double wrap(double a) {
  a = std::fmod(a, kTwoPi);
  if (a < 0) a += kTwoPi;
  return a;
}

double angle_gap(double a, double b) {
  double d = std::fabs(wrap(a) - wrap(b));
  return std::min(d, kTwoPi - d);
}

struct Slot {
  int point;
  ArcKind kind;
  double angle;
  bool used = false;
};

struct Geometry {
  cd a, b, c;
  double scale;  // |a − b|
};

cd sqrtQ_dir(const Geometry& g, cd z) {
  // √Q up to sign; the line field does not depend on the sign.
  cd r = std::sqrt((z - g.a) * (z - g.b));
  return 0.5 * (z - g.c) * r;
}

int infinity_index(ArcKind k, double angle) {
  double base = k == ArcKind::Trajectory ? M_PI / 6 : 0.0;
  double u = wrap(angle - base) / (M_PI / 3);
  return static_cast<int>(std::lround(u)) % 6;
}

double infinity_angle(ArcKind k, int idx) {
  return (k == ArcKind::Trajectory ? M_PI / 6 : 0.0) + idx * M_PI / 3;
}

std::string end_name(const CriticalGraph& g, const ArcEnd& e) {
  if (e.at_infinity) return "inf" + std::to_string(e.direction);
  return std::string(1, g.critical_points[e.point].label);
}

}  // namespace

std::vector<double> launch_angles(const Complex&, int m, const Complex& Qm) {
  if (m < 1) throw ValidationError("zero order must be at least 1");
  if (Qm.re == 0 && Qm.im == 0) throw ValidationError("Q derivative vanishes: zero order misdeclared");
  double aq = std::arg(Qm.to_cd());
  std::vector<double> out;
  for (int k = 0; k < m + 2; ++k) out.push_back(wrap(((2 * k + 1) * M_PI - aq) / (m + 2)));
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<double> orthogonal_launch_angles(int m, const Complex& Qm) {
  if (m < 1) throw ValidationError("zero order must be at least 1");
  if (Qm.re == 0 && Qm.im == 0) throw ValidationError("Q derivative vanishes: zero order misdeclared");
  double aq = std::arg(Qm.to_cd());
  std::vector<double> out;
  for (int k = 0; k < m + 2; ++k) out.push_back(wrap((2 * k * M_PI - aq) / (m + 2)));
  std::sort(out.begin(), out.end());
  return out;
}

Complex Q_eval(const SpectralData& sd, const Complex& z) {
  Complex zc = z - sd.c;
  return (z - sd.a) * (z - sd.b) * zc * zc / 4;
}

CriticalGraph critical_graph(const SpectralData& sd, const PrecisionContext& ctx) {
  if (sd.region.phase == Phase::OutsideOneCut)
    throw ValidationError("critical graph requested outside the one-cut region");
  PrecisionScope scope(ctx);
  CriticalGraph G;
  Geometry geo{sd.a.to_cd(), sd.b.to_cd(), sd.c.to_cd(), 0};
  geo.scale = std::abs(geo.a - geo.b);
  G.seed_offset = 1e-6 * geo.scale;
  G.snap_radius = 1e-4 * geo.scale;
  const double tabs = std::abs(sd.t.to_cd());
  G.radius = 10 * std::sqrt(1 + tabs) *
             std::max({std::abs(geo.a), std::abs(geo.b), std::abs(geo.c), 1.0});

  const bool merged_b = sd.region.phase == Phase::CriticalPoint;
  const bool merged_a = sd.region.phase == Phase::CriticalPointRotated;
  if (merged_b) {
    G.critical_points.push_back({sd.a, 1, 'a'});
    G.critical_points.push_back({sd.c, 3, 'b'});
    geo.b = geo.c;
  } else if (merged_a) {
    G.critical_points.push_back({sd.c, 3, 'a'});
    G.critical_points.push_back({sd.b, 1, 'b'});
    geo.a = geo.c;
  } else {
    G.critical_points.push_back({sd.a, 1, 'a'});
    G.critical_points.push_back({sd.b, 1, 'b'});
    G.critical_points.push_back({sd.c, 2, 'c'});
  }

  // Leading Taylor coefficient Q^{(m)}(z0) at each zero.
  auto leading = [&](const GraphPoint& p) -> Complex {
    if (p.order == 1) {
      Complex o = p.label == 'a' ? sd.b : sd.a;
      Complex d = p.z - sd.c;
      return (p.z - o) * d * d / 4;
    }
    if (p.order == 2) return (sd.c - sd.a) * (sd.c - sd.b) / 2;
    Complex o = p.label == 'b' ? sd.a : sd.b;
    return Complex(3) * (p.z - o) / 2;
  };

  std::vector<Slot> slots;
  for (std::size_t i = 0; i < G.critical_points.size(); ++i) {
    const GraphPoint& p = G.critical_points[i];
    Complex lc = leading(p);
    for (double th : launch_angles(p.z, p.order, lc))
      slots.push_back({static_cast<int>(i), ArcKind::Trajectory, th});
    for (double th : orthogonal_launch_angles(p.order, lc))
      slots.push_back({static_cast<int>(i), ArcKind::OrthogonalTrajectory, th});
  }

  auto field_for = [&](ArcKind k) {
    return [&geo, k](cd z) {
      cd s = sqrtQ_dir(geo, z);
      cd u = std::conj(s) / std::abs(s);
      return k == ArcKind::Trajectory ? cd(0, 1) * u : u;
    };
  };

  std::vector<cd> pts;
  for (const auto& p : G.critical_points) pts.push_back(p.z.to_cd());

  for (std::size_t si = 0; si < slots.size(); ++si) {
    if (slots[si].used) continue;
    Slot& s = slots[si];
    s.used = true;
    cd p0 = pts[s.point];
    cd dir = std::polar(1.0, s.angle);
    StopRule stop;
    stop.radius = G.radius;
    stop.target_radius = G.snap_radius;
    stop.max_step = 0.02 * std::max(geo.scale, 1.0);
    std::vector<int> target_ids;
    for (std::size_t j = 0; j < pts.size(); ++j)
      if (static_cast<int>(j) != s.point) {
        stop.targets.push_back(pts[j]);
        target_ids.push_back(static_cast<int>(j));
      }
    TraceResult tr = trace_unit_speed(field_for(s.kind), p0 + G.seed_offset * dir, dir, stop, ctx);

    PathArc arc;
    arc.kind = s.kind;
    arc.launch_angle = s.angle;
    arc.max_tangency_residual = tr.max_tangency_residual;
    arc.origin.point = s.point;
    Polyline poly;
    poly.push_back(p0);
    const auto& tp = tr.path.points();
    if (tr.reason == StopReason::Target) {
      int q = target_ids[tr.target];
      cd end = pts[q];
      for (std::size_t k = 0; k + 1 < tp.size(); ++k) poly.push_back(tp[k]);
      // the incoming direction identifies the launch slot consumed at the target
      cd back = tp.size() >= 2 ? tp[tp.size() - 2] : tp.back();
      double in_angle = std::arg(back - end);
      int best = -1;
      double bd = 1e9;
      for (std::size_t j = 0; j < slots.size(); ++j) {
        if (slots[j].point != q || slots[j].kind != s.kind) continue;
        double d = angle_gap(slots[j].angle, in_angle);
        if (d < bd) {
          bd = d;
          best = static_cast<int>(j);
        }
      }
      if (best >= 0) slots[best].used = true;
      poly.push_back(end);
      arc.terminus.point = q;
    } else if (tr.reason == StopReason::Radius) {
      for (cd z : tp) poly.push_back(z);
      arc.terminus.at_infinity = true;
      arc.terminus.angle = std::arg(tp.back());
      arc.terminus.direction = infinity_index(s.kind, arc.terminus.angle);
    } else {
      std::ostringstream os;
      os << "arc from " << G.critical_points[s.point].label << " at angle " << s.angle
         << " neither reached a critical point nor the radius cap";
      throw NumericalError(os.str());
    }
    arc.polyline = std::move(poly);
    const int idx = static_cast<int>(G.arcs.size());
    G.incidences.push_back({arc.origin.point, idx, true});
    if (!arc.terminus.at_infinity) G.incidences.push_back({arc.terminus.point, idx, false});
    G.arcs.push_back(std::move(arc));
  }
  return G;
}

std::string arc_signature(const CriticalGraph& g, const PathArc& arc) {
  std::string u = end_name(g, arc.origin), v = end_name(g, arc.terminus);
  // finite labels sort before "inf…" since 'a'..'c' < 'i'
  if (v < u) std::swap(u, v);
  return std::string(arc.kind == ArcKind::Trajectory ? "T:" : "O:") + u + "-" + v;
}

std::vector<std::string> graph_signature(const CriticalGraph& g) {
  std::vector<std::string> out;
  for (const auto& a : g.arcs) out.push_back(arc_signature(g, a));
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

std::string map_end(const std::string& e, char kind, bool l2pi3) {
  if (e.rfind("inf", 0) == 0) {
    int k = std::stoi(e.substr(3));
    int m;
    if (kind == 'T') m = l2pi3 ? 3 - k : 5 - k;
    else m = l2pi3 ? 4 - k : -k;
    m = ((m % 6) + 6) % 6;
    return "inf" + std::to_string(m);
  }
  if (!l2pi3) return e;
  if (e == "a") return "b";
  if (e == "b") return "a";
  return e;
}

std::string make_sig(char kind, std::string u, std::string v) {
  if (v < u) std::swap(u, v);
  return std::string(1, kind) + ":" + u + "-" + v;
}

}  // namespace

std::vector<std::string> reflect_signature(const std::vector<std::string>& sig, bool across_l2pi3) {
  std::vector<std::string> out;
  for (const auto& s : sig) {
    char kind = s[0];
    auto dash = s.find('-', 2);
    std::string u = s.substr(2, dash - 2), v = s.substr(dash + 1);
    out.push_back(make_sig(kind, map_end(u, kind, across_l2pi3), map_end(v, kind, across_l2pi3)));
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::string> template_signature(GraphCase gc, bool mirrored) {
  // Non-mirrored configurations. Trajectory directions: inf k is π/6 + kπ/3;
  // orthogonal directions: inf k is kπ/3. The critical graph is shared by
  // A, B, C (and by E, F, G); the orthogonal arc out of c tells them apart.
  static const std::vector<std::string> abc_traj = {
      "T:a-b", "T:a-inf2", "T:a-inf3", "T:b-inf0", "T:b-inf1",
      "T:c-inf0", "T:c-inf3", "T:c-inf4", "T:c-inf5"};
  static const std::vector<std::string> efg_traj = {
      "T:a-b", "T:a-inf2", "T:a-inf3", "T:b-inf1", "T:b-inf4",
      "T:c-inf0", "T:c-inf1", "T:c-inf4", "T:c-inf5"};
  auto join = [](std::vector<std::string> x, const std::vector<std::string>& y) {
    x.insert(x.end(), y.begin(), y.end());
    return x;
  };
  std::vector<std::string> sig;
  switch (gc) {
    case GraphCase::A:
      sig = join(abc_traj, {"O:a-inf2", "O:a-inf3", "O:a-inf4", "O:b-inf0", "O:b-inf1", "O:b-inf2",
                            "O:c-inf0", "O:c-inf2", "O:c-inf4", "O:c-inf5"});
      break;
    case GraphCase::B:
      sig = join(abc_traj, {"O:a-inf2", "O:a-inf3", "O:a-inf4", "O:b-c", "O:b-inf1", "O:b-inf2",
                            "O:c-inf0", "O:c-inf4", "O:c-inf5"});
      break;
    case GraphCase::C:
      sig = join(abc_traj, {"O:a-inf2", "O:a-inf3", "O:a-inf4", "O:b-inf1", "O:b-inf2", "O:b-inf4",
                            "O:c-inf0", "O:c-inf1", "O:c-inf4", "O:c-inf5"});
      break;
    case GraphCase::D:
      sig = {"T:a-b", "T:a-inf2", "T:a-inf3", "T:b-c", "T:b-inf1", "T:c-inf0", "T:c-inf4", "T:c-inf5",
             "O:a-inf2", "O:a-inf3", "O:a-inf4", "O:b-inf1", "O:b-inf2", "O:b-inf4",
             "O:c-inf0", "O:c-inf1", "O:c-inf4", "O:c-inf5"};
      break;
    case GraphCase::F:
      sig = join(efg_traj, {"O:a-inf2", "O:a-inf3", "O:a-inf4", "O:b-c", "O:b-inf2", "O:b-inf4",
                            "O:c-inf0", "O:c-inf1", "O:c-inf5"});
      break;
    case GraphCase::G:
      sig = join(efg_traj, {"O:a-inf2", "O:a-inf3", "O:a-inf4", "O:b-inf2", "O:b-inf4", "O:b-inf5",
                            "O:c-inf0", "O:c-inf1", "O:c-inf2", "O:c-inf5"});
      break;
    case GraphCase::E:
      sig = reflect_signature(template_signature(GraphCase::G, false), false);
      break;
    case GraphCase::BoundaryBirth:
      sig = reflect_signature(template_signature(GraphCase::D, false), false);
      break;
    case GraphCase::BoundaryCrit:
      // b and c merged into a zero of order 3 carrying the label b
      sig = {"T:a-b", "T:a-inf2", "T:a-inf3", "T:b-inf0", "T:b-inf1", "T:b-inf4", "T:b-inf5",
             "O:a-inf2", "O:a-inf3", "O:a-inf4", "O:b-inf0", "O:b-inf1", "O:b-inf2", "O:b-inf4",
             "O:b-inf5"};
      break;
    case GraphCase::BoundarySplit:
      sig = {"T:a-c", "T:a-inf2", "T:a-inf3", "T:b-c", "T:b-inf0", "T:b-inf1", "T:c-inf4", "T:c-inf5",
             "O:a-inf2", "O:a-inf3", "O:a-inf4", "O:b-inf0", "O:b-inf1", "O:b-inf2",
             "O:c-inf0", "O:c-inf2", "O:c-inf4", "O:c-inf5"};
      break;
    case GraphCase::None:
      throw ValidationError("no template outside the one-cut region");
  }
  std::sort(sig.begin(), sig.end());
  return mirrored ? reflect_signature(sig, true) : sig;
}

void validate_graph(const CriticalGraph& g, const SpectralData& sd) {
  auto found = graph_signature(g);
  auto expected = template_signature(sd.region.graph_case, sd.region.mirrored);
  if (found != expected) {
    auto join = [](const std::vector<std::string>& v) {
      std::string s;
      for (const auto& x : v) s += (s.empty() ? "" : " ") + x;
      return s;
    };
    throw TopologyMismatch("critical graph does not match the template of case " +
                               to_string(sd.region.graph_case) + (sd.region.mirrored ? "'" : ""),
                           join(expected), join(found));
  }
}

namespace {

bool segments_cross(cd p1, cd p2, cd q1, cd q2) {
  auto orient = [](cd u, cd v, cd w) { return ((v - u) * std::conj(w - u)).imag(); };
  double o1 = orient(p1, p2, q1), o2 = orient(p1, p2, q2);
  double o3 = orient(q1, q2, p1), o4 = orient(q1, q2, p2);
  return ((o1 > 0) != (o2 > 0)) && ((o3 > 0) != (o4 > 0));
}

double seg_seg_dist(cd p1, cd p2, cd q1, cd q2) {
  if (segments_cross(p1, p2, q1, q2)) return 0;
  auto pd = [](cd p, cd a, cd b) {
    cd d = b - a;
    double l2 = std::norm(d);
    double s = l2 > 0 ? std::clamp(((p - a) * std::conj(d)).real() / l2, 0.0, 1.0) : 0.0;
    return std::abs(p - (a + s * d));
  };
  return std::min({pd(p1, q1, q2), pd(p2, q1, q2), pd(q1, p1, p2), pd(q2, p1, p2)});
}

// Pieces of a polyline outside the exclusion discs around critical points.
std::vector<std::pair<cd, cd>> clipped_segments(const Polyline& p, const std::vector<cd>& pts, double r) {
  std::vector<std::pair<cd, cd>> out;
  const auto& v = p.points();
  auto far = [&](cd z) {
    for (cd c : pts)
      if (std::abs(z - c) < r) return false;
    return true;
  };
  for (std::size_t i = 1; i < v.size(); ++i)
    if (far(v[i - 1]) && far(v[i])) out.push_back({v[i - 1], v[i]});
  return out;
}

}  // namespace

GraphCheck check_graph(const CriticalGraph& g, const SpectralData& sd) {
  GraphCheck gc;
  gc.min_trajectory_separation = std::numeric_limits<double>::infinity();
  std::vector<cd> pts;
  for (const auto& p : g.critical_points) pts.push_back(p.z.to_cd());
  const double scale = std::abs((sd.a - sd.b).to_cd());
  const double excl = 0.02 * scale;
  const double inner = g.radius / 4;
  std::vector<std::vector<std::pair<cd, cd>>> segs;
  for (const auto& a : g.arcs) {
    segs.push_back(clipped_segments(a.polyline.simplified(1e-7 * scale), pts, excl));
    gc.max_tangency_residual = std::max(gc.max_tangency_residual, a.max_tangency_residual);
    if (a.terminus.at_infinity)
      gc.max_infinity_angle_error =
          std::max(gc.max_infinity_angle_error,
                   angle_gap(a.terminus.angle, infinity_angle(a.kind, a.terminus.direction)));
  }
  for (std::size_t i = 0; i < g.arcs.size(); ++i)
    for (std::size_t j = i + 1; j < g.arcs.size(); ++j) {
      const bool ti = g.arcs[i].kind == ArcKind::Trajectory;
      const bool tj = g.arcs[j].kind == ArcKind::Trajectory;
      if (ti && tj) {
        for (const auto& [p1, p2] : segs[i])
          for (const auto& [q1, q2] : segs[j]) {
            if (segments_cross(p1, p2, q1, q2)) ++gc.trajectory_crossings;
            // arcs sharing a direction at infinity converge there, so the
            // separation is only measured on the inner part of the picture
            if (std::abs(p1) < inner && std::abs(q1) < inner)
              gc.min_trajectory_separation =
                  std::min(gc.min_trajectory_separation, seg_seg_dist(p1, p2, q1, q2));
          }
      } else if (ti != tj) {
        int crossings = 0;
        for (const auto& [p1, p2] : segs[i])
          for (const auto& [q1, q2] : segs[j])
            if (segments_cross(p1, p2, q1, q2)) ++crossings;
        gc.max_trajectory_orthogonal_crossings = std::max(gc.max_trajectory_orthogonal_crossings, crossings);
      }
    }
  return gc;
}

namespace {

struct Piece {
  ArcKind kind;
  std::string from, to;
};

std::vector<Piece> table_pieces(const std::string& tc) {
  const ArcKind T = ArcKind::Trajectory, O = ArcKind::OrthogonalTrajectory;
  if (tc == "I(a)") return {{O, "inf3", "a"}, {T, "a", "b"}, {O, "b", "inf1"}};
  if (tc == "I(b)") return {{O, "inf3", "a"}, {T, "a", "b"}, {O, "b", "c"}, {O, "c", "inf1"}};
  if (tc == "I(c)") return {{O, "inf3", "c"}, {O, "c", "a"}, {T, "a", "b"}, {O, "b", "inf1"}};
  if (tc == "I(d)")
    return {{O, "inf3", "a"}, {T, "a", "b"}, {O, "b", "inf5"}, {O, "inf5", "c"}, {O, "c", "inf1"}};
  if (tc == "I(e)")
    return {{O, "inf3", "c"}, {O, "c", "inf5"}, {O, "inf5", "a"}, {T, "a", "b"}, {O, "b", "inf1"}};
  if (tc == "III") return {{O, "inf3", "a"}, {T, "a", "c"}, {T, "c", "b"}, {O, "b", "inf1"}};
  throw ValidationError("unknown contour case " + tc);
}

std::string table_case_for(const RegionLabel& r) {
  switch (r.graph_case) {
    case GraphCase::F: return r.mirrored ? "I(c)" : "I(b)";
    case GraphCase::G: return r.mirrored ? "I(e)" : "I(d)";
    case GraphCase::BoundaryBirth: return r.mirrored ? "I(e)" : "I(d)";
    case GraphCase::BoundarySplit: return "III";
    case GraphCase::None: throw ValidationError("no S-contour outside the one-cut region");
    default: return "I(a)";
  }
}

}  // namespace

SContour build_scontour(const SpectralData& sd, const CriticalGraph& graph, const PrecisionContext&) {
  SContour sc;
  sc.table_case = table_case_for(sd.region);
  for (const Piece& pc : table_pieces(sc.table_case)) {
    const PathArc* hit = nullptr;
    bool forward = true;
    for (const auto& a : graph.arcs) {
      if (a.kind != pc.kind) continue;
      std::string u = end_name(graph, a.origin), v = end_name(graph, a.terminus);
      if (u == pc.from && v == pc.to) {
        hit = &a;
        forward = true;
        break;
      }
      if (u == pc.to && v == pc.from) {
        hit = &a;
        forward = false;
        break;
      }
    }
    if (!hit) {
      throw ValidationError("S-contour case " + sc.table_case + " needs arc " +
                            (pc.kind == ArcKind::Trajectory ? "T:" : "O:") + pc.from + "-" + pc.to +
                            ", which is absent from the critical graph");
    }
    ContourArc ca;
    ca.kind = pc.kind;
    ca.label = pc.from + "-" + pc.to;
    ca.polyline = forward ? hit->polyline : hit->polyline.reversed();
    const ArcEnd& first = forward ? hit->origin : hit->terminus;
    const ArcEnd& last = forward ? hit->terminus : hit->origin;
    if (first.at_infinity) ca.ray_in = infinity_angle(pc.kind, first.direction);
    if (last.at_infinity) ca.ray_out = infinity_angle(pc.kind, last.direction);
    ca.in_support = pc.kind == ArcKind::Trajectory;
    if (ca.in_support) sc.J_support.push_back(sc.arcs.size());
    sc.arcs.push_back(std::move(ca));
  }
  // chaining: finite junctions must coincide; infinite junctions share a direction
  for (std::size_t i = 1; i < sc.arcs.size(); ++i) {
    const ContourArc& p = sc.arcs[i - 1];
    const ContourArc& q = sc.arcs[i];
    bool ok;
    if (!std::isnan(p.ray_out) || !std::isnan(q.ray_in))
      ok = !std::isnan(p.ray_out) && !std::isnan(q.ray_in) && angle_gap(p.ray_out, q.ray_in) < 1e-12;
    else
      ok = std::abs(p.polyline.back() - q.polyline.front()) <= 1e-12 * (1 + std::abs(q.polyline.front()));
    if (!ok) throw NumericalError("S-contour arcs do not chain at junction " + std::to_string(i));
  }
  return sc;
}

}  // namespace loggas
