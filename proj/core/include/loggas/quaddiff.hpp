#pragma once

#include <string>
#include <vector>

#include "loggas/mpnum.hpp"
#include "loggas/spectral.hpp"

namespace loggas {

enum class ArcKind { Trajectory, OrthogonalTrajectory };

// An arc end is either one of the graph's critical points or a direction at
// infinity. Directions are indexed by k: π/6 + kπ/3 for trajectories, kπ/3 for
// orthogonal trajectories.
struct ArcEnd {
  bool at_infinity = false;
  int point = -1;
  int direction = -1;
  double angle = 0;  // arg of the last traced point when at infinity
};

struct PathArc {
  Polyline polyline;
  ArcKind kind = ArcKind::Trajectory;
  ArcEnd origin;
  ArcEnd terminus;
  double launch_angle = 0;
  double max_tangency_residual = 0;
};

struct GraphPoint {
  Complex z;
  int order = 1;
  char label = 'a';  // 'a', 'b' or 'c'; a merged point keeps the label of the simple zero it absorbs
};

struct Incidence {
  int point = -1;
  int arc = -1;
  bool at_origin = true;
};

struct CriticalGraph {
  std::vector<GraphPoint> critical_points;
  std::vector<PathArc> arcs;
  std::vector<Incidence> incidences;
  double radius = 0;       // tracing radius cap R
  double snap_radius = 0;
  double seed_offset = 0;
};

// ((2k+1)π − arg Qm)/(m+2) for trajectories, ascending in [0, 2π).
std::vector<double> launch_angles(const Complex& z0, int m, const Complex& Qm);
// 2kπ − arg Qm over m+2: launch angles of the orthogonal trajectories.
std::vector<double> orthogonal_launch_angles(int m, const Complex& Qm);

// Q(z;t) = ¼(z−a)(z−b)(z−c)².
Complex Q_eval(const SpectralData& sd, const Complex& z);

CriticalGraph critical_graph(const SpectralData& sd, const PrecisionContext& ctx);

// Endpoint signature of one arc, e.g. "T:a-b" or "O:c-inf4".
std::string arc_signature(const CriticalGraph& g, const PathArc& arc);
// Sorted list of all arc signatures.
std::vector<std::string> graph_signature(const CriticalGraph& g);
// Template signature of a configuration; mirrored cases are derived by symmetry.
std::vector<std::string> template_signature(GraphCase gc, bool mirrored);
// Apply the reflection across L_{2π/3} (mirror=true) or across the real axis to
// a signature list.
std::vector<std::string> reflect_signature(const std::vector<std::string>& sig, bool across_l2pi3);

// Throws TopologyMismatch when the traced graph disagrees with the template of sd.region.
void validate_graph(const CriticalGraph& g, const SpectralData& sd);

struct GraphCheck {
  int trajectory_crossings = 0;          // between distinct trajectories away from critical points
  double min_trajectory_separation = 0;  // same, restricted to |z| < R/4
  int max_trajectory_orthogonal_crossings = 0;
  double max_tangency_residual = 0;     // |Re(√Q u)|/|√Q| (Im for orthogonal) at chord midpoints
  double max_infinity_angle_error = 0;  // rad, against the permitted direction
};
GraphCheck check_graph(const CriticalGraph& g, const SpectralData& sd);

struct ContourArc {
  Polyline polyline;     // oriented along Γ_t
  ArcKind kind = ArcKind::Trajectory;
  std::string label;     // e.g. "Γ(e^{πi}∞,a)" written as "inf3-a"
  bool in_support = false;
  // Directions of the straight rays that extend the arc beyond R (NaN if none).
  double ray_in = std::nan("");
  double ray_out = std::nan("");
};

struct SContour {
  std::vector<ContourArc> arcs;
  std::vector<std::size_t> J_support;  // indices into arcs
  std::string table_case;              // "I(a)" ... "I(e)"
};

SContour build_scontour(const SpectralData& sd, const CriticalGraph& graph, const PrecisionContext& ctx);

}  // namespace loggas
