#pragma once

#include <string>
#include <vector>

#include "loggas/mpnum.hpp"

namespace loggas {

enum class Phase {
  OneCutInterior,
  SplitBoundary,
  BirthBoundaryA,
  BirthBoundaryB,
  CriticalPoint,
  CriticalPointRotated,
  OutsideOneCut
};

// Critical-graph configurations: seven one-cut sub-cases (a)–(g) and the three
// boundary configurations (critical point, split arc, birth arc).
enum class GraphCase { A, B, C, D, E, F, G, BoundaryCrit, BoundarySplit, BoundaryBirth, None };

struct Classifier {
  double U = 0;
  double V = 0;
};

struct RegionLabel {
  Phase phase = Phase::OutsideOneCut;
  GraphCase graph_case = GraphCase::None;
  // The configuration is the reflection across L_{2π/3} of the stored case.
  bool mirrored = false;
  Classifier classifier;
  std::string diagnostic;
};

std::string to_string(Phase p);
std::string to_string(GraphCase g);

struct SpectralData {
  Complex t;
  Complex x;
  Complex sqrt_x;
  Complex a, b, c;
  Complex C;
  RegionLabel region;
  int bits = 256;
};

// 3·2^{−2/3}
Complex t_critical(const PrecisionContext& ctx);
// t(x) = x² − 1/x
Complex t_of_x(const Complex& x);

// Root of x³ − t x − 1 continued from x(0) = e^{2πi/3} along 0 → t, detouring
// around the two branch points so that the path never enters the two-cut side.
SpectralData branch_x(const Complex& t, const PrecisionContext& ctx);
// Same continuation along an explicit path starting at 0 and ending at t.
SpectralData branch_x_along(const std::vector<cd>& path, const Complex& t,
                            const PrecisionContext& ctx);

void endpoints(SpectralData& sd, const PrecisionContext& ctx);

struct SpectralResiduals {
  Real cubic;
  Real relations;     // max of the three symmetric-function relations
  Real endpoint_form;  // a,b,c against x ∓ i√2/√x, −x
  Real coefficients;  // ¼(z−a)(z−b)(z−c)² vs (z²−t)²/4 + z + C
};
SpectralResiduals spectral_residuals(const SpectralData& sd, const PrecisionContext& ctx);

// (2/3)∫_{−1}^{2x³} (1+1/s)^{3/2} ds along a path in the closed upper half-plane;
// for 2x³ in the lower half-plane the conjugate-symmetric value is returned.
Complex classifier_integral(const Complex& x, const PrecisionContext& ctx);
// Same integral with the endpoint given directly in the s = 2x³ plane.
Complex classifier_integral_s(const Complex& s, const PrecisionContext& ctx);

double boundary_tol(const Complex& t);

RegionLabel classify(const Complex& t, const PrecisionContext& ctx);
// Classification plus the spectral data it was computed from.
SpectralData classify_full(const Complex& t, const PrecisionContext& ctx);

enum class BoundaryArc {
  Split,
  BirthA,
  BirthB,
  CritA,
  CritB,
  SRay,
  SRayRotated,
  SCritA,
  SCritB
};

std::string to_string(BoundaryArc a);
BoundaryArc boundary_arc_from_string(const std::string& s);

// Samples of a phase-diagram curve in the t-plane, in arclength order, starting
// at the critical point the curve emanates from. Unbounded arcs are cut at |t| = t_radius.
std::vector<Complex> boundary_curves(BoundaryArc arc, int samples, const PrecisionContext& ctx,
                                     double t_radius = 10.0);

// Trajectory (or orthogonal trajectory) of the auxiliary differential −(1+1/s)³ds²
// launched from s = −1 at the given angle; the boundary arcs are images of these.
TraceResult aux_trajectory(double angle, bool orthogonal, const StopRule& stop, const PrecisionContext& ctx);
// Where the trajectory launched at 2π/5 (the loop whose image is the split arc) first
// crosses the positive real s-axis.
double split_loop_crossing(const PrecisionContext& ctx);

// Representative parameter values of each configuration: fixed interior points, or
// midpoints of the traced arcs for cases that live on a curve.
Complex representative_t(GraphCase g, bool mirrored, const PrecisionContext& ctx);

}  // namespace loggas
