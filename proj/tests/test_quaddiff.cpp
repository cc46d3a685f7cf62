#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "loggas/errors.hpp"
#include "loggas/quaddiff.hpp"

using namespace loggas;

namespace {

struct Traced {
  SpectralData sd;
  CriticalGraph graph;
};

Traced trace(const Complex& t, const PrecisionContext& ctx) {
  Traced r{classify_full(t, ctx), {}};
  r.graph = critical_graph(r.sd, ctx);
  return r;
}

// Trajectory arc ends at each critical point; a loop counts twice.
std::vector<int> trajectory_valence(const CriticalGraph& g) {
  std::vector<int> v(g.critical_points.size(), 0);
  for (const auto& arc : g.arcs) {
    if (arc.kind != ArcKind::Trajectory) continue;
    if (!arc.origin.at_infinity) ++v[arc.origin.point];
    if (!arc.terminus.at_infinity) ++v[arc.terminus.point];
  }
  return v;
}

bool angles_close(const std::vector<double>& got, const std::vector<double>& want) {
  if (got.size() != want.size()) return false;
  for (std::size_t i = 0; i < got.size(); ++i)
    if (std::abs(got[i] - want[i]) > 1e-12) return false;
  return true;
}

double wrap(double a) { return std::remainder(a, 2 * M_PI); }

}  // namespace

TEST_CASE("launch angles") {
  PrecisionScope ps(128);
  CHECK(angles_close(launch_angles(Complex(0), 1, Complex(1)), {M_PI / 3, M_PI, 5 * M_PI / 3}));
  CHECK(angles_close(launch_angles(Complex(0), 2, Complex(1)), {M_PI / 4, 3 * M_PI / 4, 5 * M_PI / 4, 7 * M_PI / 4}));
  CHECK(angles_close(launch_angles(Complex(0), 1, Complex(0, 1)), {M_PI / 6, 5 * M_PI / 6, 3 * M_PI / 2}));
  CHECK_THROWS_AS(launch_angles(Complex(0), 1, Complex(0)), ValidationError);
}

TEST_CASE("property: launch angles are equally spaced") {
  PrecisionScope ps(128);
  for (int m = 1; m <= 3; ++m) {
    for (double arg : {0.0, 0.7, -2.1, 3.0}) {
      auto angles = launch_angles(Complex(0), m, Complex(std::cos(arg), std::sin(arg)));
      REQUIRE(angles.size() == static_cast<std::size_t>(m + 2));
      for (std::size_t k = 0; k < angles.size(); ++k) {
        CHECK(angles[k] >= 0);
        CHECK(angles[k] < 2 * M_PI);
        double gap = angles[(k + 1) % angles.size()] - angles[k];
        if (gap < 0) gap += 2 * M_PI;
        CHECK(gap == doctest::Approx(2 * M_PI / (m + 2)));
      }
    }
  }
}

TEST_CASE("critical graph at t = 2") {
  const auto ctx = PrecisionContext::with_bits(128);
  PrecisionScope ps(ctx);
  Traced tr = trace(Complex(2), ctx);
  CHECK_NOTHROW(validate_graph(tr.graph, tr.sd));

  auto sig = graph_signature(tr.graph);
  CHECK(std::find(sig.begin(), sig.end(), "T:a-b") != sig.end());
  CHECK(std::find(sig.begin(), sig.end(), "T:b-inf1") != sig.end());
  CHECK(std::find(sig.begin(), sig.end(), "T:b-inf4") != sig.end());
  // conjugation maps the graph to itself
  auto conj_sig = reflect_signature(sig, false);
  std::sort(conj_sig.begin(), conj_sig.end());
  CHECK(conj_sig == sig);

  // J on the real axis
  for (const auto& arc : tr.graph.arcs)
    if (arc_signature(tr.graph, arc) == "T:a-b")
      for (cd z : arc.polyline.points()) CHECK(std::abs(z.imag()) < 1e-6);

  GraphCheck gc = check_graph(tr.graph, tr.sd);
  CHECK(gc.trajectory_crossings == 0);
  CHECK(gc.max_tangency_residual <= 100 * ctx.ode_tol);
  CHECK(gc.max_infinity_angle_error <= 0.05);
  CHECK(gc.max_trajectory_orthogonal_crossings <= 1);
}

TEST_CASE("critical graph at the critical point") {
  const auto ctx = PrecisionContext::with_bits(128);
  PrecisionScope ps(ctx);
  Traced tr = trace(t_critical(ctx), ctx);
  CHECK_NOTHROW(validate_graph(tr.graph, tr.sd));
  bool has_triple = false;
  auto valence = trajectory_valence(tr.graph);
  for (std::size_t i = 0; i < tr.graph.critical_points.size(); ++i)
    if (tr.graph.critical_points[i].order == 3) {
      has_triple = true;
      CHECK(valence[i] == 5);
    }
  CHECK(has_triple);
}

TEST_CASE("split boundary: the support passes through c") {
  const auto ctx = PrecisionContext::with_bits(128);
  PrecisionScope ps(ctx);
  Traced tr = trace(representative_t(GraphCase::BoundarySplit, false, ctx), ctx);
  CHECK(tr.sd.region.phase == Phase::SplitBoundary);
  CHECK_NOTHROW(validate_graph(tr.graph, tr.sd));
  SContour sc = build_scontour(tr.sd, tr.graph, ctx);
  std::vector<std::string> labels;
  for (std::size_t i : sc.J_support) {
    CHECK(sc.arcs[i].kind == ArcKind::Trajectory);
    labels.push_back(sc.arcs[i].label);
  }
  CHECK(labels.size() == 2);
  const cd c = tr.sd.c.to_cd();
  for (std::size_t i : sc.J_support) {
    const auto& p = sc.arcs[i].polyline;
    CHECK(std::min(std::abs(p.front() - c), std::abs(p.back() - c)) < 1e-6);
  }
}

TEST_CASE("S-contour case tables") {
  const auto ctx = PrecisionContext::with_bits(128);
  PrecisionScope ps(ctx);
  auto labels_of = [](const SContour& sc) {
    std::vector<std::string> out;
    for (const auto& a : sc.arcs) out.push_back(a.label);
    return out;
  };
  SUBCASE("t = 2") {
    Traced tr = trace(Complex(2), ctx);
    SContour sc = build_scontour(tr.sd, tr.graph, ctx);
    CHECK(labels_of(sc) == std::vector<std::string>{"inf3-a", "a-b", "b-c", "c-inf1"});
    CHECK(sc.table_case == "I(b)");
  }
  SUBCASE("t = 0") {
    Traced tr = trace(Complex(0), ctx);
    SContour sc = build_scontour(tr.sd, tr.graph, ctx);
    CHECK(labels_of(sc) == std::vector<std::string>{"inf3-a", "a-b", "b-inf1"});
    CHECK(sc.table_case == "I(a)");
  }
  SUBCASE("birth arc: tails through the direction -pi/3 and c") {
    Traced tr = trace(representative_t(GraphCase::BoundaryBirth, false, ctx), ctx);
    SContour sc = build_scontour(tr.sd, tr.graph, ctx);
    auto labels = labels_of(sc);
    CHECK(std::find(labels.begin(), labels.end(), "b-inf5") != labels.end());
    CHECK(std::find(labels.begin(), labels.end(), "inf5-c") != labels.end());
    CHECK(std::find(labels.begin(), labels.end(), "c-inf1") != labels.end());
  }
}

TEST_CASE("property: S-contours chain and respect the asymptotic sectors") {
  const auto ctx = PrecisionContext::with_bits(96);
  PrecisionScope ps(ctx);
  for (cd t : {cd(0, 0), cd(2, 0), cd(1.5, -0.5), cd(3, -1), cd(3, 1), cd(-1, 1)}) {
    CAPTURE(t);
    Traced tr = trace(Complex(t), ctx);
    SContour sc = build_scontour(tr.sd, tr.graph, ctx);
    REQUIRE(!sc.arcs.empty());
    const double scale = std::abs((tr.sd.b - tr.sd.a).to_cd());
    for (std::size_t i = 0; i + 1 < sc.arcs.size(); ++i)
      CHECK(std::abs(sc.arcs[i].polyline.back() - sc.arcs[i + 1].polyline.front()) <= 1e-3 * scale);
    const double start = std::arg(sc.arcs.front().polyline.front());
    const double end = std::arg(sc.arcs.back().polyline.back());
    CHECK(std::abs(wrap(start - M_PI)) <= M_PI / 6);
    CHECK(std::abs(wrap(end - M_PI / 3)) <= M_PI / 6);
    for (std::size_t i : sc.J_support) CHECK(sc.arcs[i].kind == ArcKind::Trajectory);
  }
}

TEST_CASE("property: every configuration matches its template") {
  const auto ctx = PrecisionContext::with_bits(96);
  PrecisionScope ps(ctx);
  for (GraphCase g : {GraphCase::A, GraphCase::B, GraphCase::C, GraphCase::D, GraphCase::E, GraphCase::F,
                      GraphCase::G, GraphCase::BoundaryCrit, GraphCase::BoundarySplit, GraphCase::BoundaryBirth}) {
    for (bool mirrored : {false, true}) {
      CAPTURE(to_string(g));
      CAPTURE(mirrored);
      Traced tr = trace(representative_t(g, mirrored, ctx), ctx);
      CHECK_NOTHROW(validate_graph(tr.graph, tr.sd));
      auto valence = trajectory_valence(tr.graph);
      for (std::size_t i = 0; i < valence.size(); ++i)
        CHECK(valence[i] == tr.graph.critical_points[i].order + 2);
      GraphCheck gc = check_graph(tr.graph, tr.sd);
      CHECK(gc.trajectory_crossings == 0);
      CHECK(gc.max_tangency_residual <= 100 * ctx.ode_tol);
      CHECK(gc.max_infinity_angle_error <= 0.05);
      CHECK(gc.max_trajectory_orthogonal_crossings <= 1);
    }
  }
}

TEST_CASE("a graph with a wrong template is rejected") {
  const auto ctx = PrecisionContext::with_bits(96);
  PrecisionScope ps(ctx);
  Traced tr = trace(Complex(2), ctx);
  SpectralData wrong = tr.sd;
  wrong.region.graph_case = GraphCase::A;
  CHECK_THROWS_AS(validate_graph(tr.graph, wrong), TopologyMismatch);
  SpectralData outside = classify_full(Complex(1, 2), ctx);
  CHECK_THROWS_AS(critical_graph(outside, ctx), ValidationError);
}
