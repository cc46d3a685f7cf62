// Runs the acceptance criteria at their stated tolerances; one PASS/FAIL line each.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>

#include "loggas/asymcheck.hpp"
#include "loggas/eqmeasure.hpp"
#include "loggas/errors.hpp"
#include "loggas/finite_n.hpp"
#include "loggas/quaddiff.hpp"
#include "loggas/spectral.hpp"

using namespace loggas;

namespace {

struct Verdict {
  bool pass = true;
  std::ostringstream detail;
  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    detail << (detail.tellp() > 0 ? "; " : "") << what << (ok ? "" : " [fail]");
  }
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

double d(const Real& r) { return r.convert_to<double>(); }
double dist(const Complex& a, const Complex& b) { return d(abs(a - b)); }
double rel(const Complex& a, const Complex& b) { return d(abs(a - b) / abs(b)); }

int failures = 0;

void criterion(int id, const std::string& name, double limit_s, const std::function<void(Verdict&)>& body) {
  Verdict v;
  const auto start = std::chrono::steady_clock::now();
  try {
    body(v);
  } catch (const std::exception& e) {
    v.require(false, std::string("exception: ") + e.what());
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (limit_s > 0) v.require(secs < limit_s, "runtime " + fmt(secs) + " s < " + fmt(limit_s) + " s");
  if (!v.pass) ++failures;
  std::printf("%-4s criterion %2d (%s): %s\n", v.pass ? "PASS" : "FAIL", id, name.c_str(), v.detail.str().c_str());
  std::fflush(stdout);
}

}  // namespace

int main() {
  criterion(1, "auxiliary loop crossing", 10, [](Verdict& v) {
    const double s = split_loop_crossing(PrecisionContext::with_bits(64));
    v.require(std::abs(s - 0.6349131623) <= 1e-6, "crossing " + std::to_string(s));
  });

  criterion(2, "critical point consistency", 0, [](Verdict& v) {
    const auto ctx = PrecisionContext::with_bits(256);
    PrecisionScope ps(ctx);
    const Complex uc(sqrt(sqrt(Real(3))) / 18);
    const Complex tcr = Complex(3 / cbrt(Real(4)));
    const double err = dist(u_model_bridge(uc, 2, ctx).t, tcr);
    v.require(err <= 1e-30, "|t(u_c) - t_cr| = " + fmt(err));
    CubicRoots cr = cubic_roots(tcr, ctx);
    bool found = false;
    for (int i = 0; i < 3; ++i)
      if (cr.multiplicity[i] == 2 && dist(cr.roots[i], Complex(-1 / cbrt(Real(2)))) <= 1e-30) found = true;
    v.require(found, "double root -2^(-1/3)");
  });

  criterion(3, "equilibrium mass", 0, [](Verdict& v) {
    const auto ctx = PrecisionContext::with_bits(128);
    PrecisionScope ps(ctx);
    const std::pair<const char*, Complex> points[] = {
        {"t=0", Complex(0)}, {"t=2", Complex(2)}, {"t=1.2e^(i pi/6)", Complex(std::polar(1.2, M_PI / 6))}};
    for (const auto& [label, t] : points) {
      const auto start = std::chrono::steady_clock::now();
      try {
        MeasureData md = equilibrium_measure(szego(classify_full(t, ctx), ctx), 400, ctx);
        v.require(std::abs(md.mass - 1) <= 1e-10, std::string(label) + " mass-1 = " + fmt(md.mass - 1));
        if (t.re == 2 && t.im == 0) {
          // closed-form density (1/2π)(1−z)√((z−a)(b−z)) on [a,b] has unit mass
          const Complex a = md.sz.spectral().a, b = md.sz.spectral().b;
          Complex closed = integrate_segment(
              [&](const Complex& z) { return (1 - z) * sqrt((z - a) * (b - z)) / (2 * real_pi()); }, a, b,
              Endpoint::SqrtBoth, ctx);
          v.require(std::abs(md.mass - d(closed.re)) <= 1e-10, "t=2 closed form " + fmt(d(closed.re) - 1));
        }
      } catch (const std::exception& e) {
        v.require(false, std::string(label) + ": " + e.what());
      }
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      v.require(secs < 30, std::string(label) + " " + fmt(secs) + " s");
    }
  });

  criterion(4, "S-property and Euler-Lagrange at t=2", 0, [](Verdict& v) {
    const auto ctx = PrecisionContext::with_bits(128);
    PrecisionScope ps(ctx);
    MeasureData md = equilibrium_measure(szego(classify_full(Complex(2), ctx), ctx), 400, ctx);
    const SzegoData& sz = md.sz;
    const auto& J = sz.cuts().support().points();
    double worst = 0;
    for (int k = 1; k <= 50; ++k)
      worst = std::max(worst, std::abs(d(sz.phi_b(Complex(J[k * (J.size() - 1) / 51]), Side::Plus).re)));
    v.require(worst <= 1e-8, "max |Re phi_b| on J " + fmt(worst));

    std::vector<cd> probes;
    for (int k = 1; k <= 9; ++k) probes.push_back(J[k * (J.size() - 1) / 10]);
    const double scale = sz.cuts().scale();
    for (const auto& arc : sz.contour().arcs) {
      if (arc.in_support) continue;
      const auto& pts = arc.polyline.points();
      const bool toward_J = arc.label.back() == 'a';  // arcs ending at a run toward J
      const cd anchor = toward_J ? pts.back() : pts.front();
      int taken = 0;
      for (std::size_t i = 0; i < pts.size() && taken < 4; ++i) {
        const cd z = pts[toward_J ? pts.size() - 1 - i : i];
        if (std::abs(z - anchor) >= 0.15 * (taken + 1) * scale) {
          probes.push_back(z);
          ++taken;
        }
      }
    }
    ELReport rep = euler_lagrange_check(md, probes, ctx);
    v.require(rep.max_support_deviation <= 1e-6, "EL deviation on J " + fmt(rep.max_support_deviation));
    v.require(rep.min_slack >= -1e-8, "min slack on tails " + fmt(rep.min_slack));
    int on_tails = 0;
    for (const auto& p : rep.probes) on_tails += !p.on_support && p.on_contour;
    v.require(on_tails >= 8, std::to_string(on_tails) + " tail probes");
  });

  criterion(5, "exactness suite", 0, [](Verdict& v) {
    {
      const auto ctx = PrecisionContext::with_bits(512);
      PrecisionScope ps(ctx);
      for (const Complex& t : {Complex(2), Complex(0, 1)}) {
        RecurrenceTable rt = recurrence(moments(t, 8, 26, MomentSource::Recursion, ctx), 12, ctx);
        double worst = 0;
        for (const auto& [r1, r2] : string_residuals(rt)) worst = std::max({worst, d(abs(r1)), d(abs(r2))});
        v.require(worst <= 1e-30, "string residual at t=" + std::string(t.im == 0 ? "2" : "i") + " " + fmt(worst));
      }
    }
    const auto ctx = PrecisionContext::with_bits(128);
    PrecisionScope ps(ctx);
    RecurrenceTable rt = recurrence(moments(Complex(2), 2, 4, MomentSource::Quadrature, ctx), 1, ctx);
    const double bf = rel(brute_force_Z(Complex(2), 2, ctx), 2 * rt.h[0] * rt.h[1]);
    v.require(bf <= 1e-8, "N=2 brute force vs 2h0h1 " + fmt(bf));
    const Complex u(0.05);
    UBridge br = u_model_bridge(u, 2, ctx);
    const Complex Zu = brute_force_Z_u(u, 2, ctx);
    const double ub = rel(br.prefactor * brute_force_Z(br.t, 2, ctx), Zu);
    v.require(ub <= 1e-8, "u-bridge " + fmt(ub));
  });

  criterion(6, "Toda equation", 300, [](Verdict& v) {
    const auto ctx = PrecisionContext::with_bits(512);
    PrecisionScope ps(ctx);
    TodaReport rep = toda_check(Complex(2), 16, 1e-3, ctx);
    v.require(rep.residual <= 1e-6, "residual " + fmt(rep.residual));
  });

  criterion(7, "rate theorems at t=2", 1800, [](Verdict& v) {
    const auto ctx = PrecisionContext::with_bits(256);
    PrecisionScope ps(ctx);
    const std::vector<int> Ns{8, 16, 32, 64};
    AsymptoticReport g = rate_gamma(Complex(2), Ns, ctx);
    v.require(std::abs(g.fitted_slope + 2) <= 0.3, "gamma slope " + fmt(g.fitted_slope));
    BetaReports b = rate_beta(Complex(2), Ns, ctx);
    v.require(std::abs(b.raw.fitted_slope + 1) <= 0.3, "beta slope " + fmt(b.raw.fitted_slope));
    v.require(std::abs(b.shifted.fitted_slope + 2) <= 0.3, "half-shifted beta slope " + fmt(b.shifted.fitted_slope));
  });

  criterion(8, "critical slowdown at t_cr", 0, [](Verdict& v) {
    const auto ctx = PrecisionContext::with_bits(256);
    PrecisionScope ps(ctx);
    AsymptoticReport g = rate_gamma(t_critical(ctx), {16, 32, 64, 128}, ctx);
    v.require(std::abs(g.fitted_slope + 0.4) <= 0.15, "gamma slope " + fmt(g.fitted_slope));
  });

  criterion(9, "strong asymptotics at t=2", 0, [](Verdict& v) {
    const auto ctx = PrecisionContext::with_bits(256);
    PrecisionScope ps(ctx);
    AsymptoticReport rep = strong_asymptotics_check(Complex(2), Complex(2, 2), {8, 16, 32}, ctx);
    v.require(rep.errors[2] <= 0.1, "off-cut deviation at N=32 " + fmt(rep.errors[2]));
    const double halving = rep.errors[1] / rep.errors[2];
    v.require(halving >= 1.6 && halving <= 2.6, "halving factor " + fmt(halving));
    const double on_cut = on_cut_check(Complex(2), 32, 0.5, ctx);
    v.require(on_cut <= 0.1, "on-cut deviation " + fmt(on_cut));
  });

  criterion(10, "phase-diagram topology", 0, [](Verdict& v) {
    const auto ctx = PrecisionContext::with_bits(96);
    PrecisionScope ps(ctx);
    for (GraphCase g : {GraphCase::A, GraphCase::B, GraphCase::C, GraphCase::D, GraphCase::E, GraphCase::F,
                        GraphCase::G, GraphCase::BoundaryCrit, GraphCase::BoundarySplit, GraphCase::BoundaryBirth}) {
      try {
        SpectralData sd = classify_full(representative_t(g, false, ctx), ctx);
        validate_graph(critical_graph(sd, ctx), sd);
        v.require(true, to_string(g));
      } catch (const TopologyMismatch& e) {
        v.require(false, to_string(g) + ": " + e.what());
      }
    }
  });

  criterion(11, "genus-zero free energy", 0, [](Verdict& v) {
    const auto ctx = PrecisionContext::with_bits(128);
    PrecisionScope ps(ctx);
    const Complex t(3, 1);
    const double paths = dist(genus_zero_free_energy(t, {Complex(10, 3)}, ctx),
                              genus_zero_free_energy(t, {Complex(10, -1), Complex(5, -0.5)}, ctx));
    v.require(paths <= 1e-10, "path independence " + fmt(paths));
    const double h = 1e-3;
    const Complex second = (genus_zero_free_energy(Complex(2 - h), ctx) - 2 * genus_zero_free_energy(Complex(2), ctx) +
                            genus_zero_free_energy(Complex(2 + h), ctx)) /
                           (h * h);
    const double sd = dist(second, Complex(0.5));
    v.require(sd <= 1e-6, "second derivative vs -1/(2x) " + fmt(sd));
    const Complex big(1000);
    const double anchor =
        dist(genus_zero_free_energy(big, ctx), 2 * pow(big, Real(1.5)) / 3 - log(4 * big) / 4);
    v.require(anchor <= 1e-4, "anchor at t=1000 " + fmt(anchor));
  });

  std::printf("%d of 11 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
