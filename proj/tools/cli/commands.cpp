#include "commands.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <ctime>
#include <iomanip>
#include <set>
#include <sstream>
#include <thread>

#include "loggas/asymcheck.hpp"
#include "loggas/eqmeasure.hpp"
#include "loggas/finite_n.hpp"
#include "loggas/quaddiff.hpp"
#include "loggas/spectral.hpp"

namespace loggas::cli {

namespace {

PrecisionContext context(const RunConfig& rc) { return PrecisionContext::with_bits(rc.bits); }

std::string default_format(const std::string& command) {
  if (command == "phase classify") return "json";
  if (command == "phase boundary" || command == "recur" || command == "equilibrium") return "csv";
  if (command == "scurve") return "svg";
  return "json";
}

std::set<std::string> allowed_formats(const std::string& command) {
  if (command == "phase classify") return {"json", "csv"};
  if (command == "phase boundary") return {"csv", "json"};
  if (command == "scurve") return {"svg", "csv"};
  if (command == "equilibrium") return {"csv", "json"};
  if (command == "recur") return {"csv", "json"};
  return {"json"};
}

std::string fmt(const RunConfig& rc) {
  if (!rc.format.empty()) return rc.format;
  return rc.command == "phase classify" && !rc.grid.empty() ? "csv" : default_format(rc.command);
}

int single_N(const RunConfig& rc, int fallback) {
  if (rc.N.empty()) {
    if (fallback > 0) return fallback;
    throw ValidationError(rc.command + " needs --N");
  }
  std::vector<int> v = parse_int_list(rc.N);
  if (v.size() != 1) throw ValidationError(rc.command + " takes a single --N");
  if (v[0] < 1) throw ValidationError("--N must be positive");
  return v[0];
}

std::vector<int> N_list(const RunConfig& rc, std::vector<int> fallback) {
  return rc.N.empty() ? fallback : parse_int_list(rc.N);
}

std::array<double, 4> parse_grid(const std::string& s) {
  std::array<double, 4> g{};
  std::stringstream ss(s);
  std::string item;
  int k = 0;
  while (std::getline(ss, item, ',')) {
    if (k == 4) throw ValidationError("--grid takes re_min,re_max,im_min,im_max");
    try {
      std::size_t used = 0;
      g[k] = std::stod(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ValidationError("--grid: not a number: '" + item + "'");
    }
    ++k;
  }
  if (k != 4) throw ValidationError("--grid takes re_min,re_max,im_min,im_max");
  if (!(g[0] <= g[1]) || !(g[2] <= g[3])) throw ValidationError("--grid ranges must be ordered");
  return g;
}

int n_max_for(const RunConfig& rc, int N) { return rc.n_max >= 0 ? rc.n_max : N; }

std::string out_or_companion(const RunConfig& rc, const std::string& ext) {
  return rc.out.empty() ? std::string() : with_extension(rc.out, ext);
}

// ---------------------------------------------------------------------------

Json spectral_json(const SpectralData& sd, const NumberWriter& nw) {
  Json j;
  j["t"] = nw.num(sd.t);
  j["x"] = nw.num(sd.x);
  j["a"] = nw.num(sd.a);
  j["b"] = nw.num(sd.b);
  j["c"] = nw.num(sd.c);
  j["region"] = to_string(sd.region.phase);
  j["graph_case"] = to_string(sd.region.graph_case);
  j["mirrored"] = sd.region.mirrored;
  j["U"] = nw.num(sd.region.classifier.U);
  j["V"] = nw.num(sd.region.classifier.V);
  if (!sd.region.diagnostic.empty()) j["diagnostic"] = sd.region.diagnostic;
  return j;
}

Json report_json(const AsymptoticReport& r, const NumberWriter& nw) {
  Json j;
  j["check"] = "rate";
  j["quantity"] = r.quantity;
  j["t"] = nw.num(r.t);
  j["N"] = r.N_list;
  Json errs = Json::array(), signed_errs = Json::array();
  for (double e : r.errors) errs.push_back(nw.num(e));
  for (const Complex& e : r.signed_errors) signed_errs.push_back(nw.num(e));
  j["errors"] = errs;
  j["signed_errors"] = signed_errs;
  j["fitted_slope"] = nw.num(r.fitted_slope);
  j["slope_ci"] = nw.num(r.slope_ci);
  j["fit_residual"] = nw.num(r.fit_residual);
  j["expected_slope"] = nw.num(r.expected_slope);
  j["band"] = nw.num(r.band);
  j["pass"] = r.pass;
  return j;
}

bool all_pass(const Json& reports) {
  for (const auto& r : reports)
    if (!r.at("pass").get<bool>()) return false;
  return true;
}

// ---------------------------------------------------------------------------
// SVG

std::string utc_timestamp() {
  std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

class SvgCanvas {
 public:
  SvgCanvas(double half_width, int pixels) : w_(half_width), px_(pixels) {}

  std::string point(cd z) const {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2f,%.2f", x(z), y(z));
    return buf;
  }
  double x(cd z) const { return (z.real() + w_) / (2 * w_) * px_; }
  double y(cd z) const { return (w_ - z.imag()) / (2 * w_) * px_; }

  // Segments are clipped to a box a little larger than the frame; the viewBox does the rest.
  void polyline(std::ostringstream& os, const Polyline& p, const std::string& style) const {
    const double lim = 1.5 * w_;
    const Polyline s = p.simplified(w_ / 2000);
    std::string pts;
    cd last{NAN, NAN};
    auto flush = [&] {
      if (pts.find(' ') != std::string::npos) os << "  <polyline points=\"" << pts << "\" " << style << "/>\n";
      pts.clear();
    };
    const auto& v = s.points();
    for (std::size_t i = 1; i < v.size(); ++i) {
      cd a = v[i - 1], b = v[i];
      if (!clip(a, b, lim)) {
        flush();
        continue;
      }
      if (pts.empty() || a != last) {
        flush();
        pts = point(a);
      }
      pts += ' ' + point(b);
      last = b;
      if (b != v[i]) flush();
    }
    flush();
  }

 private:
  // Liang–Barsky against [−lim, lim]²
  static bool clip(cd& a, cd& b, double lim) {
    double t0 = 0, t1 = 1;
    const cd d = b - a;
    const double p[4] = {-d.real(), d.real(), -d.imag(), d.imag()};
    const double q[4] = {a.real() + lim, lim - a.real(), a.imag() + lim, lim - a.imag()};
    for (int k = 0; k < 4; ++k) {
      if (p[k] == 0) {
        if (q[k] < 0) return false;
        continue;
      }
      double r = q[k] / p[k];
      if (p[k] < 0) t0 = std::max(t0, r);
      else t1 = std::min(t1, r);
      if (t0 > t1) return false;
    }
    cd a0 = a;
    a = a0 + t0 * d;
    b = a0 + t1 * d;
    return true;
  }

  double w_;
  int px_;
};

std::string render_svg(const RunConfig& rc, const SpectralData& sd, const CriticalGraph& g,
                       const SContour& sc) {
  double reach = 1.0;
  for (const auto& p : g.critical_points) reach = std::max(reach, std::abs(p.z.to_cd()));
  const double W = 1.8 * reach + 1.0;
  const int px = 720;
  SvgCanvas cv(W, px);
  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  if (!rc.no_meta) os << "<!-- loggas scurve t=" << rc.t << " bits=" << rc.bits << " generated " << utc_timestamp() << " -->\n";
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << px << "\" height=\"" << px
     << "\" viewBox=\"0 0 " << px << ' ' << px << "\">\n";
  os << "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "  <g stroke=\"#d0d0d0\" stroke-width=\"0.8\">\n";
  os << "    <line x1=\"0\" y1=\"" << cv.y({0, 0}) << "\" x2=\"" << px << "\" y2=\"" << cv.y({0, 0}) << "\"/>\n";
  os << "    <line x1=\"" << cv.x({0, 0}) << "\" y1=\"0\" x2=\"" << cv.x({0, 0}) << "\" y2=\"" << px << "\"/>\n";
  os << "  </g>\n";

  os << " <g id=\"orthogonal\">\n";
  for (const auto& a : g.arcs)
    if (a.kind == ArcKind::OrthogonalTrajectory)
      cv.polyline(os, a.polyline, "fill=\"none\" stroke=\"#7a7a7a\" stroke-width=\"1\" stroke-dasharray=\"5 4\"");
  os << " </g>\n <g id=\"trajectories\">\n";
  for (const auto& a : g.arcs)
    if (a.kind == ArcKind::Trajectory)
      cv.polyline(os, a.polyline, "fill=\"none\" stroke=\"#303030\" stroke-width=\"1.2\"");
  os << " </g>\n <g id=\"contour\">\n";
  for (const auto& a : sc.arcs) {
    const char* colour = a.in_support ? "#b00000" : "#1f4fa0";
    cv.polyline(os, a.polyline,
                std::string("fill=\"none\" stroke=\"") + colour + "\" stroke-width=\"3.2\" stroke-linecap=\"round\"");
  }
  os << " </g>\n <g id=\"points\" font-family=\"sans-serif\" font-size=\"14\">\n";
  for (const auto& p : g.critical_points) {
    cd z = p.z.to_cd();
    os << "  <circle cx=\"" << cv.x(z) << "\" cy=\"" << cv.y(z) << "\" r=\"" << (p.order > 1 ? 5 : 4)
       << "\" fill=\"" << (p.order > 1 ? "white" : "black") << "\" stroke=\"black\"/>\n";
    os << "  <text x=\"" << cv.x(z) + 7 << "\" y=\"" << cv.y(z) - 7 << "\">" << p.label << "</text>\n";
  }
  os << " </g>\n";
  os << "  <text x=\"10\" y=\"20\" font-family=\"sans-serif\" font-size=\"13\">t = " << rc.t << "  case "
     << to_string(sd.region.graph_case) << (sd.region.mirrored ? " (mirrored)" : "") << "</text>\n";
  os << "</svg>\n";
  return os.str();
}

std::string render_polyline_csv(const CriticalGraph& g, const SContour& sc, const NumberWriter& nw) {
  std::ostringstream os;
  os << "set,arc,kind,label,support,re_z,im_z\n";
  auto kind = [](ArcKind k) { return k == ArcKind::Trajectory ? "trajectory" : "orthogonal"; };
  for (std::size_t i = 0; i < g.arcs.size(); ++i) {
    const auto& a = g.arcs[i];
    const std::string sig = arc_signature(g, a);
    for (cd z : a.polyline.points())
      os << "graph," << i << ',' << kind(a.kind) << ',' << sig << ",0," << nw.csv(z.real()) << ','
         << nw.csv(z.imag()) << '\n';
  }
  for (std::size_t i = 0; i < sc.arcs.size(); ++i) {
    const auto& a = sc.arcs[i];
    for (cd z : a.polyline.points())
      os << "contour," << i << ',' << kind(a.kind) << ',' << a.label << ',' << (a.in_support ? 1 : 0) << ','
         << nw.csv(z.real()) << ',' << nw.csv(z.imag()) << '\n';
  }
  return os.str();
}

SpectralData one_cut(const Complex& t, const PrecisionContext& ctx) {
  SpectralData sd = classify_full(t, ctx);
  if (sd.region.phase == Phase::OutsideOneCut)
    throw ValidationError("t lies outside the one-cut region; " + sd.region.diagnostic);
  return sd;
}

}  // namespace

// ---------------------------------------------------------------------------

void validate(const RunConfig& rc) {
  if (rc.bits < 64) throw ValidationError("--bits must be at least 64");
  const std::string f = fmt(rc);
  if (!allowed_formats(rc.command).count(f))
    throw ValidationError("--format " + f + " is not available for " + rc.command);
  PrecisionScope ps(rc.bits);
  parse_complex(rc.t);

  const std::string& c = rc.command;
  if (c == "phase classify") {
    if (!rc.grid.empty()) {
      parse_grid(rc.grid);
      if (rc.samples != -1 && rc.samples < 2) throw ValidationError("--samples must be at least 2 for a grid");
      if (f != "csv") throw ValidationError("grid sweeps are written as csv");
      if (rc.graph) throw ValidationError("--graph is for single points");
      if (rc.threads < 0) throw ValidationError("--threads must be non-negative");
    } else if (f != "json") {
      throw ValidationError("single-point classification is written as json");
    }
  } else if (c == "phase boundary") {
    if (rc.arc.empty()) throw ValidationError("phase boundary needs --arc");
    boundary_arc_from_string(rc.arc);
    if (rc.samples != -1 && rc.samples < 2) throw ValidationError("--samples must be at least 2");
    if (!(rc.radius > 0)) throw ValidationError("--radius must be positive");
  } else if (c == "equilibrium") {
    if (rc.samples != -1 && rc.samples < 16) throw ValidationError("--samples must be at least 16");
  } else if (c == "recur") {
    int N = single_N(rc, 0);
    int n = n_max_for(rc, N);
    if (n < 1) throw ValidationError("--n-max must be positive");
    if (rc.bits < 64 + 8 * n)
      throw ValidationError("--bits must be at least 64 + 8 n_max = " + std::to_string(64 + 8 * n));
    if (rc.method != "recursion" && rc.method != "quadrature")
      throw ValidationError("--method is recursion or quadrature");
  } else if (c == "verify string") {
    single_N(rc, 8);
    int n = rc.n_max >= 0 ? rc.n_max : 12;
    if (n < 1) throw ValidationError("--n-max must be positive");
    if (rc.bits < 64 + 8 * n)
      throw ValidationError("--bits must be at least 64 + 8 n_max = " + std::to_string(64 + 8 * n));
  } else if (c == "verify toda") {
    single_N(rc, 16);
    if (!(rc.h > 0 && rc.h <= 1e-2)) throw ValidationError("--step must lie in (0, 1e-2]");
  } else if (c == "verify rates") {
    N_list(rc, {8, 16, 32, 64});
  } else if (c == "verify strong") {
    N_list(rc, {8, 16, 32});
    parse_complex(rc.z);
    if (!(rc.fraction > 0 && rc.fraction < 1)) throw ValidationError("--fraction must lie in (0, 1)");
  } else if (c == "freeenergy") {
    if (!(rc.h > 0 && rc.h <= 1e-1)) throw ValidationError("--step must lie in (0, 0.1]");
  } else if (c != "scurve") {
    throw ValidationError("unknown command " + c);
  }
}

Outcome cmd_phase_classify(const RunConfig& rc) {
  const PrecisionContext ctx = context(rc);
  PrecisionScope ps(ctx);
  const NumberWriter nw(rc.bits);
  Outcome o;
  if (rc.grid.empty()) {
    SpectralData sd = classify_full(parse_complex(rc.t), ctx);
    Json j = spectral_json(sd, nw);
    if (rc.graph) {
      if (sd.region.phase == Phase::OutsideOneCut)
        throw ValidationError("no critical-graph template outside the one-cut region");
      CriticalGraph g = critical_graph(sd, ctx);
      j["signature"] = graph_signature(g);
      j["template"] = template_signature(sd.region.graph_case, sd.region.mirrored);
      validate_graph(g, sd);
    }
    o.artifacts.push_back({rc.out, render_json(j)});
    return o;
  }

  const auto g = parse_grid(rc.grid);
  const int n = rc.samples == -1 ? 21 : rc.samples;
  struct Cell {
    Complex t;
    std::string region, graph_case;
    bool mirrored = false;
    double U = 0, V = 0;
    bool ok = false;
  };
  std::vector<Cell> cells(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      Real re = Real(g[0]) + (Real(g[1]) - Real(g[0])) * k / (n - 1);
      Real im = Real(g[3]) - (Real(g[3]) - Real(g[2])) * i / (n - 1);
      cells[static_cast<std::size_t>(i) * n + k].t = Complex(re, im);
    }
  // Every worker runs at the precision set above; classify never changes it, so the
  // shared default-precision setting is only ever read.
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t k; (k = next++) < cells.size();) {
      Cell& c = cells[k];
      try {
        RegionLabel r = classify(c.t, ctx);
        c.region = to_string(r.phase);
        c.graph_case = to_string(r.graph_case);
        c.mirrored = r.mirrored;
        c.U = r.classifier.U;
        c.V = r.classifier.V;
        c.ok = true;
      } catch (const std::exception&) {
        c.region = "error";
        c.graph_case = "none";
      }
    }
  };
  unsigned threads = rc.threads > 0 ? rc.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, cells.size());
  std::vector<std::thread> pool;
  for (unsigned i = 1; i < threads; ++i) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();

  std::ostringstream os;
  os << "re_t,im_t,region,graph_case,mirrored,U,V\n";
  for (const Cell& c : cells) {
    os << nw.csv(c.t.re) << ',' << nw.csv(c.t.im) << ',' << c.region << ',' << c.graph_case << ','
       << (c.mirrored ? 1 : 0) << ',';
    if (c.ok) os << nw.csv(c.U) << ',' << nw.csv(c.V);
    else os << ',';
    os << '\n';
  }
  o.artifacts.push_back({rc.out, os.str()});
  return o;
}

Outcome cmd_phase_boundary(const RunConfig& rc) {
  const PrecisionContext ctx = context(rc);
  PrecisionScope ps(ctx);
  const NumberWriter nw(rc.bits);
  const int n = rc.samples == -1 ? 50 : rc.samples;
  std::vector<Complex> ts = boundary_curves(boundary_arc_from_string(rc.arc), n, ctx, rc.radius);
  Outcome o;
  if (fmt(rc) == "json") {
    Json j;
    j["arc"] = rc.arc;
    Json pts = Json::array();
    for (const auto& t : ts) pts.push_back(nw.num(t));
    j["t"] = pts;
    o.artifacts.push_back({rc.out, render_json(j)});
  } else {
    std::ostringstream os;
    os << "re_t,im_t\n";
    for (const auto& t : ts) os << nw.csv(t.re) << ',' << nw.csv(t.im) << '\n';
    o.artifacts.push_back({rc.out, os.str()});
  }
  return o;
}

Outcome cmd_scurve(const RunConfig& rc) {
  const PrecisionContext ctx = context(rc);
  PrecisionScope ps(ctx);
  const NumberWriter nw(rc.bits);
  SpectralData sd = one_cut(parse_complex(rc.t), ctx);
  CriticalGraph g = critical_graph(sd, ctx);
  validate_graph(g, sd);
  SContour sc = build_scontour(sd, g, ctx);
  std::string svg = render_svg(rc, sd, g, sc);
  std::string csv = render_polyline_csv(g, sc, nw);
  Outcome o;
  if (fmt(rc) == "svg") {
    o.artifacts.push_back({rc.out, svg});
    if (!rc.out.empty()) o.artifacts.push_back({out_or_companion(rc, ".csv"), csv});
  } else {
    o.artifacts.push_back({rc.out, csv});
    if (!rc.out.empty()) o.artifacts.push_back({out_or_companion(rc, ".svg"), svg});
  }
  return o;
}

Outcome cmd_equilibrium(const RunConfig& rc) {
  const PrecisionContext ctx = context(rc);
  PrecisionScope ps(ctx);
  const NumberWriter nw(rc.bits);
  SpectralData sd = one_cut(parse_complex(rc.t), ctx);
  SzegoData sz = szego(sd, ctx);
  MeasureData md = equilibrium_measure(sz, rc.samples == -1 ? 200 : rc.samples, ctx);

  std::vector<cd> probes;
  const Polyline& J = sz.cuts().support();
  for (int k = 1; k <= 9; ++k) probes.push_back(J.at_length(J.length() * k / 10.0));
  for (const auto& a : sz.contour().arcs) {
    if (a.in_support) continue;
    // tails close to J, where the inequality is tightest
    double len = std::min(a.polyline.length(), 4 * sz.cuts().scale());
    const bool from_front = J.distance_to(a.polyline.front()) <= J.distance_to(a.polyline.back());
    for (double f : {0.1, 0.3, 0.6, 1.0})
      probes.push_back(a.polyline.at_length(from_front ? f * len : a.polyline.length() - f * len));
  }
  ELReport el = euler_lagrange_check(md, probes, ctx);

  Json j;
  j["t"] = nw.num(sd.t);
  j["region"] = to_string(sd.region.phase);
  j["mass"] = nw.num(md.mass);
  j["ell_star"] = nw.num(md.ell_star);
  j["min_density"] = nw.num(md.min_density);
  j["rate_a"] = nw.num(md.rate_a);
  j["rate_b"] = nw.num(md.rate_b);
  Json e;
  e["ell"] = nw.num(el.ell);
  e["max_support_deviation"] = nw.num(el.max_support_deviation);
  e["min_slack"] = nw.num(el.min_slack);
  e["ok"] = el.ok;
  Json pj = Json::array();
  for (const auto& p : el.probes) {
    Json q;
    q["z"] = nw.num(p.z);
    q["on_support"] = p.on_support;
    q["on_contour"] = p.on_contour;
    q["value"] = nw.num(p.value);
    pj.push_back(q);
  }
  e["probes"] = pj;
  j["euler_lagrange"] = e;
  const std::string json = render_json(j);

  std::ostringstream os;
  os << "re_z,im_z,density\n";
  for (const auto& s : md.density) os << nw.csv(s.z.real()) << ',' << nw.csv(s.z.imag()) << ',' << nw.csv(s.density) << '\n';

  Outcome o;
  if (fmt(rc) == "csv") {
    o.artifacts.push_back({rc.out, os.str()});
    if (!rc.out.empty()) o.artifacts.push_back({out_or_companion(rc, ".json"), json});
  } else {
    o.artifacts.push_back({rc.out, json});
    if (!rc.out.empty()) o.artifacts.push_back({out_or_companion(rc, ".csv"), os.str()});
  }
  return o;
}

Outcome cmd_recur(const RunConfig& rc) {
  const PrecisionContext ctx = context(rc);
  PrecisionScope ps(ctx);
  const NumberWriter nw(rc.bits);
  const Complex t = parse_complex(rc.t);
  const int N = single_N(rc, 0);
  const int n = n_max_for(rc, N);
  MomentTable mt = moments(t, N, 2 * n + 2,
                           rc.method == "quadrature" ? MomentSource::Quadrature : MomentSource::Recursion, ctx);
  RecurrenceTable rt = recurrence(mt, n, ctx);
  Outcome o;
  if (fmt(rc) == "json") {
    Json j;
    j["t"] = nw.num(t);
    j["N"] = N;
    j["n_max"] = n;
    j["contour"] = mt.contour;
    j["string_residual"] = nw.num(rt.string_residual);
    if (rt.has_Z) j["log_Z"] = nw.num(rt.log_Z);
    Json rows = Json::array();
    for (int k = 0; k <= n; ++k) {
      Json r;
      r["n"] = k;
      r["h"] = nw.num(rt.h[k]);
      r["gamma2"] = nw.num(rt.gamma2[k]);
      r["beta"] = nw.num(rt.beta[k]);
      rows.push_back(r);
    }
    j["rows"] = rows;
    o.artifacts.push_back({rc.out, render_json(j)});
  } else {
    std::ostringstream os;
    os << "n,re_h,im_h,re_gamma2,im_gamma2,re_beta,im_beta\n";
    for (int k = 0; k <= n; ++k)
      os << k << ',' << nw.csv(rt.h[k].re) << ',' << nw.csv(rt.h[k].im) << ',' << nw.csv(rt.gamma2[k].re) << ','
         << nw.csv(rt.gamma2[k].im) << ',' << nw.csv(rt.beta[k].re) << ',' << nw.csv(rt.beta[k].im) << '\n';
    o.artifacts.push_back({rc.out, os.str()});
  }
  return o;
}

Outcome cmd_verify(const RunConfig& rc) {
  const PrecisionContext ctx = context(rc);
  PrecisionScope ps(ctx);
  const NumberWriter nw(rc.bits);
  const Complex t = parse_complex(rc.t);
  Json reports = Json::array();

  if (rc.command == "verify string") {
    const int N = single_N(rc, 8);
    const int n = rc.n_max >= 0 ? rc.n_max : 12;
    const double tol = rc.tol > 0 ? rc.tol : std::pow(10.0, -rc.bits / 16.0);
    MomentTable mt = moments(t, N, 2 * n + 2, MomentSource::Recursion, ctx);
    RecurrenceTable rt = recurrence(mt, n, ctx);
    auto res = string_residuals(rt);
    Json j;
    j["check"] = "string";
    j["t"] = nw.num(t);
    j["N"] = N;
    j["n_max"] = n;
    j["bits"] = rc.bits;
    Json rows = Json::array();
    Real worst = 0;
    for (std::size_t k = 0; k < res.size(); ++k) {
      Json r;
      r["n"] = k;
      r["first"] = nw.num(abs(res[k].first));
      r["second"] = nw.num(abs(res[k].second));
      worst = rmax(worst, rmax(abs(res[k].first), abs(res[k].second)));
      rows.push_back(r);
    }
    j["residuals"] = rows;
    j["max_residual"] = nw.num(worst);
    j["tol"] = nw.num(tol);
    j["pass"] = worst <= tol;
    reports.push_back(j);
  } else if (rc.command == "verify toda") {
    const int N = single_N(rc, 16);
    const double tol = rc.tol > 0 ? rc.tol : 1e-6;
    const PrecisionContext c = precision_for(N, ctx);
    TodaReport tr = toda_check(t, N, rc.h, c);
    PrecisionScope back(ctx);
    Json j;
    j["check"] = "toda";
    j["t"] = nw.num(t);
    j["N"] = N;
    j["h"] = nw.num(rc.h);
    j["bits"] = c.bits;
    j["F_minus"] = nw.num(tr.F_minus);
    j["F_0"] = nw.num(tr.F_0);
    j["F_plus"] = nw.num(tr.F_plus);
    j["second_difference"] = nw.num(tr.second_difference);
    j["gamma2"] = nw.num(tr.gamma2);
    j["residual"] = nw.num(tr.residual);
    j["tol"] = nw.num(tol);
    j["pass"] = tr.residual <= tol;
    reports.push_back(j);
  } else if (rc.command == "verify rates") {
    const auto Ns = N_list(rc, {8, 16, 32, 64});
    reports.push_back(report_json(rate_gamma(t, Ns, ctx), nw));
    BetaReports br = rate_beta(t, Ns, ctx);
    reports.push_back(report_json(br.raw, nw));
    reports.push_back(report_json(br.shifted, nw));
  } else if (rc.command == "verify strong") {
    const auto Ns = N_list(rc, {8, 16, 32});
    const Complex z = parse_complex(rc.z);
    const double tol = rc.tol > 0 ? rc.tol : 0.1;
    AsymptoticReport sr = strong_asymptotics_check(t, z, Ns, ctx);
    Json j = report_json(sr, nw);
    j["z"] = nw.num(z);
    reports.push_back(j);
    const double dev = on_cut_check(t, Ns.back(), rc.fraction, ctx);
    Json k;
    k["check"] = "on-cut";
    k["t"] = nw.num(t);
    k["N"] = Ns.back();
    k["fraction"] = nw.num(rc.fraction);
    k["deviation"] = nw.num(dev);
    k["tol"] = nw.num(tol);
    k["pass"] = dev <= tol;
    reports.push_back(k);
  } else {
    throw ValidationError("unknown verification " + rc.command);
  }
  Outcome o;
  o.artifacts.push_back({rc.out, render_json(reports)});
  o.exit_code = all_pass(reports) ? 0 : 3;
  return o;
}

Outcome cmd_freeenergy(const RunConfig& rc) {
  const PrecisionContext ctx = context(rc);
  PrecisionScope ps(ctx);
  const NumberWriter nw(rc.bits);
  const Complex t = parse_complex(rc.t);
  const SpectralData sd = one_cut(t, ctx);
  const Real h(rc.h);
  const Complex F0 = genus_zero_free_energy(t, ctx);
  const Complex d2 = (genus_zero_free_energy(t + h, ctx) - 2 * F0 + genus_zero_free_energy(t - h, ctx)) / (h * h);
  const Complex target = -1 / (2 * sd.x);
  const double err = abs(d2 - target).convert_to<double>();
  const double tol = rc.tol > 0 ? rc.tol : 1e-6;
  Json j;
  j["t"] = nw.num(t);
  j["F0"] = nw.num(F0);
  Json c;
  c["h"] = nw.num(rc.h);
  c["second_difference"] = nw.num(d2);
  c["target"] = nw.num(target);
  c["error"] = nw.num(err);
  c["tol"] = nw.num(tol);
  c["pass"] = err <= tol;
  j["second_derivative_check"] = c;
  Outcome o;
  o.artifacts.push_back({rc.out, render_json(j)});
  o.exit_code = err <= tol ? 0 : 3;
  return o;
}

Outcome dispatch(const RunConfig& rc) {
  validate(rc);
  const std::string& c = rc.command;
  if (c == "phase classify") return cmd_phase_classify(rc);
  if (c == "phase boundary") return cmd_phase_boundary(rc);
  if (c == "scurve") return cmd_scurve(rc);
  if (c == "equilibrium") return cmd_equilibrium(rc);
  if (c == "recur") return cmd_recur(rc);
  if (c == "freeenergy") return cmd_freeenergy(rc);
  return cmd_verify(rc);
}

}  // namespace loggas::cli
