#include <fstream>
#include <iostream>
#include <sstream>
#include <utility>

#include "CLI11.hpp"

#include "commands.hpp"
#include "loggas/errors.hpp"

namespace loggas::cli {

namespace {

const char* const kSharedKeys[] = {"t", "N", "n-max", "bits", "out", "format", "samples", "no-meta"};

// key = value lines; '#' starts a comment. Only shared flags may be set this way.
std::vector<std::string> config_arguments(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ValidationError("cannot read config file " + path);
  std::vector<std::string> args;
  std::string line;
  int lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ValidationError(path + ":" + std::to_string(lineno) + ": expected key = value");
    auto strip = [](std::string s) {
      auto b = s.find_first_not_of(" \t\r\"");
      auto e = s.find_last_not_of(" \t\r\"");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    std::string key = strip(line.substr(0, eq)), value = strip(line.substr(eq + 1));
    bool known = false;
    for (const char* k : kSharedKeys) known |= key == k;
    if (!known) throw ValidationError(path + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
    if (key == "no-meta") {
      if (value == "true" || value == "1") args.push_back("--no-meta");
      continue;
    }
    args.push_back("--" + key + "=" + value);
  }
  return args;
}

std::string find_config(int argc, const char* const* argv) {
  for (int i = 1; i < argc; ++i) {
    std::string a = argv[i];
    if (a == "--config" && i + 1 < argc) return argv[i + 1];
    if (a.rfind("--config=", 0) == 0) return a.substr(9);
  }
  return {};
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig rc;
  CLI::App app{"Cubic log-gas toolkit: phase diagram, S-curves, equilibrium measures, finite-N checks", "loggas"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  app.fallthrough();

  std::string config;
  app.add_option("--config", config, "file of key = value lines for the shared flags");
  app.add_option("--t", rc.t, "parameter t as re,im");
  app.add_option("--N", rc.N, "matrix size (comma list for rate fits)");
  app.add_option("--n-max", rc.n_max, "largest recurrence index");
  app.add_option("--bits", rc.bits, "working precision in bits")->envname("LOGGAS_BITS");
  app.add_option("--out", rc.out, "output path (default: standard output)");
  app.add_option("--format", rc.format, "csv, json or svg");
  app.add_option("--samples", rc.samples, "sample count");
  app.add_flag("--no-meta", rc.no_meta, "omit the timestamp comment from SVG output");

  auto* phase = app.add_subcommand("phase", "classify t or sample phase boundaries");
  phase->require_subcommand(1);
  phase->fallthrough();
  auto* classify = phase->add_subcommand("classify", "region, graph case and spectral data of t");
  classify->add_option("--grid", rc.grid, "sweep re_min,re_max,im_min,im_max with --samples per axis");
  classify->add_option("--threads", rc.threads, "worker threads for --grid (0: all cores)");
  classify->add_flag("--graph", rc.graph, "trace the critical graph and check it against its template");
  auto* boundary = phase->add_subcommand("boundary", "samples of a phase-boundary arc");
  boundary->add_option("--arc", rc.arc, "split, birth-a, birth-b, crit-a, crit-b, s-ray, ...");
  boundary->add_option("--radius", rc.radius, "cut unbounded arcs at |t| = radius");

  app.add_subcommand("scurve", "critical graph and S-contour (svg figure or csv polylines)");
  app.add_subcommand("equilibrium", "density of the equilibrium measure and Euler-Lagrange residuals");
  auto* recur = app.add_subcommand("recur", "recurrence coefficients from the moments");
  recur->add_option("--method", rc.method, "moment source: recursion or quadrature");

  auto* verify = app.add_subcommand("verify", "string equations, Toda, rate and strong-asymptotics checks");
  verify->require_subcommand(1);
  verify->fallthrough();
  const std::pair<const char*, const char*> checks[] = {
      {"string", "string-equation residuals of the recurrence coefficients"},
      {"toda", "Toda equation by a second difference in t"},
      {"rates", "convergence rates of gamma and beta in N"},
      {"strong", "strong asymptotics of the scaled polynomials"}};
  for (const auto& [name, help] : checks) {
    auto* v = verify->add_subcommand(name, help);
    v->add_option("--tol", rc.tol, "pass threshold");
    if (std::string(name) == "toda") v->add_option("--step", rc.h, "step of the second difference");
    if (std::string(name) == "strong") {
      v->add_option("--z", rc.z, "probe point off the cut, re,im");
      v->add_option("--fraction", rc.fraction, "position on the cut for the on-cut check");
    }
  }
  auto* fe = app.add_subcommand("freeenergy", "genus-zero free energy and its second derivative");
  fe->add_option("--step", rc.h, "step of the second difference");
  fe->add_option("--tol", rc.tol, "pass threshold");

  // config values go first so that flags on the command line win
  std::vector<std::string> args;
  try {
    std::string cfg = find_config(argc, argv);
    if (!cfg.empty()) args = config_arguments(cfg);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  for (int i = 1; i < argc; ++i) args.push_back(argv[i]);
  std::vector<std::string> reversed(args.rbegin(), args.rend());

  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    std::ostringstream so, se;
    int code = app.exit(e, so, se);
    out << so.str();
    err << se.str();
    return code == 0 ? 0 : 2;
  }

  for (CLI::App* s = &app; s;) {
    auto subs = s->get_subcommands();
    if (subs.empty()) break;
    s = subs.front();
    rc.command += (rc.command.empty() ? "" : " ") + s->get_name();
  }

  try {
    Outcome o = dispatch(rc);
    commit(o.artifacts, out);
    if (o.exit_code != 0) err << "verification failed\n";
    return o.exit_code;
  } catch (const TopologyMismatch& e) {
    err << "topology mismatch: " << e.what() << "\n  expected: " << e.expected() << "\n  found:    " << e.found()
        << '\n';
    return 4;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << '\n';
    return 3;
  }
}

}  // namespace loggas::cli
