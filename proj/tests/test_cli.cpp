#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "commands.hpp"
#include "json.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
  int code = 0;
  std::string out, err;
};

Result call(std::vector<std::string> args) {
  args.insert(args.begin(), "loggas");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Result r;
  r.code = loggas::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

double number(const nlohmann::json& j) { return j.get<double>(); }

struct TempDir {
  fs::path path;
  TempDir() {
    std::random_device rd;
    path = fs::temp_directory_path() / ("loggas-cli-" + std::to_string(rd()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::vector<std::string> entries() const {
    std::vector<std::string> out;
    for (const auto& e : fs::directory_iterator(path)) out.push_back(e.path().filename().string());
    return out;
  }
};

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

// significant digits of a number written as d.ddd…e±xx
std::size_t mantissa_digits(const std::string& s) {
  std::size_t n = 0;
  for (char c : s.substr(0, s.find('e')))
    if (std::isdigit(static_cast<unsigned char>(c))) ++n;
  return n;
}

}  // namespace

TEST_CASE("classify examples") {
  Result r = call({"phase", "classify", "--t", "2,0", "--bits", "128"});
  REQUIRE(r.code == 0);
  auto j = nlohmann::json::parse(r.out);
  CHECK(j["region"] == "one-cut-interior");
  CHECK(j["graph_case"] == "f");
  CHECK(number(j["x"]["re"]) == doctest::Approx(-1));
  CHECK(number(j["c"]["re"]) == doctest::Approx(1));
  CHECK(number(j["U"]) < 0);

  Result zero = call({"phase", "classify", "--t", "0", "--bits", "128"});
  REQUIRE(zero.code == 0);
  CHECK(nlohmann::json::parse(zero.out)["graph_case"] == "a");

  Result cr = call({"phase", "classify", "--t", "1.8898815748423097", "--bits", "128"});
  REQUIRE(cr.code == 0);
  CHECK(nlohmann::json::parse(cr.out)["region"] == "critical-point");

  Result graph = call({"phase", "classify", "--t", "2,0", "--bits", "96", "--graph"});
  REQUIRE(graph.code == 0);
  auto jg = nlohmann::json::parse(graph.out);
  CHECK(jg["signature"] == jg["template"]);
}

TEST_CASE("split arc endpoints") {
  Result r = call({"phase", "boundary", "--arc", "split", "--samples", "2", "--bits", "96"});
  REQUIRE(r.code == 0);
  std::istringstream in(r.out);
  std::string header, first, second;
  std::getline(in, header);
  std::getline(in, first);
  std::getline(in, second);
  CHECK(header == "re_t,im_t");
  auto parse = [](const std::string& row) {
    auto comma = row.find(',');
    return std::complex<double>(std::stod(row.substr(0, comma)), std::stod(row.substr(comma + 1)));
  };
  const std::complex<double> tcr(3 * std::pow(2.0, -2.0 / 3), 0);
  CHECK(std::abs(parse(first) - tcr) < 1e-6);
  CHECK(std::abs(parse(second) - tcr * std::polar(1.0, 2 * M_PI / 3)) < 1e-6);
}

TEST_CASE("precision controls the printed digits") {
  Result r = call({"phase", "classify", "--t", "2,0", "--bits", "512"});
  REQUIRE(r.code == 0);
  auto pos = r.out.find("\"re\": ");
  REQUIRE(pos != std::string::npos);
  std::string num = r.out.substr(pos + 6, r.out.find_first_of(",\n", pos + 6) - pos - 6);
  CHECK(mantissa_digits(num) == 64);

  Result low = call({"phase", "classify", "--t", "2,0", "--bits", "64"});
  pos = low.out.find("\"re\": ");
  num = low.out.substr(pos + 6, low.out.find_first_of(",\n", pos + 6) - pos - 6);
  CHECK(mantissa_digits(num) == 17);
}

TEST_CASE("output is deterministic") {
  std::vector<std::string> svg{"scurve", "--t", "2,0", "--bits", "64", "--no-meta"};
  Result a = call(svg), b = call(svg);
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out.find("<!--") == std::string::npos);

  Result meta = call({"scurve", "--t", "2,0", "--bits", "64"});
  CHECK(meta.out.find("<!-- loggas scurve") != std::string::npos);

  std::vector<std::string> grid{"phase", "classify", "--grid", "-2,2,-2,2", "--samples", "9", "--bits", "64"};
  auto one = grid, many = grid;
  one.insert(one.end(), {"--threads", "1"});
  many.insert(many.end(), {"--threads", "4"});
  Result g1 = call(one), g4 = call(many);
  REQUIRE(g1.code == 0);
  CHECK(g1.out == g4.out);
  CHECK(g1.out.rfind("re_t,im_t,region,graph_case,mirrored,U,V\n", 0) == 0);
}

TEST_CASE("exit codes") {
  CHECK(call({}).code == 2);
  CHECK(call({"--help"}).code == 0);
  CHECK(call({"phase", "classify", "--t", "2", "--bits", "32"}).code == 2);
  CHECK(call({"phase", "classify", "--t", "two"}).code == 2);
  CHECK(call({"phase", "boundary", "--arc", "nowhere"}).code == 2);
  CHECK(call({"recur", "--t", "2", "--N", "8", "--n-max", "40", "--bits", "128"}).code == 2);
  CHECK(call({"scurve", "--t", "2", "--format", "json"}).code == 2);
  CHECK(call({"verify", "toda", "--t", "2", "--step", "0.5"}).code == 2);
  // outside the one-cut region there is no equilibrium measure
  CHECK(call({"equilibrium", "--t", "1,2", "--bits", "64"}).code != 0);

  // a failed verification still reports, and exits 3
  Result fail = call({"verify", "string", "--t", "2,0", "--tol", "1e-300", "--bits", "256"});
  CHECK(fail.code == 3);
  auto j = nlohmann::json::parse(fail.out);
  CHECK(j[0]["pass"] == false);
  Result pass = call({"verify", "string", "--t", "2,0", "--bits", "256"});
  CHECK(pass.code == 0);
}

TEST_CASE("artifacts are written whole or not at all") {
  TempDir dir;
  Result ok = call({"scurve", "--t", "2,0", "--bits", "64", "--no-meta", "--out", (dir.path / "fig.svg").string()});
  REQUIRE(ok.code == 0);
  CHECK(ok.out.empty());
  auto files = dir.entries();
  std::sort(files.begin(), files.end());
  CHECK(files == std::vector<std::string>{"fig.csv", "fig.svg"});
  const std::string svg = slurp(dir.path / "fig.svg");
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK(slurp(dir.path / "fig.csv").rfind("set,arc,kind,label,support,re_z,im_z", 0) == 0);

  TempDir empty;
  Result bad = call({"equilibrium", "--t", "1,2", "--bits", "64", "--out", (empty.path / "mu.csv").string()});
  CHECK(bad.code != 0);
  CHECK(empty.entries().empty());
}

TEST_CASE("config files and environment") {
  TempDir dir;
  const fs::path cfg = dir.path / "run.cfg";
  {
    std::ofstream f(cfg);
    f << "# shared settings\n t = 2,0\nbits = 512  # wide\n";
  }
  Result r = call({"--config", cfg.string(), "phase", "classify"});
  REQUIRE(r.code == 0);
  auto j = nlohmann::json::parse(r.out);
  CHECK(number(j["t"]["re"]) == doctest::Approx(2));
  CHECK(j["graph_case"] == "f");

  // the command line wins over the file
  Result over = call({"--config", cfg.string(), "phase", "classify", "--t", "0"});
  REQUIRE(over.code == 0);
  CHECK(nlohmann::json::parse(over.out)["graph_case"] == "a");

  {
    std::ofstream f(dir.path / "bad.cfg");
    f << "arc = split\n";
  }
  CHECK(call({"--config", (dir.path / "bad.cfg").string(), "phase", "classify"}).code == 2);
  CHECK(call({"--config", (dir.path / "missing.cfg").string(), "phase", "classify"}).code == 2);

  setenv("LOGGAS_BITS", "512", 1);
  Result env = call({"phase", "classify", "--t", "2"});
  Result flag = call({"phase", "classify", "--t", "2", "--bits", "64"});
  unsetenv("LOGGAS_BITS");
  REQUIRE(env.code == 0);
  auto pos = env.out.find("\"re\": ");
  CHECK(mantissa_digits(env.out.substr(pos + 6, env.out.find_first_of(",\n", pos + 6) - pos - 6)) == 64);
  pos = flag.out.find("\"re\": ");
  CHECK(mantissa_digits(flag.out.substr(pos + 6, flag.out.find_first_of(",\n", pos + 6) - pos - 6)) == 17);
}

TEST_CASE("command outputs carry the documented fields") {
  Result eq = call({"equilibrium", "--t", "2,0", "--bits", "96", "--format", "json", "--samples", "200"});
  REQUIRE(eq.code == 0);
  auto j = nlohmann::json::parse(eq.out);
  CHECK(number(j["mass"]) == doctest::Approx(1).epsilon(1e-10));
  CHECK(j["euler_lagrange"]["ok"] == true);

  Result fe = call({"freeenergy", "--t", "2,0", "--bits", "128"});
  REQUIRE(fe.code == 0);
  auto f = nlohmann::json::parse(fe.out);
  CHECK(number(f["F0"]["re"]) == doctest::Approx(1.75 - std::log(2.0) / 2));
  CHECK(f["second_derivative_check"]["pass"] == true);

  Result rec = call({"recur", "--t", "2,0", "--N", "4", "--n-max", "3", "--bits", "128"});
  REQUIRE(rec.code == 0);
  CHECK(rec.out.rfind("n,re_h,im_h,re_gamma2,im_gamma2,re_beta,im_beta\n", 0) == 0);
  CHECK(std::count(rec.out.begin(), rec.out.end(), '\n') == 5);
}
