#include "output.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "loggas/errors.hpp"

namespace loggas::cli {

namespace {

constexpr char kTag = '\x01';

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t");
  auto e = s.find_last_not_of(" \t");
  return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

Real parse_real(const std::string& s) {
  std::string v = trim(s);
  if (v.empty()) throw ValidationError("empty number");
  // Real's string constructor accepts trailing garbage silently in some builds
  if (v.find_first_not_of("0123456789+-.eE") != std::string::npos)
    throw ValidationError("not a number: '" + v + "'");
  try {
    return Real(v);
  } catch (const std::exception&) {
    throw ValidationError("not a number: '" + v + "'");
  }
}

}  // namespace

int digits_for(int bits) { return std::max(17, bits / 8); }

std::string sci(const Real& r, int digits) {
  std::ostringstream os;
  os << std::scientific << std::setprecision(digits - 1) << r;
  return os.str();
}

std::string sci(double d, int digits) {
  if (!std::isfinite(d)) return std::isnan(d) ? "nan" : (d > 0 ? "inf" : "-inf");
  return sci(Real(d), digits);
}

Json NumberWriter::num(const Real& r) const { return std::string(1, kTag) + sci(r, digits_); }

Json NumberWriter::num(double d) const {
  if (!std::isfinite(d)) return nullptr;
  return std::string(1, kTag) + sci(d, digits_);
}

Json NumberWriter::num(const Complex& z) const {
  Json j;
  j["re"] = num(z.re);
  j["im"] = num(z.im);
  return j;
}

Json NumberWriter::num(cd z) const {
  Json j;
  j["re"] = num(z.real());
  j["im"] = num(z.imag());
  return j;
}

std::string render_json(const Json& j) {
  const std::string s = j.dump(2);
  // dump() escapes the tag as \u0001
  const std::string open = "\"\\u0001";
  std::string out;
  out.reserve(s.size());
  std::size_t pos = 0;
  while (true) {
    std::size_t k = s.find(open, pos);
    if (k == std::string::npos) break;
    out.append(s, pos, k - pos);
    std::size_t end = s.find('"', k + open.size());
    out.append(s, k + open.size(), end - k - open.size());
    pos = end + 1;
  }
  out.append(s, pos, std::string::npos);
  out.push_back('\n');
  return out;
}

Complex parse_complex(const std::string& s) {
  auto comma = s.find(',');
  if (comma == std::string::npos) return Complex(parse_real(s));
  if (s.find(',', comma + 1) != std::string::npos)
    throw ValidationError("complex value must be 're,im': '" + s + "'");
  return Complex(parse_real(s.substr(0, comma)), parse_real(s.substr(comma + 1)));
}

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (item.empty() || used != item.size()) throw ValidationError("not an integer: '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw ValidationError("empty integer list");
  return out;
}

std::string with_extension(const std::string& path, const std::string& ext) {
  return std::filesystem::path(path).replace_extension(ext).string();
}

void commit(const std::vector<Artifact>& artifacts, std::ostream& out) {
  namespace fs = std::filesystem;
  std::vector<std::string> temps;
  auto cleanup = [&] {
    std::error_code ec;
    for (const auto& t : temps) fs::remove(t, ec);
  };
  for (const auto& a : artifacts) {
    if (a.path.empty()) continue;
    std::string tmp = a.path + ".partial";
    temps.push_back(tmp);
    std::ofstream f(tmp, std::ios::binary);
    f << a.text;
    f.close();
    if (!f) {
      cleanup();
      throw ValidationError("cannot write " + a.path);
    }
  }
  std::size_t k = 0;
  for (const auto& a : artifacts) {
    if (a.path.empty()) {
      out << a.text;
      continue;
    }
    std::error_code ec;
    fs::rename(temps[k++], a.path, ec);
    if (ec) {
      cleanup();
      throw ValidationError("cannot write " + a.path + ": " + ec.message());
    }
  }
}

}  // namespace loggas::cli
