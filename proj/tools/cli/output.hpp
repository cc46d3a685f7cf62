#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "loggas/mpnum.hpp"

namespace loggas::cli {

using Json = nlohmann::ordered_json;

// Scientific notation with `digits` significant digits.
std::string sci(const Real& r, int digits);
std::string sci(double d, int digits);

// max(17, bits/8)
int digits_for(int bits);

// JSON numbers travel as tagged strings until render_json() splices the text in
// unquoted, so they keep every requested digit.
class NumberWriter {
 public:
  explicit NumberWriter(int bits) : digits_(digits_for(bits)) {}
  int digits() const { return digits_; }

  Json num(const Real& r) const;
  Json num(double d) const;
  Json num(const Complex& z) const;  // {"re":…, "im":…}
  Json num(cd z) const;

  std::string csv(const Real& r) const { return sci(r, digits_); }
  std::string csv(double d) const { return sci(d, digits_); }

 private:
  int digits_;
};

std::string render_json(const Json& j);

// "re,im" or "re" parsed at the current working precision.
Complex parse_complex(const std::string& s);
// Comma-separated positive integers.
std::vector<int> parse_int_list(const std::string& s);

// An output produced by one command. Artifacts are rendered completely before any
// file is touched; files are written to a sibling temporary and renamed.
struct Artifact {
  std::string path;  // empty: standard output
  std::string text;
};

void commit(const std::vector<Artifact>& artifacts, std::ostream& out);

// path with its extension replaced (or appended)
std::string with_extension(const std::string& path, const std::string& ext);

}  // namespace loggas::cli
