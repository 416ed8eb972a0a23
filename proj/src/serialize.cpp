// Copyright 2026 The RAGE Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "rage/serialize.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

namespace rage {

ParseError::ParseError(int line, const std::string& what)
    : std::runtime_error("line " + std::to_string(line) + ": " + what),
      line_(line) {}

UnsupportedVersionError::UnsupportedVersionError(const std::string& header)
    : std::runtime_error("unsupported state file version: '" + header + "'") {}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  // Next non-empty line split into tokens; false at end of input.
  bool next(std::vector<std::string>& tokens) {
    std::string text;
    while (std::getline(in_, text)) {
      ++line_;
      std::istringstream ls(text);
      tokens.clear();
      for (std::string t; ls >> t;) tokens.push_back(t);
      if (!tokens.empty()) return true;
    }
    return false;
  }

  void expect(std::vector<std::string>& tokens, const std::string& context) {
    if (!next(tokens)) throw ParseError(line_ + 1, context + ": unexpected end of file");
  }

  int line() const { return line_; }

 private:
  std::istream& in_;
  int line_ = 0;
};

double parse_number(const std::string& token, int line,
                    const std::string& context) {
  double v = 0.0;
  const char* end = token.data() + token.size();
  const auto res = std::from_chars(token.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end) {
    throw ParseError(line, context + ": invalid number '" + token + "'");
  }
  return v;
}

int parse_int(const std::string& token, int line, const std::string& context) {
  int v = 0;
  const char* end = token.data() + token.size();
  const auto res = std::from_chars(token.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end) {
    throw ParseError(line, context + ": invalid integer '" + token + "'");
  }
  return v;
}

std::vector<Complex> parse_pairs(const std::vector<std::string>& tokens,
                                 std::size_t count, int line,
                                 const std::string& context) {
  if (tokens.size() != 2 * count) {
    throw ParseError(line, context + ": expected " + std::to_string(count) +
                               " re/im pairs, found " +
                               std::to_string(tokens.size()) + " numbers");
  }
  std::vector<Complex> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    out[i] = Complex(parse_number(tokens[2 * i], line, context),
                     parse_number(tokens[2 * i + 1], line, context));
  }
  return out;
}

}  // namespace

void write_state(std::ostream& out, const RageState& state) {
  const MpsTensorSet& mps = state.mps();
  const int n = mps.n_sites();
  out << "RAGE1 " << n << ' ' << mps.bond_dim() << ' '
      << to_string(mps.boundary()) << '\n';
  for (int k = 0; k < n; ++k) {
    for (int s = 0; s < 2; ++s) {
      out << "A " << k + 1 << ' ' << s << '\n';
      const Mat& a = mps.tensor(k, s);
      for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
          if (j > 0) out << ' ';
          out << format_double(a(i, j).real()) << ' '
              << format_double(a(i, j).imag());
        }
        out << '\n';
      }
    }
  }
  out << "PHI\n";
  for (int j = 0; j + 1 < n; ++j) {
    for (int k = j + 1; k < n; ++k) {
      if (k > j + 1) out << ' ';
      out << format_double(state.phi()(j, k));
    }
    out << '\n';
  }
  out << "V\n";
  for (int k = 0; k < n; ++k) {
    const Mat2& v = state.rotation(k);
    for (int r = 0; r < 2; ++r) {
      for (int c = 0; c < 2; ++c) {
        if (r + c > 0) out << ' ';
        out << format_double(v(r, c).real()) << ' '
            << format_double(v(r, c).imag());
      }
    }
    out << '\n';
  }
}

RageState read_state(std::istream& in) {
  LineReader reader(in);
  std::vector<std::string> tok;
  if (!reader.next(tok)) throw ParseError(1, "empty state file");
  if (tok[0] != "RAGE1") {
    std::string header;
    for (const auto& t : tok) header += (header.empty() ? "" : " ") + t;
    throw UnsupportedVersionError(header);
  }
  if (tok.size() != 4) throw ParseError(reader.line(), "malformed header");
  const int n = parse_int(tok[1], reader.line(), "header");
  const int d = parse_int(tok[2], reader.line(), "header");
  if (n < 1 || d < 1) throw ParseError(reader.line(), "header: N and D must be positive");
  Boundary boundary;
  try {
    boundary = boundary_from_string(tok[3]);
  } catch (const std::exception& e) {
    throw ParseError(reader.line(), e.what());
  }

  MpsTensorSet mps(n, d, boundary);
  for (int k = 0; k < n; ++k) {
    for (int s = 0; s < 2; ++s) {
      const std::string context = "site " + std::to_string(k + 1);
      reader.expect(tok, context);
      if (tok.size() != 3 || tok[0] != "A" ||
          parse_int(tok[1], reader.line(), context) != k + 1 ||
          parse_int(tok[2], reader.line(), context) != s) {
        throw ParseError(reader.line(),
                         context + ": expected tensor header 'A " +
                             std::to_string(k + 1) + ' ' + std::to_string(s) +
                             "'");
      }
      Mat a(mps.left_dim(k), mps.right_dim(k));
      for (Eigen::Index i = 0; i < a.rows(); ++i) {
        reader.expect(tok, context);
        const auto row = parse_pairs(tok, a.cols(), reader.line(), context);
        for (Eigen::Index j = 0; j < a.cols(); ++j) a(i, j) = row[j];
      }
      mps.set_tensor(k, s, std::move(a));
    }
  }

  reader.expect(tok, "phases");
  if (tok.size() != 1 || tok[0] != "PHI") {
    throw ParseError(reader.line(), "expected 'PHI'");
  }
  AdjacencyPhaseMatrix phi(n);
  for (int j = 0; j + 1 < n; ++j) {
    const std::string context = "phase row " + std::to_string(j + 1);
    reader.expect(tok, context);
    if (static_cast<int>(tok.size()) != n - j - 1) {
      throw ParseError(reader.line(), context + ": expected " +
                                          std::to_string(n - j - 1) +
                                          " entries");
    }
    for (int k = j + 1; k < n; ++k) {
      const double v = parse_number(tok[k - j - 1], reader.line(), context);
      if (!(v >= 0.0 && v < kTwoPi)) {
        throw ParseError(reader.line(), context + ": phase outside [0, 2pi)");
      }
      phi.set(j, k, v);
    }
  }

  reader.expect(tok, "rotations");
  if (tok.size() != 1 || tok[0] != "V") {
    throw ParseError(reader.line(), "expected 'V'");
  }
  std::vector<Mat2> rotations(n);
  for (int k = 0; k < n; ++k) {
    const std::string context = "rotation " + std::to_string(k + 1);
    reader.expect(tok, context);
    const auto entries = parse_pairs(tok, 4, reader.line(), context);
    rotations[k] << entries[0], entries[1], entries[2], entries[3];
  }
  if (reader.next(tok)) throw ParseError(reader.line(), "trailing content");
  try {
    return RageState(std::move(mps), std::move(phi), std::move(rotations));
  } catch (const std::invalid_argument& e) {
    throw ParseError(reader.line(), e.what());
  }
}

void serialize_state(const RageState& state,
                     const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_state(out, state);
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

RageState deserialize_state(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  return read_state(in);
}

}  // namespace rage
