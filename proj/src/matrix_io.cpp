// Copyright 2026 The QRSI Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <array>
#include <bit>
#include <charconv>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include "qrsi/error.hpp"
#include "qrsi/hamiltonians.hpp"

namespace qrsi {

namespace {

constexpr std::array<char, 8> kMagic = {'Q', 'R', 'S', 'I', 'M', 'A', 'T', '1'};

void put_u64(std::ostream& out, std::uint64_t value) {
  std::array<char, 8> bytes{};
  for (int i = 0; i < 8; ++i) bytes[static_cast<std::size_t>(i)] = static_cast<char>((value >> (8 * i)) & 0xff);
  out.write(bytes.data(), bytes.size());
}

std::uint64_t get_u64(std::istream& in) {
  std::array<unsigned char, 8> bytes{};
  in.read(reinterpret_cast<char*>(bytes.data()), bytes.size());
  if (!in) throw ValidationError("matrix file truncated");
  std::uint64_t value = 0;
  for (int i = 7; i >= 0; --i) value = (value << 8) | bytes[static_cast<std::size_t>(i)];
  return value;
}

double parse_double(const std::string& text) {
  double value = 0.0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  while (first < last && *first == ' ') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) throw ValidationError("bad number in matrix CSV: '" + text + "'");
  return value;
}

}  // namespace

void write_matrix(const std::filesystem::path& path, const ComplexMatrix& m, MatrixFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  if (format == MatrixFormat::binary) {
    out.write(kMagic.data(), kMagic.size());
    put_u64(out, static_cast<std::uint64_t>(m.rows()));
    put_u64(out, static_cast<std::uint64_t>(m.cols()));
    for (Index i = 0; i < m.rows(); ++i) {
      for (Index j = 0; j < m.cols(); ++j) {
        put_u64(out, std::bit_cast<std::uint64_t>(m(i, j).real()));
        put_u64(out, std::bit_cast<std::uint64_t>(m(i, j).imag()));
      }
    }
  } else {
    out << m.rows() << ',' << m.cols() << '\n';
    char buffer[64];
    for (Index i = 0; i < m.rows(); ++i) {
      for (Index j = 0; j < m.cols(); ++j) {
        std::snprintf(buffer, sizeof buffer, "%.17g,%.17g\n", m(i, j).real(), m(i, j).imag());
        out << buffer;
      }
    }
  }
  if (!out) throw Error("failed writing " + path.string());
}

ComplexMatrix read_matrix(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::array<char, 8> head{};
  in.read(head.data(), head.size());
  if (in && head == kMagic) {
    const auto rows = static_cast<Index>(get_u64(in));
    const auto cols = static_cast<Index>(get_u64(in));
    ComplexMatrix m(rows, cols);
    for (Index i = 0; i < rows; ++i) {
      for (Index j = 0; j < cols; ++j) {
        const double re = std::bit_cast<double>(get_u64(in));
        const double im = std::bit_cast<double>(get_u64(in));
        m(i, j) = {re, im};
      }
    }
    return m;
  }

  in.clear();
  in.seekg(0);
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("empty matrix file " + path.string());
  const auto comma = line.find(',');
  if (comma == std::string::npos) throw ValidationError("matrix CSV header must be 'rows,cols'");
  const auto rows = static_cast<Index>(parse_double(line.substr(0, comma)));
  const auto cols = static_cast<Index>(parse_double(line.substr(comma + 1)));
  ComplexMatrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) {
      if (!std::getline(in, line)) throw ValidationError("matrix CSV truncated");
      const auto sep = line.find(',');
      if (sep == std::string::npos) throw ValidationError("matrix CSV entry must be 're,im'");
      m(i, j) = {parse_double(line.substr(0, sep)), parse_double(line.substr(sep + 1))};
    }
  }
  return m;
}

}  // namespace qrsi
