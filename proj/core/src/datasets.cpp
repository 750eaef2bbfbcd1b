// Copyright 2026 The ising-learn Authors
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

#include "ising/datasets.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <set>
#include <sstream>

#include "ising/errors.hpp"
#include "ising/text.hpp"

namespace ising {

Dataset::Dataset(std::size_t input_dim) : input_dim_(input_dim) {
  if (input_dim == 0) throw Error("dataset input dimension must be positive");
}

void Dataset::add(std::span<const double> theta, double target, std::optional<BasLabel> label) {
  if (theta.size() != input_dim_) throw DimensionError("dataset row", input_dim_, theta.size());
  if (label && labels_.size() != targets_.size()) {
    throw Error("cannot mix labelled and unlabelled samples");
  }
  if (!label && !labels_.empty()) throw Error("cannot mix labelled and unlabelled samples");
  inputs_.insert(inputs_.end(), theta.begin(), theta.end());
  targets_.push_back(target);
  if (label) labels_.push_back(*label);
}

Dataset Dataset::repeated(std::size_t times) const {
  Dataset out(input_dim_);
  for (std::size_t t = 0; t < times; ++t) {
    out.inputs_.insert(out.inputs_.end(), inputs_.begin(), inputs_.end());
    out.targets_.insert(out.targets_.end(), targets_.begin(), targets_.end());
    out.labels_.insert(out.labels_.end(), labels_.begin(), labels_.end());
  }
  return out;
}

Dataset gen_random(std::size_t n, std::size_t samples, double lo, double hi, std::uint64_t seed) {
  if (!(lo < hi)) throw ConfigError("random dataset range needs lo < hi");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(lo, hi);
  Dataset data(n);
  std::vector<double> row(n);
  for (std::size_t a = 0; a < samples; ++a) {
    for (auto& v : row) v = uniform(rng);
    data.add(row, uniform(rng));
  }
  return data;
}

double target_function(TargetFunction f, double x) {
  switch (f) {
    case TargetFunction::lin:
      return 2.0 * x - 6.0;
    case TargetFunction::quad:
      return 1.2 * (x - 0.5) * (x - 0.5) - 2.0;
  }
  return 0.0;
}

Dataset gen_function(TargetFunction f, std::size_t samples, std::uint64_t seed, bool grid) {
  if (samples == 0) throw ConfigError("function dataset needs at least one sample");
  Dataset data(1);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  for (std::size_t a = 0; a < samples; ++a) {
    double x = 0.0;
    if (grid) {
      x = samples == 1 ? 0.0 : static_cast<double>(a) / static_cast<double>(samples - 1);
    } else {
      x = uniform(rng);
    }
    const double theta[] = {x};
    data.add(theta, target_function(f, x));
  }
  return data;
}

std::string BasMatrix::to_grid() const {
  std::string out;
  out.reserve(k * (k + 1));
  for (std::size_t r = 0; r < k; ++r) {
    for (std::size_t c = 0; c < k; ++c) out.push_back(at(r, c) ? '1' : '0');
    out.push_back('\n');
  }
  return out;
}

namespace {

bool rows_constant(const BasMatrix& m) {
  for (std::size_t r = 0; r < m.k; ++r) {
    for (std::size_t c = 1; c < m.k; ++c) {
      if (m.at(r, c) != m.at(r, 0)) return false;
    }
  }
  return true;
}

bool columns_constant(const BasMatrix& m) {
  for (std::size_t c = 0; c < m.k; ++c) {
    for (std::size_t r = 1; r < m.k; ++r) {
      if (m.at(r, c) != m.at(0, c)) return false;
    }
  }
  return true;
}

// Whether `label` means constant rows under the chosen orientation.
bool label_uses_rows(BasLabel label, const BasOptions& options) {
  return (label == BasLabel::stripes) != options.swap_orientation;
}

}  // namespace

bool is_valid_bas(const BasMatrix& m, const BasOptions& options) {
  if (m.k < 2 || m.cells.size() != m.k * m.k) return false;
  const bool uniform = std::all_of(m.cells.begin(), m.cells.end(),
                                   [&](std::uint8_t v) { return v == m.cells.front(); });
  if (uniform) return false;
  return label_uses_rows(m.label, options) ? rows_constant(m) : columns_constant(m);
}

BasSample gen_bas(std::size_t k, std::size_t samples, std::uint64_t seed,
                  const BasOptions& options) {
  if (k < 2) throw ConfigError("bars-and-stripes needs k >= 2");
  if (k > 62) throw ConfigError("bars-and-stripes supports k <= 62");
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(0.5);
  // Non-constant line patterns are the integers 1 .. 2^k - 2.
  std::uniform_int_distribution<std::uint64_t> pattern_dist(1, (std::uint64_t{1} << k) - 2);

  BasSample out{Dataset(k * k), {}};
  out.matrices.reserve(samples);
  for (std::size_t a = 0; a < samples; ++a) {
    BasMatrix m;
    m.k = k;
    m.label = coin(rng) ? BasLabel::stripes : BasLabel::bars;
    const auto pattern = pattern_dist(rng);
    const bool rows = label_uses_rows(m.label, options);
    m.cells.resize(k * k);
    for (std::size_t r = 0; r < k; ++r) {
      for (std::size_t c = 0; c < k; ++c) {
        const auto line = rows ? r : c;
        m.cells[r * k + c] = static_cast<std::uint8_t>((pattern >> line) & 1U);
      }
    }
    out.data.add(bas_inputs(m, options), bas_encode(m.label), m.label);
    out.matrices.push_back(std::move(m));
  }
  return out;
}

std::vector<double> bas_inputs(const BasMatrix& m, const BasOptions& options) {
  std::vector<double> theta(m.cells.size());
  for (std::size_t i = 0; i < m.cells.size(); ++i) {
    theta[i] = options.signed_inputs ? (m.cells[i] ? 1.0 : -1.0) : (m.cells[i] ? 1.0 : 0.0);
  }
  return theta;
}

BasMatrix parse_bas_grid(std::istream& in) {
  BasMatrix m;
  std::string line;
  std::size_t lineno = 0;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::size_t width = 0;
    for (char ch : line) {
      if (ch == '0' || ch == '1') {
        m.cells.push_back(static_cast<std::uint8_t>(ch - '0'));
        ++width;
      } else if (ch != ' ' && ch != '\t' && ch != '\r' && ch != ',') {
        throw ParseError(std::string("unexpected character '") + ch + "' in matrix grid", lineno);
      }
    }
    if (width == 0) continue;
    if (m.k == 0) m.k = width;
    if (width != m.k) throw ParseError("ragged matrix row", lineno);
    ++rows;
  }
  if (m.k == 0) throw ParseError("empty matrix grid");
  if (rows != m.k) throw ParseError("matrix grid is not square");
  m.label = rows_constant(m) ? BasLabel::stripes : BasLabel::bars;
  return m;
}

double bas_encode(BasLabel label) {
  return label == BasLabel::bars ? kBarsTarget : kStripesTarget;
}

BasLabel bas_decode(double output) {
  return output <= kBasThreshold ? BasLabel::bars : BasLabel::stripes;
}

const char* to_string(BasLabel label) { return label == BasLabel::bars ? "bars" : "stripes"; }

double bas_accuracy(std::span<const double> outputs, std::span<const double> targets) {
  if (outputs.size() != targets.size()) {
    throw DimensionError("accuracy outputs", targets.size(), outputs.size());
  }
  if (outputs.empty()) throw Error("accuracy of an empty set");
  std::size_t hits = 0;
  for (std::size_t a = 0; a < outputs.size(); ++a) {
    if (bas_decode(outputs[a]) == bas_decode(targets[a])) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(outputs.size());
}

std::size_t count_overlap(const Dataset& a, const Dataset& b) {
  if (a.input_dim() != b.input_dim()) return 0;
  std::set<std::vector<double>> rows;
  for (std::size_t s = 0; s < b.size(); ++s) {
    std::vector<double> row(b.input(s).begin(), b.input(s).end());
    row.push_back(b.target(s));
    rows.insert(std::move(row));
  }
  std::size_t count = 0;
  for (std::size_t s = 0; s < a.size(); ++s) {
    std::vector<double> row(a.input(s).begin(), a.input(s).end());
    row.push_back(a.target(s));
    if (rows.count(row)) ++count;
  }
  return count;
}

void save_csv(const Dataset& data, std::ostream& out) {
  for (std::size_t i = 0; i < data.input_dim(); ++i) out << "theta_" << i << ',';
  out << "y\n";
  for (std::size_t a = 0; a < data.size(); ++a) {
    for (double v : data.input(a)) out << format_double(v) << ',';
    out << format_double(data.target(a)) << '\n';
  }
}

void save_csv(const Dataset& data, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  save_csv(data, out);
  if (!out) throw Error("failed writing " + path.string());
}

Dataset load_csv(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++lineno;
    if (!trim(line).empty()) {
      header = split(trim(line), ',');
      break;
    }
  }
  if (header.empty()) throw ParseError("no samples: file is empty");
  if (header.size() < 2 || trim(header.back()) != "y") {
    throw ParseError("header must be theta_0,...,theta_{n-1},y", lineno);
  }
  const std::size_t n = header.size() - 1;
  for (std::size_t i = 0; i < n; ++i) {
    if (trim(header[i]) != "theta_" + std::to_string(i)) {
      throw ParseError("header column " + std::to_string(i) + " should be theta_" +
                           std::to_string(i),
                       lineno);
    }
  }

  Dataset data(n);
  std::vector<double> row(n);
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto cells = split(trim(line), ',');
    if (cells.size() != n + 1) {
      throw ParseError("expected " + std::to_string(n + 1) + " cells, found " +
                           std::to_string(cells.size()),
                       lineno);
    }
    double y = 0.0;
    for (std::size_t i = 0; i <= n; ++i) {
      double v = 0.0;
      if (!parse_double(cells[i], v) || !std::isfinite(v)) {
        throw ParseError("non-numeric cell '" + cells[i] + "' in column " + std::to_string(i),
                         lineno);
      }
      if (i < n) {
        row[i] = v;
      } else {
        y = v;
      }
    }
    data.add(row, y);
  }
  if (data.empty()) throw ParseError("no samples: file has a header but no rows");
  return data;
}

Dataset load_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  return load_csv(in);
}

}  // namespace ising
