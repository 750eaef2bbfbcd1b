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

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ising {

enum class BasLabel { bars, stripes };

// Ordered (input, target) pairs of a fixed input width.
class Dataset {
 public:
  explicit Dataset(std::size_t input_dim);

  // Throws DimensionError if theta has the wrong width.
  void add(std::span<const double> theta, double target, std::optional<BasLabel> label = {});

  std::size_t size() const noexcept { return targets_.size(); }
  bool empty() const noexcept { return targets_.empty(); }
  std::size_t input_dim() const noexcept { return input_dim_; }

  std::span<const double> input(std::size_t a) const {
    return {inputs_.data() + a * input_dim_, input_dim_};
  }
  double target(std::size_t a) const { return targets_[a]; }
  std::span<const double> targets() const noexcept { return targets_; }

  // Present only when every sample was added with a label.
  bool has_labels() const noexcept { return !labels_.empty() && labels_.size() == size(); }
  BasLabel label(std::size_t a) const { return labels_.at(a); }

  // Every sample repeated `times` times, in block order (D, D, ...).
  Dataset repeated(std::size_t times) const;

  friend bool operator==(const Dataset&, const Dataset&) = default;

 private:
  std::size_t input_dim_;
  std::vector<double> inputs_;
  std::vector<double> targets_;
  std::vector<BasLabel> labels_;
};

// Inputs and targets i.i.d. uniform on [lo, hi].
Dataset gen_random(std::size_t n, std::size_t samples, double lo, double hi, std::uint64_t seed);

enum class TargetFunction { lin, quad };

// 2x - 6 and 1.2 (x - 0.5)^2 - 2.
double target_function(TargetFunction f, double x);

// One-dimensional dataset on [0, 1]. With `grid` the x values are the
// evenly spaced points linspace(0, 1, samples) and `seed` is unused;
// otherwise they are uniform draws.
Dataset gen_function(TargetFunction f, std::size_t samples, std::uint64_t seed, bool grid = true);

// Square binary matrix whose rows (stripes) or columns (bars) are constant.
struct BasMatrix {
  std::size_t k = 0;
  std::vector<std::uint8_t> cells;  // row-major, 0/1
  BasLabel label = BasLabel::bars;

  std::uint8_t at(std::size_t row, std::size_t col) const { return cells[row * k + col]; }
  // 0/1 characters, one line per row.
  std::string to_grid() const;
};

struct BasOptions {
  // Default: stripes = constant rows, bars = constant columns.
  bool swap_orientation = false;
  // Map cells to {-1,+1} biases instead of {0,1}.
  bool signed_inputs = false;
};

// True when every row (stripes) or every column (bars) is constant, per the
// orientation in `options`, and the matrix is not uniform.
bool is_valid_bas(const BasMatrix& m, const BasOptions& options = {});

struct BasSample {
  Dataset data;
  std::vector<BasMatrix> matrices;
};

// N matrices with a fair-coin label and a line pattern drawn uniformly from
// the 2^k - 2 non-constant patterns. Duplicates are kept. Throws for k < 2.
BasSample gen_bas(std::size_t k, std::size_t samples, std::uint64_t seed,
                  const BasOptions& options = {});

// Flattened row-wise biases for a matrix.
std::vector<double> bas_inputs(const BasMatrix& m, const BasOptions& options = {});

// Parses a 0/1 character grid (one row per line, blanks ignored).
BasMatrix parse_bas_grid(std::istream& in);

inline constexpr double kBarsTarget = 0.0;
inline constexpr double kStripesTarget = 10.0;
inline constexpr double kBasThreshold = 5.0;

double bas_encode(BasLabel label);
// F <= 5 -> bars, F > 5 -> stripes.
BasLabel bas_decode(double output);
const char* to_string(BasLabel label);

// Fraction of outputs whose decoded label matches the decoded target.
double bas_accuracy(std::span<const double> outputs, std::span<const double> targets);

// Number of rows of `a` that also occur in `b` (same inputs and target).
std::size_t count_overlap(const Dataset& a, const Dataset& b);

// CSV with header theta_0,...,theta_{n-1},y. Values are written in shortest
// round-trip form.
void save_csv(const Dataset& data, std::ostream& out);
void save_csv(const Dataset& data, const std::filesystem::path& path);
// Throws ParseError naming the line for ragged rows, bad cells, a bad
// header or an empty file.
Dataset load_csv(std::istream& in);
Dataset load_csv(const std::filesystem::path& path);

}  // namespace ising
