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

#include <compare>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace ising {

// Unordered spin pair, stored with i < j.
struct Edge {
  std::size_t i = 0;
  std::size_t j = 0;

  auto operator<=>(const Edge&) const = default;
};

// Interaction graph over n spins. Immutable; copies share storage.
class Topology {
 public:
  // Throws ising::Error on n == 0, self-loops, out-of-range indices or
  // repeated pairs. (j, i) is canonicalized to (i, j).
  Topology(std::size_t n, std::vector<Edge> edges);

  std::size_t size() const noexcept { return impl_->n; }
  std::size_t edge_count() const noexcept { return impl_->edges.size(); }
  std::span<const Edge> edges() const noexcept { return impl_->edges; }
  const Edge& edge(std::size_t e) const { return impl_->edges[e]; }

  // Index of the edge joining i and j, if present.
  std::optional<std::size_t> find(std::size_t i, std::size_t j) const;

  // Compressed adjacency: for spin i, neighbors are
  // adjacency_index()[adjacency_offsets()[i] .. adjacency_offsets()[i+1]).
  struct Neighbor {
    std::size_t spin;
    std::size_t edge;
  };
  std::span<const std::size_t> adjacency_offsets() const noexcept { return impl_->offsets; }
  std::span<const Neighbor> adjacency() const noexcept { return impl_->neighbors; }

  bool is_complete() const noexcept { return edge_count() == size() * (size() - 1) / 2; }

  friend bool operator==(const Topology& a, const Topology& b) {
    return a.impl_ == b.impl_ || (a.size() == b.size() && a.impl_->edges == b.impl_->edges);
  }

 private:
  struct Impl {
    std::size_t n = 0;
    std::vector<Edge> edges;
    std::vector<std::size_t> offsets;
    std::vector<Neighbor> neighbors;
  };
  std::shared_ptr<const Impl> impl_;
};

// All n(n-1)/2 pairs in lexicographic order. Throws on n == 0.
Topology complete_topology(std::size_t n);

// Closed interval used to optionally bound parameter values. Unbounded by
// default.
struct Interval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();

  double clamp(double v) const noexcept { return v < lo ? lo : (v > hi ? hi : v); }
  bool bounded() const noexcept {
    return lo != -std::numeric_limits<double>::infinity() ||
           hi != std::numeric_limits<double>::infinity();
  }
  friend bool operator==(const Interval&, const Interval&) = default;
};

struct ParameterBounds {
  Interval biases;
  Interval couplings;

  friend bool operator==(const ParameterBounds&, const ParameterBounds&) = default;
};

using Spin = std::int8_t;

// Assignment of -1/+1 to every spin.
class SpinConfiguration {
 public:
  SpinConfiguration() = default;
  // All spins set to `value`.
  SpinConfiguration(std::size_t n, Spin value);
  // Throws if any entry is not -1 or +1.
  explicit SpinConfiguration(std::vector<Spin> spins);

  std::size_t size() const noexcept { return spins_.size(); }
  Spin operator[](std::size_t i) const { return spins_[i]; }
  void flip(std::size_t i) { spins_[i] = static_cast<Spin>(-spins_[i]); }
  std::span<const Spin> spins() const noexcept { return spins_; }

  // Lexicographic under -1 < +1, spin 0 most significant.
  friend auto operator<=>(const SpinConfiguration&, const SpinConfiguration&) = default;
  friend bool operator==(const SpinConfiguration&, const SpinConfiguration&) = default;

 private:
  std::vector<Spin> spins_;
};

// Biases on every spin and one coupling per topology edge.
class IsingProblem {
 public:
  // Values are clamped into `bounds` when given. Throws DimensionError on
  // length mismatch and ising::Error on non-finite values.
  IsingProblem(Topology topology, std::vector<double> biases, std::vector<double> couplings,
               const ParameterBounds& bounds = {});

  const Topology& topology() const noexcept { return topology_; }
  std::size_t size() const noexcept { return topology_.size(); }
  std::span<const double> biases() const noexcept { return biases_; }
  std::span<const double> couplings() const noexcept { return couplings_; }

  // Largest |bias| and |coupling|; 0 when empty.
  double max_abs_bias() const noexcept;
  double max_abs_coupling() const noexcept;
  bool has_zero_couplings() const noexcept;

 private:
  Topology topology_;
  std::vector<double> biases_;
  std::vector<double> couplings_;
};

// sum_i biases_i z_i + sum_{(i,j) in E} coupling_ij z_i z_j, biases first in
// index order, then edges in topology order. Throws DimensionError when
// z.size() != problem.size().
double energy(const IsingProblem& problem, const SpinConfiguration& z);

// Ground state when all couplings vanish: z_i = -sign(theta_i), with
// z_i = +1 at theta_i == 0.
SpinConfiguration zero_coupling_ground_state(std::span<const double> biases);

// -sum_i |theta_i|, the ground energy of an uncoupled problem.
double zero_coupling_ground_energy(std::span<const double> biases);

}  // namespace ising
