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

#include "ising/ising_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ising/errors.hpp"

namespace ising {

Topology::Topology(std::size_t n, std::vector<Edge> edges) {
  if (n == 0) throw Error("topology needs at least one spin");
  for (auto& e : edges) {
    if (e.i == e.j) throw Error("self-loop on spin " + std::to_string(e.i));
    if (e.i >= n || e.j >= n) {
      throw Error("edge (" + std::to_string(e.i) + "," + std::to_string(e.j) +
                  ") out of range for " + std::to_string(n) + " spins");
    }
    if (e.i > e.j) std::swap(e.i, e.j);
  }
  {
    std::vector<Edge> sorted = edges;
    std::sort(sorted.begin(), sorted.end());
    auto dup = std::adjacent_find(sorted.begin(), sorted.end());
    if (dup != sorted.end()) {
      throw Error("edge (" + std::to_string(dup->i) + "," + std::to_string(dup->j) +
                  ") listed twice");
    }
  }

  auto impl = std::make_shared<Impl>();
  impl->n = n;
  impl->edges = std::move(edges);

  std::vector<std::size_t> degree(n, 0);
  for (const auto& e : impl->edges) {
    ++degree[e.i];
    ++degree[e.j];
  }
  impl->offsets.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) impl->offsets[i + 1] = impl->offsets[i] + degree[i];
  impl->neighbors.resize(impl->offsets[n]);
  std::vector<std::size_t> fill(impl->offsets.begin(), impl->offsets.end() - 1);
  for (std::size_t e = 0; e < impl->edges.size(); ++e) {
    const auto& edge = impl->edges[e];
    impl->neighbors[fill[edge.i]++] = {edge.j, e};
    impl->neighbors[fill[edge.j]++] = {edge.i, e};
  }
  impl_ = std::move(impl);
}

std::optional<std::size_t> Topology::find(std::size_t i, std::size_t j) const {
  if (i >= size() || j >= size()) return std::nullopt;
  const auto begin = impl_->offsets[i];
  const auto end = impl_->offsets[i + 1];
  for (auto k = begin; k < end; ++k) {
    if (impl_->neighbors[k].spin == j) return impl_->neighbors[k].edge;
  }
  return std::nullopt;
}

Topology complete_topology(std::size_t n) {
  if (n == 0) throw Error("complete topology needs at least one spin");
  std::vector<Edge> edges;
  edges.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) edges.push_back({i, j});
  }
  return Topology(n, std::move(edges));
}

SpinConfiguration::SpinConfiguration(std::size_t n, Spin value) : spins_(n, value) {
  if (value != 1 && value != -1) throw Error("spin values must be -1 or +1");
}

SpinConfiguration::SpinConfiguration(std::vector<Spin> spins) : spins_(std::move(spins)) {
  for (std::size_t i = 0; i < spins_.size(); ++i) {
    if (spins_[i] != 1 && spins_[i] != -1) {
      throw Error("spin " + std::to_string(i) + " has value " + std::to_string(spins_[i]) +
                  ", expected -1 or +1");
    }
  }
}

IsingProblem::IsingProblem(Topology topology, std::vector<double> biases,
                           std::vector<double> couplings, const ParameterBounds& bounds)
    : topology_(std::move(topology)), biases_(std::move(biases)), couplings_(std::move(couplings)) {
  if (biases_.size() != topology_.size()) {
    throw DimensionError("bias vector", topology_.size(), biases_.size());
  }
  if (couplings_.size() != topology_.edge_count()) {
    throw DimensionError("coupling vector", topology_.edge_count(), couplings_.size());
  }
  for (std::size_t i = 0; i < biases_.size(); ++i) {
    if (!std::isfinite(biases_[i])) throw Error("bias " + std::to_string(i) + " is not finite");
  }
  for (std::size_t e = 0; e < couplings_.size(); ++e) {
    if (!std::isfinite(couplings_[e])) {
      throw Error("coupling " + std::to_string(e) + " is not finite");
    }
  }
  if (bounds.biases.bounded()) {
    for (auto& b : biases_) b = bounds.biases.clamp(b);
  }
  if (bounds.couplings.bounded()) {
    for (auto& g : couplings_) g = bounds.couplings.clamp(g);
  }
}

double IsingProblem::max_abs_bias() const noexcept {
  double m = 0.0;
  for (double b : biases_) m = std::max(m, std::abs(b));
  return m;
}

double IsingProblem::max_abs_coupling() const noexcept {
  double m = 0.0;
  for (double g : couplings_) m = std::max(m, std::abs(g));
  return m;
}

bool IsingProblem::has_zero_couplings() const noexcept {
  return std::all_of(couplings_.begin(), couplings_.end(), [](double g) { return g == 0.0; });
}

double energy(const IsingProblem& problem, const SpinConfiguration& z) {
  if (z.size() != problem.size()) {
    throw DimensionError("spin configuration", problem.size(), z.size());
  }
  const auto biases = problem.biases();
  const auto couplings = problem.couplings();
  const auto edges = problem.topology().edges();
  double e = 0.0;
  for (std::size_t i = 0; i < biases.size(); ++i) e += biases[i] * z[i];
  for (std::size_t k = 0; k < edges.size(); ++k) {
    e += couplings[k] * (z[edges[k].i] * z[edges[k].j]);
  }
  return e;
}

SpinConfiguration zero_coupling_ground_state(std::span<const double> biases) {
  std::vector<Spin> spins(biases.size());
  for (std::size_t i = 0; i < biases.size(); ++i) spins[i] = biases[i] > 0.0 ? -1 : 1;
  return SpinConfiguration(std::move(spins));
}

double zero_coupling_ground_energy(std::span<const double> biases) {
  double e = 0.0;
  for (double b : biases) e += -std::abs(b);
  return e;
}

}  // namespace ising
