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

// Reference implementations used as test oracles. These deliberately share
// no code with the library: a dense symmetric coupling matrix, plain loops
// and lexicographic enumeration.

#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "ising/ising_model.hpp"

namespace oracle {

struct Dense {
  std::vector<double> theta;
  std::vector<std::vector<double>> gamma;  // symmetric, zero diagonal
};

inline Dense dense_of(const ising::IsingProblem& p) {
  Dense d;
  d.theta.assign(p.biases().begin(), p.biases().end());
  d.gamma.assign(p.size(), std::vector<double>(p.size(), 0.0));
  const auto edges = p.topology().edges();
  for (std::size_t e = 0; e < edges.size(); ++e) {
    d.gamma[edges[e].i][edges[e].j] = p.couplings()[e];
    d.gamma[edges[e].j][edges[e].i] = p.couplings()[e];
  }
  return d;
}

// theta.z + (1/2) z^T Gamma z with the symmetric matrix, i.e. every pair once.
inline double energy(const Dense& d, const std::vector<int>& z) {
  double lin = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) lin += d.theta[i] * z[i];
  double quad = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    for (std::size_t j = 0; j < z.size(); ++j) quad += d.gamma[i][j] * z[i] * z[j];
  }
  return lin + 0.5 * quad;
}

struct Ground {
  double energy = std::numeric_limits<double>::infinity();
  std::vector<int> z;
};

// Walks configurations in lexicographic order (-1 before +1, spin 0 most
// significant); a later configuration replaces the incumbent only if it is
// lower by more than tol, so the first minimizer found wins ties.
inline Ground brute_force(const ising::IsingProblem& p, double tol = 1e-9) {
  const auto d = dense_of(p);
  const std::size_t n = p.size();
  Ground best;
  for (std::uint64_t m = 0; m < (std::uint64_t{1} << n); ++m) {
    std::vector<int> z(n);
    for (std::size_t i = 0; i < n; ++i) z[i] = (m >> (n - 1 - i)) & 1 ? 1 : -1;
    const double e = energy(d, z);
    if (e < best.energy - tol) best = {e, z};
  }
  return best;
}

inline std::vector<double> uniform(std::size_t count, double lo, double hi, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(count);
  for (auto& x : v) x = u(rng);
  return v;
}

inline ising::IsingProblem random_complete(std::size_t n, std::mt19937_64& rng) {
  auto topo = ising::complete_topology(n);
  auto theta = uniform(n, -1.0, 1.0, rng);
  auto gamma = uniform(topo.edge_count(), -1.0, 1.0, rng);
  return ising::IsingProblem(topo, std::move(theta), std::move(gamma));
}

inline std::vector<int> as_ints(const ising::SpinConfiguration& z) {
  return {z.spins().begin(), z.spins().end()};
}

}  // namespace oracle
