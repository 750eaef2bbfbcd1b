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
#include <span>
#include <vector>

#include "ising/ising_model.hpp"
#include "ising/solver.hpp"

namespace ising {

enum class PreprocessKind { identity, offset };

// Maps an n-dimensional input onto n_total spins. The offset map stacks
// shifted copies (theta, theta + d, ..., theta + (l-1) d) so n_total = l n.
struct PreprocessSpec {
  PreprocessKind kind = PreprocessKind::identity;
  std::vector<double> offset_step;  // d, one entry per input feature
  std::size_t replicas = 1;         // l

  static PreprocessSpec identity() { return {}; }
  static PreprocessSpec offset(std::vector<double> step, std::size_t replicas);

  // Throws unless the settings are consistent with `input_dim`.
  void validate(std::size_t input_dim) const;
  std::size_t total_size(std::size_t input_dim) const {
    return kind == PreprocessKind::identity ? input_dim : replicas * input_dim;
  }

  friend bool operator==(const PreprocessSpec&, const PreprocessSpec&) = default;
};

// Throws DimensionError when theta does not match the feature count of the offset step.
std::vector<double> preprocess(const PreprocessSpec& spec, std::span<const double> theta);

// Everything needed to evaluate F(theta) = lambda E0(h(theta), Gamma) + epsilon.
struct ModelState {
  std::size_t input_dim = 0;
  PreprocessSpec preprocessing;
  Topology topology = complete_topology(1);
  std::vector<double> couplings;  // one per topology edge
  double lambda = 1.0;
  double epsilon = 0.0;
  ParameterBounds bounds;

  // Complete topology over n_total spins with every coupling zero.
  static ModelState zero_initialized(std::size_t input_dim, PreprocessSpec preprocessing,
                                     double lambda, double epsilon);

  std::size_t total_spins() const noexcept { return topology.size(); }
  void validate() const;
  // A zero scale makes the output the constant epsilon.
  bool degenerate() const noexcept { return lambda == 0.0; }

  // Ising problem for input theta: preprocessed biases, current couplings.
  IsingProblem problem_for(std::span<const double> theta) const;

  friend bool operator==(const ModelState&, const ModelState&) = default;
};

struct Prediction {
  double value = 0.0;  // lambda * solve.energy + epsilon
  SolveResult solve;
};

// Solves the problem for `theta` on `machine` and applies the affine output.
Prediction predict(const ModelState& state, std::span<const double> theta,
                   const IsingMachine& machine, std::uint64_t seed);

inline double model_output(const ModelState& state, double ground_energy) {
  return state.lambda * ground_energy + state.epsilon;
}

}  // namespace ising
