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

#include "ising/model.hpp"

#include <cmath>
#include <string>

#include "ising/errors.hpp"

namespace ising {

PreprocessSpec PreprocessSpec::offset(std::vector<double> step, std::size_t replicas) {
  PreprocessSpec spec;
  spec.kind = PreprocessKind::offset;
  spec.offset_step = std::move(step);
  spec.replicas = replicas;
  return spec;
}

void PreprocessSpec::validate(std::size_t input_dim) const {
  if (input_dim == 0) throw Error("input dimension must be positive");
  if (kind == PreprocessKind::identity) {
    if (replicas != 1 || !offset_step.empty()) {
      throw Error("identity preprocessing takes no offset step and exactly one replica");
    }
    return;
  }
  if (replicas < 1) throw Error("offset preprocessing needs at least one replica");
  if (offset_step.size() != input_dim) {
    throw DimensionError("offset step", input_dim, offset_step.size());
  }
  for (double d : offset_step) {
    if (!std::isfinite(d)) throw Error("offset step must be finite");
  }
}

std::vector<double> preprocess(const PreprocessSpec& spec, std::span<const double> theta) {
  if (spec.kind == PreprocessKind::identity) return {theta.begin(), theta.end()};
  const std::size_t n = spec.offset_step.size();
  if (theta.size() != n) throw DimensionError("input vector", n, theta.size());
  std::vector<double> out;
  out.reserve(spec.replicas * n);
  for (std::size_t m = 0; m < spec.replicas; ++m) {
    for (std::size_t i = 0; i < n; ++i) {
      out.push_back(theta[i] + static_cast<double>(m) * spec.offset_step[i]);
    }
  }
  return out;
}

ModelState ModelState::zero_initialized(std::size_t input_dim, PreprocessSpec preprocessing,
                                        double lambda, double epsilon) {
  preprocessing.validate(input_dim);
  ModelState state;
  state.input_dim = input_dim;
  state.topology = complete_topology(preprocessing.total_size(input_dim));
  state.preprocessing = std::move(preprocessing);
  state.couplings.assign(state.topology.edge_count(), 0.0);
  state.lambda = lambda;
  state.epsilon = epsilon;
  return state;
}

void ModelState::validate() const {
  preprocessing.validate(input_dim);
  const auto n_total = preprocessing.total_size(input_dim);
  if (topology.size() != n_total) throw DimensionError("model topology", n_total, topology.size());
  if (couplings.size() != topology.edge_count()) {
    throw DimensionError("model couplings", topology.edge_count(), couplings.size());
  }
  if (!std::isfinite(lambda)) throw Error("lambda is not finite");
  if (!std::isfinite(epsilon)) throw Error("epsilon is not finite");
  for (std::size_t e = 0; e < couplings.size(); ++e) {
    if (!std::isfinite(couplings[e])) {
      throw Error("coupling " + std::to_string(e) + " is not finite");
    }
  }
}

IsingProblem ModelState::problem_for(std::span<const double> theta) const {
  if (theta.size() != input_dim) throw DimensionError("input vector", input_dim, theta.size());
  return IsingProblem(topology, preprocess(preprocessing, theta), couplings, bounds);
}

Prediction predict(const ModelState& state, std::span<const double> theta,
                   const IsingMachine& machine, std::uint64_t seed) {
  Prediction p;
  p.solve = machine.solve(state.problem_for(theta), seed);
  p.value = model_output(state, p.solve.energy);
  return p;
}

}  // namespace ising
