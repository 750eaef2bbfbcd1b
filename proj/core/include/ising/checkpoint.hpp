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

#include <filesystem>
#include <iosfwd>
#include <string>

#include "ising/ising_model.hpp"
#include "ising/model.hpp"
#include "ising/solver.hpp"

namespace ising {

// A trained model plus the backend it was trained with.
struct Checkpoint {
  ModelState state;
  std::string backend = "exact";
  BackendParams backend_params;
};

inline constexpr const char* kCheckpointFormat = "ising-learn/checkpoint/1";

// JSON document. Reals are written in shortest round-trip form, so
// save -> load reproduces every parameter bit for bit.
std::string checkpoint_to_string(const Checkpoint& checkpoint);
Checkpoint checkpoint_from_string(const std::string& text);
void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

// Flat text record of a problem:
//
//   n <spins>
//   biases <theta_0> ... <theta_{n-1}>
//   edges <count>
//   <i> <j> <Gamma_ij>      (one line per edge)
//
// Lines starting with '#' are comments.
void write_problem(const IsingProblem& problem, std::ostream& out);
IsingProblem read_problem(std::istream& in);

}  // namespace ising
