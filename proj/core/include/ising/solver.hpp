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

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ising/ising_model.hpp"

namespace ising {

struct SolveMetadata {
  std::string backend;
  std::uint64_t seed = 0;
  std::chrono::duration<double> wall_time{0.0};
};

// Output of an Ising machine: a (possibly approximate) ground state and its
// energy. `energy` is always energy(problem, configuration) recomputed
// exactly from the returned configuration.
struct SolveResult {
  SpinConfiguration configuration;
  double energy = 0.0;
  SolveMetadata metadata;
};

// String-valued backend parameters, as read from a config file or CLI.
using BackendParams = std::map<std::string, std::string>;

// Any map (biases, couplings) -> (z*, E0). Implementations are stateless
// between calls, so solve() may be called concurrently.
class IsingMachine {
 public:
  virtual ~IsingMachine() = default;

  // Same (problem, seed) must give the same configuration and energy.
  virtual SolveResult solve(const IsingProblem& problem, std::uint64_t seed) const = 0;

  virtual std::string name() const = 0;
  // Fully resolved parameters; make_backend(name(), params()) rebuilds an
  // equivalent machine.
  virtual BackendParams params() const = 0;
};

// Exhaustive search. Among degenerate ground states the lexicographically
// smallest configuration (under -1 < +1, spin 0 first) wins.
class ExactSolver final : public IsingMachine {
 public:
  static constexpr std::size_t kMaxSpins = 24;

  SolveResult solve(const IsingProblem& problem, std::uint64_t seed) const override;
  std::string name() const override { return "exact"; }
  BackendParams params() const override { return {}; }
};

// Throws CapacityError above ExactSolver::kMaxSpins spins.
SolveResult exact_solve(const IsingProblem& problem);

// Geometric cooling from t_initial to t_final over `sweeps` full passes,
// one temperature per pass.
struct AnnealSchedule {
  double t_initial = 1.0;
  double t_final = 1e-3;
  std::size_t sweeps = 1000;

  // Throws ConfigError unless 0 < t_final < t_initial and sweeps >= 1.
  void validate() const;
  // Per-sweep multiplier, (t_final / t_initial)^(1 / (sweeps - 1)); 1 for a
  // single sweep.
  double cooling_ratio() const;
  double temperature(std::size_t sweep) const;

  // t_initial = 10 max(|theta|_inf, |Gamma|_inf, 1), t_final = 1e-3 t_initial.
  static AnnealSchedule defaults_for(const IsingProblem& problem, std::size_t sweeps = 1000);
};

// Metropolis single-spin-flip annealing. Spins are proposed in index order
// each sweep; the start state is uniformly random unless `initial` is given.
// Returns the lowest-energy configuration visited.
SolveResult sa_solve(const IsingProblem& problem, const AnnealSchedule& schedule,
                     std::uint64_t seed, const std::optional<SpinConfiguration>& initial = {});

struct AnnealerOptions {
  std::size_t sweeps = 1000;
  // Unset temperatures fall back to AnnealSchedule::defaults_for.
  std::optional<double> t_initial;
  std::optional<double> t_final;
  // Independent anneals per solve; the best one is returned.
  std::size_t reads = 1;
};

class SimulatedAnnealer final : public IsingMachine {
 public:
  explicit SimulatedAnnealer(AnnealerOptions options = {});

  SolveResult solve(const IsingProblem& problem, std::uint64_t seed) const override;
  std::string name() const override { return "simulated-annealing"; }
  BackendParams params() const override;

  const AnnealerOptions& options() const noexcept { return options_; }
  AnnealSchedule schedule_for(const IsingProblem& problem) const;

 private:
  AnnealerOptions options_;
};

// Registered backend names, in display order.
std::vector<std::string> backend_names();

// Builds a backend by name. Keys not understood by the backend are rejected
// with ConfigError; so are unknown names.
std::unique_ptr<IsingMachine> make_backend(const std::string& name, const BackendParams& params = {});

}  // namespace ising
