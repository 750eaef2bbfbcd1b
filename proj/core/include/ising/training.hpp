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
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "ising/datasets.hpp"
#include "ising/errors.hpp"
#include "ising/model.hpp"
#include "ising/solver.hpp"

namespace ising {

enum class SeedPolicy {
  fixed,    // every solve uses the base seed
  per_call  // derive_seed(base, epoch, sample)
};

struct TrainConfig {
  double eta = 0.1;
  std::size_t epochs = 1;
  // Scale and offset are hyperparameters unless these are switched on.
  bool update_lambda = false;
  bool update_epsilon = false;
  SeedPolicy seed_policy = SeedPolicy::per_call;
  std::uint64_t seed = 0;
  // Record bars/stripes accuracy alongside the loss.
  bool classification = false;
  // Abort once the loss exceeds divergence_factor * initial loss.
  double divergence_factor = 1e6;
  // Solver threads per epoch; 0 = hardware concurrency.
  std::size_t workers = 0;

  void validate() const;
};

struct EpochRecord {
  std::size_t epoch = 0;
  double train_mse = 0.0;
  std::optional<double> test_mse;
  std::optional<double> train_accuracy;
  std::optional<double> test_accuracy;
  // Mean |delta Gamma_ij| of the update applied after this epoch's solves.
  double mean_step = 0.0;
  std::vector<double> train_outputs;
  std::vector<double> test_outputs;
};

struct TrainReport {
  std::vector<EpochRecord> records;
  ModelState final_state;
  std::size_t solver_calls = 0;
  std::uint64_t base_seed = 0;
  SeedPolicy seed_policy = SeedPolicy::per_call;
};

// One solved training sample: the machine output and its target.
struct SampleOutcome {
  SolveResult solve;
  double target = 0.0;
};

// Mean of (prediction - target)^2. Throws on mismatched or empty input.
double mse_loss(std::span<const double> predictions, std::span<const double> targets);

// Offset that centres the initial outputs on the targets:
// mean_a [y_a - F(theta_a | Gamma, lambda, 0)], using `machine` for E0.
// With all couplings zero and an exact machine, the result is checked
// against epsilon_init_closed_form and a mismatch throws.
double epsilon_init(const Dataset& data, double lambda, const ModelState& state,
                    const IsingMachine& machine, std::uint64_t seed = 0);

// mean_a [y_a + lambda sum_i |h(theta_a)_i|]; only valid when every
// coupling is zero, throws otherwise.
double epsilon_init_closed_form(const Dataset& data, double lambda, const ModelState& state);

// Couplings after one full-batch gradient step:
// Gamma_ij - eta (2 lambda / N) sum_a r_a z*_i z*_j with residual
// r_a = lambda E0_a + epsilon - y_a, clamped to state.bounds.couplings.
std::vector<double> gamma_step(const ModelState& state, std::span<const SampleOutcome> batch,
                               double eta);

struct ScaleOffset {
  double lambda = 1.0;
  double epsilon = 0.0;
};

// lambda - eta (2/N) sum_a r_a E0_a and epsilon - eta (2/N) sum_a r_a, each
// applied only when enabled in `config`.
ScaleOffset lambda_epsilon_step(const ModelState& state, std::span<const SampleOutcome> batch,
                                double eta, const TrainConfig& config);

// Called after every completed epoch with the record and the updated state.
using EpochCallback = std::function<void(const EpochRecord&, const ModelState&)>;

// Raised when an epoch cannot complete, either because the machine failed
// or because the loss diverged. Carries the state and records as of the last
// completed epoch so the run can be resumed.
class TrainingAborted : public Error {
 public:
  enum class Reason { solver_failure, divergence };

  TrainingAborted(Reason reason, const std::string& what, ModelState last_state,
                  std::vector<EpochRecord> completed, std::optional<EpochRecord> failed = {})
      : Error(what),
        reason_(reason),
        last_state_(std::move(last_state)),
        completed_(std::move(completed)),
        failed_(std::move(failed)) {}

  Reason reason() const noexcept { return reason_; }
  const ModelState& last_state() const noexcept { return last_state_; }
  const std::vector<EpochRecord>& completed() const noexcept { return completed_; }
  // The epoch whose loss tripped the divergence guard (no update applied).
  const std::optional<EpochRecord>& failed() const noexcept { return failed_; }

 private:
  Reason reason_;
  ModelState last_state_;
  std::vector<EpochRecord> completed_;
  std::optional<EpochRecord> failed_;
};

// Full-batch gradient descent: each epoch solves every sample with the
// current couplings, records the loss, then updates Gamma, lambda and
// epsilon from those same solves. The returned final_state is the model
// after the last update.
TrainReport train(const Dataset& data, ModelState state, const TrainConfig& config,
                  const IsingMachine& machine, const Dataset* test = nullptr,
                  const EpochCallback& on_epoch = {});

struct FiniteDifference {
  double numeric = 0.0;   // [F(Gamma_e + h) - F(Gamma_e - h)] / 2h
  double analytic = 0.0;  // lambda z*_i z*_j at the unshifted point
  // False when the ground state differs between the shifted points, i.e.
  // the interval straddles a spin flip and the two need not agree.
  bool constant_ground_state = true;
};

FiniteDifference finite_difference_gradient(const ModelState& state, std::span<const double> theta,
                                            std::size_t edge, double h, const IsingMachine& machine,
                                            std::uint64_t seed = 0);

}  // namespace ising
