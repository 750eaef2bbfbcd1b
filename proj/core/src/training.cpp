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

#include "ising/training.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <string>

#include "ising/parallel.hpp"
#include "ising/seeding.hpp"
#include "ising/summation.hpp"
#include "ising/text.hpp"

namespace ising {

void TrainConfig::validate() const {
  if (!(eta >= 0.0) || !std::isfinite(eta)) {
    throw ConfigError("learning rate must be finite and non-negative, got " + format_double(eta));
  }
  if (epochs < 1) throw ConfigError("epochs must be at least 1");
  if (!(divergence_factor > 0.0)) throw ConfigError("divergence factor must be positive");
}

double mse_loss(std::span<const double> predictions, std::span<const double> targets) {
  if (predictions.size() != targets.size()) {
    throw DimensionError("predictions", targets.size(), predictions.size());
  }
  if (predictions.empty()) throw Error("mean squared error of an empty set");
  ExactSum sum;
  for (std::size_t a = 0; a < predictions.size(); ++a) {
    const double r = predictions[a] - targets[a];
    sum.add(r * r);
  }
  return sum.value() / static_cast<double>(predictions.size());
}

double epsilon_init_closed_form(const Dataset& data, double lambda, const ModelState& state) {
  if (data.empty()) throw Error("epsilon initialisation needs a non-empty dataset");
  for (double g : state.couplings) {
    if (g != 0.0) throw Error("closed-form epsilon requires all couplings to be zero");
  }
  ExactSum sum;
  for (std::size_t a = 0; a < data.size(); ++a) {
    const auto problem = state.problem_for(data.input(a));
    double abs_sum = 0.0;
    for (double b : problem.biases()) abs_sum += std::abs(b);
    sum.add(data.target(a) + lambda * abs_sum);
  }
  return sum.value() / static_cast<double>(data.size());
}

double epsilon_init(const Dataset& data, double lambda, const ModelState& state,
                    const IsingMachine& machine, std::uint64_t seed) {
  if (data.empty()) throw Error("epsilon initialisation needs a non-empty dataset");
  ModelState probe = state;
  probe.lambda = lambda;
  probe.epsilon = 0.0;
  ExactSum sum;
  for (std::size_t a = 0; a < data.size(); ++a) {
    const auto p = predict(probe, data.input(a), machine, derive_seed(seed, 0, a));
    sum.add(data.target(a) - p.value);
  }
  const double sampled = sum.value() / static_cast<double>(data.size());

  const bool uncoupled = std::all_of(state.couplings.begin(), state.couplings.end(),
                                     [](double g) { return g == 0.0; });
  if (uncoupled && machine.name() == "exact") {
    const double closed = epsilon_init_closed_form(data, lambda, state);
    if (closed != sampled) {
      throw Error("epsilon initialisation: sampled value " + format_double(sampled) +
                  " disagrees with closed form " + format_double(closed));
    }
  }
  return sampled;
}

namespace {

std::vector<double> residuals(const ModelState& state, std::span<const SampleOutcome> batch) {
  std::vector<double> r(batch.size());
  for (std::size_t a = 0; a < batch.size(); ++a) {
    r[a] = model_output(state, batch[a].solve.energy) - batch[a].target;
  }
  return r;
}

void check_batch(const ModelState& state, std::span<const SampleOutcome> batch) {
  if (batch.empty()) throw Error("gradient step needs at least one sample");
  for (const auto& s : batch) {
    if (s.solve.configuration.size() != state.total_spins()) {
      throw DimensionError("solve configuration", state.total_spins(),
                           s.solve.configuration.size());
    }
  }
}

}  // namespace

std::vector<double> gamma_step(const ModelState& state, std::span<const SampleOutcome> batch,
                               double eta) {
  check_batch(state, batch);
  const auto r = residuals(state, batch);
  const double n = static_cast<double>(batch.size());
  const double scale = eta * 2.0 * state.lambda;
  const auto edges = state.topology.edges();
  std::vector<double> next(state.couplings);
  for (std::size_t e = 0; e < edges.size(); ++e) {
    ExactSum sum;
    for (std::size_t a = 0; a < batch.size(); ++a) {
      const auto& z = batch[a].solve.configuration;
      sum.add(z[edges[e].i] * z[edges[e].j] > 0 ? r[a] : -r[a]);
    }
    next[e] = state.bounds.couplings.clamp(state.couplings[e] - scale * (sum.value() / n));
  }
  return next;
}

ScaleOffset lambda_epsilon_step(const ModelState& state, std::span<const SampleOutcome> batch,
                                double eta, const TrainConfig& config) {
  ScaleOffset out{state.lambda, state.epsilon};
  if (!config.update_lambda && !config.update_epsilon) return out;
  check_batch(state, batch);
  const auto r = residuals(state, batch);
  const double n = static_cast<double>(batch.size());
  if (config.update_lambda) {
    ExactSum sum;
    for (std::size_t a = 0; a < batch.size(); ++a) sum.add(r[a] * batch[a].solve.energy);
    out.lambda = state.lambda - eta * 2.0 * (sum.value() / n);
  }
  if (config.update_epsilon) {
    out.epsilon = state.epsilon - eta * 2.0 * (exact_sum(r) / n);
  }
  return out;
}

namespace {

std::vector<SampleOutcome> solve_all(const Dataset& data, const ModelState& state,
                                     const IsingMachine& machine, const TrainConfig& config,
                                     std::size_t epoch, std::size_t index_offset) {
  std::vector<SampleOutcome> out(data.size());
  parallel_for(data.size(), config.workers, [&](std::size_t a) {
    const auto seed = config.seed_policy == SeedPolicy::fixed
                          ? config.seed
                          : derive_seed(config.seed, epoch, index_offset + a);
    out[a].solve = machine.solve(state.problem_for(data.input(a)), seed);
    out[a].target = data.target(a);
  });
  return out;
}

std::vector<double> outputs_of(const ModelState& state, std::span<const SampleOutcome> batch) {
  std::vector<double> f(batch.size());
  for (std::size_t a = 0; a < batch.size(); ++a) f[a] = model_output(state, batch[a].solve.energy);
  return f;
}

}  // namespace

TrainReport train(const Dataset& data, ModelState state, const TrainConfig& config,
                  const IsingMachine& machine, const Dataset* test, const EpochCallback& on_epoch) {
  config.validate();
  state.validate();
  if (data.empty()) throw Error("training set is empty");
  if (data.input_dim() != state.input_dim) {
    throw DimensionError("training inputs", state.input_dim, data.input_dim());
  }
  if (test && test->input_dim() != state.input_dim) {
    throw DimensionError("test inputs", state.input_dim, test->input_dim());
  }
  if (state.degenerate()) {
    std::clog << "warning: lambda is 0, the model output is the constant epsilon\n";
  }

  TrainReport report;
  report.base_seed = config.seed;
  report.seed_policy = config.seed_policy;
  report.records.reserve(config.epochs);
  double initial_loss = 0.0;

  for (std::size_t k = 0; k < config.epochs; ++k) {
    std::vector<SampleOutcome> batch;
    std::vector<SampleOutcome> test_batch;
    try {
      batch = solve_all(data, state, machine, config, k, 0);
      report.solver_calls += data.size();
      if (test && !test->empty()) {
        test_batch = solve_all(*test, state, machine, config, k, data.size());
        report.solver_calls += test->size();
      }
    } catch (const std::exception& ex) {
      throw TrainingAborted(TrainingAborted::Reason::solver_failure,
                            "epoch " + std::to_string(k) + ": " + ex.what(), state,
                            report.records);
    }

    EpochRecord record;
    record.epoch = k;
    record.train_outputs = outputs_of(state, batch);
    record.train_mse = mse_loss(record.train_outputs, data.targets());
    if (config.classification) {
      record.train_accuracy = bas_accuracy(record.train_outputs, data.targets());
    }
    if (!test_batch.empty()) {
      record.test_outputs = outputs_of(state, test_batch);
      record.test_mse = mse_loss(record.test_outputs, test->targets());
      if (config.classification) {
        record.test_accuracy = bas_accuracy(record.test_outputs, test->targets());
      }
    }

    if (k == 0) {
      initial_loss = record.train_mse;
    } else if (initial_loss > 0.0 && record.train_mse > config.divergence_factor * initial_loss) {
      throw TrainingAborted(TrainingAborted::Reason::divergence,
                            "training diverged at epoch " + std::to_string(k) + ": loss " +
                                format_double(record.train_mse) + " exceeds " +
                                format_double(config.divergence_factor) +
                                " x initial loss; try a smaller learning rate",
                            state, report.records, record);
    }

    auto couplings = gamma_step(state, batch, config.eta);
    const auto scale_offset = lambda_epsilon_step(state, batch, config.eta, config);

    ExactSum step;
    for (std::size_t e = 0; e < couplings.size(); ++e) {
      step.add(std::abs(couplings[e] - state.couplings[e]));
    }
    record.mean_step = couplings.empty() ? 0.0 : step.value() / static_cast<double>(couplings.size());

    state.couplings = std::move(couplings);
    state.lambda = scale_offset.lambda;
    state.epsilon = scale_offset.epsilon;

    report.records.push_back(std::move(record));
    if (on_epoch) on_epoch(report.records.back(), state);
  }
  report.final_state = std::move(state);
  return report;
}

FiniteDifference finite_difference_gradient(const ModelState& state, std::span<const double> theta,
                                            std::size_t edge, double h, const IsingMachine& machine,
                                            std::uint64_t seed) {
  if (!(h > 0.0)) throw Error("finite-difference step must be positive");
  if (edge >= state.couplings.size()) throw Error("edge index out of range");
  ModelState plus = state;
  ModelState minus = state;
  plus.couplings[edge] += h;
  minus.couplings[edge] -= h;
  const auto centre = predict(state, theta, machine, seed);
  const auto up = predict(plus, theta, machine, seed);
  const auto down = predict(minus, theta, machine, seed);

  const auto& e = state.topology.edge(edge);
  const auto& z = centre.solve.configuration;
  FiniteDifference fd;
  fd.numeric = (up.value - down.value) / (2.0 * h);
  fd.analytic = state.lambda * (z[e.i] * z[e.j]);
  fd.constant_ground_state =
      up.solve.configuration == z && down.solve.configuration == z;
  return fd;
}

}  // namespace ising
