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

#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "ising/datasets.hpp"
#include "ising/solver.hpp"
#include "ising/training.hpp"

namespace {

using namespace ising;

IsingProblem random_problem(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const auto topo = complete_topology(n);
  std::vector<double> theta(n), gamma(topo.edge_count());
  for (auto& t : theta) t = u(rng);
  for (auto& g : gamma) g = u(rng);
  return IsingProblem(topo, theta, gamma);
}

void BM_Energy(benchmark::State& state) {
  const auto p = random_problem(static_cast<std::size_t>(state.range(0)), 1);
  const SpinConfiguration z(p.size(), Spin{1});
  for (auto _ : state) benchmark::DoNotOptimize(energy(p, z));
}
BENCHMARK(BM_Energy)->Arg(10)->Arg(50)->Arg(144);

void BM_ExactSolve(benchmark::State& state) {
  const auto p = random_problem(static_cast<std::size_t>(state.range(0)), 2);
  for (auto _ : state) benchmark::DoNotOptimize(exact_solve(p));
}
BENCHMARK(BM_ExactSolve)->Arg(10)->Arg(16)->Arg(20)->Unit(benchmark::kMillisecond);

void BM_SimulatedAnnealing(benchmark::State& state) {
  const auto p = random_problem(static_cast<std::size_t>(state.range(0)), 3);
  const auto schedule = AnnealSchedule::defaults_for(p);
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(sa_solve(p, schedule, seed++));
}
BENCHMARK(BM_SimulatedAnnealing)->Arg(12)->Arg(50)->Arg(144)->Unit(benchmark::kMillisecond);

void BM_GammaStep(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto model = ModelState::zero_initialized(n, PreprocessSpec::identity(), -0.3, 1.0);
  std::mt19937_64 rng(4);
  std::vector<SampleOutcome> batch(80);
  for (auto& o : batch) {
    std::vector<Spin> s(n);
    for (auto& v : s) v = rng() & 1 ? 1 : -1;
    o.solve.configuration = SpinConfiguration(s);
    o.solve.energy = -static_cast<double>(rng() % 100);
    o.target = static_cast<double>(rng() % 2) * 10.0;
  }
  for (auto _ : state) benchmark::DoNotOptimize(gamma_step(model, batch, 0.02));
}
BENCHMARK(BM_GammaStep)->Arg(50)->Arg(144)->Unit(benchmark::kMillisecond);

void BM_TrainEpochRandomPreset(benchmark::State& state) {
  const auto data = gen_random(10, 20, -1.0, 1.0, 5);
  const auto model = ModelState::zero_initialized(10, PreprocessSpec::identity(), 1.0, 0.0);
  const SimulatedAnnealer sa;
  TrainConfig config;
  config.eta = 0.2;
  config.epochs = 1;
  config.workers = 1;
  for (auto _ : state) benchmark::DoNotOptimize(train(data, model, config, sa));
}
BENCHMARK(BM_TrainEpochRandomPreset)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
