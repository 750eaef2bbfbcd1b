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
#include <string>

#include <gtest/gtest.h>

#include "ising/errors.hpp"
#include "ising/solver.hpp"
#include "oracle.hpp"

namespace ising {
namespace {

IsingProblem pair(double t0, double t1, double g) {
  return IsingProblem(complete_topology(2), {t0, t1}, {g});
}

SpinConfiguration spins(std::initializer_list<int> v) {
  std::vector<Spin> s;
  for (int x : v) s.push_back(static_cast<Spin>(x));
  return SpinConfiguration(s);
}

TEST(ExactSolve, AntiferromagneticPairTakesLexicographicMinimizer) {
  const auto r = exact_solve(pair(0.0, 0.0, 1.0));
  EXPECT_EQ(r.configuration, spins({-1, 1}));
  EXPECT_EQ(r.energy, -1.0);
}

TEST(ExactSolve, BiasedPair) {
  const auto p = pair(2.0, 0.0, 1.0);
  const auto r = exact_solve(p);
  EXPECT_EQ(r.configuration, spins({-1, 1}));
  EXPECT_EQ(r.energy, -3.0);
  // Enumerate the four states by hand.
  const auto g = oracle::brute_force(p);
  EXPECT_EQ(g.energy, -3.0);
  EXPECT_EQ(g.z, (std::vector<int>{-1, 1}));
}

TEST(ExactSolve, ZeroCouplingClosedForm) {
  const auto r = exact_solve(pair(1.0, -2.0, 0.0));
  EXPECT_EQ(r.energy, -3.0);
  EXPECT_EQ(r.configuration, spins({-1, 1}));
}

TEST(ExactSolve, CapacityGuardAdvisesAnnealing) {
  const std::size_t n = ExactSolver::kMaxSpins + 1;
  const IsingProblem p(Topology(n, {}), std::vector<double>(n, 1.0), {});
  try {
    exact_solve(p);
    FAIL() << "expected CapacityError";
  } catch (const CapacityError& e) {
    EXPECT_NE(std::string(e.what()).find("simulated-annealing"), std::string::npos);
  }
}

TEST(ExactSolve, MatchesBruteForceOracle) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 150; ++trial) {
    const auto p = oracle::random_complete(1 + trial % 11, rng);
    const auto r = exact_solve(p);
    const auto g = oracle::brute_force(p);
    EXPECT_NEAR(r.energy, g.energy, 1e-12);
    EXPECT_EQ(oracle::as_ints(r.configuration), g.z);
    EXPECT_EQ(r.energy, energy(p, r.configuration));
  }
}

TEST(ExactSolve, DegenerateGroundStatesBreakTiesLexicographically) {
  // Integer-valued problems have many exact ties.
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<int> v(-1, 1);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + trial % 7;
    const auto topo = complete_topology(n);
    std::vector<double> theta(n), gamma(topo.edge_count());
    for (auto& t : theta) t = v(rng);
    for (auto& g : gamma) g = v(rng);
    const IsingProblem p(topo, theta, gamma);
    const auto r = exact_solve(p);
    const auto g = oracle::brute_force(p, 0.0);
    EXPECT_EQ(r.energy, g.energy);
    EXPECT_EQ(oracle::as_ints(r.configuration), g.z);
  }
}

TEST(ExactSolve, AllZeroProblemReturnsAllMinus) {
  const IsingProblem p(complete_topology(4), {0, 0, 0, 0}, std::vector<double>(6, 0.0));
  const auto r = exact_solve(p);
  EXPECT_EQ(r.energy, 0.0);
  EXPECT_EQ(r.configuration, SpinConfiguration(4, Spin{-1}));
}

TEST(AnnealSchedule, ValidatesTemperaturesAndSweeps) {
  EXPECT_THROW((AnnealSchedule{0.0, 1e-3, 10}.validate()), ConfigError);
  EXPECT_THROW((AnnealSchedule{1.0, 0.0, 10}.validate()), ConfigError);
  EXPECT_THROW((AnnealSchedule{1.0, 2.0, 10}.validate()), ConfigError);
  EXPECT_THROW((AnnealSchedule{1.0, 0.5, 0}.validate()), ConfigError);
  EXPECT_NO_THROW((AnnealSchedule{1.0, 0.5, 1}.validate()));
}

TEST(AnnealSchedule, GeometricCoolingHitsEndpoints) {
  const AnnealSchedule s{8.0, 1.0, 4};
  EXPECT_DOUBLE_EQ(s.temperature(0), 8.0);
  EXPECT_DOUBLE_EQ(s.temperature(1), 4.0);
  EXPECT_DOUBLE_EQ(s.temperature(2), 2.0);
  EXPECT_DOUBLE_EQ(s.temperature(3), 1.0);
  EXPECT_DOUBLE_EQ(s.cooling_ratio(), 0.5);
}

TEST(AnnealSchedule, DefaultsScaleWithProblem) {
  const auto s = AnnealSchedule::defaults_for(pair(3.0, -0.5, 2.0));
  EXPECT_DOUBLE_EQ(s.t_initial, 30.0);
  EXPECT_DOUBLE_EQ(s.t_final, 30.0 * 1e-3);
  EXPECT_EQ(s.sweeps, 1000u);
  const auto small = AnnealSchedule::defaults_for(pair(0.1, 0.1, 0.1));
  EXPECT_DOUBLE_EQ(small.t_initial, 10.0);
}

TEST(SaSolve, PairReachesGroundEnergyForAnySeed) {
  const auto p = pair(0.0, 0.0, 1.0);
  const auto schedule = AnnealSchedule::defaults_for(p);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto r = sa_solve(p, schedule, seed);
    EXPECT_EQ(r.energy, -1.0);
    EXPECT_EQ(r.configuration[0], -r.configuration[1]);
  }
}

TEST(SaSolve, ColdSingleSweepIsGreedy) {
  const IsingProblem p(complete_topology(1), {5.0}, {});
  const AnnealSchedule cold{1e-12, 1e-13, 1};
  const auto r = sa_solve(p, cold, 7, SpinConfiguration(1, Spin{1}));
  EXPECT_EQ(r.configuration, SpinConfiguration(1, Spin{-1}));
  EXPECT_EQ(r.energy, -5.0);
}

TEST(SaSolve, ReturnsBestVisitedNotFinal) {
  // Warm throughout, so the final state is random, yet 200 sweeps over 8
  // states visit the ground state.
  std::mt19937_64 rng(2);
  const auto p = oracle::random_complete(3, rng);
  const AnnealSchedule hot{2.0, 1.5, 200};
  const auto g = exact_solve(p);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    EXPECT_EQ(sa_solve(p, hot, seed).energy, g.energy);
  }
}

TEST(SaSolve, DeterministicForSeed) {
  std::mt19937_64 rng(8);
  const auto p = oracle::random_complete(16, rng);
  const auto schedule = AnnealSchedule::defaults_for(p, 50);
  const auto a = sa_solve(p, schedule, 99);
  const auto b = sa_solve(p, schedule, 99);
  EXPECT_EQ(a.configuration, b.configuration);
  EXPECT_EQ(a.energy, b.energy);
}

TEST(SaSolve, EnergyIsRecomputedExactly) {
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 30; ++trial) {
    const auto p = oracle::random_complete(5 + trial % 20, rng);
    const auto r = sa_solve(p, AnnealSchedule::defaults_for(p, 20), trial);
    EXPECT_EQ(r.energy, energy(p, r.configuration));
  }
}

TEST(SaSolve, OracleEquivalenceAtTenSpins) {
  std::mt19937_64 rng(12);
  int hits = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto p = oracle::random_complete(10, rng);
    const auto exact = oracle::brute_force(p);
    const auto r = sa_solve(p, AnnealSchedule::defaults_for(p), seed);
    EXPECT_GE(r.energy, exact.energy - 1e-9);
    if (std::abs(r.energy - exact.energy) <= 1e-9) ++hits;
  }
  EXPECT_GE(hits, 95);
}

TEST(SimulatedAnnealer, ReadsKeepBestOfSeveral) {
  std::mt19937_64 rng(14);
  const auto p = oracle::random_complete(20, rng);
  const SimulatedAnnealer one({5, std::nullopt, std::nullopt, 1});
  const SimulatedAnnealer many({5, std::nullopt, std::nullopt, 8});
  const auto a = one.solve(p, 3);
  const auto b = many.solve(p, 3);
  EXPECT_LE(b.energy, a.energy);  // read 0 shares the seed
  EXPECT_EQ(b.metadata.seed, 3u);
}

TEST(MakeBackend, KnownNames) {
  EXPECT_EQ(make_backend("exact", {})->name(), "exact");
  const auto sa = make_backend("simulated-annealing", {{"sweeps", "1000"}});
  EXPECT_EQ(sa->name(), "simulated-annealing");
  EXPECT_EQ(sa->params().at("sweeps"), "1000");
  const auto sa2 = make_backend("simulated-annealing", {{"sweeps", "25"}});
  EXPECT_EQ(dynamic_cast<const SimulatedAnnealer&>(*sa2).options().sweeps, 25u);
}

TEST(MakeBackend, UnknownNameListsRegisteredBackends) {
  try {
    make_backend("quantum", {});
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("unknown backend"), std::string::npos);
    EXPECT_NE(msg.find("exact"), std::string::npos);
    EXPECT_NE(msg.find("simulated-annealing"), std::string::npos);
  }
}

TEST(MakeBackend, UnknownKeysRejected) {
  EXPECT_THROW(make_backend("simulated-annealing", {{"beta", "3"}}), ConfigError);
  EXPECT_THROW(make_backend("exact", {{"sweeps", "3"}}), ConfigError);
  EXPECT_THROW(make_backend("simulated-annealing", {{"sweeps", "0"}}), ConfigError);
  EXPECT_THROW(make_backend("simulated-annealing", {{"sweeps", "ten"}}), ConfigError);
  EXPECT_THROW(make_backend("simulated-annealing", {{"t_initial", "1"}, {"t_final", "2"}}),
               ConfigError);
}

TEST(MachineContract, SameSeedSameResult) {
  std::mt19937_64 rng(15);
  const auto p = oracle::random_complete(12, rng);
  for (const auto& name : backend_names()) {
    const auto m = make_backend(name, {});
    const auto a = m->solve(p, 5);
    const auto b = m->solve(p, 5);
    EXPECT_EQ(a.configuration, b.configuration) << name;
    EXPECT_EQ(a.energy, b.energy) << name;
    EXPECT_EQ(a.energy, energy(p, a.configuration)) << name;
  }
}

}  // namespace
}  // namespace ising
