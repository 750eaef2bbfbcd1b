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

#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "ising/datasets.hpp"
#include "ising/errors.hpp"
#include "ising/solver.hpp"
#include "ising/training.hpp"
#include "oracle.hpp"

namespace ising {
namespace {

const ExactSolver kExact;

SampleOutcome outcome(std::vector<int> z, double energy, double target) {
  std::vector<Spin> s(z.begin(), z.end());
  SampleOutcome o;
  o.solve.configuration = SpinConfiguration(s);
  o.solve.energy = energy;
  o.target = target;
  return o;
}

Dataset random_data(std::size_t n, std::size_t samples, std::uint64_t seed) {
  return gen_random(n, samples, -1.0, 1.0, seed);
}

// --- loss ---

TEST(MseLoss, Examples) {
  EXPECT_EQ(mse_loss(std::vector<double>{1, 3}, std::vector<double>{0, 1}), 2.5);
  EXPECT_EQ(mse_loss(std::vector<double>{4, 5}, std::vector<double>{4, 5}), 0.0);
  EXPECT_EQ(mse_loss(std::vector<double>{-3}, std::vector<double>{0}), 9.0);
}

TEST(MseLoss, Errors) {
  EXPECT_THROW(mse_loss(std::vector<double>{1, 2}, std::vector<double>{1}), DimensionError);
  EXPECT_THROW(mse_loss(std::vector<double>{}, std::vector<double>{}), Error);
}

// --- epsilon initialization ---

TEST(EpsilonInit, SingleSample) {
  Dataset d(2);
  d.add(std::vector<double>{1.0, -2.0}, 0.0);
  const auto s = ModelState::zero_initialized(2, PreprocessSpec::identity(), 1.0, 0.0);
  EXPECT_EQ(epsilon_init(d, 1.0, s, kExact), 3.0);
  EXPECT_EQ(epsilon_init_closed_form(d, 1.0, s), 3.0);
}

TEST(EpsilonInit, TwoSamples) {
  Dataset d(1);
  d.add(std::vector<double>{1.0}, 0.0);
  d.add(std::vector<double>{-1.0}, 0.0);
  const auto s = ModelState::zero_initialized(1, PreprocessSpec::identity(), 1.0, 0.0);
  EXPECT_EQ(epsilon_init(d, 1.0, s, kExact), 1.0);
}

TEST(EpsilonInit, EmptyDatasetRejected) {
  const Dataset d(2);
  const auto s = ModelState::zero_initialized(2, PreprocessSpec::identity(), 1.0, 0.0);
  EXPECT_THROW(epsilon_init(d, 1.0, s, kExact), Error);
}

TEST(EpsilonInit, ClosedFormNeedsZeroCouplings) {
  auto s = ModelState::zero_initialized(2, PreprocessSpec::identity(), 1.0, 0.0);
  s.couplings = {0.5};
  Dataset d(2);
  d.add(std::vector<double>{1.0, 1.0}, 0.0);
  EXPECT_THROW(epsilon_init_closed_form(d, 1.0, s), Error);
  // The sampled path still works: y - lambda E0 with E0 = -1.5 at (-1,-1).
  EXPECT_EQ(epsilon_init(d, 1.0, s, kExact), 1.5);
}

TEST(EpsilonInit, DualPathsAgreeExactlyOnRandomData) {
  std::mt19937_64 rng(6);
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto d = random_data(1 + seed % 10, 1 + seed % 25, seed);
    const double lambda = oracle::uniform(1, -3, 3, rng)[0];
    const auto s = ModelState::zero_initialized(d.input_dim(), PreprocessSpec::identity(), lambda, 0);
    EXPECT_EQ(epsilon_init(d, lambda, s, kExact), epsilon_init_closed_form(d, lambda, s));
  }
}

TEST(EpsilonInit, ClosedFormMatchesIndependentArithmetic) {
  const auto d = random_data(4, 9, 77);
  const double lambda = -0.3;
  double acc = 0.0;  // plain mean of y + lambda sum |theta|
  for (std::size_t a = 0; a < d.size(); ++a) {
    double s = 0.0;
    for (double t : d.input(a)) s += std::abs(t);
    acc += d.target(a) + lambda * s;
  }
  const auto st = ModelState::zero_initialized(4, PreprocessSpec::identity(), lambda, 0);
  EXPECT_NEAR(epsilon_init_closed_form(d, lambda, st), acc / 9.0, 1e-14);
}

// --- update rules ---

TEST(GammaStep, PlugIn) {
  auto s = ModelState::zero_initialized(2, PreprocessSpec::identity(), 1.0, 0.0);
  // E0 = 2, target 0: residual 2, z_i z_j = +1.
  const std::vector<SampleOutcome> batch{outcome({1, 1}, 2.0, 0.0)};
  EXPECT_DOUBLE_EQ(gamma_step(s, batch, 0.1)[0], -0.4);
}

TEST(GammaStep, ZeroResidualIsFixedPoint) {
  auto s = ModelState::zero_initialized(3, PreprocessSpec::identity(), 0.5, 0.25);
  s.couplings = {0.1, -0.2, 0.3};
  const std::vector<SampleOutcome> batch{outcome({1, -1, 1}, 1.0, 0.75),
                                         outcome({-1, -1, 1}, -2.0, -0.75)};
  EXPECT_EQ(gamma_step(s, batch, 0.5), s.couplings);
}

TEST(GammaStep, ZeroScaleFreezesCouplings) {
  auto s = ModelState::zero_initialized(3, PreprocessSpec::identity(), 0.0, 0.0);
  s.couplings = {0.1, -0.2, 0.3};
  const std::vector<SampleOutcome> batch{outcome({1, -1, 1}, 1.0, 50.0)};
  EXPECT_EQ(gamma_step(s, batch, 0.5), s.couplings);
}

TEST(GammaStep, MatchesDirectFormula) {
  std::mt19937_64 rng(7);
  auto s = ModelState::zero_initialized(4, PreprocessSpec::identity(), -0.3, 1.1);
  s.couplings = oracle::uniform(6, -1, 1, rng);
  std::vector<SampleOutcome> batch;
  for (int a = 0; a < 5; ++a) {
    std::vector<int> z(4);
    for (auto& v : z) v = rng() & 1 ? 1 : -1;
    batch.push_back(outcome(z, oracle::uniform(1, -3, 0, rng)[0], oracle::uniform(1, -1, 1, rng)[0]));
  }
  const double eta = 0.05;
  const auto got = gamma_step(s, batch, eta);
  for (std::size_t e = 0; e < 6; ++e) {
    const auto edge = s.topology.edge(e);
    double sum = 0.0;
    for (const auto& o : batch) {
      const double r = s.lambda * o.solve.energy + s.epsilon - o.target;
      sum += r * o.solve.configuration[edge.i] * o.solve.configuration[edge.j];
    }
    EXPECT_NEAR(got[e], s.couplings[e] - eta * 2 * s.lambda / 5.0 * sum, 1e-14);
  }
}

TEST(GammaStep, ClampsToBounds) {
  auto s = ModelState::zero_initialized(2, PreprocessSpec::identity(), 1.0, 0.0);
  s.bounds.couplings = {-0.25, 0.25};
  const std::vector<SampleOutcome> batch{outcome({1, 1}, 2.0, 0.0)};
  EXPECT_EQ(gamma_step(s, batch, 0.1)[0], -0.25);
}

TEST(LambdaEpsilonStep, FlagsOffLeaveBothUnchanged) {
  auto s = ModelState::zero_initialized(2, PreprocessSpec::identity(), 1.5, -2.0);
  const std::vector<SampleOutcome> batch{outcome({1, 1}, -3.0, 4.0)};
  const auto r = lambda_epsilon_step(s, batch, 0.1, TrainConfig{});
  EXPECT_EQ(r.lambda, 1.5);
  EXPECT_EQ(r.epsilon, -2.0);
}

TEST(LambdaEpsilonStep, PlugIn) {
  // lambda = 1, epsilon = 0, E0 = -3, target -5: residual 2.
  auto s = ModelState::zero_initialized(2, PreprocessSpec::identity(), 1.0, 0.0);
  const std::vector<SampleOutcome> batch{outcome({1, 1}, -3.0, -5.0)};
  TrainConfig c;
  c.update_lambda = true;
  c.update_epsilon = true;
  const auto r = lambda_epsilon_step(s, batch, 0.1, c);
  EXPECT_DOUBLE_EQ(r.lambda - 1.0, 1.2);
  EXPECT_DOUBLE_EQ(r.epsilon, -0.4);
}

// --- training loop ---

TEST(Train, ZeroLearningRateKeepsCouplings) {
  const auto d = random_data(4, 6, 1);
  auto s = ModelState::zero_initialized(4, PreprocessSpec::identity(), 1.0, 0.0);
  TrainConfig c;
  c.eta = 0.0;
  c.epochs = 1;
  const auto r = train(d, s, c, kExact);
  EXPECT_EQ(r.final_state, s);
  ASSERT_EQ(r.records.size(), 1u);
  EXPECT_EQ(r.records[0].mean_step, 0.0);
}

TEST(Train, RecordsAndSolverCalls) {
  const auto d = random_data(5, 7, 2);
  const auto t = random_data(5, 3, 3);
  auto s = ModelState::zero_initialized(5, PreprocessSpec::identity(), 1.0, 0.0);
  TrainConfig c;
  c.epochs = 4;
  const auto r1 = train(d, s, c, kExact);
  EXPECT_EQ(r1.records.size(), 4u);
  EXPECT_EQ(r1.solver_calls, 4u * 7u);
  const auto r2 = train(d, s, c, kExact, &t);
  EXPECT_EQ(r2.solver_calls, 4u * (7u + 3u));
  for (const auto& rec : r2.records) {
    EXPECT_GE(rec.train_mse, 0.0);
    ASSERT_TRUE(rec.test_mse.has_value());
    EXPECT_GE(*rec.test_mse, 0.0);
    EXPECT_EQ(rec.train_outputs.size(), 7u);
    EXPECT_EQ(rec.test_outputs.size(), 3u);
  }
}

TEST(Train, RecordedLossMatchesOutputs) {
  const auto d = random_data(3, 5, 4);
  auto s = ModelState::zero_initialized(3, PreprocessSpec::identity(), 1.0, 0.5);
  TrainConfig c;
  c.epochs = 3;
  const auto r = train(d, s, c, kExact);
  for (const auto& rec : r.records) {
    double acc = 0.0;
    for (std::size_t a = 0; a < d.size(); ++a) {
      acc += (rec.train_outputs[a] - d.target(a)) * (rec.train_outputs[a] - d.target(a));
    }
    EXPECT_NEAR(rec.train_mse, acc / 5.0, 1e-12);
  }
}

TEST(Train, RejectsInvalidConfigAndMismatchedData) {
  const auto d = random_data(3, 5, 4);
  auto s = ModelState::zero_initialized(3, PreprocessSpec::identity(), 1.0, 0.0);
  TrainConfig c;
  c.epochs = 0;
  EXPECT_THROW(train(d, s, c, kExact), Error);
  c.epochs = 1;
  c.eta = -1.0;
  EXPECT_THROW(train(d, s, c, kExact), Error);
  c.eta = 0.1;
  auto wrong = ModelState::zero_initialized(4, PreprocessSpec::identity(), 1.0, 0.0);
  EXPECT_THROW(train(d, wrong, c, kExact), DimensionError);
}

TEST(Train, DivergenceGuardAbortsWithLastState) {
  const auto d = random_data(10, 20, 13);
  auto s = ModelState::zero_initialized(10, PreprocessSpec::identity(), 1.0, 0.0);
  s.epsilon = epsilon_init(d, 1.0, s, kExact);
  TrainConfig c;
  c.eta = 5.0;
  c.epochs = 200;
  try {
    train(d, s, c, kExact);
    FAIL() << "expected TrainingAborted";
  } catch (const TrainingAborted& e) {
    EXPECT_EQ(e.reason(), TrainingAborted::Reason::divergence);
    EXPECT_NE(std::string(e.what()).find("learning rate"), std::string::npos);
    ASSERT_TRUE(e.failed().has_value());
    EXPECT_GT(e.failed()->train_mse, 1e6 * e.completed().front().train_mse);
    EXPECT_EQ(e.failed()->epoch, e.completed().size());
    EXPECT_NO_THROW(e.last_state().validate());
  }
}

class FailingMachine final : public IsingMachine {
 public:
  SolveResult solve(const IsingProblem&, std::uint64_t) const override {
    throw std::runtime_error("device offline");
  }
  std::string name() const override { return "failing"; }
  BackendParams params() const override { return {}; }
};

TEST(Train, SolverFailureIsResumable) {
  const auto d = random_data(3, 4, 5);
  auto s = ModelState::zero_initialized(3, PreprocessSpec::identity(), 1.0, 0.0);
  TrainConfig c;
  c.epochs = 2;
  try {
    train(d, s, c, FailingMachine{});
    FAIL() << "expected TrainingAborted";
  } catch (const TrainingAborted& e) {
    EXPECT_EQ(e.reason(), TrainingAborted::Reason::solver_failure);
    EXPECT_EQ(e.last_state(), s);
    EXPECT_TRUE(e.completed().empty());
  }
}

TEST(Train, CallbackSeesEveryEpoch) {
  const auto d = random_data(3, 4, 6);
  auto s = ModelState::zero_initialized(3, PreprocessSpec::identity(), 1.0, 0.0);
  TrainConfig c;
  c.epochs = 5;
  std::vector<std::size_t> seen;
  ModelState last;
  const auto r = train(d, s, c, kExact, nullptr, [&](const EpochRecord& rec, const ModelState& st) {
    seen.push_back(rec.epoch);
    last = st;
  });
  EXPECT_EQ(seen, (std::vector<std::size_t>{0, 1, 2, 3, 4}));
  EXPECT_EQ(last, r.final_state);
}

TEST(Train, ClassificationAccuracyRecorded) {
  const auto bas = gen_bas(3, 12, 2);
  auto s = ModelState::zero_initialized(9, PreprocessSpec::identity(), -0.3, 0.0);
  s.epsilon = epsilon_init(bas.data, -0.3, s, kExact);
  TrainConfig c;
  c.epochs = 2;
  c.eta = 0.02;
  c.classification = true;
  const auto r = train(bas.data, s, c, kExact);
  for (const auto& rec : r.records) {
    ASSERT_TRUE(rec.train_accuracy.has_value());
    EXPECT_EQ(*rec.train_accuracy, bas_accuracy(rec.train_outputs, bas.data.targets()));
  }
}

// --- properties ---

TEST(TrainProperty, FixedPointWhenPredictionsMatchTargets) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 10; ++trial) {
    auto s = ModelState::zero_initialized(5, PreprocessSpec::identity(), 0.8, -0.4);
    s.couplings = oracle::uniform(s.topology.edge_count(), -1, 1, rng);
    Dataset d(5);
    for (int a = 0; a < 8; ++a) {
      const auto theta = oracle::uniform(5, -1, 1, rng);
      d.add(theta, predict(s, theta, kExact, 0).value);
    }
    TrainConfig c;
    c.eta = 0.3;
    c.epochs = 1;
    c.update_lambda = true;
    c.update_epsilon = true;
    const auto r = train(d, s, c, kExact);
    EXPECT_EQ(r.final_state, s);
    EXPECT_EQ(r.records[0].train_mse, 0.0);
  }
}

TEST(TrainProperty, DuplicatingSamplesLeavesStepsBitIdentical) {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const auto d = random_data(6, 10, seed);
    auto s = ModelState::zero_initialized(6, PreprocessSpec::identity(), 1.0, 0.0);
    s.epsilon = epsilon_init(d, 1.0, s, kExact);
    TrainConfig c;
    c.eta = 0.05;
    c.epochs = 6;
    c.update_lambda = true;
    c.update_epsilon = true;
    std::vector<ModelState> once, twice;
    const auto r1 = train(d, s, c, kExact, nullptr,
                          [&](const EpochRecord&, const ModelState& st) { once.push_back(st); });
    const auto r2 = train(d.repeated(2), s, c, kExact, nullptr,
                          [&](const EpochRecord&, const ModelState& st) { twice.push_back(st); });
    EXPECT_EQ(once, twice);
    for (std::size_t k = 0; k < r1.records.size(); ++k) {
      EXPECT_EQ(r1.records[k].train_mse, r2.records[k].train_mse);
      EXPECT_EQ(r1.records[k].mean_step, r2.records[k].mean_step);
    }
  }
}

TEST(TrainProperty, DeterministicWithExactBackend) {
  const auto d = random_data(6, 10, 9);
  auto s = ModelState::zero_initialized(6, PreprocessSpec::identity(), 1.0, 0.1);
  TrainConfig c;
  c.eta = 0.1;
  c.epochs = 5;
  const auto a = train(d, s, c, kExact);
  const auto b = train(d, s, c, kExact);
  EXPECT_EQ(a.final_state, b.final_state);
  for (std::size_t k = 0; k < 5; ++k) EXPECT_EQ(a.records[k].train_mse, b.records[k].train_mse);
}

TEST(TrainProperty, DeterministicWithSeededAnnealer) {
  const auto d = random_data(12, 10, 10);
  auto s = ModelState::zero_initialized(12, PreprocessSpec::identity(), 1.0, 0.1);
  const SimulatedAnnealer sa({50, std::nullopt, std::nullopt, 1});
  for (auto policy : {SeedPolicy::fixed, SeedPolicy::per_call}) {
    TrainConfig c;
    c.eta = 0.1;
    c.epochs = 4;
    c.seed = 1234;
    c.seed_policy = policy;
    const auto a = train(d, s, c, sa);
    c.workers = 3;  // thread count must not matter
    const auto b = train(d, s, c, sa);
    EXPECT_EQ(a.final_state, b.final_state);
    for (std::size_t k = 0; k < 4; ++k) EXPECT_EQ(a.records[k].train_mse, b.records[k].train_mse);
  }
}

TEST(TrainProperty, WeakAnnealerStillReducesLoss) {
  // Few sweeps and one read: the machine often misses the ground state.
  const SimulatedAnnealer weak({5, std::nullopt, std::nullopt, 1});
  int improved = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto d = random_data(10, 20, seed);
    auto s = ModelState::zero_initialized(10, PreprocessSpec::identity(), 1.0, 0.0);
    s.epsilon = epsilon_init(d, 1.0, s, kExact);
    TrainConfig c;
    c.eta = 0.02;
    c.epochs = 30;
    c.seed = seed;
    const auto r = train(d, s, c, weak);
    if (r.records.back().train_mse < r.records.front().train_mse) ++improved;
  }
  EXPECT_EQ(improved, 5);
}

TEST(FiniteDifference, MatchesAnalyticAwayFromFlips) {
  std::mt19937_64 rng(11);
  int checked = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 2 + trial % 7;
    auto s = ModelState::zero_initialized(n, PreprocessSpec::identity(), 1.3, 0.2);
    s.couplings = oracle::uniform(s.topology.edge_count(), -1, 1, rng);
    const auto theta = oracle::uniform(n, -1, 1, rng);
    for (std::size_t e = 0; e < s.couplings.size(); ++e) {
      const auto fd = finite_difference_gradient(s, theta, e, 1e-6, kExact);
      if (!fd.constant_ground_state) continue;
      ++checked;
      EXPECT_NEAR(fd.numeric, fd.analytic, 1e-8 * std::max(1.0, std::abs(fd.analytic)));
      EXPECT_EQ(std::abs(fd.analytic), 1.3);
    }
  }
  EXPECT_GT(checked, 300);
}

TEST(FiniteDifference, FlagsStraddledFlip) {
  // theta = (0, 0), Gamma = 0: at Gamma +- h the ground state changes from
  // aligned to anti-aligned.
  auto s = ModelState::zero_initialized(2, PreprocessSpec::identity(), 1.0, 0.0);
  const std::vector<double> theta{0.0, 0.0};
  const auto fd = finite_difference_gradient(s, theta, 0, 1e-3, kExact);
  EXPECT_FALSE(fd.constant_ground_state);
  EXPECT_NEAR(fd.numeric, 0.0, 1e-12);  // kink: -|Gamma| is symmetric
}

TEST(FiniteDifference, ZeroScale) {
  auto s = ModelState::zero_initialized(3, PreprocessSpec::identity(), 0.0, 1.0);
  s.couplings = {0.3, -0.2, 0.5};
  const std::vector<double> theta{0.1, 0.4, -0.7};
  for (std::size_t e = 0; e < 3; ++e) {
    const auto fd = finite_difference_gradient(s, theta, e, 1e-6, kExact);
    EXPECT_EQ(fd.analytic, 0.0);
    EXPECT_EQ(fd.numeric, 0.0);
  }
}

}  // namespace
}  // namespace ising
