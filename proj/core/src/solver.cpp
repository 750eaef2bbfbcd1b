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

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <random>
#include <string>

#include "ising/errors.hpp"
#include "ising/seeding.hpp"
#include "ising/solver.hpp"

namespace ising {
namespace {

using Clock = std::chrono::steady_clock;

// Local field h_i = theta_i + sum_j Gamma_ij z_j for every spin.
std::vector<double> local_fields(const IsingProblem& problem, std::span<const Spin> z) {
  const auto& topo = problem.topology();
  const auto offsets = topo.adjacency_offsets();
  const auto adjacency = topo.adjacency();
  const auto couplings = problem.couplings();
  std::vector<double> h(problem.biases().begin(), problem.biases().end());
  for (std::size_t i = 0; i < h.size(); ++i) {
    for (auto k = offsets[i]; k < offsets[i + 1]; ++k) {
      h[i] += couplings[adjacency[k].edge] * z[adjacency[k].spin];
    }
  }
  return h;
}

SpinConfiguration from_code(std::uint32_t code, std::size_t n) {
  std::vector<Spin> spins(n);
  for (std::size_t i = 0; i < n; ++i) spins[i] = (code >> i) & 1U ? 1 : -1;
  return SpinConfiguration(std::move(spins));
}

}  // namespace

SolveResult exact_solve(const IsingProblem& problem) {
  const auto start = Clock::now();
  const std::size_t n = problem.size();
  if (n > ExactSolver::kMaxSpins) {
    throw CapacityError("exact backend enumerates 2^n states and is limited to " +
                        std::to_string(ExactSolver::kMaxSpins) + " spins, problem has " +
                        std::to_string(n) + "; use the simulated-annealing backend");
  }

  const auto& topo = problem.topology();
  const auto offsets = topo.adjacency_offsets();
  const auto adjacency = topo.adjacency();
  const auto couplings = problem.couplings();

  // Gray-code walk with incremental energies. Every state within `tol` of
  // the running minimum is kept and re-scored exactly at the end, so the
  // drift of the incremental sum cannot change the answer.
  double scale = 1.0;
  for (double b : problem.biases()) scale += std::abs(b);
  for (double g : couplings) scale += std::abs(g);
  const double tol = 1e-9 * scale;

  std::vector<Spin> z(n, -1);
  auto h = local_fields(problem, z);
  double e = energy(problem, SpinConfiguration(z));
  std::uint32_t code = 0;
  double best = e;
  std::vector<std::uint32_t> candidates{0};

  const std::uint64_t states = std::uint64_t{1} << n;
  for (std::uint64_t step = 1; step < states; ++step) {
    const auto i = static_cast<std::size_t>(std::countr_zero(step));
    e += -2.0 * z[i] * h[i];
    z[i] = static_cast<Spin>(-z[i]);
    code ^= std::uint32_t{1} << i;
    for (auto k = offsets[i]; k < offsets[i + 1]; ++k) {
      h[adjacency[k].spin] += 2.0 * couplings[adjacency[k].edge] * z[i];
    }
    if (e < best - tol) {
      best = e;
      candidates.clear();
      candidates.push_back(code);
    } else if (e <= best + tol) {
      best = std::min(best, e);
      candidates.push_back(code);
    }
  }

  SolveResult result;
  bool have = false;
  for (auto c : candidates) {
    auto config = from_code(c, n);
    const double exact = energy(problem, config);
    if (!have || exact < result.energy ||
        (exact == result.energy && config < result.configuration)) {
      result.configuration = std::move(config);
      result.energy = exact;
      have = true;
    }
  }
  result.metadata.backend = "exact";
  result.metadata.wall_time = Clock::now() - start;
  return result;
}

SolveResult ExactSolver::solve(const IsingProblem& problem, std::uint64_t seed) const {
  auto result = exact_solve(problem);
  result.metadata.seed = seed;
  return result;
}

void AnnealSchedule::validate() const {
  if (!(t_initial > 0.0) || !std::isfinite(t_initial)) {
    throw ConfigError("anneal schedule: t_initial must be a positive finite temperature");
  }
  if (!(t_final > 0.0)) throw ConfigError("anneal schedule: t_final must be positive");
  if (!(t_final < t_initial)) throw ConfigError("anneal schedule: t_final must be below t_initial");
  if (sweeps < 1) throw ConfigError("anneal schedule: sweeps must be at least 1");
}

double AnnealSchedule::cooling_ratio() const {
  if (sweeps <= 1) return 1.0;
  return std::pow(t_final / t_initial, 1.0 / static_cast<double>(sweeps - 1));
}

double AnnealSchedule::temperature(std::size_t sweep) const {
  if (sweeps <= 1) return t_initial;
  const double frac = static_cast<double>(sweep) / static_cast<double>(sweeps - 1);
  return t_initial * std::pow(t_final / t_initial, frac);
}

AnnealSchedule AnnealSchedule::defaults_for(const IsingProblem& problem, std::size_t sweeps) {
  const double scale = std::max({problem.max_abs_bias(), problem.max_abs_coupling(), 1.0});
  return AnnealSchedule{10.0 * scale, 1e-2 * scale, sweeps};
}

SolveResult sa_solve(const IsingProblem& problem, const AnnealSchedule& schedule,
                     std::uint64_t seed, const std::optional<SpinConfiguration>& initial) {
  schedule.validate();
  const auto start = Clock::now();
  const std::size_t n = problem.size();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);

  std::vector<Spin> z(n);
  if (initial) {
    if (initial->size() != n) throw DimensionError("initial configuration", n, initial->size());
    std::copy(initial->spins().begin(), initial->spins().end(), z.begin());
  } else {
    for (auto& s : z) s = (rng() >> 63) ? 1 : -1;
  }

  const auto& topo = problem.topology();
  const auto offsets = topo.adjacency_offsets();
  const auto adjacency = topo.adjacency();
  const auto couplings = problem.couplings();

  auto h = local_fields(problem, z);
  double e = energy(problem, SpinConfiguration(z));
  double best_e = e;
  std::vector<Spin> best = z;

  // exp(-44.4) is below the resolution of a 53-bit uniform draw.
  constexpr double kRejectThreshold = 44.4;

  for (std::size_t sweep = 0; sweep < schedule.sweeps; ++sweep) {
    const double beta = 1.0 / schedule.temperature(sweep);
    for (std::size_t i = 0; i < n; ++i) {
      const double delta = -2.0 * z[i] * h[i];
      bool accept = delta <= 0.0;
      if (!accept && delta * beta < kRejectThreshold) {
        accept = uniform(rng) < std::exp(-delta * beta);
      }
      if (!accept) continue;
      z[i] = static_cast<Spin>(-z[i]);
      const double twice_zi = 2.0 * z[i];
      for (auto k = offsets[i]; k < offsets[i + 1]; ++k) {
        h[adjacency[k].spin] += twice_zi * couplings[adjacency[k].edge];
      }
      e += delta;
      if (e < best_e) {
        best_e = e;
        best = z;
      }
    }
  }

  SolveResult result;
  result.configuration = SpinConfiguration(std::move(best));
  result.energy = energy(problem, result.configuration);
  result.metadata.backend = "simulated-annealing";
  result.metadata.seed = seed;
  result.metadata.wall_time = Clock::now() - start;
  return result;
}

SimulatedAnnealer::SimulatedAnnealer(AnnealerOptions options) : options_(options) {
  if (options_.sweeps < 1) throw ConfigError("simulated-annealing: sweeps must be at least 1");
  if (options_.reads < 1) throw ConfigError("simulated-annealing: reads must be at least 1");
  if (options_.t_initial && options_.t_final) {
    AnnealSchedule{*options_.t_initial, *options_.t_final, options_.sweeps}.validate();
  }
}

AnnealSchedule SimulatedAnnealer::schedule_for(const IsingProblem& problem) const {
  auto schedule = AnnealSchedule::defaults_for(problem, options_.sweeps);
  if (options_.t_initial) {
    schedule.t_initial = *options_.t_initial;
    if (!options_.t_final) schedule.t_final = 1e-3 * schedule.t_initial;
  }
  if (options_.t_final) schedule.t_final = *options_.t_final;
  return schedule;
}

SolveResult SimulatedAnnealer::solve(const IsingProblem& problem, std::uint64_t seed) const {
  const auto start = Clock::now();
  const auto schedule = schedule_for(problem);
  SolveResult best = sa_solve(problem, schedule, seed);
  for (std::size_t r = 1; r < options_.reads; ++r) {
    auto candidate = sa_solve(problem, schedule, splitmix64(seed + r));
    if (candidate.energy < best.energy) best = std::move(candidate);
  }
  best.metadata.seed = seed;
  best.metadata.wall_time = Clock::now() - start;
  return best;
}

BackendParams SimulatedAnnealer::params() const {
  BackendParams p;
  p["sweeps"] = std::to_string(options_.sweeps);
  p["reads"] = std::to_string(options_.reads);
  auto fmt = [](double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
  };
  if (options_.t_initial) p["t_initial"] = fmt(*options_.t_initial);
  if (options_.t_final) p["t_final"] = fmt(*options_.t_final);
  return p;
}

std::vector<std::string> backend_names() { return {"exact", "simulated-annealing"}; }

namespace {

std::size_t parse_count(const std::string& key, const std::string& value) {
  std::size_t out = 0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || ptr != value.data() + value.size() || out == 0) {
    throw ConfigError("backend parameter '" + key + "' must be a positive integer, got '" +
                      value + "'");
  }
  return out;
}

double parse_real(const std::string& key, const std::string& value) {
  double out = 0.0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || ptr != value.data() + value.size() || !std::isfinite(out)) {
    throw ConfigError("backend parameter '" + key + "' must be a real number, got '" + value +
                      "'");
  }
  return out;
}

}  // namespace

std::unique_ptr<IsingMachine> make_backend(const std::string& name, const BackendParams& params) {
  if (name == "exact") {
    if (!params.empty()) {
      throw ConfigError("backend 'exact' takes no parameters, got '" + params.begin()->first +
                        "'");
    }
    return std::make_unique<ExactSolver>();
  }
  if (name == "simulated-annealing" || name == "sa") {
    AnnealerOptions options;
    for (const auto& [key, value] : params) {
      if (key == "sweeps") {
        options.sweeps = parse_count(key, value);
      } else if (key == "reads") {
        options.reads = parse_count(key, value);
      } else if (key == "t_initial") {
        options.t_initial = parse_real(key, value);
      } else if (key == "t_final") {
        options.t_final = parse_real(key, value);
      } else {
        throw ConfigError("backend 'simulated-annealing' does not accept parameter '" + key +
                          "' (known: sweeps, reads, t_initial, t_final)");
      }
    }
    return std::make_unique<SimulatedAnnealer>(options);
  }
  std::string known;
  for (const auto& b : backend_names()) known += (known.empty() ? "" : ", ") + b;
  throw ConfigError("unknown backend '" + name + "' (registered: " + known + ")");
}

}  // namespace ising
