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

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ising/datasets.hpp"
#include "ising/model.hpp"
#include "ising/solver.hpp"
#include "ising/training.hpp"

namespace ising {

// Resolved configuration of one training run. Serialized as a flat INI
// document with [data], [model], [training] and [solver] sections.
struct ExperimentConfig {
  std::string preset;  // empty for hand-built configs

  struct Data {
    std::string source = "random";  // random | lin | quad | bas | csv
    std::string path;               // csv training set
    std::string test_path;          // optional csv test set
    std::size_t n = 10;
    std::size_t samples = 20;
    std::size_t test_samples = 0;
    std::size_t k = 12;
    double lo = -1.0;
    double hi = 1.0;
    bool grid = true;
    bool signed_inputs = false;
    bool swap_orientation = false;
    std::uint64_t seed = 1;
    std::uint64_t test_seed = 2;
  } data;

  struct Model {
    std::string preprocess = "identity";  // identity | offset
    std::vector<double> offset_step;      // one value, broadcast, or one per feature
    std::size_t replicas = 1;
    double lambda = 1.0;
    // Unset: computed from the first sampling round (epsilon_init).
    std::optional<double> epsilon;
    std::optional<double> coupling_min;
    std::optional<double> coupling_max;
  } model;

  struct Training {
    double eta = 0.1;
    std::size_t epochs = 10;
    bool update_lambda = false;
    bool update_epsilon = false;
    SeedPolicy seed_policy = SeedPolicy::per_call;
    std::uint64_t seed = 0;
    bool classification = false;
    std::size_t checkpoint_every = 0;
    double divergence_factor = 1e6;
    std::size_t workers = 0;
  } training;

  struct Solver {
    std::string backend = "simulated-annealing";
    BackendParams params;
  } solver;

  // "section.key" -> "published" | "default" for values fixed by a preset.
  std::map<std::string, std::string> provenance;
};

std::vector<std::string> preset_names();

// Presets: random, fn-lin, fn-quad (size 50 or 150), bas. Throws ConfigError
// for unknown names or sizes.
ExperimentConfig make_preset(const std::string& name, std::size_t size = 50);

// Sets "section.key" from its text form. Throws ConfigError naming the key
// when it is unknown or the value does not parse.
void apply_setting(ExperimentConfig& config, const std::string& key, const std::string& value);

// Every key with its current value, in a stable order.
std::vector<std::pair<std::string, std::string>> config_entries(const ExperimentConfig& config);

// Applies an INI file on top of `base`.
ExperimentConfig load_config_file(const std::filesystem::path& path, ExperimentConfig base = {});
ExperimentConfig parse_config(const std::string& ini_text, ExperimentConfig base = {});
std::string to_ini(const ExperimentConfig& config);

// Checks cross-field consistency and backend capacity up front.
void validate_config(const ExperimentConfig& config);

std::unique_ptr<IsingMachine> make_machine(const ExperimentConfig& config);
TrainConfig train_config(const ExperimentConfig& config);

struct PreparedData {
  Dataset train;
  std::optional<Dataset> test;
  std::vector<BasMatrix> train_matrices;
  std::vector<BasMatrix> test_matrices;
};
PreparedData prepare_data(const ExperimentConfig& config);

// Zero couplings over the configured preprocessing; epsilon from config, or
// from epsilon_init on `train` when unset.
ModelState initial_model(const ExperimentConfig& config, const Dataset& train,
                         const IsingMachine& machine);

// epoch,train_mse,test_mse,accuracy,mean_step; accuracy is the training
// accuracy and missing values are empty cells.
void write_metrics_csv(const std::vector<EpochRecord>& records, std::ostream& out);
std::string metrics_csv(const std::vector<EpochRecord>& records);

struct RunOutputs {
  TrainReport report;
  double epsilon = 0.0;  // value used at epoch 0
  std::optional<std::size_t> overlap;
  std::filesystem::path metrics;
  std::filesystem::path checkpoint;
  std::filesystem::path manifest;
  std::filesystem::path config;
};

// Prepares data, trains, and writes metrics.csv, model.json, config.ini and
// manifest.json under out_dir (plus checkpoints/epoch-<k>.json when
// checkpoint_every > 0). Creates out_dir.
RunOutputs run_experiment(const ExperimentConfig& config, const std::filesystem::path& out_dir,
                          const std::string& command = "train");

std::string manifest_json(const ExperimentConfig& config, const RunOutputs& outputs,
                          const std::string& command);
// Resolved configuration recorded in a manifest.
ExperimentConfig config_from_manifest(const std::filesystem::path& path);

std::string version_string();

// Default output directory: $ISING_LEARN_OUT_DIR or "runs".
std::filesystem::path default_out_dir();

// --- reproduction of the experiment presets ---

struct ReproduceOptions {
  std::size_t size = 50;
  std::optional<std::size_t> runs;  // random: datasets (default 30); others: seeds, best kept
  std::uint64_t seed = 1;
  std::optional<std::string> backend;
  BackendParams backend_params;
  std::size_t sweep_points = 50;
  std::size_t workers = 0;
};

struct ReproduceResult {
  std::string preset;
  // random: per-run records; others: records of every attempted seed. A run
  // stopped by the divergence guard ends with the epoch that tripped it.
  std::vector<std::vector<EpochRecord>> runs;
  std::vector<std::size_t> diverged;  // indices into runs
  std::size_t best_run = 0;
  // random: per epoch, across the runs that reached that epoch.
  std::vector<double> mean_loss;
  std::vector<double> std_loss;
  std::vector<std::size_t> active_runs;
  ModelState best_state;
  // fn presets: x, f(x), F_model(x) over sweep_points grid points.
  std::vector<std::array<double, 3>> sweep;
  std::optional<std::size_t> overlap;  // bas: train rows also in the test set
  // Data of the best run (fn presets and bas).
  std::optional<Dataset> train_data;
  std::optional<Dataset> test_data;
  std::vector<std::filesystem::path> files;
};

ReproduceResult reproduce(const std::string& preset, const ReproduceOptions& options,
                          const std::filesystem::path& out_dir);

}  // namespace ising
