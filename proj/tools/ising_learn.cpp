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

// ising-learn: dataset generation, training, prediction and experiment
// reproduction for the Ising-machine regression model.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ising/checkpoint.hpp"
#include "ising/datasets.hpp"
#include "ising/errors.hpp"
#include "ising/experiment.hpp"
#include "ising/model.hpp"
#include "ising/solver.hpp"
#include "ising/text.hpp"
#include "ising/training.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct GlobalOptions {
  std::optional<std::string> backend;
  std::vector<std::string> backend_params;  // key=value
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<std::string> config;
  std::optional<std::size_t> workers;
};

std::pair<std::string, std::string> split_assignment(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ising::ConfigError("expected key=value, got '" + text + "'");
  }
  return {std::string(ising::trim(text.substr(0, eq))),
          std::string(ising::trim(text.substr(eq + 1)))};
}

fs::path out_dir_of(const GlobalOptions& g) {
  return g.out_dir ? fs::path(*g.out_dir) : ising::default_out_dir();
}

std::vector<double> parse_vector(const std::string& text) {
  std::vector<double> out;
  for (const auto& cell : ising::split(text, ',')) {
    double v = 0.0;
    if (!ising::parse_double(cell, v)) {
      throw ising::ConfigError("input vector: '" + cell + "' is not a number");
    }
    out.push_back(v);
  }
  return out;
}

std::string spins_text(const ising::SpinConfiguration& z) {
  std::string s;
  for (auto v : z.spins()) s += v > 0 ? '+' : '-';
  return s;
}

// --- gen-data ---------------------------------------------------------------

struct GenDataOptions {
  std::string kind;
  std::optional<std::size_t> n;
  std::optional<std::size_t> samples;
  std::size_t k = 12;
  double lo = -1.0;
  double hi = 1.0;
  bool random_x = false;
  bool signed_inputs = false;
  bool swap_orientation = false;
  std::optional<std::string> out;
  std::optional<std::string> matrices;
};

int cmd_gen_data(const GenDataOptions& o, const GlobalOptions& g) {
  const auto seed = g.seed.value_or(1);
  std::optional<ising::Dataset> data;
  std::vector<ising::BasMatrix> matrices;
  if (o.kind == "random") {
    if (!o.n) throw ising::ConfigError("gen-data random requires --n");
    data = ising::gen_random(*o.n, *o.samples, o.lo, o.hi, seed);
  } else if (o.kind == "lin" || o.kind == "quad") {
    data = ising::gen_function(o.kind == "lin" ? ising::TargetFunction::lin
                                               : ising::TargetFunction::quad,
                               *o.samples, seed, !o.random_x);
  } else {
    auto bas = ising::gen_bas(o.k, *o.samples, seed, {o.swap_orientation, o.signed_inputs});
    data = std::move(bas.data);
    matrices = std::move(bas.matrices);
  }

  fs::path path;
  if (o.out) {
    path = *o.out;
  } else {
    fs::create_directories(out_dir_of(g));
    path = out_dir_of(g) / (o.kind + ".csv");
  }
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  ising::save_csv(*data, path);
  if (o.matrices && !matrices.empty()) {
    std::ofstream grid(*o.matrices);
    for (std::size_t a = 0; a < matrices.size(); ++a) {
      grid << "# " << a << ' ' << ising::to_string(matrices[a].label) << '\n'
           << matrices[a].to_grid() << '\n';
    }
  }
  std::cout << "wrote " << data->size() << " samples x " << data->input_dim() << " inputs to "
            << path.string() << '\n';
  return 0;
}

// --- train ------------------------------------------------------------------

struct TrainOptions {
  std::optional<std::string> preset;
  std::size_t size = 50;
  std::optional<std::string> manifest;
  std::optional<std::string> data;
  std::optional<std::string> test_data;
  std::optional<double> eta;
  std::optional<std::size_t> epochs;
  std::optional<double> lambda;
  std::optional<std::string> epsilon;
  bool recompute_epsilon = false;
  std::optional<std::size_t> checkpoint_every;
  std::vector<std::string> settings;
};

int cmd_train(const TrainOptions& o, const GlobalOptions& g) {
  ising::ExperimentConfig config;
  if (o.manifest) {
    config = ising::config_from_manifest(*o.manifest);
  } else if (o.preset) {
    config = ising::make_preset(*o.preset, o.size);
  }
  if (g.config) config = ising::load_config_file(*g.config, std::move(config));
  if (o.data) {
    ising::apply_setting(config, "data.source", "csv");
    ising::apply_setting(config, "data.path", *o.data);
  }
  if (o.test_data) ising::apply_setting(config, "data.test_path", *o.test_data);
  if (g.backend) {
    ising::apply_setting(config, "solver.backend", *g.backend);
    if (config.solver.backend == "exact") config.solver.params.clear();
  }
  for (const auto& kv : g.backend_params) {
    const auto [k, v] = split_assignment(kv);
    ising::apply_setting(config, "solver." + k, v);
  }
  if (g.seed) {
    ising::apply_setting(config, "data.seed", std::to_string(*g.seed));
    ising::apply_setting(config, "training.seed", std::to_string(*g.seed));
  }
  if (g.workers) ising::apply_setting(config, "training.workers", std::to_string(*g.workers));
  if (o.eta) ising::apply_setting(config, "training.eta", ising::format_double(*o.eta));
  if (o.epochs) ising::apply_setting(config, "training.epochs", std::to_string(*o.epochs));
  if (o.lambda) ising::apply_setting(config, "model.lambda", ising::format_double(*o.lambda));
  if (o.epsilon) ising::apply_setting(config, "model.epsilon", *o.epsilon);
  if (o.recompute_epsilon) ising::apply_setting(config, "model.epsilon", "auto");
  if (o.checkpoint_every) {
    ising::apply_setting(config, "training.checkpoint_every", std::to_string(*o.checkpoint_every));
  }
  for (const auto& kv : o.settings) {
    const auto [k, v] = split_assignment(kv);
    ising::apply_setting(config, k, v);
  }

  const auto dir = out_dir_of(g);
  const auto out = ising::run_experiment(config, dir, "train");
  const auto& last = out.report.records.back();
  std::cout << "epochs: " << out.report.records.size()
            << "  initial mse: " << ising::format_double(out.report.records.front().train_mse)
            << "  final mse: " << ising::format_double(last.train_mse);
  if (last.train_accuracy) std::cout << "  train accuracy: " << *last.train_accuracy;
  if (last.test_accuracy) std::cout << "  test accuracy: " << *last.test_accuracy;
  std::cout << "\nepsilon: " << ising::format_double(out.epsilon)
            << "  solver calls: " << out.report.solver_calls << '\n'
            << "metrics: " << out.metrics.string() << "\ncheckpoint: " << out.checkpoint.string()
            << "\nmanifest: " << out.manifest.string() << '\n';
  return 0;
}

// --- predict ----------------------------------------------------------------

struct PredictOptions {
  std::string checkpoint;
  std::optional<std::string> input;
  std::optional<std::string> csv;
  std::optional<std::string> matrix;
  bool signed_inputs = false;
  bool verbose = false;
};

int cmd_predict(const PredictOptions& o, const GlobalOptions& g) {
  const auto cp = ising::load_checkpoint(o.checkpoint);
  std::unique_ptr<ising::IsingMachine> machine;
  if (g.backend) {
    ising::BackendParams params;
    for (const auto& kv : g.backend_params) params.insert(split_assignment(kv));
    machine = ising::make_backend(*g.backend, params);
  } else {
    machine = ising::make_backend(cp.backend, cp.backend_params);
  }
  const auto seed = g.seed.value_or(0);
  const auto& state = cp.state;

  auto report = [&](const ising::Prediction& p) {
    std::cout << ising::format_double(p.value) << '\n';
    if (o.verbose) {
      std::cout << "E0 " << ising::format_double(p.solve.energy) << "\nz* "
                << spins_text(p.solve.configuration) << '\n';
    }
  };

  const int sources = int(o.input.has_value()) + int(o.csv.has_value()) + int(o.matrix.has_value());
  if (sources != 1) throw ising::ConfigError("predict needs exactly one of --input, --csv, --matrix");

  if (o.input) {
    const auto theta = parse_vector(*o.input);
    if (theta.size() != state.input_dim) {
      throw ising::DimensionError("input vector (checkpoint expects n = " +
                                      std::to_string(state.input_dim) + ")",
                                  state.input_dim, theta.size());
    }
    report(ising::predict(state, theta, *machine, seed));
  } else if (o.csv) {
    const auto data = ising::load_csv(*o.csv);
    if (data.input_dim() != state.input_dim) {
      throw ising::DimensionError("csv rows (checkpoint expects n = " +
                                      std::to_string(state.input_dim) + ")",
                                  state.input_dim, data.input_dim());
    }
    for (std::size_t a = 0; a < data.size(); ++a) {
      report(ising::predict(state, data.input(a), *machine, seed + a));
    }
  } else {
    std::ifstream in(*o.matrix);
    if (!in) throw ising::Error("cannot open " + *o.matrix);
    const auto m = ising::parse_bas_grid(in);
    const auto theta = ising::bas_inputs(m, {false, o.signed_inputs});
    if (theta.size() != state.input_dim) {
      throw ising::DimensionError("matrix cells (checkpoint expects n = " +
                                      std::to_string(state.input_dim) + ")",
                                  state.input_dim, theta.size());
    }
    const auto p = ising::predict(state, theta, *machine, seed);
    report(p);
    std::cout << "label " << ising::to_string(ising::bas_decode(p.value)) << '\n';
  }
  return 0;
}

// --- reproduce --------------------------------------------------------------

struct ReproduceCliOptions {
  std::string preset;
  std::size_t size = 50;
  std::optional<std::size_t> runs;
  std::size_t sweep_points = 50;
};

int cmd_reproduce(const ReproduceCliOptions& o, const GlobalOptions& g) {
  ising::ReproduceOptions opts;
  opts.size = o.size;
  opts.runs = o.runs;
  opts.seed = g.seed.value_or(1);
  opts.backend = g.backend;
  for (const auto& kv : g.backend_params) opts.backend_params.insert(split_assignment(kv));
  opts.sweep_points = o.sweep_points;
  opts.workers = g.workers.value_or(0);
  const auto dir = out_dir_of(g) / (o.preset == "fn-lin" || o.preset == "fn-quad"
                                        ? o.preset + "-" + std::to_string(o.size)
                                        : o.preset);
  const auto result = ising::reproduce(o.preset, opts, dir);

  if (!result.mean_loss.empty()) {
    std::cout << "runs: " << result.runs.size()
              << "  mean initial mse: " << ising::format_double(result.mean_loss.front())
              << "  mean final mse: " << ising::format_double(result.mean_loss.back()) << '\n';
    if (!result.diverged.empty()) {
      std::cout << "diverged runs: " << result.diverged.size() << " of " << result.runs.size()
                << " (see runs.csv)\n";
    }
  } else {
    const auto& rec = result.runs[result.best_run];
    std::cout << "best seed: " << result.best_run
              << "  initial mse: " << ising::format_double(rec.front().train_mse)
              << "  final mse: " << ising::format_double(rec.back().train_mse);
    if (rec.back().train_accuracy) {
      std::cout << "  train accuracy: " << *rec.back().train_accuracy
                << "  test accuracy: " << rec.back().test_accuracy.value_or(0.0);
    }
    std::cout << '\n';
    if (result.overlap) std::cout << "train/test overlap: " << *result.overlap << " rows\n";
  }
  for (const auto& f : result.files) std::cout << "wrote " << f.string() << '\n';
  return 0;
}

// --- solve ------------------------------------------------------------------

int cmd_solve(const std::string& problem_path, bool verbose, const GlobalOptions& g) {
  std::ifstream in(problem_path);
  if (!in) throw ising::Error("cannot open " + problem_path);
  const auto problem = ising::read_problem(in);
  ising::BackendParams params;
  for (const auto& kv : g.backend_params) params.insert(split_assignment(kv));
  const auto machine = ising::make_backend(g.backend.value_or("exact"), params);
  const auto result = machine->solve(problem, g.seed.value_or(0));
  std::cout << ising::format_double(result.energy) << '\n' << spins_text(result.configuration) << '\n';
  if (verbose) {
    std::cout << "backend " << result.metadata.backend << "  seed " << result.metadata.seed
              << "  wall " << result.metadata.wall_time.count() << " s\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Train and run Ising-machine regression models"};
  app.require_subcommand(1);
  app.set_version_flag("--version", ising::version_string());

  GlobalOptions g;
  app.add_option("--backend", g.backend, "Ising machine: exact | simulated-annealing");
  app.add_option("--backend-param", g.backend_params, "Backend parameter key=value (repeatable)");
  app.add_option("--seed", g.seed, "Base random seed");
  app.add_option("--out-dir", g.out_dir, "Output directory (default $ISING_LEARN_OUT_DIR or ./runs)");
  app.add_option("--config", g.config, "INI config file; flags override its values")
      ->check(CLI::ExistingFile);
  app.add_option("--workers", g.workers, "Solver threads per epoch (0 = all cores)");

  GenDataOptions gen;
  auto* gen_cmd = app.add_subcommand("gen-data", "Generate a dataset CSV");
  gen_cmd->fallthrough();
  gen_cmd->add_option("kind", gen.kind, "random | lin | quad | bas")
      ->required()
      ->check(CLI::IsMember({"random", "lin", "quad", "bas"}));
  gen_cmd->add_option("--samples", gen.samples, "Number of samples")->required();
  gen_cmd->add_option("--n", gen.n, "Input dimension (random)");
  gen_cmd->add_option("--k", gen.k, "Matrix size (bas)");
  gen_cmd->add_option("--lo", gen.lo, "Lower bound (random)");
  gen_cmd->add_option("--hi", gen.hi, "Upper bound (random)");
  gen_cmd->add_flag("--random-x", gen.random_x, "Uniform x draws instead of a grid (lin/quad)");
  gen_cmd->add_flag("--signed", gen.signed_inputs, "Map bas cells to -1/+1");
  gen_cmd->add_flag("--swap-orientation", gen.swap_orientation,
                    "bars = constant rows, stripes = constant columns");
  gen_cmd->add_option("--out", gen.out, "Output CSV path");
  gen_cmd->add_option("--matrices", gen.matrices, "Also write bas matrices as 0/1 grids");

  TrainOptions tr;
  auto* train_cmd = app.add_subcommand("train", "Train a model and write metrics, checkpoint and manifest");
  train_cmd->fallthrough();
  train_cmd->add_option("--preset", tr.preset, "random | fn-lin | fn-quad | bas");
  train_cmd->add_option("--size", tr.size, "Total spins for fn presets (50 or 150)");
  train_cmd->add_option("--manifest", tr.manifest, "Replay the run recorded in a manifest")
      ->check(CLI::ExistingFile);
  train_cmd->add_option("--data", tr.data, "Training CSV")->check(CLI::ExistingFile);
  train_cmd->add_option("--test-data", tr.test_data, "Test CSV")->check(CLI::ExistingFile);
  train_cmd->add_option("--eta", tr.eta, "Learning rate");
  train_cmd->add_option("--epochs", tr.epochs, "Number of epochs");
  train_cmd->add_option("--lambda", tr.lambda, "Output scale");
  train_cmd->add_option("--epsilon", tr.epsilon, "Output offset, or 'auto'");
  train_cmd->add_flag("--recompute-epsilon", tr.recompute_epsilon,
                      "Compute epsilon from the first sampling round");
  train_cmd->add_option("--checkpoint-every", tr.checkpoint_every, "Checkpoint every k epochs");
  train_cmd->add_option("--set", tr.settings, "Config override section.key=value (repeatable)");

  PredictOptions pr;
  auto* predict_cmd = app.add_subcommand("predict", "Evaluate a trained model");
  predict_cmd->fallthrough();
  predict_cmd->add_option("--checkpoint", pr.checkpoint, "Model checkpoint")
      ->required()
      ->check(CLI::ExistingFile);
  predict_cmd->add_option("--input", pr.input, "Comma-separated input vector (use --input=-1,2 for leading minus)");
  predict_cmd->add_option("--csv", pr.csv, "CSV of inputs")->check(CLI::ExistingFile);
  predict_cmd->add_option("--matrix", pr.matrix, "0/1 grid file for a bars-and-stripes model")
      ->check(CLI::ExistingFile);
  predict_cmd->add_flag("--signed", pr.signed_inputs, "Map grid cells to -1/+1");
  predict_cmd->add_flag("-v,--verbose", pr.verbose, "Also print E0 and z*");

  ReproduceCliOptions rp;
  auto* repro_cmd = app.add_subcommand("reproduce", "Run an experiment preset end to end");
  repro_cmd->fallthrough();
  repro_cmd->add_option("preset", rp.preset, "random | fn-lin | fn-quad | bas")
      ->required()
      ->check(CLI::IsMember(ising::preset_names()));
  repro_cmd->add_option("--size", rp.size, "Total spins for fn presets (50 or 150)");
  repro_cmd->add_option("--runs", rp.runs, "Datasets (random) or seeds, best kept (others)");
  repro_cmd->add_option("--sweep-points", rp.sweep_points, "Grid points for the model sweep");

  std::string problem_path;
  bool solve_verbose = false;
  auto* solve_cmd = app.add_subcommand("solve", "Solve an Ising problem file");
  solve_cmd->fallthrough();
  solve_cmd->add_option("problem", problem_path, "Problem text file")
      ->required()
      ->check(CLI::ExistingFile);
  solve_cmd->add_flag("-v,--verbose", solve_verbose, "Print solver metadata");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*gen_cmd) return cmd_gen_data(gen, g);
    if (*train_cmd) return cmd_train(tr, g);
    if (*predict_cmd) return cmd_predict(pr, g);
    if (*repro_cmd) return cmd_reproduce(rp, g);
    if (*solve_cmd) return cmd_solve(problem_path, solve_verbose, g);
  } catch (const ising::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}
