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

#include "ising/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <json.hpp>

#include "ising/checkpoint.hpp"
#include "ising/errors.hpp"
#include "ising/seeding.hpp"
#include "ising/summation.hpp"
#include "ising/text.hpp"

#ifndef ISING_LEARN_VERSION
#define ISING_LEARN_VERSION "0.0.0"
#endif

namespace ising {
namespace {

using Getter = std::function<std::string(const ExperimentConfig&)>;
using Setter = std::function<void(ExperimentConfig&, const std::string&)>;

struct Key {
  std::string name;
  Getter get;
  Setter set;
};

[[noreturn]] void bad_value(const std::string& key, const std::string& value,
                            const std::string& expected) {
  throw ConfigError("config key '" + key + "': expected " + expected + ", got '" + value + "'");
}

template <typename Access, typename Show, typename Parse>
Key make_key(std::string name, Access access, Show show, Parse parse) {
  Key k;
  k.name = name;
  k.get = [access, show](const ExperimentConfig& c) {
    return show(access(const_cast<ExperimentConfig&>(c)));
  };
  k.set = [access, parse, name](ExperimentConfig& c, const std::string& v) {
    access(c) = parse(name, v);
  };
  return k;
}

std::string show_size(const std::size_t& v) { return std::to_string(v); }
std::string show_u64(const std::uint64_t& v) { return std::to_string(v); }
std::string show_real(const double& v) { return format_double(v); }
std::string show_bool(const bool& v) { return v ? "true" : "false"; }
std::string show_string(const std::string& v) { return v; }

std::size_t read_size(const std::string& key, const std::string& v) {
  std::size_t out = 0;
  if (!parse_size(v, out)) bad_value(key, v, "a non-negative integer");
  return out;
}
std::uint64_t read_u64(const std::string& key, const std::string& v) {
  std::size_t out = 0;
  if (!parse_size(v, out)) bad_value(key, v, "a non-negative integer");
  return out;
}
double read_real(const std::string& key, const std::string& v) {
  double out = 0.0;
  if (!parse_double(v, out) || !std::isfinite(out)) bad_value(key, v, "a finite real number");
  return out;
}
bool read_bool(const std::string& key, const std::string& v) {
  bool out = false;
  if (!parse_bool(v, out)) bad_value(key, v, "true or false");
  return out;
}

std::function<std::string(const std::string&, const std::string&)> one_of(
    std::vector<std::string> allowed) {
  return [allowed](const std::string& key, const std::string& v) {
    const auto t = std::string(trim(v));
    if (std::find(allowed.begin(), allowed.end(), t) == allowed.end()) {
      std::string list;
      for (const auto& a : allowed) list += (list.empty() ? "" : " | ") + a;
      bad_value(key, v, list);
    }
    return t;
  };
}

std::string show_optional_real(const std::optional<double>& v, const char* none) {
  return v ? format_double(*v) : std::string(none);
}

const std::vector<Key>& key_table() {
  using C = ExperimentConfig;
  static const std::vector<Key> table = [] {
    std::vector<Key> t;
    auto add = [&t](Key k) { t.push_back(std::move(k)); };

    add(make_key("data.source", [](C& c) -> std::string& { return c.data.source; },
                                       show_string, one_of({"random", "lin", "quad", "bas", "csv"})));
    add(make_key("data.path", [](C& c) -> std::string& { return c.data.path; },
                                       show_string, [](const std::string&, const std::string& v) {
                                         return std::string(trim(v));
                                       }));
    add(make_key("data.test_path",
                                       [](C& c) -> std::string& { return c.data.test_path; },
                                       show_string, [](const std::string&, const std::string& v) {
                                         return std::string(trim(v));
                                       }));
    add(make_key("data.n", [](C& c) -> std::size_t& { return c.data.n; },
                                       show_size, read_size));
    add(make_key("data.samples",
                                       [](C& c) -> std::size_t& { return c.data.samples; },
                                       show_size, read_size));
    add(make_key("data.test_samples",
                                       [](C& c) -> std::size_t& { return c.data.test_samples; },
                                       show_size, read_size));
    add(make_key("data.k", [](C& c) -> std::size_t& { return c.data.k; },
                                       show_size, read_size));
    add(make_key("data.lo", [](C& c) -> double& { return c.data.lo; }, show_real,
                                  read_real));
    add(make_key("data.hi", [](C& c) -> double& { return c.data.hi; }, show_real,
                                  read_real));
    add(make_key("data.grid", [](C& c) -> bool& { return c.data.grid; }, show_bool,
                                read_bool));
    add(make_key("data.signed_inputs",
                                [](C& c) -> bool& { return c.data.signed_inputs; }, show_bool,
                                read_bool));
    add(make_key("data.swap_orientation",
                                [](C& c) -> bool& { return c.data.swap_orientation; }, show_bool,
                                read_bool));
    add(make_key("data.seed",
                                         [](C& c) -> std::uint64_t& { return c.data.seed; },
                                         show_u64, read_u64));
    add(make_key("data.test_seed",
                                         [](C& c) -> std::uint64_t& { return c.data.test_seed; },
                                         show_u64, read_u64));

    add(make_key("model.preprocess",
                                       [](C& c) -> std::string& { return c.model.preprocess; },
                                       show_string, one_of({"identity", "offset"})));
    add(make_key(
        "model.offset_step", [](C& c) -> std::vector<double>& { return c.model.offset_step; },
        [](const std::vector<double>& v) {
          std::string s;
          for (double d : v) s += (s.empty() ? "" : ",") + format_double(d);
          return s;
        },
        [](const std::string& key, const std::string& v) {
          std::vector<double> out;
          if (trim(v).empty()) return out;
          for (const auto& cell : split(v, ',')) out.push_back(read_real(key, cell));
          return out;
        }));
    add(make_key("model.replicas",
                                       [](C& c) -> std::size_t& { return c.model.replicas; },
                                       show_size, read_size));
    add(make_key("model.lambda", [](C& c) -> double& { return c.model.lambda; },
                                  show_real, read_real));
    add(make_key(
        "model.epsilon", [](C& c) -> std::optional<double>& { return c.model.epsilon; },
        [](const std::optional<double>& v) { return show_optional_real(v, "auto"); },
        [](const std::string& key, const std::string& v) -> std::optional<double> {
          if (trim(v) == "auto") return std::nullopt;
          return read_real(key, v);
        }));
    for (const char* which : {"model.coupling_min", "model.coupling_max"}) {
      const bool is_min = std::string(which) == "model.coupling_min";
      Key k;
      k.name = which;
      k.get = [is_min](const C& c) {
        return show_optional_real(is_min ? c.model.coupling_min : c.model.coupling_max, "none");
      };
      k.set = [is_min, which](C& c, const std::string& v) {
        std::optional<double> val;
        if (trim(v) != "none") val = read_real(which, v);
        (is_min ? c.model.coupling_min : c.model.coupling_max) = val;
      };
      add(std::move(k));
    }

    add(make_key("training.eta", [](C& c) -> double& { return c.training.eta; },
                                  show_real, read_real));
    add(make_key("training.epochs",
                                       [](C& c) -> std::size_t& { return c.training.epochs; },
                                       show_size, read_size));
    add(make_key("training.update_lambda",
                                [](C& c) -> bool& { return c.training.update_lambda; }, show_bool,
                                read_bool));
    add(make_key("training.update_epsilon",
                                [](C& c) -> bool& { return c.training.update_epsilon; },
                                show_bool, read_bool));
    {
      Key k;
      k.name = "training.seed_policy";
      k.get = [](const C& c) {
        return std::string(c.training.seed_policy == SeedPolicy::fixed ? "fixed" : "per-call");
      };
      k.set = [](C& c, const std::string& v) {
        const auto t = one_of({"fixed", "per-call"})("training.seed_policy", v);
        c.training.seed_policy = t == "fixed" ? SeedPolicy::fixed : SeedPolicy::per_call;
      };
      add(std::move(k));
    }
    add(make_key("training.seed",
                                         [](C& c) -> std::uint64_t& { return c.training.seed; },
                                         show_u64, read_u64));
    add(make_key("training.classification",
                                [](C& c) -> bool& { return c.training.classification; },
                                show_bool, read_bool));
    add(make_key(
        "training.checkpoint_every",
        [](C& c) -> std::size_t& { return c.training.checkpoint_every; }, show_size, read_size));
    add(make_key("training.divergence_factor",
                                  [](C& c) -> double& { return c.training.divergence_factor; },
                                  show_real, read_real));
    add(make_key("training.workers",
                                       [](C& c) -> std::size_t& { return c.training.workers; },
                                       show_size, read_size));

    add(make_key(
        "solver.backend", [](C& c) -> std::string& { return c.solver.backend; }, show_string,
        [](const std::string& key, const std::string& v) {
          auto t = std::string(trim(v));
          if (t == "sa") t = "simulated-annealing";
          const auto names = backend_names();
          if (std::find(names.begin(), names.end(), t) == names.end()) {
            std::string list;
            for (const auto& a : names) list += (list.empty() ? "" : ", ") + a;
            throw ConfigError("config key '" + key + "': unknown backend '" + t +
                              "' (registered: " + list + ")");
          }
          return t;
        }));
    return t;
  }();
  return table;
}

const Key* find_key(const std::string& name) {
  for (const auto& k : key_table()) {
    if (k.name == name) return &k;
  }
  return nullptr;
}

}  // namespace

void apply_setting(ExperimentConfig& config, const std::string& key, const std::string& value) {
  if (const auto* k = find_key(key)) {
    k->set(config, value);
    config.provenance.erase(key);
    return;
  }
  constexpr std::string_view solver_prefix = "solver.";
  if (key.rfind(solver_prefix, 0) == 0 && key.size() > solver_prefix.size()) {
    config.solver.params[key.substr(solver_prefix.size())] = std::string(trim(value));
    config.provenance.erase(key);
    return;
  }
  if (key == "preset") {
    config.preset = std::string(trim(value));
    return;
  }
  throw ConfigError("unknown config key '" + key + "'");
}

std::vector<std::pair<std::string, std::string>> config_entries(const ExperimentConfig& config) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& k : key_table()) out.emplace_back(k.name, k.get(config));
  for (const auto& [key, value] : config.solver.params) out.emplace_back("solver." + key, value);
  return out;
}

ExperimentConfig parse_config(const std::string& ini_text, ExperimentConfig base) {
  boost::property_tree::ptree tree;
  std::istringstream in(ini_text);
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& ex) {
    throw ParseError(ex.message(), ex.line());
  }
  for (const auto& [section, body] : tree) {
    if (body.empty()) {
      if (section == "preset") {
        base.preset = body.data();
        continue;
      }
      throw ConfigError("config key '" + section + "' must live in a section");
    }
    for (const auto& [key, value] : body) {
      apply_setting(base, section + "." + key, value.data());
    }
  }
  return base;
}

ExperimentConfig load_config_file(const std::filesystem::path& path, ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), std::move(base));
}

std::string to_ini(const ExperimentConfig& config) {
  std::ostringstream out;
  out << "; ising-learn " << version_string() << " resolved configuration\n";
  if (!config.preset.empty()) out << "; preset: " << config.preset << "\n";
  std::string section;
  for (const auto& [key, value] : config_entries(config)) {
    const auto dot = key.find('.');
    const auto sec = key.substr(0, dot);
    if (sec != section) {
      out << (section.empty() ? "" : "\n") << '[' << sec << "]\n";
      section = sec;
    }
    if (auto it = config.provenance.find(key); it != config.provenance.end()) {
      out << "; source: " << it->second << '\n';
    }
    out << key.substr(dot + 1) << " = " << value << '\n';
  }
  return out.str();
}

std::vector<std::string> preset_names() { return {"random", "fn-lin", "fn-quad", "bas"}; }

ExperimentConfig make_preset(const std::string& name, std::size_t size) {
  ExperimentConfig c;
  c.preset = name;
  auto published = [&c](std::initializer_list<const char*> keys) {
    for (const char* k : keys) c.provenance[k] = "published";
  };
  auto fallback = [&c](std::initializer_list<const char*> keys) {
    for (const char* k : keys) c.provenance[k] = "default";
  };

  if (name == "random") {
    c.data.source = "random";
    c.data.n = 10;
    c.data.samples = 20;
    c.data.lo = -1.0;
    c.data.hi = 1.0;
    c.model.lambda = 1.0;
    c.model.epsilon.reset();
    c.training.eta = 0.2;
    c.training.epochs = 50;
    c.solver.backend = "simulated-annealing";
    published({"data.source", "data.n", "data.samples", "data.lo", "data.hi", "model.preprocess",
           "model.lambda", "model.epsilon", "training.eta", "training.epochs", "solver.backend"});
    fallback({"data.seed", "training.seed", "training.seed_policy"});
    return c;
  }

  if (name == "fn-lin" || name == "fn-quad") {
    if (size != 50 && size != 150) {
      throw ConfigError("preset " + name + " is defined for --size 50 or 150, got " +
                        std::to_string(size));
    }
    const bool lin = name == "fn-lin";
    c.data.source = lin ? "lin" : "quad";
    c.data.n = 1;
    c.data.samples = 20;
    c.data.grid = true;
    c.model.preprocess = "offset";
    c.model.replicas = size;
    c.training.epochs = 200;
    if (lin) {
      c.model.offset_step = {0.8 / static_cast<double>(size)};
      c.model.lambda = size == 50 ? -0.3 : -0.1;
      c.model.epsilon = size == 50 ? -9.30 : 17.63;
      c.training.eta = 0.02;
    } else {
      c.model.offset_step = {1.0 / static_cast<double>(size)};
      c.model.lambda = size == 50 ? -0.05 : -0.0167;
      c.model.epsilon = size == 50 ? -2.70 : -4.23;
      c.training.eta = 0.25;
    }
    c.solver.backend = "simulated-annealing";
    published({"data.source", "data.samples", "model.preprocess", "model.offset_step",
           "model.replicas", "model.lambda", "model.epsilon", "training.eta", "training.epochs",
           "solver.backend"});
    fallback({"data.grid", "data.seed", "training.seed", "training.seed_policy"});
    return c;
  }

  if (name == "bas") {
    c.data.source = "bas";
    c.data.k = 12;
    c.data.samples = 80;
    c.data.test_samples = 80;
    c.model.lambda = -0.3;
    c.model.epsilon.reset();
    c.training.eta = 0.02;
    c.training.epochs = 8;
    c.training.classification = true;
    // Run on simulated annealing; the original run used annealing hardware.
    c.solver.backend = "simulated-annealing";
    published({"data.source", "data.k", "data.samples", "data.test_samples", "model.preprocess",
           "model.lambda", "model.epsilon", "training.eta", "training.epochs"});
    fallback({"solver.backend", "data.seed", "data.test_seed", "training.seed",
              "training.seed_policy", "data.swap_orientation", "data.signed_inputs"});
    return c;
  }

  std::string list;
  for (const auto& p : preset_names()) list += (list.empty() ? "" : ", ") + p;
  throw ConfigError("unknown preset '" + name + "' (known: " + list + ")");
}

std::unique_ptr<IsingMachine> make_machine(const ExperimentConfig& config) {
  return make_backend(config.solver.backend, config.solver.params);
}

TrainConfig train_config(const ExperimentConfig& config) {
  TrainConfig tc;
  tc.eta = config.training.eta;
  tc.epochs = config.training.epochs;
  tc.update_lambda = config.training.update_lambda;
  tc.update_epsilon = config.training.update_epsilon;
  tc.seed_policy = config.training.seed_policy;
  tc.seed = config.training.seed;
  tc.classification = config.training.classification;
  tc.divergence_factor = config.training.divergence_factor;
  tc.workers = config.training.workers;
  return tc;
}

namespace {

std::size_t input_dim_of(const ExperimentConfig& config) {
  const auto& d = config.data;
  if (d.source == "random") return d.n;
  if (d.source == "lin" || d.source == "quad") return 1;
  if (d.source == "bas") return d.k * d.k;
  return 0;  // csv: known after loading
}

PreprocessSpec preprocess_spec(const ExperimentConfig& config, std::size_t input_dim) {
  if (config.model.preprocess == "identity") return PreprocessSpec::identity();
  auto step = config.model.offset_step;
  if (step.size() == 1 && input_dim > 1) step.assign(input_dim, step.front());
  return PreprocessSpec::offset(std::move(step), config.model.replicas);
}

}  // namespace

void validate_config(const ExperimentConfig& config) {
  train_config(config).validate();
  make_machine(config);
  const auto& d = config.data;
  if (d.source == "csv" && d.path.empty()) throw ConfigError("config key 'data.path' is required for csv data");
  if (d.source != "csv" && d.samples == 0) throw ConfigError("config key 'data.samples' must be positive");
  if (d.source == "random" && (d.n == 0 || !(d.lo < d.hi))) {
    throw ConfigError("config keys 'data.n'/'data.lo'/'data.hi' describe an empty range");
  }
  if (d.source == "bas" && d.k < 2) throw ConfigError("config key 'data.k' must be at least 2");
  if (config.model.preprocess == "offset") {
    if (config.model.offset_step.empty()) {
      throw ConfigError("config key 'model.offset_step' is required for offset preprocessing");
    }
    if (config.model.replicas < 1) throw ConfigError("config key 'model.replicas' must be positive");
  } else if (config.model.replicas != 1) {
    throw ConfigError("config key 'model.replicas' must be 1 for identity preprocessing");
  }
  if (config.model.coupling_min && config.model.coupling_max &&
      *config.model.coupling_min > *config.model.coupling_max) {
    throw ConfigError("config key 'model.coupling_min' exceeds 'model.coupling_max'");
  }
  const auto n = input_dim_of(config);
  if (n > 0 && config.solver.backend == "exact") {
    const auto spins = config.model.preprocess == "identity" ? n : n * config.model.replicas;
    if (spins > ExactSolver::kMaxSpins) {
      throw CapacityError("model has " + std::to_string(spins) +
                          " spins but the exact backend is limited to " +
                          std::to_string(ExactSolver::kMaxSpins) +
                          "; use --backend simulated-annealing");
    }
  }
}

PreparedData prepare_data(const ExperimentConfig& config) {
  const auto& d = config.data;
  if (d.source == "random") {
    PreparedData p{gen_random(d.n, d.samples, d.lo, d.hi, d.seed), {}, {}, {}};
    if (d.test_samples > 0) p.test = gen_random(d.n, d.test_samples, d.lo, d.hi, d.test_seed);
    return p;
  }
  if (d.source == "lin" || d.source == "quad") {
    const auto f = d.source == "lin" ? TargetFunction::lin : TargetFunction::quad;
    PreparedData p{gen_function(f, d.samples, d.seed, d.grid), {}, {}, {}};
    if (d.test_samples > 0) p.test = gen_function(f, d.test_samples, d.test_seed, false);
    return p;
  }
  if (d.source == "bas") {
    BasOptions opts{d.swap_orientation, d.signed_inputs};
    auto train = gen_bas(d.k, d.samples, d.seed, opts);
    PreparedData p{std::move(train.data), {}, std::move(train.matrices), {}};
    if (d.test_samples > 0) {
      auto test = gen_bas(d.k, d.test_samples, d.test_seed, opts);
      p.test = std::move(test.data);
      p.test_matrices = std::move(test.matrices);
    }
    return p;
  }
  PreparedData p{load_csv(d.path), {}, {}, {}};
  if (!d.test_path.empty()) p.test = load_csv(d.test_path);
  return p;
}

ModelState initial_model(const ExperimentConfig& config, const Dataset& train,
                         const IsingMachine& machine) {
  const auto n = train.input_dim();
  auto state = ModelState::zero_initialized(n, preprocess_spec(config, n), config.model.lambda, 0.0);
  if (config.model.coupling_min) state.bounds.couplings.lo = *config.model.coupling_min;
  if (config.model.coupling_max) state.bounds.couplings.hi = *config.model.coupling_max;
  state.epsilon = config.model.epsilon
                      ? *config.model.epsilon
                      : epsilon_init(train, config.model.lambda, state, machine,
                                     splitmix64(config.training.seed ^ 0x65707331ULL));
  return state;
}

void write_metrics_csv(const std::vector<EpochRecord>& records, std::ostream& out) {
  out << "epoch,train_mse,test_mse,accuracy,mean_step\n";
  for (const auto& r : records) {
    out << r.epoch << ',' << format_double(r.train_mse) << ','
        << (r.test_mse ? format_double(*r.test_mse) : "") << ','
        << (r.train_accuracy ? format_double(*r.train_accuracy) : "") << ','
        << format_double(r.mean_step) << '\n';
  }
}

std::string metrics_csv(const std::vector<EpochRecord>& records) {
  std::ostringstream out;
  write_metrics_csv(records, out);
  return out.str();
}

namespace {

struct Execution {
  PreparedData data;
  double epsilon = 0.0;
  TrainReport report;
};

Execution execute(const ExperimentConfig& config, const IsingMachine& machine,
                  const EpochCallback& on_epoch = {}) {
  validate_config(config);
  Execution ex{prepare_data(config), 0.0, {}};
  auto state = initial_model(config, ex.data.train, machine);
  ex.epsilon = state.epsilon;
  ex.report = train(ex.data.train, std::move(state), train_config(config), machine,
                    ex.data.test ? &*ex.data.test : nullptr, on_epoch);
  return ex;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw Error("failed writing " + path.string());
}

}  // namespace

RunOutputs run_experiment(const ExperimentConfig& config, const std::filesystem::path& out_dir,
                          const std::string& command) {
  validate_config(config);
  std::filesystem::create_directories(out_dir);
  const auto machine = make_machine(config);

  RunOutputs out;
  out.metrics = out_dir / "metrics.csv";
  out.checkpoint = out_dir / "model.json";
  out.manifest = out_dir / "manifest.json";
  out.config = out_dir / "config.ini";
  write_text(out.config, to_ini(config));

  std::ofstream metrics(out.metrics);
  if (!metrics) throw Error("cannot open " + out.metrics.string() + " for writing");
  metrics << "epoch,train_mse,test_mse,accuracy,mean_step\n";
  const auto every = config.training.checkpoint_every;
  if (every > 0) std::filesystem::create_directories(out_dir / "checkpoints");

  auto on_epoch = [&](const EpochRecord& r, const ModelState& state) {
    std::ostringstream line;
    write_metrics_csv({r}, line);
    const auto text = line.str();
    metrics << text.substr(text.find('\n') + 1) << std::flush;
    if (every > 0 && (r.epoch + 1) % every == 0) {
      save_checkpoint({state, machine->name(), machine->params()},
                      out_dir / "checkpoints" / ("epoch-" + std::to_string(r.epoch + 1) + ".json"));
    }
  };

  std::optional<Execution> ex;
  try {
    ex.emplace(execute(config, *machine, on_epoch));
  } catch (const TrainingAborted& aborted) {
    save_checkpoint({aborted.last_state(), machine->name(), machine->params()},
                    out_dir / "model.partial.json");
    throw;
  }
  out.report = std::move(ex->report);
  out.epsilon = ex->epsilon;
  if (ex->data.test) out.overlap = count_overlap(ex->data.train, *ex->data.test);
  save_checkpoint({out.report.final_state, machine->name(), machine->params()}, out.checkpoint);
  write_text(out.manifest, manifest_json(config, out, command));
  return out;
}

std::string manifest_json(const ExperimentConfig& config, const RunOutputs& outputs,
                          const std::string& command) {
  nlohmann::json doc;
  doc["format"] = "ising-learn/manifest/1";
  doc["version"] = version_string();
  doc["command"] = command;
  doc["preset"] = config.preset;
  nlohmann::json entries = nlohmann::json::object();
  for (const auto& [k, v] : config_entries(config)) entries[k] = v;
  doc["config"] = std::move(entries);
  doc["provenance"] = config.provenance;
  doc["seeds"] = {{"data", config.data.seed},
                  {"test_data", config.data.test_seed},
                  {"training", config.training.seed},
                  {"seed_policy",
                   config.training.seed_policy == SeedPolicy::fixed ? "fixed" : "per-call"}};
  const auto machine = make_machine(config);
  doc["backend"] = {{"name", machine->name()}, {"params", machine->params()}};
  if (config.preset == "bas" && machine->name() != "exact") {
    doc["substitutions"] = {"simulated annealing stands in for annealing hardware"};
  }
  doc["epsilon_used"] = outputs.epsilon;
  doc["solver_calls"] = outputs.report.solver_calls;
  if (outputs.overlap) doc["train_test_overlap"] = *outputs.overlap;
  doc["outputs"] = {{"metrics", outputs.metrics.string()},
                    {"checkpoint", outputs.checkpoint.string()},
                    {"config", outputs.config.string()}};
  return doc.dump(2) + "\n";
}

ExperimentConfig config_from_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open manifest " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& ex) {
    throw ParseError(std::string("manifest is not valid JSON: ") + ex.what());
  }
  if (!doc.contains("config") || !doc["config"].is_object()) {
    throw ParseError("manifest has no config section");
  }
  ExperimentConfig config;
  config.solver.params.clear();
  config.preset = doc.value("preset", std::string{});
  for (const auto& [k, v] : doc["config"].items()) apply_setting(config, k, v.get<std::string>());
  if (doc.contains("provenance")) {
    config.provenance = doc["provenance"].get<std::map<std::string, std::string>>();
  }
  return config;
}

std::string version_string() { return ISING_LEARN_VERSION; }

std::filesystem::path default_out_dir() {
  if (const char* env = std::getenv("ISING_LEARN_OUT_DIR"); env && *env) return env;
  return "runs";
}

namespace {

double mean_of(std::span<const double> v) {
  return exact_sum(v) / static_cast<double>(v.size());
}

double stddev_of(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  ExactSum s;
  for (double x : v) s.add((x - m) * (x - m));
  return std::sqrt(s.value() / static_cast<double>(v.size() - 1));
}

void apply_overrides(ExperimentConfig& cfg, const ReproduceOptions& options) {
  if (options.backend) apply_setting(cfg, "solver.backend", *options.backend);
  for (const auto& [k, v] : options.backend_params) cfg.solver.params[k] = v;
  cfg.training.workers = options.workers;
}

}  // namespace

ReproduceResult reproduce(const std::string& preset, const ReproduceOptions& options,
                          const std::filesystem::path& out_dir) {
  ReproduceResult result;
  result.preset = preset;
  const bool write = !out_dir.empty();
  if (write) std::filesystem::create_directories(out_dir);
  auto emit = [&](const std::string& name, const std::string& text) {
    if (!write) return;
    write_text(out_dir / name, text);
    result.files.push_back(out_dir / name);
  };

  if (preset == "random") {
    const auto runs = options.runs.value_or(30);
    if (runs == 0) throw ConfigError("--runs must be positive");
    std::ostringstream per_run;
    per_run << "run,epoch,train_mse\n";
    ExperimentConfig last;
    for (std::size_t r = 0; r < runs; ++r) {
      auto cfg = make_preset("random");
      cfg.data.seed = options.seed + r;
      cfg.training.seed = derive_seed(options.seed, 0x72616e64ULL, r);
      apply_overrides(cfg, options);
      const auto machine = make_machine(cfg);
      std::vector<EpochRecord> records;
      try {
        auto ex = execute(cfg, *machine);
        records = std::move(ex.report.records);
        result.best_state = std::move(ex.report.final_state);
      } catch (const TrainingAborted& aborted) {
        if (aborted.reason() != TrainingAborted::Reason::divergence) throw;
        records = aborted.completed();
        if (aborted.failed()) records.push_back(*aborted.failed());
        result.diverged.push_back(r);
        std::clog << "warning: run " << r << ": " << aborted.what() << '\n';
      }
      for (const auto& rec : records) {
        per_run << r << ',' << rec.epoch << ',' << format_double(rec.train_mse) << '\n';
      }
      result.runs.push_back(std::move(records));
      last = cfg;
    }
    std::size_t epochs = 0;
    for (const auto& run : result.runs) epochs = std::max(epochs, run.size());
    std::ostringstream agg;
    agg << "epoch,mean_mse,std_mse,runs\n";
    for (std::size_t k = 0; k < epochs; ++k) {
      std::vector<double> losses;
      for (const auto& run : result.runs) {
        if (k < run.size()) losses.push_back(run[k].train_mse);
      }
      result.mean_loss.push_back(mean_of(losses));
      result.std_loss.push_back(stddev_of(losses));
      result.active_runs.push_back(losses.size());
      agg << k << ',' << format_double(result.mean_loss.back()) << ','
          << format_double(result.std_loss.back()) << ',' << losses.size() << '\n';
    }
    emit("aggregate.csv", agg.str());
    emit("runs.csv", per_run.str());
    emit("config.ini", to_ini(last));
    return result;
  }

  if (preset == "fn-lin" || preset == "fn-quad" || preset == "bas") {
    const auto runs = options.runs.value_or(1);
    if (runs == 0) throw ConfigError("--runs must be positive");
    ExperimentConfig best_cfg;
    std::optional<Execution> best;
    double best_loss = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < runs; ++r) {
      auto cfg = make_preset(preset, options.size);
      cfg.data.seed = options.seed;
      cfg.data.test_seed = options.seed + 7919;
      cfg.training.seed = options.seed + r;
      apply_overrides(cfg, options);
      const auto machine = make_machine(cfg);
      auto ex = execute(cfg, *machine);
      const double final_loss = ex.report.records.back().train_mse;
      result.runs.push_back(ex.report.records);
      if (final_loss < best_loss) {
        best_loss = final_loss;
        best.emplace(std::move(ex));
        best_cfg = cfg;
        result.best_run = r;
      }
    }
    result.best_state = best->report.final_state;
    result.train_data = best->data.train;
    result.test_data = best->data.test;
    const auto& records = best->report.records;
    const auto machine = make_machine(best_cfg);
    if (write) {
      save_checkpoint({result.best_state, machine->name(), machine->params()},
                      out_dir / "model.json");
      result.files.push_back(out_dir / "model.json");
    }
    emit("config.ini", to_ini(best_cfg));

    if (preset != "bas") {
      std::ostringstream loss;
      loss << "epoch";
      for (std::size_t r = 0; r < result.runs.size(); ++r) loss << ",train_mse_seed" << r;
      loss << '\n';
      for (std::size_t k = 0; k < records.size(); ++k) {
        loss << k;
        for (const auto& run : result.runs) loss << ',' << format_double(run[k].train_mse);
        loss << '\n';
      }
      emit("loss.csv", loss.str());

      const auto f = preset == "fn-lin" ? TargetFunction::lin : TargetFunction::quad;
      const auto points = std::max<std::size_t>(options.sweep_points, 2);
      std::ostringstream sweep;
      sweep << "x,target,model\n";
      for (std::size_t p = 0; p < points; ++p) {
        const double x = static_cast<double>(p) / static_cast<double>(points - 1);
        const double theta[] = {x};
        const auto pred = predict(result.best_state, theta, *machine,
                                  derive_seed(best_cfg.training.seed, 0x73776565ULL, p));
        result.sweep.push_back({x, target_function(f, x), pred.value});
        sweep << format_double(x) << ',' << format_double(target_function(f, x)) << ','
              << format_double(pred.value) << '\n';
      }
      emit("sweep.csv", sweep.str());
      return result;
    }

    // bars and stripes: per-label output statistics, loss and accuracy.
    result.overlap = count_overlap(best->data.train, *best->data.test);
    auto label_stats = [](const std::vector<double>& outputs, const Dataset& data, BasLabel l) {
      std::vector<double> v;
      for (std::size_t a = 0; a < data.size(); ++a) {
        if (bas_decode(data.target(a)) == l) v.push_back(outputs[a]);
      }
      if (v.empty()) return std::pair{0.0, 0.0};
      return std::pair{mean_of(v), stddev_of(v)};
    };
    std::ostringstream outputs, loss, accuracy;
    outputs << "epoch,train_bars_mean,train_bars_std,train_stripes_mean,train_stripes_std,"
               "test_bars_mean,test_bars_std,test_stripes_mean,test_stripes_std\n";
    loss << "epoch,train_mse,test_mse\n";
    accuracy << "epoch,train_accuracy,test_accuracy\n";
    for (const auto& rec : records) {
      outputs << rec.epoch;
      for (auto [outs, data] : {std::pair{&rec.train_outputs, &best->data.train},
                                std::pair{&rec.test_outputs, &*best->data.test}}) {
        for (auto l : {BasLabel::bars, BasLabel::stripes}) {
          const auto [m, s] = label_stats(*outs, *data, l);
          outputs << ',' << format_double(m) << ',' << format_double(s);
        }
      }
      outputs << '\n';
      loss << rec.epoch << ',' << format_double(rec.train_mse) << ','
           << format_double(rec.test_mse.value_or(0.0)) << '\n';
      accuracy << rec.epoch << ',' << format_double(rec.train_accuracy.value_or(0.0)) << ','
               << format_double(rec.test_accuracy.value_or(0.0)) << '\n';
    }
    emit("outputs.csv", outputs.str());
    emit("loss.csv", loss.str());
    emit("accuracy.csv", accuracy.str());
    emit("overlap.txt", std::to_string(*result.overlap) + " of " +
                            std::to_string(best->data.train.size()) +
                            " training rows also appear in the test set\n");
    return result;
  }

  std::string list;
  for (const auto& p : preset_names()) list += (list.empty() ? "" : ", ") + p;
  throw ConfigError("unknown preset '" + preset + "' (known: " + list + ")");
}

}  // namespace ising
