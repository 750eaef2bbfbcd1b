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

#include "ising/checkpoint.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "ising/errors.hpp"
#include "ising/text.hpp"

namespace ising {
namespace {

using nlohmann::json;

json interval_to_json(const Interval& in) {
  json j = json::object();
  j["min"] = std::isinf(in.lo) ? json(nullptr) : json(in.lo);
  j["max"] = std::isinf(in.hi) ? json(nullptr) : json(in.hi);
  return j;
}

Interval interval_from_json(const json& j) {
  Interval in;
  if (j.contains("min") && !j.at("min").is_null()) in.lo = j.at("min").get<double>();
  if (j.contains("max") && !j.at("max").is_null()) in.hi = j.at("max").get<double>();
  return in;
}

}  // namespace

std::string checkpoint_to_string(const Checkpoint& checkpoint) {
  const auto& s = checkpoint.state;
  s.validate();
  json doc;
  doc["format"] = kCheckpointFormat;
  doc["input_dim"] = s.input_dim;
  doc["preprocess"] = {
      {"kind", s.preprocessing.kind == PreprocessKind::identity ? "identity" : "offset"},
      {"d", s.preprocessing.offset_step},
      {"l", s.preprocessing.replicas},
  };
  doc["spins"] = s.topology.size();
  json edges = json::array();
  for (std::size_t e = 0; e < s.topology.edge_count(); ++e) {
    const auto& edge = s.topology.edge(e);
    edges.push_back(json::array({edge.i, edge.j, s.couplings[e]}));
  }
  doc["edges"] = std::move(edges);
  doc["lambda"] = s.lambda;
  doc["epsilon"] = s.epsilon;
  doc["bounds"] = {{"biases", interval_to_json(s.bounds.biases)},
                   {"couplings", interval_to_json(s.bounds.couplings)}};
  doc["backend"] = {{"name", checkpoint.backend}, {"params", checkpoint.backend_params}};
  return doc.dump(1) + "\n";
}

Checkpoint checkpoint_from_string(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& ex) {
    throw ParseError(std::string("checkpoint is not valid JSON: ") + ex.what());
  }
  try {
    if (doc.value("format", std::string{}) != kCheckpointFormat) {
      throw ParseError("unsupported checkpoint format '" + doc.value("format", std::string{}) +
                       "'");
    }
    Checkpoint cp;
    auto& s = cp.state;
    s.input_dim = doc.at("input_dim").get<std::size_t>();
    const auto& pre = doc.at("preprocess");
    const auto kind = pre.at("kind").get<std::string>();
    if (kind == "identity") {
      s.preprocessing = PreprocessSpec::identity();
    } else if (kind == "offset") {
      s.preprocessing = PreprocessSpec::offset(pre.at("d").get<std::vector<double>>(),
                                               pre.at("l").get<std::size_t>());
    } else {
      throw ParseError("unknown preprocess kind '" + kind + "'");
    }
    const auto spins = doc.at("spins").get<std::size_t>();
    std::vector<Edge> edges;
    for (const auto& row : doc.at("edges")) {
      edges.push_back({row.at(0).get<std::size_t>(), row.at(1).get<std::size_t>()});
      s.couplings.push_back(row.at(2).get<double>());
    }
    s.topology = Topology(spins, std::move(edges));
    s.lambda = doc.at("lambda").get<double>();
    s.epsilon = doc.at("epsilon").get<double>();
    if (doc.contains("bounds")) {
      s.bounds.biases = interval_from_json(doc["bounds"].value("biases", json::object()));
      s.bounds.couplings = interval_from_json(doc["bounds"].value("couplings", json::object()));
    }
    if (doc.contains("backend")) {
      cp.backend = doc["backend"].value("name", std::string("exact"));
      cp.backend_params = doc["backend"].value("params", BackendParams{});
    }
    s.validate();
    return cp;
  } catch (const json::exception& ex) {
    throw ParseError(std::string("malformed checkpoint: ") + ex.what());
  }
}

void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << checkpoint_to_string(checkpoint);
  if (!out) throw Error("failed writing " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open checkpoint " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return checkpoint_from_string(buf.str());
}

void write_problem(const IsingProblem& problem, std::ostream& out) {
  out << "n " << problem.size() << "\nbiases";
  for (double b : problem.biases()) out << ' ' << format_double(b);
  out << "\nedges " << problem.topology().edge_count() << '\n';
  const auto couplings = problem.couplings();
  for (std::size_t e = 0; e < couplings.size(); ++e) {
    const auto& edge = problem.topology().edge(e);
    out << edge.i << ' ' << edge.j << ' ' << format_double(couplings[e]) << '\n';
  }
}

IsingProblem read_problem(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  auto next_line = [&]() -> std::optional<std::string> {
    while (std::getline(in, line)) {
      ++lineno;
      const auto t = trim(line);
      if (t.empty() || t.front() == '#') continue;
      return std::string(t);
    }
    return std::nullopt;
  };
  auto tokens = [](const std::string& s) {
    std::vector<std::string> out;
    std::istringstream ss(s);
    for (std::string t; ss >> t;) out.push_back(t);
    return out;
  };

  auto l = next_line();
  if (!l) throw ParseError("empty problem file");
  auto t = tokens(*l);
  std::size_t n = 0;
  if (t.size() != 2 || t[0] != "n" || !parse_size(t[1], n) || n == 0) {
    throw ParseError("expected 'n <spins>'", lineno);
  }

  l = next_line();
  if (!l) throw ParseError("missing biases line", lineno);
  t = tokens(*l);
  if (t.empty() || t[0] != "biases") throw ParseError("expected 'biases ...'", lineno);
  if (t.size() - 1 != n) {
    throw ParseError("expected " + std::to_string(n) + " biases, found " +
                         std::to_string(t.size() - 1),
                     lineno);
  }
  std::vector<double> biases(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!parse_double(t[i + 1], biases[i])) throw ParseError("bad bias '" + t[i + 1] + "'", lineno);
  }

  l = next_line();
  if (!l) throw ParseError("missing edges line", lineno);
  t = tokens(*l);
  std::size_t m = 0;
  if (t.size() != 2 || t[0] != "edges" || !parse_size(t[1], m)) {
    throw ParseError("expected 'edges <count>'", lineno);
  }
  std::vector<Edge> edges;
  std::vector<double> couplings;
  for (std::size_t e = 0; e < m; ++e) {
    l = next_line();
    if (!l) throw ParseError("expected " + std::to_string(m) + " edge lines", lineno);
    t = tokens(*l);
    Edge edge;
    double g = 0.0;
    if (t.size() != 3 || !parse_size(t[0], edge.i) || !parse_size(t[1], edge.j) ||
        !parse_double(t[2], g)) {
      throw ParseError("expected '<i> <j> <coupling>'", lineno);
    }
    edges.push_back(edge);
    couplings.push_back(g);
  }
  try {
    return IsingProblem(Topology(n, std::move(edges)), std::move(biases), std::move(couplings));
  } catch (const ParseError&) {
    throw;
  } catch (const Error& ex) {
    throw ParseError(ex.what(), lineno);
  }
}

}  // namespace ising
