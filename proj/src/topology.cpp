#include "lsm/topology.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "lsm/errors.hpp"
#include "lsm/rng.hpp"

namespace lsm {

double grid_distance(GridPos a, GridPos b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  const double dz = a.z - b.z;
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

void ReservoirParams::validate() const {
  if (grid[0] <= 0 || grid[1] <= 0 || grid[2] <= 0) {
    throw ValidationError("grid dimensions must be positive");
  }
  const auto cells = static_cast<std::size_t>(grid[0]) * static_cast<std::size_t>(grid[1]) *
                     static_cast<std::size_t>(grid[2]);
  if (cells != n_neurons) {
    throw ValidationError("grid " + std::to_string(grid[0]) + "x" + std::to_string(grid[1]) + "x" +
                          std::to_string(grid[2]) + " does not hold " + std::to_string(n_neurons) +
                          " neurons");
  }
  if (!(excitatory_fraction > 0.0 && excitatory_fraction < 1.0)) {
    throw ValidationError("excitatory_fraction must lie in (0, 1)");
  }
  if (!(lambda > 0.0)) throw ValidationError("lambda must be positive");
  for (double c : {c_ee, c_ei, c_ie, c_ii}) {
    if (!(c >= 0.0 && c <= 1.0)) throw ValidationError("connection probabilities must lie in [0, 1]");
  }
}

void to_json(nlohmann::json& j, const ReservoirParams& p) {
  j = nlohmann::json{{"n_neurons", p.n_neurons},
                     {"grid", p.grid},
                     {"excitatory_fraction", p.excitatory_fraction},
                     {"lambda", std::isinf(p.lambda) ? nlohmann::json("inf") : nlohmann::json(p.lambda)},
                     {"c_ee", p.c_ee},
                     {"c_ei", p.c_ei},
                     {"c_ie", p.c_ie},
                     {"c_ii", p.c_ii},
                     {"seed", p.seed}};
}

void from_json(const nlohmann::json& j, ReservoirParams& p) {
  for (const auto& [key, value] : j.items()) {
    if (key == "n_neurons") {
      p.n_neurons = value.get<std::size_t>();
    } else if (key == "grid") {
      p.grid = value.get<std::array<int, 3>>();
    } else if (key == "excitatory_fraction") {
      p.excitatory_fraction = value.get<double>();
    } else if (key == "lambda") {
      p.lambda = value.is_string() && value.get<std::string>() == "inf"
                     ? std::numeric_limits<double>::infinity()
                     : value.get<double>();
    } else if (key == "c_ee") {
      p.c_ee = value.get<double>();
    } else if (key == "c_ei") {
      p.c_ei = value.get<double>();
    } else if (key == "c_ie") {
      p.c_ie = value.get<double>();
    } else if (key == "c_ii") {
      p.c_ii = value.get<double>();
    } else if (key == "seed") {
      p.seed = value.get<std::uint64_t>();
    } else {
      throw ValidationError("unknown reservoir key '" + key + "'");
    }
  }
}

double connection_probability(GridPos pre_pos, GridPos post_pos, bool pre_excitatory,
                              bool post_excitatory, const ReservoirParams& params) {
  double c = 0.0;
  if (pre_excitatory) {
    c = post_excitatory ? params.c_ee : params.c_ei;
  } else {
    c = post_excitatory ? params.c_ie : params.c_ii;
  }
  const double d = grid_distance(pre_pos, post_pos);
  const double p = c * std::exp(-(d * d) / (params.lambda * params.lambda));
  return std::clamp(p, 0.0, 1.0);
}

GridPos grid_position(std::size_t index, const std::array<int, 3>& grid) {
  const auto gx = static_cast<std::size_t>(grid[0]);
  const auto gy = static_cast<std::size_t>(grid[1]);
  return GridPos{static_cast<int>(index % gx), static_cast<int>((index / gx) % gy),
                 static_cast<int>(index / (gx * gy))};
}

std::size_t ReservoirGraph::excitatory_count() const {
  return static_cast<std::size_t>(std::count(is_excitatory.begin(), is_excitatory.end(), 1));
}

ReservoirGraph build_reservoir(const ReservoirParams& params) {
  params.validate();
  const std::size_t n = params.n_neurons;
  ReservoirGraph graph;
  graph.params = params;
  graph.positions.resize(n);
  for (std::size_t i = 0; i < n; ++i) graph.positions[i] = grid_position(i, params.grid);

  const auto n_exc = static_cast<std::size_t>(
      std::llround(params.excitatory_fraction * static_cast<double>(n)));
  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0U);
  Rng label_rng(derive_seed(params.seed, stream::kReservoirLabels));
  label_rng.shuffle(std::span<std::uint32_t>(order));
  graph.is_excitatory.assign(n, 0);
  for (std::size_t i = 0; i < n_exc; ++i) graph.is_excitatory[order[i]] = 1;

  // One uniform draw per ordered pair in row-major order, so the graph is a
  // pure function of the seed regardless of how many edges are accepted.
  Rng edge_rng(derive_seed(params.seed, stream::kReservoirEdges));
  for (std::uint32_t pre = 0; pre < n; ++pre) {
    const bool pre_exc = graph.is_excitatory[pre] != 0;
    for (std::uint32_t post = 0; post < n; ++post) {
      if (pre == post) continue;
      const double p = connection_probability(graph.positions[pre], graph.positions[post], pre_exc,
                                               graph.is_excitatory[post] != 0, params);
      if (edge_rng.uniform() < p) graph.edges.push_back(Edge{pre, post, 1.0, pre_exc ? 1 : -1});
    }
  }
  return graph;
}

InputWiring build_input_wiring(std::size_t n_channels, std::size_t fan_out, std::size_t n_neurons,
                               std::uint64_t seed) {
  if (fan_out % 2 != 0) throw ValidationError("fan_out must be even to balance E/I inputs");
  if (fan_out > n_neurons) throw ValidationError("fan_out exceeds the number of neurons");

  InputWiring wiring;
  wiring.n_channels = n_channels;
  wiring.n_neurons = n_neurons;
  wiring.fan_out = fan_out;
  wiring.seed = seed;
  wiring.connections.resize(n_channels);

  Rng rng(derive_seed(seed, stream::kInputWiring));
  std::vector<std::uint32_t> pool(n_neurons);
  std::vector<int> signs(fan_out, 1);
  for (std::size_t i = fan_out / 2; i < fan_out; ++i) signs[i] = -1;

  for (auto& channel : wiring.connections) {
    std::iota(pool.begin(), pool.end(), 0U);
    // Partial Fisher-Yates: the first fan_out slots are a uniform sample
    // without replacement.
    for (std::size_t i = 0; i < fan_out; ++i) {
      const auto j = i + static_cast<std::size_t>(rng.uniform_index(n_neurons - i));
      std::swap(pool[i], pool[j]);
    }
    rng.shuffle(std::span<int>(signs));
    channel.resize(fan_out);
    for (std::size_t i = 0; i < fan_out; ++i) channel[i] = InputConnection{pool[i], signs[i]};
  }
  return wiring;
}

nlohmann::json topology_to_json(const Topology& topology) {
  const auto& g = topology.graph;
  nlohmann::json positions = nlohmann::json::array();
  for (const auto& p : g.positions) positions.push_back({p.x, p.y, p.z});
  nlohmann::json edges = nlohmann::json::array();
  for (const auto& e : g.edges) edges.push_back({e.pre, e.post, e.weight, e.sign});
  nlohmann::json channels = nlohmann::json::array();
  for (const auto& channel : topology.wiring.connections) {
    nlohmann::json c = nlohmann::json::array();
    for (const auto& conn : channel) c.push_back({conn.neuron, conn.sign});
    channels.push_back(std::move(c));
  }
  nlohmann::json flags = nlohmann::json::array();
  for (auto f : g.is_excitatory) flags.push_back(f != 0);
  return nlohmann::json{
      {"format", "lsm-topology-v1"},
      {"reservoir",
       {{"params", g.params}, {"positions", positions}, {"is_excitatory", flags}, {"edges", edges}}},
      {"input_wiring",
       {{"n_channels", topology.wiring.n_channels},
        {"n_neurons", topology.wiring.n_neurons},
        {"fan_out", topology.wiring.fan_out},
        {"seed", topology.wiring.seed},
        {"connections", channels}}}};
}

Topology topology_from_json(const nlohmann::json& j) {
  try {
    if (j.at("format").get<std::string>() != "lsm-topology-v1") {
      throw ValidationError("unsupported topology format");
    }
    Topology t;
    const auto& r = j.at("reservoir");
    t.graph.params = r.at("params").get<ReservoirParams>();
    for (const auto& p : r.at("positions")) {
      t.graph.positions.push_back(GridPos{p.at(0).get<int>(), p.at(1).get<int>(), p.at(2).get<int>()});
    }
    for (const auto& f : r.at("is_excitatory")) t.graph.is_excitatory.push_back(f.get<bool>() ? 1 : 0);
    const std::size_t n = t.graph.positions.size();
    if (t.graph.is_excitatory.size() != n) throw ValidationError("is_excitatory length mismatch");
    for (const auto& e : r.at("edges")) {
      Edge edge{e.at(0).get<std::uint32_t>(), e.at(1).get<std::uint32_t>(), e.at(2).get<double>(),
                e.at(3).get<int>()};
      if (edge.pre >= n || edge.post >= n || edge.pre == edge.post || !(edge.weight > 0.0)) {
        throw ValidationError("invalid reservoir edge");
      }
      if (edge.sign != (t.graph.is_excitatory[edge.pre] ? 1 : -1)) {
        throw ValidationError("edge sign does not match pre-neuron type");
      }
      t.graph.edges.push_back(edge);
    }
    const auto& w = j.at("input_wiring");
    t.wiring.n_channels = w.at("n_channels").get<std::size_t>();
    t.wiring.n_neurons = w.at("n_neurons").get<std::size_t>();
    t.wiring.fan_out = w.at("fan_out").get<std::size_t>();
    t.wiring.seed = w.at("seed").get<std::uint64_t>();
    for (const auto& channel : w.at("connections")) {
      std::vector<InputConnection> conns;
      for (const auto& c : channel) {
        InputConnection conn{c.at(0).get<std::uint32_t>(), c.at(1).get<int>()};
        if (conn.neuron >= t.wiring.n_neurons || (conn.sign != 1 && conn.sign != -1)) {
          throw ValidationError("invalid input connection");
        }
        conns.push_back(conn);
      }
      t.wiring.connections.push_back(std::move(conns));
    }
    if (t.wiring.connections.size() != t.wiring.n_channels || t.wiring.n_neurons != n) {
      throw ValidationError("input wiring does not match reservoir");
    }
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed topology file: ") + e.what());
  }
}

}  // namespace lsm
