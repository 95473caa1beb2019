#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include <nlohmann/json.hpp>

namespace lsm {

struct GridPos {
  int x = 0;
  int y = 0;
  int z = 0;
  bool operator==(const GridPos&) const = default;
};

double grid_distance(GridPos a, GridPos b);

/// Local probabilistic reservoir model. Connection probabilities are
/// indexed by (pre type, post type): c_ee is E->E, c_ei is E->I, c_ie is I->E.
struct ReservoirParams {
  std::size_t n_neurons = 125;
  std::array<int, 3> grid{5, 5, 5};
  double excitatory_fraction = 0.8;
  double lambda = 2.0;
  double c_ee = 0.3;
  double c_ei = 0.2;
  double c_ie = 0.4;
  double c_ii = 0.1;
  std::uint64_t seed = 1;

  void validate() const;
  bool operator==(const ReservoirParams&) const = default;
};

void to_json(nlohmann::json& j, const ReservoirParams& p);
void from_json(const nlohmann::json& j, ReservoirParams& p);

/// C(pre,post) * exp(-D^2 / lambda^2), clamped to [0, 1].
double connection_probability(GridPos pre_pos, GridPos post_pos, bool pre_excitatory,
                              bool post_excitatory, const ReservoirParams& params);

struct Edge {
  std::uint32_t pre = 0;
  std::uint32_t post = 0;
  double weight = 1.0;  // magnitude, > 0
  int sign = 1;         // +1 iff pre is excitatory
  bool operator==(const Edge&) const = default;
};

/// The fixed recurrent graph (G_res).
struct ReservoirGraph {
  ReservoirParams params;
  std::vector<GridPos> positions;
  std::vector<std::uint8_t> is_excitatory;
  std::vector<Edge> edges;

  std::size_t size() const { return positions.size(); }
  std::size_t excitatory_count() const;
  bool operator==(const ReservoirGraph&) const = default;
};

GridPos grid_position(std::size_t index, const std::array<int, 3>& grid);

ReservoirGraph build_reservoir(const ReservoirParams& params);

struct InputConnection {
  std::uint32_t neuron = 0;
  int sign = 1;
  bool operator==(const InputConnection&) const = default;
};

/// Channel-to-neuron input map (G_in); every connection has magnitude 1.
struct InputWiring {
  std::size_t n_channels = 0;
  std::size_t n_neurons = 0;
  std::size_t fan_out = 0;
  std::uint64_t seed = 0;
  std::vector<std::vector<InputConnection>> connections;  // per channel

  bool operator==(const InputWiring&) const = default;
};

InputWiring build_input_wiring(std::size_t n_channels, std::size_t fan_out, std::size_t n_neurons,
                               std::uint64_t seed);

/// A reservoir together with its input wiring: the persisted topology file.
struct Topology {
  ReservoirGraph graph;
  InputWiring wiring;
  bool operator==(const Topology&) const = default;
};

nlohmann::json topology_to_json(const Topology& topology);
Topology topology_from_json(const nlohmann::json& j);

}  // namespace lsm
