#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lsm/dataset.hpp"
#include "lsm/dynamics.hpp"
#include "lsm/readout.hpp"
#include "lsm/sweep.hpp"
#include "lsm/synapse_kernels.hpp"
#include "lsm/topology.hpp"

namespace lsm {

/// Synthetic dataset section: either explicit `rates_hz` or the default
/// template family parameters.
struct SyntheticSection {
  SyntheticSpec spec;
  TemplateParams templates;
  bool explicit_rates = false;
  std::optional<std::uint64_t> seed;
};

struct RunConfig {
  std::uint64_t seed = 1;
  std::optional<std::string> dataset_path;
  SyntheticSection synthetic;
  std::optional<std::string> reservoir_file;
  ReservoirParams reservoir;
  bool reservoir_seed_set = false;
  std::size_t input_channels = 77;
  std::size_t fan_out = 4;
  KernelSpec kernel;
  LifParams lif;
  ReadoutConfig readout;
  std::size_t n_folds = 5;
  std::vector<double> alpha_in_values{1, 2, 4, 6, 8, 12, 16, 20};
  std::vector<double> alpha_res_values{0.1, 0.25, 0.5, 1, 1.5, 2, 3, 4};
  ScalingPoint operating_point{6.0, 1.0};
  std::vector<SynapseOrder> orders{SynapseOrder::Delta, SynapseOrder::Zeroth, SynapseOrder::First,
                                   SynapseOrder::Second};
  std::vector<double> taus_ms{1, 2, 4, 8, 16, 32, 50};
  std::size_t band_size = 10;
  std::string output_dir = "lsm_out";
  unsigned threads = 0;  // 0: LSM_THREADS or hardware concurrency

  void validate() const;

  /// Seeds actually used for each construction task.
  std::uint64_t effective_reservoir_seed() const;
  std::uint64_t effective_dataset_seed() const;
  std::uint64_t wiring_seed() const;
  unsigned effective_threads() const;

  SyntheticSpec synthetic_spec() const;
  SweepConfig sweep_config() const;
};

/// Parses a config document; unknown keys anywhere are rejected.
RunConfig parse_run_config(const nlohmann::json& j);

/// The canonical config echo embedded in outputs. Excludes the thread count
/// and output directory, which never influence results.
nlohmann::json config_echo(const RunConfig& config);

/// Applies a `dotted.key=value` override; the value is parsed as JSON when
/// possible and used as a string otherwise.
void apply_override(nlohmann::json& doc, const std::string& assignment);

/// FNV-1a 64-bit hash, hex encoded.
std::string content_hash(const std::string& bytes);

}  // namespace lsm
