#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lsm/dataset.hpp"
#include "lsm/synapse_kernels.hpp"
#include "lsm/topology.hpp"

namespace lsm {

struct LifParams {
  double tau_m_ms = 64.0;
  double v_threshold_mv = 20.0;
  double v_rest_mv = 0.0;
  double refractory_ms = 2.0;
  double dt_ms = 1.0;

  void validate() const;
  std::size_t refractory_steps() const;
  bool operator==(const LifParams&) const = default;
};

void to_json(nlohmann::json& j, const LifParams& p);
void from_json(const nlohmann::json& j, LifParams& p);

/// Global strength multipliers (alpha_in, alpha_res).
struct ScalingPoint {
  double alpha_in = 1.0;
  double alpha_res = 1.0;
  void validate() const;
  bool operator==(const ScalingPoint&) const = default;
};

struct NeuronStep {
  double v = 0.0;
  bool spiked = false;
  std::size_t refractory_remaining = 0;
};

/// One exponential-Euler LIF step. A synaptic charge of 1 (current * dt)
/// moves the membrane by 1 mV.
NeuronStep step_neuron(double v, double i_syn, const LifParams& params,
                       std::size_t refractory_remaining);

struct SampleRecord {
  std::vector<std::vector<double>> raster;  // per neuron, sorted spike times (ms)
  std::size_t total_spikes = 0;
  double duration_ms = 0.0;
  std::vector<double> rates;  // spikes per ms

  bool operator==(const SampleRecord&) const = default;
};

/// Precomputed simulation of one reservoir: CSR fan-out tables for the input
/// wiring and the recurrent graph, plus the kernel. Immutable, so a single
/// instance may be shared by any number of threads.
class ReservoirSimulator {
 public:
  ReservoirSimulator(const ReservoirGraph& graph, const InputWiring& wiring, const KernelSpec& kernel,
                     const LifParams& lif);

  std::size_t n_neurons() const { return n_neurons_; }
  const DiscreteKernel& kernel() const { return kernel_; }
  const LifParams& lif() const { return lif_; }

  /// Simulates one sample. When `membrane` is non-null it receives the
  /// post-step membrane potential of every neuron, step-major.
  SampleRecord run(const ScalingPoint& scaling, const SpikeSample& sample,
                   std::vector<double>* membrane = nullptr) const;

 private:
  struct Target {
    std::uint32_t neuron;
    double weight;  // signed
  };

  std::size_t n_neurons_;
  std::size_t n_channels_;
  DiscreteKernel kernel_;
  LifParams lif_;
  std::vector<std::size_t> input_offsets_;
  std::vector<Target> input_targets_;
  std::vector<std::size_t> edge_offsets_;
  std::vector<Target> edge_targets_;
};

SampleRecord simulate_sample(const ReservoirGraph& graph, const InputWiring& wiring,
                             const KernelSpec& kernel, const LifParams& lif,
                             const ScalingPoint& scaling, const SpikeSample& sample);

/// Simulates every sample of a dataset, in parallel when threads > 1. The
/// result is independent of the thread count.
std::vector<SampleRecord> simulate_dataset(const ReservoirSimulator& sim, const ScalingPoint& scaling,
                                           std::span<const SpikeSample> samples,
                                           unsigned threads = 1);

struct ActivityStats {
  double spikes_per_sample = 0.0;
  double rate_hz_per_neuron = 0.0;
};

ActivityStats reservoir_activity(std::span<const SampleRecord> records);

/// `neuron_id,time_ms` rows.
std::string raster_csv(const SampleRecord& record);
nlohmann::json record_summary(std::span<const SampleRecord> records);

}  // namespace lsm
