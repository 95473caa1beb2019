#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace lsm {

/// Shape family of the post-synaptic current waveform.
enum class SynapseOrder { Delta, Zeroth, First, Second };

std::string_view to_string(SynapseOrder order);
SynapseOrder parse_synapse_order(std::string_view name);

/// Unit-synapse waveform parameters. All times in milliseconds.
///
/// `tau_fall_ms` is the pulse width for Zeroth, the decay constant for First
/// and the slow constant for Second; `tau_rise_ms` is only read for Second.
/// Delta ignores both timescales and lasts exactly one step.
struct KernelSpec {
  SynapseOrder order = SynapseOrder::Second;
  double tau_fall_ms = 8.0;
  double tau_rise_ms = 4.0;
  double delay_ms = 1.0;
  double dt_ms = 1.0;

  /// Throws ValidationError when the spec cannot be sampled.
  void validate() const;

  bool operator==(const KernelSpec&) const = default;
};

void to_json(nlohmann::json& j, const KernelSpec& spec);
void from_json(const nlohmann::json& j, KernelSpec& spec);

/// A unit-charge waveform sampled at dt from onset, together with the
/// coefficients of its recursive realization.
struct DiscreteKernel {
  SynapseOrder order = SynapseOrder::Delta;
  double dt_ms = 1.0;
  std::vector<double> samples;  // charge/ms
  double charge = 0.0;          // sum(samples) * dt
  double truncation_horizon_ms = 0.0;

  std::size_t delay_steps = 0;
  std::size_t pulse_bins = 1;  // Delta/Zeroth only
  double amplitude = 0.0;
  double decay_fall = 0.0;  // First/Second per-step factor exp(-dt/tau_fall)
  double decay_rise = 0.0;  // Second per-step factor exp(-dt/tau_rise)
};

/// Tail charge left out of the sampled First/Second waveforms.
inline constexpr double kKernelTailCharge = 1e-13;

DiscreteKernel discretize_kernel(const KernelSpec& spec);

/// A bank of identical synaptic filters, one per target, each behaving as the
/// convolution of its injected impulses with the kernel (after the delay).
///
/// Usage per time step: any number of inject() calls, then one step(). An
/// impulse injected before step t appears in the output of step t + delay
/// scaled by samples[0], in step t + delay + 1 scaled by samples[1], etc.
/// Each step costs O(size) independent of spike history and timescale.
class FilterBank {
 public:
  FilterBank(const DiscreteKernel& kernel, std::size_t size);

  std::size_t size() const { return size_; }
  const DiscreteKernel& kernel() const { return kernel_; }

  void inject(std::size_t target, double weighted_impulse) {
    pending_[pending_slot(delay_steps_) * size_ + target] += weighted_impulse;
  }

  /// Advances every filter by one step and ADDS each filter's output current
  /// to `out[target]`.
  void step_accumulate(std::span<double> out);

  /// Advances one step and writes outputs into `out`.
  void step(std::span<double> out);

  void reset();

 private:
  std::size_t pending_slot(std::size_t ahead) const { return (time_ + ahead) % pending_slots_; }

  DiscreteKernel kernel_;
  std::size_t size_;
  std::size_t delay_steps_;
  std::size_t pending_slots_;
  std::size_t time_ = 0;
  std::vector<double> pending_;  // delay line, pending_slots_ x size_

  // Zeroth/Delta: running window sum with scheduled removal at pulse offset.
  std::vector<double> window_;  // pulse_bins x size_
  std::vector<double> window_sum_;
  std::vector<std::size_t> window_active_;

  // First: one trace. Second: two traces.
  std::vector<double> trace_fall_;
  std::vector<double> trace_rise_;
};

/// A single synaptic filter: the stateful evaluator for one synapse pool.
class SynapticFilter {
 public:
  explicit SynapticFilter(const DiscreteKernel& kernel) : bank_(kernel, 1) {}

  void inject(double weighted_impulse) { bank_.inject(0, weighted_impulse); }

  double step() {
    double out = 0.0;
    bank_.step(std::span<double>(&out, 1));
    return out;
  }

  void reset() { bank_.reset(); }

 private:
  FilterBank bank_;
};

}  // namespace lsm
