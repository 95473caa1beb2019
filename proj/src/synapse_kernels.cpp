#include "lsm/synapse_kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lsm/errors.hpp"

namespace lsm {

namespace {

// Integer number of steps in `duration`, rejecting non-multiples.
std::size_t whole_steps(double duration_ms, double dt_ms, const char* what) {
  const double ratio = duration_ms / dt_ms;
  const double rounded = std::round(ratio);
  if (std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio)) {
    throw ValidationError(std::string(what) + " must be an integer multiple of dt");
  }
  return static_cast<std::size_t>(rounded);
}

double tail_charge(const DiscreteKernel& k, std::size_t from) {
  const double n = static_cast<double>(from);
  const double fall = std::pow(k.decay_fall, n) / (1.0 - k.decay_fall);
  if (k.order == SynapseOrder::First) return k.amplitude * fall * k.dt_ms;
  const double rise = std::pow(k.decay_rise, n) / (1.0 - k.decay_rise);
  return k.amplitude * (fall - rise) * k.dt_ms;
}

}  // namespace

std::string_view to_string(SynapseOrder order) {
  switch (order) {
    case SynapseOrder::Delta: return "delta";
    case SynapseOrder::Zeroth: return "zeroth";
    case SynapseOrder::First: return "first";
    case SynapseOrder::Second: return "second";
  }
  return "unknown";
}

SynapseOrder parse_synapse_order(std::string_view name) {
  if (name == "delta") return SynapseOrder::Delta;
  if (name == "zeroth" || name == "0") return SynapseOrder::Zeroth;
  if (name == "first" || name == "1") return SynapseOrder::First;
  if (name == "second" || name == "2") return SynapseOrder::Second;
  throw ValidationError("unknown synapse order '" + std::string(name) +
                        "' (expected delta, zeroth, first or second)");
}

void KernelSpec::validate() const {
  if (!(dt_ms > 0.0) || !std::isfinite(dt_ms)) throw ValidationError("dt_ms must be positive");
  if (!(delay_ms >= 0.0) || !std::isfinite(delay_ms)) throw ValidationError("delay_ms must be >= 0");
  whole_steps(delay_ms, dt_ms, "delay_ms");
  if (order == SynapseOrder::Delta) return;
  if (!(tau_fall_ms > 0.0) || !std::isfinite(tau_fall_ms)) {
    throw ValidationError("tau_fall_ms must be positive");
  }
  if (tau_fall_ms < dt_ms) throw ValidationError("tau_fall_ms must be >= dt_ms");
  if (order == SynapseOrder::Second) {
    if (!(tau_rise_ms > 0.0) || !std::isfinite(tau_rise_ms)) {
      throw ValidationError("tau_rise_ms must be positive");
    }
    if (tau_rise_ms >= tau_fall_ms) throw ValidationError("tau_rise_ms must be < tau_fall_ms");
  }
}

void to_json(nlohmann::json& j, const KernelSpec& spec) {
  j = nlohmann::json{{"order", std::string(to_string(spec.order))},
                     {"tau_fall_ms", spec.tau_fall_ms},
                     {"tau_rise_ms", spec.tau_rise_ms},
                     {"delay_ms", spec.delay_ms},
                     {"dt_ms", spec.dt_ms}};
}

void from_json(const nlohmann::json& j, KernelSpec& spec) {
  for (const auto& [key, value] : j.items()) {
    if (key == "order") {
      spec.order = parse_synapse_order(value.get<std::string>());
    } else if (key == "tau_fall_ms") {
      spec.tau_fall_ms = value.get<double>();
    } else if (key == "tau_rise_ms") {
      spec.tau_rise_ms = value.get<double>();
    } else if (key == "delay_ms") {
      spec.delay_ms = value.get<double>();
    } else if (key == "dt_ms") {
      spec.dt_ms = value.get<double>();
    } else {
      throw ValidationError("unknown kernel key '" + key + "'");
    }
  }
}

DiscreteKernel discretize_kernel(const KernelSpec& spec) {
  spec.validate();
  DiscreteKernel k;
  k.order = spec.order;
  k.dt_ms = spec.dt_ms;
  k.delay_steps = whole_steps(spec.delay_ms, spec.dt_ms, "delay_ms");
  const double dt = spec.dt_ms;

  switch (spec.order) {
    case SynapseOrder::Delta:
    case SynapseOrder::Zeroth: {
      // Delta is the one-bin rectangular pulse; both orders share one code path.
      k.order = spec.order;
      k.pulse_bins = spec.order == SynapseOrder::Delta
                         ? 1
                         : std::max<std::size_t>(1, static_cast<std::size_t>(
                                                        std::lround(spec.tau_fall_ms / dt)));
      k.amplitude = 1.0 / (static_cast<double>(k.pulse_bins) * dt);
      k.samples.assign(k.pulse_bins, k.amplitude);
      break;
    }
    case SynapseOrder::First:
    case SynapseOrder::Second: {
      k.decay_fall = std::exp(-dt / spec.tau_fall_ms);
      if (spec.order == SynapseOrder::Second) k.decay_rise = std::exp(-dt / spec.tau_rise_ms);
      // Closed-form unit-charge amplitude for the infinite sampled sequence.
      double series = 1.0 / (1.0 - k.decay_fall);
      if (spec.order == SynapseOrder::Second) series -= 1.0 / (1.0 - k.decay_rise);
      k.amplitude = 1.0 / (series * dt);

      std::size_t horizon = 1;
      while (tail_charge(k, horizon) >= kKernelTailCharge) horizon *= 2;
      std::size_t lo = horizon / 2;
      while (lo + 1 < horizon) {
        const std::size_t mid = lo + (horizon - lo) / 2;
        (tail_charge(k, mid) < kKernelTailCharge ? horizon : lo) = mid;
      }
      k.samples.resize(horizon);
      for (std::size_t i = 0; i < horizon; ++i) {
        const double n = static_cast<double>(i);
        double g = std::pow(k.decay_fall, n);
        if (spec.order == SynapseOrder::Second) g -= std::pow(k.decay_rise, n);
        k.samples[i] = g;
      }
      // Renormalize on the truncated discrete sum; the recursive filter uses
      // the same amplitude so it only differs by the omitted tail.
      const double sum = std::accumulate(k.samples.begin(), k.samples.end(), 0.0);
      k.amplitude = 1.0 / (sum * dt);
      for (double& s : k.samples) s *= k.amplitude;
      break;
    }
  }
  k.charge = std::accumulate(k.samples.begin(), k.samples.end(), 0.0) * dt;
  k.truncation_horizon_ms = static_cast<double>(k.samples.size()) * dt;
  return k;
}

FilterBank::FilterBank(const DiscreteKernel& kernel, std::size_t size)
    : kernel_(kernel),
      size_(size),
      delay_steps_(kernel.delay_steps),
      pending_slots_(kernel.delay_steps + 1),
      pending_(pending_slots_ * size, 0.0) {
  switch (kernel_.order) {
    case SynapseOrder::Delta:
    case SynapseOrder::Zeroth:
      window_.assign(kernel_.pulse_bins * size, 0.0);
      window_sum_.assign(size, 0.0);
      window_active_.assign(size, 0);
      break;
    case SynapseOrder::Second:
      trace_rise_.assign(size, 0.0);
      [[fallthrough]];
    case SynapseOrder::First:
      trace_fall_.assign(size, 0.0);
      break;
  }
}

void FilterBank::step_accumulate(std::span<double> out) {
  double* arriving = pending_.data() + pending_slot(0) * size_;
  const double amp = kernel_.amplitude;

  switch (kernel_.order) {
    case SynapseOrder::Delta:
    case SynapseOrder::Zeroth: {
      double* slot = window_.data() + (time_ % kernel_.pulse_bins) * size_;
      for (std::size_t i = 0; i < size_; ++i) {
        const double in = arriving[i];
        const double expired = slot[i];
        slot[i] = in;
        if (in == 0.0 && expired == 0.0) {
          out[i] += window_sum_[i] * amp;
          continue;
        }
        window_active_[i] += (in != 0.0);
        window_active_[i] -= (expired != 0.0);
        window_sum_[i] = window_active_[i] == 0 ? 0.0 : (window_sum_[i] + in) - expired;
        out[i] += window_sum_[i] * amp;
      }
      break;
    }
    case SynapseOrder::First: {
      const double decay = kernel_.decay_fall;
      for (std::size_t i = 0; i < size_; ++i) {
        trace_fall_[i] = trace_fall_[i] * decay + amp * arriving[i];
        out[i] += trace_fall_[i];
      }
      break;
    }
    case SynapseOrder::Second: {
      const double df = kernel_.decay_fall;
      const double dr = kernel_.decay_rise;
      for (std::size_t i = 0; i < size_; ++i) {
        trace_fall_[i] = trace_fall_[i] * df + arriving[i];
        trace_rise_[i] = trace_rise_[i] * dr + arriving[i];
        out[i] += amp * (trace_fall_[i] - trace_rise_[i]);
      }
      break;
    }
  }
  std::fill(arriving, arriving + size_, 0.0);
  ++time_;
}

void FilterBank::step(std::span<double> out) {
  std::fill(out.begin(), out.end(), 0.0);
  step_accumulate(out);
}

void FilterBank::reset() {
  time_ = 0;
  std::fill(pending_.begin(), pending_.end(), 0.0);
  std::fill(window_.begin(), window_.end(), 0.0);
  std::fill(window_sum_.begin(), window_sum_.end(), 0.0);
  std::fill(window_active_.begin(), window_active_.end(), 0);
  std::fill(trace_fall_.begin(), trace_fall_.end(), 0.0);
  std::fill(trace_rise_.begin(), trace_rise_.end(), 0.0);
}

}  // namespace lsm
