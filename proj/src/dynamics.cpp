#include "lsm/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "lsm/errors.hpp"
#include "lsm/parallel.hpp"

namespace lsm {

void LifParams::validate() const {
  if (!(v_threshold_mv > v_rest_mv)) throw ValidationError("v_threshold_mv must exceed v_rest_mv");
  if (!(tau_m_ms > 0.0)) throw ValidationError("tau_m_ms must be positive");
  if (!(refractory_ms >= 0.0)) throw ValidationError("refractory_ms must be >= 0");
  if (!(dt_ms > 0.0)) throw ValidationError("dt_ms must be positive");
}

std::size_t LifParams::refractory_steps() const {
  return static_cast<std::size_t>(std::llround(refractory_ms / dt_ms));
}

void to_json(nlohmann::json& j, const LifParams& p) {
  j = nlohmann::json{{"tau_m_ms", p.tau_m_ms},
                     {"v_threshold_mv", p.v_threshold_mv},
                     {"v_rest_mv", p.v_rest_mv},
                     {"refractory_ms", p.refractory_ms}};
}

void from_json(const nlohmann::json& j, LifParams& p) {
  for (const auto& [key, value] : j.items()) {
    if (key == "tau_m_ms") {
      p.tau_m_ms = value.get<double>();
    } else if (key == "v_threshold_mv") {
      p.v_threshold_mv = value.get<double>();
    } else if (key == "v_rest_mv") {
      p.v_rest_mv = value.get<double>();
    } else if (key == "refractory_ms") {
      p.refractory_ms = value.get<double>();
    } else {
      throw ValidationError("unknown lif key '" + key + "'");
    }
  }
}

void ScalingPoint::validate() const {
  if (!(alpha_in >= 0.0) || !(alpha_res >= 0.0)) throw ValidationError("alpha values must be >= 0");
}

namespace {

struct LifConstants {
  double leak;
  double dt;
  double v_rest;
  double v_threshold;
  std::size_t refractory_steps;

  explicit LifConstants(const LifParams& p)
      : leak(std::exp(-p.dt_ms / p.tau_m_ms)),
        dt(p.dt_ms),
        v_rest(p.v_rest_mv),
        v_threshold(p.v_threshold_mv),
        refractory_steps(p.refractory_steps()) {}
};

inline bool advance(double& v, std::size_t& refractory, double i_syn, const LifConstants& c) {
  if (refractory > 0) {
    v = c.v_rest;
    --refractory;
    return false;
  }
  v = c.v_rest + (v - c.v_rest) * c.leak + i_syn * c.dt;
  if (v >= c.v_threshold) {
    v = c.v_rest;
    refractory = c.refractory_steps;
    return true;
  }
  return false;
}

}  // namespace

NeuronStep step_neuron(double v, double i_syn, const LifParams& params,
                       std::size_t refractory_remaining) {
  const LifConstants c(params);
  NeuronStep out{v, false, refractory_remaining};
  out.spiked = advance(out.v, out.refractory_remaining, i_syn, c);
  return out;
}

ReservoirSimulator::ReservoirSimulator(const ReservoirGraph& graph, const InputWiring& wiring,
                                       const KernelSpec& kernel, const LifParams& lif)
    : n_neurons_(graph.size()),
      n_channels_(wiring.n_channels),
      kernel_(discretize_kernel(kernel)),
      lif_(lif) {
  lif_.dt_ms = kernel.dt_ms;
  lif_.validate();
  if (wiring.n_neurons != n_neurons_) {
    throw ValidationError("input wiring targets " + std::to_string(wiring.n_neurons) +
                          " neurons but the reservoir has " + std::to_string(n_neurons_));
  }

  input_offsets_.assign(n_channels_ + 1, 0);
  for (std::size_t ch = 0; ch < n_channels_; ++ch) {
    for (const auto& c : wiring.connections[ch]) {
      if (c.neuron >= n_neurons_) throw ValidationError("input connection target out of range");
      input_targets_.push_back(Target{c.neuron, static_cast<double>(c.sign)});
    }
    input_offsets_[ch + 1] = input_targets_.size();
  }

  std::vector<std::size_t> degree(n_neurons_, 0);
  for (const auto& e : graph.edges) ++degree[e.pre];
  edge_offsets_.assign(n_neurons_ + 1, 0);
  for (std::size_t i = 0; i < n_neurons_; ++i) edge_offsets_[i + 1] = edge_offsets_[i] + degree[i];
  edge_targets_.resize(graph.edges.size());
  std::vector<std::size_t> fill(edge_offsets_.begin(), edge_offsets_.end() - 1);
  for (const auto& e : graph.edges) {
    edge_targets_[fill[e.pre]++] = Target{e.post, static_cast<double>(e.sign) * e.weight};
  }
}

SampleRecord ReservoirSimulator::run(const ScalingPoint& scaling, const SpikeSample& sample,
                                     std::vector<double>* membrane) const {
  scaling.validate();
  const double dt = kernel_.dt_ms;
  const double steps_real = sample.duration_ms / dt;
  const auto n_steps = static_cast<std::size_t>(std::llround(steps_real));
  if (!(sample.duration_ms > 0.0) || std::abs(steps_real - static_cast<double>(n_steps)) > 1e-9) {
    throw ValidationError("sample duration must be a positive multiple of dt");
  }

  // Counting sort of input spikes into time bins (floor(t / dt)).
  std::vector<std::size_t> bin_offsets(n_steps + 1, 0);
  std::vector<std::size_t> bin_of(sample.spikes.size());
  for (std::size_t k = 0; k < sample.spikes.size(); ++k) {
    const auto& e = sample.spikes[k];
    if (!(e.time_ms >= 0.0 && e.time_ms < sample.duration_ms)) {
      throw ValidationError("input spike time " + std::to_string(e.time_ms) +
                            " outside [0, duration)");
    }
    if (e.channel >= n_channels_) {
      throw ValidationError("input channel " + std::to_string(e.channel) +
                            " exceeds wiring channels");
    }
    bin_of[k] = std::min(n_steps - 1, static_cast<std::size_t>(std::floor(e.time_ms / dt)));
    ++bin_offsets[bin_of[k] + 1];
  }
  for (std::size_t t = 0; t < n_steps; ++t) bin_offsets[t + 1] += bin_offsets[t];
  std::vector<std::uint32_t> binned(sample.spikes.size());
  {
    std::vector<std::size_t> cursor(bin_offsets.begin(), bin_offsets.end() - 1);
    for (std::size_t k = 0; k < sample.spikes.size(); ++k) {
      binned[cursor[bin_of[k]]++] = sample.spikes[k].channel;
    }
  }

  const LifConstants lif(lif_);
  const std::size_t n = n_neurons_;
  FilterBank excitatory(kernel_, n);
  FilterBank inhibitory(kernel_, n);
  std::vector<double> v(n, lif_.v_rest_mv);
  std::vector<std::size_t> refractory(n, 0);
  std::vector<double> current(n, 0.0);
  std::vector<std::uint32_t> fired;
  std::vector<std::uint32_t> fired_next;
  fired.reserve(n);
  fired_next.reserve(n);

  SampleRecord record;
  record.duration_ms = sample.duration_ms;
  record.raster.resize(n);
  if (membrane) {
    membrane->clear();
    membrane->reserve(n_steps * n);
  }

  auto deliver = [&](const Target& target, double scale) {
    const double w = scale * target.weight;
    if (target.weight > 0.0) {
      excitatory.inject(target.neuron, w);
    } else {
      inhibitory.inject(target.neuron, w);
    }
  };

  for (std::size_t t = 0; t < n_steps; ++t) {
    for (std::size_t k = bin_offsets[t]; k < bin_offsets[t + 1]; ++k) {
      const std::uint32_t ch = binned[k];
      for (std::size_t j = input_offsets_[ch]; j < input_offsets_[ch + 1]; ++j) {
        deliver(input_targets_[j], scaling.alpha_in);
      }
    }
    for (std::uint32_t pre : fired) {
      for (std::size_t j = edge_offsets_[pre]; j < edge_offsets_[pre + 1]; ++j) {
        deliver(edge_targets_[j], scaling.alpha_res);
      }
    }

    std::fill(current.begin(), current.end(), 0.0);
    excitatory.step_accumulate(current);
    inhibitory.step_accumulate(current);

    fired_next.clear();
    const double now = static_cast<double>(t) * dt;
    for (std::size_t i = 0; i < n; ++i) {
      if (advance(v[i], refractory[i], current[i], lif)) {
        fired_next.push_back(static_cast<std::uint32_t>(i));
        record.raster[i].push_back(now);
      }
    }
    if (membrane) membrane->insert(membrane->end(), v.begin(), v.end());
    record.total_spikes += fired_next.size();
    std::swap(fired, fired_next);
  }

  record.rates.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    record.rates[i] = static_cast<double>(record.raster[i].size()) / sample.duration_ms;
  }
  return record;
}

SampleRecord simulate_sample(const ReservoirGraph& graph, const InputWiring& wiring,
                             const KernelSpec& kernel, const LifParams& lif,
                             const ScalingPoint& scaling, const SpikeSample& sample) {
  return ReservoirSimulator(graph, wiring, kernel, lif).run(scaling, sample);
}

std::vector<SampleRecord> simulate_dataset(const ReservoirSimulator& sim, const ScalingPoint& scaling,
                                           std::span<const SpikeSample> samples, unsigned threads) {
  std::vector<SampleRecord> records(samples.size());
  parallel_for(samples.size(), threads, [&](std::size_t i) { records[i] = sim.run(scaling, samples[i]); });
  return records;
}

ActivityStats reservoir_activity(std::span<const SampleRecord> records) {
  if (records.empty()) throw ValidationError("reservoir_activity needs at least one record");
  double spikes = 0.0;
  double neuron_ms = 0.0;
  for (const auto& r : records) {
    spikes += static_cast<double>(r.total_spikes);
    neuron_ms += r.duration_ms * static_cast<double>(r.raster.size());
  }
  ActivityStats stats;
  stats.spikes_per_sample = spikes / static_cast<double>(records.size());
  stats.rate_hz_per_neuron = neuron_ms > 0.0 ? 1000.0 * spikes / neuron_ms : 0.0;
  return stats;
}

std::string raster_csv(const SampleRecord& record) {
  std::string out = "neuron_id,time_ms\n";
  char row[64];
  for (std::size_t i = 0; i < record.raster.size(); ++i) {
    for (double t : record.raster[i]) {
      const int len = std::snprintf(row, sizeof(row), "%zu,%.3f\n", i, t);
      out.append(row, static_cast<std::size_t>(len));
    }
  }
  return out;
}

nlohmann::json record_summary(std::span<const SampleRecord> records) {
  nlohmann::json samples = nlohmann::json::array();
  for (const auto& r : records) {
    samples.push_back({{"total_spikes", r.total_spikes}, {"duration_ms", r.duration_ms}, {"rates", r.rates}});
  }
  nlohmann::json j{{"samples", samples}};
  if (!records.empty()) {
    const auto stats = reservoir_activity(records);
    j["activity_spikes_per_sample"] = stats.spikes_per_sample;
    j["rate_hz_per_neuron"] = stats.rate_hz_per_neuron;
  }
  return j;
}

}  // namespace lsm
