#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace lsm {

struct SpikeEvent {
  std::uint32_t channel = 0;
  double time_ms = 0.0;
  bool operator==(const SpikeEvent&) const = default;
};

/// One input utterance: spike events, a class label and a duration.
struct SpikeSample {
  std::vector<SpikeEvent> spikes;
  int label = 0;
  double duration_ms = 1000.0;
  bool operator==(const SpikeSample&) const = default;
};

struct Dataset {
  std::size_t n_channels = 0;
  std::size_t n_classes = 0;
  std::vector<SpikeSample> samples;

  std::vector<int> labels() const;
  bool operator==(const Dataset&) const = default;
};

/// Spike times are stored with this resolution (ms).
inline constexpr double kTimeResolutionMs = 0.001;

double quantize_time(double time_ms);

/// Piecewise-constant class rate templates and sample-level variability.
struct SyntheticSpec {
  std::size_t n_classes = 10;
  std::size_t n_channels = 77;
  std::size_t samples_per_class = 50;
  double duration_ms = 1000.0;
  std::size_t n_segments = 5;
  // rates_hz[(class * n_channels + channel) * n_segments + segment]
  std::vector<double> rates_hz;
  double jitter_ms = 2.0;
  double rate_scale_min = 0.8;
  double rate_scale_max = 1.2;
  std::uint64_t seed = 1;

  double rate_hz(std::size_t cls, std::size_t channel, std::size_t segment) const {
    return rates_hz[(cls * n_channels + channel) * n_segments + segment];
  }
  void validate() const;
};

/// Parameters of the default template family. A (class, channel, segment)
/// cell gets base_rate * (1 + contrast * z) * (1 + segment_contrast * u) with
/// z drawn once per (class, channel) and u once per cell, both uniform in
/// [-1, 1]. A share of the channels carries the same profile in every class.
struct TemplateParams {
  double base_rate_hz = 20.0;
  double contrast = 0.6;
  double segment_contrast = 0.5;
  double shared_fraction = 0.0;
  std::uint64_t seed = 1;
};

std::vector<double> make_class_templates(std::size_t n_classes, std::size_t n_channels,
                                         std::size_t n_segments, const TemplateParams& params);

/// The calibrated benchmark specification used by the acceptance suite.
SyntheticSpec default_synthetic_spec(std::uint64_t seed = 1);

Dataset generate_synthetic(const SyntheticSpec& spec);

struct ValidationReport {
  std::vector<std::string> violations;
  std::vector<std::size_t> class_counts;
  bool ok() const { return violations.empty(); }
};

ValidationReport validate(const Dataset& dataset);

/// Writes `dir/manifest.json` plus one `sample_NNNNN.csv` per sample.
void save_dataset(const Dataset& dataset, const std::filesystem::path& dir);

/// Reads a dataset directory, rejecting malformed lines, out-of-range
/// channels or times and non-increasing per-channel times.
Dataset load_dataset(const std::filesystem::path& dir);

}  // namespace lsm
