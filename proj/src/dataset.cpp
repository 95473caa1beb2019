#include "lsm/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "lsm/errors.hpp"
#include "lsm/rng.hpp"

namespace lsm {

namespace fs = std::filesystem;

std::vector<int> Dataset::labels() const {
  std::vector<int> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(s.label);
  return out;
}

double quantize_time(double time_ms) { return std::round(time_ms * 1000.0) / 1000.0; }

void SyntheticSpec::validate() const {
  if (n_classes == 0 || n_channels == 0 || n_segments == 0) {
    throw ValidationError("synthetic spec needs classes, channels and segments");
  }
  if (!(duration_ms > 0.0)) throw ValidationError("duration_ms must be positive");
  if (rates_hz.size() != n_classes * n_channels * n_segments) {
    throw ValidationError("rate template has " + std::to_string(rates_hz.size()) +
                          " entries, expected classes*channels*segments = " +
                          std::to_string(n_classes * n_channels * n_segments));
  }
  for (double r : rates_hz) {
    if (!(r >= 0.0) || !std::isfinite(r)) throw ValidationError("template rates must be >= 0");
  }
  if (!(jitter_ms >= 0.0)) throw ValidationError("jitter_ms must be >= 0");
  if (!(rate_scale_min >= 0.0 && rate_scale_min <= rate_scale_max)) {
    throw ValidationError("rate scale range must satisfy 0 <= min <= max");
  }
}

std::vector<double> make_class_templates(std::size_t n_classes, std::size_t n_channels,
                                         std::size_t n_segments, const TemplateParams& params) {
  Rng rng(derive_seed(params.seed, stream::kTemplates));
  const auto n_shared = static_cast<std::size_t>(
      std::llround(params.shared_fraction * static_cast<double>(n_channels)));
  std::vector<double> shared(n_channels * (n_segments + 1));
  for (double& z : shared) z = rng.uniform(-1.0, 1.0);

  std::vector<double> rates(n_classes * n_channels * n_segments);
  for (std::size_t c = 0; c < n_classes; ++c) {
    for (std::size_t ch = 0; ch < n_channels; ++ch) {
      const bool common = ch < n_shared;
      const double* cell = &shared[ch * (n_segments + 1)];
      const double own = rng.uniform(-1.0, 1.0);
      const double z = common ? cell[0] : own;
      for (std::size_t s = 0; s < n_segments; ++s) {
        const double own_u = rng.uniform(-1.0, 1.0);
        const double u = common ? cell[s + 1] : own_u;
        rates[(c * n_channels + ch) * n_segments + s] =
            std::max(0.0, params.base_rate_hz * (1.0 + params.contrast * z) *
                              (1.0 + params.segment_contrast * u));
      }
    }
  }
  return rates;
}

SyntheticSpec default_synthetic_spec(std::uint64_t seed) {
  SyntheticSpec spec;
  spec.seed = seed;
  TemplateParams tp;
  tp.seed = seed;
  spec.rates_hz = make_class_templates(spec.n_classes, spec.n_channels, spec.n_segments, tp);
  return spec;
}

Dataset generate_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  Dataset data;
  data.n_channels = spec.n_channels;
  data.n_classes = spec.n_classes;
  data.samples.resize(spec.n_classes * spec.samples_per_class);

  const double seg_len = spec.duration_ms / static_cast<double>(spec.n_segments);
  std::vector<double> times;
  for (std::size_t index = 0; index < data.samples.size(); ++index) {
    auto& sample = data.samples[index];
    const std::size_t cls = index / spec.samples_per_class;
    sample.label = static_cast<int>(cls);
    sample.duration_ms = spec.duration_ms;

    Rng rng(derive_seed(spec.seed, stream::kDataset, index));
    const double scale = rng.uniform(spec.rate_scale_min, spec.rate_scale_max);
    for (std::size_t ch = 0; ch < spec.n_channels; ++ch) {
      times.clear();
      for (std::size_t seg = 0; seg < spec.n_segments; ++seg) {
        const double rate_per_ms = spec.rate_hz(cls, ch, seg) * scale / 1000.0;
        if (rate_per_ms <= 0.0) continue;
        const double start = seg_len * static_cast<double>(seg);
        const double end = seg + 1 == spec.n_segments ? spec.duration_ms : start + seg_len;
        for (double t = start + rng.exponential(rate_per_ms); t < end;
             t += rng.exponential(rate_per_ms)) {
          times.push_back(t);
        }
      }
      for (double& t : times) {
        if (spec.jitter_ms > 0.0) t += rng.uniform(-spec.jitter_ms, spec.jitter_ms);
        t = quantize_time(t);
      }
      std::sort(times.begin(), times.end());
      times.erase(std::unique(times.begin(), times.end()), times.end());
      for (double t : times) {
        if (t >= 0.0 && t < spec.duration_ms) {
          sample.spikes.push_back(SpikeEvent{static_cast<std::uint32_t>(ch), t});
        }
      }
    }
    std::stable_sort(sample.spikes.begin(), sample.spikes.end(),
                     [](const SpikeEvent& a, const SpikeEvent& b) { return a.time_ms < b.time_ms; });
  }
  return data;
}

ValidationReport validate(const Dataset& dataset) {
  ValidationReport report;
  report.class_counts.assign(dataset.n_classes, 0);
  std::map<std::uint32_t, double> last;
  for (std::size_t i = 0; i < dataset.samples.size(); ++i) {
    const auto& s = dataset.samples[i];
    const std::string where = "sample " + std::to_string(i);
    if (s.label < 0 || static_cast<std::size_t>(s.label) >= dataset.n_classes) {
      report.violations.push_back(where + ": label " + std::to_string(s.label) + " out of range");
    } else {
      ++report.class_counts[static_cast<std::size_t>(s.label)];
    }
    if (!(s.duration_ms > 0.0)) report.violations.push_back(where + ": non-positive duration");
    last.clear();
    for (const auto& e : s.spikes) {
      if (e.channel >= dataset.n_channels) {
        report.violations.push_back(where + ": channel " + std::to_string(e.channel) +
                                    " out of range");
        continue;
      }
      if (!(e.time_ms >= 0.0 && e.time_ms < s.duration_ms)) {
        report.violations.push_back(where + ": time " + std::to_string(e.time_ms) +
                                    " outside [0, duration)");
      }
      auto [it, inserted] = last.try_emplace(e.channel, e.time_ms);
      if (!inserted) {
        if (!(e.time_ms > it->second)) {
          report.violations.push_back(where + ": channel " + std::to_string(e.channel) +
                                      (e.time_ms == it->second ? " has a duplicate timestamp "
                                                               : " is not increasing at ") +
                                      std::to_string(e.time_ms));
        }
        it->second = e.time_ms;
      }
    }
  }
  return report;
}

namespace {

std::string sample_file_name(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "sample_%05zu.csv", index);
  return buf;
}

[[noreturn]] void fail_at(const fs::path& file, std::size_t line, const std::string& what) {
  throw ValidationError(file.string() + ":" + std::to_string(line) + ": " + what);
}

SpikeSample read_sample_csv(const fs::path& file, std::size_t n_channels, double duration_ms,
                            int label) {
  std::ifstream in(file);
  if (!in) throw IoError("cannot open " + file.string());
  SpikeSample sample;
  sample.label = label;
  sample.duration_ms = duration_ms;
  std::map<std::uint32_t, double> last;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1) {
      if (line != "channel,time_ms") fail_at(file, line_no, "expected header 'channel,time_ms'");
      continue;
    }
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) fail_at(file, line_no, "expected 'channel,time_ms'");
    std::uint32_t channel = 0;
    double time = 0.0;
    const char* begin = line.data();
    const char* mid = begin + comma;
    const char* end = begin + line.size();
    auto [p1, e1] = std::from_chars(begin, mid, channel);
    if (e1 != std::errc{} || p1 != mid) fail_at(file, line_no, "malformed channel");
    auto [p2, e2] = std::from_chars(mid + 1, end, time);
    if (e2 != std::errc{} || p2 != end) fail_at(file, line_no, "malformed time");
    if (channel >= n_channels) {
      fail_at(file, line_no, "channel " + std::to_string(channel) + " out of range");
    }
    if (!(time >= 0.0 && time < duration_ms)) {
      fail_at(file, line_no, "time " + line.substr(comma + 1) + " outside [0, duration)");
    }
    auto [it, inserted] = last.try_emplace(channel, time);
    if (!inserted) {
      if (!(time > it->second)) fail_at(file, line_no, "non-increasing time on channel");
      it->second = time;
    }
    sample.spikes.push_back(SpikeEvent{channel, time});
  }
  return sample;
}

}  // namespace

void save_dataset(const Dataset& dataset, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());

  nlohmann::json samples = nlohmann::json::array();
  std::string buffer;
  char row[64];
  for (std::size_t i = 0; i < dataset.samples.size(); ++i) {
    const auto& s = dataset.samples[i];
    const std::string name = sample_file_name(i);
    samples.push_back({{"file", name}, {"label", s.label}, {"duration_ms", s.duration_ms}});
    buffer = "channel,time_ms\n";
    for (const auto& e : s.spikes) {
      const int len = std::snprintf(row, sizeof(row), "%u,%.3f\n", e.channel, e.time_ms);
      buffer.append(row, static_cast<std::size_t>(len));
    }
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw IoError("cannot write " + (dir / name).string());
    out << buffer;
  }
  const nlohmann::json manifest{{"format", "lsm-spikes-v1"},
                                {"n_channels", dataset.n_channels},
                                {"n_classes", dataset.n_classes},
                                {"samples", samples}};
  std::ofstream out(dir / "manifest.json", std::ios::binary);
  if (!out) throw IoError("cannot write " + (dir / "manifest.json").string());
  out << manifest.dump(1) << '\n';
}

Dataset load_dataset(const fs::path& dir) {
  const fs::path manifest_path = dir / "manifest.json";
  std::ifstream in(manifest_path);
  if (!in) throw IoError("cannot open " + manifest_path.string());
  nlohmann::json manifest;
  try {
    in >> manifest;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(manifest_path.string() + ": " + e.what());
  }
  Dataset data;
  try {
    if (manifest.at("format").get<std::string>() != "lsm-spikes-v1") {
      throw ValidationError(manifest_path.string() + ": unsupported format");
    }
    data.n_channels = manifest.at("n_channels").get<std::size_t>();
    data.n_classes = manifest.at("n_classes").get<std::size_t>();
    for (const auto& entry : manifest.at("samples")) {
      const int label = entry.at("label").get<int>();
      if (label < 0 || static_cast<std::size_t>(label) >= data.n_classes) {
        throw ValidationError(manifest_path.string() + ": sample " +
                              entry.at("file").get<std::string>() + " has label out of range");
      }
      data.samples.push_back(read_sample_csv(dir / entry.at("file").get<std::string>(),
                                             data.n_channels,
                                             entry.at("duration_ms").get<double>(), label));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(manifest_path.string() + ": " + e.what());
  }
  return data;
}

}  // namespace lsm
