#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>

#include "lsm/dataset.hpp"
#include "lsm/errors.hpp"

using namespace lsm;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("lsm_test_dataset_" + name);
  fs::remove_all(dir);
  return dir;
}

SyntheticSpec constant_spec(double rate_hz, std::size_t samples, std::uint64_t seed) {
  SyntheticSpec s;
  s.n_classes = 1;
  s.n_channels = 1;
  s.n_segments = 1;
  s.samples_per_class = samples;
  s.rates_hz = {rate_hz};
  s.seed = seed;
  return s;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream(path, std::ios::binary) << text;
}

// Nearest-template classifier on per-(channel, segment) spike counts using
// Pearson correlation.
double template_correlation_accuracy(const SyntheticSpec& spec, const Dataset& data) {
  const std::size_t cells = spec.n_channels * spec.n_segments;
  const double seg_len = spec.duration_ms / static_cast<double>(spec.n_segments);
  auto pearson = [&](const std::vector<double>& a, const double* b) {
    double ma = 0, mb = 0;
    for (std::size_t i = 0; i < cells; ++i) {
      ma += a[i];
      mb += b[i];
    }
    ma /= cells;
    mb /= cells;
    double sab = 0, saa = 0, sbb = 0;
    for (std::size_t i = 0; i < cells; ++i) {
      sab += (a[i] - ma) * (b[i] - mb);
      saa += (a[i] - ma) * (a[i] - ma);
      sbb += (b[i] - mb) * (b[i] - mb);
    }
    return saa > 0 && sbb > 0 ? sab / std::sqrt(saa * sbb) : 0.0;
  };
  std::size_t correct = 0;
  std::vector<double> counts(cells);
  for (const auto& s : data.samples) {
    std::fill(counts.begin(), counts.end(), 0.0);
    for (const auto& e : s.spikes) {
      const auto seg = std::min(spec.n_segments - 1, static_cast<std::size_t>(e.time_ms / seg_len));
      counts[e.channel * spec.n_segments + seg] += 1.0;
    }
    int best = 0;
    double best_r = -2.0;
    for (std::size_t c = 0; c < spec.n_classes; ++c) {
      const double r = pearson(counts, &spec.rates_hz[c * cells]);
      if (r > best_r) {
        best_r = r;
        best = static_cast<int>(c);
      }
    }
    if (best == s.label) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(data.samples.size());
}

}  // namespace

TEST_CASE("default benchmark shape") {
  const auto spec = default_synthetic_spec(1);
  const auto data = generate_synthetic(spec);
  CHECK(data.samples.size() == 500);
  CHECK(data.n_channels == 77);
  const auto report = validate(data);
  CHECK(report.ok());
  REQUIRE(report.class_counts.size() == 10);
  for (auto c : report.class_counts) CHECK(c == 50);
  for (const auto& s : data.samples) CHECK(s.duration_ms == 1000.0);
}

TEST_CASE("zero rates give empty samples") {
  auto spec = default_synthetic_spec(3);
  std::fill(spec.rates_hz.begin(), spec.rates_hz.end(), 0.0);
  for (const auto& s : generate_synthetic(spec).samples) CHECK(s.spikes.empty());
}

TEST_CASE("poisson counts match the rate") {
  const double rate_hz = 40.0;
  const double expected = rate_hz * 1.0;  // one-second samples
  for (double scale : {0.0, 0.2}) {
    auto spec = constant_spec(rate_hz, 400, 17);
    spec.jitter_ms = 0.0;
    spec.rate_scale_min = 1.0 - scale;
    spec.rate_scale_max = 1.0 + scale;
    const auto data = generate_synthetic(spec);
    double total = 0.0;
    for (const auto& s : data.samples) total += static_cast<double>(s.spikes.size());
    const double mean = total / static_cast<double>(data.samples.size());
    CAPTURE(scale);
    CHECK(std::abs(mean - expected) <= 3.0 * std::sqrt(expected));
  }
}

TEST_CASE("generation is deterministic per seed") {
  const auto a = generate_synthetic(default_synthetic_spec(4));
  const auto b = generate_synthetic(default_synthetic_spec(4));
  const auto c = generate_synthetic(default_synthetic_spec(5));
  CHECK(a == b);
  CHECK_FALSE(a == c);
}

TEST_CASE("generated spikes respect sample invariants") {
  const auto data = generate_synthetic(default_synthetic_spec(2));
  for (const auto& s : data.samples) {
    for (std::size_t k = 1; k < s.spikes.size(); ++k) CHECK(s.spikes[k - 1].time_ms <= s.spikes[k].time_ms);
    for (const auto& e : s.spikes) CHECK(e.time_ms == quantize_time(e.time_ms));
  }
}

TEST_CASE("template contrast increases separability") {
  const double contrasts[] = {0.02, 0.05, 0.1, 0.2};
  double previous = -1.0;
  for (double contrast : contrasts) {
    SyntheticSpec spec;
    spec.samples_per_class = 20;
    spec.seed = 8;
    TemplateParams tp;
    tp.contrast = contrast;
    tp.segment_contrast = 0.0;
    tp.seed = 8;
    spec.rates_hz = make_class_templates(spec.n_classes, spec.n_channels, spec.n_segments, tp);
    const double acc = template_correlation_accuracy(spec, generate_synthetic(spec));
    CAPTURE(contrast);
    CAPTURE(acc);
    CHECK(acc > previous);
    previous = acc;
  }
}

TEST_CASE("shared channels carry identical templates") {
  TemplateParams tp;
  tp.shared_fraction = 0.5;
  const auto rates = make_class_templates(3, 10, 4, tp);
  for (std::size_t ch = 0; ch < 5; ++ch) {
    for (std::size_t s = 0; s < 4; ++s) {
      CHECK(rates[(0 * 10 + ch) * 4 + s] == rates[(2 * 10 + ch) * 4 + s]);
    }
  }
  CHECK(rates[(0 * 10 + 7) * 4] != rates[(2 * 10 + 7) * 4]);
  for (double r : rates) CHECK(r >= 0.0);
}

TEST_CASE("save and load round trip exactly") {
  const auto dir = scratch("roundtrip");
  auto spec = default_synthetic_spec(6);
  spec.samples_per_class = 3;
  const auto data = generate_synthetic(spec);
  save_dataset(data, dir);
  CHECK(load_dataset(dir) == data);

  const auto empty_dir = scratch("empty");
  Dataset empty;
  empty.n_channels = 77;
  empty.n_classes = 10;
  save_dataset(empty, empty_dir);
  const auto loaded = load_dataset(empty_dir);
  CHECK(loaded.samples.empty());
  CHECK(validate(loaded).ok());
}

TEST_CASE("loader diagnostics name the file and line") {
  const auto dir = scratch("bad");
  Dataset data;
  data.n_channels = 4;
  data.n_classes = 2;
  data.samples.push_back(SpikeSample{{{0, 1.0}, {1, 2.5}}, 0, 10.0});
  data.samples.push_back(SpikeSample{{{2, 3.0}}, 1, 10.0});
  save_dataset(data, dir);

  auto expect_failure = [&](const std::string& body, const std::string& needle) {
    write_text(dir / "sample_00001.csv", "channel,time_ms\n" + body);
    try {
      load_dataset(dir);
      FAIL("expected a validation error");
    } catch (const ValidationError& e) {
      const std::string msg = e.what();
      CAPTURE(msg);
      CHECK(msg.find("sample_00001.csv") != std::string::npos);
      CHECK(msg.find(needle) != std::string::npos);
    }
  };
  expect_failure("2,10.000\n", ":2:");
  expect_failure("0,1.000\n9,2.000\n", ":3:");
  expect_failure("1,5.000\n1,4.000\n", "non-increasing");
  expect_failure("1,abc\n", "malformed");
  write_text(dir / "sample_00001.csv", "channel,time_ms\n2,3.000\n");
  CHECK(load_dataset(dir) == data);
  CHECK_THROWS_AS(load_dataset(scratch("missing")), IoError);
}

TEST_CASE("validation flags duplicates and bad channels") {
  Dataset data;
  data.n_channels = 2;
  data.n_classes = 1;
  data.samples.push_back(SpikeSample{{{0, 1.0}, {0, 1.0}}, 0, 10.0});
  auto report = validate(data);
  REQUIRE(report.violations.size() == 1);
  CHECK(report.violations[0].find("duplicate") != std::string::npos);

  data.samples[0] = SpikeSample{{{5, 1.0}, {1, 12.0}}, 0, 10.0};
  report = validate(data);
  CHECK(report.violations.size() == 2);
}

TEST_CASE("synthetic spec validation") {
  auto spec = default_synthetic_spec(1);
  spec.rates_hz[3] = -1.0;
  CHECK_THROWS_AS(generate_synthetic(spec), ValidationError);
  spec = default_synthetic_spec(1);
  spec.rates_hz.pop_back();
  CHECK_THROWS_AS(generate_synthetic(spec), ValidationError);
}
