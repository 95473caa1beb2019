#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lsm/dataset.hpp"
#include "lsm/dynamics.hpp"
#include "lsm/readout.hpp"
#include "lsm/synapse_kernels.hpp"
#include "lsm/topology.hpp"

namespace lsm {

struct SweepConfig {
  std::vector<double> alpha_in_values{1, 2, 4, 6, 8, 12, 16, 20};
  std::vector<double> alpha_res_values{0.1, 0.25, 0.5, 1, 1.5, 2, 3, 4};
  KernelSpec kernel;
  LifParams lif;
  ReadoutConfig readout;
  std::size_t n_folds = 5;
  std::uint64_t seed = 1;
  unsigned threads = 1;

  void validate() const;
};

/// Result of simulating and cross-validating one operating point.
struct PointResult {
  double alpha_in = 0.0;
  double alpha_res = 0.0;
  double activity = 0.0;  // spikes per sample
  double mean_error = 0.0;
  double std_error = 0.0;
  std::vector<double> fold_errors;
  std::string failure;  // empty when the point evaluated cleanly

  bool ok() const { return failure.empty(); }
};

/// Row-major grid: point (i, j) pairs alpha_in_values[i] with alpha_res_values[j].
struct SweepGrid {
  std::vector<double> alpha_in_values;
  std::vector<double> alpha_res_values;
  std::vector<PointResult> points;

  const PointResult& at(std::size_t i_in, std::size_t i_res) const {
    return points[i_in * alpha_res_values.size() + i_res];
  }
};

/// Shared inputs of every sweep: the dataset and the fixed topology.
struct Experiment {
  const Dataset& dataset;
  const Topology& topology;
};

/// Simulates all samples at one scaling point and runs k-fold evaluation.
/// Also returns the confusion matrix and per-sample records when requested.
struct PointDetail {
  PointResult result;
  KFoldResult kfold;
  std::vector<SampleRecord> records;
};

PointDetail evaluate_point(const Experiment& experiment, const SweepConfig& config,
                           const ScalingPoint& scaling, bool keep_records = false);

SweepGrid grid_sweep(const Experiment& experiment, const SweepConfig& config);

struct Optimum {
  std::size_t index = 0;
  double alpha_in = 0.0;
  double alpha_res = 0.0;
  double min_error = 0.0;
  double activity = 0.0;
  double std_error = 0.0;
};

/// Lowest error, then lowest activity, then lowest alpha_in, then alpha_res.
/// Failed points are skipped; throws ValidationError when none succeeded.
Optimum find_optimum(const SweepGrid& grid);

struct ActivityBand {
  double low = 0.0;
  double high = 0.0;
};

struct ActivityCurve {
  struct Point {
    double activity;
    double mean_error;
    double alpha_in;
    double alpha_res;
  };
  std::vector<Point> points;  // sorted by activity
  double min_error = 0.0;
  double min_error_activity = 0.0;
  double min_activity = 0.0;
  double max_activity = 0.0;
  /// Activity range of points within one percentage point of the minimum
  /// error; empty when every point is quiescent.
  std::optional<ActivityBand> band;

  bool band_interior() const {
    return band && band->low > min_activity && band->high < max_activity;
  }
  bool optimum_interior() const {
    return min_error_activity > min_activity && min_error_activity < max_activity;
  }
};

inline constexpr double kBandTolerance = 0.01;

ActivityCurve error_vs_activity(const SweepGrid& grid);

struct BandStats {
  double mean = 0.0;
  double std = 0.0;
  std::size_t count = 0;
};

/// Mean and population std of the activity of the n lowest-error points.
BandStats optimal_activity_band(const SweepGrid& grid, std::size_t n = 10);

struct TimescaleCell {
  SynapseOrder order = SynapseOrder::Second;
  double tau_fall_ms = 0.0;
  double tau_rise_ms = 0.0;
  SweepGrid grid;
  std::optional<Optimum> optimum;
  BandStats band;
  std::string failure;
};

/// Kernel for one cell of a timescale sweep: Second uses tau_rise = tau / 2,
/// Delta ignores tau.
KernelSpec timescale_kernel(const KernelSpec& base, SynapseOrder order, double tau_ms);

/// One grid sweep per (order, tau). Delta contributes a single cell.
std::vector<TimescaleCell> timescale_sweep(const Experiment& experiment,
                                           std::span<const SynapseOrder> orders,
                                           std::span<const double> taus, const SweepConfig& base,
                                           std::size_t band_size = 10);

struct FixedPointRow {
  SynapseOrder order = SynapseOrder::Second;
  double tau_fall_ms = 0.0;
  double tau_rise_ms = 0.0;
  PointResult result;
};

/// Evaluates every (order, tau) at a single scaling point without sweeping.
std::vector<FixedPointRow> fixed_point_study(const Experiment& experiment,
                                             const ScalingPoint& point,
                                             std::span<const SynapseOrder> orders,
                                             std::span<const double> taus, const SweepConfig& base);

// Serialization. All numbers use shortest round-trip formatting so that
// reruns produce byte-identical files.
std::string grid_csv(const SweepGrid& grid);
SweepGrid grid_from_csv(const std::string& text);
std::string curve_csv(const ActivityCurve& curve);
std::string timescale_csv(std::span<const TimescaleCell> cells);
std::string fixed_point_csv(std::span<const FixedPointRow> rows);
nlohmann::json analysis_json(const SweepGrid& grid, std::size_t band_size = 10);

}  // namespace lsm
