#include "lsm/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "lsm/errors.hpp"
#include "lsm/format.hpp"
#include "lsm/parallel.hpp"

namespace lsm {

void SweepConfig::validate() const {
  if (alpha_in_values.empty() || alpha_res_values.empty()) {
    throw ValidationError("sweep grids must be nonempty");
  }
  for (double a : alpha_in_values) {
    if (!(a >= 0.0)) throw ValidationError("alpha_in values must be >= 0");
  }
  for (double a : alpha_res_values) {
    if (!(a >= 0.0)) throw ValidationError("alpha_res values must be >= 0");
  }
  kernel.validate();
  readout.validate();
  if (n_folds < 2) throw ValidationError("n_folds must be at least 2");
}

namespace {

PointDetail evaluate_with(const ReservoirSimulator& sim, const Dataset& dataset,
                          const SweepConfig& config, const ScalingPoint& scaling,
                          unsigned sample_threads, bool keep_records) {
  PointDetail detail;
  detail.result.alpha_in = scaling.alpha_in;
  detail.result.alpha_res = scaling.alpha_res;
  try {
    auto records = simulate_dataset(sim, scaling, dataset.samples, sample_threads);
    const auto labels = dataset.labels();
    detail.result.activity = reservoir_activity(records).spikes_per_sample;
    detail.kfold = kfold_evaluate(records, labels, config.readout, config.n_folds, config.seed);
    detail.result.mean_error = detail.kfold.error();
    detail.result.std_error = detail.kfold.std_accuracy;
    for (double a : detail.kfold.fold_accuracy) detail.result.fold_errors.push_back(1.0 - a);
    if (keep_records) detail.records = std::move(records);
  } catch (const std::exception& e) {
    detail.result.failure = e.what();
    detail.result.mean_error = std::numeric_limits<double>::quiet_NaN();
    detail.result.std_error = std::numeric_limits<double>::quiet_NaN();
  }
  return detail;
}

// Strict weak ordering used by find_optimum and the n-lowest band.
bool better(const PointResult& a, const PointResult& b) {
  if (a.mean_error != b.mean_error) return a.mean_error < b.mean_error;
  if (a.activity != b.activity) return a.activity < b.activity;
  if (a.alpha_in != b.alpha_in) return a.alpha_in < b.alpha_in;
  return a.alpha_res < b.alpha_res;
}

std::vector<std::size_t> ranked_points(const SweepGrid& grid) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < grid.points.size(); ++i) {
    if (grid.points[i].ok()) idx.push_back(i);
  }
  std::sort(idx.begin(), idx.end(),
            [&](std::size_t a, std::size_t b) { return better(grid.points[a], grid.points[b]); });
  return idx;
}

}  // namespace

PointDetail evaluate_point(const Experiment& experiment, const SweepConfig& config,
                           const ScalingPoint& scaling, bool keep_records) {
  config.validate();
  const ReservoirSimulator sim(experiment.topology.graph, experiment.topology.wiring, config.kernel,
                               config.lif);
  return evaluate_with(sim, experiment.dataset, config, scaling, config.threads, keep_records);
}

SweepGrid grid_sweep(const Experiment& experiment, const SweepConfig& config) {
  config.validate();
  const ReservoirSimulator sim(experiment.topology.graph, experiment.topology.wiring, config.kernel,
                               config.lif);
  SweepGrid grid;
  grid.alpha_in_values = config.alpha_in_values;
  grid.alpha_res_values = config.alpha_res_values;
  const std::size_t n_res = config.alpha_res_values.size();
  const std::size_t n_points = config.alpha_in_values.size() * n_res;
  grid.points.resize(n_points);

  // Coarse parallelism over grid cells when there are enough of them,
  // otherwise over samples inside each cell.
  const unsigned threads = std::max(1U, config.threads);
  const bool per_point = n_points >= threads;
  auto run_point = [&](std::size_t p) {
    const ScalingPoint scaling{config.alpha_in_values[p / n_res], config.alpha_res_values[p % n_res]};
    grid.points[p] =
        evaluate_with(sim, experiment.dataset, config, scaling, per_point ? 1 : threads, false).result;
  };
  if (per_point) {
    parallel_for(n_points, threads, run_point);
  } else {
    for (std::size_t p = 0; p < n_points; ++p) run_point(p);
  }
  return grid;
}

Optimum find_optimum(const SweepGrid& grid) {
  const auto ranked = ranked_points(grid);
  if (ranked.empty()) throw ValidationError("grid has no successfully evaluated points");
  const auto& p = grid.points[ranked.front()];
  return Optimum{ranked.front(), p.alpha_in, p.alpha_res, p.mean_error, p.activity, p.std_error};
}

ActivityCurve error_vs_activity(const SweepGrid& grid) {
  ActivityCurve curve;
  for (const auto& p : grid.points) {
    if (p.ok()) curve.points.push_back({p.activity, p.mean_error, p.alpha_in, p.alpha_res});
  }
  if (curve.points.empty()) throw ValidationError("grid has no successfully evaluated points");
  std::sort(curve.points.begin(), curve.points.end(), [](const auto& a, const auto& b) {
    if (a.activity != b.activity) return a.activity < b.activity;
    if (a.mean_error != b.mean_error) return a.mean_error < b.mean_error;
    if (a.alpha_in != b.alpha_in) return a.alpha_in < b.alpha_in;
    return a.alpha_res < b.alpha_res;
  });
  const auto opt = find_optimum(grid);
  curve.min_error = opt.min_error;
  curve.min_error_activity = opt.activity;
  curve.min_activity = curve.points.front().activity;
  curve.max_activity = curve.points.back().activity;
  if (curve.max_activity > 0.0) {
    ActivityBand band{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for (const auto& p : curve.points) {
      if (p.mean_error <= curve.min_error + kBandTolerance + 1e-12) {
        band.low = std::min(band.low, p.activity);
        band.high = std::max(band.high, p.activity);
      }
    }
    curve.band = band;
  }
  return curve;
}

BandStats optimal_activity_band(const SweepGrid& grid, std::size_t n) {
  const auto ranked = ranked_points(grid);
  if (n == 0 || n > ranked.size()) {
    throw ValidationError("band size " + std::to_string(n) + " exceeds the " +
                          std::to_string(ranked.size()) + " evaluated grid points");
  }
  BandStats stats;
  stats.count = n;
  for (std::size_t k = 0; k < n; ++k) stats.mean += grid.points[ranked[k]].activity;
  stats.mean /= static_cast<double>(n);
  double ss = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double d = grid.points[ranked[k]].activity - stats.mean;
    ss += d * d;
  }
  stats.std = std::sqrt(ss / static_cast<double>(n));
  return stats;
}

KernelSpec timescale_kernel(const KernelSpec& base, SynapseOrder order, double tau_ms) {
  KernelSpec k = base;
  k.order = order;
  if (order == SynapseOrder::Delta) {
    k.tau_fall_ms = base.dt_ms;
    k.tau_rise_ms = base.dt_ms / 2.0;
  } else {
    k.tau_fall_ms = tau_ms;
    k.tau_rise_ms = tau_ms / 2.0;
  }
  return k;
}

std::vector<TimescaleCell> timescale_sweep(const Experiment& experiment,
                                           std::span<const SynapseOrder> orders,
                                           std::span<const double> taus, const SweepConfig& base,
                                           std::size_t band_size) {
  std::vector<TimescaleCell> cells;
  for (SynapseOrder order : orders) {
    const std::size_t n_taus = order == SynapseOrder::Delta ? 1 : taus.size();
    for (std::size_t t = 0; t < n_taus; ++t) {
      TimescaleCell cell;
      cell.order = order;
      SweepConfig config = base;
      config.kernel = timescale_kernel(base.kernel, order, order == SynapseOrder::Delta ? 0.0 : taus[t]);
      cell.tau_fall_ms = config.kernel.tau_fall_ms;
      cell.tau_rise_ms = order == SynapseOrder::Second ? config.kernel.tau_rise_ms : 0.0;
      try {
        cell.grid = grid_sweep(experiment, config);
        cell.optimum = find_optimum(cell.grid);
        cell.band = optimal_activity_band(
            cell.grid, std::min(band_size, ranked_points(cell.grid).size()));
      } catch (const std::exception& e) {
        cell.failure = e.what();
      }
      cells.push_back(std::move(cell));
    }
  }
  return cells;
}

std::vector<FixedPointRow> fixed_point_study(const Experiment& experiment,
                                             const ScalingPoint& point,
                                             std::span<const SynapseOrder> orders,
                                             std::span<const double> taus, const SweepConfig& base) {
  point.validate();
  std::vector<FixedPointRow> rows;
  for (SynapseOrder order : orders) {
    const std::size_t n_taus = order == SynapseOrder::Delta ? 1 : taus.size();
    for (std::size_t t = 0; t < n_taus; ++t) {
      FixedPointRow row;
      row.order = order;
      SweepConfig config = base;
      config.kernel = timescale_kernel(base.kernel, order, order == SynapseOrder::Delta ? 0.0 : taus[t]);
      row.tau_fall_ms = config.kernel.tau_fall_ms;
      row.tau_rise_ms = order == SynapseOrder::Second ? config.kernel.tau_rise_ms : 0.0;
      try {
        row.result = evaluate_point(experiment, config, point).result;
      } catch (const std::exception& e) {
        row.result.alpha_in = point.alpha_in;
        row.result.alpha_res = point.alpha_res;
        row.result.failure = e.what();
        row.result.mean_error = std::numeric_limits<double>::quiet_NaN();
        row.result.std_error = std::numeric_limits<double>::quiet_NaN();
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

std::string grid_csv(const SweepGrid& grid) {
  std::string out = "alpha_in,alpha_res,activity,mean_error,std_error\n";
  for (const auto& p : grid.points) {
    out += format_number(p.alpha_in) + ',' + format_number(p.alpha_res) + ',' +
           format_number(p.activity) + ',' + format_number(p.mean_error) + ',' +
           format_number(p.std_error) + '\n';
  }
  return out;
}

SweepGrid grid_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "alpha_in,alpha_res,activity,mean_error,std_error") {
    throw ValidationError("grid file: expected header 'alpha_in,alpha_res,activity,mean_error,std_error'");
  }
  SweepGrid grid;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    double v[5];
    std::size_t start = 0;
    for (int f = 0; f < 5; ++f) {
      const auto comma = f < 4 ? line.find(',', start) : line.size();
      if (comma == std::string::npos ||
          !parse_number(std::string_view(line).substr(start, comma - start), v[f])) {
        throw ValidationError("grid file line " + std::to_string(line_no) + ": malformed row");
      }
      start = comma + 1;
    }
    PointResult p;
    p.alpha_in = v[0];
    p.alpha_res = v[1];
    p.activity = v[2];
    p.mean_error = v[3];
    p.std_error = v[4];
    if (std::isnan(p.mean_error)) p.failure = "failed in source sweep";
    grid.points.push_back(p);
    if (std::find(grid.alpha_in_values.begin(), grid.alpha_in_values.end(), p.alpha_in) ==
        grid.alpha_in_values.end()) {
      grid.alpha_in_values.push_back(p.alpha_in);
    }
    if (std::find(grid.alpha_res_values.begin(), grid.alpha_res_values.end(), p.alpha_res) ==
        grid.alpha_res_values.end()) {
      grid.alpha_res_values.push_back(p.alpha_res);
    }
  }
  const std::size_t n_res = grid.alpha_res_values.size();
  if (grid.points.empty() || grid.points.size() != grid.alpha_in_values.size() * n_res) {
    throw ValidationError("grid file is not a complete alpha_in x alpha_res grid");
  }
  for (std::size_t k = 0; k < grid.points.size(); ++k) {
    if (grid.points[k].alpha_in != grid.alpha_in_values[k / n_res] ||
        grid.points[k].alpha_res != grid.alpha_res_values[k % n_res]) {
      throw ValidationError("grid file rows are not in row-major alpha_in x alpha_res order");
    }
  }
  return grid;
}

std::string curve_csv(const ActivityCurve& curve) {
  std::string out = "activity,mean_error,alpha_in,alpha_res\n";
  for (const auto& p : curve.points) {
    out += format_number(p.activity) + ',' + format_number(p.mean_error) + ',' +
           format_number(p.alpha_in) + ',' + format_number(p.alpha_res) + '\n';
  }
  return out;
}

std::string timescale_csv(std::span<const TimescaleCell> cells) {
  std::string out =
      "order,tau_fall_ms,tau_rise_ms,min_error,std_error,alpha_in,alpha_res,activity,band_mean,band_std\n";
  for (const auto& c : cells) {
    out += std::string(to_string(c.order)) + ',' + format_number(c.tau_fall_ms) + ',' +
           format_number(c.tau_rise_ms) + ',';
    if (c.optimum) {
      out += format_number(c.optimum->min_error) + ',' + format_number(c.optimum->std_error) + ',' +
             format_number(c.optimum->alpha_in) + ',' + format_number(c.optimum->alpha_res) + ',' +
             format_number(c.optimum->activity) + ',' + format_number(c.band.mean) + ',' +
             format_number(c.band.std) + '\n';
    } else {
      out += "nan,nan,nan,nan,nan,nan,nan\n";
    }
  }
  return out;
}

std::string fixed_point_csv(std::span<const FixedPointRow> rows) {
  std::string out = "order,tau_fall_ms,tau_rise_ms,alpha_in,alpha_res,activity,mean_error,std_error\n";
  for (const auto& r : rows) {
    out += std::string(to_string(r.order)) + ',' + format_number(r.tau_fall_ms) + ',' +
           format_number(r.tau_rise_ms) + ',' + format_number(r.result.alpha_in) + ',' +
           format_number(r.result.alpha_res) + ',' + format_number(r.result.activity) + ',' +
           format_number(r.result.mean_error) + ',' + format_number(r.result.std_error) + '\n';
  }
  return out;
}

nlohmann::json analysis_json(const SweepGrid& grid, std::size_t band_size) {
  const auto opt = find_optimum(grid);
  const auto curve = error_vs_activity(grid);
  const std::size_t n_ok = ranked_points(grid).size();
  const auto band10 = optimal_activity_band(grid, std::min(band_size, n_ok));
  nlohmann::json j;
  j["optimum"] = {{"alpha_in", opt.alpha_in},
                  {"alpha_res", opt.alpha_res},
                  {"min_error", opt.min_error},
                  {"std_error", opt.std_error},
                  {"activity", opt.activity}};
  j["error_vs_activity"] = {{"min_error_activity", curve.min_error_activity},
                            {"min_activity", curve.min_activity},
                            {"max_activity", curve.max_activity},
                            {"optimum_interior", curve.optimum_interior()}};
  if (curve.band) {
    j["error_vs_activity"]["band"] = {{"low", curve.band->low},
                                      {"high", curve.band->high},
                                      {"tolerance", kBandTolerance},
                                      {"interior", curve.band_interior()}};
  } else {
    j["error_vs_activity"]["band"] = nullptr;
  }
  j["lowest_error_band"] = {{"n", band10.count}, {"mean", band10.mean}, {"std", band10.std}};
  j["n_points"] = grid.points.size();
  j["n_failed"] = grid.points.size() - n_ok;
  return j;
}

}  // namespace lsm
