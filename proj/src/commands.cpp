#include "lsm/commands.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "lsm/errors.hpp"
#include "lsm/format.hpp"

namespace lsm::cli {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

fs::path output_dir(const RunConfig& config) {
  const fs::path dir(config.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  return dir;
}

json with_provenance(const RunConfig& config, json body) {
  const json echo = config_echo(config);
  body["config"] = echo;
  body["config_hash"] = content_hash(echo.dump());
  return body;
}

void emit(Written& written, const fs::path& path, const std::string& contents) {
  write_file(path, contents);
  written.push_back(path);
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::string cell_name(SynapseOrder order, double tau_fall) {
  return std::string(to_string(order)) + "_tau" + format_number(tau_fall);
}

}  // namespace

void write_file(const fs::path& path, const std::string& contents) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create " + path.parent_path().string() + ": " + ec.message());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << contents;
  if (!out) throw IoError("failed writing " + path.string());
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Dataset resolve_dataset(const RunConfig& config) {
  if (config.dataset_path) return load_dataset(*config.dataset_path);
  return generate_synthetic(config.synthetic_spec());
}

Topology resolve_topology(const RunConfig& config) {
  if (config.reservoir_file) {
    const std::string text = read_file(*config.reservoir_file);
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw ValidationError(*config.reservoir_file + ": not valid JSON");
    return topology_from_json(j);
  }
  ReservoirParams params = config.reservoir;
  params.seed = config.effective_reservoir_seed();
  Topology t;
  t.graph = build_reservoir(params);
  t.wiring = build_input_wiring(config.input_channels, config.fan_out, params.n_neurons,
                                config.wiring_seed());
  return t;
}

Written cmd_gen_data(const RunConfig& config) {
  const SyntheticSpec spec = config.synthetic_spec();
  const Dataset data = generate_synthetic(spec);
  const fs::path dir = output_dir(config);
  save_dataset(data, dir / "dataset");
  const auto report = validate(data);
  Written written{dir / "dataset" / "manifest.json"};
  emit(written, dir / "dataset_report.json",
       dump(with_provenance(config, {{"n_samples", data.samples.size()},
                                     {"n_channels", data.n_channels},
                                     {"class_counts", report.class_counts},
                                     {"violations", report.violations}})));
  return written;
}

Written cmd_gen_reservoir(const RunConfig& config) {
  const Topology t = resolve_topology(config);
  const fs::path dir = output_dir(config);
  Written written;
  emit(written, dir / "reservoir.json", dump(topology_to_json(t)));
  return written;
}

Written cmd_run(const RunConfig& config, bool export_rasters) {
  const Dataset data = resolve_dataset(config);
  const Topology topology = resolve_topology(config);
  const Experiment experiment{data, topology};
  const SweepConfig sweep = config.sweep_config();
  const auto detail = evaluate_point(experiment, sweep, config.operating_point, true);
  if (!detail.result.ok()) throw ValidationError("run failed: " + detail.result.failure);

  const fs::path dir = output_dir(config);
  Written written;
  const auto activity = reservoir_activity(detail.records);
  json body{{"alpha_in", detail.result.alpha_in},
            {"alpha_res", detail.result.alpha_res},
            {"activity_spikes_per_sample", activity.spikes_per_sample},
            {"rate_hz_per_neuron", activity.rate_hz_per_neuron},
            {"fold_accuracy", detail.kfold.fold_accuracy},
            {"fold_sizes", detail.kfold.fold_sizes},
            {"mean_accuracy", detail.kfold.mean_accuracy},
            {"std_accuracy", detail.kfold.std_accuracy},
            {"error", detail.result.mean_error},
            {"confusion", detail.kfold.confusion}};
  emit(written, dir / "run.json", dump(with_provenance(config, body)));

  std::string folds = "fold,accuracy\n";
  for (std::size_t f = 0; f < detail.kfold.fold_accuracy.size(); ++f) {
    folds += std::to_string(f) + ',' + format_number(detail.kfold.fold_accuracy[f]) + '\n';
  }
  emit(written, dir / "folds.csv", folds);

  const auto labels = data.labels();
  const auto weights = train_readout(assemble_responses(detail.records), labels, config.readout);
  emit(written, dir / "weights.json", dump(weights_to_json(weights, config.readout, config.seed)));
  emit(written, dir / "records.json", dump(record_summary(detail.records)));

  if (export_rasters) {
    for (std::size_t i = 0; i < detail.records.size(); ++i) {
      char name[32];
      std::snprintf(name, sizeof(name), "sample_%05zu.csv", i);
      emit(written, dir / "rasters" / name, raster_csv(detail.records[i]));
    }
  }
  return written;
}

Written cmd_sweep(const RunConfig& config) {
  const Dataset data = resolve_dataset(config);
  const Topology topology = resolve_topology(config);
  const SweepGrid grid = grid_sweep(Experiment{data, topology}, config.sweep_config());

  const fs::path dir = output_dir(config);
  Written written;
  emit(written, dir / "grid.csv", grid_csv(grid));
  emit(written, dir / "error_vs_activity.csv", curve_csv(error_vs_activity(grid)));
  emit(written, dir / "sweep_summary.json",
       dump(with_provenance(config, analysis_json(grid, config.band_size))));
  return written;
}

Written cmd_timescale_sweep(const RunConfig& config) {
  const Dataset data = resolve_dataset(config);
  const Topology topology = resolve_topology(config);
  const auto cells = timescale_sweep(Experiment{data, topology}, config.orders, config.taus_ms,
                                     config.sweep_config(), config.band_size);

  const fs::path dir = output_dir(config);
  Written written;
  emit(written, dir / "timescale.csv", timescale_csv(cells));
  json summary = json::array();
  std::string long_curves = "order,tau_fall_ms,activity,mean_error,alpha_in,alpha_res\n";
  for (const auto& cell : cells) {
    json entry{{"order", std::string(to_string(cell.order))},
               {"tau_fall_ms", cell.tau_fall_ms},
               {"tau_rise_ms", cell.tau_rise_ms}};
    if (!cell.failure.empty()) {
      entry["failure"] = cell.failure;
    } else {
      emit(written, dir / "grids" / (cell_name(cell.order, cell.tau_fall_ms) + ".csv"),
           grid_csv(cell.grid));
      entry["analysis"] = analysis_json(cell.grid, config.band_size);
      for (const auto& p : error_vs_activity(cell.grid).points) {
        long_curves += std::string(to_string(cell.order)) + ',' + format_number(cell.tau_fall_ms) + ',' +
                       format_number(p.activity) + ',' + format_number(p.mean_error) + ',' +
                       format_number(p.alpha_in) + ',' + format_number(p.alpha_res) + '\n';
      }
    }
    summary.push_back(std::move(entry));
  }
  emit(written, dir / "timescale_error_vs_activity.csv", long_curves);
  emit(written, dir / "timescale_summary.json", dump(with_provenance(config, {{"cells", summary}})));
  return written;
}

Written cmd_fixed_point(const RunConfig& config) {
  const Dataset data = resolve_dataset(config);
  const Topology topology = resolve_topology(config);
  const auto rows = fixed_point_study(Experiment{data, topology}, config.operating_point,
                                      config.orders, config.taus_ms, config.sweep_config());
  const fs::path dir = output_dir(config);
  Written written;
  emit(written, dir / "fixed_point.csv", fixed_point_csv(rows));
  json table = json::array();
  for (const auto& r : rows) {
    json row{{"order", std::string(to_string(r.order))},
             {"tau_fall_ms", r.tau_fall_ms},
             {"tau_rise_ms", r.tau_rise_ms},
             {"activity", r.result.activity},
             {"mean_error", r.result.ok() ? json(r.result.mean_error) : json(nullptr)},
             {"std_error", r.result.ok() ? json(r.result.std_error) : json(nullptr)}};
    if (!r.result.ok()) row["failure"] = r.result.failure;
    table.push_back(std::move(row));
  }
  emit(written, dir / "fixed_point.json",
       dump(with_provenance(config, {{"alpha_in", config.operating_point.alpha_in},
                                     {"alpha_res", config.operating_point.alpha_res},
                                     {"rows", table}})));
  return written;
}

Written cmd_analyze(const fs::path& grid_file, const fs::path& out_dir, std::size_t band_size) {
  const SweepGrid grid = grid_from_csv(read_file(grid_file));
  Written written;
  json analysis = analysis_json(grid, band_size);
  analysis["grid_hash"] = content_hash(grid_csv(grid));
  emit(written, out_dir / "analysis.json", dump(analysis));
  emit(written, out_dir / "error_vs_activity.csv", curve_csv(error_vs_activity(grid)));
  return written;
}

Written cmd_cost(SynapseOrder order, const fs::path& out_dir, std::string* table) {
  const auto report = estimate(order);
  Written written;
  const std::string text = cost_report_table(report);
  emit(written, out_dir / "cost.json", dump(cost_report_json(report)));
  emit(written, out_dir / "cost.txt", text);
  if (table) *table = text;
  return written;
}

}  // namespace lsm::cli
