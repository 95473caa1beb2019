// lsm: command-line front end for the reservoir simulator and experiment harness.
//
//   lsm gen-data        --config run.json
//   lsm gen-reservoir   --config run.json
//   lsm run             --config run.json [--rasters]
//   lsm sweep           --config run.json
//   lsm timescale-sweep --config run.json
//   lsm fixed-point     --config run.json
//   lsm analyze         grid.csv --out dir
//   lsm cost            --order zeroth
//
// Exit codes: 0 success, 1 validation error, 2 I/O error.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lsm/commands.hpp"
#include "lsm/errors.hpp"

namespace {

struct CommonOptions {
  std::string config_path;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::optional<std::string> out;
  std::optional<std::string> reservoir_file;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("-c,--config", o.config_path, "Run configuration (JSON)");
  cmd->add_option("--set", o.overrides, "Override a config value: dotted.key=value")->take_all();
  cmd->add_option("--seed", o.seed, "Override the run seed");
  cmd->add_option("--threads", o.threads, "Worker threads (never changes outputs)");
  cmd->add_option("-o,--out", o.out, "Output directory");
  cmd->add_option("--reservoir-file", o.reservoir_file, "Topology file from gen-reservoir");
}

lsm::RunConfig load_config(const CommonOptions& o) {
  nlohmann::json doc = nlohmann::json::object();
  if (!o.config_path.empty()) {
    const std::string text = lsm::cli::read_file(o.config_path);
    doc = nlohmann::json::parse(text, nullptr, false);
    if (doc.is_discarded()) throw lsm::ValidationError(o.config_path + ": not valid JSON");
  }
  for (const auto& assignment : o.overrides) lsm::apply_override(doc, assignment);
  if (o.seed) doc["seed"] = *o.seed;
  if (o.threads) doc["threads"] = *o.threads;
  if (o.out) doc["output_dir"] = *o.out;
  if (o.reservoir_file) doc["reservoir"]["file"] = *o.reservoir_file;
  return lsm::parse_run_config(doc);
}

void report(const lsm::cli::Written& written) {
  for (const auto& path : written) std::cout << path.string() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Liquid state machine simulator and synaptic order study harness"};
  app.require_subcommand(1);

  CommonOptions common;
  auto* gen_data = app.add_subcommand("gen-data", "Generate the synthetic spike dataset");
  auto* gen_reservoir = app.add_subcommand("gen-reservoir", "Build and persist the reservoir topology");
  auto* run = app.add_subcommand("run", "Evaluate one operating point with k-fold cross-validation");
  auto* sweep = app.add_subcommand("sweep", "Sweep alpha_in x alpha_res for one kernel");
  auto* timescale = app.add_subcommand("timescale-sweep", "Sweep per synaptic order and timescale");
  auto* fixed = app.add_subcommand("fixed-point", "Evaluate all orders/timescales at one operating point");
  for (auto* cmd : {gen_data, gen_reservoir, run, sweep, timescale, fixed}) add_common(cmd, common);

  bool rasters = false;
  run->add_flag("--rasters", rasters, "Export per-sample raster CSVs");

  auto* analyze = app.add_subcommand("analyze", "Analyze a stored grid without re-simulating");
  std::string grid_file;
  std::string analyze_out = ".";
  std::size_t band_size = 10;
  analyze->add_option("grid", grid_file, "grid.csv produced by sweep")->required();
  analyze->add_option("-o,--out", analyze_out, "Output directory");
  analyze->add_option("--band-size", band_size, "Number of lowest-error points for the activity band");

  auto* cost = app.add_subcommand("cost", "Synapse circuit cost report");
  std::string order_name = "zeroth";
  std::string cost_out = ".";
  cost->add_option("--order", order_name, "delta, zeroth, first or second");
  cost->add_option("-o,--out", cost_out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*analyze) {
      report(lsm::cli::cmd_analyze(grid_file, analyze_out, band_size));
    } else if (*cost) {
      std::string table;
      const auto written = lsm::cli::cmd_cost(lsm::parse_synapse_order(order_name), cost_out, &table);
      std::cout << table;
      report(written);
    } else {
      const lsm::RunConfig config = load_config(common);
      if (*gen_data) {
        report(lsm::cli::cmd_gen_data(config));
      } else if (*gen_reservoir) {
        report(lsm::cli::cmd_gen_reservoir(config));
      } else if (*run) {
        report(lsm::cli::cmd_run(config, rasters));
      } else if (*sweep) {
        report(lsm::cli::cmd_sweep(config));
      } else if (*timescale) {
        report(lsm::cli::cmd_timescale_sweep(config));
      } else if (*fixed) {
        report(lsm::cli::cmd_fixed_point(config));
      }
    }
  } catch (const lsm::IoError& e) {
    std::cerr << "lsm: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "lsm: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
