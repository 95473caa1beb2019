#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "lsm/config.hpp"
#include "lsm/cost_model.hpp"

namespace lsm::cli {

/// Each command is a pure function of the config and its input files; it
/// returns the files it wrote under config.output_dir.
using Written = std::vector<std::filesystem::path>;

Dataset resolve_dataset(const RunConfig& config);
Topology resolve_topology(const RunConfig& config);

Written cmd_gen_data(const RunConfig& config);
Written cmd_gen_reservoir(const RunConfig& config);
Written cmd_run(const RunConfig& config, bool export_rasters = false);
Written cmd_sweep(const RunConfig& config);
Written cmd_timescale_sweep(const RunConfig& config);
Written cmd_fixed_point(const RunConfig& config);
Written cmd_analyze(const std::filesystem::path& grid_file, const std::filesystem::path& out_dir,
                    std::size_t band_size = 10);
Written cmd_cost(SynapseOrder order, const std::filesystem::path& out_dir, std::string* table = nullptr);

void write_file(const std::filesystem::path& path, const std::string& contents);
std::string read_file(const std::filesystem::path& path);

}  // namespace lsm::cli
