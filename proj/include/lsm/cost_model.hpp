#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lsm/synapse_kernels.hpp"

namespace lsm {

enum class CircuitComponent { Driver, PulseGeneration };
enum class CircuitStyle { HigherOrder, ZerothOrder };

/// Published power/area point estimate for one synapse building block
/// (0.25 um CMOS, 3.3 V). Powers are in nanowatts so that the published
/// benefit ratios come out exact. `power_nw` is the value used for ratios;
/// ranges keep their bounds in power_min_nw / power_max_nw.
struct CostEntry {
  CircuitComponent component = CircuitComponent::Driver;
  CircuitStyle style = CircuitStyle::ZerothOrder;
  std::string circuit;
  double power_nw = 0.0;
  double power_min_nw = 0.0;
  double power_max_nw = 0.0;
  std::string power_kind;  // "static" or "dynamic" when stated
  double area_um2 = 0.0;
};

struct CostRatio {
  CircuitComponent component = CircuitComponent::Driver;
  double power = 0.0;  // higher-order / zeroth-order
  double area = 0.0;
};

struct CostReport {
  SynapseOrder order = SynapseOrder::Zeroth;
  CircuitStyle style = CircuitStyle::ZerothOrder;
  std::vector<CostEntry> entries;              // for the requested order
  std::vector<CostEntry> reference_entries;    // the other style, for comparison
  std::vector<CostRatio> benefit;
  nlohmann::json assumptions;
};

CircuitStyle circuit_style(SynapseOrder order);
const std::vector<CostEntry>& cost_table();
CostReport estimate(SynapseOrder order);

nlohmann::json cost_report_json(const CostReport& report);
std::string cost_report_table(const CostReport& report);

}  // namespace lsm
