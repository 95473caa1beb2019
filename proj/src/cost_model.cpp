#include "lsm/cost_model.hpp"

#include <cstdio>

namespace lsm {

namespace {

std::string component_name(CircuitComponent c) {
  return c == CircuitComponent::Driver ? "driver" : "pulse_generation";
}

std::string style_name(CircuitStyle s) {
  return s == CircuitStyle::HigherOrder ? "higher_order" : "zeroth_order";
}

std::string power_text(const CostEntry& e) {
  auto fmt = [](double nw) {
    char buf[32];
    if (nw >= 1000.0) {
      std::snprintf(buf, sizeof(buf), "%g uW", nw / 1000.0);
    } else {
      std::snprintf(buf, sizeof(buf), "%g nW", nw);
    }
    return std::string(buf);
  };
  std::string text = fmt(e.power_nw);
  if (e.power_min_nw != e.power_max_nw) {
    // "100-500 uW" when both ends share a unit
    const std::string lo = fmt(e.power_min_nw);
    const std::string hi = fmt(e.power_max_nw);
    const auto unit = [](const std::string& s) { return s.substr(s.find(' ')); };
    text = unit(lo) == unit(hi) ? lo.substr(0, lo.find(' ')) + "-" + hi : lo + "-" + hi;
  }
  if (!e.power_kind.empty()) text += " (" + e.power_kind + ")";
  return text;
}

const CostEntry& find_entry(CircuitComponent c, CircuitStyle s) {
  for (const auto& e : cost_table()) {
    if (e.component == c && e.style == s) return e;
  }
  return cost_table().front();
}

}  // namespace

CircuitStyle circuit_style(SynapseOrder order) {
  return order == SynapseOrder::Delta || order == SynapseOrder::Zeroth ? CircuitStyle::ZerothOrder
                                                                       : CircuitStyle::HigherOrder;
}

const std::vector<CostEntry>& cost_table() {
  // The op-amp range is 100-500 uW; its lower bound reproduces the published
  // 1000x driver benefit, so it is the ratio value.
  static const std::vector<CostEntry> table{
      {CircuitComponent::Driver, CircuitStyle::HigherOrder, "Analog Buffer - OpAmp", 100000.0,
       100000.0, 500000.0, "static", 1000.0},
      {CircuitComponent::Driver, CircuitStyle::ZerothOrder, "Series Inverter Pair", 100.0, 100.0,
       100.0, "dynamic", 10.0},
      {CircuitComponent::PulseGeneration, CircuitStyle::HigherOrder, "DAC (4-bit)", 500000.0,
       500000.0, 500000.0, "", 1500.0},
      {CircuitComponent::PulseGeneration, CircuitStyle::ZerothOrder, "Counter (4-bit)", 5000.0,
       5000.0, 5000.0, "", 500.0},
  };
  return table;
}

CostReport estimate(SynapseOrder order) {
  CostReport report;
  report.order = order;
  report.style = circuit_style(order);
  const CircuitStyle other = report.style == CircuitStyle::ZerothOrder ? CircuitStyle::HigherOrder
                                                                       : CircuitStyle::ZerothOrder;
  for (CircuitComponent c : {CircuitComponent::Driver, CircuitComponent::PulseGeneration}) {
    const auto& high = find_entry(c, CircuitStyle::HigherOrder);
    const auto& zero = find_entry(c, CircuitStyle::ZerothOrder);
    report.entries.push_back(find_entry(c, report.style));
    report.reference_entries.push_back(find_entry(c, other));
    report.benefit.push_back(CostRatio{c, high.power_nw / zero.power_nw, high.area_um2 / zero.area_um2});
  }
  report.assumptions = {{"technology_node_um", 0.25},
                        {"supply_v", 3.3},
                        {"load_capacitance_pf", 4.0},
                        {"signal_band", "ms (1 kHz)"},
                        {"bit_width", 4}};
  return report;
}

nlohmann::json cost_report_json(const CostReport& report) {
  auto entry_json = [](const CostEntry& e) {
    return nlohmann::json{{"component", component_name(e.component)},
                          {"style", style_name(e.style)},
                          {"circuit", e.circuit},
                          {"power_nw", e.power_nw},
                          {"power_min_nw", e.power_min_nw},
                          {"power_max_nw", e.power_max_nw},
                          {"power_kind", e.power_kind},
                          {"area_um2", e.area_um2}};
  };
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& e : report.entries) entries.push_back(entry_json(e));
  nlohmann::json reference = nlohmann::json::array();
  for (const auto& e : report.reference_entries) reference.push_back(entry_json(e));
  nlohmann::json benefit = nlohmann::json::array();
  for (const auto& r : report.benefit) {
    benefit.push_back({{"component", component_name(r.component)},
                       {"power_ratio", r.power},
                       {"area_ratio", r.area}});
  }
  return nlohmann::json{{"order", std::string(to_string(report.order))},
                        {"style", style_name(report.style)},
                        {"entries", entries},
                        {"reference_entries", reference},
                        {"benefit", benefit},
                        {"assumptions", report.assumptions}};
}

std::string cost_report_table(const CostReport& report) {
  std::string out;
  char line[256];
  std::snprintf(line, sizeof(line), "%-18s %-34s %-34s %s\n", "Component", "Higher order",
                "0th order", "Benefit");
  out += line;
  for (std::size_t i = 0; i < report.benefit.size(); ++i) {
    const auto c = report.benefit[i].component;
    const auto& high = find_entry(c, CircuitStyle::HigherOrder);
    const auto& zero = find_entry(c, CircuitStyle::ZerothOrder);
    const std::string name = c == CircuitComponent::Driver ? "Driver" : "Pulse generation";
    std::snprintf(line, sizeof(line), "%-18s %-34s %-34s\n", name.c_str(), high.circuit.c_str(),
                  zero.circuit.c_str());
    out += line;
    std::snprintf(line, sizeof(line), "%-18s %-34s %-34s %gx\n", "", ("Power: " + power_text(high)).c_str(),
                  ("Power: " + power_text(zero)).c_str(), report.benefit[i].power);
    out += line;
    char ha[64];
    char za[64];
    std::snprintf(ha, sizeof(ha), "Area: %g um^2", high.area_um2);
    std::snprintf(za, sizeof(za), "Area: %g um^2", zero.area_um2);
    std::snprintf(line, sizeof(line), "%-18s %-34s %-34s %gx\n", "", ha, za, report.benefit[i].area);
    out += line;
  }
  std::snprintf(line, sizeof(line), "Selected order: %s (%s)\n", std::string(to_string(report.order)).c_str(),
                style_name(report.style).c_str());
  out += line;
  return out;
}

}  // namespace lsm
