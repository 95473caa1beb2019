#include <doctest.h>

#include "lsm/cost_model.hpp"

using namespace lsm;

namespace {

const CostEntry& entry(const CostReport& r, CircuitComponent c) {
  for (const auto& e : r.entries) {
    if (e.component == c) return e;
  }
  FAIL("missing entry");
  return r.entries.front();
}

}  // namespace

TEST_CASE("zeroth order entries") {
  const auto r = estimate(SynapseOrder::Zeroth);
  CHECK(r.style == CircuitStyle::ZerothOrder);
  const auto& driver = entry(r, CircuitComponent::Driver);
  CHECK(driver.circuit == "Series Inverter Pair");
  CHECK(driver.power_nw == 100.0);
  CHECK(driver.power_kind == "dynamic");
  CHECK(driver.area_um2 == 10.0);
  const auto& pulse = entry(r, CircuitComponent::PulseGeneration);
  CHECK(pulse.circuit == "Counter (4-bit)");
  CHECK(pulse.power_nw == 5000.0);
  CHECK(pulse.area_um2 == 500.0);
  CHECK(estimate(SynapseOrder::Delta).style == CircuitStyle::ZerothOrder);
}

TEST_CASE("second order entries keep the driver power range") {
  const auto r = estimate(SynapseOrder::Second);
  CHECK(r.style == CircuitStyle::HigherOrder);
  const auto& driver = entry(r, CircuitComponent::Driver);
  CHECK(driver.circuit == "Analog Buffer - OpAmp");
  CHECK(driver.power_min_nw == 100000.0);
  CHECK(driver.power_max_nw == 500000.0);
  CHECK(driver.power_kind == "static");
  CHECK(driver.area_um2 == 1000.0);
  const auto& pulse = entry(r, CircuitComponent::PulseGeneration);
  CHECK(pulse.circuit == "DAC (4-bit)");
  CHECK(pulse.power_nw == 500000.0);
  CHECK(pulse.area_um2 == 1500.0);
  CHECK(estimate(SynapseOrder::First).style == CircuitStyle::HigherOrder);
}

TEST_CASE("benefit ratios match the published column") {
  for (auto order : {SynapseOrder::Delta, SynapseOrder::Zeroth, SynapseOrder::First, SynapseOrder::Second}) {
    const auto r = estimate(order);
    REQUIRE(r.benefit.size() == 2);
    CHECK(r.benefit[0].component == CircuitComponent::Driver);
    CHECK(r.benefit[0].power == 1000.0);
    CHECK(r.benefit[0].area == 100.0);
    CHECK(r.benefit[1].power == 100.0);
    CHECK(r.benefit[1].area == 3.0);
  }
}

TEST_CASE("ratios are recomputed from the entries") {
  const auto r = estimate(SynapseOrder::Zeroth);
  for (std::size_t i = 0; i < r.benefit.size(); ++i) {
    const auto& zero = r.entries[i];
    const auto& high = r.reference_entries[i];
    CHECK(r.benefit[i].power == high.power_nw / zero.power_nw);
    CHECK(r.benefit[i].area == high.area_um2 / zero.area_um2);
  }
  for (const auto& e : cost_table()) {
    CHECK(e.power_nw > 0.0);
    CHECK(e.area_um2 > 0.0);
  }
}

TEST_CASE("report serialization") {
  const auto r = estimate(SynapseOrder::Zeroth);
  const auto j = cost_report_json(r);
  CHECK(j["benefit"][0]["power_ratio"] == 1000.0);
  CHECK(j["benefit"][1]["area_ratio"] == 3.0);
  CHECK(j["assumptions"]["technology_node_um"] == 0.25);
  CHECK(j["assumptions"]["supply_v"] == 3.3);
  const auto table = cost_report_table(r);
  for (const char* needle : {"100-500 uW (static)", "100 nW (dynamic)", "1000x", "100x", "3x", "1500 um^2",
                             "5 uW", "Series Inverter Pair", "DAC (4-bit)"}) {
    CAPTURE(needle);
    CHECK(table.find(needle) != std::string::npos);
  }
}
