#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hcim/dcim.hpp"

namespace hcim::cost {

struct CostEntry {
  double energy_pj = 0.0;   // per event
  double latency_ns = 0.0;  // per event
  double area_mm2 = 0.0;    // per instance
};

// Named component costs. The ADC and DCiM entries are per column of the
// analog crossbar processed (all bit-stream steps folded in); the remaining
// entries are per event or per instance as used by the estimator.
class CostTable {
 public:
  static CostTable defaults();
  static CostTable from_file(const std::string& path);
  void to_file(const std::string& path) const;

  const CostEntry& at(const std::string& name) const;  // throws naming the entry
  bool contains(const std::string& name) const;
  void set(const std::string& name, const CostEntry& entry);

  const std::map<std::string, CostEntry>& entries() const { return entries_; }
  const std::string& technology() const { return technology_; }
  void set_technology(std::string t) { technology_ = std::move(t); }
  const std::vector<std::string>& user_supplied() const { return user_supplied_; }

 private:
  std::map<std::string, CostEntry> entries_;
  std::string technology_ = "65nm";
  std::vector<std::string> user_supplied_;
};

// Per-column-event energies of the three pipeline stages plus the fraction
// of array energy that clock gating cannot remove. The split is calibrated
// so that a full set of steps at 0% sparsity costs the table's per-column
// energy, and 50% sparsity removes 24% of it.
struct DcimEnergyParams {
  double e_read_pj = 0.022;
  double e_compute_pj = 0.022;
  double e_store_pj = 0.011;
  double nongateable_fraction = 0.52;

  double per_op_pj() const { return e_read_pj + e_compute_pj + e_store_pj; }
  // Scale the default 2:2:1 split so steps * per_op = per_column_total_pj.
  static DcimEnergyParams calibrated(int steps, double per_column_total_pj);
};

// Gated columns keep the non-gateable floor; active columns pay full price.
double dcim_energy(const dcim::EventCounters& counters, const DcimEnergyParams& params);

struct AdcCost {
  double energy_pj = 0.0;
  double latency_ns = 0.0;
};

// conversions = columns * steps; energy scales with conversions, latency is
// divided across the ADCs instantiated per crossbar.
AdcCost adc_baseline_cost(int64_t columns, int64_t steps, const CostEntry& adc, int sharing);

struct ComponentCost {
  double energy_pj = 0.0;
  double latency_ns = 0.0;
  double area_mm2 = 0.0;

  ComponentCost& operator+=(const ComponentCost& o);
};

struct LayerCost {
  std::string layer;
  std::vector<std::pair<std::string, ComponentCost>> components;

  ComponentCost total() const;
};

struct RunReport {
  std::string workload;
  std::string mode;
  std::string technology;
  std::vector<LayerCost> layers;
  double sparsity = 0.0;
  uint64_t overflow_saturations = 0;
  std::vector<std::string> notes;

  ComponentCost totals() const;
  double energy_pj() const { return totals().energy_pj; }
  double latency_ns() const { return totals().latency_ns; }
  double area_mm2() const { return totals().area_mm2; }
  double component_energy(const std::string& name) const;
};

struct DerivedMetrics {
  double latency_area = 0.0;
  double edap = 0.0;
};

DerivedMetrics derived_metrics(const RunReport& report);

// Divide each value by the reference; errors out on a zero reference.
std::vector<double> normalize_by_reference(std::span<const double> values, double reference);

// CSV body: header then one row per (layer, component) plus a trailing
// total,all row. Deterministic formatting, RFC-style quoting.
void write_report_csv(const RunReport& report, std::ostream& os);

std::string summary_text(const RunReport& report);

std::string format_double(double v);

}  // namespace hcim::cost
