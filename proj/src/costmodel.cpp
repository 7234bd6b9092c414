#include "hcim/costmodel.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "hcim/csv.hpp"
#include "hcim/errors.hpp"
#include "json.hpp"

namespace hcim::cost {

CostTable CostTable::defaults() {
  CostTable t;
  // Column-peripheral alternatives, per analog crossbar column processed.
  t.entries_["sar7"] = {4.1, 1.52, 0.004};
  t.entries_["sar6"] = {0.59, 0.15, 0.027};
  t.entries_["flash4"] = {1.86, 0.05, 0.003};
  t.entries_["dcim_A"] = {0.22, 0.06, 0.009};
  t.entries_["dcim_B"] = {0.22, 0.1, 0.005};
  // Desk-scale placeholders for components the estimator needs but no single
  // published number pins down. Reports flag these as user-supplied.
  t.entries_["comparator"] = {0.001, 0.0, 0.00001};    // per compare event / per comparator
  t.entries_["crossbar_mvm"] = {0.04, 0.0, 0.012};     // per column processed / per crossbar
  t.entries_["shift_add"] = {0.05, 0.0, 0.0005};       // per conversion step / per crossbar
  t.entries_["ps_move"] = {0.01, 0.0, 0.0};            // per byte moved between tiles
  t.technology_ = "65nm";
  t.user_supplied_ = {"comparator", "crossbar_mvm", "ps_move", "shift_add"};
  return t;
}

CostTable CostTable::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open cost table file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ConfigError("cost table parse error in " + path + ": " + e.what());
  }
  CostTable t;
  t.technology_ = j.value("technology", "unspecified");
  if (!j.contains("entries") || !j["entries"].is_object())
    throw ConfigError("cost table " + path + " must contain an \"entries\" object");
  for (const auto& [name, e] : j["entries"].items()) {
    CostEntry entry{e.value("energy_pj", 0.0), e.value("latency_ns", 0.0),
                    e.value("area_mm2", 0.0)};
    if (entry.energy_pj < 0 || entry.latency_ns < 0 || entry.area_mm2 < 0)
      throw ConfigError("cost table entry '" + name + "' has a negative value");
    t.entries_[name] = entry;
  }
  if (j.contains("user_supplied"))
    t.user_supplied_ = j["user_supplied"].get<std::vector<std::string>>();
  return t;
}

void CostTable::to_file(const std::string& path) const {
  nlohmann::json j;
  j["version"] = 1;
  j["technology"] = technology_;
  for (const auto& [name, e] : entries_) {
    j["entries"][name] = {{"energy_pj", e.energy_pj},
                          {"latency_ns", e.latency_ns},
                          {"area_mm2", e.area_mm2}};
  }
  j["user_supplied"] = user_supplied_;
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write cost table file: " + path);
  out << j.dump(2) << '\n';
}

const CostEntry& CostTable::at(const std::string& name) const {
  auto it = entries_.find(name);
  if (it == entries_.end()) throw ConfigError("unknown cost entry '" + name + "'");
  return it->second;
}

bool CostTable::contains(const std::string& name) const { return entries_.count(name) != 0; }

void CostTable::set(const std::string& name, const CostEntry& entry) { entries_[name] = entry; }

DcimEnergyParams DcimEnergyParams::calibrated(int steps, double per_column_total_pj) {
  if (steps < 1) throw std::invalid_argument("calibrated: steps must be positive");
  const double per_op = per_column_total_pj / static_cast<double>(steps);
  DcimEnergyParams p;
  p.e_read_pj = 0.4 * per_op;
  p.e_compute_pj = 0.4 * per_op;
  p.e_store_pj = 0.2 * per_op;
  return p;
}

double dcim_energy(const dcim::EventCounters& counters, const DcimEnergyParams& params) {
  const uint64_t active = counters.precharge_reads;
  const uint64_t total = active + counters.gated_columns;
  if (total == 0) return 0.0;
  const double e_full = params.per_op_pj() * static_cast<double>(total);
  const double active_fraction = static_cast<double>(active) / static_cast<double>(total);
  return params.nongateable_fraction * e_full +
         (1.0 - params.nongateable_fraction) * e_full * active_fraction;
}

AdcCost adc_baseline_cost(int64_t columns, int64_t steps, const CostEntry& adc, int sharing) {
  if (sharing < 1) throw std::invalid_argument("adc_baseline_cost: sharing must be >= 1");
  if (columns < 0 || steps < 0) throw std::invalid_argument("adc_baseline_cost: negative count");
  const double conversions = static_cast<double>(columns) * static_cast<double>(steps);
  return {conversions * adc.energy_pj, conversions * adc.latency_ns / sharing};
}

ComponentCost& ComponentCost::operator+=(const ComponentCost& o) {
  energy_pj += o.energy_pj;
  latency_ns += o.latency_ns;
  area_mm2 += o.area_mm2;
  return *this;
}

ComponentCost LayerCost::total() const {
  ComponentCost t;
  for (const auto& [name, c] : components) t += c;
  return t;
}

ComponentCost RunReport::totals() const {
  ComponentCost t;
  for (const auto& l : layers) t += l.total();
  return t;
}

double RunReport::component_energy(const std::string& name) const {
  double e = 0.0;
  for (const auto& l : layers)
    for (const auto& [n, c] : l.components)
      if (n == name) e += c.energy_pj;
  return e;
}

DerivedMetrics derived_metrics(const RunReport& report) {
  const ComponentCost t = report.totals();
  return {t.latency_ns * t.area_mm2, t.energy_pj * t.latency_ns * t.area_mm2};
}

std::vector<double> normalize_by_reference(std::span<const double> values, double reference) {
  if (reference == 0.0) throw std::invalid_argument("normalization reference is zero");
  std::vector<double> out;
  out.reserve(values.size());
  for (double v : values) out.push_back(v / reference);
  return out;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

void write_report_csv(const RunReport& report, std::ostream& os) {
  const std::string header[] = {"layer", "component", "energy_pj", "latency_ns", "area_mm2"};
  csv_row(os, header);
  for (const auto& l : report.layers) {
    for (const auto& [name, c] : l.components) {
      const std::string row[] = {l.layer, name, format_double(c.energy_pj),
                                 format_double(c.latency_ns), format_double(c.area_mm2)};
      csv_row(os, row);
    }
  }
  const ComponentCost t = report.totals();
  const std::string row[] = {"total", "all", format_double(t.energy_pj),
                             format_double(t.latency_ns), format_double(t.area_mm2)};
  csv_row(os, row);
}

std::string summary_text(const RunReport& report) {
  std::ostringstream os;
  const ComponentCost t = report.totals();
  const DerivedMetrics m = derived_metrics(report);
  os << "workload: " << report.workload << '\n'
     << "mode: " << report.mode << '\n'
     << "technology: " << report.technology << '\n'
     << "layers: " << report.layers.size() << '\n'
     << "sparsity: " << format_double(report.sparsity) << '\n'
     << "overflow_saturations: " << report.overflow_saturations << '\n'
     << "energy_pj: " << format_double(t.energy_pj) << '\n'
     << "latency_ns: " << format_double(t.latency_ns) << '\n'
     << "area_mm2: " << format_double(t.area_mm2) << '\n'
     << "latency_area: " << format_double(m.latency_area) << '\n'
     << "edap: " << format_double(m.edap) << '\n';
  for (const auto& n : report.notes) os << "note: " << n << '\n';
  return os.str();
}

}  // namespace hcim::cost
