#include "hcim/config.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "hcim/csv.hpp"
#include "hcim/errors.hpp"
#include "json.hpp"

namespace hcim::cli {

namespace fs = std::filesystem;

namespace {

std::string resolve_path(const std::string& path) {
  if (path.empty() || fs::exists(path) || fs::path(path).is_absolute()) return path;
  if (const char* dir = std::getenv(kConfigDirEnv)) {
    const fs::path candidate = fs::path(dir) / path;
    if (fs::exists(candidate)) return candidate.string();
  }
  return path;
}

uint64_t fnv1a(const std::string& s) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write output file: " + path);
  return out;
}

double measured_sparsity(const ExperimentConfig& config) {
  // Measured mode samples the seeded toy network through the functional path
  // and reuses its observed zero fraction.
  const mapper::ToyNet toy = mapper::make_toy_network(config.seed, config.scheme);
  const mapper::Calibration cal =
      mapper::calibrate(toy.workload, toy.weights, toy.inputs, config.scheme, config.hardware,
                        config.alpha_target);
  const mapper::FunctionalResult r = mapper::run_functional(
      toy.workload, toy.weights, toy.inputs, config.scheme, config.hardware, cal);
  return r.zero_fraction;
}

}  // namespace

void ExperimentConfig::apply_profile(const std::string& name) {
  if (name == "cifar") scheme = quant::QuantScheme::cifar();
  else if (name == "imagenet") scheme = quant::QuantScheme::imagenet();
  else throw ConfigError("unknown profile '" + name + "' (expected cifar or imagenet)");
  profile = name;
}

void ExperimentConfig::apply_crossbar(const std::string& spec) {
  if (spec == "128x128") hardware = mapper::HardwareConfig::config_a();
  else if (spec == "64x64") hardware = mapper::HardwareConfig::config_b();
  else throw ConfigError("unknown crossbar '" + spec + "' (expected 128x128 or 64x64)");
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
  const std::string resolved = resolve_path(path);
  std::ifstream in(resolved);
  if (!in) throw ConfigError("cannot open config file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ConfigError("config parse error in " + path + ": " + e.what());
  }
  ExperimentConfig c;
  try {
    if (j.contains("profile")) c.apply_profile(j["profile"].get<std::string>());
    if (j.contains("scheme")) {
      const auto& s = j["scheme"];
      c.scheme.input_bits = s.value("input_bits", c.scheme.input_bits);
      c.scheme.weight_bits = s.value("weight_bits", c.scheme.weight_bits);
      c.scheme.bit_stream = s.value("bit_stream", c.scheme.bit_stream);
      c.scheme.bit_slice = s.value("bit_slice", c.scheme.bit_slice);
      c.scheme.ps_bits = s.value("ps_bits", c.scheme.ps_bits);
      c.scheme.sf_bits = s.value("sf_bits", c.scheme.sf_bits);
      if (s.contains("mode")) {
        const std::string m = s["mode"].get<std::string>();
        if (m == "binary") c.scheme.mode = quant::PsqMode::binary;
        else if (m == "ternary") c.scheme.mode = quant::PsqMode::ternary;
        else throw ConfigError("unknown scheme mode '" + m + "'");
      }
    }
    if (j.contains("hardware")) {
      const auto& h = j["hardware"];
      if (h.contains("crossbar")) c.apply_crossbar(h["crossbar"].get<std::string>());
      c.hardware.timing.cycle_ns = h.value("cycle_ns", c.hardware.timing.cycle_ns);
      c.hardware.timing.phases_per_op = h.value("phases_per_op", c.hardware.timing.phases_per_op);
      c.hardware.timing.count_fill = h.value("count_fill", c.hardware.timing.count_fill);
      c.hardware.adc_sharing = h.value("adc_sharing", c.hardware.adc_sharing);
      if (h.contains("cost_table")) c.cost_table_path = h["cost_table"].get<std::string>();
    }
    c.workload_path = j.value("workload", c.workload_path);
    if (j.contains("modes")) c.modes = j["modes"].get<std::vector<std::string>>();
    if (j.contains("sparsity")) {
      const auto& s = j["sparsity"];
      const std::string source = s.value("source", "injected");
      if (source == "injected") c.sparsity_injected = true;
      else if (source == "measured") c.sparsity_injected = false;
      else throw ConfigError("unknown sparsity source '" + source + "'");
      c.sparsity_value = s.value("value", c.sparsity_value);
    }
    if (j.contains("sweep")) {
      const auto& s = j["sweep"];
      if (s.contains("sparsity_points"))
        c.sweep.sparsity_points = s["sparsity_points"].get<std::vector<double>>();
      if (s.contains("adc_bits")) c.sweep.adc_bits = s["adc_bits"].get<std::vector<int>>();
      if (s.contains("crossbar_sizes"))
        c.sweep.crossbar_sizes = s["crossbar_sizes"].get<std::vector<int>>();
    }
    c.seed = j.value("seed", c.seed);
    c.out_dir = j.value("out_dir", c.out_dir);
    c.alpha_target = j.value("alpha_target", c.alpha_target);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError("config " + path + ": " + e.what());
  }
  if (c.modes.empty()) throw ConfigError("config: mode list must not be empty");
  c.scheme.validate();
  return c;
}

std::string ExperimentConfig::canonical_json() const {
  nlohmann::json j;
  j["profile"] = profile;
  j["scheme"] = {{"input_bits", scheme.input_bits},   {"weight_bits", scheme.weight_bits},
                 {"bit_stream", scheme.bit_stream},   {"bit_slice", scheme.bit_slice},
                 {"ps_bits", scheme.ps_bits},         {"sf_bits", scheme.sf_bits},
                 {"mode", scheme.mode == quant::PsqMode::binary ? "binary" : "ternary"}};
  j["hardware"] = {{"crossbar", std::to_string(hardware.xbar_rows) + "x" +
                                    std::to_string(hardware.xbar_cols)},
                   {"label", hardware.label},
                   {"cycle_ns", hardware.timing.cycle_ns},
                   {"phases_per_op", hardware.timing.phases_per_op},
                   {"count_fill", hardware.timing.count_fill},
                   {"adc_sharing", hardware.adc_sharing},
                   {"cost_table", cost_table_path}};
  j["workload"] = workload_path;
  j["modes"] = modes;
  j["sparsity"] = {{"source", sparsity_injected ? "injected" : "measured"},
                   {"value", sparsity_value}};
  j["sweep"] = {{"sparsity_points", sweep.sparsity_points},
                {"adc_bits", sweep.adc_bits},
                {"crossbar_sizes", sweep.crossbar_sizes}};
  j["seed"] = seed;
  j["alpha_target"] = alpha_target;
  return j.dump();
}

std::string ExperimentConfig::hash() const {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a(canonical_json())));
  return buf;
}

cost::CostTable ExperimentConfig::load_cost_table() const {
  if (cost_table_path.empty()) return cost::CostTable::defaults();
  return cost::CostTable::from_file(resolve_path(cost_table_path));
}

mapper::Workload ExperimentConfig::load_workload_or_toy() const {
  if (workload_path.empty()) return mapper::make_toy_network(seed, scheme).workload;
  return mapper::load_workload(resolve_path(workload_path));
}

void Manifest::write(const std::string& path) const {
  nlohmann::json j;
  j["tool_version"] = tool_version;
  j["config_hash"] = config_hash;
  j["seed"] = seed;
  j["outputs"] = outputs;
  auto out = open_output(path);
  out << j.dump(2) << '\n';
}

int cmd_verify(const ExperimentConfig& config) {
  const mapper::ToyNet toy = mapper::make_toy_network(config.seed, config.scheme);
  const mapper::Calibration cal =
      mapper::calibrate(toy.workload, toy.weights, toy.inputs, config.scheme, config.hardware,
                        config.alpha_target);
  // Throws MismatchError with coordinates on any disagreement.
  const mapper::FunctionalResult r = mapper::run_functional(
      toy.workload, toy.weights, toy.inputs, config.scheme, config.hardware, cal);

  fs::create_directories(config.out_dir);
  const std::string csv_path = (fs::path(config.out_dir) / "verify_sparsity.csv").string();
  {
    auto out = open_output(csv_path);
    const std::string header[] = {"layer",       "zero_fraction",        "zero_codes",
                                  "total_codes", "overflow_saturations", "cycles"};
    csv_row(out, header);
    for (const mapper::LayerStats& s : r.layer_stats) {
      const std::string row[] = {s.layer,
                                 cost::format_double(s.zero_fraction),
                                 std::to_string(s.zero_codes),
                                 std::to_string(s.total_codes),
                                 std::to_string(s.overflow_saturations),
                                 std::to_string(s.cycles)};
      csv_row(out, row);
    }
  }
  Manifest m;
  m.config_hash = config.hash();
  m.seed = config.seed;
  m.outputs = {csv_path};
  m.write((fs::path(config.out_dir) / "manifest.json").string());

  std::printf("verify: %s ok, overall zero fraction %s\n", toy.workload.name.c_str(),
              cost::format_double(r.zero_fraction).c_str());
  return kOk;
}

namespace {

void write_comparison_csv(const std::vector<cost::RunReport>& reports, const std::string& path) {
  // Normalization reference per the ternary row when present.
  double ref_e = 0.0, ref_la = 0.0, ref_edap = 0.0;
  for (const auto& r : reports) {
    if (r.mode == "hcim_ternary") {
      const cost::DerivedMetrics m = cost::derived_metrics(r);
      ref_e = r.energy_pj();
      ref_la = m.latency_area;
      ref_edap = m.edap;
    }
  }
  auto out = open_output(path);
  const std::string header[] = {"mode",        "energy_pj",    "latency_ns",
                                "area_mm2",    "latency_area", "edap",
                                "energy_rel",  "latency_area_rel", "edap_rel"};
  csv_row(out, header);
  for (const auto& r : reports) {
    const cost::DerivedMetrics m = cost::derived_metrics(r);
    const auto rel = [](double v, double ref) {
      return ref != 0.0 ? cost::format_double(v / ref) : std::string("n/a");
    };
    const std::string row[] = {r.mode,
                               cost::format_double(r.energy_pj()),
                               cost::format_double(r.latency_ns()),
                               cost::format_double(r.area_mm2()),
                               cost::format_double(m.latency_area),
                               cost::format_double(m.edap),
                               rel(r.energy_pj(), ref_e),
                               rel(m.latency_area, ref_la),
                               rel(m.edap, ref_edap)};
    csv_row(out, row);
  }
}

// Re-read an emitted report CSV and confirm the total row equals the sum of
// its component rows.
void check_csv_totals(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvariantError("cannot re-read emitted CSV: " + path);
  std::string line;
  std::getline(in, line);  // header
  double sum_e = 0, sum_l = 0, sum_a = 0;
  bool saw_total = false;
  while (std::getline(in, line)) {
    std::stringstream ss(line);
    std::string layer, component, e, l, a;
    std::getline(ss, layer, ',');
    std::getline(ss, component, ',');
    std::getline(ss, e, ',');
    std::getline(ss, l, ',');
    std::getline(ss, a, ',');
    if (layer == "total") {
      saw_total = true;
      const double tol = 1e-6;
      if (std::abs(std::stod(e) - sum_e) > tol * (1 + std::abs(sum_e)) ||
          std::abs(std::stod(l) - sum_l) > tol * (1 + std::abs(sum_l)) ||
          std::abs(std::stod(a) - sum_a) > tol * (1 + std::abs(sum_a)))
        throw InvariantError("emitted totals do not match component sums in " + path);
    } else {
      sum_e += std::stod(e);
      sum_l += std::stod(l);
      sum_a += std::stod(a);
    }
  }
  if (!saw_total) throw InvariantError("no total row found in " + path);
}

}  // namespace

int cmd_estimate(const ExperimentConfig& config, bool check_totals) {
  const mapper::Workload workload = config.load_workload_or_toy();
  const cost::CostTable table = config.load_cost_table();

  mapper::SparsitySpec sparsity;
  sparsity.injected = true;
  sparsity.value = config.sparsity_injected ? config.sparsity_value : measured_sparsity(config);

  fs::create_directories(config.out_dir);
  Manifest manifest;
  manifest.config_hash = config.hash();
  manifest.seed = config.seed;

  std::vector<cost::RunReport> reports;
  for (const std::string& mode_name : config.modes) {
    const mapper::ModeSpec mode = mapper::ModeSpec::parse(mode_name);
    cost::RunReport r =
        mapper::estimate(workload, config.scheme, mode, table, sparsity, config.hardware);
    const std::string csv_path =
        (fs::path(config.out_dir) / (workload.name + "_" + mode_name + ".csv")).string();
    {
      auto out = open_output(csv_path);
      cost::write_report_csv(r, out);
    }
    if (check_totals) check_csv_totals(csv_path);
    manifest.outputs.push_back(csv_path);
    const std::string summary_path =
        (fs::path(config.out_dir) / (workload.name + "_" + mode_name + ".txt")).string();
    {
      auto out = open_output(summary_path);
      out << cost::summary_text(r);
    }
    manifest.outputs.push_back(summary_path);
    reports.push_back(std::move(r));
  }

  const std::string cmp_path = (fs::path(config.out_dir) / "comparison.csv").string();
  write_comparison_csv(reports, cmp_path);
  manifest.outputs.push_back(cmp_path);
  manifest.write((fs::path(config.out_dir) / "manifest.json").string());

  std::printf("estimate: %s, %zu mode(s), outputs in %s\n", workload.name.c_str(),
              reports.size(), config.out_dir.c_str());
  return kOk;
}

int cmd_sweep(const ExperimentConfig& config, const std::string& axis) {
  const mapper::Workload workload = config.load_workload_or_toy();
  const cost::CostTable table = config.load_cost_table();
  fs::create_directories(config.out_dir);
  const std::string csv_path = (fs::path(config.out_dir) / ("sweep_" + axis + ".csv")).string();
  Manifest manifest;
  manifest.config_hash = config.hash();
  manifest.seed = config.seed;
  manifest.outputs = {csv_path};

  if (axis == "sparsity") {
    if (config.sweep.sparsity_points.empty()) throw ConfigError("sweep: empty sparsity axis");
    const mapper::ModeSpec mode = mapper::ModeSpec::parse("hcim_ternary");
    auto out = open_output(csv_path);
    const std::string header[] = {"sparsity", "dcim_energy_pj", "dcim_reduction", "total_energy_pj",
                                  "latency_ns"};
    csv_row(out, header);
    double base_dcim = -1.0;
    double base_latency = -1.0;
    double prev = -1.0;
    for (double f : config.sweep.sparsity_points) {
      mapper::SparsitySpec sp{true, f, {}};
      const cost::RunReport r =
          mapper::estimate(workload, config.scheme, mode, table, sp, config.hardware);
      const double dcim_e = r.component_energy("dcim");
      if (base_dcim < 0) base_dcim = dcim_e;
      if (base_latency < 0) base_latency = r.latency_ns();
      if (prev >= 0 && dcim_e > prev + 1e-9)
        throw InvariantError("sweep: energy not monotone non-increasing in sparsity");
      if (std::abs(r.latency_ns() - base_latency) > 1e-9)
        throw InvariantError("sweep: latency changed with sparsity");
      prev = dcim_e;
      const std::string row[] = {cost::format_double(f), cost::format_double(dcim_e),
                                 cost::format_double(base_dcim > 0 ? 1.0 - dcim_e / base_dcim : 0.0),
                                 cost::format_double(r.energy_pj()),
                                 cost::format_double(r.latency_ns())};
      csv_row(out, row);
    }
  } else if (axis == "adc_bits") {
    if (config.sweep.adc_bits.empty()) throw ConfigError("sweep: empty adc_bits axis");
    auto out = open_output(csv_path);
    const std::string header[] = {"adc_bits", "mode", "energy_pj", "latency_ns", "area_mm2"};
    csv_row(out, header);
    for (int bits : config.sweep.adc_bits) {
      const mapper::ModeSpec mode = mapper::ModeSpec::parse("adc" + std::to_string(bits));
      mapper::SparsitySpec sp{true, 0.0, {}};
      const cost::RunReport r =
          mapper::estimate(workload, config.scheme, mode, table, sp, config.hardware);
      const std::string row[] = {std::to_string(bits), mode.name,
                                 cost::format_double(r.energy_pj()),
                                 cost::format_double(r.latency_ns()),
                                 cost::format_double(r.area_mm2())};
      csv_row(out, row);
    }
  } else if (axis == "crossbar_size") {
    if (config.sweep.crossbar_sizes.empty()) throw ConfigError("sweep: empty crossbar axis");
    auto out = open_output(csv_path);
    const std::string header[] = {"crossbar", "movement_events", "energy_pj", "latency_ns",
                                  "area_mm2"};
    csv_row(out, header);
    int64_t prev_moves = -1;
    int prev_size = 0;
    const mapper::ModeSpec mode = mapper::ModeSpec::parse("hcim_ternary");
    for (int size : config.sweep.crossbar_sizes) {
      const mapper::HardwareConfig hw = mapper::HardwareConfig::for_crossbar(size);
      const int64_t moves = mapper::movement_events(workload, config.scheme, hw);
      if (prev_moves >= 0 && size < prev_size && moves < prev_moves)
        throw InvariantError("sweep: movement events decreased as the crossbar shrank");
      prev_moves = moves;
      prev_size = size;
      mapper::SparsitySpec sp{true, config.sparsity_value, {}};
      const cost::RunReport r = mapper::estimate(workload, config.scheme, mode, table, sp, hw);
      const std::string row[] = {std::to_string(size) + "x" + std::to_string(size),
                                 std::to_string(moves), cost::format_double(r.energy_pj()),
                                 cost::format_double(r.latency_ns()),
                                 cost::format_double(r.area_mm2())};
      csv_row(out, row);
    }
  } else {
    throw ConfigError("unknown sweep axis '" + axis +
                      "' (expected sparsity, adc_bits or crossbar_size)");
  }

  manifest.write((fs::path(config.out_dir) / "manifest.json").string());
  std::printf("sweep: axis %s written to %s\n", axis.c_str(), csv_path.c_str());
  return kOk;
}

}  // namespace hcim::cli
