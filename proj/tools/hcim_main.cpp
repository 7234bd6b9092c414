#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hcim/config.hpp"
#include "hcim/errors.hpp"
#include "hcim/selftest.hpp"

namespace {

struct CommonFlags {
  std::string config_path;
  std::string out_dir;
  std::string crossbar;
  std::string profile;
  std::vector<std::string> modes;
  double sparsity = -1.0;
  long long seed = -1;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config_path, "Experiment config file (JSON)");
  cmd->add_option("--seed", f.seed, "Random seed override");
  cmd->add_option("--out", f.out_dir, "Output directory override");
  cmd->add_option("--mode", f.modes,
                  "Mode override, repeatable (hcim_ternary|hcim_binary|adc7|adc6|adc4)");
  cmd->add_option("--sparsity", f.sparsity, "Injected sparsity override in [0,1]");
  cmd->add_option("--crossbar", f.crossbar, "Crossbar preset (128x128|64x64)");
  cmd->add_option("--profile", f.profile, "Precision profile (cifar|imagenet)");
}

hcim::cli::ExperimentConfig build_config(const CommonFlags& f) {
  hcim::cli::ExperimentConfig c;
  if (!f.config_path.empty()) c = hcim::cli::ExperimentConfig::from_file(f.config_path);
  if (!f.profile.empty()) c.apply_profile(f.profile);
  if (!f.crossbar.empty()) c.apply_crossbar(f.crossbar);
  if (!f.modes.empty()) c.modes = f.modes;
  if (f.sparsity >= 0.0) {
    c.sparsity_injected = true;
    c.sparsity_value = f.sparsity;
  }
  if (f.seed >= 0) c.seed = static_cast<uint64_t>(f.seed);
  if (!f.out_dir.empty()) c.out_dir = f.out_dir;
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Functional simulator and cost estimator for an ADC-less hybrid "
               "analog-digital compute-in-memory accelerator"};
  app.require_subcommand(1);
  app.footer("Environment: HCIM_CONFIG_DIR sets the default directory for relative "
             "config/workload/cost-table paths.\n"
             "Exit codes: 0 ok, 2 config error, 3 verification mismatch, 4 internal "
             "invariant violation.");

  CommonFlags selftest_flags, verify_flags, estimate_flags, sweep_flags;
  bool inject_fault = false;
  bool check_totals = false;
  std::string sweep_axis = "sparsity";

  CLI::App* selftest = app.add_subcommand(
      "selftest", "Run the built-in gate, word-level and pipeline suites");
  add_common(selftest, selftest_flags);
  selftest->add_flag("--inject-fault", inject_fault,
                     "Testing hook: break the borrow gate to prove the suite catches it");

  CLI::App* verify = app.add_subcommand(
      "verify", "Check the hardware path against the software reference on a seeded toy net");
  add_common(verify, verify_flags);

  CLI::App* estimate =
      app.add_subcommand("estimate", "Emit per-mode cost reports and a normalized comparison");
  add_common(estimate, estimate_flags);
  estimate->add_flag("--check-totals", check_totals,
                     "Re-read emitted CSVs and verify totals against the breakdown");

  CLI::App* sweep = app.add_subcommand("sweep", "Sweep one axis and emit a CSV");
  add_common(sweep, sweep_flags);
  sweep->add_option("--axis", sweep_axis, "Axis: sparsity|adc_bits|crossbar_size");

  CLI11_PARSE(app, argc, argv);

  try {
    if (selftest->parsed()) {
      hcim::cli::SelftestOptions opts;
      opts.inject_full_sub_fault = inject_fault;
      hcim::cli::ExperimentConfig c = build_config(selftest_flags);
      opts.seed = c.seed;
      const hcim::cli::SelftestResult r = hcim::cli::run_selftest(opts, std::cout);
      return r.failures == 0 ? hcim::cli::kOk : hcim::cli::kInvariant;
    }
    if (verify->parsed()) return hcim::cli::cmd_verify(build_config(verify_flags));
    if (estimate->parsed())
      return hcim::cli::cmd_estimate(build_config(estimate_flags), check_totals);
    if (sweep->parsed()) return hcim::cli::cmd_sweep(build_config(sweep_flags), sweep_axis);
  } catch (const hcim::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return hcim::cli::kConfigErr;
  } catch (const hcim::MismatchError& e) {
    std::fprintf(stderr, "verification mismatch: %s\n", e.what());
    return hcim::cli::kMismatch;
  } catch (const hcim::InvariantError& e) {
    std::fprintf(stderr, "invariant violation: %s\n", e.what());
    return hcim::cli::kInvariant;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return hcim::cli::kInvariant;
  }
  return hcim::cli::kOk;
}
