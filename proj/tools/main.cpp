#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "inertid/harness/commands.hpp"

namespace h = inertid::harness;

namespace {

void add_common(CLI::App* cmd, h::CommonOptions& o, std::uint64_t& seed, const char* out_help) {
  cmd->add_option("--config", o.config_path, "Scenario config (JSON); default: built-in falcon-stage");
  cmd->add_option("--seed", seed, "Master seed, overrides the config");
  cmd->add_option("--out", o.out, out_help);
  cmd->add_option("--jobs", o.jobs, "Worker threads")->check(CLI::PositiveNumber);
  cmd->add_flag("--smoke", o.smoke, "Shrink every budget to CI scale");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Inertial-parameter identification by trajectory clustering"};
  app.require_subcommand(1);

  h::CommonOptions opts;
  std::uint64_t seed = 0;
  std::string dataset, scenario = "speed", checkpoint, model, axis, run_dir;

  auto* gen = app.add_subcommand("gen-data", "Simulate every configuration and write a trajectory CSV");
  add_common(gen, opts, seed, "Output CSV path");
  gen->get_option("--out")->required();

  auto* fit = app.add_subcommand("fit", "Fit the soft-DTW k-means classifier to a dataset");
  add_common(fit, opts, seed, "Output model path");
  fit->add_option("--dataset", dataset, "Trajectory CSV from gen-data")->required();
  fit->get_option("--out")->required();

  auto* train = app.add_subcommand("train", "Optimise an actuation sequence with PPO");
  add_common(train, opts, seed, "Output directory");
  train->add_option("--scenario", scenario, "Reward weights: speed, fuel or custom")
      ->check(CLI::IsMember({"speed", "fuel", "custom"}));
  train->get_option("--out")->required();

  auto* rob = app.add_subcommand("robustness", "Classification accuracy versus noise level");
  add_common(rob, opts, seed, "Output CSV path");
  rob->add_option("--checkpoint", checkpoint, "Policy checkpoint from train")->required();
  rob->add_option("--model", model, "Classifier model from train")->required();
  rob->add_option("--axis", axis, "Noise axis to sweep: sensor or actuation")
      ->check(CLI::IsMember({"sensor", "actuation"}));
  rob->get_option("--out")->required();

  auto* rep = app.add_subcommand("report", "Summarise a run directory");
  add_common(rep, opts, seed, "Output directory (default <run>/report)");
  rep->add_option("--run", run_dir, "Run directory holding one subdirectory per scenario")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : h::kInvalid;
  }
  for (auto* cmd : {gen, fit, train, rob, rep})
    if (cmd->count("--seed") > 0) opts.seed = seed;

  try {
    if (*gen) h::gen_data(opts, std::cout);
    else if (*fit) h::fit(opts, dataset, std::cout);
    else if (*train) h::train(opts, scenario, std::cout);
    else if (*rob) h::robustness(opts, checkpoint, model, axis, std::cout);
    else if (*rep) h::report(opts, run_dir, std::cout);
  } catch (...) {
    return h::exit_code_for_current_exception(std::cerr);
  }
  return h::kOk;
}
