#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "inertid/harness/config.hpp"

namespace inertid::harness {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kInvalid = 2,
  kNumerical = 3,
  kMissingArtifact = 4,
};

struct CommonOptions {
  std::string config_path;  // empty selects the built-in falcon-stage scenario
  std::optional<std::uint64_t> seed;
  std::string out;
  int jobs = 1;
  bool smoke = false;
};

/// Sub-stream tags for derive_seed(master, {tag, ...}).
enum SeedTag : std::uint64_t {
  kSeedGenData = 1,
  kSeedFit = 2,
  kSeedTrainInit = 3,
  kSeedTrainLoop = 4,
  kSeedTrainClassifier = 5,
  kSeedEvaluation = 6,
  kSeedEvalDataset = 7,
  kSeedRobustness = 8,
  kSeedChance = 9,
};

/// Config after --config, --seed and --smoke have been applied.
ScenarioConfig resolve_config(const CommonOptions& options);

/// Writes the trajectory CSV to `out`.
void gen_data(const CommonOptions& options, std::ostream& log);

/// Fits the classifier on `dataset_path` and writes the model to `out`.
/// Returns the mapped F1.
double fit(const CommonOptions& options, const std::string& dataset_path, std::ostream& log);

/// Trains one weight scenario into the directory `out`: checkpoint.json,
/// training_log.csv, sequence.csv, evaluation.csv, utilization.csv and the
/// classifier model.json fitted on the extracted sequence.
void train(const CommonOptions& options, const std::string& scenario, std::ostream& log);

struct RobustnessRow {
  double multiplier = 0.0;
  double mean_accuracy = 0.0;
  double std_accuracy = 0.0;
  int runs = 0;
};

/// Accuracy of the fixed model on sequences replayed under scaled noise.
/// `noise_axis` overrides the config when non-empty. Writes CSV to `out`.
std::vector<RobustnessRow> robustness(const CommonOptions& options,
                                      const std::string& checkpoint_path,
                                      const std::string& model_path,
                                      const std::string& noise_axis, std::ostream& log);

/// Lists artifacts a scenario directory must hold for report.
std::vector<std::string> required_run_files();

/// Summarises every scenario directory of `run_dir` into `out`
/// (summary.csv, robustness.csv, summary.txt). Throws MissingArtifacts when
/// nothing usable is found or a scenario directory is incomplete.
std::string report(const CommonOptions& options, const std::string& run_dir, std::ostream& log);

struct MissingArtifacts : std::runtime_error {
  explicit MissingArtifacts(std::vector<std::string> missing);
  std::vector<std::string> files;
};

/// Maps an in-flight exception to the exit-code contract and prints a
/// diagnostic to `err`.
int exit_code_for_current_exception(std::ostream& err);

void write_sequence_csv(std::ostream& out, const std::vector<actuators::ActuationVector>& seq);
std::vector<actuators::ActuationVector> read_sequence_csv(std::istream& in);

}  // namespace inertid::harness
