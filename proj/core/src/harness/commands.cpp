#include "inertid/harness/commands.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <tuple>
#include <ostream>
#include <sstream>

#include "inertid/errors.hpp"
#include "inertid/rl/checkpoint.hpp"
#include "inertid/rl/train.hpp"
#include "inertid/seed.hpp"

namespace inertid::harness {
namespace fs = std::filesystem;

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::ofstream open_out(const std::string& path) {
  if (path.empty()) throw ValidationError("--out is required");
  const fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw NotFoundError("cannot write " + path);
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NotFoundError("cannot open " + path);
  return in;
}

std::uint64_t master_seed(const ScenarioConfig& c) { return c.seed; }

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> f;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) f.push_back(cell);
  if (!line.empty() && line.back() == ',') f.emplace_back();
  return f;
}

// Header plus rows of a small CSV file, keyed by column name.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name, const std::string& file) const {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw ValidationError(file + ": missing column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
  }
};

Table read_table(const fs::path& path) {
  std::ifstream in = open_in(path.string());
  Table t;
  std::string line;
  if (!std::getline(in, line)) throw ValidationError(path.string() + " is empty");
  t.header = split_csv(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto row = split_csv(line);
    if (row.size() != t.header.size())
      throw ValidationError(path.string() + ": row width does not match header");
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::vector<tsc::SeriesMatrix> to_series(const dynamics::TrajectorySet& set, std::size_t length) {
  std::vector<tsc::SeriesMatrix> out;
  out.reserve(set.trajectories.size());
  for (const auto& t : set.trajectories) out.push_back(tsc::series_from_trajectory(t, length));
  return out;
}

std::vector<std::string> truth_labels(const dynamics::TrajectorySet& set) {
  std::vector<std::string> out;
  for (const auto& t : set.trajectories) out.push_back(t.config_label);
  return out;
}

std::size_t sequence_length(const std::vector<actuators::ActuationVector>& seq,
                            const dynamics::SimConfig& sim) {
  return seq.size() * static_cast<std::size_t>(dynamics::steps_per_slot(sim));
}

}  // namespace

MissingArtifacts::MissingArtifacts(std::vector<std::string> missing)
    : std::runtime_error("missing artifacts"), files(std::move(missing)) {}

ScenarioConfig resolve_config(const CommonOptions& o) {
  if (o.jobs < 1) throw ValidationError("--jobs must be at least 1");
  ScenarioConfig c = o.config_path.empty() ? falcon_stage() : load_config(o.config_path);
  if (o.seed) c.seed = *o.seed;
  if (o.smoke) c = apply_smoke(std::move(c));
  validate(c);
  return c;
}

void write_sequence_csv(std::ostream& out, const std::vector<actuators::ActuationVector>& seq) {
  if (seq.empty()) {
    out << "slot\n";
    return;
  }
  out << "slot";
  for (std::size_t j = 0; j < seq.front().thruster_duty.size(); ++j) out << ",thruster_" << j;
  for (std::size_t w = 0; w < seq.front().wheel_voltage_fraction.size(); ++w) out << ",wheel_" << w;
  out << "\n";
  for (std::size_t s = 0; s < seq.size(); ++s) {
    out << s;
    for (double d : seq[s].thruster_duty) out << "," << fmt(d);
    for (double v : seq[s].wheel_voltage_fraction) out << "," << fmt(v);
    out << "\n";
  }
}

std::vector<actuators::ActuationVector> read_sequence_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("sequence CSV is empty");
  const auto header = split_csv(line);
  std::size_t thr = 0, whl = 0;
  for (const auto& h : header) {
    if (h.rfind("thruster_", 0) == 0) ++thr;
    else if (h.rfind("wheel_", 0) == 0) ++whl;
  }
  std::vector<actuators::ActuationVector> seq;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != 1 + thr + whl) throw ValidationError("sequence CSV row width mismatch");
    auto a = actuators::ActuationVector::null(thr, whl);
    try {
      for (std::size_t j = 0; j < thr; ++j) a.thruster_duty[j] = std::stod(f[1 + j]);
      for (std::size_t w = 0; w < whl; ++w) a.wheel_voltage_fraction[w] = std::stod(f[1 + thr + w]);
    } catch (const std::exception&) {
      throw ValidationError("sequence CSV has a malformed number");
    }
    actuators::validate(a, thr, whl);
    seq.push_back(std::move(a));
  }
  return seq;
}

void gen_data(const CommonOptions& o, std::ostream& log) {
  const ScenarioConfig c = resolve_config(o);
  const auto configs = build_configurations(c);
  const auto plant = build_plant(c);
  const auto seq = c.sequence.empty() ? default_sequence(c.thrusters.count(), c.wheels.size())
                                      : c.sequence;
  const auto set = dynamics::generate_dataset(configs, plant, seq, c.tsc.replicates, c.sim,
                                              derive_seed(master_seed(c), {kSeedGenData}), o.jobs);
  for (const auto& t : set.trajectories)
    if (t.terminated)
      log << "warning: " << t.config_label << " replicate " << t.replicate_index
          << " hit the rate limit\n";
  std::ofstream out = open_out(o.out);
  dynamics::write_csv(out, set);
  log << "wrote " << set.trajectories.size() << " trajectories (" << configs.size()
      << " configurations x " << c.tsc.replicates << " replicates, " << seq.size()
      << " slots) to " << o.out << "\n";
}

double fit(const CommonOptions& o, const std::string& dataset_path, std::ostream& log) {
  const ScenarioConfig c = resolve_config(o);
  std::ifstream in = open_in(dataset_path);
  dynamics::TrajectorySet set = dynamics::read_csv(in);
  std::sort(set.trajectories.begin(), set.trajectories.end(),
            [](const dynamics::Trajectory& a, const dynamics::Trajectory& b) {
              return std::tie(a.config_label, a.replicate_index) <
                     std::tie(b.config_label, b.replicate_index);
            });
  const auto opts = classifier_options(c, c.tsc.n_init, derive_seed(master_seed(c), {kSeedFit}), o.jobs);
  if (set.trajectories.size() < static_cast<std::size_t>(opts.k))
    throw ValidationError("k = " + std::to_string(opts.k) + " exceeds the dataset size " +
                          std::to_string(set.trajectories.size()));
  std::size_t length = 0;
  for (const auto& t : set.trajectories) length = std::max(length, t.samples.size());
  tsc::ClusterModel model = tsc::kmeans_fit(to_series(set, length), opts);
  tsc::map_labels(model, truth_labels(set));
  std::ofstream out = open_out(o.out);
  tsc::save_model(out, model);
  log << "series " << set.trajectories.size() << ", k " << model.k << ", inertia "
      << fmt(model.inertia) << ", mapped F1 " << fmt(model.mapped_f1) << "\n";
  for (int cl = 0; cl < model.k; ++cl)
    log << "  cluster " << cl << " -> "
        << (model.label_permutation[cl] < static_cast<int>(model.labels.size())
                ? model.labels[model.label_permutation[cl]]
                : std::string("(unused)"))
        << "\n";
  return model.mapped_f1;
}

void train(const CommonOptions& o, const std::string& scenario, std::ostream& log) {
  const ScenarioConfig c = resolve_config(o);
  const std::uint64_t seed = master_seed(c);
  if (o.out.empty()) throw ValidationError("--out is required");
  const fs::path dir(o.out);

  rl::EnvSpec spec = env_spec(c, scenario, derive_seed(seed, {kSeedTrainClassifier}), o.jobs);
  rl::validate(spec.weights);
  rl::IdentificationEnv env(spec);
  rl::PolicyParams params(spec.n_slots, spec.action_dim(), c.rl.ppo,
                          derive_seed(seed, {kSeedTrainInit}));
  rl::TrainOptions to;
  to.total_steps = c.rl.total_steps;
  to.seed = derive_seed(seed, {kSeedTrainLoop});
  to.on_update = [&log](const rl::UpdateRecord& r) {
    log << "update " << r.update << "  steps " << r.steps << "  episodes " << r.episodes
        << "  mean_reward_100 " << fmt(r.mean_reward_100) << "  f1 " << fmt(r.f1) << "\n";
  };
  const rl::TrainingLog tlog = rl::train(env, params, to);

  const std::size_t n_thr = c.thrusters.count();
  const std::size_t n_whl = c.wheels.size();
  const auto seq = rl::extract_sequence(params, spec.n_slots, n_thr, n_whl);
  env.set_classifier(classifier_options(c, c.tsc.n_init, derive_seed(seed, {kSeedTrainClassifier}), o.jobs));
  const rl::EpisodeRecord ev = rl::evaluate_sequence(env, seq, derive_seed(seed, {kSeedEvaluation}));
  const std::vector<actuators::ActuationVector> played(seq.begin(), seq.begin() + ev.steps);
  const rl::Utilization util = rl::sequence_utilization(played);
  const double chance = tsc::chance_f1(static_cast<int>(spec.configs.size()),
                                       spec.replicates_per_config, 1000,
                                       derive_seed(seed, {kSeedChance}));

  // Fixed classifier for later robustness runs, fitted at training noise.
  const auto data = dynamics::generate_dataset(spec.configs, spec.plant, seq, c.tsc.replicates,
                                               c.sim, derive_seed(seed, {kSeedEvalDataset}), o.jobs);
  tsc::ClusterModel model = tsc::kmeans_fit(
      to_series(data, sequence_length(seq, c.sim)),
      classifier_options(c, c.tsc.n_init, derive_seed(seed, {kSeedFit}), o.jobs));
  tsc::map_labels(model, truth_labels(data));

  fs::create_directories(dir);
  rl::Checkpoint ck;
  ck.params = params;
  ck.weights = spec.weights;
  ck.scenario = scenario;
  ck.total_steps = c.rl.total_steps;
  ck.seed = seed;
  ck.thrusters = static_cast<int>(n_thr);
  ck.wheels = static_cast<int>(n_whl);
  rl::save_checkpoint((dir / "checkpoint.json").string(), ck);
  {
    std::ofstream out = open_out((dir / "training_log.csv").string());
    rl::write_training_log_csv(out, tlog);
  }
  {
    std::ofstream out = open_out((dir / "episodes.csv").string());
    rl::write_episodes_csv(out, tlog);
  }
  {
    std::ofstream out = open_out((dir / "sequence.csv").string());
    write_sequence_csv(out, seq);
  }
  {
    std::ofstream out = open_out((dir / "model.json").string());
    tsc::save_model(out, model);
  }
  {
    std::ofstream out = open_out((dir / "evaluation.csv").string());
    out << "scenario,seed,steps,final_f1,c_gt,c_rw,reward,truncated,chance_f1,"
           "mean_thruster_util,mean_wheel_util,model_f1\n";
    out << scenario << "," << seed << "," << ev.steps << "," << fmt(ev.final_f1) << ","
        << fmt(ev.c_gt) << "," << fmt(ev.c_rw) << "," << fmt(ev.reward) << ","
        << (ev.truncated ? 1 : 0) << "," << fmt(chance) << "," << fmt(util.thruster_mean) << ","
        << fmt(util.wheel_mean) << "," << fmt(model.mapped_f1) << "\n";
  }
  {
    std::ofstream out = open_out((dir / "utilization.csv").string());
    out << "actuator,kind,time_avg_abs_command_per_eval_episode\n";
    for (std::size_t j = 0; j < util.thruster.size(); ++j)
      out << "thruster_" << j << ",duty," << fmt(util.thruster[j]) << "\n";
    for (std::size_t w = 0; w < util.wheel.size(); ++w)
      out << "wheel_" << w << ",voltage_fraction," << fmt(util.wheel[w]) << "\n";
  }

  log << "episodes " << tlog.episodes.size() << ", leading mean " << fmt(tlog.leading_mean())
      << ", trailing mean " << fmt(tlog.trailing_mean()) << "\n";
  log << "evaluation: steps " << ev.steps << ", final F1 " << fmt(ev.final_f1) << ", C_GT "
      << fmt(ev.c_gt) << ", C_RW " << fmt(ev.c_rw) << " (chance F1 " << fmt(chance) << ")\n";
  log << "actuator utilisation (time-averaged |command| over evaluation slots)\n";
  for (std::size_t j = 0; j < util.thruster.size(); ++j)
    log << "  thruster_" << j << "  " << fmt(util.thruster[j]) << "\n";
  for (std::size_t w = 0; w < util.wheel.size(); ++w)
    log << "  wheel_" << w << "     " << fmt(util.wheel[w]) << "\n";
}

std::vector<RobustnessRow> robustness(const CommonOptions& o, const std::string& checkpoint_path,
                                      const std::string& model_path, const std::string& noise_axis,
                                      std::ostream& log) {
  const ScenarioConfig c = resolve_config(o);
  const std::string axis = noise_axis.empty() ? c.robustness.noise_axis : noise_axis;
  if (axis != "sensor" && axis != "actuation")
    throw ValidationError("noise axis must be sensor or actuation");
  const rl::Checkpoint ck = rl::load_checkpoint(checkpoint_path);
  std::ifstream min = open_in(model_path);
  const tsc::ClusterModel model = tsc::load_model(min);
  if (!model.mapped()) throw ValidationError("model has no label mapping");
  if (ck.thrusters != static_cast<int>(c.thrusters.count()) ||
      ck.wheels != static_cast<int>(c.wheels.size()))
    throw ValidationError("checkpoint actuator counts do not match the config");

  const auto seq = rl::extract_sequence(ck.params, ck.params.n_observations,
                                        static_cast<std::size_t>(ck.thrusters),
                                        static_cast<std::size_t>(ck.wheels));
  const auto configs = build_configurations(c);
  const auto plant = build_plant(c);
  const std::size_t length = sequence_length(seq, c.sim);
  const std::uint64_t seed = master_seed(c);

  std::vector<RobustnessRow> rows;
  for (double m : c.robustness.multipliers) {
    dynamics::SimConfig sim = c.sim;
    if (axis == "sensor") sim.sensor_noise_std *= m;
    else sim.actuation_noise_std *= m;
    std::vector<double> acc;
    for (int r = 0; r < c.robustness.eval_runs; ++r) {
      // Same run seeds at every multiplier so the curve compares like with like.
      const auto set = dynamics::generate_dataset(configs, plant, seq, 1, sim,
                                                  derive_seed(seed, {kSeedRobustness, static_cast<std::uint64_t>(r)}),
                                                  o.jobs);
      int correct = 0;
      for (const auto& t : set.trajectories)
        correct += tsc::classify(model, tsc::series_from_trajectory(t, length)) == t.config_label;
      acc.push_back(static_cast<double>(correct) / static_cast<double>(set.trajectories.size()));
    }
    RobustnessRow row;
    row.multiplier = m;
    row.runs = static_cast<int>(acc.size());
    for (double a : acc) row.mean_accuracy += a;
    row.mean_accuracy /= row.runs;
    double ss = 0.0;
    for (double a : acc) ss += (a - row.mean_accuracy) * (a - row.mean_accuracy);
    row.std_accuracy = row.runs > 1 ? std::sqrt(ss / (row.runs - 1)) : 0.0;
    rows.push_back(row);
    log << axis << " x" << fmt(m) << "  accuracy " << fmt(row.mean_accuracy) << " +- "
        << fmt(row.std_accuracy) << "\n";
  }

  std::ofstream out = open_out(o.out);
  out << "noise_axis,multiplier,sensor_noise_std_rad_s,actuation_noise_std_fraction,runs,"
         "mean_accuracy,std_accuracy\n";
  for (const auto& r : rows) {
    const double sn = c.sim.sensor_noise_std * (axis == "sensor" ? r.multiplier : 1.0);
    const double an = c.sim.actuation_noise_std * (axis == "actuation" ? r.multiplier : 1.0);
    out << axis << "," << fmt(r.multiplier) << "," << fmt(sn) << "," << fmt(an) << "," << r.runs
        << "," << fmt(r.mean_accuracy) << "," << fmt(r.std_accuracy) << "\n";
  }
  return rows;
}

std::vector<std::string> required_run_files() {
  return {"training_log.csv", "evaluation.csv", "utilization.csv"};
}

std::string report(const CommonOptions& o, const std::string& run_dir, std::ostream& log) {
  const fs::path root(run_dir);
  if (!fs::is_directory(root)) throw MissingArtifacts({run_dir + "/"});
  const auto required = required_run_files();

  std::vector<fs::path> scenarios;
  std::vector<std::string> missing;
  std::vector<fs::path> children;
  for (const auto& e : fs::directory_iterator(root))
    if (e.is_directory()) children.push_back(e.path());
  std::sort(children.begin(), children.end());
  for (const auto& d : children) {
    bool any = fs::exists(d / "checkpoint.json");
    for (const auto& f : required) any = any || fs::exists(d / f);
    if (!any) continue;
    for (const auto& f : required)
      if (!fs::exists(d / f)) missing.push_back((d / f).string());
    scenarios.push_back(d);
  }
  if (scenarios.empty()) {
    for (const auto& f : required) missing.push_back((root / "<scenario>" / f).string());
  }
  if (!missing.empty()) throw MissingArtifacts(missing);

  std::ostringstream csv, rob, txt;
  csv << "scenario,updates,episodes,steps,final_mean_reward_100,eval_steps,final_f1,total_c_gt,"
         "total_c_rw,eval_reward,mean_thruster_util,mean_wheel_util\n";
  rob << "scenario,noise_axis,multiplier,mean_accuracy,std_accuracy,runs\n";
  char line[512];
  std::snprintf(line, sizeof line, "%-12s %8s %9s %12s %9s %12s %12s %10s %10s\n", "scenario",
                "updates", "episodes", "reward_100", "final_f1", "total_c_gt", "total_c_rw",
                "thr_util", "rw_util");
  txt << line;
  bool any_robustness = false;
  for (const auto& d : scenarios) {
    const std::string name = d.filename().string();
    const Table tl = read_table(d / "training_log.csv");
    const Table ev = read_table(d / "evaluation.csv");
    if (tl.rows.empty() || ev.rows.empty())
      throw ValidationError(name + ": training log or evaluation is empty");
    const auto& last = tl.rows.back();
    const auto& e = ev.rows.front();
    const std::string tlf = (d / "training_log.csv").string(), evf = (d / "evaluation.csv").string();
    auto tcol = [&](const char* k) { return last[tl.column(k, tlf)]; };
    auto ecol = [&](const char* k) { return e[ev.column(k, evf)]; };
    csv << name << "," << tcol("update") << "," << tcol("episode") << "," << tcol("steps") << ","
        << tcol("mean_reward_100") << "," << ecol("steps") << "," << ecol("final_f1") << ","
        << ecol("c_gt") << "," << ecol("c_rw") << "," << ecol("reward") << ","
        << ecol("mean_thruster_util") << "," << ecol("mean_wheel_util") << "\n";
    std::snprintf(line, sizeof line, "%-12s %8s %9s %12s %9s %12s %12s %10s %10s\n", name.c_str(),
                  tcol("update").c_str(), tcol("episode").c_str(), tcol("mean_reward_100").c_str(),
                  ecol("final_f1").c_str(), ecol("c_gt").c_str(), ecol("c_rw").c_str(),
                  ecol("mean_thruster_util").c_str(), ecol("mean_wheel_util").c_str());
    txt << line;

    std::vector<fs::path> rfiles;
    for (const auto& entry : fs::directory_iterator(d)) {
      const std::string fn = entry.path().filename().string();
      if (fn.rfind("robustness", 0) == 0 && entry.path().extension() == ".csv")
        rfiles.push_back(entry.path());
    }
    std::sort(rfiles.begin(), rfiles.end());
    for (const auto& rf : rfiles) {
      const Table rt = read_table(rf);
      const std::string rfs = rf.string();
      for (const auto& r : rt.rows) {
        rob << name << "," << r[rt.column("noise_axis", rfs)] << "," << r[rt.column("multiplier", rfs)]
            << "," << r[rt.column("mean_accuracy", rfs)] << "," << r[rt.column("std_accuracy", rfs)]
            << "," << r[rt.column("runs", rfs)] << "\n";
        any_robustness = true;
      }
    }
  }
  if (any_robustness) {
    txt << "\nrobustness (classification accuracy vs noise multiplier)\n";
    std::istringstream rs(rob.str());
    std::string l;
    std::getline(rs, l);
    std::snprintf(line, sizeof line, "%-12s %-10s %10s %10s %10s %5s\n", "scenario", "axis",
                  "multiplier", "mean", "std", "runs");
    txt << line;
    while (std::getline(rs, l)) {
      const auto f = split_csv(l);
      std::snprintf(line, sizeof line, "%-12s %-10s %10s %10s %10s %5s\n", f[0].c_str(),
                    f[1].c_str(), f[2].c_str(), f[3].c_str(), f[4].c_str(), f[5].c_str());
      txt << line;
    }
  }

  const fs::path out = o.out.empty() ? root / "report" : fs::path(o.out);
  fs::create_directories(out);
  {
    std::ofstream f = open_out((out / "summary.csv").string());
    f << csv.str();
  }
  {
    std::ofstream f = open_out((out / "robustness.csv").string());
    f << rob.str();
  }
  {
    std::ofstream f = open_out((out / "summary.txt").string());
    f << txt.str();
  }
  log << txt.str();
  return txt.str();
}

int exit_code_for_current_exception(std::ostream& err) {
  try {
    throw;
  } catch (const MissingArtifacts& e) {
    err << "error: missing artifacts:\n";
    for (const auto& f : e.files) err << "  " << f << "\n";
    return kInvalid;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kInvalid;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return kInvalid;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kNumerical;
  } catch (const OptimizationError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kNumerical;
  } catch (const NotFoundError& e) {
    err << "missing: " << e.what() << "\n";
    return kMissingArtifact;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kFailure;
  }
}

}  // namespace inertid::harness
