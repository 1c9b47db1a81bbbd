#include "inertid/harness/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "inertid/errors.hpp"

namespace inertid::harness {
namespace {

using nlohmann::json;

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) throw ValidationError(where + " must be an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : allowed) ok = ok || it.key() == k;
    if (!ok) throw ValidationError("unknown key '" + it.key() + "' in " + where);
  }
}

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

json vec_json(const Vec3& v) { return {v.x(), v.y(), v.z()}; }

Vec3 vec_from(const json& j) {
  const auto v = j.get<std::vector<double>>();
  if (v.size() != 3) throw ValidationError("expected a 3-vector");
  return {v[0], v[1], v[2]};
}

json mat_json(const Mat3& m) {
  json rows = json::array();
  for (int r = 0; r < 3; ++r) rows.push_back({m(r, 0), m(r, 1), m(r, 2)});
  return rows;
}

Mat3 mat_from(const json& j) {
  const auto rows = j.get<std::vector<std::vector<double>>>();
  if (rows.size() != 3) throw ValidationError("expected a 3x3 matrix");
  Mat3 m;
  for (int r = 0; r < 3; ++r) {
    if (rows[r].size() != 3) throw ValidationError("expected a 3x3 matrix");
    for (int c = 0; c < 3; ++c) m(r, c) = rows[r][c];
  }
  return m;
}

json body_json(const BodyConfig& b) {
  json j = {{"label", b.label}, {"mass_kg", b.mass_kg}, {"position_m", vec_json(b.position_m)}};
  if (b.box_m) j["box_m"] = vec_json(*b.box_m);
  if (b.inertia_kg_m2) j["inertia_kg_m2"] = mat_json(*b.inertia_kg_m2);
  if (!b.orientation.isIdentity(0.0)) j["orientation"] = mat_json(b.orientation);
  return j;
}

BodyConfig body_from(const json& j) {
  check_keys(j, {"label", "mass_kg", "position_m", "box_m", "inertia_kg_m2", "orientation"}, "body");
  BodyConfig b;
  b.label = j.at("label").get<std::string>();
  b.mass_kg = j.at("mass_kg").get<double>();
  if (j.contains("position_m")) b.position_m = vec_from(j.at("position_m"));
  if (j.contains("box_m")) b.box_m = vec_from(j.at("box_m"));
  if (j.contains("inertia_kg_m2")) b.inertia_kg_m2 = mat_from(j.at("inertia_kg_m2"));
  if (j.contains("orientation")) b.orientation = mat_from(j.at("orientation"));
  return b;
}

json ppo_json(const rl::PpoHyperparams& hp) {
  return {{"n_steps", hp.n_steps},         {"batch_size", hp.batch_size},
          {"learning_rate", hp.learning_rate}, {"gamma", hp.gamma},
          {"gae_lambda", hp.gae_lambda},   {"clip_range", hp.clip_range},
          {"ent_coef", hp.ent_coef},       {"vf_coef", hp.vf_coef},
          {"max_grad_norm", hp.max_grad_norm}, {"n_epochs", hp.n_epochs},
          {"hidden_units", hp.hidden_units}, {"log_std_init", hp.log_std_init},
          {"adam_beta1", hp.adam_beta1},   {"adam_beta2", hp.adam_beta2},
          {"adam_eps", hp.adam_eps},       {"normalize_advantage", hp.normalize_advantage}};
}

rl::PpoHyperparams ppo_from(const json& j) {
  check_keys(j, {"n_steps", "batch_size", "learning_rate", "gamma", "gae_lambda", "clip_range",
                 "ent_coef", "vf_coef", "max_grad_norm", "n_epochs", "hidden_units",
                 "log_std_init", "adam_beta1", "adam_beta2", "adam_eps", "normalize_advantage"},
             "rl.ppo");
  rl::PpoHyperparams hp;
  read(j, "n_steps", hp.n_steps);
  read(j, "batch_size", hp.batch_size);
  read(j, "learning_rate", hp.learning_rate);
  read(j, "gamma", hp.gamma);
  read(j, "gae_lambda", hp.gae_lambda);
  read(j, "clip_range", hp.clip_range);
  read(j, "ent_coef", hp.ent_coef);
  read(j, "vf_coef", hp.vf_coef);
  read(j, "max_grad_norm", hp.max_grad_norm);
  read(j, "n_epochs", hp.n_epochs);
  read(j, "hidden_units", hp.hidden_units);
  read(j, "log_std_init", hp.log_std_init);
  read(j, "adam_beta1", hp.adam_beta1);
  read(j, "adam_beta2", hp.adam_beta2);
  read(j, "adam_eps", hp.adam_eps);
  read(j, "normalize_advantage", hp.normalize_advantage);
  return hp;
}

json wheel_json(const actuators::ReactionWheelModule& w) {
  return {{"axis", vec_json(w.axis)},
          {"rotor_inertia_kg_m2", w.rotor_inertia},
          {"friction_n_m_s", w.friction},
          {"motor_constant_n_m_per_a", w.motor_constant},
          {"resistance_ohm", w.resistance},
          {"inductance_h", w.inductance},
          {"supply_voltage_v", w.supply_voltage}};
}

actuators::ReactionWheelModule wheel_from(const json& j) {
  check_keys(j, {"axis", "rotor_inertia_kg_m2", "friction_n_m_s", "motor_constant_n_m_per_a",
                 "resistance_ohm", "inductance_h", "supply_voltage_v"},
             "wheel");
  actuators::ReactionWheelModule w;
  if (j.contains("axis")) w.axis = vec_from(j.at("axis"));
  read(j, "rotor_inertia_kg_m2", w.rotor_inertia);
  read(j, "friction_n_m_s", w.friction);
  read(j, "motor_constant_n_m_per_a", w.motor_constant);
  read(j, "resistance_ohm", w.resistance);
  read(j, "inductance_h", w.inductance);
  read(j, "supply_voltage_v", w.supply_voltage);
  return w;
}

json action_json(const actuators::ActuationVector& a) {
  return {{"thruster_duty", a.thruster_duty}, {"wheel_voltage_fraction", a.wheel_voltage_fraction}};
}

actuators::ActuationVector action_from(const json& j) {
  check_keys(j, {"thruster_duty", "wheel_voltage_fraction"}, "sequence entry");
  actuators::ActuationVector a;
  a.thruster_duty = j.at("thruster_duty").get<std::vector<double>>();
  a.wheel_voltage_fraction = j.at("wheel_voltage_fraction").get<std::vector<double>>();
  return a;
}

ScenarioConfig from_json(const json& j) {
  check_keys(j, {"name", "seed", "bodies", "configurations", "thrusters", "wheels", "sim", "tsc",
                 "rl", "sequence", "robustness", "smoke"},
             "config");
  ScenarioConfig c;
  read(j, "name", c.name);
  read(j, "seed", c.seed);
  for (const auto& b : j.at("bodies")) c.bodies.push_back(body_from(b));
  for (const auto& cj : j.at("configurations")) {
    check_keys(cj, {"label", "bodies"}, "configuration");
    c.configurations.push_back(
        {cj.at("label").get<std::string>(), cj.at("bodies").get<std::vector<std::string>>()});
  }
  if (j.contains("thrusters")) {
    const json& t = j.at("thrusters");
    check_keys(t, {"torque_columns_n_m", "pwm_period_s", "filter_time_constant_s"}, "thrusters");
    if (t.contains("torque_columns_n_m")) {
      const auto cols = t.at("torque_columns_n_m").get<std::vector<std::vector<double>>>();
      c.thrusters.torque_matrix.resize(3, static_cast<Eigen::Index>(cols.size()));
      for (std::size_t k = 0; k < cols.size(); ++k) {
        if (cols[k].size() != 3) throw ValidationError("thruster torque columns must be 3-vectors");
        for (int r = 0; r < 3; ++r) c.thrusters.torque_matrix(r, static_cast<Eigen::Index>(k)) = cols[k][r];
      }
    }
    read(t, "pwm_period_s", c.thrusters.pwm_period);
    read(t, "filter_time_constant_s", c.thrusters.filter_time_constant);
  }
  if (j.contains("wheels")) {
    c.wheels.clear();
    for (const auto& w : j.at("wheels")) c.wheels.push_back(wheel_from(w));
  }
  if (j.contains("sim")) {
    const json& s = j.at("sim");
    check_keys(s, {"dt_s", "slot_duration_s", "sensor_noise_std_rad_s", "actuation_noise_std_fraction",
                   "disturbance_torque_std_n_m", "omega_limit_rad_s"},
               "sim");
    read(s, "dt_s", c.sim.dt);
    read(s, "slot_duration_s", c.sim.slot_duration);
    read(s, "sensor_noise_std_rad_s", c.sim.sensor_noise_std);
    read(s, "actuation_noise_std_fraction", c.sim.actuation_noise_std);
    read(s, "disturbance_torque_std_n_m", c.sim.disturbance_torque_std);
    read(s, "omega_limit_rad_s", c.sim.omega_limit);
  }
  if (j.contains("tsc")) {
    const json& t = j.at("tsc");
    check_keys(t, {"gamma", "n_init", "n_init_training", "max_iter", "tol", "barycenter_max_iter",
                   "downsample_samples", "replicates"},
               "tsc");
    read(t, "gamma", c.tsc.gamma);
    read(t, "n_init", c.tsc.n_init);
    read(t, "n_init_training", c.tsc.n_init_training);
    read(t, "max_iter", c.tsc.max_iter);
    read(t, "tol", c.tsc.tol);
    read(t, "barycenter_max_iter", c.tsc.barycenter_max_iter);
    read(t, "downsample_samples", c.tsc.downsample);
    read(t, "replicates", c.tsc.replicates);
  }
  if (j.contains("rl")) {
    const json& r = j.at("rl");
    check_keys(r, {"scenario", "weights", "n_slots", "replicates_per_config", "total_steps", "ppo"}, "rl");
    read(r, "scenario", c.rl.scenario);
    if (r.contains("weights")) {
      const json& w = r.at("weights");
      check_keys(w, {"a0", "a1", "a2", "a3"}, "rl.weights");
      read(w, "a0", c.rl.custom_weights.a0);
      read(w, "a1", c.rl.custom_weights.a1);
      read(w, "a2", c.rl.custom_weights.a2);
      read(w, "a3", c.rl.custom_weights.a3);
    }
    read(r, "n_slots", c.rl.n_slots);
    read(r, "replicates_per_config", c.rl.replicates_per_config);
    read(r, "total_steps", c.rl.total_steps);
    if (r.contains("ppo")) c.rl.ppo = ppo_from(r.at("ppo"));
  }
  if (j.contains("sequence"))
    for (const auto& a : j.at("sequence")) c.sequence.push_back(action_from(a));
  if (j.contains("robustness")) {
    const json& r = j.at("robustness");
    check_keys(r, {"noise_axis", "multipliers", "eval_runs"}, "robustness");
    read(r, "noise_axis", c.robustness.noise_axis);
    read(r, "multipliers", c.robustness.multipliers);
    read(r, "eval_runs", c.robustness.eval_runs);
  }
  if (j.contains("smoke")) {
    const json& s = j.at("smoke");
    check_keys(s, {"n_slots", "replicates_per_config", "n_steps", "updates", "dataset_replicates",
                   "robustness_multipliers", "robustness_eval_runs"},
               "smoke");
    read(s, "n_slots", c.smoke.n_slots);
    read(s, "replicates_per_config", c.smoke.replicates_per_config);
    read(s, "n_steps", c.smoke.n_steps);
    read(s, "updates", c.smoke.updates);
    read(s, "dataset_replicates", c.smoke.dataset_replicates);
    read(s, "robustness_multipliers", c.smoke.robustness_multipliers);
    read(s, "robustness_eval_runs", c.smoke.robustness_eval_runs);
  }
  return c;
}

json to_json(const ScenarioConfig& c) {
  json j;
  j["name"] = c.name;
  j["seed"] = c.seed;
  j["bodies"] = json::array();
  for (const auto& b : c.bodies) j["bodies"].push_back(body_json(b));
  j["configurations"] = json::array();
  for (const auto& cf : c.configurations)
    j["configurations"].push_back({{"label", cf.label}, {"bodies", cf.bodies}});
  json cols = json::array();
  for (Eigen::Index k = 0; k < c.thrusters.torque_matrix.cols(); ++k)
    cols.push_back(vec_json(c.thrusters.torque_matrix.col(k)));
  j["thrusters"] = {{"torque_columns_n_m", cols},
                    {"pwm_period_s", c.thrusters.pwm_period},
                    {"filter_time_constant_s", c.thrusters.filter_time_constant}};
  j["wheels"] = json::array();
  for (const auto& w : c.wheels) j["wheels"].push_back(wheel_json(w));
  j["sim"] = {{"dt_s", c.sim.dt},
              {"slot_duration_s", c.sim.slot_duration},
              {"sensor_noise_std_rad_s", c.sim.sensor_noise_std},
              {"actuation_noise_std_fraction", c.sim.actuation_noise_std},
              {"disturbance_torque_std_n_m", c.sim.disturbance_torque_std},
              {"omega_limit_rad_s", c.sim.omega_limit}};
  j["tsc"] = {{"gamma", c.tsc.gamma},
              {"n_init", c.tsc.n_init},
              {"n_init_training", c.tsc.n_init_training},
              {"max_iter", c.tsc.max_iter},
              {"tol", c.tsc.tol},
              {"barycenter_max_iter", c.tsc.barycenter_max_iter},
              {"downsample_samples", c.tsc.downsample},
              {"replicates", c.tsc.replicates}};
  const auto& w = c.rl.custom_weights;
  j["rl"] = {{"scenario", c.rl.scenario},
             {"weights", {{"a0", w.a0}, {"a1", w.a1}, {"a2", w.a2}, {"a3", w.a3}}},
             {"n_slots", c.rl.n_slots},
             {"replicates_per_config", c.rl.replicates_per_config},
             {"total_steps", c.rl.total_steps},
             {"ppo", ppo_json(c.rl.ppo)}};
  j["sequence"] = json::array();
  for (const auto& a : c.sequence) j["sequence"].push_back(action_json(a));
  j["robustness"] = {{"noise_axis", c.robustness.noise_axis},
                     {"multipliers", c.robustness.multipliers},
                     {"eval_runs", c.robustness.eval_runs}};
  j["smoke"] = {{"n_slots", c.smoke.n_slots},
                {"replicates_per_config", c.smoke.replicates_per_config},
                {"n_steps", c.smoke.n_steps},
                {"updates", c.smoke.updates},
                {"dataset_replicates", c.smoke.dataset_replicates},
                {"robustness_multipliers", c.smoke.robustness_multipliers},
                {"robustness_eval_runs", c.smoke.robustness_eval_runs}};
  return j;
}

}  // namespace

inertia::BodySpec BodyConfig::spec() const {
  inertia::BodySpec b;
  b.label = label;
  b.mass = mass_kg;
  b.position = position_m;
  b.orientation = orientation;
  if (inertia_kg_m2) b.inertia_cm = *inertia_kg_m2;
  else if (box_m) b.inertia_cm = inertia::box_inertia(mass_kg, *box_m);
  return b;
}

bool BodyConfig::operator==(const BodyConfig& o) const {
  return label == o.label && mass_kg == o.mass_kg && position_m == o.position_m &&
         box_m == o.box_m && inertia_kg_m2 == o.inertia_kg_m2 && orientation == o.orientation;
}

bool ScenarioConfig::operator==(const ScenarioConfig& o) const {
  const auto& ta = thrusters.torque_matrix;
  const auto& tb = o.thrusters.torque_matrix;
  const bool same_thrusters = ta.cols() == tb.cols() && ta == tb &&
                              thrusters.pwm_period == o.thrusters.pwm_period &&
                              thrusters.filter_time_constant == o.thrusters.filter_time_constant;
  return name == o.name && bodies == o.bodies && configurations == o.configurations &&
         same_thrusters && wheels == o.wheels && sim == o.sim && tsc == o.tsc && rl == o.rl &&
         sequence == o.sequence && robustness == o.robustness && smoke == o.smoke &&
         seed == o.seed;
}

void validate(const ScenarioConfig& c) {
  std::set<std::string> labels;
  for (const auto& b : c.bodies) {
    if (b.label.empty()) throw ValidationError("body label must not be empty");
    if (!labels.insert(b.label).second) throw ValidationError("duplicate body label '" + b.label + "'");
    if (b.box_m.has_value() == b.inertia_kg_m2.has_value())
      throw ValidationError("body '" + b.label + "' needs exactly one of box_m or inertia_kg_m2");
    if (b.box_m && !(b.box_m->minCoeff() > 0.0))
      throw ValidationError("body '" + b.label + "' box dimensions must be positive");
    inertia::validate(b.spec());
  }
  if (c.configurations.size() < 2)
    throw ValidationError("at least two candidate configurations are required");
  std::set<std::string> config_labels;
  for (const auto& cf : c.configurations) {
    if (!config_labels.insert(cf.label).second)
      throw ValidationError("duplicate configuration label '" + cf.label + "'");
    if (cf.bodies.empty()) throw ValidationError("configuration '" + cf.label + "' is empty");
    std::set<std::string> seen;
    for (const auto& l : cf.bodies) {
      if (!labels.count(l))
        throw ValidationError("configuration '" + cf.label + "' references unknown body '" + l + "'");
      if (!seen.insert(l).second)
        throw ValidationError("configuration '" + cf.label + "' lists '" + l + "' twice");
    }
  }
  actuators::validate(c.thrusters);
  for (const auto& w : c.wheels) actuators::validate(w);
  dynamics::validate(c.sim);
  if (!(c.tsc.gamma > 0.0)) throw ValidationError("tsc.gamma must be positive");
  if (c.tsc.n_init < 1 || c.tsc.n_init_training < 1 || c.tsc.max_iter < 1 ||
      c.tsc.barycenter_max_iter < 1 || c.tsc.downsample < 1 || c.tsc.replicates < 1)
    throw ValidationError("tsc counts must be positive");
  if (!(c.tsc.tol >= 0.0)) throw ValidationError("tsc.tol must be non-negative");
  if (c.rl.scenario != "speed" && c.rl.scenario != "fuel" && c.rl.scenario != "custom")
    throw ValidationError("rl.scenario must be speed, fuel or custom");
  rl::validate(c.rl.custom_weights);
  rl::validate(c.rl.ppo);
  if (c.rl.n_slots < 1 || c.rl.replicates_per_config < 1)
    throw ValidationError("rl.n_slots and rl.replicates_per_config must be positive");
  if (c.rl.total_steps < c.rl.ppo.n_steps)
    throw ValidationError("rl.total_steps must cover at least one rollout");
  for (const auto& a : c.sequence) actuators::validate(a, c.thrusters.count(), c.wheels.size());
  if (c.robustness.noise_axis != "sensor" && c.robustness.noise_axis != "actuation")
    throw ValidationError("robustness.noise_axis must be sensor or actuation");
  auto check_multipliers = [](const std::vector<double>& m, const char* what) {
    if (m.empty()) throw ValidationError(std::string(what) + " must not be empty");
    for (double x : m)
      if (!(x >= 0.0)) throw ValidationError(std::string(what) + " must be non-negative");
    if (!std::is_sorted(m.begin(), m.end()))
      throw ValidationError(std::string(what) + " must be sorted ascending");
  };
  check_multipliers(c.robustness.multipliers, "robustness.multipliers");
  if (c.robustness.eval_runs < 10) throw ValidationError("robustness.eval_runs must be at least 10");
  check_multipliers(c.smoke.robustness_multipliers, "smoke.robustness_multipliers");
  if (c.smoke.robustness_eval_runs < 10)
    throw ValidationError("smoke.robustness_eval_runs must be at least 10");
  if (c.smoke.n_slots < 1 || c.smoke.replicates_per_config < 1 || c.smoke.n_steps < 1 ||
      c.smoke.updates < 1 || c.smoke.dataset_replicates < 1)
    throw ValidationError("smoke budgets must be positive");
  for (const auto& lc : build_configurations(c))
    if (!lc.params.invertible)
      throw ValidationError("configuration '" + lc.label + "' has a singular inertia tensor");
}

ScenarioConfig parse_config(const std::string& text) {
  try {
    return from_json(json::parse(text));
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed config: ") + e.what());
  }
}

std::string serialize_config(const ScenarioConfig& config) { return to_json(config).dump(2) + "\n"; }

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NotFoundError("cannot open config: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  ScenarioConfig c = parse_config(ss.str());
  validate(c);
  return c;
}

ScenarioConfig falcon_stage() {
  ScenarioConfig c;
  c.name = "falcon-stage";
  c.seed = 20240601;
  BodyConfig carrier{"carrier", 10000.0, Vec3::Zero(), Vec3(3.7, 3.7, 6.0), std::nullopt,
                     Mat3::Identity()};
  BodyConfig p1{"p1", 200.0, Vec3(2.5, 0.0, 3.0), Vec3(1.0, 1.0, 1.0), std::nullopt,
                Mat3::Identity()};
  BodyConfig p2{"p2", 200.0, Vec3(-2.5, 0.0, 3.0), Vec3(1.0, 1.0, 1.0), std::nullopt,
                Mat3::Identity()};
  c.bodies = {carrier, p1, p2};
  c.configurations = {{"full", {"carrier", "p1", "p2"}},
                      {"after-p1", {"carrier", "p2"}},
                      {"empty", {"carrier"}}};
  return c;
}

std::vector<dynamics::LabelledConfig> build_configurations(const ScenarioConfig& config) {
  std::vector<dynamics::LabelledConfig> out;
  for (const auto& cf : config.configurations) {
    std::vector<inertia::BodySpec> specs;
    for (const auto& l : cf.bodies) {
      auto it = std::find_if(config.bodies.begin(), config.bodies.end(),
                             [&](const BodyConfig& b) { return b.label == l; });
      if (it == config.bodies.end())
        throw ValidationError("configuration '" + cf.label + "' references unknown body '" + l + "'");
      specs.push_back(it->spec());
    }
    out.push_back({cf.label, inertia::compose(specs)});
  }
  return out;
}

dynamics::Plant build_plant(const ScenarioConfig& config) {
  dynamics::Plant p;
  p.thrusters = config.thrusters;
  p.wheels = config.wheels;
  return p;
}

std::vector<actuators::ActuationVector> default_sequence(std::size_t thrusters, std::size_t wheels) {
  std::vector<actuators::ActuationVector> seq;
  for (std::size_t j = 0; j < thrusters; ++j) {
    auto a = actuators::ActuationVector::null(thrusters, wheels);
    a.thruster_duty[j] = 1.0;
    seq.push_back(a);
  }
  for (double sign : {1.0, -1.0})
    for (std::size_t w = 0; w < wheels; ++w) {
      auto a = actuators::ActuationVector::null(thrusters, wheels);
      a.wheel_voltage_fraction[w] = sign;
      seq.push_back(a);
    }
  return seq;
}

rl::RewardWeights scenario_weights(const ScenarioConfig& config, const std::string& scenario) {
  if (scenario == "speed") return rl::RewardWeights::speed();
  if (scenario == "fuel") return rl::RewardWeights::fuel();
  if (scenario == "custom") return config.rl.custom_weights;
  throw ValidationError("unknown scenario '" + scenario + "'");
}

tsc::KMeansOptions classifier_options(const ScenarioConfig& config, int n_init, std::uint64_t seed,
                                      int jobs) {
  tsc::KMeansOptions o;
  o.k = static_cast<int>(config.configurations.size());
  o.gamma = config.tsc.gamma;
  o.n_init = n_init;
  o.max_iter = config.tsc.max_iter;
  o.tol = config.tsc.tol;
  o.barycenter_max_iter = config.tsc.barycenter_max_iter;
  o.downsample = config.tsc.downsample;
  o.seed = seed;
  o.jobs = jobs;
  return o;
}

rl::EnvSpec env_spec(const ScenarioConfig& config, const std::string& scenario,
                     std::uint64_t classifier_seed, int jobs) {
  rl::EnvSpec spec;
  spec.n_slots = config.rl.n_slots;
  spec.plant = build_plant(config);
  spec.configs = build_configurations(config);
  spec.replicates_per_config = config.rl.replicates_per_config;
  spec.weights = scenario_weights(config, scenario);
  spec.sim = config.sim;
  spec.classifier = classifier_options(config, config.tsc.n_init_training, classifier_seed, jobs);
  spec.jobs = jobs;
  rl::validate(spec);
  return spec;
}

ScenarioConfig apply_smoke(ScenarioConfig c) {
  c.rl.n_slots = c.smoke.n_slots;
  c.rl.replicates_per_config = c.smoke.replicates_per_config;
  c.rl.ppo.n_steps = c.smoke.n_steps;
  c.rl.total_steps = static_cast<std::int64_t>(c.smoke.n_steps) * c.smoke.updates;
  c.tsc.replicates = c.smoke.dataset_replicates;
  c.robustness.multipliers = c.smoke.robustness_multipliers;
  c.robustness.eval_runs = c.smoke.robustness_eval_runs;
  return c;
}

}  // namespace inertid::harness
