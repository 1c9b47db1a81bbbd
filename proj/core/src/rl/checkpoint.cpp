#include "inertid/rl/checkpoint.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "inertid/errors.hpp"

namespace inertid::rl {
namespace {

using nlohmann::json;

json to_json_vec(const Eigen::VectorXd& v) {
  return json(std::vector<double>(v.data(), v.data() + v.size()));
}

Eigen::VectorXd from_json_vec(const json& j, Eigen::Index expected, const char* what) {
  const auto v = j.get<std::vector<double>>();
  if (static_cast<Eigen::Index>(v.size()) != expected)
    throw ValidationError(std::string("checkpoint field '") + what + "' has the wrong length");
  return Eigen::Map<const Eigen::VectorXd>(v.data(), expected);
}

json hyper_to_json(const PpoHyperparams& hp) {
  return {{"n_steps", hp.n_steps},
          {"batch_size", hp.batch_size},
          {"learning_rate", hp.learning_rate},
          {"gamma", hp.gamma},
          {"gae_lambda", hp.gae_lambda},
          {"clip_range", hp.clip_range},
          {"ent_coef", hp.ent_coef},
          {"vf_coef", hp.vf_coef},
          {"max_grad_norm", hp.max_grad_norm},
          {"n_epochs", hp.n_epochs},
          {"hidden_units", hp.hidden_units},
          {"log_std_init", hp.log_std_init},
          {"adam_beta1", hp.adam_beta1},
          {"adam_beta2", hp.adam_beta2},
          {"adam_eps", hp.adam_eps},
          {"normalize_advantage", hp.normalize_advantage}};
}

PpoHyperparams hyper_from_json(const json& j) {
  PpoHyperparams hp;
  hp.n_steps = j.at("n_steps").get<int>();
  hp.batch_size = j.at("batch_size").get<int>();
  hp.learning_rate = j.at("learning_rate").get<double>();
  hp.gamma = j.at("gamma").get<double>();
  hp.gae_lambda = j.at("gae_lambda").get<double>();
  hp.clip_range = j.at("clip_range").get<double>();
  hp.ent_coef = j.at("ent_coef").get<double>();
  hp.vf_coef = j.at("vf_coef").get<double>();
  hp.max_grad_norm = j.at("max_grad_norm").get<double>();
  hp.n_epochs = j.at("n_epochs").get<int>();
  hp.hidden_units = j.at("hidden_units").get<int>();
  hp.log_std_init = j.at("log_std_init").get<double>();
  hp.adam_beta1 = j.at("adam_beta1").get<double>();
  hp.adam_beta2 = j.at("adam_beta2").get<double>();
  hp.adam_eps = j.at("adam_eps").get<double>();
  hp.normalize_advantage = j.at("normalize_advantage").get<bool>();
  return hp;
}

}  // namespace

std::string checkpoint_to_json(const Checkpoint& c) {
  const PolicyParams& p = c.params;
  json j;
  j["format"] = "inertid.policy";
  j["version"] = kCheckpointVersion;
  j["scenario"] = c.scenario;
  j["weights"] = {{"a0", c.weights.a0}, {"a1", c.weights.a1}, {"a2", c.weights.a2}, {"a3", c.weights.a3}};
  j["total_steps"] = c.total_steps;
  j["seed"] = c.seed;
  j["thrusters"] = c.thrusters;
  j["wheels"] = c.wheels;
  j["n_observations"] = p.n_observations;
  j["action_dim"] = p.action_dim;
  j["hyperparameters"] = hyper_to_json(p.hyper);
  j["theta"] = to_json_vec(p.theta);
  j["adam_m"] = to_json_vec(p.adam_m);
  j["adam_v"] = to_json_vec(p.adam_v);
  j["adam_step"] = p.adam_step;
  return j.dump(1) + "\n";
}

Checkpoint checkpoint_from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    if (j.at("format").get<std::string>() != "inertid.policy")
      throw ValidationError("not a policy checkpoint");
    if (j.at("version").get<int>() != kCheckpointVersion)
      throw ValidationError("unsupported checkpoint version");
    Checkpoint c;
    c.scenario = j.at("scenario").get<std::string>();
    const json& w = j.at("weights");
    c.weights = {w.at("a0").get<double>(), w.at("a1").get<double>(), w.at("a2").get<double>(),
                 w.at("a3").get<double>()};
    c.total_steps = j.at("total_steps").get<std::int64_t>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.thrusters = j.at("thrusters").get<int>();
    c.wheels = j.at("wheels").get<int>();
    c.params = PolicyParams(j.at("n_observations").get<int>(), j.at("action_dim").get<int>(),
                            hyper_from_json(j.at("hyperparameters")), 0);
    const Eigen::Index n = c.params.theta.size();
    c.params.theta = from_json_vec(j.at("theta"), n, "theta");
    c.params.adam_m = from_json_vec(j.at("adam_m"), n, "adam_m");
    c.params.adam_v = from_json_vec(j.at("adam_v"), n, "adam_v");
    c.params.adam_step = j.at("adam_step").get<std::int64_t>();
    return c;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed checkpoint: ") + e.what());
  }
}

void save_checkpoint(const std::string& path, const Checkpoint& c) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw NotFoundError("cannot write checkpoint: " + path);
  out << checkpoint_to_json(c);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NotFoundError("cannot open checkpoint: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return checkpoint_from_json(ss.str());
}

}  // namespace inertid::rl
