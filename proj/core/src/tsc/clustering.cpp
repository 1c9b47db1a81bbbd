#include "inertid/tsc/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>

#include <nlohmann/json.hpp>

#include "inertid/errors.hpp"
#include "inertid/parallel.hpp"
#include "inertid/seed.hpp"

namespace inertid::tsc {
namespace {

constexpr int kModelVersion = 1;

// Zero-order-hold pad or truncate to `length` rows.
SeriesMatrix fit_length(const SeriesMatrix& s, Eigen::Index length) {
  if (s.rows() == length) return s;
  SeriesMatrix out(length, s.cols());
  for (Eigen::Index i = 0; i < length; ++i) out.row(i) = s.row(std::min(i, s.rows() - 1));
  return out;
}

Normalization fit_normalization(const std::vector<SeriesMatrix>& data) {
  const Eigen::Index d = data.front().cols();
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(d), sq = Eigen::VectorXd::Zero(d);
  double count = 0.0;
  for (const auto& s : data) {
    sum += s.colwise().sum().transpose();
    count += static_cast<double>(s.rows());
  }
  Normalization n;
  n.mean = sum / count;
  for (const auto& s : data)
    sq += (s.rowwise() - n.mean.transpose()).colwise().squaredNorm().transpose();
  // One scale for every channel: the channels share units, and scaling them
  // separately would blow a noise-only axis up to the weight of a driven one.
  double scale = std::sqrt(sq.sum() / (count * static_cast<double>(d)));
  if (!(scale > 1e-300)) scale = 1.0;
  n.scale = Eigen::VectorXd::Constant(d, scale);
  return n;
}

struct Restart {
  std::vector<SeriesMatrix> barycenters;
  std::vector<int> assignment;
  double inertia = std::numeric_limits<double>::infinity();
  std::vector<double> history;
};

Restart run_restart(const std::vector<SeriesMatrix>& data, Eigen::Index length,
                    const KMeansOptions& opt, std::uint64_t seed) {
  const std::size_t n = data.size();
  const std::size_t k = static_cast<std::size_t>(opt.k);
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t i = 0; i < k; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, n - 1);
    std::swap(order[i], order[pick(rng)]);
  }
  Restart r;
  for (std::size_t c = 0; c < k; ++c) r.barycenters.push_back(fit_length(data[order[c]], length));

  const BarycenterOptions bopt{opt.gamma, opt.barycenter_max_iter, opt.tol};
  std::vector<int> previous;
  Eigen::MatrixXd dist(n, k);
  for (int it = 0;; ++it) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t c = 0; c < k; ++c)
        dist(i, c) = soft_dtw(data[i], r.barycenters[c], opt.gamma);
    r.assignment.assign(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
      Eigen::Index best = 0;
      dist.row(i).minCoeff(&best);
      r.assignment[i] = static_cast<int>(best);
    }
    // Re-seed emptied clusters from the member farthest from its barycenter.
    std::vector<int> sizes(k, 0);
    for (int a : r.assignment) ++sizes[a];
    for (std::size_t c = 0; c < k; ++c) {
      if (sizes[c] > 0) continue;
      std::size_t far = n;
      double far_d = -std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < n; ++i) {
        if (sizes[r.assignment[i]] <= 1) continue;
        const double di = dist(i, r.assignment[i]);
        if (di > far_d) {
          far_d = di;
          far = i;
        }
      }
      if (far == n) break;
      --sizes[r.assignment[far]];
      ++sizes[c];
      r.assignment[far] = static_cast<int>(c);
      r.barycenters[c] = fit_length(data[far], length);
      for (std::size_t i = 0; i < n; ++i) dist(i, c) = soft_dtw(data[i], r.barycenters[c], opt.gamma);
    }
    double inertia = 0.0;
    for (std::size_t i = 0; i < n; ++i) inertia += dist(i, r.assignment[i]);
    const double last = r.history.empty() ? std::numeric_limits<double>::infinity()
                                          : r.history.back();
    r.history.push_back(inertia);
    r.inertia = inertia;

    const bool stable = r.assignment == previous;
    const bool small = std::isfinite(last) &&
                       last - inertia <= opt.tol * std::max(1.0, std::abs(last));
    if (stable || small || it >= opt.max_iter) break;
    previous = r.assignment;

    for (std::size_t c = 0; c < k; ++c) {
      std::vector<SeriesMatrix> members;
      for (std::size_t i = 0; i < n; ++i)
        if (r.assignment[i] == static_cast<int>(c)) members.push_back(data[i]);
      if (members.empty()) continue;
      r.barycenters[c] = soft_dtw_barycenter(members, r.barycenters[c], bopt).barycenter;
    }
  }
  return r;
}

SeriesMatrix preprocess(const ClusterModel& model, const SeriesMatrix& s) {
  validate_series(s);
  if (s.cols() != model.normalization.mean.size())
    throw ValidationError("series channel count does not match the model");
  return model.normalization.apply(downsample(s, model.downsample));
}

}  // namespace

SeriesMatrix Normalization::apply(const SeriesMatrix& s) const {
  SeriesMatrix out = s.rowwise() - mean.transpose();
  return out.array().rowwise() / scale.transpose().array();
}

SeriesMatrix downsample(const SeriesMatrix& s, int factor) {
  if (factor < 1) throw ValidationError("downsample factor must be at least 1");
  if (factor == 1) return s;
  const Eigen::Index blocks = (s.rows() + factor - 1) / factor;
  SeriesMatrix out(blocks, s.cols());
  for (Eigen::Index b = 0; b < blocks; ++b) {
    const Eigen::Index start = b * factor;
    const Eigen::Index len = std::min<Eigen::Index>(factor, s.rows() - start);
    out.row(b) = s.middleRows(start, len).colwise().mean();
  }
  return out;
}

SeriesMatrix series_from_trajectory(const dynamics::Trajectory& t, std::size_t length) {
  if (t.samples.empty()) throw ValidationError("trajectory has no samples");
  const std::size_t rows = length == 0 ? t.samples.size() : length;
  SeriesMatrix s(static_cast<Eigen::Index>(rows), 3);
  for (std::size_t i = 0; i < rows; ++i) {
    const auto& sample = t.samples[std::min(i, t.samples.size() - 1)];
    s.row(static_cast<Eigen::Index>(i)) = sample.omega.transpose();
  }
  return s;
}

ClusterModel kmeans_fit(const std::vector<SeriesMatrix>& dataset,
                        const KMeansOptions& opt) {
  if (opt.k < 2) throw ValidationError("k must be at least 2");
  if (dataset.size() < static_cast<std::size_t>(opt.k))
    throw ValidationError("dataset has fewer series than clusters");
  if (opt.n_init < 1 || opt.max_iter < 0)
    throw ValidationError("n_init must be positive and max_iter non-negative");
  for (const auto& s : dataset) {
    validate_series(s);
    if (s.cols() != dataset.front().cols())
      throw ValidationError("series have different channel counts");
  }

  std::vector<SeriesMatrix> reduced;
  reduced.reserve(dataset.size());
  for (const auto& s : dataset) reduced.push_back(downsample(s, opt.downsample));

  ClusterModel model;
  model.k = opt.k;
  model.gamma = opt.gamma;
  model.downsample = opt.downsample;
  model.normalization = fit_normalization(reduced);
  for (auto& s : reduced) s = model.normalization.apply(s);

  std::vector<Eigen::Index> lengths;
  for (const auto& s : reduced) lengths.push_back(s.rows());
  std::nth_element(lengths.begin(), lengths.begin() + static_cast<std::ptrdiff_t>(lengths.size() / 2),
                   lengths.end());
  const Eigen::Index length = lengths[lengths.size() / 2];

  std::vector<Restart> restarts(static_cast<std::size_t>(opt.n_init));
  parallel_for(restarts.size(), opt.jobs, [&](std::size_t r) {
    restarts[r] = run_restart(reduced, length, opt, derive_seed(opt.seed, {0x6b6dULL, r}));
  });
  std::size_t best = 0;
  for (std::size_t r = 1; r < restarts.size(); ++r)
    if (restarts[r].inertia < restarts[best].inertia) best = r;

  model.barycenters = std::move(restarts[best].barycenters);
  model.assignment = std::move(restarts[best].assignment);
  model.inertia = restarts[best].inertia;
  model.inertia_history = std::move(restarts[best].history);
  return model;
}

int nearest_cluster(const ClusterModel& model, const SeriesMatrix& series) {
  if (model.barycenters.empty()) throw StateError("model has not been fitted");
  const SeriesMatrix s = preprocess(model, series);
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < model.barycenters.size(); ++c) {
    const double d = soft_dtw(s, model.barycenters[c], model.gamma);
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(c);
    }
  }
  return best;
}

std::string classify(const ClusterModel& model, const SeriesMatrix& series) {
  if (!model.mapped()) throw StateError("model has no label mapping");
  return model.labels[static_cast<std::size_t>(
      model.label_permutation[static_cast<std::size_t>(nearest_cluster(model, series))])];
}

double macro_f1(const std::vector<int>& predicted, const std::vector<int>& truth,
                int n_labels) {
  if (predicted.size() != truth.size())
    throw ValidationError("prediction and truth lengths differ");
  std::vector<double> tp(n_labels, 0.0), pred(n_labels, 0.0), real(n_labels, 0.0);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (predicted[i] >= 0 && predicted[i] < n_labels) pred[predicted[i]] += 1.0;
    real[truth[i]] += 1.0;
    if (predicted[i] == truth[i]) tp[truth[i]] += 1.0;
  }
  double sum = 0.0;
  for (int c = 0; c < n_labels; ++c) {
    const double denom = pred[c] + real[c];
    if (denom > 0.0) sum += 2.0 * tp[c] / denom;
  }
  return sum / n_labels;
}

PermutationMap f1_permutation_map(const std::vector<int>& assignments,
                                  const std::vector<int>& truth, int n_labels) {
  if (assignments.size() != truth.size())
    throw ValidationError("assignments and truth have different lengths");
  if (assignments.empty()) throw ValidationError("no samples to map");
  for (int t : truth)
    if (t < 0 || t >= n_labels) throw ValidationError("truth label index out of range");
  const int k = *std::max_element(assignments.begin(), assignments.end()) + 1;
  if (*std::min_element(assignments.begin(), assignments.end()) < 0)
    throw ValidationError("negative cluster index");
  if (k > n_labels) throw ValidationError("more clusters than labels");

  PermutationMap best;
  best.mapped_f1 = -1.0;
  std::vector<int> perm(static_cast<std::size_t>(k));
  std::vector<bool> used(static_cast<std::size_t>(n_labels), false);
  std::vector<int> predicted(assignments.size());
  auto recurse = [&](auto&& self, int depth) -> void {
    if (depth == k) {
      for (std::size_t i = 0; i < assignments.size(); ++i)
        predicted[i] = perm[static_cast<std::size_t>(assignments[i])];
      const double f1 = macro_f1(predicted, truth, n_labels);
      if (f1 > best.mapped_f1) {
        best.mapped_f1 = f1;
        best.permutation = perm;
      }
      return;
    }
    for (int l = 0; l < n_labels; ++l) {
      if (used[l]) continue;
      used[l] = true;
      perm[depth] = l;
      self(self, depth + 1);
      used[l] = false;
    }
  };
  recurse(recurse, 0);
  return best;
}

void map_labels(ClusterModel& model, const std::vector<std::string>& truth) {
  if (truth.size() != model.assignment.size())
    throw ValidationError("one truth label per training series is required");
  model.labels.clear();
  std::vector<int> idx;
  for (const auto& t : truth) {
    auto it = std::find(model.labels.begin(), model.labels.end(), t);
    if (it == model.labels.end()) {
      model.labels.push_back(t);
      it = model.labels.end() - 1;
    }
    idx.push_back(static_cast<int>(it - model.labels.begin()));
  }
  if (static_cast<int>(model.labels.size()) < model.k)
    throw ValidationError("fewer distinct labels than clusters");
  // Clusters that ended up empty still need a label; pad the assignment
  // domain so the bijection covers all k clusters.
  std::vector<int> assign = model.assignment;
  PermutationMap pm = f1_permutation_map(assign, idx, static_cast<int>(model.labels.size()));
  std::vector<bool> used(model.labels.size(), false);
  for (int l : pm.permutation) used[l] = true;
  while (static_cast<int>(pm.permutation.size()) < model.k) {
    const auto free = std::find(used.begin(), used.end(), false);
    used[static_cast<std::size_t>(free - used.begin())] = true;
    pm.permutation.push_back(static_cast<int>(free - used.begin()));
  }
  model.label_permutation = pm.permutation;
  model.mapped_f1 = pm.mapped_f1;
}

double chance_f1(int k, int per_class, int trials, std::uint64_t seed) {
  if (k < 2 || per_class < 1 || trials < 1)
    throw ValidationError("chance_f1 needs k >= 2, per_class >= 1, trials >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick(0, k - 1);
  std::vector<int> truth;
  for (int c = 0; c < k; ++c) truth.insert(truth.end(), static_cast<std::size_t>(per_class), c);
  double sum = 0.0;
  std::vector<int> assign(truth.size());
  for (int t = 0; t < trials; ++t) {
    for (auto& a : assign) a = pick(rng);
    sum += f1_permutation_map(assign, truth, k).mapped_f1;
  }
  return sum / trials;
}

void save_model(std::ostream& out, const ClusterModel& model) {
  using nlohmann::json;
  json j;
  j["format"] = "inertid.cluster_model";
  j["version"] = kModelVersion;
  j["k"] = model.k;
  j["gamma"] = model.gamma;
  j["downsample"] = model.downsample;
  j["normalization"]["mean"] = std::vector<double>(model.normalization.mean.begin(),
                                                   model.normalization.mean.end());
  j["normalization"]["scale"] = std::vector<double>(model.normalization.scale.begin(),
                                                    model.normalization.scale.end());
  json bary = json::array();
  for (const auto& b : model.barycenters) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < b.rows(); ++i) {
      json row = json::array();
      for (Eigen::Index c = 0; c < b.cols(); ++c) row.push_back(b(i, c));
      rows.push_back(std::move(row));
    }
    bary.push_back(std::move(rows));
  }
  j["barycenters"] = std::move(bary);
  j["assignment"] = model.assignment;
  j["inertia"] = model.inertia;
  j["inertia_history"] = model.inertia_history;
  j["labels"] = model.labels;
  j["label_permutation"] = model.label_permutation;
  j["mapped_f1"] = model.mapped_f1;
  out << j.dump(1) << '\n';
}

ClusterModel load_model(std::istream& in) {
  using nlohmann::json;
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("cluster model is not valid JSON: ") + e.what());
  }
  if (j.value("format", "") != "inertid.cluster_model")
    throw ValidationError("not a cluster model file");
  if (j.value("version", 0) != kModelVersion)
    throw ValidationError("unsupported cluster model version");
  try {
    ClusterModel m;
    m.k = j.at("k").get<int>();
    m.gamma = j.at("gamma").get<double>();
    m.downsample = j.at("downsample").get<int>();
    const auto mean = j.at("normalization").at("mean").get<std::vector<double>>();
    const auto scale = j.at("normalization").at("scale").get<std::vector<double>>();
    m.normalization.mean = Eigen::Map<const Eigen::VectorXd>(mean.data(), static_cast<Eigen::Index>(mean.size()));
    m.normalization.scale = Eigen::Map<const Eigen::VectorXd>(scale.data(), static_cast<Eigen::Index>(scale.size()));
    for (const auto& rows : j.at("barycenters")) {
      SeriesMatrix b(static_cast<Eigen::Index>(rows.size()),
                     static_cast<Eigen::Index>(rows.empty() ? 0 : rows.front().size()));
      for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t c = 0; c < rows[i].size(); ++c)
          b(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = rows[i][c].get<double>();
      m.barycenters.push_back(std::move(b));
    }
    m.assignment = j.at("assignment").get<std::vector<int>>();
    m.inertia = j.at("inertia").get<double>();
    m.inertia_history = j.value("inertia_history", std::vector<double>{});
    m.labels = j.at("labels").get<std::vector<std::string>>();
    m.label_permutation = j.at("label_permutation").get<std::vector<int>>();
    m.mapped_f1 = j.at("mapped_f1").get<double>();
    if (static_cast<int>(m.barycenters.size()) != m.k)
      throw ValidationError("barycenter count does not match k");
    return m;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed cluster model: ") + e.what());
  }
}

}  // namespace inertid::tsc
