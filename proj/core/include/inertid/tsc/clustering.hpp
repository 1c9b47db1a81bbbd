#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "inertid/dynamics.hpp"
#include "inertid/tsc/soft_dtw.hpp"

namespace inertid::tsc {

/// Affine standardisation fitted on a training set: per-channel mean, one
/// shared scale.
struct Normalization {
  Eigen::VectorXd mean;
  Eigen::VectorXd scale;

  SeriesMatrix apply(const SeriesMatrix& s) const;
};

struct KMeansOptions {
  int k = 3;
  double gamma = 1.0;
  int n_init = 5;
  int max_iter = 50;
  double tol = 1e-5;
  int barycenter_max_iter = 30;
  // Block-average every `downsample` frames before clustering.
  int downsample = 1;
  std::uint64_t seed = 0;
  int jobs = 1;
};

struct ClusterModel {
  int k = 0;
  double gamma = 1.0;
  int downsample = 1;
  Normalization normalization;
  std::vector<SeriesMatrix> barycenters;  // normalised space
  std::vector<int> assignment;            // per training series
  double inertia = 0.0;
  // Total inertia after each assignment step of the winning restart.
  std::vector<double> inertia_history;

  // Filled by map_labels.
  std::vector<std::string> labels;      // ground-truth label set
  std::vector<int> label_permutation;   // cluster index -> index into labels
  double mapped_f1 = 0.0;

  bool mapped() const { return !label_permutation.empty(); }
};

/// Block average of `factor` consecutive frames (the trailing partial block is
/// averaged over its own length).
SeriesMatrix downsample(const SeriesMatrix& s, int factor);

/// Measured rates of a trajectory as a T x 3 series, zero-order-hold padded
/// to `length` samples when the trajectory stopped early (0 keeps its length).
SeriesMatrix series_from_trajectory(const dynamics::Trajectory& t, std::size_t length = 0);

/// Soft-DTW k-means. Runs `n_init` restarts from distinct seeded
/// initialisations (k distinct members) and keeps the restart with the lowest
/// total inertia. An emptied cluster is re-seeded from the member farthest
/// from its current barycenter.
ClusterModel kmeans_fit(const std::vector<SeriesMatrix>& dataset,
                        const KMeansOptions& options);

/// Index of the nearest barycenter; ties go to the lowest index.
int nearest_cluster(const ClusterModel& model, const SeriesMatrix& series);

/// Configuration label of `series`. Throws StateError for an unmapped model.
std::string classify(const ClusterModel& model, const SeriesMatrix& series);

struct PermutationMap {
  std::vector<int> permutation;  // cluster -> label index
  double mapped_f1 = 0.0;
};

/// Macro-averaged F1 of predictions against truth over `n_labels` classes.
double macro_f1(const std::vector<int>& predicted, const std::vector<int>& truth,
                int n_labels);

/// Best cluster -> label bijection by macro F1, enumerating every injective
/// map in lexicographic order (first maximiser wins).
PermutationMap f1_permutation_map(const std::vector<int>& assignments,
                                  const std::vector<int>& truth, int n_labels);

/// Maps the model's clusters onto `truth` (one label per training series).
/// Labels are indexed in order of first appearance.
void map_labels(ClusterModel& model, const std::vector<std::string>& truth);

/// Mean mapped F1 of uniformly random cluster assignments: the score a
/// classifier with no information reaches.
double chance_f1(int k, int per_class, int trials, std::uint64_t seed);

void save_model(std::ostream& out, const ClusterModel& model);
ClusterModel load_model(std::istream& in);

}  // namespace inertid::tsc
