#pragma once

#include <vector>

#include <Eigen/Core>

namespace inertid::tsc {

/// T x D multivariate series, one row per time step.
using SeriesMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Throws ValidationError for an empty or non-finite series.
void validate_series(const SeriesMatrix& s);

/// Classic DTW with squared-Euclidean frame cost and steps
/// {(1,0), (0,1), (1,1)}; returns the accumulated cost of the best path.
double dtw_distance(const SeriesMatrix& a, const SeriesMatrix& b);

/// Soft-DTW: the DTW recursion with min replaced by
/// softmin_g(x) = -g log sum exp(-x/g). Not clamped; may be negative.
double soft_dtw(const SeriesMatrix& a, const SeriesMatrix& b, double gamma);

/// d soft_dtw(a, b) / d a, shape of `a`.
SeriesMatrix soft_dtw_gradient(const SeriesMatrix& a, const SeriesMatrix& b,
                               double gamma);

struct SoftDtwEvaluation {
  double value = 0.0;
  SeriesMatrix gradient;  // w.r.t. a
  // Row sums of the expected alignment matrix: how much alignment weight each
  // frame of `a` carries.
  Eigen::VectorXd alignment_mass;
};

SoftDtwEvaluation soft_dtw_evaluate(const SeriesMatrix& a, const SeriesMatrix& b,
                                    double gamma);

struct BarycenterOptions {
  double gamma = 1.0;
  int max_iter = 30;
  double tol = 1e-5;
};

struct BarycenterResult {
  SeriesMatrix barycenter;
  double objective = 0.0;
  int iterations = 0;
  // Objective after every accepted step, starting with the initial value.
  std::vector<double> history;
};

/// Minimises sum_m soft_dtw(Z, members[m]) over Z starting from `init`.
///
/// Each iteration takes a preconditioned gradient step (the gradient of frame
/// i divided by twice its total alignment mass) with halving backtracking,
/// so only steps that do not increase the objective are accepted. Stops when
/// the relative decrease falls below `tol`, when no step size improves the
/// objective, or after `max_iter` iterations. Throws OptimizationError when
/// the objective becomes non-finite or backtracking fails while the gradient
/// is still large.
BarycenterResult soft_dtw_barycenter(const std::vector<SeriesMatrix>& members,
                                     const SeriesMatrix& init,
                                     const BarycenterOptions& options);

}  // namespace inertid::tsc
