#include "inertid/tsc/soft_dtw.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "inertid/errors.hpp"

namespace inertid::tsc {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_pair(const SeriesMatrix& a, const SeriesMatrix& b) {
  validate_series(a);
  validate_series(b);
  if (a.cols() != b.cols())
    throw ValidationError("series have different channel counts");
}

// Squared-Euclidean cost between every frame of a and every frame of b.
Eigen::MatrixXd frame_costs(const SeriesMatrix& a, const SeriesMatrix& b) {
  const Eigen::Index m = a.rows(), n = b.rows();
  Eigen::MatrixXd d(m, n);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < n; ++j) d(i, j) = (a.row(i) - b.row(j)).squaredNorm();
  return d;
}

inline double softmin3(double a, double b, double c, double gamma) {
  // Order so that a is the smallest; its term is exp(0) = 1.
  if (b < a) std::swap(a, b);
  if (c < a) std::swap(a, c);
  if (a == kInf) return kInf;
  const double inv = 1.0 / gamma;
  const double s = 1.0 + std::exp((a - b) * inv) + std::exp((a - c) * inv);
  return a - gamma * std::log(s);
}

// Forward soft-DTW table, (m+2) x (n+2) so the backward pass can pad.
Eigen::MatrixXd forward_table(const Eigen::MatrixXd& d, double gamma) {
  const Eigen::Index m = d.rows(), n = d.cols();
  Eigen::MatrixXd r = Eigen::MatrixXd::Constant(m + 2, n + 2, kInf);
  r(0, 0) = 0.0;
  for (Eigen::Index i = 1; i <= m; ++i)
    for (Eigen::Index j = 1; j <= n; ++j)
      r(i, j) = d(i - 1, j - 1) +
                softmin3(r(i - 1, j), r(i, j - 1), r(i - 1, j - 1), gamma);
  return r;
}

void check_gamma(double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma))
    throw ValidationError("soft-DTW gamma must be positive");
}

}  // namespace

void validate_series(const SeriesMatrix& s) {
  if (s.rows() < 1 || s.cols() < 1) throw ValidationError("series is empty");
  if (!s.allFinite()) throw ValidationError("series has non-finite entries");
}

double dtw_distance(const SeriesMatrix& a, const SeriesMatrix& b) {
  check_pair(a, b);
  const Eigen::MatrixXd d = frame_costs(a, b);
  const Eigen::Index m = d.rows(), n = d.cols();
  Eigen::MatrixXd r = Eigen::MatrixXd::Constant(m + 1, n + 1, kInf);
  r(0, 0) = 0.0;
  for (Eigen::Index i = 1; i <= m; ++i)
    for (Eigen::Index j = 1; j <= n; ++j)
      r(i, j) = d(i - 1, j - 1) + std::min({r(i - 1, j), r(i, j - 1), r(i - 1, j - 1)});
  return r(m, n);
}

double soft_dtw(const SeriesMatrix& a, const SeriesMatrix& b, double gamma) {
  check_pair(a, b);
  check_gamma(gamma);
  const Eigen::MatrixXd d = frame_costs(a, b);
  return forward_table(d, gamma)(d.rows(), d.cols());
}

SoftDtwEvaluation soft_dtw_evaluate(const SeriesMatrix& a, const SeriesMatrix& b,
                                    double gamma) {
  check_pair(a, b);
  check_gamma(gamma);
  const Eigen::Index m = a.rows(), n = b.rows();
  const Eigen::MatrixXd d = frame_costs(a, b);
  Eigen::MatrixXd r = forward_table(d, gamma);

  SoftDtwEvaluation out;
  out.value = r(m, n);

  // Backward recursion for the expected alignment matrix E.
  Eigen::MatrixXd dp = Eigen::MatrixXd::Zero(m + 2, n + 2);
  dp.block(1, 1, m, n) = d;
  for (Eigen::Index i = 1; i <= m + 1; ++i) r(i, n + 1) = -kInf;
  for (Eigen::Index j = 1; j <= n + 1; ++j) r(m + 1, j) = -kInf;
  r(m + 1, n + 1) = r(m, n);
  Eigen::MatrixXd e = Eigen::MatrixXd::Zero(m + 2, n + 2);
  e(m + 1, n + 1) = 1.0;
  for (Eigen::Index j = n; j >= 1; --j) {
    for (Eigen::Index i = m; i >= 1; --i) {
      const double wa = std::exp((r(i + 1, j) - r(i, j) - dp(i + 1, j)) / gamma);
      const double wb = std::exp((r(i, j + 1) - r(i, j) - dp(i, j + 1)) / gamma);
      const double wc = std::exp((r(i + 1, j + 1) - r(i, j) - dp(i + 1, j + 1)) / gamma);
      e(i, j) = e(i + 1, j) * wa + e(i, j + 1) * wb + e(i + 1, j + 1) * wc;
    }
  }
  const Eigen::MatrixXd align = e.block(1, 1, m, n);
  out.alignment_mass = align.rowwise().sum();
  // d D_ij / d a_i = 2 (a_i - b_j)
  out.gradient = 2.0 * (out.alignment_mass.asDiagonal() * a - align * b);
  return out;
}

SeriesMatrix soft_dtw_gradient(const SeriesMatrix& a, const SeriesMatrix& b,
                               double gamma) {
  return soft_dtw_evaluate(a, b, gamma).gradient;
}

namespace {

double barycenter_objective(const std::vector<SeriesMatrix>& members,
                            const SeriesMatrix& z, double gamma) {
  double total = 0.0;
  for (const auto& x : members) total += soft_dtw(z, x, gamma);
  return total;
}

}  // namespace

BarycenterResult soft_dtw_barycenter(const std::vector<SeriesMatrix>& members,
                                     const SeriesMatrix& init,
                                     const BarycenterOptions& options) {
  if (members.empty()) throw ValidationError("barycenter needs at least one member");
  check_gamma(options.gamma);
  validate_series(init);
  for (const auto& x : members) check_pair(init, x);

  BarycenterResult out;
  out.barycenter = init;
  constexpr int kMaxHalvings = 30;

  double f = 0.0;
  SeriesMatrix grad(init.rows(), init.cols());
  Eigen::VectorXd mass(init.rows());
  auto evaluate = [&](const SeriesMatrix& z) {
    grad.setZero();
    mass.setZero();
    double total = 0.0;
    for (const auto& x : members) {
      SoftDtwEvaluation ev = soft_dtw_evaluate(z, x, options.gamma);
      total += ev.value;
      grad += ev.gradient;
      mass += ev.alignment_mass;
    }
    return total;
  };

  f = evaluate(out.barycenter);
  if (!std::isfinite(f)) throw OptimizationError("barycenter objective is not finite");
  out.history.push_back(f);

  for (int it = 0; it < options.max_iter; ++it) {
    // Preconditioned descent direction; mass is strictly positive for every
    // frame since each frame lies on some alignment path.
    SeriesMatrix dir = -0.5 * (mass.cwiseMax(1e-12).cwiseInverse().asDiagonal() * grad);
    double step = 1.0;
    bool accepted = false;
    double f_new = f;
    SeriesMatrix candidate;
    for (int h = 0; h < kMaxHalvings; ++h, step *= 0.5) {
      candidate = out.barycenter + step * dir;
      f_new = barycenter_objective(members, candidate, options.gamma);
      if (std::isfinite(f_new) && f_new <= f) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      const double gnorm = grad.norm();
      if (gnorm > 1e-3 * (1.0 + std::abs(f)))
        throw OptimizationError("barycenter step-size backoff exhausted");
      break;
    }
    out.barycenter = std::move(candidate);
    ++out.iterations;
    const double decrease = f - f_new;
    out.history.push_back(f_new);
    if (decrease <= options.tol * std::max(1.0, std::abs(f))) {
      f = f_new;
      break;
    }
    f = evaluate(out.barycenter);
  }
  out.objective = f;
  return out;
}

}  // namespace inertid::tsc
