#include <cmath>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "inertid/errors.hpp"
#include "inertid/tsc/soft_dtw.hpp"

namespace inertid::tsc {
namespace {

SeriesMatrix random_series(std::mt19937_64& rng, int t, int d, double scale = 1.0) {
  std::normal_distribution<double> n(0.0, scale);
  SeriesMatrix s(t, d);
  for (int i = 0; i < t; ++i)
    for (int j = 0; j < d; ++j) s(i, j) = n(rng);
  return s;
}

// Minimum over every monotone warping path from (0,0) to (m-1,n-1), costs
// accumulated from the start of the path.
void enumerate_paths(const SeriesMatrix& a, const SeriesMatrix& b, Eigen::Index i, Eigen::Index j,
                     double acc, double& best) {
  acc += (a.row(i) - b.row(j)).squaredNorm();
  if (i == a.rows() - 1 && j == b.rows() - 1) {
    best = std::min(best, acc);
    return;
  }
  if (i + 1 < a.rows()) enumerate_paths(a, b, i + 1, j, acc, best);
  if (j + 1 < b.rows()) enumerate_paths(a, b, i, j + 1, acc, best);
  if (i + 1 < a.rows() && j + 1 < b.rows()) enumerate_paths(a, b, i + 1, j + 1, acc, best);
}

double brute_dtw(const SeriesMatrix& a, const SeriesMatrix& b) {
  double best = std::numeric_limits<double>::infinity();
  enumerate_paths(a, b, 0, 0, 0.0, best);
  return best;
}

TEST(SoftDtw, DtwMatchesPathEnumeration) {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> len(1, 6), dim(1, 3);
  for (int trial = 0; trial < 200; ++trial) {
    const int d = dim(rng);
    const SeriesMatrix a = random_series(rng, len(rng), d);
    const SeriesMatrix b = random_series(rng, len(rng), d);
    EXPECT_EQ(dtw_distance(a, b), brute_dtw(a, b));
  }
}

TEST(SoftDtw, SmallGammaApproachesDtw) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    const SeriesMatrix a = random_series(rng, 8, 2);
    const SeriesMatrix b = random_series(rng, 6, 2);
    EXPECT_NEAR(soft_dtw(a, b, 1e-4), dtw_distance(a, b), 1e-3);
  }
}

TEST(SoftDtw, SoftMinLiesBelowHardMin) {
  std::mt19937_64 rng(3);
  const SeriesMatrix a = random_series(rng, 7, 3);
  const SeriesMatrix b = random_series(rng, 9, 3);
  EXPECT_LE(soft_dtw(a, b, 1.0), dtw_distance(a, b));
  EXPECT_EQ(dtw_distance(a, a), 0.0);
}

TEST(SoftDtw, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(4);
  const double h = 1e-5;
  for (int trial = 0; trial < 20; ++trial) {
    SeriesMatrix a = random_series(rng, 5, 2);
    const SeriesMatrix b = random_series(rng, 4, 2);
    const double gamma = trial % 2 ? 0.1 : 1.0;
    const SeriesMatrix g = soft_dtw_gradient(a, b, gamma);
    ASSERT_EQ(g.rows(), a.rows());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      for (Eigen::Index j = 0; j < a.cols(); ++j) {
        const double keep = a(i, j);
        a(i, j) = keep + h;
        const double up = soft_dtw(a, b, gamma);
        a(i, j) = keep - h;
        const double down = soft_dtw(a, b, gamma);
        a(i, j) = keep;
        const double fd = (up - down) / (2 * h);
        EXPECT_NEAR(g(i, j), fd, 1e-6 * std::max(1.0, std::abs(fd)));
      }
  }
}

TEST(SoftDtw, AlignmentMassCoversEveryFrame) {
  std::mt19937_64 rng(5);
  const SeriesMatrix a = random_series(rng, 6, 2);
  const SeriesMatrix b = random_series(rng, 9, 2);
  const SoftDtwEvaluation ev = soft_dtw_evaluate(a, b, 1.0);
  EXPECT_NEAR(ev.value, soft_dtw(a, b, 1.0), 1e-12);
  EXPECT_TRUE((ev.alignment_mass.array() >= 1.0 - 1e-9).all());
}

TEST(SoftDtw, BarycenterObjectiveDecreases) {
  std::mt19937_64 rng(6);
  std::vector<SeriesMatrix> members;
  SeriesMatrix base(12, 2);
  for (int i = 0; i < 12; ++i) base.row(i) << std::sin(0.5 * i), std::cos(0.3 * i);
  for (int m = 0; m < 4; ++m) members.push_back(base + random_series(rng, 12, 2, 0.1));
  const BarycenterResult r = soft_dtw_barycenter(members, members[0], {});
  ASSERT_GE(r.history.size(), 2u);
  for (std::size_t i = 1; i < r.history.size(); ++i) EXPECT_LE(r.history[i], r.history[i - 1]);
  EXPECT_LT(r.objective, r.history.front());
}

TEST(SoftDtw, InvalidInputsAreRejected) {
  SeriesMatrix a(3, 2), b(3, 3);
  a.setZero();
  b.setZero();
  EXPECT_THROW(dtw_distance(a, b), ValidationError);
  EXPECT_THROW(soft_dtw(a, a, 0.0), ValidationError);
  a(1, 1) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(soft_dtw(a, a, 1.0), ValidationError);
}

}  // namespace
}  // namespace inertid::tsc
