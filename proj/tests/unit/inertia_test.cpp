#include <random>

#include <gtest/gtest.h>

#include "inertid/errors.hpp"
#include "inertid/inertia.hpp"

namespace inertid::inertia {
namespace {

BodySpec point(const std::string& label, double m, const Vec3& r) {
  BodySpec b;
  b.label = label;
  b.mass = m;
  b.position = r;
  return b;
}

// Direct element-wise sums over point masses about their common CM.
Mat3 point_mass_tensor(const std::vector<BodySpec>& bodies) {
  double m_tot = 0.0;
  Vec3 c = Vec3::Zero();
  for (const auto& b : bodies) {
    m_tot += b.mass;
    c += b.mass * b.position;
  }
  c /= m_tot;
  Mat3 I = Mat3::Zero();
  for (const auto& b : bodies) {
    const double x = b.position.x() - c.x(), y = b.position.y() - c.y(), z = b.position.z() - c.z();
    I(0, 0) += b.mass * (y * y + z * z);
    I(1, 1) += b.mass * (x * x + z * z);
    I(2, 2) += b.mass * (x * x + y * y);
    I(0, 1) -= b.mass * x * y;
    I(0, 2) -= b.mass * x * z;
    I(1, 2) -= b.mass * y * z;
  }
  I(1, 0) = I(0, 1);
  I(2, 0) = I(0, 2);
  I(2, 1) = I(1, 2);
  return I;
}

TEST(Inertia, PointMassesMatchElementSums) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> pos(-3.0, 3.0), mass(0.5, 20.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<BodySpec> bodies;
    for (int i = 0; i < 5; ++i)
      bodies.push_back(point("b" + std::to_string(i), mass(rng), Vec3(pos(rng), pos(rng), pos(rng))));
    const InertialParams p = compose(bodies);
    const Mat3 expected = point_mass_tensor(bodies);
    EXPECT_LT((p.inertia - expected).norm(), 1e-10 * expected.norm());
  }
}

TEST(Inertia, BoxTensorMatchesGridIntegration) {
  const Vec3 dims(1.2, 0.7, 2.0);
  const double m = 30.0;
  const int n = 60;
  Mat3 I = Mat3::Zero();
  const double dm = m / (n * n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const double x = ((i + 0.5) / n - 0.5) * dims.x();
        const double y = ((j + 0.5) / n - 0.5) * dims.y();
        const double z = ((k + 0.5) / n - 0.5) * dims.z();
        I(0, 0) += dm * (y * y + z * z);
        I(1, 1) += dm * (x * x + z * z);
        I(2, 2) += dm * (x * x + y * y);
      }
  const Mat3 box = box_inertia(m, dims);
  // Midpoint rule error is O(1/n^2) relative.
  EXPECT_LT((box - I).norm() / box.norm(), 1e-3);
  EXPECT_EQ(box(0, 1), 0.0);
}

TEST(Inertia, SingleBodyCentredIsIdentityOperation) {
  BodySpec b;
  b.label = "only";
  b.mass = 12.0;
  b.position = Vec3(1, 2, 3);
  b.inertia_cm = box_inertia(12.0, Vec3(1, 2, 3));
  const InertialParams p = compose({b});
  EXPECT_DOUBLE_EQ(p.total_mass, 12.0);
  EXPECT_LT((p.cm - b.position).norm(), 1e-15);
  EXPECT_LT((p.inertia - b.inertia_cm).norm(), 1e-12);
}

TEST(Inertia, SteinerShiftAddsMassTimesDistance) {
  const Mat3 shifted = parallel_axis_shift(Mat3::Zero(), 2.0, Vec3(0, 3, 0));
  EXPECT_DOUBLE_EQ(shifted(0, 0), 18.0);
  EXPECT_DOUBLE_EQ(shifted(1, 1), 0.0);
  EXPECT_DOUBLE_EQ(shifted(2, 2), 18.0);
}

TEST(Inertia, RotatedBoxSwapsAxes) {
  BodySpec b;
  b.label = "box";
  b.mass = 5.0;
  b.inertia_cm = box_inertia(5.0, Vec3(1.0, 2.0, 3.0));
  b.orientation << 0, -1, 0, 1, 0, 0, 0, 0, 1;  // 90 deg about z
  const InertialParams p = compose({b});
  EXPECT_NEAR(p.inertia(0, 0), b.inertia_cm(1, 1), 1e-12);
  EXPECT_NEAR(p.inertia(1, 1), b.inertia_cm(0, 0), 1e-12);
}

TEST(Inertia, CentreOfMassResidualVanishes) {
  std::vector<BodySpec> bodies = {point("a", 10000.0, Vec3(0, 0, 0)),
                                  point("b", 200.0, Vec3(2.5, 0, 3)),
                                  point("c", 200.0, Vec3(-2.5, 0, 3))};
  const Vec3 c = center_of_mass(bodies);
  Vec3 residual = Vec3::Zero();
  for (const auto& b : bodies) residual += b.mass * (b.position - c);
  EXPECT_LT(residual.norm(), 1e-10 * 10400.0);
}

TEST(Inertia, DeployPayloadRemovesItsMass) {
  std::vector<BodySpec> bodies = {point("bus", 100.0, Vec3(0, 0, 0)),
                                  point("p", 20.0, Vec3(1, 0, 0)),
                                  point("q", 20.0, Vec3(0, 1, 0))};
  for (auto& b : bodies) b.inertia_cm = Mat3::Identity();
  const auto [rest, params] = deploy_payload(bodies, "p");
  EXPECT_EQ(rest.size(), 2u);
  EXPECT_DOUBLE_EQ(compose(bodies).total_mass - params.total_mass, 20.0);
  EXPECT_THROW(deploy_payload(bodies, "nope"), NotFoundError);
  EXPECT_THROW(deploy_payload({bodies[0]}, "bus"), DomainError);
}

TEST(Inertia, ValidationRejectsBadBodies) {
  BodySpec b;
  b.label = "bad";
  b.mass = -1.0;
  EXPECT_THROW(validate(b), ValidationError);
  b.mass = 1.0;
  b.inertia_cm = Mat3::Identity();
  b.inertia_cm(0, 1) = 0.3;
  EXPECT_THROW(validate(b), ValidationError);  // asymmetric
  b.inertia_cm = Vec3(1.0, 1.0, 5.0).asDiagonal();
  EXPECT_THROW(validate(b), ValidationError);  // triangle inequality
  EXPECT_THROW(compose({}), DomainError);
}

TEST(Inertia, CollinearPointMassesAreNotInvertible) {
  const InertialParams p = compose({point("a", 1.0, Vec3(-1, 0, 0)), point("b", 1.0, Vec3(1, 0, 0))});
  EXPECT_FALSE(p.invertible);
}

}  // namespace
}  // namespace inertid::inertia
