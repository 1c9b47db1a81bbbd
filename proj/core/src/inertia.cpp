#include "inertid/inertia.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "inertid/errors.hpp"

namespace inertid::inertia {
namespace {

bool all_finite(const Mat3& m) { return m.allFinite(); }

// Eigenvalue floor (relative to the largest) below which the composed tensor
// is treated as singular.
constexpr double kSingularRatio = 1e-12;

}  // namespace

Mat3 box_inertia(double mass, const Vec3& dims) {
  if (!(mass > 0.0)) throw ValidationError("box_inertia: mass must be positive");
  if ((dims.array() < 0.0).any())
    throw ValidationError("box_inertia: dimensions must be non-negative");
  const Vec3 sq = dims.cwiseProduct(dims);
  Mat3 out = Mat3::Zero();
  out(0, 0) = mass / 12.0 * (sq.y() + sq.z());
  out(1, 1) = mass / 12.0 * (sq.x() + sq.z());
  out(2, 2) = mass / 12.0 * (sq.x() + sq.y());
  return out;
}

void validate(const BodySpec& body) {
  if (!(body.mass > 0.0) || !std::isfinite(body.mass))
    throw ValidationError("body '" + body.label + "': mass must be positive");
  if (!body.position.allFinite() || !all_finite(body.inertia_cm))
    throw ValidationError("body '" + body.label + "': non-finite geometry");
  const double scale = std::max(1.0, body.inertia_cm.cwiseAbs().maxCoeff());
  if ((body.inertia_cm - body.inertia_cm.transpose()).cwiseAbs().maxCoeff() >
      1e-9 * scale)
    throw ValidationError("body '" + body.label + "': inertia not symmetric");
  Eigen::SelfAdjointEigenSolver<Mat3> eig(body.inertia_cm, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < -1e-9 * scale)
    throw ValidationError("body '" + body.label +
                          "': inertia not positive semi-definite");
  const Vec3 d = body.inertia_cm.diagonal();
  for (int i = 0; i < 3; ++i) {
    if (d(i) > d((i + 1) % 3) + d((i + 2) % 3) + 1e-9 * scale)
      throw ValidationError("body '" + body.label +
                            "': principal moments violate the triangle inequality");
  }
  const Mat3& r = body.orientation;
  if (!all_finite(r) ||
      (r.transpose() * r - Mat3::Identity()).cwiseAbs().maxCoeff() > 1e-9)
    throw ValidationError("body '" + body.label +
                          "': orientation is not orthonormal");
}

Vec3 center_of_mass(const std::vector<BodySpec>& bodies) {
  if (bodies.empty()) throw DomainError("center_of_mass: empty body list");
  double mass = 0.0;
  Vec3 moment = Vec3::Zero();
  for (const auto& b : bodies) {
    if (!(b.mass > 0.0))
      throw ValidationError("body '" + b.label + "': mass must be positive");
    mass += b.mass;
    moment += b.mass * b.position;
  }
  return moment / mass;
}

Mat3 parallel_axis_shift(const Mat3& inertia_cm, double mass,
                         const Vec3& offset) {
  if (!(mass > 0.0))
    throw ValidationError("parallel_axis_shift: mass must be positive");
  return inertia_cm + mass * (offset.squaredNorm() * Mat3::Identity() -
                              offset * offset.transpose());
}

InertialParams compose(const std::vector<BodySpec>& bodies) {
  if (bodies.empty()) throw DomainError("compose: empty body list");
  for (const auto& b : bodies) validate(b);

  InertialParams out;
  out.cm = center_of_mass(bodies);
  for (const auto& b : bodies) {
    out.total_mass += b.mass;
    const Mat3 rotated = b.orientation * b.inertia_cm * b.orientation.transpose();
    out.inertia += parallel_axis_shift(rotated, b.mass, b.position - out.cm);
  }
  // Summation order leaves ulp-level asymmetry from the rotation products.
  out.inertia = 0.5 * (out.inertia + out.inertia.transpose()).eval();

  Eigen::SelfAdjointEigenSolver<Mat3> eig(out.inertia, Eigen::EigenvaluesOnly);
  const Vec3 ev = eig.eigenvalues();
  out.invertible = ev.maxCoeff() > 0.0 && ev.minCoeff() > kSingularRatio * ev.maxCoeff();
  return out;
}

std::pair<std::vector<BodySpec>, InertialParams> deploy_payload(
    const std::vector<BodySpec>& bodies, const std::string& label) {
  auto it = std::find_if(bodies.begin(), bodies.end(),
                         [&](const BodySpec& b) { return b.label == label; });
  if (it == bodies.end()) throw NotFoundError("no body labelled '" + label + "'");
  if (bodies.size() == 1)
    throw DomainError("deploying '" + label + "' would empty the stack");
  std::vector<BodySpec> rest;
  rest.reserve(bodies.size() - 1);
  for (auto b = bodies.begin(); b != bodies.end(); ++b)
    if (b != it) rest.push_back(*b);
  InertialParams params = compose(rest);
  return {std::move(rest), params};
}

}  // namespace inertid::inertia
