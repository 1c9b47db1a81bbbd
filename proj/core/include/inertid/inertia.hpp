#pragma once

#include <string>
#include <utility>
#include <vector>

#include "inertid/types.hpp"

namespace inertid::inertia {

/// One rigid body of a spacecraft stack.
///
/// `position` is the body's own centre of mass relative to a reference origin
/// shared by all bodies of the stack. `inertia_cm` is taken about that centre
/// of mass in the body's own axes; `orientation` rotates body axes into the
/// spacecraft frame (identity when the body is aligned with the bus).
struct BodySpec {
  std::string label;
  double mass = 0.0;  // kg
  Vec3 position = Vec3::Zero();
  Mat3 inertia_cm = Mat3::Zero();  // kg m^2
  Mat3 orientation = Mat3::Identity();
};

struct InertialParams {
  double total_mass = 0.0;
  Vec3 cm = Vec3::Zero();
  Mat3 inertia = Mat3::Zero();  // about `cm`
  // False for degenerate stacks (e.g. collinear point masses). Consumers that
  // need the inverse reject such parameters.
  bool invertible = false;
};

/// Inertia tensor of a solid box of uniform density with edge lengths
/// (x, y, z), about its centroid.
Mat3 box_inertia(double mass, const Vec3& dims);

/// Throws ValidationError for non-positive mass, asymmetric or non-finite
/// tensors, or a non-orthonormal orientation.
void validate(const BodySpec& body);

Vec3 center_of_mass(const std::vector<BodySpec>& bodies);

/// Steiner shift: I + m [(R.R) 1 - R R^T].
Mat3 parallel_axis_shift(const Mat3& inertia_cm, double mass, const Vec3& offset);

InertialParams compose(const std::vector<BodySpec>& bodies);

/// Removes the body labelled `label` and recomposes the remainder.
/// Throws NotFoundError for an unknown label and DomainError when the body is
/// the last one in the stack.
std::pair<std::vector<BodySpec>, InertialParams> deploy_payload(
    const std::vector<BodySpec>& bodies, const std::string& label);

}  // namespace inertid::inertia
