#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace inertid {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

}  // namespace inertid
