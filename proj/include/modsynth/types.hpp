#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace modsynth {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;
using Quat = Eigen::Quaterniond;
using Transform = Eigen::Isometry3d;

/// Rotation by pi about x; maps a connector frame onto its mating partner.
inline Transform flip_x()
{
    Transform t = Transform::Identity();
    t.linear() = Eigen::AngleAxisd(M_PI, Vec3::UnitX()).toRotationMatrix();
    return t;
}

inline Transform translation(double x, double y, double z)
{
    Transform t = Transform::Identity();
    t.translation() = Vec3(x, y, z);
    return t;
}

inline Transform translation(const Vec3& p)
{
    return translation(p.x(), p.y(), p.z());
}

}  // namespace modsynth
