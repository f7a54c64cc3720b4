#pragma once

#include <vector>

#include "modsynth/types.hpp"

namespace modsynth {

class Assembly;

enum class PrimitiveKind { sphere, box, cylinder, capsule };

/// Convex collision primitive. Cylinders and capsules are aligned with the
/// local z axis. dims holds sphere (r), box (hx, hy, hz), cylinder and
/// capsule (r, half_length); unused entries are zero.
struct Primitive {
    PrimitiveKind kind = PrimitiveKind::sphere;
    Transform pose = Transform::Identity();
    Vec3 dims = Vec3::Zero();

    static Primitive sphere(double r, const Transform& pose = Transform::Identity());
    static Primitive box(const Vec3& half_extents, const Transform& pose = Transform::Identity());
    static Primitive cylinder(double r, double half_length, const Transform& pose = Transform::Identity());
    static Primitive capsule(double r, double half_length, const Transform& pose = Transform::Identity());

    /// Throws modsynth::Error when a dimension is not strictly positive.
    void validate() const;
    double bounding_radius() const;
    Primitive transformed(const Transform& t) const;
};

struct Scene {
    std::vector<Primitive> obstacles;
};

/// A robot primitive in world coordinates together with the chain link owning it.
struct PlacedPrimitive {
    Primitive shape;
    int link = 0;
    int rigid_group = 0;
};

/// Distance between the shapes; zero when they overlap.
double distance(const Primitive& a, const Primitive& b);
bool intersects(const Primitive& a, const Primitive& b);

/// Euclidean distance from a point to the primitive; zero inside.
double point_distance(const Primitive& shape, const Vec3& point);

/// Separation of two convex support-mapped cores via GJK; exposed for testing.
double gjk_distance(const Primitive& a, const Primitive& b, double tolerance = 1e-6);

std::vector<PlacedPrimitive> occupied_space(const Assembly& assembly, const VecX& q,
                                            const Transform& base = Transform::Identity());

/// Robot/obstacle test plus, when self_check is set, robot/robot pairs whose
/// rigid groups are more than one joint apart.
bool in_collision(const Assembly& assembly, const VecX& q, const Scene& scene, bool self_check,
                  const Transform& base = Transform::Identity());

bool in_collision(const std::vector<PlacedPrimitive>& robot, const Scene& scene, bool self_check);

}  // namespace modsynth
