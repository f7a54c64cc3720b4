#include "modsynth/geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <tuple>

#include "modsynth/errors.hpp"
#include "modsynth/kinematics.hpp"
#include "modsynth/modlib.hpp"

namespace modsynth {

Primitive Primitive::sphere(double r, const Transform& pose)
{
    return {PrimitiveKind::sphere, pose, Vec3(r, 0.0, 0.0)};
}

Primitive Primitive::box(const Vec3& half_extents, const Transform& pose)
{
    return {PrimitiveKind::box, pose, half_extents};
}

Primitive Primitive::cylinder(double r, double half_length, const Transform& pose)
{
    return {PrimitiveKind::cylinder, pose, Vec3(r, half_length, 0.0)};
}

Primitive Primitive::capsule(double r, double half_length, const Transform& pose)
{
    return {PrimitiveKind::capsule, pose, Vec3(r, half_length, 0.0)};
}

void Primitive::validate() const
{
    const int used = kind == PrimitiveKind::sphere ? 1 : kind == PrimitiveKind::box ? 3 : 2;
    for (int i = 0; i < used; ++i) {
        if (!(dims[i] > 0.0)) {
            throw Error("primitive dimensions must be positive");
        }
    }
}

double Primitive::bounding_radius() const
{
    switch (kind) {
    case PrimitiveKind::sphere:
        return dims[0];
    case PrimitiveKind::box:
        return dims.norm();
    case PrimitiveKind::cylinder:
        return std::hypot(dims[0], dims[1]);
    case PrimitiveKind::capsule:
        return dims[0] + dims[1];
    }
    return 0.0;
}

Primitive Primitive::transformed(const Transform& t) const
{
    Primitive out = *this;
    out.pose = t * pose;
    return out;
}

namespace {

// Shapes are split into a convex core (point, segment, box, cylinder) and a
// spherical margin; GJK runs on the cores.
double margin(const Primitive& p)
{
    return p.kind == PrimitiveKind::sphere || p.kind == PrimitiveKind::capsule ? p.dims[0] : 0.0;
}

Vec3 local_support(const Primitive& p, const Vec3& d)
{
    switch (p.kind) {
    case PrimitiveKind::sphere:
        return Vec3::Zero();
    case PrimitiveKind::capsule:
        return Vec3(0.0, 0.0, d.z() >= 0.0 ? p.dims[1] : -p.dims[1]);
    case PrimitiveKind::box:
        return Vec3(d.x() >= 0.0 ? p.dims[0] : -p.dims[0], d.y() >= 0.0 ? p.dims[1] : -p.dims[1],
                    d.z() >= 0.0 ? p.dims[2] : -p.dims[2]);
    case PrimitiveKind::cylinder: {
        const double rxy = std::hypot(d.x(), d.y());
        Vec3 s(0.0, 0.0, d.z() >= 0.0 ? p.dims[1] : -p.dims[1]);
        if (rxy > 0.0) {
            s.x() = p.dims[0] * d.x() / rxy;
            s.y() = p.dims[0] * d.y() / rxy;
        }
        return s;
    }
    }
    return Vec3::Zero();
}

Vec3 support(const Primitive& p, const Vec3& d)
{
    return p.pose * local_support(p, p.pose.linear().transpose() * d);
}

/// Projection of the origin onto the affine hull of pts[idx[0..k)]. Fails
/// for degenerate faces or when a barycentric weight is not positive.
bool face_projection(const std::vector<Vec3>& pts, const std::array<std::size_t, 4>& idx, std::size_t k, Vec3& out)
{
    const Vec3& p0 = pts[idx[0]];
    if (k == 1) {
        out = p0;
        return true;
    }
    if (k == 2) {
        const Vec3 e = pts[idx[1]] - p0;
        const double ee = e.squaredNorm();
        if (ee <= 1e-24) {
            return false;
        }
        const double l = -p0.dot(e) / ee;
        if (l <= 0.0 || l >= 1.0) {
            return false;
        }
        out = p0 + l * e;
        return true;
    }
    if (k == 3) {
        const Vec3 e1 = pts[idx[1]] - p0;
        const Vec3 e2 = pts[idx[2]] - p0;
        Eigen::Matrix2d g;
        g << e1.dot(e1), e1.dot(e2), e1.dot(e2), e2.dot(e2);
        const double det = g.determinant();
        if (std::abs(det) <= 1e-12 * g(0, 0) * g(1, 1) || det == 0.0) {
            return false;
        }
        const Eigen::Vector2d l = g.inverse() * Eigen::Vector2d(-e1.dot(p0), -e2.dot(p0));
        if (l[0] <= 0.0 || l[1] <= 0.0 || l.sum() >= 1.0) {
            return false;
        }
        out = p0 + l[0] * e1 + l[1] * e2;
        return true;
    }
    Mat3 e;
    e << pts[idx[1]] - p0, pts[idx[2]] - p0, pts[idx[3]] - p0;
    const double det = e.determinant();
    const double scale = e.col(0).norm() * e.col(1).norm() * e.col(2).norm();
    if (std::abs(det) <= 1e-12 * scale || det == 0.0) {
        return false;
    }
    const Vec3 l = e.inverse() * (-p0);
    if ((l.array() <= 0.0).any() || l.sum() >= 1.0) {
        return false;
    }
    out = Vec3::Zero();
    return true;
}

/// Closest point to the origin in the convex hull of `pts`; reduces the
/// simplex to the supporting face. Each face whose origin projection has
/// positive barycentric weights lies in the hull, so the nearest one wins.
Vec3 closest_on_simplex(std::vector<Vec3>& pts)
{
    const std::size_t n = pts.size();
    double best = std::numeric_limits<double>::infinity();
    Vec3 best_point = pts.front();
    unsigned best_mask = 1;
    for (unsigned mask = 1; mask < (1u << n); ++mask) {
        std::array<std::size_t, 4> idx{};
        std::size_t k = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (mask & (1u << i)) {
                idx[k++] = i;
            }
        }
        Vec3 point;
        if (!face_projection(pts, idx, k, point)) {
            continue;
        }
        const double d = point.squaredNorm();
        if (d < best) {
            best = d;
            best_point = point;
            best_mask = mask;
        }
    }
    std::vector<Vec3> reduced;
    for (std::size_t i = 0; i < n; ++i) {
        if (best_mask & (1u << i)) {
            reduced.push_back(pts[i]);
        }
    }
    pts = std::move(reduced);
    return best_point;
}

double core_distance(const Primitive& a, const Primitive& b, double tolerance)
{
    Vec3 v = a.pose.translation() - b.pose.translation();
    if (v.squaredNorm() < 1e-24) {
        v = Vec3::UnitX();
    }
    std::vector<Vec3> simplex{support(a, -v) - support(b, v)};
    v = simplex.front();
    for (int iter = 0; iter < 100; ++iter) {
        const double vv = v.squaredNorm();
        if (vv < 1e-20) {
            return 0.0;
        }
        const Vec3 w = support(a, -v) - support(b, v);
        // Converged once the new support point does not improve the bound.
        if (vv - v.dot(w) <= tolerance * std::sqrt(vv)) {
            return std::sqrt(vv);
        }
        if (std::any_of(simplex.begin(), simplex.end(), [&](const Vec3& s) { return (s - w).squaredNorm() < 1e-24; })) {
            return std::sqrt(vv);
        }
        simplex.push_back(w);
        v = closest_on_simplex(simplex);
        if (simplex.size() == 4) {
            return 0.0;
        }
    }
    return v.norm();
}

Vec3 closest_on_segment(const Vec3& p, const Vec3& a, const Vec3& b)
{
    const Vec3 ab = b - a;
    const double len2 = ab.squaredNorm();
    if (len2 <= 0.0) {
        return a;
    }
    const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
    return a + t * ab;
}

// Closest points between segments p1q1 and p2q2 (Ericson, RTCD 5.1.9).
double segment_segment_distance(const Vec3& p1, const Vec3& q1, const Vec3& p2, const Vec3& q2)
{
    const Vec3 d1 = q1 - p1;
    const Vec3 d2 = q2 - p2;
    const Vec3 r = p1 - p2;
    const double a = d1.squaredNorm();
    const double e = d2.squaredNorm();
    const double f = d2.dot(r);
    constexpr double eps = 1e-18;
    double s = 0.0;
    double t = 0.0;
    if (a <= eps && e <= eps) {
        return r.norm();
    }
    if (a <= eps) {
        t = std::clamp(f / e, 0.0, 1.0);
    } else {
        const double c = d1.dot(r);
        if (e <= eps) {
            s = std::clamp(-c / a, 0.0, 1.0);
        } else {
            const double b = d1.dot(d2);
            const double denom = a * e - b * b;
            s = denom > eps ? std::clamp((b * f - c * e) / denom, 0.0, 1.0) : 0.0;
            t = (b * s + f) / e;
            if (t < 0.0) {
                t = 0.0;
                s = std::clamp(-c / a, 0.0, 1.0);
            } else if (t > 1.0) {
                t = 1.0;
                s = std::clamp((b - c) / a, 0.0, 1.0);
            }
        }
    }
    return ((p1 + d1 * s) - (p2 + d2 * t)).norm();
}

std::pair<Vec3, Vec3> capsule_ends(const Primitive& c)
{
    const Vec3 axis = c.pose.linear().col(2) * c.dims[1];
    return {c.pose.translation() - axis, c.pose.translation() + axis};
}

double core_point_distance(const Primitive& p, const Vec3& point)
{
    const Vec3 local = p.pose.inverse() * point;
    switch (p.kind) {
    case PrimitiveKind::sphere:
        return local.norm();
    case PrimitiveKind::capsule:
        return (local - Vec3(0.0, 0.0, std::clamp(local.z(), -p.dims[1], p.dims[1]))).norm();
    case PrimitiveKind::box:
        return (local - local.cwiseMax(-p.dims).cwiseMin(p.dims)).norm();
    case PrimitiveKind::cylinder: {
        const double rxy = std::hypot(local.x(), local.y());
        const double dr = std::max(rxy - p.dims[0], 0.0);
        const double dz = std::max(std::abs(local.z()) - p.dims[1], 0.0);
        return std::hypot(dr, dz);
    }
    }
    return 0.0;
}

}  // namespace

double point_distance(const Primitive& shape, const Vec3& point)
{
    return std::max(core_point_distance(shape, point) - margin(shape), 0.0);
}

double gjk_distance(const Primitive& a, const Primitive& b, double tolerance)
{
    return core_distance(a, b, tolerance);
}

double distance(const Primitive& a, const Primitive& b)
{
    const auto ka = a.kind;
    const auto kb = b.kind;
    const double ra = margin(a);
    const double rb = margin(b);
    double core = 0.0;
    if (ka == PrimitiveKind::sphere && kb == PrimitiveKind::sphere) {
        core = (a.pose.translation() - b.pose.translation()).norm();
    } else if (ka == PrimitiveKind::sphere && kb == PrimitiveKind::capsule) {
        const auto [b0, b1] = capsule_ends(b);
        core = (a.pose.translation() - closest_on_segment(a.pose.translation(), b0, b1)).norm();
    } else if (ka == PrimitiveKind::capsule && kb == PrimitiveKind::sphere) {
        return distance(b, a);
    } else if (ka == PrimitiveKind::capsule && kb == PrimitiveKind::capsule) {
        const auto [a0, a1] = capsule_ends(a);
        const auto [b0, b1] = capsule_ends(b);
        core = segment_segment_distance(a0, a1, b0, b1);
    } else if (ka == PrimitiveKind::sphere) {
        core = core_point_distance(b, a.pose.translation());
        return std::max(core - ra, 0.0);
    } else if (kb == PrimitiveKind::sphere) {
        return distance(b, a);
    } else {
        // Fixed argument order keeps the verdict symmetric.
        const bool swap = std::make_tuple(static_cast<int>(ka), a.pose.translation().x(), a.pose.translation().y(),
                                          a.pose.translation().z()) >
                          std::make_tuple(static_cast<int>(kb), b.pose.translation().x(), b.pose.translation().y(),
                                          b.pose.translation().z());
        core = swap ? core_distance(b, a, 1e-6) : core_distance(a, b, 1e-6);
    }
    return std::max(core - ra - rb, 0.0);
}

bool intersects(const Primitive& a, const Primitive& b)
{
    const double reach = a.bounding_radius() + b.bounding_radius();
    if ((a.pose.translation() - b.pose.translation()).squaredNorm() > reach * reach) {
        return false;
    }
    return distance(a, b) <= 0.0;
}

std::vector<PlacedPrimitive> occupied_space(const Assembly& assembly, const VecX& q, const Transform& base)
{
    const ChainState s = chain_state(assembly, q, base);
    const auto& links = assembly.chain().links;
    std::vector<PlacedPrimitive> out;
    for (std::size_t i = 0; i < links.size(); ++i) {
        for (const auto& g : links[i].body.geometry) {
            out.push_back({g.transformed(s.links[i]), static_cast<int>(i), links[i].rigid_group});
        }
    }
    return out;
}

bool in_collision(const std::vector<PlacedPrimitive>& robot, const Scene& scene, bool self_check)
{
    for (const auto& r : robot) {
        for (const auto& o : scene.obstacles) {
            if (intersects(r.shape, o)) {
                return true;
            }
        }
    }
    if (self_check) {
        for (std::size_t i = 0; i < robot.size(); ++i) {
            for (std::size_t j = i + 1; j < robot.size(); ++j) {
                // Bodies sharing a rigid group or adjacent across one joint touch
                // at their connectors by construction.
                if (std::abs(robot[i].rigid_group - robot[j].rigid_group) <= 1) {
                    continue;
                }
                if (intersects(robot[i].shape, robot[j].shape)) {
                    return true;
                }
            }
        }
    }
    return false;
}

bool in_collision(const Assembly& assembly, const VecX& q, const Scene& scene, bool self_check, const Transform& base)
{
    return in_collision(occupied_space(assembly, q, base), scene, self_check);
}

}  // namespace modsynth
