#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

// Vectors, tensors and field-direction conventions.
//
// Everything is expressed in the orthonormal crystal frame (D1, D2, b):
// x = D1, y = D2, z = b.  In-plane field angles are measured from D1
// towards D2 inside the (D1, D2) plane, with the b component fixed to zero.

namespace shf {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

struct FieldSpec {
    double magnitude_mT = 0.0;
    Vec3 direction = Vec3::UnitX(); // unit vector, crystal frame

    // Field in tesla for internal use.
    Vec3 tesla() const { return direction * (magnitude_mT * 1e-3); }
};

inline Vec3 unit_from_angles(double theta, double phi) {
    return {std::sin(theta) * std::cos(phi),
            std::sin(theta) * std::sin(phi),
            std::cos(theta)};
}

// The in-plane convention: angle in degrees from D1 within the (D1, D2)
// plane; b component exactly zero.
inline Vec3 in_plane_direction(double angle_deg) {
    const double a = angle_deg * M_PI / 180.0;
    return {std::cos(a), std::sin(a), 0.0};
}

inline FieldSpec make_field(double magnitude_mT, const Vec3& dir) {
    const double n = dir.norm();
    if (!(n > 0.0) || !std::isfinite(n))
        throw std::invalid_argument("field direction must be a nonzero finite vector");
    return {magnitude_mT, dir / n};
}

inline FieldSpec in_plane_field(double magnitude_mT, double angle_deg) {
    return {magnitude_mT, in_plane_direction(angle_deg)};
}

// Angle between two nonzero vectors, in [0, pi].  Uses atan2 of cross/dot,
// which is far better conditioned near 0 and pi than acos of the dot product.
inline double angle_between(const Vec3& a, const Vec3& b) {
    const double cross = a.cross(b).norm();
    const double dot = a.dot(b);
    return std::atan2(cross, dot);
}

} // namespace shf
