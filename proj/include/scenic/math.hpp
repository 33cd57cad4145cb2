#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace scenic {

constexpr double kPi = 3.14159265358979323846;
constexpr double kGravity = 9.81;

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    Vec3() = default;
    Vec3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}

    Vec3 operator+(const Vec3& v) const { return {x + v.x, y + v.y, z + v.z}; }
    Vec3 operator-(const Vec3& v) const { return {x - v.x, y - v.y, z - v.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
    Vec3& operator+=(const Vec3& v) { x += v.x; y += v.y; z += v.z; return *this; }
    Vec3& operator-=(const Vec3& v) { x -= v.x; y -= v.y; z -= v.z; return *this; }
    Vec3 operator-() const { return {-x, -y, -z}; }

    double dot(const Vec3& v) const { return x * v.x + y * v.y + z * v.z; }
    Vec3 cross(const Vec3& v) const {
        return {y * v.z - z * v.y, z * v.x - x * v.z, x * v.y - y * v.x};
    }
    double norm() const { return std::sqrt(x * x + y * y + z * z); }
    double squared_norm() const { return x * x + y * y + z * z; }
    Vec3 normalized() const {
        const double n = norm();
        if (n < 1e-12) throw std::domain_error("Vec3::normalized: zero-length vector");
        return *this / n;
    }
    bool finite() const {
        return std::isfinite(x) && std::isfinite(y) && std::isfinite(z);
    }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }

// Unit quaternion (w, x, y, z). Rotations are body-to-world.
struct Quat {
    double w = 1.0, x = 0.0, y = 0.0, z = 0.0;

    Quat() = default;
    Quat(double w_, double x_, double y_, double z_) : w(w_), x(x_), y(y_), z(z_) {}

    static Quat identity() { return {1.0, 0.0, 0.0, 0.0}; }

    static Quat from_axis_angle(const Vec3& axis, double angle) {
        const double n = axis.norm();
        if (n < 1e-12) return identity();
        const double h = 0.5 * angle;
        const double s = std::sin(h) / n;
        return {std::cos(h), axis.x * s, axis.y * s, axis.z * s};
    }

    double norm() const { return std::sqrt(w * w + x * x + y * y + z * z); }

    Quat normalized() const {
        const double n = norm();
        if (n < 1e-12) throw std::domain_error("Quat::normalized: zero-length quaternion");
        return {w / n, x / n, y / n, z / n};
    }

    Quat conjugate() const { return {w, -x, -y, -z}; }

    Quat operator*(const Quat& q) const {
        return {w * q.w - x * q.x - y * q.y - z * q.z,
                w * q.x + x * q.w + y * q.z - z * q.y,
                w * q.y - x * q.z + y * q.w + z * q.x,
                w * q.z + x * q.y - y * q.x + z * q.w};
    }

    double dot(const Quat& q) const { return w * q.w + x * q.x + y * q.y + z * q.z; }

    Vec3 rotate(const Vec3& v) const {
        // q v q*; expanded form avoids building the intermediate quaternion.
        const Vec3 u{x, y, z};
        const Vec3 t = 2.0 * u.cross(v);
        return v + w * t + u.cross(t);
    }

    Vec3 rotate_back(const Vec3& v) const { return conjugate().rotate(v); }

    Vec3 body_x() const { return rotate({1.0, 0.0, 0.0}); }
    Vec3 body_z() const { return rotate({0.0, 0.0, 1.0}); }

    bool finite() const {
        return std::isfinite(w) && std::isfinite(x) && std::isfinite(y) && std::isfinite(z);
    }
};

// Geodesic angle between the rotations represented by q1, q2, in [0, pi].
// Sign-invariant: q and -q describe the same rotation.
inline double quat_angle(const Quat& q1, const Quat& q2) {
    double d = std::fabs(q1.dot(q2));
    if (d > 1.0) d = 1.0;
    return 2.0 * std::acos(d);
}

using VecX = std::vector<double>;

inline double dot(const VecX& a, const VecX& b) {
    if (a.size() != b.size()) throw std::invalid_argument("dot: size mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double l2_norm(const VecX& a) { return std::sqrt(dot(a, a)); }

inline double l1_dist(const Vec3& a, const Vec3& b) {
    return std::fabs(a.x - b.x) + std::fabs(a.y - b.y) + std::fabs(a.z - b.z);
}

inline double clamp(double v, double lo, double hi) {
    return v < lo ? lo : (v > hi ? hi : v);
}

inline bool all_finite(const VecX& v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

// Cosine similarity in [-1, 1]. Zero-norm inputs are rejected: a zero
// embedding coming out of the encoder is a training fault, not a value.
inline double cosine_similarity(const VecX& a, const VecX& b) {
    const double na = l2_norm(a);
    const double nb = l2_norm(b);
    if (na <= 0.0 || nb <= 0.0)
        throw std::domain_error("cosine_similarity: zero-norm input");
    return clamp(dot(a, b) / (na * nb), -1.0, 1.0);
}

}  // namespace scenic
