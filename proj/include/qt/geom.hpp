#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace qt {

using Vec4 = std::array<double, 4>;
using Vec5 = std::array<double, 5>;
using Mat4 = std::array<std::array<double, 4>, 4>;

inline double dot(const Vec4& a, const Vec4& b) {
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3];
}
inline double dot(const Vec5& a, const Vec5& b) {
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3] + a[4] * b[4];
}
inline double norm(const Vec4& a) { return std::sqrt(dot(a, a)); }
inline double norm(const Vec5& a) { return std::sqrt(dot(a, a)); }

inline Vec5 normalized(const Vec5& a) {
    double n = norm(a);
    if (n == 0.0) throw std::invalid_argument("cannot normalize zero vector");
    return {a[0] / n, a[1] / n, a[2] / n, a[3] / n, a[4] / n};
}

inline Mat4 identity4() {
    Mat4 m{};
    for (int i = 0; i < 4; ++i) m[i][i] = 1.0;
    return m;
}

inline Vec4 matvec(const Mat4& m, const Vec4& v) {
    Vec4 r{};
    for (int i = 0; i < 4; ++i)
        r[i] = m[i][0] * v[0] + m[i][1] * v[1] + m[i][2] * v[2] + m[i][3] * v[3];
    return r;
}

inline Mat4 matmul(const Mat4& a, const Mat4& b) {
    Mat4 r{};
    for (int i = 0; i < 4; ++i)
        for (int k = 0; k < 4; ++k)
            for (int j = 0; j < 4; ++j) r[i][j] += a[i][k] * b[k][j];
    return r;
}

inline Mat4 transpose(const Mat4& m) {
    Mat4 r;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) r[i][j] = m[j][i];
    return r;
}

// Counterclockwise rotation by angle in the (i,j) coordinate plane,
// 1-based axes in [1,4]: x_i' = cos*x_i - sin*x_j, x_j' = sin*x_i + cos*x_j.
inline Mat4 plane_rotation(int i, int j, double angle) {
    if (i < 1 || i > 4 || j < 1 || j > 4 || i == j)
        throw std::invalid_argument("rotation plane axes must be distinct and in [1,4]");
    Mat4 m = identity4();
    double c = std::cos(angle), s = std::sin(angle);
    m[i - 1][i - 1] = c;
    m[i - 1][j - 1] = -s;
    m[j - 1][i - 1] = s;
    m[j - 1][j - 1] = c;
    return m;
}

inline bool is_orthogonal(const Mat4& m, double tol = 1e-12) {
    Mat4 mt = transpose(m);
    Mat4 p = matmul(mt, m);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            if (std::abs(p[i][j] - (i == j ? 1.0 : 0.0)) > tol) return false;
    return true;
}

// Unit 5-vector on the closed upper hemisphere.
struct SpherePoint {
    Vec5 x;

    explicit SpherePoint(const Vec5& v) : x(v) {
        if (std::abs(norm(v) - 1.0) > 1e-12)
            throw std::invalid_argument("SpherePoint must be a unit vector, |x| = " +
                                        std::to_string(norm(v)));
        if (v[4] < -1e-12)
            throw std::invalid_argument("SpherePoint must have x5 >= 0, x5 = " +
                                        std::to_string(v[4]));
    }
    static SpherePoint project(const Vec5& v) {
        Vec5 u = normalized(v);
        if (u[4] < 0.0 && u[4] > -1e-9) u[4] = 0.0;  // equator roundoff
        return SpherePoint(u);
    }
    const double* data() const { return x.data(); }
};

// Unit 5-vector on the equator x5 = 0.
struct BoundaryPoint {
    Vec5 x;

    explicit BoundaryPoint(const Vec5& v) : x(v) {
        if (std::abs(norm(v) - 1.0) > 1e-12)
            throw std::invalid_argument("BoundaryPoint must be a unit vector");
        if (std::abs(v[4]) > 1e-12)
            throw std::invalid_argument("BoundaryPoint must have x5 = 0");
    }
    static BoundaryPoint of(const Vec4& y) {
        double n = norm(y);
        if (n == 0.0) throw std::invalid_argument("cannot place zero vector on S3");
        return BoundaryPoint({y[0] / n, y[1] / n, y[2] / n, y[3] / n, 0.0});
    }
    const double* data() const { return x.data(); }
    SpherePoint as_sphere_point() const { return SpherePoint(x); }
};

}  // namespace qt
