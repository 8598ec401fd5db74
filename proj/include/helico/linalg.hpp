#ifndef HELICO_LINALG_HPP
#define HELICO_LINALG_HPP

#include <cmath>
#include <stdexcept>

namespace helico {

struct Vec2 {
    double x = 0, y = 0;
    Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double a) const { return {a * x, a * y}; }
    double dot(Vec2 o) const { return x * o.x + y * o.y; }
    double norm2() const { return x * x + y * y; }
    double norm() const { return std::sqrt(norm2()); }
};

struct Vec3 {
    double x = 0, y = 0, z = 0;
    Vec3 operator+(Vec3 o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(Vec3 o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double a) const { return {a * x, a * y, a * z}; }
    double dot(Vec3 o) const { return x * o.x + y * o.y + z * o.z; }
    Vec3 cross(Vec3 o) const {
        return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
    }
    double norm() const { return std::sqrt(dot(*this)); }
};

// 2x2 matrix, row major.
struct Mat2 {
    double a11 = 0, a12 = 0, a21 = 0, a22 = 0;
    Vec2 apply(Vec2 v) const { return {a11 * v.x + a12 * v.y, a21 * v.x + a22 * v.y}; }
    Mat2 mul(const Mat2& o) const {
        return {a11 * o.a11 + a12 * o.a21, a11 * o.a12 + a12 * o.a22,
                a21 * o.a11 + a22 * o.a21, a21 * o.a12 + a22 * o.a22};
    }
    Mat2 transpose() const { return {a11, a21, a12, a22}; }
    double det() const { return a11 * a22 - a12 * a21; }
    Mat2 inverse() const {
        double d = det();
        if (d == 0.0) throw std::runtime_error("singular 2x2 matrix");
        return {a22 / d, -a12 / d, -a21 / d, a11 / d};
    }
    // operator norm (largest singular value)
    double opnorm() const {
        Mat2 m = transpose().mul(*this);
        double tr = m.a11 + m.a22, dt = m.det();
        double disc = std::sqrt(std::max(0.0, tr * tr / 4 - dt));
        return std::sqrt(tr / 2 + disc);
    }
    static Mat2 identity() { return {1, 0, 0, 1}; }
};

// eigenvalues of a symmetric 2x2, ascending
inline void sym_eigenvalues(const Mat2& m, double& lo, double& hi) {
    double tr = m.a11 + m.a22;
    double disc = std::sqrt(std::max(0.0, (m.a11 - m.a22) * (m.a11 - m.a22) / 4 + m.a12 * m.a21));
    lo = tr / 2 - disc;
    hi = tr / 2 + disc;
}

} // namespace helico

#endif
