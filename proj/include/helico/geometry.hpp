#ifndef HELICO_GEOMETRY_HPP
#define HELICO_GEOMETRY_HPP

// Helical kinematics: the anisotropic coefficient matrix of the planar
// reduction, its factorization, the filament curve, and the point-vortex
// center it projects to.

#include <stdexcept>
#include <vector>

#include "linalg.hpp"

namespace helico {

struct HelixSpec {
    double k = 1.0;      // pitch parameter
    double r_star = 0.5; // filament radius
    double c = 1.0;      // circulation
    double R_star = 1.0; // pipe cross-section radius
    int m = 1;           // number of helices

    void validate() const {
        if (!(k > 0 && c > 0 && m >= 1 && r_star > 0 && r_star < R_star))
            throw std::runtime_error("invalid helix parameters");
    }
};

// Clockwise rotation for positive angle: [[cos, sin], [-sin, cos]].
inline Mat2 rot_bar(double th) {
    double c = std::cos(th), s = std::sin(th);
    return {c, s, -s, c};
}

// Block rotation acting on 3-vectors: rot_bar on the plane, identity on z.
inline Vec3 qbar_apply(double th, Vec3 v) {
    Vec2 p = rot_bar(th).apply({v.x, v.y});
    return {p.x, p.y, v.z};
}

// Screw motion: rotate by rho in the plane, translate by k*rho vertically.
inline Vec3 screw_motion(double rho, double k, Vec3 x) {
    Vec3 r = qbar_apply(rho, x);
    r.z += k * rho;
    return r;
}

inline Mat2 kh_matrix(Vec2 x, double k) {
    if (!(k > 0)) throw std::runtime_error("pitch k must be positive");
    double d = k * k + x.norm2();
    return {(k * k + x.y * x.y) / d, -x.x * x.y / d,
            -x.x * x.y / d, (k * k + x.x * x.x) / d};
}

struct CholeskyFactor {
    Mat2 T, T_inv;
};

// Lower-triangular factor of a general SPD matrix: T_inv * T_inv^t = K.
inline CholeskyFactor cholesky_T(const Mat2& K) {
    if (std::abs(K.a12 - K.a21) > 1e-12 * (std::abs(K.a12) + 1))
        throw std::runtime_error("matrix not positive definite");
    double l11sq = K.a11;
    if (l11sq <= 0) throw std::runtime_error("matrix not positive definite");
    double l11 = std::sqrt(l11sq);
    double l21 = K.a21 / l11;
    double l22sq = K.a22 - l21 * l21;
    if (l22sq <= 0) throw std::runtime_error("matrix not positive definite");
    double l22 = std::sqrt(l22sq);
    CholeskyFactor f;
    f.T_inv = {l11, 0, l21, l22};
    f.T = f.T_inv.inverse();
    return f;
}

// The closed-form factor for K_H: rotation by the polar angle of x composed
// with a diagonal stretch, T_inv = Rot(theta) * diag(k/sqrt(k^2+|x|^2), 1).
inline CholeskyFactor helical_T(Vec2 x, double k) {
    double th = (x.x == 0 && x.y == 0) ? 0.0 : std::atan2(x.y, x.x);
    double c = std::cos(th), s = std::sin(th);
    double d = k / std::sqrt(k * k + x.norm2());
    CholeskyFactor f;
    f.T_inv = {c * d, -s, s * d, c}; // Rot(theta) * diag(d, 1)
    f.T = {c / d, s / d, -s, c};     // diag(1/d, 1) * Rot(-theta)
    return f;
}

namespace detail {
inline void helix_coeffs(const HelixSpec& sp, double& a1, double& b1, double& rt) {
    double den = sp.k * sp.k + sp.r_star * sp.r_star;
    a1 = sp.c * sp.k / (4 * M_PI * den);
    b1 = sp.c * sp.r_star * sp.r_star / (4 * M_PI * den);
    rt = std::sqrt(den);
}
} // namespace detail

// Arclength-parameterized helix evolving by the binormal flow.
inline Vec3 helix_curve(double s, double tau, const HelixSpec& sp) {
    sp.validate();
    double a1, b1, rt;
    detail::helix_coeffs(sp, a1, b1, rt);
    double th = (-s - a1 * tau) / rt;
    return {sp.r_star * std::cos(th), sp.r_star * std::sin(th),
            (sp.k * s - b1 * tau) / rt};
}

namespace detail {
inline Vec3 helix_dtau(double s, double tau, const HelixSpec& sp) {
    double a1, b1, rt;
    helix_coeffs(sp, a1, b1, rt);
    double th = (-s - a1 * tau) / rt;
    double thd = -a1 / rt;
    return {-sp.r_star * std::sin(th) * thd, sp.r_star * std::cos(th) * thd, -b1 / rt};
}
inline Vec3 helix_ds(double s, double tau, const HelixSpec& sp) {
    double a1, b1, rt;
    helix_coeffs(sp, a1, b1, rt);
    double th = (-s - a1 * tau) / rt;
    return {sp.r_star * std::sin(th) / rt, -sp.r_star * std::cos(th) / rt, sp.k / rt};
}
inline Vec3 helix_dss(double s, double tau, const HelixSpec& sp) {
    double a1, b1, rt;
    helix_coeffs(sp, a1, b1, rt);
    double th = (-s - a1 * tau) / rt;
    double B = sp.r_star / (rt * rt);
    return {-B * std::cos(th), -B * std::sin(th), 0};
}
} // namespace detail

// |d_tau gamma - (c/4pi) (d_s gamma x d_ss gamma)|.  Analytic derivatives by
// default; otherwise 4th-order central differences with step 1e-4*max(1,r_*).
inline double binormal_residual(double s, double tau, const HelixSpec& sp,
                                bool analytic = true) {
    Vec3 dt, ds, dss;
    if (analytic) {
        dt = detail::helix_dtau(s, tau, sp);
        ds = detail::helix_ds(s, tau, sp);
        dss = detail::helix_dss(s, tau, sp);
    } else {
        double h = 1e-4 * std::max(1.0, sp.r_star);
        auto g = [&](double ss, double tt) { return helix_curve(ss, tt, sp); };
        auto d4 = [&](auto f) {
            return (f(-2) * 1.0 + f(-1) * -8.0 + f(1) * 8.0 + f(2) * -1.0) * (1.0 / (12 * h));
        };
        dt = d4([&](int i) { return g(s, tau + i * h); });
        ds = d4([&](int i) { return g(s + i * h, tau); });
        dss = (g(s - 2 * h, tau) * -1.0 + g(s - h, tau) * 16.0 + g(s, tau) * -30.0 +
               g(s + h, tau) * 16.0 + g(s + 2 * h, tau) * -1.0) * (1.0 / (12 * h * h));
    }
    Vec3 rhs = ds.cross(dss) * (sp.c / (4 * M_PI));
    return (dt - rhs).norm();
}

// Cross-section seeds of the m-helix configuration: rotations of (r_*, 0).
inline std::vector<Vec2> polygonal_centers(const HelixSpec& sp) {
    sp.validate();
    std::vector<Vec2> zs;
    for (int i = 0; i < sp.m; ++i)
        zs.push_back(rot_bar(2 * M_PI * i / sp.m).apply({sp.r_star, 0}));
    return zs;
}

// Angular rate of the planar point-vortex center.
inline double alpha_rate(const HelixSpec& sp) {
    return sp.c / (4 * M_PI * sp.k * std::sqrt(sp.k * sp.k + sp.r_star * sp.r_star));
}

inline Vec2 point_vortex_center(double tau, const HelixSpec& sp) {
    sp.validate();
    return rot_bar(alpha_rate(sp) * tau).apply({sp.r_star, 0});
}

// Tangent field of the screw symmetry.
inline Vec3 zeta_field(Vec3 x, double k) { return {x.y, -x.x, k}; }

} // namespace helico

#endif
