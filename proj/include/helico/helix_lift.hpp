#ifndef HELICO_HELIX_LIFT_HPP
#define HELICO_HELIX_LIFT_HPP

// Lift of the planar scalar solution to the 3D rotating helical flow:
// stream function, velocity components, 3D vorticity, the co-rotating
// vorticity density in time, and concentration diagnostics.

#include <cmath>
#include <stdexcept>
#include <vector>

#include "geometry.hpp"
#include "grid.hpp"
#include "solver.hpp"

namespace helico {

struct HelicalFlowSlice {
    ScalarField stream, v1, v2, v3, w;
    double alpha_rot = 0; // angular velocity alpha |ln eps|
    double eps = 0;
};

// (v1,v2) = -(1/(k^2+|x|^2)) [[x1 x2, -k^2-x1^2],[k^2+x2^2, -x1 x2]] grad psi,
// v3 = (x1 v2 - x2 v1)/k, gradients by centered differences
inline void velocity_from_stream(const ScalarField& psi, const DiscGrid& g, double k,
                                 ScalarField& v1, ScalarField& v2, ScalarField& v3) {
    size_t sz = size_t(g.n) * g.n;
    v1.assign(sz, 0.0);
    v2.assign(sz, 0.0);
    v3.assign(sz, 0.0);
    for (int j = 1; j < g.n - 1; ++j)
        for (int i = 1; i < g.n - 1; ++i) {
            size_t id = g.idx(i, j);
            if (!g.interior[id]) continue;
            double px = (psi[id + 1] - psi[id - 1]) / (2 * g.h);
            double py = (psi[id + g.n] - psi[id - g.n]) / (2 * g.h);
            Vec2 x = g.xy(i, j);
            double den = k * k + x.norm2();
            v1[id] = -(x.x * x.y * px - (k * k + x.x * x.x) * py) / den;
            v2[id] = -((k * k + x.y * x.y) * px - x.x * x.y * py) / den;
            v3[id] = (x.x * v2[id] - x.y * v1[id]) / k;
        }
}

// solve -div(K_H grad psi) = w with zero boundary trace (the delta = 1
// operator), by Jacobi-preconditioned conjugate gradient
inline ScalarField stream_from_w(const ScalarField& w, const DiscGrid& g,
                                 const std::function<Mat2(Vec2)>& K, double tol = 1e-12) {
    Operator op = assemble_operator(g, K, 1.0);
    size_t sz = w.size();
    ScalarField x(sz, 0.0), r = w, z(sz, 0.0), d, Ad(sz, 0.0);
    for (size_t id = 0; id < sz; ++id)
        if (!g.interior[id]) r[id] = 0;
    double c = 1.0 / (g.h * g.h);
    auto precond = [&](const ScalarField& in, ScalarField& out) {
        for (size_t id = 0; id < sz; ++id)
            out[id] = g.interior[id] ? in[id] / (c * op.diag[id]) : 0.0;
    };
    precond(r, z);
    d = z;
    double rz = detail::dot(r, z), b2 = detail::dot(r, r);
    if (b2 == 0) return x;
    for (int it = 0; it < 100000; ++it) {
        op.apply(d, Ad);
        double dAd = detail::dot(d, Ad);
        if (dAd <= 0) throw std::runtime_error("stream operator lost positivity");
        double a = rz / dAd;
        for (size_t id = 0; id < sz; ++id) {
            x[id] += a * d[id];
            r[id] -= a * Ad[id];
        }
        if (detail::dot(r, r) <= tol * tol * b2) return x;
        precond(r, z);
        double rz2 = detail::dot(r, z);
        double beta = rz2 / rz;
        rz = rz2;
        for (size_t id = 0; id < sz; ++id) d[id] = z[id] + beta * d[id];
    }
    throw std::runtime_error("stream solve did not converge");
}

inline HelicalFlowSlice build_slice(const ScalarField& w, const DiscGrid& g,
                                    const HelixSpec& spec, double eps) {
    HelicalFlowSlice s;
    s.w = w;
    s.eps = eps;
    s.alpha_rot = alpha_rate(spec) * std::abs(std::log(eps));
    auto K = [&spec](Vec2 x) { return kh_matrix(x, spec.k); };
    s.stream = stream_from_w(w, g, K);
    velocity_from_stream(s.stream, g, spec.k, s.v1, s.v2, s.v3);
    return s;
}

inline Vec3 vorticity_3d(double w, Vec3 x, double k) { return zeta_field(x, k) * (w / k); }

// co-rotating vorticity density: eps^{-2} (u(rot_{-alpha |ln eps| t} x)
// - q(x) ln(1/eps))_+^p with bicubic sampling of the solved u field
inline double rotating_vorticity(Vec2 xp, double t, const ScalarField& u, const DiscGrid& g,
                                 double eps, double alpha, double beta, double p) {
    double theta = -alpha * std::abs(std::log(eps)) * t;
    Vec2 y = rot_bar(theta).apply(xp);
    if (y.norm() >= g.R_star)
        throw std::runtime_error("rotated point outside grid");
    double q = alpha * xp.norm2() / 2 + beta;
    double val = bicubic(g, u, y) - q * std::log(1 / eps);
    return std::pow(std::max(val, 0.0), p) / (eps * eps);
}

struct ConcentrationRow {
    double tau = 0;
    Vec2 centroid{0, 0};
    Vec2 P{0, 0};
    double distance = 0;
    double weak[3] = {0, 0, 0};
};

// vorticity-weighted centroid of the x3 = 0 slice at rescaled time tau versus
// the point-vortex center, plus weak-form residuals for three test functions
inline std::vector<ConcentrationRow> concentration_metric(const ScalarField& w,
                                                          const DiscGrid& g,
                                                          const HelixSpec& spec, double eps,
                                                          const std::vector<double>& taus,
                                                          double p) {
    auto [alpha, beta] = alpha_beta_from(spec.c, spec.r_star, spec.k);
    double lne = std::abs(std::log(eps));
    // u field in the u = |ln eps| w scaling
    ScalarField u(w.size());
    for (size_t id = 0; id < w.size(); ++id) u[id] = lne * w[id];
    auto testf = [](int which, Vec2 x) {
        switch (which) {
            case 0: return 1.0;
            case 1: return std::exp(-x.norm2());
            default: return std::cos(x.x) * std::sin(x.y + 0.3);
        }
    };
    std::vector<ConcentrationRow> out;
    for (double tau : taus) {
        ConcentrationRow row;
        row.tau = tau;
        double t = tau / lne;
        double mass = 0;
        Vec2 cen{0, 0};
        double weak[3] = {0, 0, 0};
        double margin = g.R_star * 0.995;
        for (int j = 0; j < g.n; ++j)
            for (int i = 0; i < g.n; ++i) {
                Vec2 x = g.xy(i, j);
                if (x.norm() >= margin) continue;
                double we = rotating_vorticity(x, t, u, g, eps, alpha, beta, p);
                if (we == 0) continue;
                mass += we;
                cen = cen + x * we;
                for (int k3 = 0; k3 < 3; ++k3) weak[k3] += we * testf(k3, x);
            }
        if (mass <= 0) throw std::runtime_error("no vorticity mass at this time");
        row.centroid = cen * (1.0 / mass);
        row.P = point_vortex_center(tau, spec);
        row.distance = (row.centroid - row.P).norm();
        double h2 = g.h * g.h;
        double kappa = mass * h2;
        for (int k3 = 0; k3 < 3; ++k3)
            row.weak[k3] = std::abs(weak[k3] * h2 - kappa * testf(k3, row.P));
        out.push_back(row);
    }
    return out;
}

// helical extension v(x) = Qbar_{x3/k} v_planar(H_{-x3/k} x) with bicubic
// in-plane sampling of the three velocity components
inline Vec3 extend_velocity(const HelicalFlowSlice& s, const DiscGrid& g, double k, Vec3 x) {
    double rho = x.z / k;
    Vec3 base = screw_motion(-rho, k, x); // planar point with x3 = 0
    Vec2 xp{base.x, base.y};
    Vec3 v{bicubic(g, s.v1, xp), bicubic(g, s.v2, xp), bicubic(g, s.v3, xp)};
    return qbar_apply(rho, v);
}

inline void dump_trajectory(const std::vector<ConcentrationRow>& rows, std::ostream& os,
                            const std::string& header) {
    os << header << "tau,centroid_x,centroid_y,P_x,P_y,distance,weak1,weak2,weak3\n";
    char b[320];
    for (auto& r : rows) {
        std::snprintf(b, sizeof b, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                      r.tau, r.centroid.x, r.centroid.y, r.P.x, r.P.y, r.distance, r.weak[0],
                      r.weak[1], r.weak[2]);
        os << b;
    }
}

} // namespace helico

#endif
