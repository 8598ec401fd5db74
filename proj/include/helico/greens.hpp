#ifndef HELICO_GREENS_HPP
#define HELICO_GREENS_HPP

// Regular part h of the Green's function on linear images of the disc,
// the Robin-type function g = 2 pi h + ln R, and Gbar = ln(R/|x-y|) - g.
// h solves a Dirichlet harmonic-extension problem; we represent it as a
// single-layer potential on the image ellipse with an additive constant
// (rank-one completion keeps the first-kind system invertible even when
// the curve has logarithmic capacity one, e.g. the unit disc itself),
// discretized by trapezoidal-node Nystrom with log-kernel weights.

#include <Eigen/Dense>
#include <memory>
#include <stdexcept>
#include <vector>

#include "geometry.hpp"
#include "linalg.hpp"

namespace helico {

// Closed-form regular part on a disc of radius a (method of images);
// used as the validation oracle for the boundary-integral solve.
inline double disc_regular_part(Vec2 x, Vec2 y, double a) {
    if (x.norm() >= a || y.norm() >= a) throw std::runtime_error("point outside domain");
    double ry = y.norm();
    if (ry == 0) return -std::log(a) / (2 * M_PI);
    Vec2 img = y * (a * a / (ry * ry));
    return std::log(a / (ry * (x - img).norm())) / (2 * M_PI);
}

struct DomainImage {
    Mat2 T;              // factor at the anchor
    double R_star = 1;   // disc radius in the original plane
    double R = 0;        // enclosing radius, T(Omega) inside B_R
    int N = 384;         // boundary nodes (even)

    std::vector<Vec2> bx, bdx; // ellipse nodes and tangents at t_j = 2 pi j / N
    double panel = 0;          // max node spacing
    Eigen::MatrixXd A;         // augmented Nystrom matrix
    Eigen::PartialPivLU<Eigen::MatrixXd> lu;

    DomainImage(const Mat2& T_, double R_star_, double R_, int N_ = 384)
        : T(T_), R_star(R_star_), R(R_), N(N_) {
        if (N < 128 || N % 2) throw std::runtime_error("need an even node count >= 128");
        if (std::abs(T.det()) < 1e-14) throw std::runtime_error("ill-conditioned boundary");
        bx.resize(N);
        bdx.resize(N);
        for (int j = 0; j < N; ++j) {
            double t = 2 * M_PI * j / N;
            bx[j] = T.apply({R_star * std::cos(t), R_star * std::sin(t)});
            bdx[j] = T.apply({-R_star * std::sin(t), R_star * std::cos(t)});
        }
        for (int j = 0; j < N; ++j)
            panel = std::max(panel, (bx[(j + 1) % N] - bx[j]).norm());
        build_system();
    }

    // density for boundary data f_i, plus the completion constant
    struct Density {
        std::vector<double> sigma;
        double C = 0;
    };

    Density solve_data(const std::vector<double>& f) const {
        Eigen::VectorXd rhs(N + 1);
        for (int i = 0; i < N; ++i) rhs[i] = f[i];
        rhs[N] = 0;
        Eigen::VectorXd sol = lu.solve(rhs);
        Density d;
        d.sigma.assign(sol.data(), sol.data() + N);
        d.C = sol[N];
        return d;
    }

    // density representing h(. , y): boundary data (1/2pi) ln(1/|x - y|)
    Density solve_density(Vec2 y) const {
        std::vector<double> f(N);
        for (int i = 0; i < N; ++i)
            f[i] = -std::log((bx[i] - y).norm()) / (2 * M_PI);
        return solve_data(f);
    }

    // single-layer potential at an interior point (plain trapezoid)
    double eval(const Density& d, Vec2 x) const {
        double s = 0, w = 2 * M_PI / N;
        for (int j = 0; j < N; ++j)
            s += d.sigma[j] * (-std::log((x - bx[j]).norm()) / (2 * M_PI)) * bdx[j].norm() * w;
        return s + d.C;
    }

    Vec2 eval_grad(const Density& d, Vec2 x) const {
        Vec2 g{0, 0};
        double w = 2 * M_PI / N;
        for (int j = 0; j < N; ++j) {
            Vec2 r = x - bx[j];
            double f = -d.sigma[j] * bdx[j].norm() * w / (2 * M_PI * r.norm2());
            g = g + r * f;
        }
        return g;
    }

    double dist_boundary(Vec2 x) const {
        double dmin = 1e300;
        for (int j = 0; j < N; ++j) { // polyline distance
            Vec2 a = bx[j], b = bx[(j + 1) % N], ab = b - a;
            double t = std::clamp((x - a).dot(ab) / ab.norm2(), 0.0, 1.0);
            dmin = std::min(dmin, (x - (a + ab * t)).norm());
        }
        return dmin;
    }

    void check_interior(Vec2 pt) const {
        Vec2 u = T.inverse().apply(pt);
        if (u.norm() >= R_star) throw std::runtime_error("point outside domain");
        if (dist_boundary(pt) < panel) throw std::runtime_error("too close to boundary");
    }

    // regular part of the Green's function of the image domain
    double regular_part_h(Vec2 x, Vec2 y) const {
        check_interior(x);
        check_interior(y);
        return eval(solve_density(y), x);
    }

    // boundary value of h at a point on the ellipse (exact Dirichlet data)
    static double boundary_h(Vec2 xb, Vec2 y) {
        return -std::log((xb - y).norm()) / (2 * M_PI);
    }

    // single-layer value at collocation node i via the singular quadrature row
    double eval_at_node(const Density& d, int i) const {
        double s = 0;
        for (int j = 0; j < N; ++j) s += A(i, j) * d.sigma[j];
        return s + d.C;
    }

  private:
    void build_system() {
        // Kernel -(1/2pi) ln|x(t)-x(s)| |x'(s)| split into the periodic log
        // singularity ln(4 sin^2((t-s)/2))/2 (Kussmaul-Martensen weights) and
        // a smooth remainder handled by the trapezoidal rule.
        int half = N / 2;
        std::vector<double> Rw(N); // quadrature weights for the singular part
        for (int d = 0; d < N; ++d) {
            double td = 2 * M_PI * d / N, s = 0;
            for (int m = 1; m < half; ++m) s += std::cos(m * td) / m;
            Rw[d] = -(2 * M_PI / half) * s - (M_PI / (half * half)) * std::cos(half * td);
        }
        A.resize(N + 1, N + 1);
        double w = 2 * M_PI / N;
        for (int i = 0; i < N; ++i) {
            for (int j = 0; j < N; ++j) {
                double smooth;
                if (i == j) {
                    smooth = std::log(bdx[j].norm());
                } else {
                    double ts = M_PI * double(i - j) / half;
                    double sn = 2 * std::abs(std::sin(ts / 2));
                    smooth = std::log((bx[i] - bx[j]).norm() / sn);
                }
                A(i, j) = -(0.5 * Rw[std::abs(i - j)] + w * smooth) / (2 * M_PI) * bdx[j].norm();
            }
            A(i, N) = 1.0; // additive constant of the representation
        }
        for (int j = 0; j < N; ++j) A(N, j) = bdx[j].norm() * w; // zero total density
        A(N, N) = 0.0;
        lu.compute(A);
        double cond_proxy = lu.matrixLU().diagonal().cwiseAbs().maxCoeff() /
                            std::max(lu.matrixLU().diagonal().cwiseAbs().minCoeff(), 1e-300);
        if (cond_proxy > 1e14) throw std::runtime_error("ill-conditioned boundary");
    }
};

inline double robin_g(const DomainImage& dom, Vec2 x, Vec2 y) {
    return 2 * M_PI * dom.regular_part_h(x, y) + std::log(dom.R);
}

inline double gbar(const DomainImage& dom, Vec2 x, Vec2 y) {
    return std::log(dom.R / (x - y).norm()) - robin_g(dom, x, y);
}

} // namespace helico

#endif
