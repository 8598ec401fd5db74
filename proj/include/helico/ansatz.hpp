#ifndef HELICO_ANSATZ_HPP
#define HELICO_ANSATZ_HPP

// The explicit multi-peak approximate solution V: per-cell core radii s_i,
// peak heights qhat_i from the m x m Robin-coupled linear system, the cell
// profile, and its projection to zero boundary data.

#include <Eigen/Dense>
#include <cstdio>
#include <fstream>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "greens.hpp"
#include "problem.hpp"
#include "profile.hpp"

namespace helico {

inline double delta_from_eps(double eps, double p) {
    if (!(eps < 1)) throw std::runtime_error("eps must be < 1");
    if (!(eps > 0 && p > 1)) throw std::runtime_error("need 0 < eps < 1 and p > 1");
    return eps * std::pow(-std::log(eps), -(p - 1) / 2);
}

// Core radius from the matching relation
//   (delta/s)^{2/(p-1)} phi'(1) = a / ln(s/R),
// by fixed-point iteration started at delta |ln delta|^{(p-1)/2}, then a
// secant polish down to residual 1e-12.
inline double solve_s_delta(double delta, double a, double R, double slope1, double p) {
    if (!(a > 0 && slope1 < 0 && delta > 0 && delta < 1))
        throw std::runtime_error("invalid core-radius inputs");
    double e = (p - 1) / 2;
    double s = delta * std::pow(std::abs(std::log(delta)), e);
    bool settled = false;
    for (int it = 0; it < 200; ++it) {
        double sn = delta * std::pow(std::abs(slope1) * std::log(R / s) / a, e);
        if (!(sn > 0) || !(sn < R)) throw std::runtime_error("delta too large for unique core radius");
        if (std::abs(sn - s) < 1e-15 * s) { s = sn; settled = true; break; }
        s = sn;
    }
    if (!settled) throw std::runtime_error("delta too large for unique core radius");
    auto res = [&](double ss) {
        return std::pow(delta / ss, 2 / (p - 1)) * slope1 - a / std::log(ss / R);
    };
    double s2 = s * (1 + 1e-9), r1 = res(s), r2 = res(s2);
    for (int it = 0; it < 100 && std::abs(r2) > 1e-14 && r2 != r1; ++it) {
        double sn = s2 - r2 * (s2 - s) / (r2 - r1);
        s = s2; r1 = r2; s2 = sn; r2 = res(s2);
    }
    if (std::abs(res(s2)) > 1e-12) throw std::runtime_error("core-radius residual too large");
    return s2;
}

struct Cell {
    Vec2 z;                  // peak location (also the anchor)
    CholeskyFactor F;        // factor at the anchor
    double qhat = 0, s = 0;
    std::shared_ptr<DomainImage> dom;
    DomainImage::Density dens; // density of h(. , T z)
    double g_self = 0;         // g(T z, T z)
};

struct Ansatz {
    double eps = 0, delta = 0, p = 0, R = 0, rho_bar = 0;
    const Problem* prob = nullptr;
    const RadialProfile* prof = nullptr;
    std::vector<Cell> cells;

    double amplitude(int i) const { // (delta/s)^{2/(p-1)}
        return std::pow(delta / cells[i].s, 2 / (p - 1));
    }

    double v_cell(int i, Vec2 x) const {
        const Cell& c = cells[i];
        double rho = c.F.T.apply(x - c.z).norm();
        if (rho <= c.s) return c.qhat + amplitude(i) * prof->phi(rho / c.s);
        return c.qhat * std::log(rho / R) / std::log(c.s / R);
    }

    // g_z(T x, T z) via the cell's cached density
    double g_at(int i, Vec2 x) const {
        const Cell& c = cells[i];
        return 2 * M_PI * c.dom->eval(c.dens, c.F.T.apply(x)) + std::log(R);
    }

    double project_PV(int i, Vec2 x) const {
        const Cell& c = cells[i];
        return v_cell(i, x) - c.qhat / std::log(R / c.s) * g_at(i, x);
    }

    double v_sum(Vec2 x) const {
        double v = 0;
        for (int i = 0; i < int(cells.size()); ++i) v += project_PV(i, x);
        return v;
    }

    // analytic gradient of the projected cell (no grid differencing)
    Vec2 grad_project_PV(int i, Vec2 x) const {
        const Cell& c = cells[i];
        Vec2 u = c.F.T.apply(x - c.z);
        double rho = u.norm();
        Vec2 g;
        if (rho <= 1e-14) {
            g = {0, 0};
        } else if (rho <= c.s) {
            double d = amplitude(i) * dphi(rho / c.s) / c.s / rho;
            g = c.F.T.transpose().apply(u * d);
        } else {
            double d = c.qhat / std::log(c.s / R) / (rho * rho);
            g = c.F.T.transpose().apply(u * d);
        }
        Vec2 gg = c.dom->eval_grad(c.dens, c.F.T.apply(x));
        double coef = -c.qhat / std::log(R / c.s) * 2 * M_PI;
        return g + c.F.T.transpose().apply(gg) * coef;
    }

    double dphi(double r) const { // derivative of the profile interpolant
        int n = int(prof->samples.size());
        double h = prof->mesh_h();
        if (r >= 1) return prof->slope1;
        if (r < 0) r = 0;
        int i = std::min(std::max(int(r / h) - 1, 0), n - 4);
        double out = 0;
        for (int a = 0; a < 4; ++a) {
            double dsum = 0;
            for (int b = 0; b < 4; ++b) {
                if (b == a) continue;
                double term = 1.0 / ((a - b) * h);
                for (int cc = 0; cc < 4; ++cc)
                    if (cc != a && cc != b) term *= (r - (i + cc) * h) / ((a - cc) * h);
                dsum += term;
            }
            out += dsum * prof->samples[i + a];
        }
        return out;
    }
};

// Heights qhat from the m x m system coupling each cell to the others
// through the Robin function and Gbar, with L = ln(R/eps).
inline std::vector<double> solve_qhat(const std::vector<Vec2>& Z,
                                      const std::vector<double>& g_self,
                                      const std::vector<std::vector<double>>& gbar_cross,
                                      double L, const std::vector<double>& qvals) {
    int m = int(Z.size());
    Eigen::MatrixXd M(m, m);
    Eigen::VectorXd rhs(m);
    for (int i = 0; i < m; ++i) {
        rhs[i] = qvals[i];
        for (int j = 0; j < m; ++j)
            M(i, j) = (i == j) ? 1 - g_self[i] / L : gbar_cross[i][j] / L;
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
    if (!lu.isInvertible()) throw std::runtime_error("qhat system singular");
    Eigen::VectorXd sol = lu.solve(rhs);
    return {sol.data(), sol.data() + m};
}

inline Ansatz assemble_ansatz(const Problem& prob, const RadialProfile& prof,
                              const std::vector<Vec2>& Z, double eps,
                              int boundary_nodes = 384) {
    if (Z.size() != prob.seeds.size()) throw std::runtime_error("Z size mismatch");
    Ansatz an;
    an.prob = &prob;
    an.prof = &prof;
    an.eps = eps;
    an.p = prob.p;
    an.delta = delta_from_eps(eps, prob.p);
    an.R = enclosing_R(prob);
    an.rho_bar = admissible_radius(prob);
    int m = int(Z.size());
    for (int i = 0; i < m; ++i)
        if ((Z[i] - prob.seeds[i]).norm() > an.rho_bar * (1 + 1e-12))
            throw std::runtime_error("peak location outside admissible ball");
    for (int i = 0; i < m; ++i) {
        Cell c;
        c.z = Z[i];
        c.F = prob.factor(Z[i]);
        c.dom = std::make_shared<DomainImage>(c.F.T, prob.R_star, an.R, boundary_nodes);
        c.dens = c.dom->solve_density(c.F.T.apply(c.z));
        c.g_self = 2 * M_PI * c.dom->eval(c.dens, c.F.T.apply(c.z)) + std::log(an.R);
        an.cells.push_back(std::move(c));
    }
    double L = std::log(an.R / eps);
    std::vector<double> gs(m), qv(m);
    std::vector<std::vector<double>> gb(m, std::vector<double>(m, 0.0));
    for (int i = 0; i < m; ++i) {
        gs[i] = an.cells[i].g_self;
        qv[i] = prob.q(Z[i]);
        for (int j = 0; j < m; ++j) {
            if (j == i) continue;
            // Gbar in cell j's frame between the images of z_i and z_j
            const Cell& cj = an.cells[j];
            Vec2 xi = cj.F.T.apply(Z[i]), xj = cj.F.T.apply(Z[j]);
            double g = 2 * M_PI * cj.dom->eval(cj.dens, xi) + std::log(an.R);
            gb[i][j] = std::log(an.R / (xi - xj).norm()) - g;
        }
    }
    auto qh = solve_qhat(Z, gs, gb, L, qv);
    for (int i = 0; i < m; ++i) {
        an.cells[i].qhat = qh[i];
        if (!(qh[i] > 0)) throw std::runtime_error("nonpositive qhat");
        an.cells[i].s = solve_s_delta(an.delta, qh[i], an.R, prof.slope1, prob.p);
    }
    return an;
}

// structured-text dump of the assembled configuration, 17 significant digits
inline void dump_ansatz(const Ansatz& an, std::ostream& os) {
    char b[256];
    std::snprintf(b, sizeof b, "eps = %.17g\ndelta = %.17g\np = %.17g\nR = %.17g\nm = %d\n",
                  an.eps, an.delta, an.p, an.R, int(an.cells.size()));
    os << b;
    for (size_t i = 0; i < an.cells.size(); ++i) {
        const Cell& c = an.cells[i];
        std::snprintf(b, sizeof b, "z_%zu = %.17g %.17g\nqhat_%zu = %.17g\ns_%zu = %.17g\n",
                      i, c.z.x, c.z.y, i, c.qhat, i, c.s);
        os << b;
    }
}

} // namespace helico

#endif
