#ifndef HELICO_REDUCTION_HPP
#define HELICO_REDUCTION_HPP

// Reduced energy of the peak configuration: direct quadrature of the ansatz
// energy, its leading asymptotic form, the derivative-free optimizer over the
// admissible balls, and the radial helical landscape.

#include <cmath>
#include <stdexcept>
#include <vector>

#include "ansatz.hpp"
#include "problem.hpp"

namespace helico {

namespace detail {

// Gauss-Legendre nodes/weights on [-1,1] by Newton iteration
inline void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
    x.assign(n, 0.0);
    w.assign(n, 0.0);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double t = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        for (int it = 0; it < 100; ++it) {
            double p0 = 1, p1 = t;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            double dp = n * (t * p1 - p0) / (t * t - 1);
            double dt = p1 / dp;
            t -= dt;
            if (std::abs(dt) < 1e-15) break;
        }
        double p0 = 1, p1 = t;
        for (int k = 2; k <= n; ++k) {
            double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        double dp = n * (t * p1 - p0) / (t * t - 1);
        x[i] = -t;
        x[n - 1 - i] = t;
        w[i] = w[n - 1 - i] = 2 / ((1 - t * t) * dp * dp);
    }
}

// distance from y0 along direction e to the ellipse T(circle of radius R_star)
inline double ray_to_image_boundary(const Mat2& T_inv, Vec2 y0, Vec2 e, double R_star) {
    Vec2 a = T_inv.apply(y0), b = T_inv.apply(e);
    double A = b.norm2(), B = 2 * a.dot(b), C = a.norm2() - R_star * R_star;
    double disc = B * B - 4 * A * C;
    if (disc < 0) throw std::runtime_error("ray misses domain boundary");
    return (-B + std::sqrt(disc)) / (2 * A);
}

} // namespace detail

struct Landscape {
    std::vector<Vec2> seeds;
    bool minimize = true;
    double rho_bar = 0;
    std::vector<double> values; // q^2 sqrt(det K) at the seeds
};

inline Landscape landscape_from(const Problem& prob) {
    Landscape L;
    L.seeds = prob.seeds;
    L.minimize = prob.minimize;
    L.rho_bar = admissible_radius(prob);
    for (auto& z : prob.seeds) {
        double qz = prob.q(z);
        L.values.push_back(qz * qz * std::sqrt(prob.K(z).det()));
    }
    return L;
}

// I_delta(V) by an exact splitting: each projected cell solves the
// frozen-coefficient equation, so the gradient term reduces to core integrals
// plus a coefficient-variation correction,
//   I = sum_j (1/2) int (v_cell,j - qhat_j)_+^p V
//     + (delta^2/2) sum_j int ((K(x) - K(z_j)) grad PV_j | grad V)
//     - 1/(p+1) int (V - q)_+^{p+1}.
// All pieces are integrated in peak-attached polar coordinates so the value
// varies smoothly with Z (no fixed-grid quadrature noise for the optimizer).
inline double reduced_energy_direct(const Ansatz& an, int nrad = 24, int nang = 64) {
    const Problem& prob = *an.prob;
    std::vector<double> gx, gw;
    detail::gauss_legendre(nrad, gx, gw);
    int m = int(an.cells.size());
    double total = 0;
    for (int j = 0; j < m; ++j) {
        const Cell& c = an.cells[j];
        double sdet = std::sqrt(prob.K(c.z).det());
        double amp = an.amplitude(j);
        Mat2 Kj = prob.K(c.z);
        Vec2 y0 = c.F.T.apply(c.z);
        for (int ia = 0; ia < nang; ++ia) {
            double th = 2 * M_PI * (ia + 0.5) / nang;
            Vec2 e{std::cos(th), std::sin(th)};
            double rmax = detail::ray_to_image_boundary(c.F.T_inv, y0, e, prob.R_star);
            // radial panels split at the core edge (integrand kinks there)
            double cut = std::min(c.s, rmax), cut3 = std::min(3 * c.s, rmax);
            auto xat = [&](double rho) { return c.z + c.F.T_inv.apply(e * rho); };
            for (int ir = 0; ir < nrad; ++ir) {
                // core: nonlinear source times the full ansatz
                double rho = cut / 2 * (gx[ir] + 1), wq = cut / 2 * gw[ir] * (2 * M_PI / nang);
                Vec2 x = xat(rho);
                double src = std::pow(amp * an.prof->phi(rho / c.s), an.p);
                total += 0.5 * sdet * wq * rho * src * an.v_sum(x);
                // potential term over the slightly inflated core
                double rho3 = cut3 / 2 * (gx[ir] + 1), wq3 = cut3 / 2 * gw[ir] * (2 * M_PI / nang);
                Vec2 x3 = xat(rho3);
                double vq = an.v_sum(x3) - prob.q(x3);
                if (vq > 0)
                    total -= sdet * wq3 * rho3 * std::pow(vq, an.p + 1) / (an.p + 1);
                // coefficient-variation correction over the whole domain
                for (int seg = 0; seg < 2; ++seg) {
                    double lo = seg ? cut : 0, hi = seg ? rmax : cut;
                    if (hi <= lo) continue;
                    double r2 = (hi - lo) / 2 * (gx[ir] + 1) + lo;
                    double w2 = (hi - lo) / 2 * gw[ir] * (2 * M_PI / nang);
                    Vec2 x2 = xat(r2);
                    Mat2 dK = prob.K(x2);
                    dK.a11 -= Kj.a11;
                    dK.a12 -= Kj.a12;
                    dK.a21 -= Kj.a21;
                    dK.a22 -= Kj.a22;
                    Vec2 gj = an.grad_project_PV(j, x2), gv{0, 0};
                    for (int l = 0; l < m; ++l) gv = gv + an.grad_project_PV(l, x2);
                    total += 0.5 * an.delta * an.delta * sdet * w2 * r2 * dK.apply(gj).dot(gv);
                }
            }
        }
    }
    return total;
}

inline double reduced_energy_direct(const Problem& prob, const RadialProfile& prof,
                                    const std::vector<Vec2>& Z, double eps,
                                    int nrad = 24, int nang = 64) {
    return reduced_energy_direct(assemble_ansatz(prob, prof, Z, eps), nrad, nang);
}

// leading term: sum_j pi delta^2 / ln(R/eps) * q(z_j)^2 sqrt(det K(z_j))
inline double reduced_energy_asymptotic(const Problem& prob, const std::vector<Vec2>& Z,
                                        double eps) {
    double delta = delta_from_eps(eps, prob.p);
    double R = enclosing_R(prob);
    double s = 0;
    for (auto& z : Z) {
        double qz = prob.q(z);
        s += qz * qz * std::sqrt(prob.K(z).det());
    }
    return M_PI * delta * delta / std::log(R / eps) * s;
}

// coordinate pattern search confined to the admissible balls; when the orbit
// constraint is on (multi-peak helical case), only the first peak moves and
// the others follow its polygonal orbit
inline std::vector<Vec2> optimize_Z(const Problem& prob, const RadialProfile& prof,
                                    const Landscape& land, double eps,
                                    bool orbit_constraint = true,
                                    int nrad = 24, int nang = 64) {
    int m = int(land.seeds.size());
    bool orbit = orbit_constraint && m >= 2;
    int dof = orbit || m == 1 ? 2 : 2 * m; // free coordinates of the search
    auto to_Z = [&](const std::vector<double>& par) {
        std::vector<Vec2> Z(m);
        if (orbit || m == 1) {
            Vec2 z0{par[0], par[1]};
            for (int i = 0; i < m; ++i) {
                double a = 2 * M_PI * i / m, cs = std::cos(a), sn = std::sin(a);
                Z[i] = {cs * z0.x - sn * z0.y, sn * z0.x + cs * z0.y};
            }
        } else {
            for (int i = 0; i < m; ++i) Z[i] = {par[2 * i], par[2 * i + 1]};
        }
        return Z;
    };
    auto admissible = [&](const std::vector<Vec2>& Z) {
        for (int i = 0; i < m; ++i)
            if ((Z[i] - land.seeds[i]).norm() > land.rho_bar) return false;
        return true;
    };
    std::vector<double> par(dof);
    for (int i = 0; i < dof / 2; ++i) {
        par[2 * i] = land.seeds[i].x;
        par[2 * i + 1] = land.seeds[i].y;
    }
    auto eval = [&](const std::vector<Vec2>& Z) {
        double E = reduced_energy_direct(prob, prof, Z, eps, nrad, nang);
        return land.minimize ? E : -E;
    };
    double best = eval(to_Z(par));
    double step = land.rho_bar / 4, tol = land.rho_bar * 1e-4;
    while (step > tol) {
        bool improved = false;
        for (int d = 0; d < 2 * dof && !improved; ++d) {
            std::vector<double> cand = par;
            cand[d / 2] += (d % 2 ? -step : step);
            std::vector<Vec2> Z = to_Z(cand);
            if (!admissible(Z)) continue;
            double E = eval(Z);
            if (E < best) {
                best = E;
                par = cand;
                improved = true;
            }
        }
        if (!improved) step /= 2;
    }
    std::vector<Vec2> out = to_Z(par);
    for (int i = 0; i < m; ++i)
        if ((out[i] - land.seeds[i]).norm() >= land.rho_bar - 2 * tol)
            throw std::runtime_error("extremum escaped admissible set");
    return out;
}

// q^2 sqrt(det K_H) along a radius: (alpha r^2/2 + beta)^2 k / sqrt(k^2 + r^2)
inline double radial_landscape(double r, const HelixSpec& spec, double alpha, double beta) {
    double q = alpha * r * r / 2 + beta;
    return q * q * spec.k / std::sqrt(spec.k * spec.k + r * r);
}

// interior extremum of the radial landscape: bracket a sign change of the
// analytic derivative, then bisect
inline double radial_extremum(const HelixSpec& spec, double alpha, double beta) {
    auto dh = [&](double r) {
        double q = alpha * r * r / 2 + beta;
        return radial_landscape(r, spec, alpha, beta) *
               (2 * alpha * r / q - r / (spec.k * spec.k + r * r));
    };
    int n = 4096;
    double lo = 0, hi = 0;
    for (int i = 1; i < n; ++i) {
        double a = spec.R_star * i / n, b = spec.R_star * (i + 1) / n;
        if (dh(a) == 0) return a;
        if (dh(a) * dh(b) < 0) {
            lo = a;
            hi = b;
            break;
        }
    }
    if (hi == 0) throw std::runtime_error("no interior extremum");
    for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
        double mid = (lo + hi) / 2;
        (dh(lo) * dh(mid) <= 0 ? hi : lo) = mid;
    }
    return (lo + hi) / 2;
}

} // namespace helico

#endif
