#ifndef HELICO_SOLVER_HPP
#define HELICO_SOLVER_HPP

// Finite-volume discretization of -delta^2 div(K grad w) on the masked disc,
// semismooth Newton for the plus-power nonlinearity, and the post-solve
// diagnostics: vortex components, circulations, energy.

#include <algorithm>
#include <cmath>
#include <functional>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

#include "ansatz.hpp"
#include "grid.hpp"
#include "linalg.hpp"

namespace helico {

// Symmetric stencil for the quadratic form sum_edges a (dw)^2 plus per-cell
// cross terms; (apply w) = delta^2/h^2 * (S w), which approximates
// -delta^2 div(K grad w) at interior nodes to 2nd order.
struct Operator {
    const DiscGrid* g = nullptr;
    double delta2 = 1;
    // couplings from each node to its E, N, NE, NW neighbours plus the diagonal
    std::vector<double> diag, E, Nn, NE, NW;

    void apply(const ScalarField& w, ScalarField& out) const {
        const DiscGrid& gr = *g;
        int n = gr.n;
        double c = delta2 / (gr.h * gr.h);
        out.assign(w.size(), 0.0);
        for (int j = 1; j < n - 1; ++j)
            for (int i = 1; i < n - 1; ++i) {
                size_t id = gr.idx(i, j);
                if (!gr.interior[id]) continue;
                double s = diag[id] * w[id];
                s += E[id] * w[id + 1] + E[id - 1] * w[id - 1];
                s += Nn[id] * w[id + n] + Nn[id - n] * w[id - n];
                s += NE[id] * w[id + n + 1] + NE[id - n - 1] * w[id - n - 1];
                s += NW[id] * w[id + n - 1] + NW[id - n + 1] * w[id - n + 1];
                out[id] = c * s;
            }
    }
};

inline Operator assemble_operator(const DiscGrid& g,
                                  const std::function<Mat2(Vec2)>& K, double delta) {
    Operator op;
    op.g = &g;
    op.delta2 = delta * delta;
    size_t sz = size_t(g.n) * g.n;
    op.diag.assign(sz, 0.0);
    op.E.assign(sz, 0.0);
    op.Nn.assign(sz, 0.0);
    op.NE.assign(sz, 0.0);
    op.NW.assign(sz, 0.0);
    int n = g.n;
    // two-point fluxes with face-midpoint coefficients
    for (int j = 0; j < n; ++j)
        for (int i = 0; i + 1 < n; ++i) {
            bool a = g.interior[g.idx(i, j)], b = g.interior[g.idx(i + 1, j)];
            if (!a && !b) continue;
            Vec2 mid = g.xy(i, j) + Vec2{g.h / 2, 0};
            double c = K(mid).a11;
            if (a) op.diag[g.idx(i, j)] += c;
            if (b) op.diag[g.idx(i + 1, j)] += c;
            if (a && b) op.E[g.idx(i, j)] = -c;
        }
    for (int j = 0; j + 1 < n; ++j)
        for (int i = 0; i < n; ++i) {
            bool a = g.interior[g.idx(i, j)], b = g.interior[g.idx(i, j + 1)];
            if (!a && !b) continue;
            Vec2 mid = g.xy(i, j) + Vec2{0, g.h / 2};
            double c = K(mid).a22;
            if (a) op.diag[g.idx(i, j)] += c;
            if (b) op.diag[g.idx(i, j + 1)] += c;
            if (a && b) op.Nn[g.idx(i, j)] = -c;
        }
    // cross-derivative terms per cell with cell-centre K12 and averaged
    // differences: the quadratic form (K12/2)[(w11-w00)^2 - (w10-w01)^2]
    for (int j = 0; j + 1 < n; ++j)
        for (int i = 0; i + 1 < n; ++i) {
            bool i00 = g.interior[g.idx(i, j)], i10 = g.interior[g.idx(i + 1, j)];
            bool i01 = g.interior[g.idx(i, j + 1)], i11 = g.interior[g.idx(i + 1, j + 1)];
            if (!i00 && !i10 && !i01 && !i11) continue;
            Vec2 c = g.xy(i, j) + Vec2{g.h / 2, g.h / 2};
            double t = K(c).a12 / 2;
            if (t == 0) continue;
            if (i00) op.diag[g.idx(i, j)] += t;
            if (i11) op.diag[g.idx(i + 1, j + 1)] += t;
            if (i10) op.diag[g.idx(i + 1, j)] -= t;
            if (i01) op.diag[g.idx(i, j + 1)] -= t;
            if (i00 && i11) op.NE[g.idx(i, j)] -= t;
            if (i10 && i01) op.NW[g.idx(i + 1, j)] += t;
        }
    return op;
}

struct VortexComponent {
    Vec2 center{0, 0};
    double diameter = 0;
    double kappa = 0;
    std::vector<size_t> nodes;
};

struct SolveReport {
    int iterations = 0;
    double residual = 0;
    double omega_inf = 0; // sup norm of w minus the seeding field
    std::vector<VortexComponent> components;
    double energy = 0;
};

struct NewtonError : std::runtime_error {
    ScalarField best;
    SolveReport report;
    NewtonError(const std::string& msg, ScalarField b, SolveReport r)
        : std::runtime_error(msg), best(std::move(b)), report(std::move(r)) {}
};

namespace detail {

inline double inf_norm(const ScalarField& v) {
    double m = 0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

inline double dot(const ScalarField& a, const ScalarField& b) {
    double s = 0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

// F(w) = (delta^2/h^2) S w - (w - q)_+^p on interior nodes
inline void nonlinear_residual(const Operator& op, const ScalarField& w,
                               const ScalarField& q, double p, ScalarField& F) {
    op.apply(w, F);
    const DiscGrid& g = *op.g;
    for (size_t id = 0; id < w.size(); ++id)
        if (g.interior[id]) F[id] -= std::pow(std::max(w[id] - q[id], 0.0), p);
}

// truncated preconditioned CG on the (possibly indefinite) Newton system;
// exits on negative curvature with the current iterate
// Jacobi-preconditioned MINRES for J d = rhs. The active-set Jacobian is
// symmetric but indefinite once a vortex core is present (the source slope
// overwhelms the tiny elliptic diagonal there), so plain CG breaks down;
// MINRES handles the indefiniteness with the same cost per sweep.
inline ScalarField newton_direction(const Operator& op, const ScalarField& diagJ,
                                    const ScalarField& rhs, double rel_tol) {
    const DiscGrid& g = *op.g;
    size_t sz = rhs.size();
    double cdiag = op.delta2 / (g.h * g.h);
    auto applyJ = [&](const ScalarField& in, ScalarField& out) {
        op.apply(in, out);
        for (size_t i = 0; i < sz; ++i)
            if (g.interior[i]) out[i] += (diagJ[i] - cdiag * op.diag[i]) * in[i];
    };
    auto precond = [&](const ScalarField& in, ScalarField& out) {
        for (size_t i = 0; i < sz; ++i)
            out[i] = g.interior[i] ? in[i] / std::max(std::abs(diagJ[i]), 1e-300) : 0.0;
    };
    ScalarField x(sz, 0.0), y(sz, 0.0), v(sz, 0.0), r1 = rhs, r2 = rhs;
    ScalarField wv(sz, 0.0), w2(sz, 0.0), t(sz, 0.0); // directions one and two steps back
    precond(r2, y);
    double beta1 = dot(rhs, y);
    if (beta1 <= 0) return x;
    beta1 = std::sqrt(beta1);
    double oldb = 0, beta = beta1, dbar = 0, epsln = 0, phibar = beta1, cs = -1, sn = 0;
    int max_it = int(sz) < 20000 ? 20000 : int(sz);
    for (int it = 1; it <= max_it; ++it) {
        double s = 1 / beta;
        for (size_t i = 0; i < sz; ++i) v[i] = s * y[i];
        applyJ(v, t);
        if (it >= 2)
            for (size_t i = 0; i < sz; ++i) t[i] -= (beta / oldb) * r1[i];
        double alfa = dot(v, t);
        for (size_t i = 0; i < sz; ++i) t[i] -= (alfa / beta) * r2[i];
        r1.swap(r2);
        r2.swap(t);
        precond(r2, y);
        oldb = beta;
        beta = std::sqrt(std::max(dot(r2, y), 0.0));
        double oldeps = epsln;
        double delta = cs * dbar + sn * alfa;
        double gbar = sn * dbar - cs * alfa;
        epsln = sn * beta;
        dbar = -cs * beta;
        double gamma = std::max(std::sqrt(gbar * gbar + beta * beta), 1e-300);
        cs = gbar / gamma;
        sn = beta / gamma;
        double phi = cs * phibar;
        phibar = sn * phibar;
        for (size_t i = 0; i < sz; ++i) {
            double wn = (v[i] - oldeps * w2[i] - delta * wv[i]) / gamma;
            w2[i] = wv[i];
            wv[i] = wn;
            x[i] += phi * wn;
        }
        if (phibar <= rel_tol * beta1 || beta == 0) break;
    }
    return x;
}

} // namespace detail

inline std::pair<ScalarField, SolveReport> newton_solve(const DiscGrid& g, const Operator& op,
                                                        const ScalarField& q, double p,
                                                        const ScalarField& initial, double tol,
                                                        int max_iter = 50) {
    ScalarField w = initial, F(w.size(), 0.0), diagJ(w.size(), 0.0), trial(w.size(), 0.0),
                Ft(w.size(), 0.0), d;
    detail::nonlinear_residual(op, w, q, p, F);
    double res = detail::inf_norm(F), res0 = res;
    double merit = std::sqrt(detail::dot(F, F)); // l2 merit for the line search
    SolveReport rep;
    rep.residual = res;
    double c = op.delta2 / (g.h * g.h);
    for (int it = 0; it < max_iter && res >= tol; ++it) {
        if (res > 10 * res0)
            throw NewtonError("diverged; eps likely too large", w, rep);
        // semismooth Jacobian diagonal: operator diagonal minus the active-set slope
        for (size_t id = 0; id < w.size(); ++id)
            diagJ[id] = g.interior[id]
                            ? c * op.diag[id] - p * std::pow(std::max(w[id] - q[id], 0.0), p - 1)
                            : 0.0;
        ScalarField rhs(F.size());
        for (size_t id = 0; id < F.size(); ++id) rhs[id] = -F[id];
        d = detail::newton_direction(op, diagJ, rhs, 1e-2);
        double t = 1;
        bool accepted = false;
        for (int ls = 0; ls < 40; ++ls, t /= 2) {
            for (size_t id = 0; id < w.size(); ++id) trial[id] = w[id] + t * d[id];
            detail::nonlinear_residual(op, trial, q, p, Ft);
            double mt = std::sqrt(detail::dot(Ft, Ft));
            if (mt < (1 - 1e-4 * t) * merit) {
                w.swap(trial);
                F.swap(Ft);
                merit = mt;
                res = detail::inf_norm(F);
                accepted = true;
                break;
            }
        }
        rep.iterations = it + 1;
        rep.residual = res;
        if (!accepted) throw NewtonError("Newton stalled", w, rep);
    }
    if (res >= tol) throw NewtonError("Newton stalled", w, rep);
    rep.residual = res;
    rep.omega_inf = 0;
    for (size_t id = 0; id < w.size(); ++id)
        rep.omega_inf = std::max(rep.omega_inf, std::abs(w[id] - initial[id]));
    return {std::move(w), rep};
}

namespace detail {

// diameter of a point set via its convex hull (monotone chain)
inline double set_diameter(std::vector<Vec2> pts) {
    if (pts.size() < 2) return 0;
    std::sort(pts.begin(), pts.end(), [](Vec2 a, Vec2 b) {
        return a.x < b.x || (a.x == b.x && a.y < b.y);
    });
    auto crossz = [](Vec2 o, Vec2 a, Vec2 b) {
        return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
    };
    std::vector<Vec2> hull(2 * pts.size());
    size_t k = 0;
    for (size_t i = 0; i < pts.size(); ++i) {
        while (k >= 2 && crossz(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
        hull[k++] = pts[i];
    }
    for (size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
        while (k >= t && crossz(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k > 1 ? k - 1 : k);
    double dmax = 0;
    for (size_t i = 0; i < hull.size(); ++i)
        for (size_t j = i + 1; j < hull.size(); ++j)
            dmax = std::max(dmax, (hull[i] - hull[j]).norm());
    return dmax;
}

} // namespace detail

// connected components of {w > q} with area centroid and diameter
inline std::vector<VortexComponent> vortex_set(const ScalarField& w, const ScalarField& q,
                                               const DiscGrid& g) {
    std::vector<uint8_t> seen(w.size(), 0);
    std::vector<VortexComponent> out;
    int n = g.n;
    for (int j = 1; j < n - 1; ++j)
        for (int i = 1; i < n - 1; ++i) {
            size_t id0 = g.idx(i, j);
            if (seen[id0] || !g.interior[id0] || w[id0] <= q[id0]) continue;
            VortexComponent comp;
            std::queue<size_t> bfs;
            bfs.push(id0);
            seen[id0] = 1;
            while (!bfs.empty()) {
                size_t id = bfs.front();
                bfs.pop();
                comp.nodes.push_back(id);
                int ci = int(id % n), cj = int(id / n);
                const int di[4] = {1, -1, 0, 0}, dj[4] = {0, 0, 1, -1};
                for (int kdir = 0; kdir < 4; ++kdir) {
                    int ni = ci + di[kdir], nj = cj + dj[kdir];
                    if (ni < 0 || nj < 0 || ni >= n || nj >= n) continue;
                    size_t nid = g.idx(ni, nj);
                    if (seen[nid] || !g.interior[nid] || w[nid] <= q[nid]) continue;
                    seen[nid] = 1;
                    bfs.push(nid);
                }
            }
            std::vector<Vec2> pts;
            pts.reserve(comp.nodes.size());
            Vec2 c{0, 0};
            for (size_t id : comp.nodes) {
                Vec2 x = g.xy(int(id % n), int(id / n));
                pts.push_back(x);
                c = c + x;
            }
            comp.center = c * (1.0 / double(comp.nodes.size()));
            comp.diameter = detail::set_diameter(std::move(pts));
            out.push_back(std::move(comp));
        }
    if (out.empty()) throw std::runtime_error("no vortex core (eps too large or solve failed)");
    std::sort(out.begin(), out.end(), [](const VortexComponent& a, const VortexComponent& b) {
        return std::atan2(a.center.y, a.center.x) < std::atan2(b.center.y, b.center.x);
    });
    return out;
}

// kappa_i = (|ln eps|^p / eps^2) * sum over the component of h^2 (w-q)_+^p
inline void circulation(std::vector<VortexComponent>& comps, const ScalarField& w,
                        const ScalarField& q, const DiscGrid& g, double eps, double p) {
    double scale = std::pow(std::abs(std::log(eps)), p) / (eps * eps) * g.h * g.h;
    for (auto& comp : comps) {
        double s = 0;
        for (size_t id : comp.nodes) s += std::pow(std::max(w[id] - q[id], 0.0), p);
        comp.kappa = scale * s;
    }
}

// (delta^2/2) int (K grad w | grad w) - 1/(p+1) int (w-q)_+^{p+1}
// by midpoint quadrature on cells whose four corners are interior
inline double energy_I(const ScalarField& w, const DiscGrid& g,
                       const std::function<Mat2(Vec2)>& K, const ScalarField& q,
                       double delta, double p) {
    int n = g.n;
    double grad = 0, pot = 0, h = g.h;
    for (int j = 0; j + 1 < n; ++j)
        for (int i = 0; i + 1 < n; ++i) {
            size_t a = g.idx(i, j), b = a + 1, cID = a + n, dID = a + n + 1;
            if (!(g.interior[a] && g.interior[b] && g.interior[cID] && g.interior[dID])) continue;
            double dx = (w[b] + w[dID] - w[a] - w[cID]) / (2 * h);
            double dy = (w[cID] + w[dID] - w[a] - w[b]) / (2 * h);
            Mat2 Kc = K(g.xy(i, j) + Vec2{h / 2, h / 2});
            grad += Kc.a11 * dx * dx + 2 * Kc.a12 * dx * dy + Kc.a22 * dy * dy;
            double wc = (w[a] + w[b] + w[cID] + w[dID]) / 4;
            double qc = (q[a] + q[b] + q[cID] + q[dID]) / 4;
            pot += std::pow(std::max(wc - qc, 0.0), p + 1);
        }
    return delta * delta / 2 * grad * h * h - pot * h * h / (p + 1);
}

// refuse grids that cannot resolve the predicted core diameter 2 s / ||T||
inline void check_resolution(const DiscGrid& g, const Ansatz& an) {
    for (size_t i = 0; i < an.cells.size(); ++i) {
        double dia = 2 * an.cells[i].s / an.cells[i].F.T.opnorm();
        if (dia < 8 * g.h) {
            int need = int(std::ceil(16 * g.R_star * an.cells[i].F.T.opnorm() / (2 * an.cells[i].s))) + 1;
            if (need % 2 == 0) ++need;
            throw std::runtime_error("core under-resolved; increase grid n to at least " +
                                     std::to_string(need));
        }
    }
}

inline ScalarField sample_ansatz(const DiscGrid& g, const Ansatz& an) {
    ScalarField f(size_t(g.n) * g.n, 0.0);
    for (int j = 0; j < g.n; ++j)
        for (int i = 0; i < g.n; ++i)
            if (g.interior[g.idx(i, j)]) f[g.idx(i, j)] = an.v_sum(g.xy(i, j));
    return f;
}

inline ScalarField sample_q(const DiscGrid& g, const Problem& prob) {
    ScalarField f(size_t(g.n) * g.n, 0.0);
    for (int j = 0; j < g.n; ++j)
        for (int i = 0; i < g.n; ++i)
            if (g.interior[g.idx(i, j)]) f[g.idx(i, j)] = prob.q(g.xy(i, j));
    return f;
}

} // namespace helico

#endif
