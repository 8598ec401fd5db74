#ifndef HELICO_PROBLEM_HPP
#define HELICO_PROBLEM_HPP

// Problem descriptor shared by the ansatz, solver, and reduction layers:
// the disc, the coefficient matrix and its factor, the weight q, and the
// seed extrema of the landscape q^2 sqrt(det K).

#include <functional>
#include <vector>

#include "geometry.hpp"
#include "linalg.hpp"

namespace helico {

struct Problem {
    double R_star = 1;
    double p = 2;
    std::function<Mat2(Vec2)> K;
    std::function<CholeskyFactor(Vec2)> factor;
    std::function<double(Vec2)> q;
    std::vector<Vec2> seeds; // extrema of q^2 sqrt(det K)
    bool minimize = true;    // kind of the seed extrema
    double T_norm_sup = 1;   // sup of ||T_x|| over the closed disc
};

// Rotation rate alpha and offset beta making (r_*, 0) the landscape minimum
// with circulation c: alpha = c/(4 pi k sqrt(k^2+r_*^2)), beta = alpha/2 (3 r_*^2 + 4 k^2).
inline std::pair<double, double> alpha_beta_from(double c, double r_star, double k) {
    double alpha = c / (4 * M_PI * k * std::sqrt(k * k + r_star * r_star));
    return {alpha, alpha / 2 * (3 * r_star * r_star + 4 * k * k)};
}

inline Problem helical_problem(const HelixSpec& sp) {
    sp.validate();
    auto [alpha, beta] = alpha_beta_from(sp.c, sp.r_star, sp.k);
    Problem pr;
    pr.R_star = sp.R_star;
    double k = sp.k;
    pr.K = [k](Vec2 x) { return kh_matrix(x, k); };
    pr.factor = [k](Vec2 x) { return helical_T(x, k); };
    pr.q = [alpha, beta](Vec2 x) { return alpha * x.norm2() / 2 + beta; };
    pr.seeds = polygonal_centers(sp);
    pr.minimize = true;
    pr.T_norm_sup = std::sqrt(k * k + sp.R_star * sp.R_star) / k;
    return pr;
}

// one global enclosing radius per run, integer for a stable ln R
inline double enclosing_R(const Problem& pr) {
    return std::ceil(2 * pr.T_norm_sup * pr.R_star);
}

// admissible-ball radius: a quarter of the least seed separation and of the
// least seed distance to the boundary
inline double admissible_radius(const Problem& pr) {
    double d = 1e300;
    for (size_t i = 0; i < pr.seeds.size(); ++i) {
        d = std::min(d, pr.R_star - pr.seeds[i].norm());
        for (size_t j = i + 1; j < pr.seeds.size(); ++j)
            d = std::min(d, (pr.seeds[i] - pr.seeds[j]).norm());
    }
    return d / 4;
}

} // namespace helico

#endif
