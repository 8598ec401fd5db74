#ifndef HELICO_PROFILE_HPP
#define HELICO_PROFILE_HPP

// Limiting radial core profile: -laplace(phi) = phi^p on the unit disc,
// phi > 0, phi(1) = 0, computed by shooting on phi(0), plus the entire
// solution w that glues a logarithmic tail outside the disc.

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "linalg.hpp"

namespace helico {

struct RadialProfile {
    double p = 0;
    double phi0 = 0;   // phi(0)
    double slope1 = 0; // phi'(1), negative
    std::vector<double> samples; // phi on a uniform mesh of [0,1]

    double mesh_h() const { return 1.0 / double(samples.size() - 1); }

    // cubic (4-point Lagrange) interpolation on the uniform mesh
    double phi(double r) const {
        if (r <= 0) return phi0;
        if (r >= 1) return 0.0;
        int n = int(samples.size());
        double h = mesh_h();
        int i = int(r / h);
        i = std::min(std::max(i - 1, 0), n - 4);
        double out = 0;
        for (int a = 0; a < 4; ++a) {
            double L = 1;
            for (int b = 0; b < 4; ++b)
                if (b != a) L *= (r - (i + b) * h) / ((a - b) * h);
            out += L * samples[i + a];
        }
        return out;
    }

    // entire solution: phi(|x|) inside the unit disc, phi'(1) ln|x| outside
    double entire_w(double r) const { return r <= 1.0 ? phi(r) : slope1 * std::log(r); }
};

namespace detail {

// integrate phi'' + phi'/r = -(phi)_+^p across the uniform mesh, RK4;
// the first step uses the series phi = a - a^p r^2/4 to clear the 1/r term
inline void integrate_profile(double a, double p, int nodes,
                              std::vector<double>* out, double& phi1, double& dphi1) {
    double h = 1.0 / double(nodes - 1);
    double ap = std::pow(a, p);
    double y = a - ap * h * h / 4, z = -ap * h / 2;
    if (out) {
        out->assign(nodes, 0.0);
        (*out)[0] = a;
        (*out)[1] = y;
    }
    auto fz = [p](double yy, double zz, double rr) {
        return -std::pow(std::max(yy, 0.0), p) - zz / rr;
    };
    for (int i = 1; i < nodes - 1; ++i) {
        double r = i * h;
        double k1y = z, k1z = fz(y, z, r);
        double k2y = z + h / 2 * k1z, k2z = fz(y + h / 2 * k1y, z + h / 2 * k1z, r + h / 2);
        double k3y = z + h / 2 * k2z, k3z = fz(y + h / 2 * k2y, z + h / 2 * k2z, r + h / 2);
        double k4y = z + h * k3z, k4z = fz(y + h * k3y, z + h * k3z, r + h);
        y += h / 6 * (k1y + 2 * k2y + 2 * k3y + k4y);
        z += h / 6 * (k1z + 2 * k2z + 2 * k3z + k4z);
        if (out) (*out)[i + 1] = y;
    }
    phi1 = y;
    dphi1 = z;
}

} // namespace detail

inline RadialProfile solve_profile(double p, double tol = 1e-11, int nodes = 4096) {
    if (!(p > 1 && p <= 5)) throw std::runtime_error("exponent p must lie in (1, 5]");
    if (!(tol > 0)) throw std::runtime_error("tolerance must be positive");
    auto shoot = [&](double a) {
        double f, df;
        detail::integrate_profile(a, p, nodes, nullptr, f, df);
        return f;
    };
    // bracket: small phi(0) leaves phi(1) > 0, large phi(0) crosses early
    double lo = 1.0, hi = 2.0;
    while (shoot(lo) < 0 && lo > 1e-8) lo /= 4;
    while (shoot(hi) > 0 && hi < 1e8) hi *= 4;
    if (!(shoot(lo) > 0 && shoot(hi) < 0)) throw std::runtime_error("bracket failure");
    for (int it = 0; it < 200 && hi - lo > 1e-16 * hi; ++it) {
        double mid = (lo + hi) / 2;
        (shoot(mid) > 0 ? lo : hi) = mid;
    }
    double a = (lo + hi) / 2;
    RadialProfile prof;
    prof.p = p;
    prof.phi0 = a;
    double phi1;
    detail::integrate_profile(a, p, nodes, &prof.samples, phi1, prof.slope1);
    if (std::abs(phi1) > tol * a)
        throw std::runtime_error("shooting did not reach the target tolerance");
    prof.samples.back() = 0.0; // pin the boundary value exactly
    return prof;
}

// Relative Pohozaev residuals: integral of phi^{p+1} vs pi(p+1)/2 * phi'(1)^2
// and integral of phi^p vs 2 pi |phi'(1)|, both by radial Simpson quadrature.
inline std::pair<double, double> pohozaev_check(const RadialProfile& prof) {
    int n = int(prof.samples.size());
    double h = prof.mesh_h();
    auto radial_integral = [&](double q) { // 2 pi * int f(r) r dr, f = phi^q
        auto f = [&](int i) {
            return std::pow(std::max(prof.samples[i], 0.0), q) * (i * h);
        };
        double s = 0;
        int i = 0;
        // composite Simpson; a 3/8 block absorbs an odd interval count
        int nint = n - 1;
        if (nint % 2 == 1) {
            s += 3 * h / 8 * (f(0) + 3 * f(1) + 3 * f(2) + f(3));
            i = 3;
        }
        for (; i + 2 < n; i += 2) s += h / 3 * (f(i) + 4 * f(i + 1) + f(i + 2));
        return 2 * M_PI * s;
    };
    double lhs1 = radial_integral(prof.p + 1);
    double rhs1 = M_PI * (prof.p + 1) / 2 * prof.slope1 * prof.slope1;
    double lhs2 = radial_integral(prof.p);
    double rhs2 = 2 * M_PI * std::abs(prof.slope1);
    return {std::abs(lhs1 - rhs1) / rhs1, std::abs(lhs2 - rhs2) / rhs2};
}

// plain-text cache: header with p, phi(0), phi'(1), then (r, phi) rows
inline void save_profile(const RadialProfile& prof, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open profile file for writing: " + path);
    char buf[128];
    std::snprintf(buf, sizeof buf, "# p= %.17g phi0= %.17g slope1= %.17g\n",
                  prof.p, prof.phi0, prof.slope1);
    f << buf;
    double h = prof.mesh_h();
    for (size_t i = 0; i < prof.samples.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g %.17g\n", i * h, prof.samples[i]);
        f << buf;
    }
}

inline RadialProfile load_profile(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open profile file: " + path);
    RadialProfile prof;
    std::string hash, pk, qk, sk;
    f >> hash >> pk >> prof.p >> qk >> prof.phi0 >> sk >> prof.slope1;
    if (hash != "#" || pk != "p=" || qk != "phi0=" || sk != "slope1=")
        throw std::runtime_error("malformed profile header: " + path);
    double r, v;
    while (f >> r >> v) prof.samples.push_back(v);
    if (prof.samples.size() < 4) throw std::runtime_error("profile table too short");
    return prof;
}

} // namespace helico

#endif
