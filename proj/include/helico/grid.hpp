#ifndef HELICO_GRID_HPP
#define HELICO_GRID_HPP

// Embedded-square masked disc grid, scalar fields on it, bicubic sampling,
// and field dump formats (CSV or raw little-endian doubles + sidecar).

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "linalg.hpp"

namespace helico {

struct DiscGrid {
    double R_star = 1;
    int n = 0;      // nodes per axis of the embedding square
    double h = 0;   // cell spacing
    std::vector<uint8_t> interior; // 1 for nodes strictly inside the disc

    DiscGrid(double R_star_, int n_) : R_star(R_star_), n(n_) {
        if (n < 65) throw std::runtime_error("grid too coarse (need n >= 65)");
        h = 2 * R_star / (n - 1);
        interior.assign(size_t(n) * n, 0);
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i)
                interior[idx(i, j)] = xy(i, j).norm() < R_star ? 1 : 0;
    }

    size_t idx(int i, int j) const { return size_t(j) * n + i; }
    Vec2 xy(int i, int j) const { return {-R_star + i * h, -R_star + j * h}; }
    bool inside(int i, int j) const {
        return i >= 0 && j >= 0 && i < n && j < n && interior[idx(i, j)];
    }
};

using ScalarField = std::vector<double>; // one value per grid node, 0 outside

// cubic-Lagrange interpolation in each axis (values taken as 0 off the grid)
inline double bicubic(const DiscGrid& g, const ScalarField& f, Vec2 x) {
    double u = (x.x + g.R_star) / g.h, v = (x.y + g.R_star) / g.h;
    int i0 = std::min(std::max(int(std::floor(u)) - 1, 0), g.n - 4);
    int j0 = std::min(std::max(int(std::floor(v)) - 1, 0), g.n - 4);
    double wx[4], wy[4];
    for (int a = 0; a < 4; ++a) {
        double Lx = 1, Ly = 1;
        for (int b = 0; b < 4; ++b) {
            if (b == a) continue;
            Lx *= (u - (i0 + b)) / double(a - b);
            Ly *= (v - (j0 + b)) / double(a - b);
        }
        wx[a] = Lx;
        wy[a] = Ly;
    }
    double s = 0;
    for (int b = 0; b < 4; ++b)
        for (int a = 0; a < 4; ++a)
            s += wx[a] * wy[b] * f[g.idx(i0 + a, j0 + b)];
    return s;
}

inline void dump_field_csv(const DiscGrid& g, const ScalarField& f,
                           const std::string& path, const std::string& header) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path);
    os << header << "x1,x2,w\n";
    char b[128];
    for (int j = 0; j < g.n; ++j)
        for (int i = 0; i < g.n; ++i) {
            if (!g.interior[g.idx(i, j)]) continue;
            Vec2 x = g.xy(i, j);
            std::snprintf(b, sizeof b, "%.17g,%.17g,%.17g\n", x.x, x.y, f[g.idx(i, j)]);
            os << b;
        }
}

// raw little-endian doubles over the full square, plus a sidecar descriptor
inline void dump_field_raw(const DiscGrid& g, const ScalarField& f,
                           const std::string& path, const std::string& header) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + path);
    os.write(reinterpret_cast<const char*>(f.data()), std::streamsize(f.size() * sizeof(double)));
    std::ofstream sc(path + ".desc");
    sc << header << "format = float64-le row-major\nn = " << g.n
       << "\nR_star = " << g.R_star << "\nlayout = full-square, zero outside disc\n";
}

} // namespace helico

#endif
