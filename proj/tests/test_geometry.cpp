#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "helico/geometry.hpp"
#include "helico/problem.hpp"

using namespace helico;

static HelixSpec defaults() { return HelixSpec{1.0, 0.5, 1.0, 1.0, 1}; }

TEST_CASE("kh_matrix closed form and spectrum") {
    Mat2 I = kh_matrix({0, 0}, 2.0);
    CHECK(I.a11 == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(I.a12 == 0.0);
    CHECK(I.a22 == doctest::Approx(1.0).epsilon(1e-15));

    double k = 1.3, r = 0.7;
    Mat2 D = kh_matrix({r, 0}, k);
    CHECK(D.a11 == doctest::Approx(k * k / (k * k + r * r)).epsilon(1e-14));
    CHECK(D.a12 == 0.0);
    CHECK(D.a22 == doctest::Approx(1.0).epsilon(1e-14));

    // eigenvalues exactly {1, k^2/(k^2+|x|^2)} across the disc
    for (int i = -10; i <= 10; ++i)
        for (int j = -10; j <= 10; ++j) {
            Vec2 x{i * 0.1 * 0.99, j * 0.1 * 0.99};
            if (x.norm() >= 1) continue;
            double lo, hi;
            sym_eigenvalues(kh_matrix(x, k), lo, hi);
            CHECK(std::abs(hi - 1.0) < 1e-12);
            CHECK(std::abs(lo - k * k / (k * k + x.norm2())) < 1e-12);
        }
}

TEST_CASE("cholesky factor reconstruction") {
    auto f = cholesky_T(Mat2::identity());
    CHECK(std::abs(f.T.a11 - 1) + std::abs(f.T.a12) + std::abs(f.T.a21) + std::abs(f.T.a22 - 1) < 1e-14);

    // helical closed form at (r, 0): diagonal stretch only
    double k = 0.8, r = 0.45;
    auto hf = helical_T({r, 0}, k);
    CHECK(hf.T_inv.a11 == doctest::Approx(k / std::sqrt(k * k + r * r)).epsilon(1e-14));
    CHECK(hf.T_inv.a12 == 0.0);
    CHECK(hf.T_inv.a22 == doctest::Approx(1.0).epsilon(1e-14));

    // helical factor reproduces K_H everywhere
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int t = 0; t < 200; ++t) {
        Vec2 x{u(rng), u(rng)};
        auto g = helical_T(x, k);
        Mat2 K = g.T_inv.mul(g.T_inv.transpose());
        Mat2 ref = kh_matrix(x, k);
        CHECK(std::abs(K.a11 - ref.a11) + std::abs(K.a12 - ref.a12) +
              std::abs(K.a21 - ref.a21) + std::abs(K.a22 - ref.a22) < 1e-12);
    }

    // 1000 random SPD matrices, condition number up to 1e6
    std::uniform_real_distribution<double> ang(0, 2 * M_PI), lg(-3, 3);
    for (int t = 0; t < 1000; ++t) {
        double th = ang(rng), l1 = std::pow(10.0, lg(rng)), l2 = std::pow(10.0, lg(rng));
        double c = std::cos(th), s = std::sin(th);
        Mat2 Q{c, -s, s, c};
        Mat2 K = Q.mul(Mat2{l1, 0, 0, l2}).mul(Q.transpose());
        K.a21 = K.a12; // enforce exact symmetry of the test input
        auto g = cholesky_T(K);
        Mat2 rec = g.T_inv.mul(g.T_inv.transpose());
        double scale = std::max(l1, l2);
        CHECK(std::abs(rec.a11 - K.a11) + std::abs(rec.a12 - K.a12) +
              std::abs(rec.a22 - K.a22) < 1e-12 * scale);
    }

    CHECK_THROWS_WITH(cholesky_T(Mat2{-1, 0, 0, 1}), "matrix not positive definite");
    CHECK_THROWS_WITH(cholesky_T(Mat2{1, 2, 2, 1}), "matrix not positive definite");
}

TEST_CASE("helix curve: arclength, frame identities, slices") {
    HelixSpec sp = defaults();
    CHECK(helix_curve(0, 0, sp).x == doctest::Approx(sp.r_star));
    CHECK(std::abs(helix_curve(0, 0, sp).y) < 1e-15);
    CHECK(std::abs(helix_curve(0, 0, sp).z) < 1e-15);

    double a1, b1, rt;
    detail::helix_coeffs(sp, a1, b1, rt);
    for (double s = -2; s <= 2; s += 0.5)
        for (double tau = -2; tau <= 2; tau += 0.5) {
            CHECK(std::abs(detail::helix_ds(s, tau, sp).norm() - 1.0) < 1e-12);
            // curvature and torsion of the arclength curve
            Vec3 dss = detail::helix_dss(s, tau, sp);
            CHECK(dss.norm() == doctest::Approx(sp.r_star / (rt * rt)).epsilon(1e-12));
            // torsion via the Frenet formula with a differenced third derivative
            double hh = 1e-5;
            Vec3 dsss = (detail::helix_dss(s + hh, tau, sp) - detail::helix_dss(s - hh, tau, sp)) * (1 / (2 * hh));
            Vec3 b = detail::helix_ds(s, tau, sp).cross(dss);
            // magnitude only: the left-handed curve has negative Frenet torsion
            CHECK(std::abs(b.dot(dsss) / b.dot(b)) == doctest::Approx(sp.k / (rt * rt)).epsilon(1e-8));
            // rigid-motion identity: gamma(s,tau) = Qbar gamma(s,0) + vertical shift
            Vec3 lhs = helix_curve(s, tau, sp);
            Vec3 rhs = qbar_apply(a1 * tau / rt, helix_curve(s, 0, sp));
            rhs.z -= b1 * tau / rt;
            CHECK((lhs - rhs).norm() < 1e-13);
        }
}

TEST_CASE("binormal residual") {
    HelixSpec sp = defaults();
    for (double s = -3; s <= 3; s += 0.75)
        for (double tau = -3; tau <= 3; tau += 0.75)
            CHECK(binormal_residual(s, tau, sp) < 1e-10);

    // 4th-order finite-difference fallback stays near the analytic answer
    CHECK(binormal_residual(0.3, 0.7, sp, false) < 1e-6);

    // 2nd-order differencing converges at O(h^2) (Richardson comparison)
    auto fd2 = [&](double h) {
        auto g = [&](double ss, double tt) { return helix_curve(ss, tt, sp); };
        Vec3 dt = (g(0.3, 0.7 + h) - g(0.3, 0.7 - h)) * (1 / (2 * h));
        Vec3 ds = (g(0.3 + h, 0.7) - g(0.3 - h, 0.7)) * (1 / (2 * h));
        Vec3 dss = (g(0.3 + h, 0.7) + g(0.3 - h, 0.7) - g(0.3, 0.7) * 2.0) * (1 / (h * h));
        return (dt - ds.cross(dss) * (sp.c / (4 * M_PI))).norm();
    };
    double e1 = fd2(0.04), e2 = fd2(0.02);
    CHECK(e1 / e2 > 3.0);
    CHECK(e1 / e2 < 5.0);

    // circle limit: binormal speed approaches c/(4 pi r_*) as pitch -> 0
    HelixSpec flat = sp;
    flat.k = 1e-6;
    Vec3 v = detail::helix_ds(0, 0, flat).cross(detail::helix_dss(0, 0, flat)) * (flat.c / (4 * M_PI));
    CHECK(v.norm() == doctest::Approx(flat.c / (4 * M_PI * flat.r_star)).epsilon(1e-9));
}

TEST_CASE("polygonal centers") {
    HelixSpec sp = defaults();
    auto z1 = polygonal_centers(sp);
    REQUIRE(z1.size() == 1);
    CHECK((z1[0] - Vec2{sp.r_star, 0}).norm() < 1e-15);

    sp.m = 2;
    auto z2 = polygonal_centers(sp);
    CHECK((z2[1] - Vec2{-sp.r_star, 0}).norm() < 1e-14);

    sp.m = 4;
    auto z4 = polygonal_centers(sp);
    CHECK((z4[0] - z4[1]).norm() == doctest::Approx(sp.r_star * std::sqrt(2.0)).epsilon(1e-13));
    CHECK((z4[0] - z4[2]).norm() == doctest::Approx(2 * sp.r_star).epsilon(1e-13));
}

TEST_CASE("point vortex center and helix slice") {
    HelixSpec sp = defaults();
    CHECK((point_vortex_center(0, sp) - Vec2{sp.r_star, 0}).norm() < 1e-15);
    for (double tau = 0; tau < 7; tau += 0.37)
        CHECK(point_vortex_center(tau, sp).norm() == doctest::Approx(sp.r_star).epsilon(1e-13));

    // rate matches alpha of the helical landscape parameters
    auto [alpha, beta] = alpha_beta_from(sp.c, sp.r_star, sp.k);
    (void)beta;
    CHECK(alpha_rate(sp) == doctest::Approx(alpha).epsilon(1e-14));

    // the x3=0 slice of the helix at s = b1 tau / k is the point-vortex center
    double a1, b1, rt;
    detail::helix_coeffs(sp, a1, b1, rt);
    for (double tau = 0.0; tau < 3; tau += 0.5) {
        Vec3 g = helix_curve(b1 * tau / sp.k, tau, sp);
        CHECK(std::abs(g.z) < 1e-13);
        Vec2 P = point_vortex_center(tau, sp);
        CHECK(std::abs(g.x - P.x) + std::abs(g.y - P.y) < 1e-13);
    }
}

TEST_CASE("zeta field") {
    CHECK((zeta_field({0, 0, 5}, 2.0) - Vec3{0, 0, 2}).norm() < 1e-15);
    Vec3 x{0.3, -1.2, 0.8};
    double k = 1.7;
    CHECK(zeta_field(x, k).dot(zeta_field(x, k)) ==
          doctest::Approx(x.x * x.x + x.y * x.y + k * k).epsilon(1e-14));

    // zeta annihilates helical functions, e.g. h = x1^2 + x2^2
    auto h = [](Vec3 y) { return y.x * y.x + y.y * y.y; };
    double fd = 0, step = 1e-6;
    Vec3 z = zeta_field(x, k);
    fd += z.x * (h({x.x + step, x.y, x.z}) - h({x.x - step, x.y, x.z})) / (2 * step);
    fd += z.y * (h({x.x, x.y + step, x.z}) - h({x.x, x.y - step, x.z})) / (2 * step);
    fd += z.z * (h({x.x, x.y, x.z + step}) - h({x.x, x.y, x.z - step})) / (2 * step);
    CHECK(std::abs(fd) < 1e-8);
}
