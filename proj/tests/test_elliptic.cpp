#include <catch2/catch_amalgamated.hpp>

#include <cstring>

#include "test_helpers.hpp"

using namespace ddc;
using Catch::Approx;

namespace {
constexpr double pi = std::numbers::pi;

// discrete z eigenvalues of the second-difference operator
double eig_dirichlet(int m, int nz) {
    const double h = 1.0 / nz;
    return 2.0 / (h * h) * (1.0 - std::cos(pi * m * h));
}
double eig_neumann(int m, int nz) { return eig_dirichlet(m, nz); }

Field interior_residual(const Grid& g, const Field& lap_psi, const Field& omega) {
    Field r = lap_psi;
    for (int j = 1; j < g.nz; ++j)
        for (int i = 0; i < g.nx; ++i)
            r.at(i, j) -= omega.at(i, j);
    for (int i = 0; i < g.nx; ++i) {
        r.at(i, 0) = 0.0;
        r.at(i, g.nz) = 0.0;
    }
    return r;
}
} // namespace

TEST_CASE("poisson_channel inverts the discrete eigenfunction exactly") {
    const double xi = 2.0;
    Grid g(32, 24, xi);
    const double kx = 2.0 * pi / xi;
    Field w = sample(g, FieldKind::DirichletZ,
                     [&](double x, double z) { return std::sin(pi * z) * std::cos(kx * x); });
    const double lambda = -(eig_dirichlet(1, g.nz) + kx * kx);
    Field psi = poisson_channel(g, w);
    Field expect = w;
    expect *= 1.0 / lambda;
    expect -= psi;
    REQUIRE(sup_abs(expect) < 1e-11);
}

TEST_CASE("poisson_channel converges to the continuum eigenvalue relation") {
    const double xi = 2.0;
    auto err = [&](int nz) {
        Grid g(2 * nz, nz, xi);
        Field w = sample(g, FieldKind::DirichletZ, [&](double x, double z) {
            return std::sin(pi * z) * std::cos(2.0 * pi * x / xi);
        });
        Field psi = poisson_channel(g, w);
        Field expect = w;
        expect *= -1.0 / (2.0 * pi * pi);
        expect -= psi;
        return sup_abs(expect);
    };
    const double e1 = err(16), e2 = err(32);
    REQUIRE(e1 < 5e-4);
    REQUIRE(e1 / e2 == Approx(4.0).margin(0.5));
}

TEST_CASE("poisson_channel of zero is zero, walls pinned") {
    Grid g(16, 8, 1.0);
    Field psi = poisson_channel(g, Field::zeros(g, FieldKind::DirichletZ));
    REQUIRE(sup_abs(psi) == 0.0);
}

TEST_CASE("poisson_channel residual oracle on random vorticity") {
    Grid g(32, 16, 1.3);
    std::mt19937_64 eng(10);
    Field w = tst::random_raw(g, FieldKind::DirichletZ, eng);
    Field psi = poisson_channel(g, w);
    for (int i = 0; i < g.nx; ++i) {
        REQUIRE(psi.at(i, 0) == 0.0);
        REQUIRE(psi.at(i, g.nz) == 0.0);
    }
    Field res = interior_residual(g, apply_laplacian_node(g, psi), w);
    REQUIRE(sup_abs(res) < 1e-11 * std::max(1.0, sup_abs(w)));
}

TEST_CASE("poisson_channel is bitwise reproducible") {
    Grid g(16, 12, 1.0);
    std::mt19937_64 eng(11);
    Field w = tst::random_raw(g, FieldKind::DirichletZ, eng);
    Field a = poisson_channel(g, w);
    Field b = poisson_channel(g, w);
    REQUIRE(std::memcmp(a.v.data(), b.v.data(), a.v.size() * sizeof(double)) == 0);
}

TEST_CASE("helmholtz: constants solve with homogeneous Neumann data") {
    Grid g(16, 8, 1.0);
    const auto plan = HelmholtzPlan::bdf2(g, 0.7, 0.05, HelmholtzPlan::Wall::Neumann);
    Field rhs = sample(g, FieldKind::NeumannZ, [](double, double) { return 3.0; });
    Field u = plan.solve(rhs);
    Field one = sample(g, FieldKind::NeumannZ, [](double, double) { return 1.0; });
    u -= one;
    REQUIRE(sup_abs(u) < 1e-12);
}

TEST_CASE("helmholtz: discrete eigenfunction oracle (both layouts)") {
    const double xi = 1.5, c = 0.6, k = 0.02;
    Grid g(32, 20, xi);
    const double kx = 2.0 * pi * 2 / xi;

    SECTION("Neumann / centre layout") {
        const auto plan = HelmholtzPlan::bdf2(g, c, k, HelmholtzPlan::Wall::Neumann);
        const int m = 3;
        Field phi = sample(g, FieldKind::NeumannZ,
                           [&](double x, double z) { return std::cos(pi * m * z) * std::sin(kx * x); });
        const double factor = 3.0 + 2.0 * k * c * (kx * kx + eig_neumann(m, g.nz));
        Field rhs = phi;
        rhs *= factor;
        Field u = plan.solve(rhs);
        u -= phi;
        REQUIRE(sup_abs(u) < 1e-11);
    }
    SECTION("Dirichlet / node layout") {
        const auto plan = HelmholtzPlan::bdf2(g, c, k, HelmholtzPlan::Wall::Dirichlet);
        const int m = 2;
        Field phi = sample(g, FieldKind::DirichletZ,
                           [&](double x, double z) { return std::sin(pi * m * z) * std::cos(kx * x); });
        const double factor = 3.0 + 2.0 * k * c * (kx * kx + eig_dirichlet(m, g.nz));
        Field rhs = phi;
        rhs *= factor;
        Field u = plan.solve(rhs);
        u -= phi;
        REQUIRE(sup_abs(u) < 1e-11);
    }
}

TEST_CASE("helmholtz: inhomogeneous Neumann flux is satisfied in the ghost sense") {
    Grid g(32, 16, 2.0);
    const double c = 1.0, k = 0.01;
    const auto plan = HelmholtzPlan::bdf2(g, c, k, HelmholtzPlan::Wall::Neumann);
    BoundaryFlux flux;
    flux.qt = {{1, 0.8, 0.3}};
    const auto qt = flux.sample_top(flux.qt, g);
    Field u = plan.solve(Field::zeros(g, FieldKind::NeumannZ), {}, qt);
    // (3 - 2kc Lap) u must vanish when the Laplacian carries the flux data
    Field op = apply_laplacian_center(g, u, {}, qt);
    op *= -2.0 * k * c;
    Field u3 = u;
    u3 *= 3.0;
    op += u3;
    REQUIRE(sup_abs(op) < 1e-11 * std::max(1.0, sup_abs(u)));
    REQUIRE(sup_abs(u) > 1e-4); // actually driven by the flux
}

TEST_CASE("helmholtz: Dirichlet wall data is reproduced exactly and residual vanishes") {
    Grid g(32, 16, 2.0);
    const double c = 0.9, k = 0.03;
    const auto plan = HelmholtzPlan::bdf2(g, c, k, HelmholtzPlan::Wall::Dirichlet);
    BoundaryFlux flux;
    flux.qu = {{1, -0.4, 0.7}};
    const auto qu = flux.sample_top(flux.qu, g);
    std::mt19937_64 eng(12);
    Field rhs = tst::random_raw(g, FieldKind::DirichletZ, eng);
    Field u = plan.solve(rhs, {}, qu);
    for (int i = 0; i < g.nx; ++i) {
        REQUIRE(u.at(i, 0) == 0.0);
        REQUIRE(u.at(i, g.nz) == qu[i]);
    }
    Field op = apply_laplacian_node(g, u);
    op *= -2.0 * k * c;
    Field u3 = u;
    u3 *= 3.0;
    op += u3;
    Field res = interior_residual(g, op, rhs);
    REQUIRE(sup_abs(res) < 1e-11 * std::max(1.0, sup_abs(rhs)));
}

TEST_CASE("helmholtz solve is linear in the rhs") {
    Grid g(16, 10, 1.0);
    const auto plan = HelmholtzPlan::bdf2(g, 1.2, 0.02, HelmholtzPlan::Wall::Neumann);
    std::mt19937_64 eng(13);
    Field f = tst::random_raw(g, FieldKind::NeumannZ, eng);
    Field h = tst::random_raw(g, FieldKind::NeumannZ, eng);
    Field comb = f;
    comb *= 1.75;
    Field hb = h;
    hb *= -0.3;
    comb += hb;
    Field lhs = plan.solve(comb);
    Field rhs = plan.solve(f);
    rhs *= 1.75;
    Field hs = plan.solve(h);
    hs *= -0.3;
    rhs += hs;
    lhs -= rhs;
    REQUIRE(sup_abs(lhs) < 1e-13);
}

TEST_CASE("helmholtz plan reuse is bitwise reproducible") {
    Grid g(16, 8, 1.0);
    const auto plan = HelmholtzPlan::bdf2(g, 1.0, 0.01, HelmholtzPlan::Wall::Neumann);
    std::mt19937_64 eng(14);
    Field rhs = tst::random_raw(g, FieldKind::NeumannZ, eng);
    Field a = plan.solve(rhs);
    Field b = plan.solve(rhs);
    REQUIRE(std::memcmp(a.v.data(), b.v.data(), a.v.size() * sizeof(double)) == 0);
}

TEST_CASE("poisson_periodic: eigenfunction, zero field, residual oracle, mean guard") {
    PeriodicGrid g(32, 32);
    Field w = sample(g, [](double x, double z) { return std::cos(x) * std::cos(z); });
    Field psi = poisson_periodic(g, w);
    Field expect = w;
    expect *= -0.5;
    expect -= psi;
    REQUIRE(sup_abs(expect) < 1e-13);

    REQUIRE(sup_abs(poisson_periodic(g, Field::zeros(g))) == 0.0);

    std::mt19937_64 eng(15);
    Field r = tst::random_band_limited(g, eng);
    Field p = poisson_periodic(g, r);
    REQUIRE(std::abs(mean(g, p)) < 1e-13);
    Field res = laplacian(g, p);
    res -= r;
    REQUIRE(sup_abs(res) < 1e-12 * std::max(1.0, sup_abs(r)));

    Field biased = r;
    for (double& x : biased.v) x += 0.5;
    REQUIRE_THROWS_AS(poisson_periodic(g, biased), std::invalid_argument);
}

TEST_CASE("discrete Poincare and elliptic-regularity constants are stable") {
    // |f|^2 <= c0 |grad f|^2 with c0 near the inverse of the smallest
    // discrete eigenvalue, and |grad psi|^2 <= c0 |omega|^2.
    auto measure = [&](int nz) {
        Grid g(2 * nz, nz, 2.0);
        std::mt19937_64 eng(16);
        double worst_poincare = 0.0, worst_reg = 0.0;
        for (int t = 0; t < 10; ++t) {
            Field f = tst::random_zero_wall(g, eng);
            f = subtract_mean(g, f);
            for (int i = 0; i < g.nx; ++i) {
                f.at(i, 0) = 0.0;
                f.at(i, g.nz) = 0.0;
            }
            worst_poincare = std::max(worst_poincare, l2_norm_sq(g, f) / h1_seminorm_sq(g, f));
            Field psi = poisson_channel(g, f);
            worst_reg = std::max(worst_reg, h1_seminorm_sq(g, psi) / l2_norm_sq(g, f));
        }
        return std::pair{worst_poincare, worst_reg};
    };
    const auto [p1, r1] = measure(16);
    const auto [p2, r2] = measure(32);
    const double c0_analytic = 1.0 / (pi * pi); // smallest Dirichlet eigenvalue, kx = 0
    REQUIRE(p1 <= 1.05 * c0_analytic);
    REQUIRE(p2 <= 1.05 * c0_analytic);
    REQUIRE(r1 <= 1.05 * c0_analytic);
    REQUIRE(r2 <= 1.05 * c0_analytic);
}
