#include <catch2/catch_amalgamated.hpp>

#include "test_helpers.hpp"

using namespace ddc;
using Catch::Approx;

TEST_CASE("two-level norm: direct evaluations") {
    Grid g(16, 8, 1.0);
    Field one = sample(g, FieldKind::NeumannZ, [](double, double) { return 1.0; });
    // f = g, |f| = 1, nu k = 0: 1/2 + 5/2 - 2 = 1
    REQUIRE(gnorm_sq(g, one, one, 0.0) == Approx(1.0).epsilon(1e-13));

    constexpr double pi = std::numbers::pi;
    Field f = sample(g, FieldKind::NeumannZ,
                     [&](double x, double) { return std::sqrt(2.0) * std::sin(2.0 * pi * x); });
    Field h = sample(g, FieldKind::NeumannZ,
                     [&](double x, double) { return std::sqrt(2.0) * std::cos(2.0 * pi * x); });
    // orthogonal unit fields at nu k = 1: 1/2 + 3 = 3.5
    REQUIRE(gnorm_sq(g, f, h, 1.0) == Approx(3.5).epsilon(1e-13));

    Field z = Field::zeros(g, FieldKind::NeumannZ);
    REQUIRE(gnorm_sq(g, z, z, 0.5) == 0.0);

    REQUIRE_THROWS_AS(gnorm_sq(g, f, h, -0.1), std::domain_error);
    REQUIRE_THROWS_AS(gnorm_sq(g, f, h, 1.1), std::domain_error);
}

TEST_CASE("equivalence constants over the shift grid match the closed forms") {
    std::vector<double> grid;
    for (int i = 0; i <= 100; ++i) grid.push_back(i / 100.0);
    const auto eq = equivalence_constants(grid);
    REQUIRE(std::abs(eq.c_minus - (6.0 - std::sqrt(32.0)) / 4.0) < 1e-12);
    REQUIRE(std::abs(eq.c_plus - (7.0 + std::sqrt(41.0)) / 4.0) < 1e-12);

    // eigenvalue oracle at nu k = 0: trace 3, det 1/4
    const auto [lo, hi] = gnorm_eigenvalues(0.0);
    REQUIRE(lo + hi == Approx(3.0).epsilon(1e-14));
    REQUIRE(lo * hi == Approx(0.25).epsilon(1e-13));
    REQUIRE(lo == Approx((6.0 - std::sqrt(32.0)) / 4.0).epsilon(1e-14));
    REQUIRE(hi == Approx((6.0 + std::sqrt(32.0)) / 4.0).epsilon(1e-14));
}

TEST_CASE("equivalence sandwich holds for random pairs and shifts") {
    Grid g(16, 8, 1.0);
    std::mt19937_64 eng(30);
    const double cm = gnorm_c_minus(), cp = gnorm_c_plus();
    for (int t = 0; t < 10000; ++t) {
        const double u = tst::normal(eng), v = tst::normal(eng);
        const double nu_k = tst::uniform(eng);
        const double q = gnorm_sq_scalar(u, v, nu_k);
        const double s = u * u + v * v;
        REQUIRE(q >= cm * s - 1e-12 * s);
        REQUIRE(q <= cp * s + 1e-12 * s);
    }
    // and on actual fields
    for (int t = 0; t < 50; ++t) {
        Field f = tst::random_raw(g, FieldKind::NeumannZ, eng);
        Field h = tst::random_raw(g, FieldKind::NeumannZ, eng);
        const double nu_k = tst::uniform(eng);
        const double q = gnorm_sq(g, f, h, nu_k);
        const double s = l2_norm_sq(g, f) + l2_norm_sq(g, h);
        REQUIRE(q >= cm * s - 1e-12 * s);
        REQUIRE(q <= cp * s + 1e-12 * s);
    }
}

TEST_CASE("two-level energy identity: hand cases and random triples") {
    Grid g(16, 8, 1.0);
    Field one = sample(g, FieldKind::NeumannZ, [](double, double) { return 1.0; });
    for (double nu_k : {0.0, 0.3, 1.0}) {
        REQUIRE(hs_identity_residual(g, one, one, one, nu_k) < 1e-13);
        Field z = Field::zeros(g, FieldKind::NeumannZ);
        REQUIRE(hs_identity_residual(g, z, z, z, nu_k) == 0.0);
    }
    std::mt19937_64 eng(31);
    double worst = 0.0;
    for (int t = 0; t < 1000; ++t) {
        Field f = tst::random_raw(g, FieldKind::NeumannZ, eng);
        Field h = tst::random_raw(g, FieldKind::NeumannZ, eng);
        Field w = tst::random_raw(g, FieldKind::NeumannZ, eng);
        const double nu_k = tst::uniform(eng);
        const double scale =
            l2_norm_sq(g, f) + l2_norm_sq(g, h) + l2_norm_sq(g, w);
        worst = std::max(worst, hs_identity_residual(g, f, h, w, nu_k) / scale);
    }
    REQUIRE(worst < 1e-12);
}

TEST_CASE("recursion bound: closed-form cases") {
    std::vector<double> r(64, 0.0);
    // x1 + mu y1 = 1, y0 = 0, r = 0, delta = 1: bound = 2^-n
    for (int n : {1, 2, 5, 10}) {
        const double b = recursion_bound(1.0, 0.0, 0.0, 1.0, 1.0, 0.125, r, n);
        REQUIRE(b == Approx(std::pow(2.0, -n)).epsilon(1e-13));
    }
    // constant r: bound tends to r (1 + delta) / delta
    const double rc = 0.03, delta = 0.5;
    std::vector<double> rconst(4000, rc);
    const double b = recursion_bound(1.0, 0.0, 0.0, 1.0, delta, 0.125, rconst, 4000);
    REQUIRE(b == Approx(rc * (1.0 + delta) / delta).epsilon(1e-10));

    REQUIRE_THROWS_AS(recursion_bound(1, 0, 0, -1.0, 0.5, 0.01, r, 4), std::domain_error);
    REQUIRE_THROWS_AS(recursion_bound(1, 0, 0, 1.0, 1.5, 0.1, r, 4), std::domain_error);
    REQUIRE_THROWS_AS(recursion_bound(1, 0, 0, 1.0, 0.5, 0.2, r, 4), std::domain_error);
    REQUIRE_THROWS_AS(recursion_bound(-1, 0, 0, 1.0, 0.5, 0.1, r, 4), std::domain_error);
}

TEST_CASE("recursion bound dominates synthesised equality trajectories") {
    std::mt19937_64 eng(32);
    for (int trial = 0; trial < 50; ++trial) {
        const double mu = 0.1 + tst::uniform(eng);
        const double delta = 0.05 + 0.95 * tst::uniform(eng);
        const double eps = (mu / 8.0) * (0.1 + 0.9 * tst::uniform(eng));
        const int n_max = 120;
        std::vector<double> r(n_max);
        for (auto& x : r) x = 0.05 * tst::uniform(eng);
        double x = tst::uniform(eng), y = tst::uniform(eng);
        const double y0 = tst::uniform(eng);
        double y_prev = y0;
        const double x1 = x, y1 = y;
        for (int n = 1; n <= n_max; ++n) {
            const double s = x / (1.0 + delta) + eps * y + eps * y_prev + r[n - 1];
            const double theta = tst::uniform(eng);
            y_prev = y;
            x = (1.0 - theta) * s;
            y = theta * s / mu;
            const double bound = recursion_bound(x1, y1, y0, mu, delta, eps, r, n);
            REQUIRE(x + mu * y <= bound * (1.0 + 1e-12) + 1e-300);
        }
    }
}

TEST_CASE("geometric growth bound: continuity, equality and domination") {
    std::vector<double> r(10, 0.2);
    const double tiny = 1e-12;
    double plain = 0.5;
    for (double rj : r) plain += rj;
    REQUIRE(geometric_growth_bound(0.5, tiny, r) == Approx(plain).epsilon(1e-9));

    // r = 0: the equality trajectory attains the bound
    std::vector<double> rz(7, 0.0);
    const double b = 0.3;
    double x = 1.25;
    for (int j = 0; j < 7; ++j) x *= (1.0 + b);
    REQUIRE(geometric_growth_bound(1.25, b, rz) == Approx(x).epsilon(1e-13));

    std::mt19937_64 eng(33);
    for (int trial = 0; trial < 50; ++trial) {
        const double bb = 0.01 + tst::uniform(eng);
        const int m = 40;
        std::vector<double> rr(m);
        for (auto& v : rr) v = 0.1 * tst::uniform(eng);
        double xt = tst::uniform(eng);
        const double x0 = xt;
        for (int j = 0; j < m; ++j)
            xt = (1.0 + bb) * xt + rr[j];
        REQUIRE(xt <= geometric_growth_bound(x0, bb, rr) * (1.0 + 1e-12));
    }
    REQUIRE_THROWS_AS(geometric_growth_bound(-1.0, 0.5, r), std::domain_error);
    REQUIRE_THROWS_AS(geometric_growth_bound(1.0, 0.0, r), std::domain_error);
}

TEST_CASE("timestep restriction arithmetic") {
    Params p;
    p.prandtl = 1.0;
    p.lewis_beta = 1.0;
    p.nx = 16;
    p.nz = 8;
    p.k = 0.01;
    ConstantsConfig c;
    REQUIRE(nu_shift(p, c) == Approx(0.125).epsilon(1e-15));

    // no advection scale: k_max = 1/nu
    REQUIRE(timestep_restriction(0.0, 0.0, p, c) == Approx(8.0).epsilon(1e-14));
    // M + |grad Psi|^2 = 2: min(1/4, 8) = 1/4
    REQUIRE(timestep_restriction(1.0, 1.0, p, c) == Approx(0.25).epsilon(1e-14));
    // quadrupling the advection scale divides the first branch by 16
    const double k1 = timestep_restriction(2.0, 0.0, p, c);
    const double k4 = timestep_restriction(8.0, 0.0, p, c);
    REQUIRE(k1 / k4 == Approx(16.0).epsilon(1e-12));

    REQUIRE_THROWS_AS(timestep_restriction(-1.0, 0.0, p, c), std::domain_error);
}

TEST_CASE("vorticity monitor: zero case, steadiness, interpolation oracle") {
    Grid g(16, 8, 1.0);
    Params p;
    p.prandtl = 1.0;
    p.lewis_beta = 1.0;
    p.nx = 16;
    p.nz = 8;
    p.k = 0.01;
    p.nu_coef = 0.125;
    ConstantsConfig c;
    Lifting zero_lift = Lifting::zero(g);

    State z0 = State::zeros(g), z1 = State::zeros(g);
    z1.n = 1;
    const State hz[2] = {z0, z1};
    const auto mz = m_omega_monitor(g, std::span<const State>(hz, 2), zero_lift, p, c);
    REQUIRE(mz.m_omega == 0.0);
    REQUIRE(mz.h_half_interp == 0.0);

    std::mt19937_64 eng(34);
    State s = tst::random_smooth_state(g, eng);
    State s1 = s;
    s1.n = 1;
    const State h2[2] = {s, s1};
    const State h3[3] = {s, s1, s1};
    const auto m2 = m_omega_monitor(g, std::span<const State>(h2, 2), zero_lift, p, c);
    const auto m3 = m_omega_monitor(g, std::span<const State>(h3, 3), zero_lift, p, c);
    REQUIRE(m2.m_omega == m3.m_omega); // steady history: monitor constant in n
    REQUIRE(m2.h_half_interp == m3.h_half_interp);

    const double direct = l2_norm(g, s.omega) * h1_seminorm(g, s.omega);
    REQUIRE(m2.h_half_interp == Approx(direct).epsilon(1e-13));

    const State h1only[1] = {s};
    REQUIRE_THROWS_AS(m_omega_monitor(g, std::span<const State>(h1only, 1), zero_lift, p, c),
                      std::logic_error);
}

TEST_CASE("combined weighted two-level norm reassembles from its parts") {
    Grid g(16, 8, 1.0);
    Params p;
    p.prandtl = 0.7;
    p.lewis_beta = 2.0;
    p.nx = 16;
    p.nz = 8;
    p.k = 0.01;
    ConstantsConfig c;
    c.c0 = 1.3;
    Lifting lift = Lifting::zero(g);
    std::mt19937_64 eng(35);
    State a = tst::random_smooth_state(g, eng);
    State b = tst::random_smooth_state(g, eng);
    const double nu_k = 0.4;
    const double combined = gnorm_sq_combined(g, a, b, lift, p, c, nu_k);
    const double manual = gnorm_sq(g, a.omega, b.omega, nu_k) +
                          16.0 * p.prandtl * c.c0 * gnorm_sq(g, a.temp, b.temp, nu_k) +
                          16.0 * p.prandtl * c.c0 / p.lewis_beta * gnorm_sq(g, a.salt, b.salt, nu_k);
    REQUIRE(combined == Approx(manual).epsilon(1e-13));
}
