#include <catch2/catch_amalgamated.hpp>

#include "test_helpers.hpp"

using namespace ddc;
using Catch::Approx;

namespace {

Params mk_params(int nx, int nz, double k, double xi = 2.0) {
    Params p;
    p.prandtl = 1.0;
    p.lewis_beta = 1.0;
    p.aspect_xi = xi;
    p.nx = nx;
    p.nz = nz;
    p.k = k;
    p.nu_coef = 0.125;
    return p;
}

std::vector<DiagnosticsRecord> integrate_with_records(const Params& p, const BoundaryFlux& flux,
                                                      const Lifting& lift, State u0, int nsteps) {
    const Grid g(p.nx, p.nz, p.aspect_xi);
    State u1 = Stepper::bootstrap(p, flux, u0);
    const RunMonitors rm = make_run_monitors(g, u0, u1, lift, p, {});
    Stepper m(p, flux, u0, u1);
    std::vector<DiagnosticsRecord> recs;
    recs.push_back(record(g, m.prev(), m.curr(), lift, p, {}, flux, rm));
    for (int s = 0; s < nsteps; ++s) {
        m.step();
        recs.push_back(record(g, m.prev(), m.curr(), lift, p, {}, flux, rm));
    }
    return recs;
}

} // namespace

TEST_CASE("record of the zero state is identically zero") {
    const Params p = mk_params(16, 8, 0.01);
    const Grid g(p.nx, p.nz, p.aspect_xi);
    const Lifting lift = Lifting::zero(g);
    State a = State::zeros(g), b = State::zeros(g);
    b.n = 1;
    b.time = p.k;
    const RunMonitors rm = make_run_monitors(g, a, b, lift, p, {});
    const auto r = record(g, a, b, lift, p, {}, {}, rm);
    REQUIRE(r.l2_omega == 0.0);
    REQUIRE(r.l2_temp == 0.0);
    REQUIRE(r.gn_combined == 0.0);
    REQUIRE(r.du_sq == 0.0);
    REQUIRE(r.energy == 0.0);
    REQUIRE(r.momega_interp == 0.0);
}

TEST_CASE("a state equal to the lifting has zero hatted norms and lifting raw norms") {
    const Params p = mk_params(32, 32, 0.01);
    const Grid g(p.nx, p.nz, p.aspect_xi);
    BoundaryFlux flux;
    flux.qu = {{1, 0.3, 0.0}};
    flux.qt = {{1, 0.4, 0.2}};
    flux.qs = {{2, 0.0, 0.3}};
    const Lifting lift = build_lifting(g, flux, 0.25, p, {});
    State s = State::zeros(g);
    s.omega = lift.Omega;
    s.temp = lift.TQ;
    s.salt = lift.SQ;
    s.psi = lift.Psi;
    State s1 = s;
    s1.n = 1;
    const RunMonitors rm = make_run_monitors(g, s, s1, lift, p, {});
    const auto r = record(g, s, s1, lift, p, {}, flux, rm);
    REQUIRE(r.h1_omega_hat == 0.0);
    REQUIRE(r.h1_temp_hat == 0.0);
    REQUIRE(r.h1_salt_hat == 0.0);
    REQUIRE(r.gn_combined == 0.0);
    REQUIRE(r.l2_omega == Approx(lift.norms.omega_l2).epsilon(1e-14));
    REQUIRE(r.l2_temp == Approx(lift.norms.tq_l2).epsilon(1e-14));
    REQUIRE(r.l2_salt == Approx(lift.norms.sq_l2).epsilon(1e-14));
}

TEST_CASE("record G-norm entries match an independent reassembly") {
    const Params p = mk_params(16, 8, 0.02);
    const Grid g(p.nx, p.nz, p.aspect_xi);
    const Lifting lift = Lifting::zero(g);
    std::mt19937_64 eng(60);
    State a = tst::random_smooth_state(g, eng);
    State b = tst::random_smooth_state(g, eng);
    b.n = 1;
    const RunMonitors rm = make_run_monitors(g, a, b, lift, p, {});
    const auto r = record(g, a, b, lift, p, {}, {}, rm);
    const double nu_k = p.nu_coef * p.k;
    auto gn = [&](const Field& f, const Field& h) {
        return 0.5 * l2_norm_sq(g, f) + 0.5 * (5.0 + nu_k) * l2_norm_sq(g, h) -
               2.0 * l2_inner(g, f, h);
    };
    REQUIRE(r.gn_omega == Approx(gn(a.omega, b.omega)).epsilon(1e-12));
    REQUIRE(r.gn_combined ==
            Approx(gn(a.omega, b.omega) + 16.0 * gn(a.temp, b.temp) + 16.0 * gn(a.salt, b.salt))
                .epsilon(1e-12));
    REQUIRE(r.du_sq == Approx(l2_norm_sq(g, b.omega - a.omega) + l2_norm_sq(g, b.temp - a.temp) +
                              l2_norm_sq(g, b.salt - a.salt))
                           .epsilon(1e-12));
}

TEST_CASE("channel difference identities hold on real step fields") {
    const Params p = mk_params(16, 16, 0.01);
    const Grid g(p.nx, p.nz, p.aspect_xi);
    BoundaryFlux flux;
    flux.qt = {{1, 0.7, 0.0}};
    flux.qu = {{1, 0.2, 0.1}};
    const Lifting lift = build_lifting(g, flux, 0.25, p, {});
    State u0 = make_random_state(g, lift, 0.8, 21);
    State u1 = Stepper::bootstrap(p, flux, u0);
    Stepper m(p, flux, u0, u1);
    run(m, 4);
    const Field& w1 = m.curr().omega;
    const Field& w0 = m.prev().omega;
    const double scale = l2_norm_sq(g, w1) + l2_norm_sq(g, w0);
    REQUIRE(bdf_difference_identity_residual(g, w1, w0) < 1e-12 * scale);
    const double hscale = h1_seminorm_sq(g, w1) + h1_seminorm_sq(g, w0);
    // wall data is static, so the difference vanishes on the walls and
    // the summation-by-parts identity is exact
    REQUIRE(dissipation_identity_residual(g, w1, w0) < 1e-11 * hscale);
}

TEST_CASE("functional average: running mean equals batch recomputation") {
    std::mt19937_64 eng(61);
    FunctionalAverage fa("test", 1.0, 2.0);
    std::vector<std::pair<double, double>> samples;
    for (int i = 0; i < 500; ++i) {
        const double t = 3.0 * tst::uniform(eng);
        const double v = tst::normal(eng);
        samples.push_back({t, v});
        fa.add(t, v);
    }
    double sum = 0.0;
    std::size_t cnt = 0;
    for (auto [t, v] : samples)
        if (t >= 1.0 && t <= 2.0) {
            sum += v;
            ++cnt;
        }
    REQUIRE(fa.count() == cnt);
    REQUIRE(fa.mean() == Approx(sum / cnt).epsilon(1e-12));
}

TEST_CASE("time_average: constants, decay to zero, stationarity of windows") {
    const Params p = mk_params(16, 16, 0.02);
    const Grid g(p.nx, p.nz, p.aspect_xi);
    const Lifting lift = Lifting::zero(g);
    std::mt19937_64 eng(62);
    State u0 = tst::random_smooth_state(g, eng);
    auto recs = integrate_with_records(p, {}, lift, u0, 400); // unforced decay to rest

    const double c = time_average(recs, [](const DiagnosticsRecord&) { return 4.25; }, 0.0, 8.0);
    REQUIRE(c == Approx(4.25).epsilon(1e-14));

    const double late_energy =
        time_average(recs, [](const DiagnosticsRecord& r) { return r.energy; }, 6.0, 8.0);
    REQUIRE(late_energy < 1e-8);

    REQUIRE_THROWS_AS(time_average(recs, [](const DiagnosticsRecord&) { return 1.0; }, 100.0, 101.0),
                      std::invalid_argument);

    // tail weighting emphasises late samples of an increasing signal
    const double plain = time_average(recs, [](const DiagnosticsRecord& r) { return r.t; }, 0.0,
                                      8.0, LimitStyle::Plain);
    const double tail = time_average(recs, [](const DiagnosticsRecord& r) { return r.t; }, 0.0,
                                     8.0, LimitStyle::TailWeighted);
    REQUIRE(tail > plain);
}

TEST_CASE("absorbing ball report: identical inputs agree, short runs rejected") {
    const Params p = mk_params(16, 16, 0.02);
    const Grid g(p.nx, p.nz, p.aspect_xi);
    BoundaryFlux flux;
    flux.qt = {{1, 0.5, 0.0}};
    const Lifting lift = build_lifting(g, flux, 0.25, p, {});
    State u0 = make_random_state(g, lift, 1.0, 9);
    auto recs = integrate_with_records(p, flux, lift, u0, 200);
    const auto rep = absorbing_ball_report(recs, recs);
    REQUIRE(rep.agree);
    REQUIRE(rep.late_sup_a == rep.late_sup_b);
    REQUIRE(rep.entry_time_a == rep.entry_time_b);

    std::vector<DiagnosticsRecord> tiny(recs.begin(), recs.begin() + 3);
    REQUIRE_THROWS_AS(absorbing_ball_report(tiny, recs), std::invalid_argument);

    // unforced decay from different amplitudes: both suprema tend to zero
    const Lifting zl = Lifting::zero(g);
    std::mt19937_64 eng(63);
    State a0 = tst::random_smooth_state(g, eng, 1.0);
    State b0 = a0;
    for (auto* f : {&b0.omega, &b0.temp, &b0.salt, &b0.psi}) (*f) *= 3.0;
    auto ra = integrate_with_records(p, {}, zl, a0, 500);
    auto rb = integrate_with_records(p, {}, zl, b0, 500);
    REQUIRE(ra.back().gn_combined < 1e-12);
    REQUIRE(rb.back().gn_combined < 1e-12);
}

TEST_CASE("delta scaling report: steady degenerate, diffusive run scales like k") {
    const Params p1 = mk_params(16, 16, 0.02);
    const Grid g(p1.nx, p1.nz, p1.aspect_xi);
    const Lifting lift = Lifting::zero(g);

    // steady zero state: degenerate window
    {
        auto rz = integrate_with_records(p1, {}, lift, State::zeros(g), 60);
        const auto rep = delta_scaling_report(rz, rz, 0.5, 1.2);
        REQUIRE(rep.degenerate);
    }

    // single-mode diffusive decay: |dU| scales like k
    State u0 = State::zeros(g);
    constexpr double pi = std::numbers::pi;
    u0.temp = sample(g, FieldKind::NeumannZ,
                     [&](double x, double) { return std::cos(2.0 * pi * x / g.xi); });
    u0.salt = u0.temp;
    auto coarse = integrate_with_records(p1, {}, lift, u0, 50); // to t = 1
    Params p2 = p1;
    p2.k = 0.01;
    auto fine = integrate_with_records(p2, {}, lift, u0, 100);
    const auto rep = delta_scaling_report(coarse, fine, 0.75, 1.0);
    REQUIRE_FALSE(rep.degenerate);
    REQUIRE(rep.exponent == Approx(1.0).margin(0.15));
}

TEST_CASE("record columns and by_name agree") {
    DiagnosticsRecord r;
    r.energy = 7.5;
    r.n = 12;
    REQUIRE(r.by_name("energy") == 7.5);
    REQUIRE(r.by_name("n") == 12.0);
    REQUIRE_THROWS_AS(r.by_name("nonexistent"), std::invalid_argument);
    REQUIRE(r.row().size() == DiagnosticsRecord::columns().size());
}
