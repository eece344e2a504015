// Command-line front end: batch runs, the periodic validation suite,
// the two-level norm identity checks, timestep sweeps and CSV
// post-processing.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <random>

#include "ddc2d/ddc2d.hpp"

namespace {

std::vector<double> parse_k_list(const std::string& spec) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos <= spec.size()) {
        const auto comma = spec.find(',', pos);
        const std::string tok =
            spec.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        if (!tok.empty())
            out.push_back(ddc::detail::parse_double(tok, 0));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    if (out.empty())
        throw ddc::ConfigError("empty k list");
    return out;
}

int cmd_run(const std::string& config_path) {
    const ddc::Config cfg = ddc::load_config(config_path);
    ddc::RunOutput out = ddc::run_simulation(cfg);
    for (const auto& w : out.warnings)
        std::cerr << w << "\n";
    const auto& last = out.records.back();
    std::cout << "run: " << last.n << " steps to t = " << last.t << "\n";
    std::cout << "  |omega| = " << last.l2_omega << "  |T| = " << last.l2_temp
              << "  |S| = " << last.l2_salt << "\n";
    std::cout << "  combined G-norm^2 = " << last.gn_combined << "\n";
    std::cout << "  k/k_max = " << last.k_margin << "\n";
    std::cout << "  diagnostics: " << out.csv_path << "\n";
    std::cout << "  restart:     " << out.final_snapshot_path << "\n";
    return 0;
}

int cmd_validate_nse(int n, double mu, double t_end, const std::string& k_spec) {
    const ddc::PeriodicGrid g(n, n);
    const auto k_list = parse_k_list(k_spec);
    bool ok = true;

    // Taylor-Green temporal order
    const ddc::Field w0 = ddc::sample(g, [](double x, double z) { return -2.0 * std::cos(x) * std::cos(z); });
    auto oracle = [&](double t) {
        ddc::Field w = w0;
        w *= std::exp(-2.0 * mu * t);
        return w;
    };
    const auto study = ddc::nse::convergence_study(g, w0, mu, k_list, t_end, oracle);
    std::printf("Taylor-Green convergence (mu = %g, T = %g):\n", mu, t_end);
    for (std::size_t i = 0; i < study.k.size(); ++i)
        std::printf("  k = %-10.4g L2 error = %.6e\n", study.k[i], study.error[i]);
    const bool order_ok = study.slope >= 1.9 && study.slope <= 2.1;
    std::printf("  observed order %.4f  [%s]\n", study.slope, order_ok ? "ok" : "FAIL");
    ok = ok && order_ok;

    // Conservation and energy identities on random band-limited fields
    std::mt19937_64 eng(7);
    auto random_band = [&]() {
        ddc::Field f = ddc::Field::zeros(g);
        const int c = ddc::nse::dealias_cutoff(n) / 2;
        for (int mx = -c; mx <= c; ++mx)
            for (int mz = -c; mz <= c; ++mz) {
                if (mx == 0 && mz == 0) continue;
                const double a = ddc::detail::normal_draw(eng) * std::exp(-0.3 * (std::abs(mx) + std::abs(mz)));
                const double ph = 2.0 * std::numbers::pi * (static_cast<double>(eng()) / 18446744073709551616.0);
                for (int j = 0; j < g.nz; ++j)
                    for (int i = 0; i < g.nx; ++i)
                        f.at(i, j) += a * std::cos(mx * g.x(i) + mz * g.z(j) + ph);
            }
        return ddc::subtract_mean(g, f);
    };
    double worst_skew = 0.0, worst_mean = 0.0, worst_id = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const ddc::Field w = random_band();
        const ddc::Field p = ddc::poisson_periodic(g, w);
        const ddc::Field j = ddc::nse::jacobian(g, p, w);
        const double scale = ddc::l2_norm(g, w) * (1.0 + ddc::h1_seminorm(g, p));
        worst_skew = std::max(worst_skew, std::abs(ddc::l2_inner(g, j, w)) / (scale * scale + 1e-30));
        worst_mean = std::max(worst_mean, std::abs(ddc::quadrature(g, j)) / (scale + 1e-30));
        const ddc::Field w2 = random_band();
        worst_id = std::max(worst_id,
                            ddc::dissipation_identity_residual(g, w, w2) /
                                (ddc::h1_seminorm_sq(g, w) + ddc::h1_seminorm_sq(g, w2) + 1e-30));
    }
    std::printf("Jacobian conservation: skew %.3e  mean %.3e  [%s]\n", worst_skew, worst_mean,
                (worst_skew < 1e-12 && worst_mean < 1e-12) ? "ok" : "FAIL");
    std::printf("Dissipation identity residual: %.3e  [%s]\n", worst_id,
                worst_id < 1e-12 ? "ok" : "FAIL");
    ok = ok && worst_skew < 1e-12 && worst_mean < 1e-12 && worst_id < 1e-12;
    return ok ? 0 : 1;
}

int cmd_gstab_check() {
    bool ok = true;
    std::vector<double> grid;
    for (int i = 0; i <= 100; ++i)
        grid.push_back(i / 100.0);
    const auto eq = ddc::equivalence_constants(grid);
    const double err_minus = std::abs(eq.c_minus - ddc::gnorm_c_minus());
    const double err_plus = std::abs(eq.c_plus - ddc::gnorm_c_plus());
    std::printf("equivalence constants: c- = %.12f (err %.2e), c+ = %.12f (err %.2e)  [%s]\n",
                eq.c_minus, err_minus, eq.c_plus, err_plus,
                (err_minus < 1e-12 && err_plus < 1e-12) ? "ok" : "FAIL");
    ok = ok && err_minus < 1e-12 && err_plus < 1e-12;

    const ddc::Grid g(32, 16, 1.0);
    std::mt19937_64 eng(11);
    auto rnd = [&](ddc::FieldKind kind) {
        ddc::Field f = ddc::Field::zeros(g, kind);
        for (double& x : f.v) x = ddc::detail::normal_draw(eng);
        return f;
    };
    double worst = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        const auto f = rnd(ddc::FieldKind::NeumannZ);
        const auto h = rnd(ddc::FieldKind::NeumannZ);
        const auto w = rnd(ddc::FieldKind::NeumannZ);
        const double nu_k = trial / 200.0;
        const double scale = ddc::l2_norm_sq(g, f) + ddc::l2_norm_sq(g, h) + ddc::l2_norm_sq(g, w);
        worst = std::max(worst, ddc::hs_identity_residual(g, f, h, w, nu_k) / (scale + 1e-30));
    }
    std::printf("two-level energy identity residual: %.3e  [%s]\n", worst,
                worst < 1e-12 ? "ok" : "FAIL");
    ok = ok && worst < 1e-12;

    // recursion lemma spot check
    std::vector<double> r(400, 0.0);
    for (auto& x : r) x = 0.01 * (static_cast<double>(eng()) / 18446744073709551616.0);
    double x = 1.0, y = 0.25, y_prev = 0.1;
    const double mu = 0.5, delta = 0.7, eps = mu / 8.0;
    bool dominated = true;
    for (int nstep = 1; nstep <= 200; ++nstep) {
        const double s = x / (1.0 + delta) + eps * y + eps * y_prev + r[nstep - 1];
        const double theta = 0.5;
        y_prev = y;
        x = (1.0 - theta) * s;
        y = theta * s / mu;
        const double bound = ddc::recursion_bound(1.0, 0.25, 0.1, mu, delta, eps, r, nstep);
        if (x + mu * y > bound * (1.0 + 1e-12))
            dominated = false;
    }
    std::printf("three-term recursion bound dominates synthesised trajectory  [%s]\n",
                dominated ? "ok" : "FAIL");
    ok = ok && dominated;
    return ok ? 0 : 1;
}

int cmd_sweep(const std::string& config_path, const std::string& k_spec) {
    const ddc::Config cfg = ddc::load_config(config_path);
    const auto k_list = parse_k_list(k_spec);
    const ddc::SweepReport rep = ddc::sweep_dt(cfg, k_list);
    std::printf("sweep-dt over %zu timesteps, late window [%.4g, %.4g]:\n", rep.k.size(),
                0.75 * cfg.t_end, cfg.t_end);
    for (std::size_t i = 0; i < rep.k.size(); ++i)
        std::printf("  k = %-10.4g <energy> = %.8e  <|grad T|^2> = %.8e   (%s)\n", rep.k[i],
                    rep.avg_energy[i], rep.avg_grad_temp_sq[i], rep.run_dirs[i].c_str());
    for (std::size_t i = 0; i < rep.delta_scaling.size(); ++i) {
        const auto& d = rep.delta_scaling[i];
        if (d.degenerate)
            std::printf("  k %-8.4g -> %-8.4g : sup|dU| degenerate (steady window)\n", rep.k[i],
                        rep.k[i + 1]);
        else
            std::printf("  k %-8.4g -> %-8.4g : sup|dU| %.4e -> %.4e, exponent %.3f\n", rep.k[i],
                        rep.k[i + 1], d.sup_coarse, d.sup_fine, d.exponent);
    }
    return 0;
}

int cmd_stats(const std::string& csv_path, const std::string& column, double t0, double t1,
              const std::string& style) {
    const auto recs = ddc::read_csv(csv_path);
    const ddc::LimitStyle ls = style == "tail" ? ddc::LimitStyle::TailWeighted : ddc::LimitStyle::Plain;
    const double avg = ddc::time_average(
        recs, [&](const ddc::DiagnosticsRecord& r) { return r.by_name(column); }, t0, t1, ls);
    ddc::FunctionalAverage fa(column, t0, t1);
    for (const auto& r : recs)
        fa.add(r.t, r.by_name(column));
    std::printf("%s over [%g, %g] (%s): mean = %.10e, variance = %.10e, samples = %zu\n",
                column.c_str(), t0, t1, style.c_str(), avg, fa.variance(), fa.count());
    return 0;
}

int cmd_lifting_report(const std::string& config_path) {
    const ddc::Config cfg = ddc::load_config(config_path);
    const ddc::Params p = ddc::params_from_config(cfg);
    const ddc::Grid g(cfg.nx, cfg.nz, cfg.aspect_xi);
    const ddc::Lifting lift =
        cfg.lifting_epsilon < 0.0 ? ddc::auto_epsilon(g, cfg.flux, p, cfg.constants)
                                  : ddc::build_lifting(g, cfg.flux, cfg.lifting_epsilon, p, cfg.constants);
    const auto& n = lift.norms;
    std::printf("lifting at epsilon = %.6g%s\n", lift.epsilon,
                cfg.lifting_epsilon < 0.0 ? " (auto)" : "");
    std::printf("  |Omega|    = %.6e   |grad Omega| = %.6e   |Lap Omega| = %.6e\n", n.omega_l2,
                n.omega_h1, n.omega_lap);
    std::printf("  |Omega|_oo = %.6e   |grad Psi|_oo = %.6e\n", n.omega_sup, n.psi_grad_sup);
    std::printf("  |T_Q|      = %.6e   |grad T_Q|   = %.6e   |Lap T_Q|   = %.6e\n", n.tq_l2,
                n.tq_h1, n.tq_lap);
    std::printf("  |S_Q|      = %.6e   |grad S_Q|   = %.6e   |Lap S_Q|   = %.6e\n", n.sq_l2,
                n.sq_h1, n.sq_lap);
    std::printf("  wall L2 norms: |Q_u| = %.6e  |Q_T| = %.6e  |Q_S| = %.6e\n",
                ddc::BoundaryFlux::wall_l2_norm(cfg.flux.qu, cfg.aspect_xi),
                ddc::BoundaryFlux::wall_l2_norm(cfg.flux.qt, cfg.aspect_xi),
                ddc::BoundaryFlux::wall_l2_norm(cfg.flux.qs, cfg.aspect_xi));
    std::printf("  margins: |Omega|^2 %.4e   |T_Q|^2 %.4e   |S_Q|^2 %.4e   [%s]\n",
                lift.margins[0], lift.margins[1], lift.margins[2],
                lift.satisfied() ? "ok" : "VIOLATED");
    return lift.satisfied() ? 0 : 3;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"2d double-diffusive convection solver (BDF2 one-leg scheme)"};
    app.require_subcommand(1);

    std::string config_path, k_spec = "0.01,0.005,0.0025", csv_path, column = "energy",
                             style = "plain";
    int nse_n = 64;
    double nse_mu = 1.0, nse_tend = 0.5, t0 = 0.0, t1 = 1e300;

    auto* run = app.add_subcommand("run", "integrate a configured case");
    run->add_option("--config", config_path, "config file")->required();

    auto* vnse = app.add_subcommand("validate-nse", "periodic 2d NSE validation suite");
    vnse->add_option("--n", nse_n, "grid points per direction");
    vnse->add_option("--mu", nse_mu, "viscosity");
    vnse->add_option("--t-end", nse_tend, "final time");
    vnse->add_option("--k", k_spec, "comma-separated decreasing timesteps");

    auto* gst = app.add_subcommand("gstab-check", "two-level norm identity and constant suite");
    (void)gst;

    auto* sweep = app.add_subcommand("sweep-dt", "difference scaling and statistics across timesteps");
    sweep->add_option("--config", config_path, "config file")->required();
    sweep->add_option("--k", k_spec, "comma-separated decreasing timesteps");

    auto* stats = app.add_subcommand("stats", "windowed averages of a diagnostics CSV");
    stats->add_option("--csv", csv_path, "diagnostics CSV")->required();
    stats->add_option("--column", column, "column name");
    stats->add_option("--t0", t0, "window start");
    stats->add_option("--t1", t1, "window end");
    stats->add_option("--style", style, "plain | tail");

    auto* lrep = app.add_subcommand("lifting-report", "boundary lifting norms and margins");
    lrep->add_option("--config", config_path, "config file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(config_path);
        if (vnse->parsed()) return cmd_validate_nse(nse_n, nse_mu, nse_tend, k_spec);
        if (gst->parsed()) return cmd_gstab_check();
        if (sweep->parsed()) return cmd_sweep(config_path, k_spec);
        if (stats->parsed()) return cmd_stats(csv_path, column, t0, t1, style);
        if (lrep->parsed()) return cmd_lifting_report(config_path);
    } catch (const ddc::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const ddc::ConstraintError& e) {
        std::cerr << "constraint violation: " << e.what() << "\n";
        return 3;
    } catch (const ddc::BlowupError& e) {
        std::cerr << "blow-up: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
