#pragma once

#include <filesystem>
#include <iostream>

#include "ddc2d/config.hpp"
#include "ddc2d/diagnostics.hpp"
#include "ddc2d/random_ic.hpp"
#include "ddc2d/snapshot.hpp"

namespace ddc {

// ---------------------------------------------------------------------------
// Diagnostics CSV (plain decimal, 17 significant digits, deterministic)
// ---------------------------------------------------------------------------

inline void write_csv_header(std::ostream& out) {
    const auto& cols = DiagnosticsRecord::columns();
    for (std::size_t i = 0; i < cols.size(); ++i)
        out << cols[i] << (i + 1 < cols.size() ? "," : "\n");
}

inline void write_csv_row(std::ostream& out, const DiagnosticsRecord& r) {
    const auto vals = r.row();
    for (std::size_t i = 0; i < vals.size(); ++i) {
        if (i == 0)
            out << r.n; // integer column
        else
            out << detail::fmt17(vals[i]);
        out << (i + 1 < vals.size() ? "," : "\n");
    }
}

inline void write_csv(const std::string& path, std::span<const DiagnosticsRecord> recs) {
    std::ofstream out(path, std::ios::trunc);
    if (!out)
        throw ConfigError("cannot open '" + path + "' for writing");
    write_csv_header(out);
    for (const auto& r : recs)
        write_csv_row(out, r);
}

inline std::vector<DiagnosticsRecord> read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open diagnostics CSV '" + path + "'");
    std::string line;
    if (!std::getline(in, line))
        throw ConfigError("empty diagnostics CSV");
    const auto& cols = DiagnosticsRecord::columns();
    {
        std::string expect;
        for (std::size_t i = 0; i < cols.size(); ++i)
            expect += cols[i] + (i + 1 < cols.size() ? "," : "");
        if (line != expect)
            throw ConfigError("diagnostics CSV header does not match this build");
    }
    std::vector<DiagnosticsRecord> out;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<double> vals;
        std::size_t pos = 0;
        while (pos <= line.size()) {
            const auto comma = line.find(',', pos);
            const std::string tok = line.substr(pos, comma == std::string::npos ? std::string::npos
                                                                                : comma - pos);
            vals.push_back(detail::parse_double(tok, lineno));
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
        if (vals.size() != cols.size())
            throw ConfigError("wrong number of CSV columns", lineno);
        DiagnosticsRecord r;
        std::size_t i = 0;
        r.n = static_cast<std::int64_t>(vals[i++]);
        r.t = vals[i++];
        r.l2_omega = vals[i++]; r.l2_temp = vals[i++]; r.l2_salt = vals[i++];
        r.h1_omega_hat = vals[i++]; r.h1_temp_hat = vals[i++]; r.h1_salt_hat = vals[i++];
        r.lap_omega = vals[i++]; r.lap_temp = vals[i++]; r.lap_salt = vals[i++];
        r.gn_omega = vals[i++]; r.gn_temp = vals[i++]; r.gn_salt = vals[i++]; r.gn_combined = vals[i++];
        r.d_omega = vals[i++]; r.d_temp = vals[i++]; r.d_salt = vals[i++]; r.du_sq = vals[i++];
        r.mean_omega = vals[i++]; r.mean_temp = vals[i++]; r.mean_salt = vals[i++];
        r.momega_bound = vals[i++]; r.momega_interp = vals[i++];
        r.k_margin = vals[i++];
        r.f1_sq = vals[i++]; r.f2_sq = vals[i++];
        r.energy = vals[i++]; r.grad_temp_sq = vals[i++]; r.nusselt_top = vals[i++];
        out.push_back(r);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Run assembly
// ---------------------------------------------------------------------------

struct Prepared {
    Grid grid;
    Params params;
    ConstantsConfig constants;
    BoundaryFlux flux;
    Lifting lifting;
    State u0, u1;
    RunMonitors monitors;
    std::vector<std::string> warnings;
};

inline Params params_from_config(const Config& cfg) {
    Params p;
    p.prandtl = cfg.prandtl;
    p.lewis_beta = cfg.lewis_beta;
    p.aspect_xi = cfg.aspect_xi;
    p.nx = cfg.nx;
    p.nz = cfg.nz;
    p.k = cfg.dt;
    p.nu_coef = nu_shift(p, cfg.constants);
    if (p.nu_coef * p.k > 1.0)
        throw ConstraintError("timestep violates nu*k <= 1 required for the two-level norm");
    p.validate();
    return p;
}

/// Build grid, lifting and both starting levels from a validated
/// config. Startup constraint failures surface as ConstraintError.
inline Prepared prepare_run(const Config& cfg) {
    Prepared pr;
    pr.constants = cfg.constants;
    pr.params = params_from_config(cfg);
    pr.grid = Grid(cfg.nx, cfg.nz, cfg.aspect_xi);
    pr.flux = cfg.flux;
    pr.flux.validate(cfg.nx);

    if (cfg.lifting_epsilon < 0.0) {
        pr.lifting = auto_epsilon(pr.grid, pr.flux, pr.params, pr.constants);
    } else {
        pr.lifting = build_lifting(pr.grid, pr.flux, cfg.lifting_epsilon, pr.params, pr.constants);
        if (!pr.lifting.satisfied()) {
            std::string msg = "lifting constraints violated at epsilon = " +
                              detail::fmt17(cfg.lifting_epsilon) + ":";
            for (const auto& v : pr.lifting.violations()) msg += " " + v;
            throw ConstraintError(msg);
        }
    }

    bool have_u1 = false;
    switch (cfg.ic_kind) {
    case IcKind::Zero:
        pr.u0 = State::zeros(pr.grid);
        // rest state consistent with the wall data
        pr.u0.omega = pr.lifting.Omega;
        project_mean_interior(pr.grid, pr.u0.omega);
        pr.u0.psi = poisson_channel(pr.grid, pr.u0.omega);
        break;
    case IcKind::Random:
        pr.u0 = make_random_state(pr.grid, pr.lifting, cfg.ic_amplitude, cfg.seed);
        break;
    case IcKind::File: {
        Snapshot snap = read_snapshot(cfg.ic_path);
        if (snap.nx != cfg.nx || snap.nz != cfg.nz)
            throw ConfigError("snapshot resolution " + std::to_string(snap.nx) + "x" +
                              std::to_string(snap.nz) + " does not match config");
        const auto level_index = [&](double t) {
            const double nd = t / cfg.dt;
            const std::int64_t n = static_cast<std::int64_t>(std::llround(nd));
            if (std::abs(nd - static_cast<double>(n)) > 1e-6)
                throw ConfigError("snapshot time is not a multiple of dt; restart needs the original dt");
            return n;
        };
        if (snap.levels.size() == 2) {
            pr.u1 = std::move(snap.levels[1]);
            pr.u0 = std::move(snap.levels[0]);
            pr.u1.n = level_index(snap.time);
            pr.u1.time = snap.time;
            pr.u0.n = pr.u1.n - 1;
            pr.u0.time = static_cast<double>(pr.u0.n) * cfg.dt;
            have_u1 = true;
        } else {
            pr.u0 = std::move(snap.levels[0]);
            pr.u0.n = level_index(snap.time);
            pr.u0.time = snap.time;
        }
        break;
    }
    }
    if (!have_u1)
        pr.u1 = Stepper::bootstrap(pr.params, pr.flux, pr.u0);

    pr.monitors = make_run_monitors(pr.grid, pr.u0, pr.u1, pr.lifting, pr.params, pr.constants);
    if (pr.params.k > pr.monitors.k_max) {
        const std::string msg = "dt = " + detail::fmt17(pr.params.k) +
                                " exceeds the monitored restriction k_max = " +
                                detail::fmt17(pr.monitors.k_max);
        if (cfg.strict)
            throw ConstraintError(msg);
        pr.warnings.push_back("warning: " + msg);
    }
    return pr;
}

struct RunOutput {
    std::vector<DiagnosticsRecord> records;
    std::string csv_path;
    std::string final_snapshot_path;
    std::vector<std::string> warnings;
    Prepared setup; // grid, lifting, monitors for post-processing
};

/// Full simulation: assemble, integrate to t_end, stream diagnostics to
/// output.dir/diagnostics.csv and snapshots on the configured cadence.
/// On blow-up the diagnostics gathered so far are flushed before the
/// error propagates.
inline RunOutput run_simulation(const Config& cfg) {
    RunOutput out;
    out.setup = prepare_run(cfg);
    Prepared& pr = out.setup;
    out.warnings = pr.warnings;

    std::filesystem::create_directories(cfg.output_dir);
    out.csv_path = cfg.output_dir + "/diagnostics.csv";
    out.final_snapshot_path = cfg.output_dir + "/final.ddc";

    const double steps_exact = cfg.t_end / cfg.dt;
    const std::int64_t want_n = static_cast<std::int64_t>(std::llround(steps_exact));
    Stepper machine(pr.params, pr.flux, pr.u0, pr.u1);
    const std::int64_t todo = std::max<std::int64_t>(0, want_n - machine.curr().n);

    auto emit = [&](const Stepper& m) {
        out.records.push_back(record(pr.grid, m.prev(), m.curr(), pr.lifting, pr.params,
                                     pr.constants, pr.flux, pr.monitors));
    };
    auto snap_path = [&](std::int64_t n) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "/snapshot_%08lld.ddc", static_cast<long long>(n));
        return cfg.output_dir + buf;
    };

    emit(machine); // initial pair
    try {
        for (std::int64_t s = 0; s < todo; ++s) {
            machine.step();
            if (machine.curr().n % cfg.diag_every == 0)
                emit(machine);
            if (cfg.snapshot_every > 0 && machine.curr().n % cfg.snapshot_every == 0) {
                const State levels[2] = {machine.prev(), machine.curr()};
                write_snapshot(snap_path(machine.curr().n), pr.grid, levels);
            }
        }
    } catch (const BlowupError&) {
        write_csv(out.csv_path, out.records);
        throw;
    }
    write_csv(out.csv_path, out.records);
    const State levels[2] = {machine.prev(), machine.curr()};
    write_snapshot(out.final_snapshot_path, pr.grid, levels);
    return out;
}

// ---------------------------------------------------------------------------
// Timestep sweep: difference scaling and statistics convergence
// ---------------------------------------------------------------------------

struct SweepReport {
    std::vector<double> k;
    std::vector<std::string> run_dirs;
    std::vector<DeltaScalingReport> delta_scaling; // between consecutive k
    std::vector<double> avg_energy;                // late-window averages per k
    std::vector<double> avg_grad_temp_sq;
};

/// Run the configured case at each timestep (k_list strictly
/// decreasing) into per-run directories, then compare late-window
/// difference norms between consecutive runs and the convergence of
/// time-averaged functionals.
inline SweepReport sweep_dt(const Config& base, std::span<const double> k_list) {
    if (k_list.size() < 2)
        throw ConfigError("sweep-dt: need at least two timesteps");
    SweepReport rep;
    std::vector<std::vector<DiagnosticsRecord>> all;
    double prev_k = std::numeric_limits<double>::infinity();
    for (double k : k_list) {
        if (!(k > 0.0) || k >= prev_k)
            throw ConfigError("sweep-dt: k list must be positive and strictly decreasing");
        prev_k = k;
        Config cfg = base;
        cfg.dt = k;
        char kname[32];
        std::snprintf(kname, sizeof kname, "/k_%.6g", k);
        cfg.output_dir = base.output_dir + kname;
        RunOutput ro = run_simulation(cfg);
        rep.k.push_back(k);
        rep.run_dirs.push_back(cfg.output_dir);
        const double t_lo = 0.75 * base.t_end, t_hi = base.t_end;
        rep.avg_energy.push_back(time_average(ro.records,
                                              [](const DiagnosticsRecord& r) { return r.energy; },
                                              t_lo, t_hi));
        rep.avg_grad_temp_sq.push_back(
            time_average(ro.records, [](const DiagnosticsRecord& r) { return r.grad_temp_sq; },
                         t_lo, t_hi));
        all.push_back(std::move(ro.records));
    }
    for (std::size_t i = 0; i + 1 < all.size(); ++i)
        rep.delta_scaling.push_back(
            delta_scaling_report(all[i], all[i + 1], 0.75 * base.t_end, base.t_end));
    return rep;
}

} // namespace ddc
