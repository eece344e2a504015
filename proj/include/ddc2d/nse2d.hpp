#pragma once

#include <functional>

#include "ddc2d/elliptic.hpp"
#include "ddc2d/gstability.hpp"

namespace ddc::nse {

/// 2/3-rule cutoff: the largest kept |m| with 3m < n, so that products
/// of two retained modes never alias back into the retained set.
inline int dealias_cutoff(int n) { return (n - 1) / 3; }

/// Galerkin truncation to the dealiased ball.
inline Field dealias(const PeriodicGrid& g, const Field& f) {
    const int cx = dealias_cutoff(g.nx);
    const int cz = dealias_cutoff(g.nz);
    return detail::spectral_apply(g, f, [&](std::complex<double>& c, int mx, int fz, double, double) {
        if (mx > cx || std::abs(fz) > cz) c = 0.0;
    });
}

/// Pseudo-spectral Jacobian d(f,s) = fx sz - sx fz with 2/3-rule
/// dealiasing. For inputs inside the dealiased ball this equals the
/// exact Galerkin projection of the continuum Jacobian, so the three
/// conservation identities hold to roundoff.
inline Field jacobian(const PeriodicGrid& g, const Field& f, const Field& s) {
    Field fx = dx_spectral(g, f), fz = dz_spectral(g, f);
    Field sx = dx_spectral(g, s), sz = dz_spectral(g, s);
    Field prod(f.nx, f.rows, f.kind);
    for (std::size_t i = 0; i < prod.v.size(); ++i)
        prod.v[i] = fx.v[i] * sz.v[i] - sx.v[i] * fz.v[i];
    return dealias(g, prod);
}

namespace detail_nse {

template <class Mult>
Field solve_modes(const PeriodicGrid& g, const Field& rhs, Mult&& mult) {
    return ddc::detail::spectral_apply(g, rhs, std::forward<Mult>(mult));
}

} // namespace detail_nse

/// One step of the BDF2 one-leg scheme for periodic 2d vorticity:
/// (3 w^{n+1} - 4 w^n + w^{n-1})/(2k) + d(2 psi^n - psi^{n-1}, 2 w^n - w^{n-1})
///   = mu Lap w^{n+1} + f.
/// Inputs are expected band-limited to the dealiased ball with zero mean.
inline Field step(const PeriodicGrid& g, const Field& prev, const Field& curr, double mu,
                  double k, const Field& f) {
    Field psi_p = poisson_periodic(g, prev);
    Field psi_c = poisson_periodic(g, curr);
    Field pex = psi_c;
    pex *= 2.0;
    pex -= psi_p;
    Field wex = curr;
    wex *= 2.0;
    wex -= prev;
    Field adv = jacobian(g, pex, wex);

    Field rhs = curr;
    rhs *= 4.0;
    rhs -= prev;
    for (std::size_t i = 0; i < rhs.v.size(); ++i)
        rhs.v[i] += -2.0 * k * adv.v[i] + 2.0 * k * f.v[i];

    return detail_nse::solve_modes(g, rhs, [&](std::complex<double>& c, int mx, int fz, double kx, double kz) {
        if (mx == 0 && fz == 0) {
            c = 0.0; // zero-integral normalisation
            return;
        }
        c /= 3.0 + 2.0 * k * mu * (kx * kx + kz * kz);
    });
}

/// Startup step: Crank-Nicolson diffusion with explicit advection,
/// local error O(k^3) for linear dynamics.
inline Field bootstrap(const PeriodicGrid& g, const Field& w0, double mu, double k,
                       const Field& f) {
    Field psi0 = poisson_periodic(g, w0);
    Field adv = jacobian(g, psi0, w0);
    Field rhs = w0;
    for (std::size_t i = 0; i < rhs.v.size(); ++i)
        rhs.v[i] += k * (f.v[i] - adv.v[i]);
    Field half = detail_nse::solve_modes(g, w0, [&](std::complex<double>& c, int, int, double kx, double kz) {
        c *= -0.5 * k * mu * (kx * kx + kz * kz);
    });
    rhs += half;
    return detail_nse::solve_modes(g, rhs, [&](std::complex<double>& c, int mx, int fz, double kx, double kz) {
        if (mx == 0 && fz == 0) {
            c = 0.0;
            return;
        }
        c /= 1.0 + 0.5 * k * mu * (kx * kx + kz * kz);
    });
}

struct Trajectory {
    Field prev, curr;
    std::vector<double> t;        // time of level n, n = 1..N
    std::vector<double> delta_l2; // |w^n - w^{n-1}|
    std::vector<double> gnorm;    // <w^{n-1}, w^n>^2 at shift nu k
};

/// Integrate n_steps of the scheme from w0 (bootstrap provides the
/// second level). nu_k sets the recorded two-level norm shift.
inline Trajectory run(const PeriodicGrid& g, const Field& w0, double mu, double k, int n_steps,
                      const Field& f, double nu_k = 0.0) {
    Trajectory tr;
    tr.prev = subtract_mean(g, w0);
    tr.curr = bootstrap(g, tr.prev, mu, k, f);
    const double scale = std::max(1.0, l2_norm(g, tr.prev));
    tr.t.push_back(k);
    tr.delta_l2.push_back(l2_norm(g, tr.curr - tr.prev));
    tr.gnorm.push_back(gnorm_sq(g, tr.prev, tr.curr, nu_k));
    for (int n = 1; n < n_steps; ++n) {
        Field next = step(g, tr.prev, tr.curr, mu, k, f);
        tr.prev = std::move(tr.curr);
        tr.curr = std::move(next);
        const double nn = l2_norm(g, tr.curr);
        if (!std::isfinite(nn) || nn > 1e8 * scale)
            throw BlowupError("periodic solver blow-up", n + 1);
        tr.t.push_back((n + 1) * k);
        tr.delta_l2.push_back(l2_norm(g, tr.curr - tr.prev));
        tr.gnorm.push_back(gnorm_sq(g, tr.prev, tr.curr, nu_k));
    }
    return tr;
}

struct DeltaSummary {
    std::vector<double> deltas;
    double late_sup = 0.0; // sup over the trailing window
};

/// Per-step difference norms |w^n - w^{n-1}| with the sup over the last
/// window_frac of the run.
inline DeltaSummary delta_monitor(const Trajectory& tr, double window_frac = 0.25) {
    if (tr.delta_l2.size() < 2)
        throw std::logic_error("delta_monitor: need at least two levels");
    DeltaSummary out;
    out.deltas = tr.delta_l2;
    const std::size_t start =
        static_cast<std::size_t>((1.0 - window_frac) * static_cast<double>(out.deltas.size()));
    for (std::size_t i = std::min(start, out.deltas.size() - 1); i < out.deltas.size(); ++i)
        out.late_sup = std::max(out.late_sup, out.deltas[i]);
    return out;
}

struct ConvergenceStudy {
    std::vector<double> k;
    std::vector<double> error;
    double slope = 0.0; // least-squares slope of log error vs log k
};

/// Integrate to T_end for each timestep and compare against an exact
/// solution. Each k must divide T_end.
inline ConvergenceStudy convergence_study(const PeriodicGrid& g, const Field& w0, double mu,
                                          std::span<const double> k_list, double t_end,
                                          const std::function<Field(double)>& oracle,
                                          const Field* forcing = nullptr) {
    if (k_list.size() < 2)
        throw ConfigError("convergence_study: need at least two timesteps");
    ConvergenceStudy out;
    Field f = forcing ? *forcing : Field::zeros(g);
    double prev_k = std::numeric_limits<double>::infinity();
    for (double k : k_list) {
        if (!(k > 0.0) || k >= prev_k)
            throw ConfigError("convergence_study: k_list must be positive and strictly decreasing");
        prev_k = k;
        const double steps_exact = t_end / k;
        const int n = static_cast<int>(std::llround(steps_exact));
        if (n < 2 || std::abs(n * k - t_end) > 1e-9 * t_end)
            throw ConfigError("convergence_study: T_end must be an integer multiple of each k");
        Trajectory tr = run(g, w0, mu, k, n, f);
        out.k.push_back(k);
        out.error.push_back(l2_norm(g, tr.curr - oracle(t_end)));
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double m = static_cast<double>(out.k.size());
    for (std::size_t i = 0; i < out.k.size(); ++i) {
        const double lx = std::log(out.k[i]);
        const double ly = std::log(std::max(out.error[i], 1e-300));
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    out.slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    return out;
}

} // namespace ddc::nse
