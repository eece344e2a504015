#pragma once

#include <complex>
#include <map>
#include <memory>
#include <span>
#include <tuple>

#include "ddc2d/core.hpp"

namespace ddc {

namespace detail {

/// Constant-coefficient tridiagonal systems, one per x-mode, factored
/// once (Thomas algorithm) and reused. diag/sub are per-mode constants
/// except for boundary-row overrides.
struct TridiagBank {
    int n = 0;      // unknowns per system
    int modes = 0;  // number of x-modes
    std::vector<double> cp;    // modes*n, modified superdiagonal
    std::vector<double> inv;   // modes*n, 1/(diag - sub*cp_prev)
    std::vector<double> sub;   // per-mode subdiagonal value

    // diag_first/diag_last allow Neumann boundary-row modification
    void factor(int modes_, int n_, std::span<const double> diag_interior,
                std::span<const double> diag_first, std::span<const double> diag_last,
                std::span<const double> sub_) {
        modes = modes_;
        n = n_;
        cp.assign(static_cast<std::size_t>(modes) * n, 0.0);
        inv.assign(static_cast<std::size_t>(modes) * n, 0.0);
        sub.assign(sub_.begin(), sub_.end());
        for (int m = 0; m < modes; ++m) {
            auto* c = &cp[static_cast<std::size_t>(m) * n];
            auto* iv = &inv[static_cast<std::size_t>(m) * n];
            const double s = sub[m];
            double prev_c = 0.0;
            for (int j = 0; j < n; ++j) {
                double d = diag_interior[m];
                if (j == 0) d = diag_first[m];
                if (j == n - 1) d = diag_last[m];
                const double denom = d - s * prev_c;
                iv[j] = 1.0 / denom;
                c[j] = (j + 1 < n) ? s * iv[j] : 0.0;
                prev_c = c[j];
            }
        }
    }

    void solve(int m, std::complex<double>* rhs) const {
        const auto* c = &cp[static_cast<std::size_t>(m) * n];
        const auto* iv = &inv[static_cast<std::size_t>(m) * n];
        const double s = sub[m];
        rhs[0] *= iv[0];
        for (int j = 1; j < n; ++j)
            rhs[j] = (rhs[j] - s * rhs[j - 1]) * iv[j];
        for (int j = n - 2; j >= 0; --j)
            rhs[j] -= c[j] * rhs[j + 1];
    }
};

inline double kappa(const Grid& g, int m) { return 2.0 * std::numbers::pi * m / g.xi; }

} // namespace detail

// ---------------------------------------------------------------------------
// Discrete Laplacians (spectral d2/dx2 + second-order finite differences
// in z). These define the operators all solves and residual checks use.
// ---------------------------------------------------------------------------

/// Laplacian of a node field at interior nodes, using the stored wall
/// values. Wall rows of the result are zero.
inline Field apply_laplacian_node(const Grid& g, const Field& f) {
    if (f.kind != FieldKind::DirichletZ)
        throw std::invalid_argument("apply_laplacian_node expects a node field");
    Field out = d2x_spectral(g, f);
    const double ih2 = 1.0 / (g.hz() * g.hz());
    for (int i = 0; i < g.nx; ++i) {
        out.at(i, 0) = 0.0;
        out.at(i, g.nz) = 0.0;
    }
    for (int j = 1; j < g.nz; ++j)
        for (int i = 0; i < g.nx; ++i)
            out.at(i, j) += (f.at(i, j - 1) - 2.0 * f.at(i, j) + f.at(i, j + 1)) * ih2;
    return out;
}

/// Laplacian of a centre field with ghost rows eliminated through the
/// prescribed wall fluxes dz f(z=0) = qbot, dz f(z=1) = qtop (empty
/// spans mean zero flux).
inline Field apply_laplacian_center(const Grid& g, const Field& f,
                                    std::span<const double> qbot = {},
                                    std::span<const double> qtop = {}) {
    if (f.kind != FieldKind::NeumannZ)
        throw std::invalid_argument("apply_laplacian_center expects a centre field");
    Field out = d2x_spectral(g, f);
    const double h = g.hz();
    const double ih2 = 1.0 / (h * h);
    const int top = g.nz - 1;
    for (int j = 0; j < g.nz; ++j)
        for (int i = 0; i < g.nx; ++i) {
            double dzz;
            if (j == 0)
                dzz = (f.at(i, 1) - f.at(i, 0)) * ih2 - (qbot.empty() ? 0.0 : qbot[i] / h);
            else if (j == top)
                dzz = (f.at(i, top - 1) - f.at(i, top)) * ih2 + (qtop.empty() ? 0.0 : qtop[i] / h);
            else
                dzz = (f.at(i, j - 1) - 2.0 * f.at(i, j) + f.at(i, j + 1)) * ih2;
            out.at(i, j) += dzz;
        }
    return out;
}

// ---------------------------------------------------------------------------
// Channel Helmholtz: (a - b*Laplacian) u = rhs with wall data
// ---------------------------------------------------------------------------

/// Factored per-mode solver for (a - b*Laplacian) u = rhs on one of the
/// channel layouts. bdf2() gives the scheme operator 3 - 2kc*Laplacian;
/// semi_implicit_euler() gives 1 - kc*Laplacian for the bootstrap step.
/// Plans are immutable; solving twice with the same input is bitwise
/// reproducible.
class HelmholtzPlan {
  public:
    enum class Wall { Dirichlet, Neumann };

    static HelmholtzPlan bdf2(const Grid& g, double c, double k, Wall w) {
        return HelmholtzPlan(g, 3.0, 2.0 * k * c, c, k, w);
    }
    static HelmholtzPlan semi_implicit_euler(const Grid& g, double c, double k, Wall w) {
        return HelmholtzPlan(g, 1.0, k * c, c, k, w);
    }

    double a() const { return a_; }
    double b() const { return b_; }
    double diffusivity() const { return c_; }
    double timestep() const { return k_; }
    Wall wall() const { return wall_; }
    const Grid& grid() const { return g_; }

    /// bottom/top: physical wall data samples (values for Dirichlet
    /// walls, dz-fluxes for Neumann walls); empty means homogeneous.
    Field solve(const Field& rhs, std::span<const double> bottom = {},
                std::span<const double> top = {}) const {
        const FieldKind want = wall_ == Wall::Dirichlet ? FieldKind::DirichletZ : FieldKind::NeumannZ;
        if (rhs.kind != want || rhs.nx != g_.nx || rhs.rows != Field::rows_for(g_, want))
            throw std::invalid_argument("HelmholtzPlan::solve: rhs does not match plan layout");
        if ((!bottom.empty() && bottom.size() != static_cast<std::size_t>(g_.nx)) ||
            (!top.empty() && top.size() != static_cast<std::size_t>(g_.nx)))
            throw std::invalid_argument("HelmholtzPlan::solve: wall data size mismatch");

        const int nxc = g_.nx / 2 + 1;
        const int nsys = bank_.n;
        const auto& plan_rows = fft::row_fft(g_.nx, rhs.rows);
        std::vector<std::complex<double>> spec(static_cast<std::size_t>(nxc) * rhs.rows);
        plan_rows.forward(rhs.v.data(), spec.data());

        std::vector<std::complex<double>> bot_m(nxc, 0.0), top_m(nxc, 0.0);
        const auto& plan_one = fft::row_fft(g_.nx, 1);
        if (!bottom.empty()) plan_one.forward(bottom.data(), bot_m.data());
        if (!top.empty()) plan_one.forward(top.data(), top_m.data());

        const double h = g_.hz();
        const int j0 = wall_ == Wall::Dirichlet ? 1 : 0; // first unknown row in rhs indexing
        std::vector<std::complex<double>> work(nsys);
        std::vector<std::complex<double>> sol(static_cast<std::size_t>(nxc) * rhs.rows, 0.0);
        for (int m = 0; m < nxc; ++m) {
            for (int j = 0; j < nsys; ++j)
                work[j] = spec[static_cast<std::size_t>(j0 + j) * nxc + m];
            if (wall_ == Wall::Dirichlet) {
                const double w = b_ / (h * h);
                work[0] += w * bot_m[m];
                work[nsys - 1] += w * top_m[m];
            } else {
                work[0] -= (b_ / h) * bot_m[m];
                work[nsys - 1] += (b_ / h) * top_m[m];
            }
            bank_.solve(m, work.data());
            for (int j = 0; j < nsys; ++j)
                sol[static_cast<std::size_t>(j0 + j) * nxc + m] = work[j];
        }

        Field out(rhs.nx, rhs.rows, rhs.kind);
        fft::row_fft(g_.nx, rhs.rows).inverse(sol.data(), out.v.data());
        if (wall_ == Wall::Dirichlet) {
            for (int i = 0; i < g_.nx; ++i) {
                out.at(i, 0) = bottom.empty() ? 0.0 : bottom[i];
                out.at(i, g_.nz) = top.empty() ? 0.0 : top[i];
            }
        }
        return out;
    }

  private:
    HelmholtzPlan(const Grid& g, double a, double b, double c, double k, Wall w)
        : g_(g), a_(a), b_(b), c_(c), k_(k), wall_(w) {
        const int nxc = g.nx / 2 + 1;
        const int n = w == Wall::Dirichlet ? g.nz - 1 : g.nz;
        const double ih2 = 1.0 / (g.hz() * g.hz());
        std::vector<double> diag(nxc), dfirst(nxc), dlast(nxc), sub(nxc);
        for (int m = 0; m < nxc; ++m) {
            const double km = detail::kappa(g, m);
            const double base = a_ + b_ * km * km;
            diag[m] = base + 2.0 * b_ * ih2;
            sub[m] = -b_ * ih2;
            if (w == Wall::Neumann) {
                dfirst[m] = base + b_ * ih2;
                dlast[m] = base + b_ * ih2;
            } else {
                dfirst[m] = diag[m];
                dlast[m] = diag[m];
            }
        }
        bank_.factor(nxc, n, diag, dfirst, dlast, sub);
    }

    Grid g_;
    double a_, b_, c_, k_;
    Wall wall_;
    detail::TridiagBank bank_;
};

// ---------------------------------------------------------------------------
// Channel Poisson: Laplacian psi = omega, psi = 0 on walls
// ---------------------------------------------------------------------------

namespace detail {

class PoissonChannelPlan {
  public:
    explicit PoissonChannelPlan(const Grid& g) : g_(g) {
        const int nxc = g.nx / 2 + 1;
        const int n = g.nz - 1;
        const double ih2 = 1.0 / (g.hz() * g.hz());
        std::vector<double> diag(nxc), sub(nxc);
        for (int m = 0; m < nxc; ++m) {
            const double km = kappa(g, m);
            diag[m] = -2.0 * ih2 - km * km;
            sub[m] = ih2;
        }
        bank_.factor(nxc, n, diag, diag, diag, sub);
    }

    Field solve(const Field& omega) const {
        if (omega.kind != FieldKind::DirichletZ || omega.nx != g_.nx || omega.rows != g_.nz + 1)
            throw std::invalid_argument("poisson_channel: omega must be a node field on the grid");
        const int nxc = g_.nx / 2 + 1;
        const auto& plan_rows = fft::row_fft(g_.nx, omega.rows);
        std::vector<std::complex<double>> spec(static_cast<std::size_t>(nxc) * omega.rows);
        plan_rows.forward(omega.v.data(), spec.data());
        std::vector<std::complex<double>> work(bank_.n);
        std::vector<std::complex<double>> sol(spec.size(), 0.0);
        for (int m = 0; m < nxc; ++m) {
            for (int j = 0; j < bank_.n; ++j)
                work[j] = spec[static_cast<std::size_t>(j + 1) * nxc + m];
            bank_.solve(m, work.data());
            for (int j = 0; j < bank_.n; ++j)
                sol[static_cast<std::size_t>(j + 1) * nxc + m] = work[j];
        }
        Field psi(omega.nx, omega.rows, FieldKind::DirichletZ);
        plan_rows.inverse(sol.data(), psi.v.data());
        for (int i = 0; i < g_.nx; ++i) {
            psi.at(i, 0) = 0.0;
            psi.at(i, g_.nz) = 0.0;
        }
        return psi;
    }

  private:
    Grid g_;
    TridiagBank bank_;
};

inline const PoissonChannelPlan& poisson_channel_plan(const Grid& g) {
    thread_local std::map<std::tuple<int, int, double>, std::unique_ptr<PoissonChannelPlan>> cache;
    auto& slot = cache[{g.nx, g.nz, g.xi}];
    if (!slot)
        slot = std::make_unique<PoissonChannelPlan>(g);
    return *slot;
}

} // namespace detail

/// Streamfunction from vorticity: Laplacian psi = omega at interior
/// nodes, psi = 0 on both walls.
inline Field poisson_channel(const Grid& g, const Field& omega) {
    return detail::poisson_channel_plan(g).solve(omega);
}

// ---------------------------------------------------------------------------
// Doubly periodic spectral operators
// ---------------------------------------------------------------------------

namespace detail {
inline void check_periodic_field(const PeriodicGrid& g, const Field& f) {
    if (f.kind != FieldKind::None || f.nx != g.nx || f.rows != g.nz)
        throw std::invalid_argument("field does not match periodic grid");
}
} // namespace detail

inline double quadrature(const PeriodicGrid& g, const Field& f) {
    detail::check_periodic_field(g, f);
    double s = 0.0;
    for (double x : f.v) s += x;
    return s * g.dx() * g.dz();
}

inline double l2_inner(const PeriodicGrid& g, const Field& f, const Field& h) {
    detail::check_periodic_field(g, f);
    f.check_shape(h);
    double s = 0.0;
    for (std::size_t i = 0; i < f.v.size(); ++i) s += f.v[i] * h.v[i];
    return s * g.dx() * g.dz();
}

inline double l2_norm_sq(const PeriodicGrid& g, const Field& f) { return l2_inner(g, f, f); }
inline double l2_norm(const PeriodicGrid& g, const Field& f) {
    return std::sqrt(std::max(0.0, l2_norm_sq(g, f)));
}
inline double mean(const PeriodicGrid& g, const Field& f) { return quadrature(g, f) / g.area(); }

inline Field subtract_mean(const PeriodicGrid& g, Field f) {
    const double m = mean(g, f);
    for (double& x : f.v) x -= m;
    return f;
}

namespace detail {

template <class Mult>
Field spectral_apply(const PeriodicGrid& g, const Field& f, Mult&& mult) {
    check_periodic_field(g, f);
    const auto& plan = fft::fft2(g.nx, g.nz);
    const int nxc = plan.spectral_nx();
    std::vector<std::complex<double>> spec(static_cast<std::size_t>(nxc) * g.nz);
    plan.forward(f.v.data(), spec.data());
    const double twopi = 2.0 * std::numbers::pi;
    for (int jz = 0; jz < g.nz; ++jz) {
        const int fz = jz <= g.nz / 2 ? jz : jz - g.nz;
        for (int mx = 0; mx < nxc; ++mx) {
            const double kx = twopi * mx / g.Lx;
            const double kz = twopi * fz / g.Lz;
            mult(spec[static_cast<std::size_t>(jz) * nxc + mx], mx, fz, kx, kz);
        }
    }
    Field out(f.nx, f.rows, f.kind);
    plan.inverse(spec.data(), out.v.data());
    return out;
}

} // namespace detail

inline Field laplacian(const PeriodicGrid& g, const Field& f) {
    return detail::spectral_apply(g, f, [](std::complex<double>& c, int, int, double kx, double kz) {
        c *= -(kx * kx + kz * kz);
    });
}

inline Field dx_spectral(const PeriodicGrid& g, const Field& f) {
    return detail::spectral_apply(g, f, [&](std::complex<double>& c, int mx, int, double kx, double) {
        c = (mx == g.nx / 2) ? 0.0 : std::complex<double>(0.0, kx) * c;
    });
}

inline Field dz_spectral(const PeriodicGrid& g, const Field& f) {
    return detail::spectral_apply(g, f, [&](std::complex<double>& c, int, int fz, double, double kz) {
        c = (fz == -g.nz / 2 || fz == g.nz / 2) ? 0.0 : std::complex<double>(0.0, kz) * c;
    });
}

/// |grad f|^2 via the spectral Laplacian (exact summation by parts).
inline double h1_seminorm_sq(const PeriodicGrid& g, const Field& f) {
    return -l2_inner(g, laplacian(g, f), f);
}

inline double h1_seminorm(const PeriodicGrid& g, const Field& f) {
    return std::sqrt(std::max(0.0, h1_seminorm_sq(g, f)));
}

/// Solve Laplacian psi = omega with zero-mean normalisation. The input
/// must have (numerically) zero mean.
inline Field poisson_periodic(const PeriodicGrid& g, const Field& omega) {
    const double m = mean(g, omega);
    if (std::abs(m) > 1e-10 * std::max(1.0, l2_norm(g, omega)))
        throw std::invalid_argument("poisson_periodic: input must have zero mean");
    return detail::spectral_apply(g, omega, [](std::complex<double>& c, int mx, int fz, double kx, double kz) {
        const double k2 = kx * kx + kz * kz;
        c = (mx == 0 && fz == 0) ? 0.0 : c / (-k2);
    });
}

} // namespace ddc
