#pragma once

#include <limits>
#include <span>

#include "ddc2d/core.hpp"
#include "ddc2d/lifting.hpp"

namespace ddc {

// ---------------------------------------------------------------------------
// Shifted two-level G-norm and its equivalence constants
// ---------------------------------------------------------------------------

namespace detail {
inline void check_nu_k(double nu_k) {
    if (!(nu_k >= 0.0) || !(nu_k <= 1.0))
        throw std::domain_error("nu*k must lie in [0, 1]");
}
} // namespace detail

/// <f,g>^2_{nu k} = |f|^2/2 + (5 + nu k)/2 |g|^2 - 2 (f, g).
inline double gnorm_sq(const Grid& g, const Field& f, const Field& h, double nu_k) {
    detail::check_nu_k(nu_k);
    return 0.5 * l2_norm_sq(g, f) + 0.5 * (5.0 + nu_k) * l2_norm_sq(g, h) - 2.0 * l2_inner(g, f, h);
}

inline double gnorm_sq(const PeriodicGrid& g, const Field& f, const Field& h, double nu_k) {
    detail::check_nu_k(nu_k);
    return 0.5 * l2_norm_sq(g, f) + 0.5 * (5.0 + nu_k) * l2_norm_sq(g, h) - 2.0 * l2_inner(g, f, h);
}

/// Scalar quadratic form, convenient for eigenvalue work:
/// q(u, v) = u^2/2 + (5 + nu k) v^2 / 2 - 2 u v.
inline double gnorm_sq_scalar(double u, double v, double nu_k) {
    detail::check_nu_k(nu_k);
    return 0.5 * u * u + 0.5 * (5.0 + nu_k) * v * v - 2.0 * u * v;
}

/// Closed forms of the extreme eigenvalues over nu k in [0, 1].
inline double gnorm_c_minus() { return (6.0 - std::sqrt(32.0)) / 4.0; }
inline double gnorm_c_plus() { return (7.0 + std::sqrt(41.0)) / 4.0; }

/// Eigenvalues of the 2x2 form [[1/2, -1], [-1, (5 + nu k)/2]].
inline std::pair<double, double> gnorm_eigenvalues(double nu_k) {
    detail::check_nu_k(nu_k);
    const double tr = 0.5 + 0.5 * (5.0 + nu_k);
    const double det = 0.25 * (5.0 + nu_k) - 1.0;
    const double disc = std::sqrt(tr * tr - 4.0 * det);
    return {0.5 * (tr - disc), 0.5 * (tr + disc)};
}

struct EquivalenceConstants {
    double c_minus = 0.0;
    double c_plus = 0.0;
};

/// Extreme eigenvalues of the G-norm form over a grid of nu k values.
inline EquivalenceConstants equivalence_constants(std::span<const double> nu_k_grid) {
    if (nu_k_grid.empty())
        throw std::invalid_argument("equivalence_constants: empty grid");
    EquivalenceConstants out{1e300, -1e300};
    for (double nk : nu_k_grid) {
        auto [lo, hi] = gnorm_eigenvalues(nk);
        out.c_minus = std::min(out.c_minus, lo);
        out.c_plus = std::max(out.c_plus, hi);
    }
    return out;
}

// ---------------------------------------------------------------------------
// The two-level multistep energy identity
// ---------------------------------------------------------------------------

/// |LHS - RHS| of the identity
///   (3h - 4g + f, h) + nu k |h|^2
///     = <g,h>^2 - <f,g>^2/(1 + nu k) + |f - 2g + (1 + nu k) h|^2 / (2 (1 + nu k)).
template <class G>
double hs_identity_residual_t(const G& grid, const Field& f, const Field& g, const Field& h,
                              double nu_k) {
    detail::check_nu_k(nu_k);
    Field comb = h;
    comb *= 3.0;
    Field g4 = g;
    g4 *= 4.0;
    comb -= g4;
    comb += f;
    const double lhs = l2_inner(grid, comb, h) + nu_k * l2_norm_sq(grid, h);

    Field rem = h;
    rem *= (1.0 + nu_k);
    Field g2 = g;
    g2 *= 2.0;
    rem -= g2;
    rem += f;
    const double rhs = gnorm_sq(grid, g, h, nu_k) - gnorm_sq(grid, f, g, nu_k) / (1.0 + nu_k) +
                       l2_norm_sq(grid, rem) / (2.0 * (1.0 + nu_k));
    return std::abs(lhs - rhs);
}

inline double hs_identity_residual(const Grid& grid, const Field& f, const Field& g,
                                   const Field& h, double nu_k) {
    return hs_identity_residual_t(grid, f, g, h, nu_k);
}
inline double hs_identity_residual(const PeriodicGrid& grid, const Field& f, const Field& g,
                                   const Field& h, double nu_k) {
    return hs_identity_residual_t(grid, f, g, h, nu_k);
}

// ---------------------------------------------------------------------------
// Recursion lemmas
// ---------------------------------------------------------------------------

/// Bound on x_{n+1} + mu y_{n+1} for the three-term recursion
///   x_{j+1} + mu y_{j+1} <= x_j/(1+delta) + eps y_j + eps y_{j-1} + r_j,
/// namely
///   (x_1 + mu y_1)/(1+delta)^n + eps y_0/(1+delta)^{n-1}
///   + sum_{j=1..n} r_j/(1+delta)^{n-j}.
/// Requires mu > 0, delta in (0,1], eps in (0, mu/8], n >= 1, and r to
/// cover indices 1..n (r[0] is r_1).
inline double recursion_bound(double x1, double y1, double y0, double mu, double delta,
                              double eps, std::span<const double> r, int n) {
    if (!(mu > 0.0) || !(delta > 0.0) || delta > 1.0 || !(eps > 0.0) || eps > mu / 8.0)
        throw std::domain_error("recursion_bound: parameter out of range");
    if (x1 < 0.0 || y1 < 0.0 || y0 < 0.0)
        throw std::domain_error("recursion_bound: negative initial data");
    if (n < 1 || r.size() < static_cast<std::size_t>(n))
        throw std::domain_error("recursion_bound: need n >= 1 and r covering 1..n");
    const double q = 1.0 / (1.0 + delta);
    double bound = (x1 + mu * y1) * std::pow(q, n) + eps * y0 * std::pow(q, n - 1);
    double w = 1.0; // (1+delta)^{-(n-j)} built up from j = n down
    for (int j = n; j >= 1; --j) {
        bound += r[j - 1] * w;
        w *= q;
    }
    return bound;
}

/// x_{j+1} <= (1+b) x_j + r_j  implies  x_{n+m} <= (1+b)^m (x_n + sum r).
/// Returns the right-hand side with m = r.size().
inline double geometric_growth_bound(double x_n, double b, std::span<const double> r) {
    if (x_n < 0.0 || !(b > 0.0))
        throw std::domain_error("geometric_growth_bound: require x_n >= 0, b > 0");
    double s = x_n;
    for (double rj : r) {
        if (rj < 0.0)
            throw std::domain_error("geometric_growth_bound: r_j must be nonnegative");
        s += rj;
    }
    return std::pow(1.0 + b, static_cast<double>(r.size())) * s;
}

// ---------------------------------------------------------------------------
// Timestep restriction
// ---------------------------------------------------------------------------

/// nu = min(p, beta, 1) / (8 c0).
inline double nu_shift(const Params& p, const ConstantsConfig& c) {
    return std::min({p.prandtl, p.lewis_beta, 1.0}) / (8.0 * c.c0);
}

/// k_max = min( min(p^2, beta^2, 1) / (c3 M_omega + c3 |grad Psi|_inf^2)^2, 1/nu ).
inline double timestep_restriction(double m_omega, double grad_psi_inf, const Params& p,
                                   const ConstantsConfig& c) {
    if (m_omega < 0.0 || grad_psi_inf < 0.0)
        throw std::domain_error("timestep_restriction: inputs must be nonnegative");
    const double nu = nu_shift(p, c);
    const double denom = c.c3 * m_omega + c.c3 * grad_psi_inf * grad_psi_inf;
    const double branch1 =
        denom > 0.0 ? std::min({p.prandtl * p.prandtl, p.lewis_beta * p.lewis_beta, 1.0}) / (denom * denom)
                    : std::numeric_limits<double>::infinity();
    return std::min(branch1, 1.0 / nu);
}

// ---------------------------------------------------------------------------
// Lifted (hatted) variables, forcing norms and the vorticity monitor
// ---------------------------------------------------------------------------

inline Field hatted_omega(const State& s, const Lifting& l) { return s.omega - l.Omega; }
inline Field hatted_temp(const State& s, const Lifting& l) { return s.temp - l.TQ; }
inline Field hatted_salt(const State& s, const Lifting& l) { return s.salt - l.SQ; }

struct ForcingNorms {
    double f1_sq = 0.0;
    double f2_sq = 0.0;
};

/// ||F1||^2 = c4 p (|Omega|^2/p^2 + |TQ|^2 + |SQ|^2/beta^2),
/// ||F2||^2 = |grad Psi|_inf^2 ||F1||^2
///            + c5 p (|grad TQ|^2 + |grad SQ|^2 + |grad Omega|^2).
inline ForcingNorms forcing_norms(const Lifting& l, const Params& p, const ConstantsConfig& c) {
    const auto& n = l.norms;
    ForcingNorms out;
    out.f1_sq = c.c4 * p.prandtl *
                (n.omega_l2 * n.omega_l2 / (p.prandtl * p.prandtl) + n.tq_l2 * n.tq_l2 +
                 n.sq_l2 * n.sq_l2 / (p.lewis_beta * p.lewis_beta));
    out.f2_sq = n.psi_grad_sup * n.psi_grad_sup * out.f1_sq +
                c.c5 * p.prandtl *
                    (n.tq_h1 * n.tq_h1 + n.sq_h1 * n.sq_h1 + n.omega_h1 * n.omega_h1);
    return out;
}

/// Weighted two-level norm of the full lifted triple:
/// <U^n,U^{n+1}>^2 = <w,w>^2 + 16 p c0 <T,T>^2 + 16 p c0 <S,S>^2 / beta.
inline double gnorm_sq_combined(const Grid& g, const State& prev, const State& curr,
                                const Lifting& l, const Params& p, const ConstantsConfig& c,
                                double nu_k) {
    const double wpart = gnorm_sq(g, hatted_omega(prev, l), hatted_omega(curr, l), nu_k);
    const double tpart = gnorm_sq(g, hatted_temp(prev, l), hatted_temp(curr, l), nu_k);
    const double spart = gnorm_sq(g, hatted_salt(prev, l), hatted_salt(curr, l), nu_k);
    return wpart + 16.0 * p.prandtl * c.c0 * tpart + 16.0 * p.prandtl * c.c0 * spart / p.lewis_beta;
}

struct MOmegaMonitor {
    double m_omega = 0.0;       // timestep-independent part of the bound
    double h_half_bound = 0.0;  // k^{-1/2} m_omega
    double h_half_interp = 0.0; // |w_hat| |grad w_hat| of the latest state
};

/// Running bound on |omega_hat|^2_{H^{1/2}}: the initial-data and
/// forcing part is evaluated from the first two states (with the
/// two-level norm taken at its sup over the admissible shift), the
/// interpolation product from the latest state. The generic
/// interpolation constant is taken as 1.
inline MOmegaMonitor m_omega_monitor(const Grid& g, std::span<const State> history,
                                     const Lifting& l, const Params& p,
                                     const ConstantsConfig& c) {
    if (history.size() < 2)
        throw std::logic_error("m_omega_monitor: need at least two states");
    const State& u0 = history[0];
    const State& u1 = history[1];
    const State& last = history.back();
    const double nu = nu_shift(p, c);
    const ForcingNorms f = forcing_norms(l, p, c);

    const Field w0 = hatted_omega(u0, l);
    const Field w1 = hatted_omega(u1, l);
    const double braces = gnorm_sq_combined(g, u0, u1, l, p, c, 1.0) +
                          p.prandtl * (h1_seminorm_sq(g, w0) + h1_seminorm_sq(g, w1)) +
                          2.0 * f.f2_sq / nu;
    MOmegaMonitor out;
    out.m_omega = braces / std::sqrt(p.prandtl);
    out.h_half_bound = out.m_omega / std::sqrt(p.k);
    const Field wl = hatted_omega(last, l);
    out.h_half_interp = l2_norm(g, wl) * h1_seminorm(g, wl);
    return out;
}

} // namespace ddc
