#pragma once

#include <array>
#include <string>
#include <vector>

#include "ddc2d/elliptic.hpp"

namespace ddc {

/// Bump profile of the lifting layer: eta(s) = (1 - s^2)^2 on [0, 1],
/// zero beyond. eta(0) = 1, eta and eta' vanish at s = 1.
inline double lifting_bump(double s) {
    if (s >= 1.0 || s <= -1.0) return 0.0;
    const double t = 1.0 - s * s;
    return t * t;
}

/// int_0^1 eta(s)^2 ds, used by the scaling oracles.
inline double lifting_bump_sq_integral() { return 128.0 / 315.0; }

struct LiftingNorms {
    double omega_l2 = 0.0, omega_h1 = 0.0, omega_lap = 0.0, omega_sup = 0.0;
    double psi_grad_sup = 0.0;
    double tq_l2 = 0.0, tq_h1 = 0.0, tq_lap = 0.0;
    double sq_l2 = 0.0, sq_h1 = 0.0, sq_lap = 0.0;
};

/// Boundary extensions absorbing the wall data: Omega matches the
/// vorticity wall values, TQ/SQ carry the scalar wall fluxes, Psi is
/// the streamfunction of Omega. margins are the left/right ratios of
/// the three smallness constraints
///   |Omega|^2 <= p^2/(32 c4),  |TQ|^2 <= 1/(32 c4),  |SQ|^2 <= beta^2/(32 c4).
struct Lifting {
    Field Omega, Psi; // node layout
    Field TQ, SQ;     // centre layout
    double epsilon = 0.5;
    LiftingNorms norms;
    std::array<double, 3> margins{0.0, 0.0, 0.0};

    bool satisfied() const {
        return margins[0] <= 1.0 && margins[1] <= 1.0 && margins[2] <= 1.0;
    }
    std::vector<std::string> violations() const {
        std::vector<std::string> out;
        if (margins[0] > 1.0) out.push_back("|Omega|^2 <= p^2/(32 c4)");
        if (margins[1] > 1.0) out.push_back("|T_Q|^2 <= 1/(32 c4)");
        if (margins[2] > 1.0) out.push_back("|S_Q|^2 <= beta^2/(32 c4)");
        return out;
    }

    static Lifting zero(const Grid& g) {
        Lifting l;
        l.Omega = Field::zeros(g, FieldKind::DirichletZ);
        l.Psi = Field::zeros(g, FieldKind::DirichletZ);
        l.TQ = Field::zeros(g, FieldKind::NeumannZ);
        l.SQ = Field::zeros(g, FieldKind::NeumannZ);
        return l;
    }
};

namespace detail {

/// z-profile of a Neumann lifting: the discrete primitive of the bump
/// sampled at z-faces, so the ghost-difference wall flux the solvers
/// use is matched exactly: (p_j - p_{j-1})/h = eta((1 - j h)/eps) for
/// interior faces, and the top wall face carries eta(0) = 1.
inline std::vector<double> neumann_profile(const Grid& g, double eps) {
    std::vector<double> p(g.nz, 0.0);
    const double h = g.hz();
    for (int j = 1; j < g.nz; ++j)
        p[j] = p[j - 1] + h * lifting_bump((1.0 - j * h) / eps);
    return p;
}

} // namespace detail

/// Construct the boundary extensions for a given layer width. The
/// returned object carries all measured norms and the three constraint
/// margins; the caller decides what to do when satisfied() is false.
inline Lifting build_lifting(const Grid& g, const BoundaryFlux& flux, double epsilon,
                             const Params& p, const ConstantsConfig& c) {
    if (!(epsilon > 0.0) || epsilon > 0.5)
        throw std::invalid_argument("build_lifting: epsilon must lie in (0, 1/2]");
    flux.validate(g.nx);

    Lifting l = Lifting::zero(g);
    l.epsilon = epsilon;

    const auto qu = flux.sample_top(flux.qu, g);
    const auto qt = flux.sample_top(flux.qt, g);
    const auto qs = flux.sample_top(flux.qs, g);

    for (int j = 0; j <= g.nz; ++j) {
        const double prof = lifting_bump((1.0 - g.z_node(j)) / epsilon);
        if (prof == 0.0) continue;
        for (int i = 0; i < g.nx; ++i)
            l.Omega.at(i, j) = qu[i] * prof;
    }
    l.Psi = poisson_channel(g, l.Omega);

    const auto prof = detail::neumann_profile(g, epsilon);
    for (int j = 0; j < g.nz; ++j)
        for (int i = 0; i < g.nx; ++i) {
            l.TQ.at(i, j) = qt[i] * prof[j];
            l.SQ.at(i, j) = qs[i] * prof[j];
        }
    l.TQ = subtract_mean(g, l.TQ);
    l.SQ = subtract_mean(g, l.SQ);

    auto& n = l.norms;
    n.omega_l2 = l2_norm(g, l.Omega);
    n.omega_h1 = h1_seminorm(g, l.Omega);
    n.omega_lap = l2_norm(g, apply_laplacian_node(g, l.Omega));
    n.omega_sup = sup_abs(l.Omega);
    n.psi_grad_sup = grad_sup(g, l.Psi);
    n.tq_l2 = l2_norm(g, l.TQ);
    n.tq_h1 = h1_seminorm(g, l.TQ);
    n.tq_lap = l2_norm(g, apply_laplacian_center(g, l.TQ, {}, qt));
    n.sq_l2 = l2_norm(g, l.SQ);
    n.sq_h1 = h1_seminorm(g, l.SQ);
    n.sq_lap = l2_norm(g, apply_laplacian_center(g, l.SQ, {}, qs));

    const double c4 = c.c4;
    l.margins[0] = 32.0 * c4 * n.omega_l2 * n.omega_l2 / (p.prandtl * p.prandtl);
    l.margins[1] = 32.0 * c4 * n.tq_l2 * n.tq_l2;
    l.margins[2] = 32.0 * c4 * n.sq_l2 * n.sq_l2 / (p.lewis_beta * p.lewis_beta);
    return l;
}

/// Shrink the layer width geometrically from 1/2 until the smallness
/// constraints hold. The L2 norms of all three extensions decrease with
/// epsilon, so the first success is returned.
inline Lifting auto_epsilon(const Grid& g, const BoundaryFlux& flux, const Params& p,
                            const ConstantsConfig& c) {
    double eps = 0.5;
    Lifting last;
    while (eps >= 1e-6) {
        last = build_lifting(g, flux, eps, p, c);
        if (last.satisfied())
            return last;
        eps *= 0.5;
    }
    std::string msg = "auto_epsilon: constraints irreconcilable down to epsilon = 1e-6:";
    for (const auto& v : last.violations())
        msg += " " + v;
    throw ConstraintError(msg);
}

} // namespace ddc
