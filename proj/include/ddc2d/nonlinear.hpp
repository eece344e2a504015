#pragma once

#include <span>

#include "ddc2d/core.hpp"

namespace ddc {

enum class Variable { Omega, Temp, Salt };

namespace detail {

/// Arakawa's nine-point Jacobian (average of the three second-order
/// forms) on a lattice slab. `f` and `s` must expose rows jlo-1..jhi+1;
/// the result is written for rows jlo..jhi of `out` (shifted by
/// out_off). Periodic in i.
inline void arakawa_rows(int nx, double dx, double dz, const Field& f, const Field& s,
                         int jlo, int jhi, Field& out, int out_off) {
    const double scale = 1.0 / (12.0 * dx * dz);
    for (int j = jlo; j <= jhi; ++j) {
        const int jp = j + 1, jm = j - 1;
        for (int i = 0; i < nx; ++i) {
            const int ip = (i + 1) % nx, im = (i + nx - 1) % nx;
            const double j1 = (f.at(ip, j) - f.at(im, j)) * (s.at(i, jp) - s.at(i, jm)) -
                              (f.at(i, jp) - f.at(i, jm)) * (s.at(ip, j) - s.at(im, j));
            const double j2 = f.at(ip, j) * (s.at(ip, jp) - s.at(ip, jm)) -
                              f.at(im, j) * (s.at(im, jp) - s.at(im, jm)) -
                              f.at(i, jp) * (s.at(ip, jp) - s.at(im, jp)) +
                              f.at(i, jm) * (s.at(ip, jm) - s.at(im, jm));
            const double j3 = -s.at(ip, j) * (f.at(ip, jp) - f.at(ip, jm)) +
                              s.at(im, j) * (f.at(im, jp) - f.at(im, jm)) +
                              s.at(i, jp) * (f.at(ip, jp) - f.at(im, jp)) -
                              s.at(i, jm) * (f.at(ip, jm) - f.at(im, jm));
            out.at(i, j + out_off) = (j1 + j2 + j3) * scale;
        }
    }
}

} // namespace detail

/// Discrete Jacobian d(f,g) = fx gz - gx fz for node fields, evaluated
/// at interior nodes with the full stencil (wall rows of both inputs
/// participate); wall rows of the result are zero. With this closure
/// the lattice identities make (J(f,g), g) and quadrature(J(f,g))
/// vanish exactly whenever g vanishes in the two node layers at each
/// wall (for the inner product, g = 0 on the walls alone suffices).
inline Field jacobian(const Grid& g, const Field& f, const Field& s) {
    if (f.kind != FieldKind::DirichletZ || s.kind != FieldKind::DirichletZ)
        throw std::invalid_argument("jacobian: expects node fields");
    f.check_shape(s);
    detail::check_channel_field(g, f);
    Field out = Field::zeros(g, FieldKind::DirichletZ);
    detail::arakawa_rows(g.nx, g.dx(), g.hz(), f, s, 1, g.nz - 1, out, 0);
    return out;
}

/// Jacobian d(psi, s) for a centre scalar. psi (node field, zero on
/// walls) is averaged to centres and extended by odd reflection; the
/// scalar is extended by its Neumann data (dz s = qbot/qtop at the
/// walls, empty spans meaning zero flux).
inline Field jacobian_center(const Grid& g, const Field& psi, const Field& s,
                             std::span<const double> qbot = {},
                             std::span<const double> qtop = {}) {
    if (psi.kind != FieldKind::DirichletZ || s.kind != FieldKind::NeumannZ)
        throw std::invalid_argument("jacobian_center: expects node psi and centre scalar");
    detail::check_channel_field(g, psi);
    detail::check_channel_field(g, s);
    const double h = g.hz();
    const int nz = g.nz;

    Field pc(g.nx, nz + 2, FieldKind::None); // centre rows with ghosts at 0 and nz+1
    Field sc(g.nx, nz + 2, FieldKind::None);
    for (int j = 0; j < nz; ++j)
        for (int i = 0; i < g.nx; ++i) {
            pc.at(i, j + 1) = 0.5 * (psi.at(i, j) + psi.at(i, j + 1));
            sc.at(i, j + 1) = s.at(i, j);
        }
    for (int i = 0; i < g.nx; ++i) {
        pc.at(i, 0) = -pc.at(i, 1);
        pc.at(i, nz + 1) = -pc.at(i, nz);
        sc.at(i, 0) = sc.at(i, 1) - h * (qbot.empty() ? 0.0 : qbot[i]);
        sc.at(i, nz + 1) = sc.at(i, nz) + h * (qtop.empty() ? 0.0 : qtop[i]);
    }

    Field out = Field::zeros(g, FieldKind::NeumannZ);
    detail::arakawa_rows(g.nx, g.dx(), h, pc, sc, 1, nz, out, -1);
    return out;
}

/// The one-leg advection term d(2 psi^n - psi^{n-1}, 2 phi^n - phi^{n-1})
/// of the two-step scheme for the selected variable.
inline Field one_leg_advection(const Grid& g, const State& prev, const State& curr,
                               const BoundaryFlux& flux, Variable which) {
    if (curr.n != prev.n + 1)
        throw std::logic_error("one_leg_advection: states are not consecutive time levels");
    Field pex = curr.psi;
    pex *= 2.0;
    pex -= prev.psi;
    switch (which) {
    case Variable::Omega: {
        Field wex = curr.omega;
        wex *= 2.0;
        wex -= prev.omega;
        return jacobian(g, pex, wex);
    }
    case Variable::Temp: {
        Field tex = curr.temp;
        tex *= 2.0;
        tex -= prev.temp;
        // extrapolated field carries flux (2-1) Q_T = Q_T
        return jacobian_center(g, pex, tex, {}, flux.sample_top(flux.qt, g));
    }
    case Variable::Salt: {
        Field sex = curr.salt;
        sex *= 2.0;
        sex -= prev.salt;
        return jacobian_center(g, pex, sex, {}, flux.sample_top(flux.qs, g));
    }
    }
    throw std::logic_error("one_leg_advection: bad variable");
}

} // namespace ddc
