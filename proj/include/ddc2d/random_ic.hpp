#pragma once

#include <random>

#include "ddc2d/elliptic.hpp"
#include "ddc2d/lifting.hpp"

namespace ddc {

namespace detail {

/// Box-Muller on explicit uniform draws, so the stream is fixed by the
/// engine alone (std::normal_distribution is implementation-defined).
inline double normal_draw(std::mt19937_64& eng) {
    constexpr double twopi = 2.0 * std::numbers::pi;
    const double u1 = (static_cast<double>(eng()) + 0.5) / 18446744073709551616.0;
    const double u2 = (static_cast<double>(eng()) + 0.5) / 18446744073709551616.0;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(twopi * u2);
}

} // namespace detail

/// Seeded random initial data: Fourier modes with exponential spectral
/// decay, z-profiles vanishing on the walls for the vorticity and with
/// zero wall flux for the scalars. Vorticity wall rows carry the
/// lifting extension so the boundary values are met exactly; all means
/// are zero by construction (every mode has x-wavenumber >= 1).
inline State make_random_state(const Grid& g, const Lifting& lift, double amplitude,
                               std::uint64_t seed) {
    State s = State::zeros(g);
    std::mt19937_64 eng(seed);
    constexpr int mmax = 4;
    constexpr double decay = 0.6;

    auto fill = [&](Field& f, bool node_layout) {
        for (int mx = 1; mx <= mmax; ++mx)
            for (int mz = 1; mz <= mmax; ++mz) {
                const double amp = amplitude * std::exp(-decay * (mx + mz));
                const double ca = amp * detail::normal_draw(eng);
                const double cb = amp * detail::normal_draw(eng);
                const double kx = 2.0 * std::numbers::pi * mx / g.xi;
                for (int j = 0; j < f.rows; ++j) {
                    const double z = node_layout ? g.z_node(j) : g.z_center(j);
                    const double zprof = node_layout ? std::sin(std::numbers::pi * mz * z)
                                                     : std::cos(std::numbers::pi * mz * z);
                    for (int i = 0; i < g.nx; ++i) {
                        const double x = g.x(i);
                        f.at(i, j) += (ca * std::cos(kx * x) + cb * std::sin(kx * x)) * zprof;
                    }
                }
            }
    };

    fill(s.omega, true);
    for (int i = 0; i < g.nx; ++i) {
        s.omega.at(i, 0) = lift.Omega.at(i, 0);
        s.omega.at(i, g.nz) = lift.Omega.at(i, g.nz);
    }
    for (int j = 1; j < g.nz; ++j)
        for (int i = 0; i < g.nx; ++i)
            s.omega.at(i, j) += lift.Omega.at(i, j);
    project_mean_interior(g, s.omega);

    fill(s.temp, false);
    fill(s.salt, false);
    s.temp = subtract_mean(g, s.temp);
    s.salt = subtract_mean(g, s.salt);
    s.psi = poisson_channel(g, s.omega);
    return s;
}

} // namespace ddc
