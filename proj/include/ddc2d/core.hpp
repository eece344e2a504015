#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "ddc2d/fft.hpp"

namespace ddc {

/// Configuration file problem; carries the offending line (0 = whole file).
struct ConfigError : std::runtime_error {
    int line = 0;
    ConfigError(const std::string& msg, int line_ = 0)
        : std::runtime_error(line_ > 0 ? "line " + std::to_string(line_) + ": " + msg : msg),
          line(line_) {}
};

/// A startup smallness or timestep restriction failed.
struct ConstraintError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Solution left the finite range mid-run.
struct BlowupError : std::runtime_error {
    std::int64_t step = 0;
    BlowupError(const std::string& msg, std::int64_t step_)
        : std::runtime_error(msg + " at step " + std::to_string(step_)), step(step_) {}
};

/// Malformed binary snapshot.
struct FormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Fixed values for the otherwise-free constants entering the smallness
/// and timestep restrictions. They parameterise monitored inequalities;
/// they are not certified bounds.
struct ConstantsConfig {
    double c0 = 1.0;
    double c1 = 1.0;
    double c2 = 1.0;
    double c3 = 1.0;
    double c4 = 1.0;
    double c5 = 1.0;
};

/// Physical and numerical parameters. The domain is [0, xi] x [0, 1],
/// periodic in x with walls at z = 0 and z = 1.
struct Params {
    double prandtl = 1.0;   // momentum / thermal diffusivity
    double lewis_beta = 1.0; // thermal / salt diffusivity
    double aspect_xi = 1.0;  // domain width
    int nx = 0;              // x samples, even
    int nz = 0;              // z interior layers
    double k = 0.0;          // timestep
    double nu_coef = 0.0;    // G-norm shift nu

    void validate() const {
        if (!(prandtl > 0.0) || !(lewis_beta > 0.0) || !(aspect_xi > 0.0))
            throw std::invalid_argument("Params: prandtl, lewis_beta, aspect_xi must be positive");
        if (nx < 8 || nx % 2 != 0)
            throw std::invalid_argument("Params: nx must be an even integer >= 8");
        if (nz < 8)
            throw std::invalid_argument("Params: nz must be >= 8");
        if (!(k > 0.0))
            throw std::invalid_argument("Params: timestep k must be positive");
        if (nu_coef < 0.0)
            throw std::invalid_argument("Params: nu_coef must be nonnegative");
        if (nu_coef * k > 1.0)
            throw std::invalid_argument("Params: nu*k must not exceed 1");
    }
};

/// Channel grid: uniform periodic x (no duplicate endpoint), two z
/// layouts sharing the same spacing. Fields with Neumann wall data live
/// on cell centres z = (j+1/2)h, j = 0..nz-1; fields with Dirichlet wall
/// data live on nodes z = j h, j = 0..nz, walls included.
struct Grid {
    int nx = 0;
    int nz = 0;
    double xi = 1.0;

    Grid() = default;
    Grid(int nx_, int nz_, double xi_) : nx(nx_), nz(nz_), xi(xi_) {
        if (nx < 2 || nx % 2 != 0 || nz < 2 || !(xi > 0.0))
            throw std::invalid_argument("Grid: bad dimensions");
    }

    double dx() const { return xi / nx; }
    double hz() const { return 1.0 / nz; }
    double x(int i) const { return i * dx(); }
    double z_node(int j) const { return j * hz(); }
    double z_center(int j) const { return (j + 0.5) * hz(); }

    bool operator==(const Grid& o) const { return nx == o.nx && nz == o.nz && xi == o.xi; }
};

/// Fully periodic grid for the appendix-style validation solver.
struct PeriodicGrid {
    int nx = 0;
    int nz = 0;
    double Lx = 2.0 * std::numbers::pi;
    double Lz = 2.0 * std::numbers::pi;

    PeriodicGrid() = default;
    PeriodicGrid(int nx_, int nz_, double Lx_ = 2.0 * std::numbers::pi,
                 double Lz_ = 2.0 * std::numbers::pi)
        : nx(nx_), nz(nz_), Lx(Lx_), Lz(Lz_) {
        if (nx < 4 || nx % 2 != 0 || nz < 4 || nz % 2 != 0 || !(Lx > 0.0) || !(Lz > 0.0))
            throw std::invalid_argument("PeriodicGrid: bad dimensions");
    }

    double dx() const { return Lx / nx; }
    double dz() const { return Lz / nz; }
    double x(int i) const { return i * dx(); }
    double z(int j) const { return j * dz(); }
    double area() const { return Lx * Lz; }
};

/// Which z boundary condition a field's equations carry.
enum class FieldKind {
    DirichletZ, // node layout, nz+1 rows including walls (omega, psi)
    NeumannZ,   // centre layout, nz rows (T, S)
    None,       // doubly periodic layout, nz rows
};

/// A scalar sampled on the grid, row-major with x fastest.
struct Field {
    int nx = 0;
    int rows = 0;
    FieldKind kind = FieldKind::None;
    std::vector<double> v;

    Field() = default;
    Field(int nx_, int rows_, FieldKind kind_)
        : nx(nx_), rows(rows_), kind(kind_), v(static_cast<std::size_t>(nx_) * rows_, 0.0) {}

    static int rows_for(const Grid& g, FieldKind kind) {
        return kind == FieldKind::DirichletZ ? g.nz + 1 : g.nz;
    }
    static Field zeros(const Grid& g, FieldKind kind) { return Field(g.nx, rows_for(g, kind), kind); }
    static Field zeros(const PeriodicGrid& g) { return Field(g.nx, g.nz, FieldKind::None); }

    double& at(int i, int j) { return v[static_cast<std::size_t>(j) * nx + i]; }
    double at(int i, int j) const { return v[static_cast<std::size_t>(j) * nx + i]; }
    std::size_t size() const { return v.size(); }

    bool same_shape(const Field& o) const { return nx == o.nx && rows == o.rows && kind == o.kind; }

    bool finite() const {
        for (double x : v)
            if (!std::isfinite(x)) return false;
        return true;
    }

    Field& operator+=(const Field& o) {
        check_shape(o);
        for (std::size_t i = 0; i < v.size(); ++i) v[i] += o.v[i];
        return *this;
    }
    Field& operator-=(const Field& o) {
        check_shape(o);
        for (std::size_t i = 0; i < v.size(); ++i) v[i] -= o.v[i];
        return *this;
    }
    Field& operator*=(double s) {
        for (double& x : v) x *= s;
        return *this;
    }
    friend Field operator+(Field a, const Field& b) { return a += b; }
    friend Field operator-(Field a, const Field& b) { return a -= b; }
    friend Field operator*(double s, Field a) { return a *= s; }

    void check_shape(const Field& o) const {
        if (!same_shape(o))
            throw std::invalid_argument("Field: shape mismatch");
    }
};

/// Evaluate a callable f(x, z) on every point of the chosen layout.
template <class F>
Field sample(const Grid& g, FieldKind kind, F&& f) {
    Field out = Field::zeros(g, kind);
    for (int j = 0; j < out.rows; ++j) {
        const double z = (kind == FieldKind::DirichletZ) ? g.z_node(j) : g.z_center(j);
        for (int i = 0; i < g.nx; ++i)
            out.at(i, j) = f(g.x(i), z);
    }
    return out;
}

template <class F>
Field sample(const PeriodicGrid& g, F&& f) {
    Field out = Field::zeros(g);
    for (int j = 0; j < g.nz; ++j)
        for (int i = 0; i < g.nx; ++i)
            out.at(i, j) = f(g.x(i), g.z(j));
    return out;
}

/// Top-wall flux profile as Fourier pairs with m >= 1, so the net flux
/// along the wall vanishes exactly. Bottom-wall fluxes are identically
/// zero.
struct FluxMode {
    int m = 1;
    double a = 0.0; // cos(2 pi m x / xi) coefficient
    double b = 0.0; // sin(2 pi m x / xi) coefficient
    bool operator==(const FluxMode&) const = default;
};

struct BoundaryFlux {
    std::vector<FluxMode> qu, qt, qs;

    static double eval_profile(const std::vector<FluxMode>& modes, double xi, double x) {
        double s = 0.0;
        for (const auto& mm : modes) {
            const double arg = 2.0 * std::numbers::pi * mm.m * x / xi;
            s += mm.a * std::cos(arg) + mm.b * std::sin(arg);
        }
        return s;
    }

    std::vector<double> sample_top(const std::vector<FluxMode>& modes, const Grid& g) const {
        std::vector<double> out(g.nx);
        for (int i = 0; i < g.nx; ++i)
            out[i] = eval_profile(modes, g.xi, g.x(i));
        return out;
    }

    void validate(int nx) const {
        for (const auto* lst : {&qu, &qt, &qs})
            for (const auto& mm : *lst) {
                if (mm.m < 1)
                    throw std::invalid_argument("BoundaryFlux: mode index m must be >= 1");
                if (mm.m > nx / 2 - 1)
                    throw std::invalid_argument("BoundaryFlux: mode m=" + std::to_string(mm.m) +
                                                " is not resolvable at nx=" + std::to_string(nx));
            }
    }

    /// L2(top wall) norm of one profile; reported in place of the
    /// fractional boundary norms of the continuum estimates.
    static double wall_l2_norm(const std::vector<FluxMode>& modes, double xi) {
        double s = 0.0;
        for (const auto& mm : modes) s += 0.5 * (mm.a * mm.a + mm.b * mm.b) * xi;
        return std::sqrt(s);
    }

    bool empty() const { return qu.empty() && qt.empty() && qs.empty(); }
    bool operator==(const BoundaryFlux&) const = default;
};

/// One time level of the solution triple plus the derived streamfunction.
struct State {
    Field omega; // DirichletZ
    Field temp;  // NeumannZ
    Field salt;  // NeumannZ
    Field psi;   // DirichletZ, Delta psi = omega, psi = 0 on walls
    std::int64_t n = 0;
    double time = 0.0;

    static State zeros(const Grid& g) {
        State s;
        s.omega = Field::zeros(g, FieldKind::DirichletZ);
        s.temp = Field::zeros(g, FieldKind::NeumannZ);
        s.salt = Field::zeros(g, FieldKind::NeumannZ);
        s.psi = Field::zeros(g, FieldKind::DirichletZ);
        return s;
    }
};

// ---------------------------------------------------------------------------
// Quadrature and norms (channel layouts)
// ---------------------------------------------------------------------------

namespace detail {
inline void check_channel_field(const Grid& g, const Field& f) {
    if (f.nx != g.nx || f.rows != Field::rows_for(g, f.kind) || f.kind == FieldKind::None)
        throw std::invalid_argument("field does not match channel grid");
}
} // namespace detail

/// Integral over the domain: midpoint rule on centre layouts, trapezoid
/// in z on node layouts; both exact for constants.
inline double quadrature(const Grid& g, const Field& f) {
    detail::check_channel_field(g, f);
    const double wxz = g.dx() * g.hz();
    double s = 0.0;
    if (f.kind == FieldKind::NeumannZ) {
        for (double x : f.v) s += x;
        return s * wxz;
    }
    for (int j = 1; j < f.rows - 1; ++j)
        for (int i = 0; i < f.nx; ++i)
            s += f.at(i, j);
    double walls = 0.0;
    for (int i = 0; i < f.nx; ++i)
        walls += f.at(i, 0) + f.at(i, f.rows - 1);
    return (s + 0.5 * walls) * wxz;
}

inline double l2_inner(const Grid& g, const Field& f, const Field& h) {
    f.check_shape(h);
    detail::check_channel_field(g, f);
    const double wxz = g.dx() * g.hz();
    double s = 0.0;
    if (f.kind == FieldKind::NeumannZ) {
        for (std::size_t i = 0; i < f.v.size(); ++i) s += f.v[i] * h.v[i];
        return s * wxz;
    }
    for (int j = 1; j < f.rows - 1; ++j)
        for (int i = 0; i < f.nx; ++i)
            s += f.at(i, j) * h.at(i, j);
    double walls = 0.0;
    for (int i = 0; i < f.nx; ++i)
        walls += f.at(i, 0) * h.at(i, 0) + f.at(i, f.rows - 1) * h.at(i, f.rows - 1);
    return (s + 0.5 * walls) * wxz;
}

inline double l2_norm_sq(const Grid& g, const Field& f) { return l2_inner(g, f, f); }
inline double l2_norm(const Grid& g, const Field& f) { return std::sqrt(std::max(0.0, l2_norm_sq(g, f))); }

inline double mean(const Grid& g, const Field& f) { return quadrature(g, f) / g.xi; }

/// Remove the quadrature mean by a uniform constant shift.
inline Field subtract_mean(const Grid& g, Field f) {
    const double m = mean(g, f);
    for (double& x : f.v) x -= m;
    return f;
}

/// Mean projection that leaves wall rows of a node field untouched
/// (they carry boundary data); the constant is removed from interior
/// rows only, weighted by their quadrature measure.
inline void project_mean_interior(const Grid& g, Field& f) {
    if (f.kind != FieldKind::DirichletZ) {
        const double m = mean(g, f);
        for (double& x : f.v) x -= m;
        return;
    }
    const double q = quadrature(g, f);
    const double covered = g.xi * (1.0 - g.hz()); // interior node rows
    const double c = q / covered;
    for (int j = 1; j < f.rows - 1; ++j)
        for (int i = 0; i < f.nx; ++i)
            f.at(i, j) -= c;
}

// ---------------------------------------------------------------------------
// Spectral x-derivatives (shared by the elliptic operators and norms)
// ---------------------------------------------------------------------------

/// d/dx by Fourier multiplier i*k_m, Nyquist mode zeroed.
inline Field dx_spectral(const Grid& g, const Field& f) {
    detail::check_channel_field(g, f);
    const auto& plan = fft::row_fft(g.nx, f.rows);
    std::vector<std::complex<double>> spec(static_cast<std::size_t>(plan.spectral_size()) * f.rows);
    plan.forward(f.v.data(), spec.data());
    const int nxc = plan.spectral_size();
    for (int j = 0; j < f.rows; ++j)
        for (int m = 0; m < nxc; ++m) {
            const double km = 2.0 * std::numbers::pi * m / g.xi;
            std::complex<double>& c = spec[static_cast<std::size_t>(j) * nxc + m];
            c = (m == g.nx / 2) ? 0.0 : std::complex<double>(0.0, km) * c;
        }
    Field out(f.nx, f.rows, f.kind);
    plan.inverse(spec.data(), out.v.data());
    return out;
}

/// d2/dx2 by Fourier multiplier -k_m^2 (Nyquist retained).
inline Field d2x_spectral(const Grid& g, const Field& f) {
    detail::check_channel_field(g, f);
    const auto& plan = fft::row_fft(g.nx, f.rows);
    std::vector<std::complex<double>> spec(static_cast<std::size_t>(plan.spectral_size()) * f.rows);
    plan.forward(f.v.data(), spec.data());
    const int nxc = plan.spectral_size();
    for (int j = 0; j < f.rows; ++j)
        for (int m = 0; m < nxc; ++m) {
            const double km = 2.0 * std::numbers::pi * m / g.xi;
            spec[static_cast<std::size_t>(j) * nxc + m] *= -km * km;
        }
    Field out(f.nx, f.rows, f.kind);
    plan.inverse(spec.data(), out.v.data());
    return out;
}

/// |grad f|^2 as the quadratic form of the discrete Laplacian: spectral
/// in x, face differences in z. For centre fields this is the
/// homogeneous-flux (hatted) form; for node fields it matches
/// integration by parts against fields vanishing on the walls.
inline double h1_seminorm_sq(const Grid& g, const Field& f) {
    detail::check_channel_field(g, f);
    double s = -l2_inner(g, d2x_spectral(g, f), f);
    const double w = g.dx() / g.hz();
    for (int j = 0; j < f.rows - 1; ++j)
        for (int i = 0; i < f.nx; ++i) {
            const double d = f.at(i, j + 1) - f.at(i, j);
            s += w * d * d;
        }
    return s;
}

inline double h1_seminorm(const Grid& g, const Field& f) {
    return std::sqrt(std::max(0.0, h1_seminorm_sq(g, f)));
}

/// Pointwise sup of |grad f| with centred z-differences (one-sided at
/// walls). Diagnostic-grade.
inline double grad_sup(const Grid& g, const Field& f) {
    Field gx = dx_spectral(g, f);
    const double hz = g.hz();
    double best = 0.0;
    for (int j = 0; j < f.rows; ++j)
        for (int i = 0; i < f.nx; ++i) {
            double gz;
            if (j == 0)
                gz = (f.at(i, 1) - f.at(i, 0)) / hz;
            else if (j == f.rows - 1)
                gz = (f.at(i, j) - f.at(i, j - 1)) / hz;
            else
                gz = (f.at(i, j + 1) - f.at(i, j - 1)) / (2.0 * hz);
            best = std::max(best, std::sqrt(gx.at(i, j) * gx.at(i, j) + gz * gz));
        }
    return best;
}

inline double sup_abs(const Field& f) {
    double best = 0.0;
    for (double x : f.v) best = std::max(best, std::abs(x));
    return best;
}

/// Second-order interpolation between the two z layouts.
inline Field centers_to_nodes(const Grid& g, const Field& c) {
    if (c.kind != FieldKind::NeumannZ)
        throw std::invalid_argument("centers_to_nodes expects a centre field");
    Field out = Field::zeros(g, FieldKind::DirichletZ);
    for (int j = 1; j < g.nz; ++j)
        for (int i = 0; i < g.nx; ++i)
            out.at(i, j) = 0.5 * (c.at(i, j - 1) + c.at(i, j));
    for (int i = 0; i < g.nx; ++i) {
        out.at(i, 0) = 1.5 * c.at(i, 0) - 0.5 * c.at(i, 1);
        out.at(i, g.nz) = 1.5 * c.at(i, g.nz - 1) - 0.5 * c.at(i, g.nz - 2);
    }
    return out;
}

inline Field nodes_to_centers(const Grid& g, const Field& n) {
    if (n.kind != FieldKind::DirichletZ)
        throw std::invalid_argument("nodes_to_centers expects a node field");
    Field out = Field::zeros(g, FieldKind::NeumannZ);
    for (int j = 0; j < g.nz; ++j)
        for (int i = 0; i < g.nx; ++i)
            out.at(i, j) = 0.5 * (n.at(i, j) + n.at(i, j + 1));
    return out;
}

} // namespace ddc
