#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "ddc2d/gstability.hpp"
#include "ddc2d/stepper.hpp"

namespace ddc {

/// Everything measured once per step. One CSV row per record.
struct DiagnosticsRecord {
    std::int64_t n = 0;
    double t = 0.0;
    double l2_omega = 0, l2_temp = 0, l2_salt = 0;
    double h1_omega_hat = 0, h1_temp_hat = 0, h1_salt_hat = 0;
    double lap_omega = 0, lap_temp = 0, lap_salt = 0;
    double gn_omega = 0, gn_temp = 0, gn_salt = 0, gn_combined = 0;
    double d_omega = 0, d_temp = 0, d_salt = 0, du_sq = 0;
    double mean_omega = 0, mean_temp = 0, mean_salt = 0;
    double momega_bound = 0, momega_interp = 0;
    double k_margin = 0;
    double f1_sq = 0, f2_sq = 0;
    double energy = 0, grad_temp_sq = 0, nusselt_top = 0;

    static const std::vector<std::string>& columns() {
        static const std::vector<std::string> cols = {
            "n", "t",
            "l2_omega", "l2_temp", "l2_salt",
            "h1_omega_hat", "h1_temp_hat", "h1_salt_hat",
            "lap_omega", "lap_temp", "lap_salt",
            "gn_omega", "gn_temp", "gn_salt", "gn_combined",
            "d_omega", "d_temp", "d_salt", "du_sq",
            "mean_omega", "mean_temp", "mean_salt",
            "momega_bound", "momega_interp",
            "k_margin",
            "f1_sq", "f2_sq",
            "energy", "grad_temp_sq", "nusselt_top"};
        return cols;
    }

    std::vector<double> row() const {
        return {static_cast<double>(n), t,
                l2_omega, l2_temp, l2_salt,
                h1_omega_hat, h1_temp_hat, h1_salt_hat,
                lap_omega, lap_temp, lap_salt,
                gn_omega, gn_temp, gn_salt, gn_combined,
                d_omega, d_temp, d_salt, du_sq,
                mean_omega, mean_temp, mean_salt,
                momega_bound, momega_interp,
                k_margin,
                f1_sq, f2_sq,
                energy, grad_temp_sq, nusselt_top};
    }

    double by_name(const std::string& name) const {
        const auto& cols = columns();
        const auto vals = row();
        for (std::size_t i = 0; i < cols.size(); ++i)
            if (cols[i] == name) return vals[i];
        throw std::invalid_argument("DiagnosticsRecord: no column named " + name);
    }
};

/// Startup-time quantities the per-step record reuses.
struct RunMonitors {
    double m_omega = 0.0;      // timestep-independent monitor value
    double h_half_bound = 0.0; // k^{-1/2} m_omega
    double k_max = 0.0;
    ForcingNorms forcing;
};

inline RunMonitors make_run_monitors(const Grid& g, const State& u0, const State& u1,
                                     const Lifting& l, const Params& p,
                                     const ConstantsConfig& c) {
    RunMonitors rm;
    const State hist[2] = {u0, u1};
    const MOmegaMonitor mm = m_omega_monitor(g, std::span<const State>(hist, 2), l, p, c);
    rm.m_omega = mm.m_omega;
    rm.h_half_bound = mm.h_half_bound;
    rm.k_max = timestep_restriction(mm.m_omega, l.norms.psi_grad_sup, p, c);
    rm.forcing = forcing_norms(l, p, c);
    return rm;
}

/// Measure one state pair. Hatted quantities subtract the lifting.
inline DiagnosticsRecord record(const Grid& g, const State& prev, const State& curr,
                                const Lifting& l, const Params& p, const ConstantsConfig& c,
                                const BoundaryFlux& flux, const RunMonitors& rm) {
    DiagnosticsRecord r;
    r.n = curr.n;
    r.t = curr.time;
    r.l2_omega = l2_norm(g, curr.omega);
    r.l2_temp = l2_norm(g, curr.temp);
    r.l2_salt = l2_norm(g, curr.salt);

    const Field wh = hatted_omega(curr, l);
    const Field th = hatted_temp(curr, l);
    const Field sh = hatted_salt(curr, l);
    r.h1_omega_hat = h1_seminorm(g, wh);
    r.h1_temp_hat = h1_seminorm(g, th);
    r.h1_salt_hat = h1_seminorm(g, sh);

    const auto qt = flux.sample_top(flux.qt, g);
    const auto qs = flux.sample_top(flux.qs, g);
    r.lap_omega = l2_norm(g, apply_laplacian_node(g, curr.omega));
    r.lap_temp = l2_norm(g, apply_laplacian_center(g, curr.temp, {}, qt));
    r.lap_salt = l2_norm(g, apply_laplacian_center(g, curr.salt, {}, qs));

    const double nu_k = nu_shift(p, c) * p.k;
    r.gn_omega = gnorm_sq(g, hatted_omega(prev, l), wh, nu_k);
    r.gn_temp = gnorm_sq(g, hatted_temp(prev, l), th, nu_k);
    r.gn_salt = gnorm_sq(g, hatted_salt(prev, l), sh, nu_k);
    r.gn_combined = r.gn_omega + 16.0 * p.prandtl * c.c0 * r.gn_temp +
                    16.0 * p.prandtl * c.c0 * r.gn_salt / p.lewis_beta;

    r.d_omega = l2_norm(g, curr.omega - prev.omega);
    r.d_temp = l2_norm(g, curr.temp - prev.temp);
    r.d_salt = l2_norm(g, curr.salt - prev.salt);
    r.du_sq = r.d_omega * r.d_omega + r.d_temp * r.d_temp + r.d_salt * r.d_salt;

    r.mean_omega = mean(g, curr.omega);
    r.mean_temp = mean(g, curr.temp);
    r.mean_salt = mean(g, curr.salt);

    r.momega_bound = rm.h_half_bound;
    r.momega_interp = l2_norm(g, wh) * h1_seminorm(g, wh);
    r.k_margin = rm.k_max > 0.0 ? p.k / rm.k_max : 0.0;
    r.f1_sq = rm.forcing.f1_sq;
    r.f2_sq = rm.forcing.f2_sq;

    r.energy = 0.5 * h1_seminorm_sq(g, curr.psi);
    r.grad_temp_sq = h1_seminorm_sq(g, curr.temp);

    // Nusselt-like top-wall flux integral: Q_T times T extrapolated to z=1
    double nus = 0.0;
    for (int i = 0; i < g.nx; ++i) {
        const double twall = 1.5 * curr.temp.at(i, g.nz - 1) - 0.5 * curr.temp.at(i, g.nz - 2);
        nus += qt[i] * twall;
    }
    r.nusselt_top = nus * g.dx();
    return r;
}

// ---------------------------------------------------------------------------
// Discrete multistep energy identities (empirical verification helpers)
// ---------------------------------------------------------------------------

/// |LHS - RHS| of 2 (3a - b, a) = 3|a|^2 - |b|^2/3 + |3a - b|^2/3.
template <class G>
double bdf_difference_identity_residual(const G& g, const Field& a, const Field& b) {
    Field comb = a;
    comb *= 3.0;
    comb -= b;
    const double lhs = 2.0 * l2_inner(g, comb, a);
    const double rhs =
        3.0 * l2_norm_sq(g, a) - l2_norm_sq(g, b) / 3.0 + l2_norm_sq(g, comb) / 3.0;
    return std::abs(lhs - rhs);
}

/// |LHS - RHS| of -2 (Lap w1, w1 - w0) = |grad w1|^2 - |grad w0|^2 + |grad (w1-w0)|^2
/// for the periodic spectral operators (exact summation by parts).
inline double dissipation_identity_residual(const PeriodicGrid& g, const Field& w1,
                                            const Field& w0) {
    const Field d = w1 - w0;
    const double lhs = -2.0 * l2_inner(g, laplacian(g, w1), d);
    const double rhs = h1_seminorm_sq(g, w1) - h1_seminorm_sq(g, w0) + h1_seminorm_sq(g, d);
    return std::abs(lhs - rhs);
}

/// Channel analogue; exact when w1 - w0 vanishes on the walls (static
/// wall data), since the z-difference form then telescopes without
/// boundary terms.
inline double dissipation_identity_residual(const Grid& g, const Field& w1, const Field& w0) {
    const Field d = w1 - w0;
    const double lhs = -2.0 * l2_inner(g, apply_laplacian_node(g, w1), d);
    const double rhs = h1_seminorm_sq(g, w1) - h1_seminorm_sq(g, w0) + h1_seminorm_sq(g, d);
    return std::abs(lhs - rhs);
}

// ---------------------------------------------------------------------------
// Windowed statistics
// ---------------------------------------------------------------------------

/// Running mean/variance of one functional over a time window
/// (Welford), with the window recorded for batch recomputation checks.
class FunctionalAverage {
  public:
    FunctionalAverage(std::string id, double t_a, double t_b)
        : id_(std::move(id)), t_a_(t_a), t_b_(t_b) {
        if (!(t_b > t_a))
            throw std::invalid_argument("FunctionalAverage: empty window");
    }

    void add(double t, double value) {
        if (t < t_a_ || t > t_b_) return;
        ++count_;
        const double delta = value - mean_;
        mean_ += delta / static_cast<double>(count_);
        m2_ += delta * (value - mean_);
    }

    const std::string& id() const { return id_; }
    std::size_t count() const { return count_; }
    double mean() const {
        if (count_ == 0)
            throw std::logic_error("FunctionalAverage: no samples in window");
        return mean_;
    }
    double variance() const { return count_ > 1 ? m2_ / static_cast<double>(count_ - 1) : 0.0; }

  private:
    std::string id_;
    double t_a_, t_b_;
    std::size_t count_ = 0;
    double mean_ = 0.0, m2_ = 0.0;
};

enum class LimitStyle { Plain, TailWeighted };

/// Windowed Cesaro average of a functional of the records. TailWeighted
/// emphasises late samples linearly; both are declared surrogates for a
/// generalised limit, which is not computable.
inline double time_average(std::span<const DiagnosticsRecord> recs,
                           const std::function<double(const DiagnosticsRecord&)>& phi,
                           double t_a, double t_b, LimitStyle style = LimitStyle::Plain) {
    double wsum = 0.0, vsum = 0.0;
    for (const auto& r : recs) {
        if (r.t < t_a || r.t > t_b) continue;
        const double w = style == LimitStyle::Plain ? 1.0 : (r.t - t_a);
        wsum += w;
        vsum += w * phi(r);
    }
    if (wsum <= 0.0) {
        // tail weights can all vanish when a single record sits at t_a
        std::size_t cnt = 0;
        double s = 0.0;
        for (const auto& r : recs)
            if (r.t >= t_a && r.t <= t_b) {
                ++cnt;
                s += phi(r);
            }
        if (cnt == 0)
            throw std::invalid_argument("time_average: empty window");
        return s / static_cast<double>(cnt);
    }
    return vsum / wsum;
}

// ---------------------------------------------------------------------------
// Trajectory comparisons
// ---------------------------------------------------------------------------

struct AbsorbingBallReport {
    double entry_time_a = 0.0, entry_time_b = 0.0;
    double late_sup_a = 0.0, late_sup_b = 0.0;
    double rel_gap = 0.0;
    bool agree = false;
};

/// Compare two runs from different initial data under the same forcing:
/// the sup of the combined two-level norm over each run's trailing
/// window, the time after which each trajectory stays within
/// entry_factor of that sup, and whether the suprema agree within tol.
inline AbsorbingBallReport absorbing_ball_report(std::span<const DiagnosticsRecord> a,
                                                 std::span<const DiagnosticsRecord> b,
                                                 double window_frac = 0.25, double tol = 0.10,
                                                 double entry_factor = 1.1) {
    auto analyse = [&](std::span<const DiagnosticsRecord> recs, double& sup, double& entry) {
        if (recs.size() < 8)
            throw std::invalid_argument("absorbing_ball_report: run too short");
        const double t_end = recs.back().t;
        const double t_lo = t_end * (1.0 - window_frac);
        sup = 0.0;
        std::size_t in_window = 0;
        for (const auto& r : recs)
            if (r.t >= t_lo) {
                sup = std::max(sup, r.gn_combined);
                ++in_window;
            }
        if (in_window < 4)
            throw std::invalid_argument("absorbing_ball_report: window too short");
        entry = 0.0;
        const double thresh = entry_factor * sup;
        for (const auto& r : recs)
            if (r.gn_combined > thresh) entry = r.t;
    };
    AbsorbingBallReport rep;
    analyse(a, rep.late_sup_a, rep.entry_time_a);
    analyse(b, rep.late_sup_b, rep.entry_time_b);
    const double big = std::max(rep.late_sup_a, rep.late_sup_b);
    rep.rel_gap = big > 0.0 ? std::abs(rep.late_sup_a - rep.late_sup_b) / big : 0.0;
    rep.agree = rep.rel_gap <= tol;
    return rep;
}

struct InequalityMargin {
    std::string name;
    double lhs = 0.0, rhs = 0.0;
    double margin() const { return rhs > 0.0 ? lhs / rhs : (lhs > 0.0 ? 1e300 : 0.0); }
};

struct ConsistencyReport {
    std::vector<InequalityMargin> margins;
    double t0 = 0.0; // start of the window the verdict covers
    bool consistent = true;
};

/// Evaluate the monitored inequalities over the trailing window of a
/// run: the timestep restriction, the three lifting smallness
/// constraints, and the interpolated H^{1/2} level against its assumed
/// bound. The run is "theorem-consistent" when every margin is <= 1
/// from t0 on.
inline ConsistencyReport theorem_consistency(std::span<const DiagnosticsRecord> recs,
                                             const Lifting& lift, double window_frac = 0.25) {
    if (recs.empty())
        throw std::invalid_argument("theorem_consistency: no records");
    ConsistencyReport rep;
    rep.t0 = recs.back().t * (1.0 - window_frac);
    double sup_interp = 0.0;
    for (const auto& r : recs)
        if (r.t >= rep.t0) sup_interp = std::max(sup_interp, r.momega_interp);
    rep.margins.push_back({"k <= k_max", recs.back().k_margin, 1.0});
    rep.margins.push_back({"|Omega|^2 smallness", lift.margins[0], 1.0});
    rep.margins.push_back({"|T_Q|^2 smallness", lift.margins[1], 1.0});
    rep.margins.push_back({"|S_Q|^2 smallness", lift.margins[2], 1.0});
    rep.margins.push_back({"|w_hat|^2_{H^1/2} <= k^{-1/2} M_w", sup_interp,
                           recs.back().momega_bound});
    for (const auto& m : rep.margins)
        if (m.margin() > 1.0) rep.consistent = false;
    return rep;
}

struct DeltaScalingReport {
    double sup_coarse = 0.0, sup_fine = 0.0;
    double exponent = 0.0; // p with sup_coarse/sup_fine = 2^p
    bool degenerate = false;
};

/// Late-window sup of |U^{n+1} - U^n| for runs at k and k/2 and the
/// implied scaling exponent. Degenerate (steady) windows are flagged
/// rather than divided.
inline DeltaScalingReport delta_scaling_report(std::span<const DiagnosticsRecord> coarse,
                                               std::span<const DiagnosticsRecord> fine,
                                               double t_lo, double t_hi,
                                               double degenerate_floor = 1e-12) {
    auto window_sup = [&](std::span<const DiagnosticsRecord> recs) {
        double sup = 0.0;
        std::size_t cnt = 0;
        for (const auto& r : recs)
            if (r.t >= t_lo && r.t <= t_hi) {
                sup = std::max(sup, std::sqrt(r.du_sq));
                ++cnt;
            }
        if (cnt < 2)
            throw std::invalid_argument("delta_scaling_report: window holds fewer than 2 records");
        return sup;
    };
    DeltaScalingReport rep;
    rep.sup_coarse = window_sup(coarse);
    rep.sup_fine = window_sup(fine);
    if (rep.sup_coarse < degenerate_floor || rep.sup_fine < degenerate_floor) {
        rep.degenerate = true;
        return rep;
    }
    rep.exponent = std::log2(rep.sup_coarse / rep.sup_fine);
    return rep;
}

} // namespace ddc
