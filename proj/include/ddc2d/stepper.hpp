#pragma once

#include <functional>

#include "ddc2d/elliptic.hpp"
#include "ddc2d/nonlinear.hpp"

namespace ddc {

struct StepperOptions {
    bool advect = true;          // test hook: drop the one-leg terms
    double blowup_factor = 1e8;  // abort when any norm exceeds this times the initial scale
};

/// The two-step explicit-implicit scheme: BDF2 time derivative, one-leg
/// extrapolated advection, implicit diffusion and buoyancy. Solve order
/// per step: T, then S, then omega (which consumes the new T and S),
/// then the streamfunction, then mean projection. The machine holds two
/// consecutive levels and is a deterministic map
/// (U^{n-1}, U^n) -> (U^n, U^{n+1}).
class Stepper {
  public:
    Stepper(const Params& p, const BoundaryFlux& flux, State u0, State u1,
            StepperOptions opt = {})
        : p_(p), flux_(flux), g_(p.nx, p.nz, p.aspect_xi), opt_(opt),
          plan_t_(HelmholtzPlan::bdf2(g_, 1.0, p.k, HelmholtzPlan::Wall::Neumann)),
          plan_s_(HelmholtzPlan::bdf2(g_, p.lewis_beta, p.k, HelmholtzPlan::Wall::Neumann)),
          plan_w_(HelmholtzPlan::bdf2(g_, p.prandtl, p.k, HelmholtzPlan::Wall::Dirichlet)),
          prev_(std::move(u0)), curr_(std::move(u1)) {
        p_.validate();
        flux_.validate(p.nx);
        if (curr_.n != prev_.n + 1)
            throw std::logic_error("Stepper: initial states must be consecutive levels");
        qu_top_ = flux_.sample_top(flux_.qu, g_);
        qt_top_ = flux_.sample_top(flux_.qt, g_);
        qs_top_ = flux_.sample_top(flux_.qs, g_);
        init_scale_ = std::max({1.0, l2_norm(g_, curr_.omega), l2_norm(g_, curr_.temp),
                                l2_norm(g_, curr_.salt)});
    }

    const Grid& grid() const { return g_; }
    const Params& params() const { return p_; }
    const BoundaryFlux& flux() const { return flux_; }
    const State& prev() const { return prev_; }
    const State& curr() const { return curr_; }

    /// One semi-implicit Euler step (explicit advection at level 0,
    /// implicit diffusion and buoyancy at level 1) to produce the
    /// second initial level from U^0.
    static State bootstrap(const Params& p, const BoundaryFlux& flux, const State& u0,
                           StepperOptions opt = {}) {
        p.validate();
        flux.validate(p.nx);
        const Grid g(p.nx, p.nz, p.aspect_xi);
        const double k = p.k;
        const auto qu = flux.sample_top(flux.qu, g);
        const auto qt = flux.sample_top(flux.qt, g);
        const auto qs = flux.sample_top(flux.qs, g);

        const auto et = HelmholtzPlan::semi_implicit_euler(g, 1.0, k, HelmholtzPlan::Wall::Neumann);
        const auto es = HelmholtzPlan::semi_implicit_euler(g, p.lewis_beta, k, HelmholtzPlan::Wall::Neumann);
        const auto ew = HelmholtzPlan::semi_implicit_euler(g, p.prandtl, k, HelmholtzPlan::Wall::Dirichlet);

        State u1 = State::zeros(g);
        u1.n = u0.n + 1;
        u1.time = static_cast<double>(u1.n) * k;

        Field rhs_t = u0.temp;
        if (opt.advect) rhs_t -= k * jacobian_center(g, u0.psi, u0.temp, {}, qt);
        u1.temp = subtract_mean(g, et.solve(rhs_t, {}, qt));

        Field rhs_s = u0.salt;
        if (opt.advect) rhs_s -= k * jacobian_center(g, u0.psi, u0.salt, {}, qs);
        u1.salt = subtract_mean(g, es.solve(rhs_s, {}, qs));

        Field rhs_w = u0.omega;
        if (opt.advect) rhs_w -= k * jacobian(g, u0.psi, u0.omega);
        Field buoy = dx_spectral(g, centers_to_nodes(g, u1.temp - u1.salt));
        buoy *= k * p.prandtl;
        rhs_w += buoy;
        u1.omega = ew.solve(rhs_w, {}, qu);
        project_mean_interior(g, u1.omega);
        u1.psi = poisson_channel(g, u1.omega);
        return u1;
    }

    /// Advance one step; returns the new current state.
    const State& step() {
        const double k = p_.k;
        const double two_k = 2.0 * k;

        State next = State::zeros(g_);
        next.n = curr_.n + 1;
        next.time = static_cast<double>(next.n) * k;

        Field rhs_t = bdf2_history(curr_.temp, prev_.temp);
        if (opt_.advect)
            rhs_t -= two_k * one_leg_advection(g_, prev_, curr_, flux_, Variable::Temp);
        next.temp = subtract_mean(g_, plan_t_.solve(rhs_t, {}, qt_top_));

        Field rhs_s = bdf2_history(curr_.salt, prev_.salt);
        if (opt_.advect)
            rhs_s -= two_k * one_leg_advection(g_, prev_, curr_, flux_, Variable::Salt);
        next.salt = subtract_mean(g_, plan_s_.solve(rhs_s, {}, qs_top_));

        Field rhs_w = bdf2_history(curr_.omega, prev_.omega);
        if (opt_.advect)
            rhs_w -= two_k * one_leg_advection(g_, prev_, curr_, flux_, Variable::Omega);
        Field buoy = dx_spectral(g_, centers_to_nodes(g_, next.temp - next.salt));
        buoy *= two_k * p_.prandtl;
        rhs_w += buoy;
        next.omega = plan_w_.solve(rhs_w, {}, qu_top_);
        project_mean_interior(g_, next.omega);
        next.psi = poisson_channel(g_, next.omega);

        check_alive(next);
        prev_ = std::move(curr_);
        curr_ = std::move(next);
        return curr_;
    }

  private:
    static Field bdf2_history(const Field& cur, const Field& prv) {
        Field rhs = cur;
        rhs *= 4.0;
        rhs -= prv;
        return rhs;
    }

    void check_alive(const State& s) const {
        const double lim = opt_.blowup_factor * init_scale_;
        const double norms[] = {l2_norm_sq(g_, s.omega), l2_norm_sq(g_, s.temp),
                                l2_norm_sq(g_, s.salt)};
        for (double nsq : norms)
            if (!std::isfinite(nsq) || std::sqrt(nsq) > lim)
                throw BlowupError("solution norm exceeded blow-up threshold", s.n);
    }

    Params p_;
    BoundaryFlux flux_;
    Grid g_;
    StepperOptions opt_;
    HelmholtzPlan plan_t_, plan_s_, plan_w_;
    std::vector<double> qu_top_, qt_top_, qs_top_;
    State prev_, curr_;
    double init_scale_ = 1.0;
};

/// Repeated stepping with a per-step hook (diagnostics, snapshots).
/// The hook sees the machine after each accepted step.
inline void run(Stepper& m, int n_steps, const std::function<void(const Stepper&)>& per_step = {}) {
    if (n_steps < 0)
        throw std::invalid_argument("run: n_steps must be >= 0");
    for (int s = 0; s < n_steps; ++s) {
        m.step();
        if (per_step) per_step(m);
    }
}

} // namespace ddc
