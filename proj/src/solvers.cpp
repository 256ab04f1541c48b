#include "parthines/solvers.hpp"

#include <cassert>
#include <cmath>

namespace parthines {

namespace {

double inf_norm(const Vec& v) {
    double m = 0.0;
    for (double e : v) m = std::max(m, std::abs(e));
    return m;
}

bool all_finite(const Vec& v) {
    for (double e : v) {
        if (!std::isfinite(e)) return false;
    }
    return true;
}

/// Newton iteration on residual(u) with a dense forward-difference Jacobian
/// rebuilt every iteration. Converged when |residual|_inf falls below
/// newton_tol * (1 + |u|_inf).
Vec newton_solve(const std::function<void(const Vec& u, Vec& r)>& residual, Vec u,
                 const StageSolveConfig& cfg, EvalCounter& counter,
                 const std::string& stage_id) {
    const int n = static_cast<int>(u.size());
    Vec r(n), r_pert(n), u_pert(n);
    Vec jac(static_cast<size_t>(n) * n);

    residual(u, r);
    if (!all_finite(r)) throw StageFailure(stage_id, "non-finite residual");

    for (int iter = 0; iter < cfg.newton_max_iter; ++iter) {
        if (inf_norm(r) <= cfg.newton_tol * (1.0 + inf_norm(u))) return u;

        for (int j = 0; j < n; ++j) {
            const double eps = 1.4901161193847656e-8 * (1.0 + std::abs(u[j]));
            u_pert = u;
            u_pert[j] += eps;
            residual(u_pert, r_pert);
            for (int i = 0; i < n; ++i)
                jac[static_cast<size_t>(i) * n + j] = (r_pert[i] - r[i]) / eps;
        }
        counter.jacobian_evals += 1;

        Vec neg_r(n);
        for (int i = 0; i < n; ++i) neg_r[i] = -r[i];
        Vec delta = lu_solve(jac, neg_r, stage_id);
        for (int i = 0; i < n; ++i) u[i] += delta[i];
        counter.newton_iterations += 1;

        if (!all_finite(u) || inf_norm(delta) > 1e8 * (1.0 + inf_norm(u)))
            throw StageFailure(stage_id, "Newton iteration diverged");
        residual(u, r);
        if (!all_finite(r)) throw StageFailure(stage_id, "non-finite residual");
    }
    if (inf_norm(r) <= cfg.newton_tol * (1.0 + inf_norm(u))) return u;
    throw StageFailure(stage_id, "Newton iteration did not converge in " +
                                     std::to_string(cfg.newton_max_iter) + " iterations");
}

}  // namespace

const char* method_name(Method m) {
    switch (m) {
        case Method::hines: return "hines";
        case Method::cmhines: return "cmhines";
        case Method::modhines: return "modhines";
        case Method::modhext: return "modhext";
        case Method::modhnew: return "modhnew";
    }
    return "?";
}

std::optional<Method> method_from_name(const std::string& name) {
    for (Method m : {Method::hines, Method::cmhines, Method::modhines, Method::modhext,
                     Method::modhnew})
        if (name == method_name(m)) return m;
    return std::nullopt;
}

Vec solve_midpoint_stage(const PartitionedSystem& system, const Vec& x_frozen,
                         const Vec& y_from, double t_eval, double h,
                         const StageSolveConfig& cfg, EvalCounter& counter) {
    const int ny = system.ny;
    if (cfg.use_semilinear_fastpath && system.semilinear && system.semilinear->y_block) {
        const YBlockLinear& yb = *system.semilinear->y_block;
        StructuredMatrix D;
        yb.D_of_x(x_frozen, D);
        Vec c(ny, 0.0);
        yb.c_of_xt(x_frozen, t_eval, c);
        Vec rhs(ny), dy(ny);
        D.apply(y_from, dy);
        for (int i = 0; i < ny; ++i) rhs[i] = y_from[i] + h * c[i] + 0.5 * h * dy[i];
        return solve_identity_minus(D, 0.5 * h, rhs, "midpoint");
    }

    Vec g(ny), mid(ny);
    auto residual = [&](const Vec& u, Vec& r) {
        for (int i = 0; i < ny; ++i) mid[i] = 0.5 * (u[i] + y_from[i]);
        g.assign(ny, 0.0);
        system.eval_g(x_frozen, mid, t_eval, g);
        counter.raw_rhs_evals += 1;
        r.resize(ny);
        for (int i = 0; i < ny; ++i) r[i] = u[i] - y_from[i] - h * g[i];
    };
    return newton_solve(residual, y_from, cfg, counter, "midpoint");
}

Vec solve_trapezoid_stage(const PartitionedSystem& system, const Vec& x_base,
                          const Vec& y_frozen, double t_eval, double h,
                          const StageSolveConfig& cfg, EvalCounter& counter) {
    const int nx = system.nx;
    if (cfg.use_semilinear_fastpath && system.semilinear && system.semilinear->x_block) {
        const XBlockLinear& xb = *system.semilinear->x_block;
        StructuredMatrix A;
        xb.A_of_y(y_frozen, A);
        Vec b(nx, 0.0);
        xb.b_of_yt(y_frozen, t_eval, b);
        Vec rhs(nx);
        for (int i = 0; i < nx; ++i) rhs[i] = x_base[i] + 0.5 * h * b[i];
        return solve_identity_minus(A, 0.5 * h, rhs, "trapezoid");
    }

    Vec f(nx);
    auto residual = [&](const Vec& u, Vec& r) {
        f.assign(nx, 0.0);
        system.eval_f(u, y_frozen, t_eval, f);
        counter.raw_rhs_evals += 1;
        r.resize(nx);
        for (int i = 0; i < nx; ++i) r[i] = u[i] - x_base[i] - 0.5 * h * f[i];
    };
    return newton_solve(residual, x_base, cfg, counter, "trapezoid");
}

Vec solve_x_midpoint_stage(const PartitionedSystem& system, const Vec& x_from,
                           const Vec& y_frozen, double t_eval, double h,
                           const StageSolveConfig& cfg, EvalCounter& counter) {
    const int nx = system.nx;
    if (cfg.use_semilinear_fastpath && system.semilinear && system.semilinear->x_block) {
        const XBlockLinear& xb = *system.semilinear->x_block;
        StructuredMatrix A;
        xb.A_of_y(y_frozen, A);
        Vec b(nx, 0.0);
        xb.b_of_yt(y_frozen, t_eval, b);
        Vec rhs(nx), ax(nx);
        A.apply(x_from, ax);
        for (int i = 0; i < nx; ++i) rhs[i] = x_from[i] + 0.5 * h * ax[i] + h * b[i];
        return solve_identity_minus(A, 0.5 * h, rhs, "x-midpoint");
    }

    Vec f(nx), mid(nx);
    auto residual = [&](const Vec& u, Vec& r) {
        for (int i = 0; i < nx; ++i) mid[i] = 0.5 * (u[i] + x_from[i]);
        f.assign(nx, 0.0);
        system.eval_f(mid, y_frozen, t_eval, f);
        counter.raw_rhs_evals += 1;
        r.resize(nx);
        for (int i = 0; i < nx; ++i) r[i] = u[i] - x_from[i] - h * f[i];
    };
    return newton_solve(residual, x_from, cfg, counter, "x-midpoint");
}

SplitState modified_step(const PartitionedSystem& system, const SplitState& state, double h,
                         const StageSolveConfig& cfg, EvalCounter& counter) {
    if (h == 0.0) throw DomainError("modified_step: requires h != 0");
    auto [f_n, g_n] = evaluate(system, state, counter);
    (void)g_n;

    Vec x_half(system.nx);
    for (int i = 0; i < system.nx; ++i) x_half[i] = state.x[i] + 0.5 * h * f_n[i];

    Vec y_new = solve_midpoint_stage(system, x_half, state.y, state.t + 0.5 * h, h, cfg, counter);
    counter.fevals += 1.0;

    Vec x_new = solve_trapezoid_stage(system, x_half, y_new, state.t + h, h, cfg, counter);
    counter.fevals += 0.5;

    return {state.t + h, std::move(x_new), std::move(y_new)};
}

StaggeredState hines_bootstrap(const PartitionedSystem& system, const SplitState& initial,
                               double h, const StageSolveConfig& cfg, EvalCounter& counter) {
    if (h <= 0.0) throw DomainError("hines_bootstrap: requires h > 0");
    auto [f_0, g_0] = evaluate(system, initial, counter);
    (void)g_0;

    Vec x_quarter(system.nx);
    for (int i = 0; i < system.nx; ++i) x_quarter[i] = initial.x[i] + 0.25 * h * f_0[i];

    Vec y_half = solve_midpoint_stage(system, x_quarter, initial.y, initial.t + 0.25 * h,
                                      0.5 * h, cfg, counter);
    counter.fevals += 1.0;

    return {initial.t, initial.x, std::move(y_half)};
}

StaggeredState hines_step(const PartitionedSystem& system, const StaggeredState& state,
                          double h, const StageSolveConfig& cfg, EvalCounter& counter) {
    if (h <= 0.0) throw DomainError("hines_step: requires h > 0");

    Vec x_new = solve_x_midpoint_stage(system, state.x_n, state.y_half, state.t_n + 0.5 * h, h,
                                       cfg, counter);
    counter.fevals += 1.0;

    Vec y_next_half =
        solve_midpoint_stage(system, x_new, state.y_half, state.t_n + h, h, cfg, counter);
    counter.fevals += 1.0;

    return {state.t_n + h, std::move(x_new), std::move(y_next_half)};
}

SplitState integrate_constant_modified(const PartitionedSystem& system, SplitState state,
                                       double t_end, long n_steps, const StageSolveConfig& cfg,
                                       EvalCounter& counter) {
    if (n_steps <= 0 || t_end <= state.t)
        throw DomainError("integrate_constant_modified: requires n_steps > 0 and t_end > t0");
    const double t0 = state.t;
    const double h = (t_end - t0) / static_cast<double>(n_steps);
    for (long k = 0; k < n_steps; ++k) {
        state = modified_step(system, state, h, cfg, counter);
        state.t = t0 + (t_end - t0) * static_cast<double>(k + 1) / static_cast<double>(n_steps);
        counter.steps_accepted += 1;
    }
    state.t = t_end;
    return state;
}

SplitState integrate_constant_hines(const PartitionedSystem& system, SplitState state,
                                    double t_end, long n_steps, const StageSolveConfig& cfg,
                                    EvalCounter& counter) {
    if (n_steps <= 0 || t_end <= state.t)
        throw DomainError("integrate_constant_hines: requires n_steps > 0 and t_end > t0");
    const double t0 = state.t;
    const double h = (t_end - t0) / static_cast<double>(n_steps);

    StaggeredState stg = hines_bootstrap(system, state, h, cfg, counter);
    counter.steps_accepted += 1;

    Vec y_prev_half = stg.y_half;
    for (long k = 0; k < n_steps; ++k) {
        y_prev_half = stg.y_half;
        stg = hines_step(system, stg, h, cfg, counter);
        stg.t_n = t0 + (t_end - t0) * static_cast<double>(k + 1) / static_cast<double>(n_steps);
        counter.steps_accepted += 1;
    }

    // y is carried on half nodes; the centered average of the two values
    // bracketing t_end is second-order consistent with y(t_end).
    Vec y_end(system.ny);
    for (int i = 0; i < system.ny; ++i) y_end[i] = 0.5 * (y_prev_half[i] + stg.y_half[i]);
    return {t_end, std::move(stg.x_n), std::move(y_end)};
}

}  // namespace parthines
