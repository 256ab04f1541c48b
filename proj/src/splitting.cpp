#include "parthines/splitting.hpp"

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

/// Self-contained Newton solve for the two implicit half-stages; kept local
/// so the step shares no stage code with the one-step scheme.
Vec pr_newton(const std::function<void(const Vec& u, Vec& r)>& residual, Vec u,
              const StageSolveConfig& cfg, EvalCounter& counter, const std::string& stage_id) {
    const int n = static_cast<int>(u.size());
    Vec r(n), r_pert(n), u_pert(n), jac(static_cast<size_t>(n) * n);
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
        const Vec delta = lu_solve(jac, neg_r, stage_id);
        for (int i = 0; i < n; ++i) u[i] += delta[i];
        counter.newton_iterations += 1;
        if (!all_finite(u)) throw StageFailure(stage_id, "Newton iteration diverged");
        residual(u, r);
        if (!all_finite(r)) throw StageFailure(stage_id, "non-finite residual");
    }
    if (inf_norm(r) <= cfg.newton_tol * (1.0 + inf_norm(u))) return u;
    throw StageFailure(stage_id, "Newton iteration did not converge");
}

}  // namespace

SplitState pr_step(const PartitionedSystem& system, const SplitState& state, double h,
                   const StageSolveConfig& cfg, EvalCounter& counter, PRStageValues* stages) {
    if (h == 0.0) throw DomainError("pr_step: requires h != 0");
    const int nx = system.nx, ny = system.ny;
    const double t_half = state.t + 0.5 * h;
    const double t_new = state.t + h;

    auto [f_n, g_n] = evaluate(system, state, counter);
    (void)g_n;
    Vec x_half(nx);
    for (int i = 0; i < nx; ++i) x_half[i] = state.x[i] + 0.5 * h * f_n[i];

    // Implicit half-stage in y: y_half = y_n + (h/2) g(x_half, y_half, t_half).
    Vec y_half;
    if (cfg.use_semilinear_fastpath && system.semilinear && system.semilinear->y_block) {
        const YBlockLinear& yb = *system.semilinear->y_block;
        StructuredMatrix D;
        yb.D_of_x(x_half, D);
        Vec c(ny, 0.0);
        yb.c_of_xt(x_half, t_half, c);
        Vec rhs(ny);
        for (int i = 0; i < ny; ++i) rhs[i] = state.y[i] + 0.5 * h * c[i];
        y_half = solve_identity_minus(D, 0.5 * h, rhs, "pr-y-half");
    } else {
        Vec g(ny);
        auto residual = [&](const Vec& u, Vec& r) {
            g.assign(ny, 0.0);
            system.eval_g(x_half, u, t_half, g);
            counter.raw_rhs_evals += 1;
            r.resize(ny);
            for (int i = 0; i < ny; ++i) r[i] = u[i] - state.y[i] - 0.5 * h * g[i];
        };
        y_half = pr_newton(residual, state.y, cfg, counter, "pr-y-half");
    }
    counter.fevals += 1.0;

    // Explicit half-stage reusing the same stage values.
    Vec g_stage(ny, 0.0);
    system.eval_g(x_half, y_half, t_half, g_stage);
    counter.raw_rhs_evals += 1;
    Vec y_new(ny);
    for (int i = 0; i < ny; ++i) y_new[i] = y_half[i] + 0.5 * h * g_stage[i];

    // Implicit half-stage in x: x_new = x_half + (h/2) f(x_new, y_new, t_new).
    Vec x_new;
    if (cfg.use_semilinear_fastpath && system.semilinear && system.semilinear->x_block) {
        const XBlockLinear& xb = *system.semilinear->x_block;
        StructuredMatrix A;
        xb.A_of_y(y_new, A);
        Vec b(nx, 0.0);
        xb.b_of_yt(y_new, t_new, b);
        Vec rhs(nx);
        for (int i = 0; i < nx; ++i) rhs[i] = x_half[i] + 0.5 * h * b[i];
        x_new = solve_identity_minus(A, 0.5 * h, rhs, "pr-x-final");
    } else {
        Vec f(nx);
        auto residual = [&](const Vec& u, Vec& r) {
            f.assign(nx, 0.0);
            system.eval_f(u, y_new, t_new, f);
            counter.raw_rhs_evals += 1;
            r.resize(nx);
            for (int i = 0; i < nx; ++i) r[i] = u[i] - x_half[i] - 0.5 * h * f[i];
        };
        x_new = pr_newton(residual, x_half, cfg, counter, "pr-x-final");
    }
    counter.fevals += 0.5;

    if (stages) {
        stages->x_half = std::move(x_half);
        stages->y_half = std::move(y_half);
    }
    return {t_new, std::move(x_new), std::move(y_new)};
}

Mat2 strang_linear_propagator(const TestSystemParams& p, double h) {
    if (p.mu == 0.0 || p.lambda == 0.0)
        throw DomainError("strang_linear_propagator: requires mu != 0 and lambda != 0");
    if (h <= 0.0) throw DomainError("strang_linear_propagator: requires h > 0");

    // Exact scalar flows of the three substeps:
    //   half step in x with frozen y, full step in y with frozen x_half,
    //   half step in x with frozen y_new.
    const double r = std::exp(0.5 * p.mu * h);       // e^{mu h/2}
    const double beta = std::exp(p.lambda * h);      // e^{lambda h}
    const double px = (p.a / p.mu) * (r - 1.0);      // y-coupling over a half step
    const double py = (p.b / p.lambda) * (beta - 1.0);

    const Mat2 half_x{r, px, 0.0, 1.0};
    const Mat2 full_y{1.0, 0.0, py, beta};
    return half_x * (full_y * half_x);
}

}  // namespace parthines
