#pragma once

#include "parthines/core.hpp"

namespace parthines {

enum class Method { hines, cmhines, modhines, modhext, modhnew };

[[nodiscard]] const char* method_name(Method m);
[[nodiscard]] std::optional<Method> method_from_name(const std::string& name);

/// Controls the implicit stage solves. Declared semilinear blocks are solved
/// with one structured linear solve; everything else uses a damped-free Newton
/// iteration with a finite-difference Jacobian refreshed every iteration.
struct StageSolveConfig {
    double newton_tol = 1e-12;
    int newton_max_iter = 50;
    bool use_semilinear_fastpath = true;
};

/// State of the staggered scheme: x lives on full nodes, y on half nodes
/// (y_half is the value at t_n + h/2).
struct StaggeredState {
    double t_n = 0.0;
    Vec x_n;
    Vec y_half;
};

/// Solves the implicit midpoint stage in y with frozen x:
///   y_new = y_from + h * g(x_frozen, (y_new + y_from)/2, t_eval).
Vec solve_midpoint_stage(const PartitionedSystem& system, const Vec& x_frozen,
                         const Vec& y_from, double t_eval, double h,
                         const StageSolveConfig& cfg, EvalCounter& counter);

/// Solves the trapezoidal closing stage in x with frozen y:
///   x_new = x_base + (h/2) * f(x_new, y_frozen, t_eval).
Vec solve_trapezoid_stage(const PartitionedSystem& system, const Vec& x_base,
                          const Vec& y_frozen, double t_eval, double h,
                          const StageSolveConfig& cfg, EvalCounter& counter);

/// Solves the implicit midpoint stage in x with frozen y:
///   x_new = x_from + h * f((x_from + x_new)/2, y_frozen, t_eval).
Vec solve_x_midpoint_stage(const PartitionedSystem& system, const Vec& x_from,
                           const Vec& y_frozen, double t_eval, double h,
                           const StageSolveConfig& cfg, EvalCounter& counter);

/// One step of the one-step scheme:
///   x_half = x_n + (h/2) f(x_n, y_n, t_n)
///   y_new  = y_n + h g(x_half, (y_new + y_n)/2, t_n + h/2)
///   x_new  = x_half + (h/2) f(x_new, y_new, t_n + h)
/// Charges exactly 2.5 evaluation units (1 explicit + 1 midpoint stage
/// + 0.5 trapezoidal stage) regardless of inner iteration counts.
SplitState modified_step(const PartitionedSystem& system, const SplitState& state, double h,
                         const StageSolveConfig& cfg, EvalCounter& counter);

/// Produces the staggered starting value y_{1/2} by an explicit quarter step
/// in x followed by a midpoint half-stage in y; local error O(h^3).
/// Charges 2 evaluation units.
StaggeredState hines_bootstrap(const PartitionedSystem& system, const SplitState& initial,
                               double h, const StageSolveConfig& cfg, EvalCounter& counter);

/// One step of the staggered scheme:
///   x_{n+1}   = x_n + h f((x_n + x_{n+1})/2, y_half, t_n + h/2)
///   y_{3/2}   = y_half + h g(x_{n+1}, (y_{3/2} + y_half)/2, t_n + h)
/// Charges exactly 2 evaluation units.
StaggeredState hines_step(const PartitionedSystem& system, const StaggeredState& state,
                          double h, const StageSolveConfig& cfg, EvalCounter& counter);

/// Integrates with n constant steps of the one-step scheme.
SplitState integrate_constant_modified(const PartitionedSystem& system, SplitState state,
                                       double t_end, long n_steps, const StageSolveConfig& cfg,
                                       EvalCounter& counter);

/// Integrates with the staggered scheme: bootstrap, n steps, and a final
/// second-order average of the two y values bracketing t_end.
SplitState integrate_constant_hines(const PartitionedSystem& system, SplitState state,
                                    double t_end, long n_steps, const StageSolveConfig& cfg,
                                    EvalCounter& counter);

}  // namespace parthines
