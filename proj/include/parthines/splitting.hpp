#pragma once

#include "parthines/core.hpp"
#include "parthines/solvers.hpp"
#include "parthines/stability.hpp"

namespace parthines {

/// Internal stage values of a completed alternating-direction step.
struct PRStageValues {
    Vec x_half;
    Vec y_half;
};

/// One Peaceman-Rachford alternating-direction step:
///   x_half = x_n + (h/2) f(x_n, y_n, t_n)                      (explicit in x)
///   y_half = y_n + (h/2) g(x_half, y_half, t_half)             (implicit in y)
///   y_new  = y_half + (h/2) g(x_half, y_half, t_half)          (explicit in y)
///   x_new  = x_half + (h/2) f(x_new, y_new, t_new)             (implicit in x)
/// Deliberately implemented independently of modified_step; the two are
/// algebraically equivalent, which the tests exploit as a cross-check.
/// Charges 2.5 evaluation units.
SplitState pr_step(const PartitionedSystem& system, const SplitState& state, double h,
                   const StageSolveConfig& cfg, EvalCounter& counter,
                   PRStageValues* stages = nullptr);

/// Exact one-step propagator of the Strang splitting applied to the linear
/// test system, composed in closed form from the scalar linear flows.
/// Requires mu != 0 and lambda != 0.
Mat2 strang_linear_propagator(const TestSystemParams& p, double h);

}  // namespace parthines
