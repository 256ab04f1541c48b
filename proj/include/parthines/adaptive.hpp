#pragma once

#include <deque>

#include "parthines/core.hpp"
#include "parthines/solvers.hpp"

namespace parthines {

/// Mixed relative/absolute tolerance: a step is acceptable when
/// |err_i| <= rel_tol*|z_i| + abs_tol_i for every component.
struct ToleranceSpec {
    double rel_tol = 1e-6;
    Vec abs_tol;

    /// abs_tol_i = typical_size_i * tol, rel_tol = tol.
    static ToleranceSpec from_tol(const PartitionedSystem& system, double tol);
};

/// max_i |err_i| / (rel_tol*|z_i| + abs_tol_i); acceptance means <= 1.
double scaled_error_norm(const Vec& err, const SplitState& z, const ToleranceSpec& tol);

struct ErrorEstimate {
    Vec err;                  // per-component estimate, x block then y block
    double scaled_norm = 0.0;
    SplitState proposed;      // solution the step would advance to
};

/// Step-doubling estimate: one step of size h against m substeps of size h/m.
/// err = (z_fine - z_coarse)/(m^2 - 1) estimates the error of the fine
/// solution; with `extrapolate` the proposal is the extrapolated value
/// z_fine + err, otherwise z_fine. Subdivisions m must be 2 or 3.
ErrorEstimate estimate_richardson(const PartitionedSystem& system, const SplitState& state,
                                  double h, int subdivisions, bool extrapolate,
                                  const ToleranceSpec& tol, const StageSolveConfig& cfg,
                                  EvalCounter& counter);

/// Right-hand side values stored at an accepted node.
struct NodeRecord {
    double t = 0.0;
    Vec f;
    Vec g;
};

struct EstimatorOptions {
    /// Degenerate variant: third derivatives from a single-interval cubic
    /// Hermite instead of three-node divided differences. The x part of the
    /// Hermite residual vanishes identically for the trapezoidal update;
    /// kept only for fidelity experiments.
    bool hermite_single_interval = false;
};

/// Embedded estimate from stored node values: the leading local error terms
/// -(h^2/12) x''' and -(h^2/12) y''' with the third derivatives approximated
/// by second divided differences of f and g over (node_prev, node_curr,
/// node_new). Nodes may be non-uniform.
ErrorEstimate estimate_embedded(const NodeRecord& node_prev, const NodeRecord& node_curr,
                                const SplitState& state_curr, const NodeRecord& node_new,
                                const SplitState& proposed, const ToleranceSpec& tol,
                                const EstimatorOptions& options = {});

struct ControllerLimits {
    double h_min = 0.0;       // 0: auto, 1e-12 * interval length
    double h_max = 0.0;       // 0: auto, interval length
    double growth_max = 3.0;
    double shrink_min = 0.2;
};

/// Proportional-integral step controller in the ratio form
///   h_next = safety * (1/r_n)^(kbeta1/k) * (r_{n-1}/r_n)^(kbeta2/k) * h,
/// with k = order_k + 1. Rejected steps shrink by at least a factor 2.
struct ControllerState {
    double prev_error_ratio = 1.0;
    double h_current = 0.0;
    int order_k = 2;          // estimator order: 2 base, 4 with extrapolation
    ControllerLimits limits;
    double safety = 0.9;
    double kbeta1 = 0.4;
    double kbeta2 = 0.2;
};

/// Returns (h_next, accept) for the error ratio of the attempted step and
/// updates the controller memory. h_next is clamped to the limits and is
/// strictly smaller than the attempted h on rejection.
std::pair<double, bool> controller_propose(ControllerState& ctrl, double scaled_norm);

struct AdaptiveConfig {
    double h_init = 0.0;      // 0: (t_end - t0)/1000
    ControllerLimits limits;
    double safety = 0.9;
    double kbeta1 = 0.4;
    double kbeta2 = 0.2;
    int max_consecutive_rejections = 40;
    long max_steps = 50000000;
    bool store_trajectory = false;
    EstimatorOptions estimator;
    StageSolveConfig stage;
};

struct RunRecord {
    std::string system_name;
    Method method = Method::modhines;
    double tol = 0.0;
    SplitState final_state;
    EvalCounter counter;
    std::vector<SplitState> trajectory;  // accepted states incl. initial
    bool failed = false;
    std::string failure_reason;
};

/// Adaptive integration with one of the variable-step methods
/// (modhines, modhext, modhnew). modhines and modhnew accept a step when
/// the scaled norm of their estimate is <= 1. modhext advances the
/// extrapolated (order 4) value; since the step-doubling difference only
/// measures the order-2 fine solution, its acceptance/control ratio models
/// the proposal's error as max(r^(5/3) * rel_tol^(2/3), r/4): the
/// order-consistent rescale of the measured norm, floored at a bounded
/// extrapolation credit. Throws DomainError for constant-step method ids.
/// Numerical failures are reported in the returned record.
RunRecord integrate_adaptive(const PartitionedSystem& system, const SplitState& initial,
                             double t_end, const ToleranceSpec& tol, Method method,
                             const AdaptiveConfig& cfg);

/// Constant-step driver of the extrapolated scheme: every macro step takes
/// the step-doubling pair and advances with the extrapolated value.
SplitState integrate_constant_extrapolated(const PartitionedSystem& system, SplitState state,
                                           double t_end, long n_steps, int subdivisions,
                                           const StageSolveConfig& cfg, EvalCounter& counter);

}  // namespace parthines
