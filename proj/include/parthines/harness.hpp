#pragma once

#include <iosfwd>

#include "parthines/adaptive.hpp"
#include "parthines/models.hpp"

namespace parthines {

/// max_i |z_i - z_ref,i| / (|z_ref,i| + typical_size_i) over the
/// concatenated (x, y) components.
double mixed_error_norm(const SplitState& z, const SplitState& z_ref, const Vec& typical_size);

struct ReferenceResult {
    SplitState state;                 // adaptive-path endpoint
    double certified_accuracy = 0.0;  // mixed-norm disagreement of the two paths
};

/// Endpoint reference from two independent paths: the step-doubling adaptive
/// method (modhines) at tol = 1e-12, and constant-step one-step-method runs
/// at base_steps and 2*base_steps combined by global Richardson
/// extrapolation. Throws ReferenceFailure when the paths disagree by more
/// than agreement_tol in the mixed norm.
ReferenceResult reference_solution(const PartitionedSystem& system, const SplitState& initial,
                                   double t_end, long base_steps = 1L << 16,
                                   double agreement_tol = 1e-8);

struct ConvergencePoint {
    long n = 0;
    double h = 0.0;
    double final_error = 0.0;  // mixed norm at t_end
};

struct ConvergenceResult {
    std::vector<ConvergencePoint> points;
    double slope = 0.0;  // least-squares slope of log error vs log h
};

/// Least-squares slope of log(err) against log(h). Requires at least two
/// points, all positive.
double least_squares_slope(const std::vector<double>& h, const std::vector<double>& err);

/// Runs a constant-step scheme (hines or cmhines) over the given step sizes.
/// h_list must be strictly decreasing and each h must divide
/// t_end - initial.t exactly; errors are mixed norms against `reference`.
ConvergenceResult convergence_study(const PartitionedSystem& system, const SplitState& initial,
                                    double t_end, Method method,
                                    const std::vector<double>& h_list,
                                    const SplitState& reference,
                                    const StageSolveConfig& cfg = {});

/// TOL_k = 10^(-2 - k/8), k = 0..48.
std::vector<double> default_tolerance_grid();

struct SweepSpec {
    ModelKind model = ModelKind::hh;
    BlockAssignment assignment = BlockAssignment::voltages_as_x;
    std::vector<Method> methods;      // variable-step methods
    std::vector<double> tol_list;     // strictly decreasing
    AdaptiveConfig config;
    long reference_steps = 1L << 16;  // constant-step base of the reference
};

struct WorkPrecisionPoint {
    std::string model;
    std::string method;
    std::string assignment;
    double tol = 0.0;
    double fevals = 0.0;
    long jacevals = 0;
    long accepted = 0;
    long rejected = 0;
    double final_error = 0.0;  // NaN for failed runs
    bool failed = false;
};

/// One point per (method, tol) in that order. Individual run failures set
/// the failed flag instead of aborting the sweep; a reference failure
/// aborts. Points run concurrently when PARTHINES_THREADS is above 1
/// (default 1); the output order does not depend on the thread count.
std::vector<WorkPrecisionPoint> run_sweep(const SweepSpec& spec);

/// Header `model,method,assignment,tol,fevals,jacevals,accepted,rejected,
/// final_error,failed`; floating-point fields with 17 significant digits.
void write_sweep_csv(std::ostream& out, const std::vector<WorkPrecisionPoint>& points);
void write_sweep_csv(const std::string& path, const std::vector<WorkPrecisionPoint>& points);

}  // namespace parthines
