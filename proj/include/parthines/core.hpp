#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "parthines/linalg.hpp"

namespace parthines {

/// Solution state of a partitioned system at one time point.
struct SplitState {
    double t = 0.0;
    Vec x;
    Vec y;
};

/// Declared linear structure of the x block: f(x,y,t) = A(y) x + b(y,t).
struct XBlockLinear {
    std::function<void(const Vec& y, StructuredMatrix& A)> A_of_y;
    std::function<void(const Vec& y, double t, Vec& b)> b_of_yt;
    MatrixShape a_shape = MatrixShape::diagonal;
};

/// Declared linear structure of the y block: g(x,y,t) = c(x,t) + D(x) y.
struct YBlockLinear {
    std::function<void(const Vec& x, double t, Vec& c)> c_of_xt;
    std::function<void(const Vec& x, StructuredMatrix& D)> D_of_x;
    MatrixShape d_shape = MatrixShape::diagonal;
};

/// Optional per-block linear structure. A block is declared only when the
/// model is exactly linear in that block's own variables; implicit stages for
/// declared blocks reduce to a single structured linear solve.
struct SemilinearData {
    std::optional<XBlockLinear> x_block;
    std::optional<YBlockLinear> y_block;
};

/// Effort bookkeeping. `fevals` uses the convention that one unit covers a
/// combined evaluation of f and g; step routines charge fixed per-step
/// amounts independent of the inner iteration count. The remaining fields
/// are diagnostics.
struct EvalCounter {
    double fevals = 0.0;
    long jacobian_evals = 0;
    long steps_accepted = 0;
    long steps_rejected = 0;
    long newton_iterations = 0;
    long raw_rhs_evals = 0;
};

/// A partitioned ODE system x' = f(x,y,t), y' = g(x,y,t).
struct PartitionedSystem {
    std::string name;
    int nx = 0;
    int ny = 0;

    std::function<void(const Vec& x, const Vec& y, double t, Vec& f)> eval_f;
    std::function<void(const Vec& x, const Vec& y, double t, Vec& g)> eval_g;

    std::optional<SemilinearData> semilinear;

    /// Typical magnitude per component (x block then y block); defines the
    /// absolute-tolerance scale and the mixed error norm.
    Vec typical_size;

    /// Physically meaningful sampling box for randomized checks.
    Vec box_lo_x, box_hi_x;
    Vec box_lo_y, box_hi_y;
    double box_t_lo = 0.0, box_t_hi = 1.0;

    std::vector<std::string> component_names;  // size nx+ny, may be empty

    [[nodiscard]] int dim() const { return nx + ny; }
};

/// Evaluates f and g at `state`, charging one combined unit to `counter`.
/// Throws EvaluationError on dimension mismatch or non-finite output,
/// naming the first offending component.
std::pair<Vec, Vec> evaluate(const PartitionedSystem& system, const SplitState& state,
                             EvalCounter& counter);

/// Same computation and finiteness checks as evaluate(), without charging
/// the conventional unit. Used where values are by convention free.
void eval_raw(const PartitionedSystem& system, const Vec& x, const Vec& y, double t,
              Vec& f, Vec& g);

/// Samples `trials` random states in the system's box and returns the largest
/// per-component discrepancy |direct - assembled| / (1 + |direct|) between the
/// raw right-hand sides and the declared semilinear assembly. Only declared
/// blocks are checked. Requires semilinear data to be present.
double consistency_check(const PartitionedSystem& system, int trials, unsigned seed);

}  // namespace parthines
