#include "parthines/core.hpp"

#include <cmath>
#include <random>

namespace parthines {

namespace {

std::string component_label(const PartitionedSystem& system, int index) {
    if (index < static_cast<int>(system.component_names.size()))
        return system.component_names[index];
    return index < system.nx ? "x[" + std::to_string(index) + "]"
                             : "y[" + std::to_string(index - system.nx) + "]";
}

void check_finite(const PartitionedSystem& system, const Vec& f, const Vec& g, double t) {
    for (int i = 0; i < system.nx; ++i)
        if (!std::isfinite(f[i]))
            throw EvaluationError("non-finite f in component '" + component_label(system, i) +
                                  "' at t=" + std::to_string(t));
    for (int i = 0; i < system.ny; ++i)
        if (!std::isfinite(g[i]))
            throw EvaluationError("non-finite g in component '" +
                                  component_label(system, system.nx + i) +
                                  "' at t=" + std::to_string(t));
}

// Deterministic uniform double in [0,1); avoids distribution objects whose
// output is implementation defined.
double unit_uniform(std::mt19937& rng) { return rng() * 0x1p-32; }

double sample_in(std::mt19937& rng, double lo, double hi) {
    return lo + (hi - lo) * unit_uniform(rng);
}

}  // namespace

void eval_raw(const PartitionedSystem& system, const Vec& x, const Vec& y, double t,
              Vec& f, Vec& g) {
    if (static_cast<int>(x.size()) != system.nx || static_cast<int>(y.size()) != system.ny)
        throw EvaluationError("state dimension mismatch for system '" + system.name + "'");
    f.assign(system.nx, 0.0);
    g.assign(system.ny, 0.0);
    system.eval_f(x, y, t, f);
    system.eval_g(x, y, t, g);
    if (static_cast<int>(f.size()) != system.nx || static_cast<int>(g.size()) != system.ny)
        throw EvaluationError("right-hand side returned wrong dimension for system '" +
                              system.name + "'");
    check_finite(system, f, g, t);
}

std::pair<Vec, Vec> evaluate(const PartitionedSystem& system, const SplitState& state,
                             EvalCounter& counter) {
    Vec f, g;
    eval_raw(system, state.x, state.y, state.t, f, g);
    counter.fevals += 1.0;
    counter.raw_rhs_evals += 1;
    return {std::move(f), std::move(g)};
}

double consistency_check(const PartitionedSystem& system, int trials, unsigned seed) {
    if (!system.semilinear)
        throw DomainError("consistency_check: system '" + system.name +
                          "' declares no semilinear data");
    const SemilinearData& sl = *system.semilinear;

    std::mt19937 rng(seed);
    Vec x(system.nx), y(system.ny), f, g;
    Vec assembled_f(system.nx), assembled_g(system.ny), tmp;
    StructuredMatrix A, D;
    double worst = 0.0;

    for (int trial = 0; trial < trials; ++trial) {
        for (int i = 0; i < system.nx; ++i)
            x[i] = sample_in(rng, system.box_lo_x[i], system.box_hi_x[i]);
        for (int i = 0; i < system.ny; ++i)
            y[i] = sample_in(rng, system.box_lo_y[i], system.box_hi_y[i]);
        const double t = sample_in(rng, system.box_t_lo, system.box_t_hi);

        eval_raw(system, x, y, t, f, g);

        if (sl.x_block) {
            sl.x_block->A_of_y(y, A);
            tmp.assign(system.nx, 0.0);
            A.apply(x, tmp);
            assembled_f.assign(system.nx, 0.0);
            sl.x_block->b_of_yt(y, t, assembled_f);
            for (int i = 0; i < system.nx; ++i) {
                const double direct = f[i];
                const double diff = std::abs(direct - (tmp[i] + assembled_f[i]));
                worst = std::max(worst, diff / (1.0 + std::abs(direct)));
            }
        }
        if (sl.y_block) {
            sl.y_block->D_of_x(x, D);
            tmp.assign(system.ny, 0.0);
            D.apply(y, tmp);
            assembled_g.assign(system.ny, 0.0);
            sl.y_block->c_of_xt(x, t, assembled_g);
            for (int i = 0; i < system.ny; ++i) {
                const double direct = g[i];
                const double diff = std::abs(direct - (assembled_g[i] + tmp[i]));
                worst = std::max(worst, diff / (1.0 + std::abs(direct)));
            }
        }
    }
    return worst;
}

}  // namespace parthines
