#include "parthines/harness.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <ostream>
#include <thread>

namespace parthines {

double mixed_error_norm(const SplitState& z, const SplitState& z_ref, const Vec& typical_size) {
    const size_t nx = z_ref.x.size();
    const size_t ny = z_ref.y.size();
    if (z.x.size() != nx || z.y.size() != ny || typical_size.size() != nx + ny)
        throw DomainError("mixed_error_norm: dimension mismatch");
    double worst = 0.0;
    for (size_t i = 0; i < nx; ++i)
        worst = std::max(worst,
                         std::abs(z.x[i] - z_ref.x[i]) / (std::abs(z_ref.x[i]) + typical_size[i]));
    for (size_t i = 0; i < ny; ++i)
        worst = std::max(worst, std::abs(z.y[i] - z_ref.y[i]) /
                                    (std::abs(z_ref.y[i]) + typical_size[nx + i]));
    return worst;
}

ReferenceResult reference_solution(const PartitionedSystem& system, const SplitState& initial,
                                   double t_end, long base_steps, double agreement_tol) {
    AdaptiveConfig cfg;
    // modhines keeps the raw per-step error estimate below tol, the most
    // conservative acceptance rule of the adaptive family.
    RunRecord rec = integrate_adaptive(system, initial, t_end,
                                       ToleranceSpec::from_tol(system, 1e-12), Method::modhines,
                                       cfg);
    if (rec.failed)
        throw ReferenceFailure("adaptive reference path failed for '" + system.name +
                               "': " + rec.failure_reason);

    StageSolveConfig stage_cfg;
    EvalCounter coarse_counter, fine_counter;
    const SplitState coarse =
        integrate_constant_modified(system, initial, t_end, base_steps, stage_cfg, coarse_counter);
    SplitState fine = integrate_constant_modified(system, initial, t_end, 2 * base_steps,
                                                  stage_cfg, fine_counter);
    // Global second-order error expansion: (4 z_{2n} - z_n)/3.
    for (size_t i = 0; i < fine.x.size(); ++i) fine.x[i] += (fine.x[i] - coarse.x[i]) / 3.0;
    for (size_t i = 0; i < fine.y.size(); ++i) fine.y[i] += (fine.y[i] - coarse.y[i]) / 3.0;

    const double disagreement = mixed_error_norm(rec.final_state, fine, system.typical_size);
    if (!(disagreement <= agreement_tol)) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.3e (limit %.3e)", disagreement, agreement_tol);
        throw ReferenceFailure("reference paths disagree for '" + system.name + "': " + buf);
    }
    return {rec.final_state, disagreement};
}

double least_squares_slope(const std::vector<double>& h, const std::vector<double>& err) {
    if (h.size() != err.size() || h.size() < 2)
        throw DomainError("least_squares_slope: need matching lists with at least two points");
    std::vector<double> lh(h.size()), le(h.size());
    for (size_t i = 0; i < h.size(); ++i) {
        if (!(h[i] > 0.0) || !(err[i] > 0.0))
            throw DomainError("least_squares_slope: values must be positive");
        lh[i] = std::log(h[i]);
        le[i] = std::log(err[i]);
    }
    double mh = 0.0, me = 0.0;
    for (size_t i = 0; i < h.size(); ++i) {
        mh += lh[i];
        me += le[i];
    }
    mh /= static_cast<double>(h.size());
    me /= static_cast<double>(h.size());
    double num = 0.0, den = 0.0;
    for (size_t i = 0; i < h.size(); ++i) {
        num += (lh[i] - mh) * (le[i] - me);
        den += (lh[i] - mh) * (lh[i] - mh);
    }
    if (den == 0.0) throw DomainError("least_squares_slope: step sizes are all equal");
    return num / den;
}

ConvergenceResult convergence_study(const PartitionedSystem& system, const SplitState& initial,
                                    double t_end, Method method,
                                    const std::vector<double>& h_list,
                                    const SplitState& reference, const StageSolveConfig& cfg) {
    if (method != Method::hines && method != Method::cmhines)
        throw DomainError("convergence_study supports the constant-step methods hines and "
                          "cmhines, got " + std::string(method_name(method)));
    if (h_list.size() < 2) throw DomainError("convergence_study: need at least two step sizes");
    const double span = t_end - initial.t;
    if (!(span > 0.0)) throw DomainError("convergence_study: empty interval");

    ConvergenceResult result;
    std::vector<double> hs, errs;
    double prev_h = std::numeric_limits<double>::infinity();
    for (const double h : h_list) {
        if (!(h > 0.0) || !(h < prev_h))
            throw DomainError("convergence_study: step sizes must be positive and strictly "
                              "decreasing");
        prev_h = h;
        const long n = std::lround(span / h);
        if (n < 1 || std::abs(static_cast<double>(n) * h - span) > 1e-9 * span)
            throw DomainError("convergence_study: step size does not divide the interval");

        EvalCounter counter;
        const SplitState end =
            method == Method::hines
                ? integrate_constant_hines(system, initial, t_end, n, cfg, counter)
                : integrate_constant_modified(system, initial, t_end, n, cfg, counter);
        const double error = mixed_error_norm(end, reference, system.typical_size);
        result.points.push_back({n, h, error});
        hs.push_back(h);
        errs.push_back(error);
    }
    result.slope = least_squares_slope(hs, errs);
    return result;
}

std::vector<double> default_tolerance_grid() {
    std::vector<double> grid;
    grid.reserve(49);
    for (int k = 0; k <= 48; ++k) grid.push_back(std::pow(10.0, -2.0 - k / 8.0));
    return grid;
}

namespace {

int sweep_thread_count() {
    const char* env = std::getenv("PARTHINES_THREADS");
    if (!env || !*env) return 1;
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 1) return 1;
    return static_cast<int>(std::min(v, 256L));
}

}  // namespace

std::vector<WorkPrecisionPoint> run_sweep(const SweepSpec& spec) {
    if (spec.methods.empty() || spec.tol_list.empty())
        throw DomainError("run_sweep: methods and tol_list must be non-empty");
    double prev = std::numeric_limits<double>::infinity();
    for (const double tol : spec.tol_list) {
        if (!(tol > 0.0) || !(tol < prev))
            throw DomainError("run_sweep: tol_list must be positive and strictly decreasing");
        prev = tol;
    }

    const ModelSetup setup = instantiate(benchmark_model_spec(spec.model), spec.assignment);
    const ReferenceResult reference =
        reference_solution(setup.system, setup.initial, setup.t_end, spec.reference_steps);

    std::vector<WorkPrecisionPoint> points(spec.methods.size() * spec.tol_list.size());
    const auto run_one = [&](size_t index) {
        const Method method = spec.methods[index / spec.tol_list.size()];
        const double tol = spec.tol_list[index % spec.tol_list.size()];
        WorkPrecisionPoint& p = points[index];
        p.model = model_name(spec.model);
        p.method = method_name(method);
        p.assignment = assignment_name(spec.assignment);
        p.tol = tol;
        try {
            const RunRecord rec =
                integrate_adaptive(setup.system, setup.initial, setup.t_end,
                                   ToleranceSpec::from_tol(setup.system, tol), method,
                                   spec.config);
            p.fevals = rec.counter.fevals;
            p.jacevals = rec.counter.jacobian_evals;
            p.accepted = rec.counter.steps_accepted;
            p.rejected = rec.counter.steps_rejected;
            p.failed = rec.failed;
            p.final_error =
                rec.failed ? std::numeric_limits<double>::quiet_NaN()
                           : mixed_error_norm(rec.final_state, reference.state,
                                              setup.system.typical_size);
        } catch (const std::exception&) {
            p.failed = true;
            p.final_error = std::numeric_limits<double>::quiet_NaN();
        }
    };

    const size_t threads =
        std::min(static_cast<size_t>(sweep_thread_count()), points.size());
    if (threads <= 1) {
        for (size_t i = 0; i < points.size(); ++i) run_one(i);
    } else {
        std::atomic<size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (size_t t = 0; t < threads; ++t)
            pool.emplace_back([&] {
                for (size_t i = next.fetch_add(1); i < points.size(); i = next.fetch_add(1))
                    run_one(i);
            });
        for (auto& worker : pool) worker.join();
    }
    return points;
}

namespace {

std::string csv_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

void write_sweep_csv(std::ostream& out, const std::vector<WorkPrecisionPoint>& points) {
    out << "model,method,assignment,tol,fevals,jacevals,accepted,rejected,final_error,failed\n";
    for (const WorkPrecisionPoint& p : points)
        out << p.model << ',' << p.method << ',' << p.assignment << ',' << csv_double(p.tol)
            << ',' << csv_double(p.fevals) << ',' << p.jacevals << ',' << p.accepted << ','
            << p.rejected << ',' << csv_double(p.final_error) << ',' << (p.failed ? 1 : 0)
            << '\n';
}

void write_sweep_csv(const std::string& path, const std::vector<WorkPrecisionPoint>& points) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open '" + path + "' for writing");
    write_sweep_csv(out, points);
}

}  // namespace parthines
