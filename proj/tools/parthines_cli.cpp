#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include "CLI11.hpp"
#include "parthines/harness.hpp"

namespace {

using namespace parthines;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

ModelSpec resolve_model(const std::string& value) {
    if (const auto kind = model_from_name(value)) return benchmark_model_spec(*kind);
    return load_model_config(value);
}

BlockAssignment resolve_assignment(const std::string& value) {
    const auto a = assignment_from_name(value);
    if (!a)
        throw ConfigError("unknown assignment '" + value + "' (valid: voltages, gates)");
    return *a;
}

Method resolve_method(const std::string& value) {
    const auto m = method_from_name(value);
    if (!m)
        throw ConfigError("unknown method '" + value +
                          "' (valid: hines, cmhines, modhines, modhext, modhnew)");
    return *m;
}

StabilityFlavor resolve_flavor(const std::string& value) {
    if (value == "modified") return StabilityFlavor::modified;
    if (value == "hines") return StabilityFlavor::hines;
    if (value == "strang") return StabilityFlavor::strang;
    throw ConfigError("unknown stability method '" + value +
                      "' (valid: modified, hines, strang)");
}

std::ostream& open_output(const std::string& path, std::ofstream& file) {
    if (path.empty()) return std::cout;
    file.open(path);
    if (!file) throw ConfigError("cannot open '" + path + "' for writing");
    return file;
}

/// Constant-step run that records every node state; y values of the
/// staggered scheme are centered averages of the bracketing half nodes.
std::vector<SplitState> constant_trajectory(const PartitionedSystem& system,
                                            const SplitState& initial, double t_end, long n,
                                            Method method, EvalCounter& counter) {
    const StageSolveConfig cfg;
    std::vector<SplitState> traj;
    traj.reserve(static_cast<size_t>(n) + 1);
    traj.push_back(initial);
    const double t0 = initial.t;
    const double span = t_end - t0;
    const double h = span / static_cast<double>(n);

    if (method == Method::cmhines) {
        SplitState state = initial;
        for (long k = 0; k < n; ++k) {
            state = modified_step(system, state, h, cfg, counter);
            state.t = t0 + span * static_cast<double>(k + 1) / static_cast<double>(n);
            counter.steps_accepted += 1;
            traj.push_back(state);
        }
    } else {
        StaggeredState stg = hines_bootstrap(system, initial, h, cfg, counter);
        counter.steps_accepted += 1;
        Vec y_prev = stg.y_half;
        for (long k = 0; k < n; ++k) {
            y_prev = stg.y_half;
            stg = hines_step(system, stg, h, cfg, counter);
            stg.t_n = t0 + span * static_cast<double>(k + 1) / static_cast<double>(n);
            counter.steps_accepted += 1;
            Vec y_node(system.ny);
            for (int i = 0; i < system.ny; ++i) y_node[i] = 0.5 * (y_prev[i] + stg.y_half[i]);
            traj.push_back({stg.t_n, stg.x_n, std::move(y_node)});
        }
    }
    traj.back().t = t_end;
    return traj;
}

void write_trajectory_csv(std::ostream& out, const PartitionedSystem& system,
                          const std::vector<SplitState>& traj, bool dense) {
    out << "t";
    const int dim = system.dim();
    for (int i = 0; i < dim; ++i) {
        if (i < static_cast<int>(system.component_names.size()))
            out << ',' << system.component_names[i];
        else if (i < system.nx)
            out << ",x" << i;
        else
            out << ",y" << (i - system.nx);
    }
    out << '\n';

    const size_t size = traj.size();
    const auto emit = [&](size_t k) {
        const SplitState& s = traj[k];
        out << fmt(s.t);
        for (const double v : s.x) out << ',' << fmt(v);
        for (const double v : s.y) out << ',' << fmt(v);
        out << '\n';
    };
    constexpr size_t kMaxRows = 10000;
    if (dense || size <= kMaxRows) {
        for (size_t k = 0; k < size; ++k) emit(k);
        return;
    }
    size_t prev = size;  // sentinel
    for (size_t k = 0; k < kMaxRows; ++k) {
        const size_t index = static_cast<size_t>(std::llround(
            static_cast<double>(k) * static_cast<double>(size - 1) /
            static_cast<double>(kMaxRows - 1)));
        if (index != prev) emit(index);
        prev = index;
    }
}

struct RunArgs {
    std::string model;
    std::string method;
    std::string assignment = "voltages";
    std::string out;
    double tol = 0.0;
    double h = 0.0;
    bool dense = false;
};

int do_run(const RunArgs& args) {
    const ModelSpec spec = resolve_model(args.model);
    const BlockAssignment assignment = resolve_assignment(args.assignment);
    const Method method = resolve_method(args.method);
    if ((args.tol > 0.0) == (args.h > 0.0))
        throw ConfigError("exactly one of --tol and --h is required");
    const ModelSetup setup = instantiate(spec, assignment);

    std::vector<SplitState> trajectory;
    EvalCounter counter;
    if (args.h > 0.0) {
        if (method != Method::hines && method != Method::cmhines)
            throw ConfigError("--h requires a constant-step method (hines or cmhines)");
        const double span = setup.t_end - setup.initial.t;
        const long n = std::max(1L, std::lround(span / args.h));
        trajectory =
            constant_trajectory(setup.system, setup.initial, setup.t_end, n, method, counter);
    } else {
        if (method == Method::hines || method == Method::cmhines)
            throw ConfigError("--tol requires a variable-step method (modhines, modhext, "
                              "modhnew)");
        AdaptiveConfig cfg;
        cfg.store_trajectory = true;
        const RunRecord rec =
            integrate_adaptive(setup.system, setup.initial, setup.t_end,
                               ToleranceSpec::from_tol(setup.system, args.tol), method, cfg);
        counter = rec.counter;
        trajectory = rec.trajectory;
        if (rec.failed) {
            std::cerr << "run failed: " << rec.failure_reason << "\n";
            return 2;
        }
    }

    std::ofstream file;
    write_trajectory_csv(open_output(args.out, file), setup.system, trajectory, args.dense);

    const SplitState& final_state = trajectory.back();
    std::cerr << "model=" << model_name(setup.kind) << " method=" << method_name(method)
              << " assignment=" << assignment_name(assignment) << " t=" << fmt(final_state.t)
              << " accepted=" << counter.steps_accepted
              << " rejected=" << counter.steps_rejected << " fevals=" << fmt(counter.fevals)
              << " jacevals=" << counter.jacobian_evals << "\n";
    return 0;
}

struct ConvergeArgs {
    std::string model;
    std::string method = "hines";
    std::string assignment = "voltages";
    std::string out;
    int steps = 6;
    int k0 = 8;
    long reference_steps = 1L << 16;
};

int do_converge(const ConvergeArgs& args) {
    const ModelSpec spec = resolve_model(args.model);
    const BlockAssignment assignment = resolve_assignment(args.assignment);
    const Method method = resolve_method(args.method);
    if (args.steps < 2) throw ConfigError("--steps must be at least 2");
    if (args.k0 < 0) throw ConfigError("--k0 must be non-negative");
    const ModelSetup setup = instantiate(spec, assignment);

    const ReferenceResult reference =
        reference_solution(setup.system, setup.initial, setup.t_end, args.reference_steps);
    const double span = setup.t_end - setup.initial.t;
    std::vector<double> h_list;
    for (int k = args.k0; k < args.k0 + args.steps; ++k)
        h_list.push_back(span / std::pow(2.0, k));
    const ConvergenceResult result = convergence_study(setup.system, setup.initial, setup.t_end,
                                                       method, h_list, reference.state);

    std::ofstream file;
    std::ostream& out = open_output(args.out, file);
    out << "model,method,assignment,n,h,final_error,slope\n";
    for (const ConvergencePoint& p : result.points)
        out << model_name(setup.kind) << ',' << method_name(method) << ','
            << assignment_name(assignment) << ',' << p.n << ',' << fmt(p.h) << ','
            << fmt(p.final_error) << ',' << fmt(result.slope) << '\n';
    std::cerr << "slope=" << fmt(result.slope)
              << " reference_accuracy=" << fmt(reference.certified_accuracy) << "\n";
    return 0;
}

struct SweepArgs {
    std::string model;
    std::string methods = "modhines,modhext,modhnew";
    std::string assignment = "voltages";
    std::string out;
    long reference_steps = 1L << 16;
};

int do_sweep(const SweepArgs& args) {
    const auto kind = model_from_name(args.model);
    if (!kind) throw ConfigError("unknown model '" + args.model + "' (valid: hh, sds)");

    SweepSpec spec;
    spec.model = *kind;
    spec.assignment = resolve_assignment(args.assignment);
    spec.tol_list = default_tolerance_grid();
    spec.reference_steps = args.reference_steps;
    std::stringstream names(args.methods);
    std::string token;
    while (std::getline(names, token, ',')) {
        if (token.empty()) continue;
        const Method m = resolve_method(token);
        if (m == Method::hines || m == Method::cmhines)
            throw ConfigError("sweep methods must be variable-step (modhines, modhext, "
                              "modhnew)");
        spec.methods.push_back(m);
    }
    if (spec.methods.empty()) throw ConfigError("--methods must name at least one method");

    const std::vector<WorkPrecisionPoint> points = run_sweep(spec);
    std::ofstream file;
    write_sweep_csv(open_output(args.out, file), points);
    return 0;
}

struct StabilityArgs {
    std::string method = "modified";
    std::string out;
    double mu = 0.0;
    double lambda = 0.0;
    double a = 0.0;
    double b = 0.0;
    std::vector<double> h;
};

int do_stability(const StabilityArgs& args) {
    const StabilityFlavor flavor = resolve_flavor(args.method);
    TestSystemParams p;
    p.mu = args.mu;
    p.lambda = args.lambda;
    p.a = args.a;
    p.b = args.b;

    const double nan = std::numeric_limits<double>::quiet_NaN();
    double h_crit = nan;
    if (p.admissible()) {
        const auto boundary = stability_boundary_h(p, flavor);
        h_crit = boundary ? *boundary : std::numeric_limits<double>::infinity();
    }

    std::ofstream file;
    std::ostream& out = open_output(args.out, file);
    out << "method,mu,lambda,a,b,gamma,h,alpha,beta,gamma_lower,rho,stable,margin,h_crit\n";
    for (const double h : args.h) {
        if (!(h > 0.0)) throw ConfigError("--h values must be positive");
        const StabilityFunctions fn = stability_functions(p, h, flavor);
        const double gamma = p.gamma();
        const double rho = spectral_radius(recursion_matrix(p, h, flavor));
        double lower = nan, margin = nan;
        bool stable = false;
        if (std::abs(fn.alpha) < 1.0 && std::abs(fn.beta) < 1.0) {
            const StabilityVerdict verdict = is_stable(fn.alpha, fn.beta, gamma);
            lower = stability_lower_bound(fn.alpha, fn.beta);
            stable = verdict.stable;
            margin = verdict.margin;
        }
        out << args.method << ',' << fmt(p.mu) << ',' << fmt(p.lambda) << ',' << fmt(p.a)
            << ',' << fmt(p.b) << ',' << fmt(gamma) << ',' << fmt(h) << ',' << fmt(fn.alpha)
            << ',' << fmt(fn.beta) << ',' << fmt(lower) << ',' << fmt(rho) << ','
            << (stable ? "true" : "false") << ',' << fmt(margin) << ',' << fmt(h_crit) << '\n';
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Partitioned one-step and staggered solvers for Hodgkin-Huxley type systems"};
    app.require_subcommand(1);
    // --h is a step size below; keep help on --help only.
    app.set_help_flag("--help", "Print this help message and exit");

    RunArgs run_args;
    CLI::App* run = app.add_subcommand("run", "Integrate one model and write a trajectory CSV");
    run->set_help_flag("--help", "Print this help message and exit");
    run->add_option("--model", run_args.model, "Model name (hh, sds) or config file path")
        ->required();
    run->add_option("--method", run_args.method,
                    "hines, cmhines (with --h) or modhines, modhext, modhnew (with --tol)")
        ->required();
    run->add_option("--assignment", run_args.assignment, "Block assignment: voltages or gates");
    run->add_option("--tol", run_args.tol, "Tolerance for the variable-step methods");
    run->add_option("--h", run_args.h, "Step size for the constant-step methods");
    run->add_option("--out", run_args.out, "Output CSV path (default stdout)");
    run->add_flag("--dense", run_args.dense,
                  "Write every accepted step instead of at most 10000 rows");

    ConvergeArgs conv_args;
    CLI::App* conv = app.add_subcommand("converge", "Constant-step convergence study");
    conv->set_help_flag("--help", "Print this help message and exit");
    conv->add_option("--model", conv_args.model, "Model name (hh, sds) or config file path")
        ->required();
    conv->add_option("--method", conv_args.method, "hines or cmhines");
    conv->add_option("--assignment", conv_args.assignment,
                     "Block assignment: voltages or gates");
    conv->add_option("--steps", conv_args.steps, "Number of successive step halvings");
    conv->add_option("--k0", conv_args.k0, "Coarsest grid exponent: h = span/2^k0");
    conv->add_option("--reference-steps", conv_args.reference_steps,
                     "Base step count of the reference cross-check");
    conv->add_option("--out", conv_args.out, "Output CSV path (default stdout)");

    SweepArgs sweep_args;
    CLI::App* sweep = app.add_subcommand("sweep", "Work-precision sweep over the tolerance grid");
    sweep->set_help_flag("--help", "Print this help message and exit");
    sweep->add_option("--model", sweep_args.model, "Model name: hh or sds")->required();
    sweep->add_option("--methods", sweep_args.methods, "Comma-separated variable-step methods");
    sweep->add_option("--assignment", sweep_args.assignment,
                      "Block assignment: voltages or gates");
    sweep->add_option("--reference-steps", sweep_args.reference_steps,
                      "Base step count of the reference cross-check");
    sweep->add_option("--out", sweep_args.out, "Output CSV path (default stdout)");

    StabilityArgs stab_args;
    CLI::App* stab = app.add_subcommand("stability", "Stability verdicts on the linear test system");
    stab->set_help_flag("--help", "Print this help message and exit");
    stab->add_option("--method", stab_args.method, "modified, hines or strang");
    stab->add_option("--mu", stab_args.mu, "x-block rate")->required();
    stab->add_option("--lambda", stab_args.lambda, "y-block rate")->required();
    stab->add_option("--a", stab_args.a, "Coupling of y into x'")->required();
    stab->add_option("--b", stab_args.b, "Coupling of x into y'")->required();
    stab->add_option("--h", stab_args.h, "Step sizes to examine (repeatable)")
        ->required()
        ->expected(-1);
    stab->add_option("--out", stab_args.out, "Output CSV path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (run->parsed()) return do_run(run_args);
        if (conv->parsed()) return do_converge(conv_args);
        if (sweep->parsed()) return do_sweep(sweep_args);
        if (stab->parsed()) return do_stability(stab_args);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
