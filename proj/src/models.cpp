#include "parthines/models.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>

namespace parthines {

const char* model_name(ModelKind kind) { return kind == ModelKind::hh ? "hh" : "sds"; }

const char* assignment_name(BlockAssignment assignment) {
    return assignment == BlockAssignment::voltages_as_x ? "voltages" : "gates";
}

std::optional<ModelKind> model_from_name(const std::string& name) {
    if (name == "hh") return ModelKind::hh;
    if (name == "sds") return ModelKind::sds;
    return std::nullopt;
}

std::optional<BlockAssignment> assignment_from_name(const std::string& name) {
    if (name == "voltages") return BlockAssignment::voltages_as_x;
    if (name == "gates") return BlockAssignment::gates_as_x;
    return std::nullopt;
}

double psi(double x) {
    if (std::abs(x) < 1e-5) return 1.0 - 0.5 * x + x * x / 12.0;
    return x / std::expm1(x);
}

namespace hh_rates {
double alpha_n(double V) { return 0.1 * psi(0.1 * (V + 10.0)); }
double beta_n(double V) { return 0.125 * std::exp(V / 80.0); }
double alpha_m(double V) { return psi(0.1 * (V + 25.0)); }
double beta_m(double V) { return 4.0 * std::exp(V / 18.0); }
double alpha_h(double V) { return 0.07 * std::exp(0.05 * V); }
double beta_h(double V) { return 1.0 / (1.0 + std::exp(0.1 * (V + 30.0))); }
}  // namespace hh_rates

namespace sds_rates {
double alpha_n(double V1) { return 100.0 * psi(-100.0 * (V1 + 0.06)); }
double beta_n(double V1) { return 125.0 * std::exp(-12.5 * (V1 + 0.07)); }
double alpha_m(double V1) { return 1000.0 * psi(-100.0 * (V1 + 0.045)); }
double beta_m(double V1) { return 4000.0 * std::exp(-(V1 + 0.07) / 0.018); }
double alpha_h(double V1) { return 70.0 * std::exp(-50.0 * (V1 + 0.07)); }
double beta_h(double V1) { return 1000.0 / (1.0 + std::exp(-100.0 * (V1 + 0.04))); }
double alpha_r(double V3) { return V3 <= -0.07 ? 5.0 : 5.0 * std::exp(-50.0 * (V3 + 0.07)); }
double beta_r(double V3) { return 5.0 - alpha_r(V3); }
double alpha_s(double V3) { return 1600.0 / (1.0 + std::exp(-72.0 * (V3 + 0.005))); }
double beta_s(double V3) { return 100.0 * psi(200.0 * (V3 + 0.0189)); }
}  // namespace sds_rates

namespace {

double gate_rhs(double alpha, double beta, double P, GateSign sign) {
    return sign == GateSign::standard ? alpha * (1.0 - P) - beta * P
                                      : alpha * (1.0 - P) + beta * P;
}

// Own-rate of a gate equation written as b + d*P.
double gate_linear_rate(double alpha, double beta, GateSign sign) {
    return sign == GateSign::standard ? -(alpha + beta) : beta - alpha;
}

}  // namespace

PartitionedSystem build_hh(const HHParams& p, BlockAssignment assignment) {
    PartitionedSystem sys;
    sys.name = "hh";

    // Total membrane conductance and the constant drive of the V equation,
    // both per unit capacitance.
    const auto v_coeffs = [p](double n, double m, double h, double& rate, double& drive) {
        const double n4 = n * n * n * n;
        const double m3h = m * m * m * h;
        rate = -(p.g_K * n4 + p.g_Na * m3h + p.g_L) / p.C;
        drive = (p.I + p.g_K * n4 * p.V_K + p.g_Na * m3h * p.V_Na + p.g_L * p.V_L) / p.C;
    };

    if (assignment == BlockAssignment::voltages_as_x) {
        sys.nx = 1;
        sys.ny = 3;
        sys.component_names = {"V", "n", "m", "h"};
        sys.typical_size = {100.0, 1.0, 1.0, 1.0};
        sys.box_lo_x = {-120.0};
        sys.box_hi_x = {20.0};
        sys.box_lo_y = {0.0, 0.0, 0.0};
        sys.box_hi_y = {1.0, 1.0, 1.0};

        sys.eval_f = [p, v_coeffs](const Vec& x, const Vec& y, double, Vec& f) {
            double rate, drive;
            v_coeffs(y[0], y[1], y[2], rate, drive);
            f[0] = rate * x[0] + drive;
        };
        sys.eval_g = [](const Vec& x, const Vec& y, double, Vec& g) {
            using namespace hh_rates;
            const double V = x[0];
            g[0] = alpha_n(V) * (1.0 - y[0]) - beta_n(V) * y[0];
            g[1] = alpha_m(V) * (1.0 - y[1]) - beta_m(V) * y[1];
            g[2] = alpha_h(V) * (1.0 - y[2]) - beta_h(V) * y[2];
        };

        SemilinearData sl;
        XBlockLinear xb;
        xb.a_shape = MatrixShape::diagonal;
        xb.A_of_y = [p](const Vec& y, StructuredMatrix& A) {
            const double n4 = y[0] * y[0] * y[0] * y[0];
            const double m3h = y[1] * y[1] * y[1] * y[2];
            A = StructuredMatrix::diagonal_matrix({-(p.g_K * n4 + p.g_Na * m3h + p.g_L) / p.C});
        };
        xb.b_of_yt = [p](const Vec& y, double, Vec& b) {
            const double n4 = y[0] * y[0] * y[0] * y[0];
            const double m3h = y[1] * y[1] * y[1] * y[2];
            b[0] = (p.I + p.g_K * n4 * p.V_K + p.g_Na * m3h * p.V_Na + p.g_L * p.V_L) / p.C;
        };
        YBlockLinear yb;
        yb.d_shape = MatrixShape::diagonal;
        yb.D_of_x = [](const Vec& x, StructuredMatrix& D) {
            using namespace hh_rates;
            const double V = x[0];
            D = StructuredMatrix::diagonal_matrix({-(alpha_n(V) + beta_n(V)),
                                                   -(alpha_m(V) + beta_m(V)),
                                                   -(alpha_h(V) + beta_h(V))});
        };
        yb.c_of_xt = [](const Vec& x, double, Vec& c) {
            using namespace hh_rates;
            const double V = x[0];
            c[0] = alpha_n(V);
            c[1] = alpha_m(V);
            c[2] = alpha_h(V);
        };
        sl.x_block = std::move(xb);
        sl.y_block = std::move(yb);
        sys.semilinear = std::move(sl);
    } else {
        sys.nx = 3;
        sys.ny = 1;
        sys.component_names = {"n", "m", "h", "V"};
        sys.typical_size = {1.0, 1.0, 1.0, 100.0};
        sys.box_lo_x = {0.0, 0.0, 0.0};
        sys.box_hi_x = {1.0, 1.0, 1.0};
        sys.box_lo_y = {-120.0};
        sys.box_hi_y = {20.0};

        sys.eval_f = [](const Vec& x, const Vec& y, double, Vec& f) {
            using namespace hh_rates;
            const double V = y[0];
            f[0] = alpha_n(V) * (1.0 - x[0]) - beta_n(V) * x[0];
            f[1] = alpha_m(V) * (1.0 - x[1]) - beta_m(V) * x[1];
            f[2] = alpha_h(V) * (1.0 - x[2]) - beta_h(V) * x[2];
        };
        sys.eval_g = [p, v_coeffs](const Vec& x, const Vec& y, double, Vec& g) {
            double rate, drive;
            v_coeffs(x[0], x[1], x[2], rate, drive);
            g[0] = rate * y[0] + drive;
        };

        SemilinearData sl;
        XBlockLinear xb;
        xb.a_shape = MatrixShape::diagonal;
        xb.A_of_y = [](const Vec& y, StructuredMatrix& A) {
            using namespace hh_rates;
            const double V = y[0];
            A = StructuredMatrix::diagonal_matrix({-(alpha_n(V) + beta_n(V)),
                                                   -(alpha_m(V) + beta_m(V)),
                                                   -(alpha_h(V) + beta_h(V))});
        };
        xb.b_of_yt = [](const Vec& y, double, Vec& b) {
            using namespace hh_rates;
            const double V = y[0];
            b[0] = alpha_n(V);
            b[1] = alpha_m(V);
            b[2] = alpha_h(V);
        };
        YBlockLinear yb;
        yb.d_shape = MatrixShape::diagonal;
        yb.D_of_x = [p](const Vec& x, StructuredMatrix& D) {
            const double n4 = x[0] * x[0] * x[0] * x[0];
            const double m3h = x[1] * x[1] * x[1] * x[2];
            D = StructuredMatrix::diagonal_matrix({-(p.g_K * n4 + p.g_Na * m3h + p.g_L) / p.C});
        };
        yb.c_of_xt = [p](const Vec& x, double, Vec& c) {
            const double n4 = x[0] * x[0] * x[0] * x[0];
            const double m3h = x[1] * x[1] * x[1] * x[2];
            c[0] = (p.I + p.g_K * n4 * p.V_K + p.g_Na * m3h * p.V_Na + p.g_L * p.V_L) / p.C;
        };
        sl.x_block = std::move(xb);
        sl.y_block = std::move(yb);
        sys.semilinear = std::move(sl);
    }
    sys.box_t_lo = 0.0;
    sys.box_t_hi = 20.0;
    return sys;
}

PartitionedSystem build_sds(const SDSParams& p, BlockAssignment assignment) {
    PartitionedSystem sys;
    sys.name = "sds";

    // Voltage-block coefficients: coupling conductances are constant, the
    // channel terms depend on the gate and calcium values.
    const auto voltage_rhs = [p](const double V[3], double n, double m, double h, double r,
                                 double s, double cCa, double out[3]) {
        const double n4 = n * n * n * n;
        const double m3h = m * m * m * h;
        const double s2r = s * s * r;
        out[0] = (p.I - p.g_K * n4 * (V[0] - p.V_K) - p.g_Na * m3h * (V[0] - p.V_Na) +
                  (V[1] - V[0]) / p.R_a2 - (V[0] - p.V_L) / p.R_m1) /
                 p.C1;
        out[1] = ((V[0] - V[1]) / p.R_a2 + (V[2] - V[1]) / p.R_a3 - (V[1] - p.V_L) / p.R_m2) /
                 p.C2;
        out[2] = (-p.g_Ca * s2r * (V[2] - p.V_Ca) - p.g_KCa * cCa * (V[2] - p.V_K) +
                  (V[1] - V[2]) / p.R_a3 - (V[2] - p.V_L) / p.R_m3) /
                 p.C3;
    };
    const auto gate_block_rhs = [p](double V1, double V3, const double P[5], double out[5]) {
        using namespace sds_rates;
        out[0] = gate_rhs(alpha_n(V1), beta_n(V1), P[0], p.gate_sign);
        out[1] = gate_rhs(alpha_m(V1), beta_m(V1), P[1], p.gate_sign);
        out[2] = gate_rhs(alpha_h(V1), beta_h(V1), P[2], p.gate_sign);
        out[3] = gate_rhs(alpha_r(V3), beta_r(V3), P[3], p.gate_sign);
        out[4] = gate_rhs(alpha_s(V3), beta_s(V3), P[4], p.gate_sign);
    };
    const auto calcium_rhs = [p](double V3, double r, double s, double cCa) {
        return p.g_Ca * s * s * r * p.B * (p.V_Ca - V3) - cCa / p.tau;
    };

    if (assignment == BlockAssignment::voltages_as_x) {
        sys.nx = 3;
        sys.ny = 6;
        sys.component_names = {"V1", "V2", "V3", "n", "m", "h", "r", "s", "cCa"};
        sys.typical_size = {0.1, 0.1, 0.1, 1.0, 1.0, 1.0, 1.0, 1.0, 1e-4};
        sys.box_lo_x = {-0.1, -0.1, -0.1};
        sys.box_hi_x = {0.08, 0.08, 0.08};
        sys.box_lo_y = {0.0, 0.0, 0.0, 0.0, 0.0, 0.0};
        sys.box_hi_y = {1.0, 1.0, 1.0, 1.0, 1.0, 1e-2};

        sys.eval_f = [voltage_rhs](const Vec& x, const Vec& y, double, Vec& f) {
            double out[3];
            voltage_rhs(x.data(), y[0], y[1], y[2], y[3], y[4], y[5], out);
            f.assign(out, out + 3);
        };
        sys.eval_g = [gate_block_rhs, calcium_rhs](const Vec& x, const Vec& y, double, Vec& g) {
            double out[5];
            gate_block_rhs(x[0], x[2], y.data(), out);
            g.assign(out, out + 5);
            g.push_back(calcium_rhs(x[2], y[3], y[4], y[5]));
        };

        SemilinearData sl;
        XBlockLinear xb;
        xb.a_shape = MatrixShape::tridiagonal;
        xb.A_of_y = [p](const Vec& y, StructuredMatrix& A) {
            const double n4 = y[0] * y[0] * y[0] * y[0];
            const double m3h = y[1] * y[1] * y[1] * y[2];
            const double s2r = y[4] * y[4] * y[3];
            Vec diag = {-(p.g_K * n4 + p.g_Na * m3h + 1.0 / p.R_a2 + 1.0 / p.R_m1) / p.C1,
                        -(1.0 / p.R_a2 + 1.0 / p.R_a3 + 1.0 / p.R_m2) / p.C2,
                        -(p.g_Ca * s2r + p.g_KCa * y[5] + 1.0 / p.R_a3 + 1.0 / p.R_m3) / p.C3};
            Vec lower = {1.0 / (p.R_a2 * p.C2), 1.0 / (p.R_a3 * p.C3)};
            Vec upper = {1.0 / (p.R_a2 * p.C1), 1.0 / (p.R_a3 * p.C2)};
            A = StructuredMatrix::tridiagonal_matrix(std::move(lower), std::move(diag),
                                                     std::move(upper));
        };
        xb.b_of_yt = [p](const Vec& y, double, Vec& b) {
            const double n4 = y[0] * y[0] * y[0] * y[0];
            const double m3h = y[1] * y[1] * y[1] * y[2];
            const double s2r = y[4] * y[4] * y[3];
            b[0] = (p.I + p.g_K * n4 * p.V_K + p.g_Na * m3h * p.V_Na + p.V_L / p.R_m1) / p.C1;
            b[1] = p.V_L / (p.R_m2 * p.C2);
            b[2] = (p.g_Ca * s2r * p.V_Ca + p.g_KCa * y[5] * p.V_K + p.V_L / p.R_m3) / p.C3;
        };
        sl.x_block = std::move(xb);
        sys.semilinear = std::move(sl);
    } else {
        sys.nx = 5;
        sys.ny = 4;
        sys.component_names = {"n", "m", "h", "r", "s", "V1", "V2", "V3", "cCa"};
        sys.typical_size = {1.0, 1.0, 1.0, 1.0, 1.0, 0.1, 0.1, 0.1, 1e-4};
        sys.box_lo_x = {0.0, 0.0, 0.0, 0.0, 0.0};
        sys.box_hi_x = {1.0, 1.0, 1.0, 1.0, 1.0};
        sys.box_lo_y = {-0.1, -0.1, -0.1, 0.0};
        sys.box_hi_y = {0.08, 0.08, 0.08, 1e-2};

        sys.eval_f = [gate_block_rhs](const Vec& x, const Vec& y, double, Vec& f) {
            double out[5];
            gate_block_rhs(y[0], y[2], x.data(), out);
            f.assign(out, out + 5);
        };
        sys.eval_g = [voltage_rhs, calcium_rhs](const Vec& x, const Vec& y, double, Vec& g) {
            double out[3];
            voltage_rhs(y.data(), x[0], x[1], x[2], x[3], x[4], y[3], out);
            g.assign(out, out + 3);
            g.push_back(calcium_rhs(y[2], x[3], x[4], y[3]));
        };

        SemilinearData sl;
        XBlockLinear xb;
        xb.a_shape = MatrixShape::diagonal;
        xb.A_of_y = [p](const Vec& y, StructuredMatrix& A) {
            using namespace sds_rates;
            const double V1 = y[0], V3 = y[2];
            A = StructuredMatrix::diagonal_matrix(
                {gate_linear_rate(alpha_n(V1), beta_n(V1), p.gate_sign),
                 gate_linear_rate(alpha_m(V1), beta_m(V1), p.gate_sign),
                 gate_linear_rate(alpha_h(V1), beta_h(V1), p.gate_sign),
                 gate_linear_rate(alpha_r(V3), beta_r(V3), p.gate_sign),
                 gate_linear_rate(alpha_s(V3), beta_s(V3), p.gate_sign)});
        };
        xb.b_of_yt = [](const Vec& y, double, Vec& b) {
            using namespace sds_rates;
            const double V1 = y[0], V3 = y[2];
            b[0] = alpha_n(V1);
            b[1] = alpha_m(V1);
            b[2] = alpha_h(V1);
            b[3] = alpha_r(V3);
            b[4] = alpha_s(V3);
        };
        sl.x_block = std::move(xb);
        sys.semilinear = std::move(sl);
    }
    sys.box_t_lo = 0.0;
    sys.box_t_hi = 0.1;
    return sys;
}

PartitionedSystem build_test_system(const TestSystemParams& p) {
    PartitionedSystem sys;
    sys.name = "linear-test";
    sys.nx = 1;
    sys.ny = 1;
    sys.component_names = {"x", "y"};
    sys.typical_size = {1.0, 1.0};
    sys.box_lo_x = {-1.0};
    sys.box_hi_x = {1.0};
    sys.box_lo_y = {-1.0};
    sys.box_hi_y = {1.0};
    sys.box_t_hi = 1.0;

    // Both evaluation paths are routed through the same expressions, so the
    // consistency check is exact for this system.
    sys.eval_f = [p](const Vec& x, const Vec& y, double, Vec& f) {
        f[0] = p.mu * x[0] + p.a * y[0];
    };
    sys.eval_g = [p](const Vec& x, const Vec& y, double, Vec& g) {
        g[0] = p.b * x[0] + p.lambda * y[0];
    };

    SemilinearData sl;
    XBlockLinear xb;
    xb.a_shape = MatrixShape::diagonal;
    xb.A_of_y = [p](const Vec&, StructuredMatrix& A) {
        A = StructuredMatrix::diagonal_matrix({p.mu});
    };
    xb.b_of_yt = [p](const Vec& y, double, Vec& b) { b[0] = p.a * y[0]; };
    YBlockLinear yb;
    yb.d_shape = MatrixShape::diagonal;
    yb.D_of_x = [p](const Vec&, StructuredMatrix& D) {
        D = StructuredMatrix::diagonal_matrix({p.lambda});
    };
    yb.c_of_xt = [p](const Vec& x, double, Vec& c) { c[0] = p.b * x[0]; };
    sl.x_block = std::move(xb);
    sl.y_block = std::move(yb);
    sys.semilinear = std::move(sl);
    return sys;
}

ModelSpec benchmark_model_spec(ModelKind kind) {
    ModelSpec spec;
    spec.kind = kind;
    if (kind == ModelKind::hh) {
        spec.initial = {-4.5, 0.5, 0.085, 0.38};
        spec.t0 = 0.0;
        spec.t_end = 20.0;
    } else {
        spec.initial = {0.07, 0.06, 0.06, 0.8, 1.0, 0.3, 1.0, 0.11, 1.6e-4};
        spec.t0 = 0.0;
        spec.t_end = 0.1;
    }
    return spec;
}

ModelSetup instantiate(const ModelSpec& spec, BlockAssignment assignment) {
    ModelSetup setup;
    setup.kind = spec.kind;
    setup.assignment = assignment;
    setup.t_end = spec.t_end;
    setup.initial.t = spec.t0;

    if (spec.kind == ModelKind::hh) {
        setup.system = build_hh(spec.hh, assignment);
        const Vec& z = spec.initial;  // V, n, m, h
        if (assignment == BlockAssignment::voltages_as_x) {
            setup.initial.x = {z[0]};
            setup.initial.y = {z[1], z[2], z[3]};
        } else {
            setup.initial.x = {z[1], z[2], z[3]};
            setup.initial.y = {z[0]};
        }
    } else {
        setup.system = build_sds(spec.sds, assignment);
        const Vec& z = spec.initial;  // V1, V2, V3, n, m, h, r, s, cCa
        if (assignment == BlockAssignment::voltages_as_x) {
            setup.initial.x = {z[0], z[1], z[2]};
            setup.initial.y = {z[3], z[4], z[5], z[6], z[7], z[8]};
        } else {
            setup.initial.x = {z[3], z[4], z[5], z[6], z[7]};
            setup.initial.y = {z[0], z[1], z[2], z[8]};
        }
    }
    return setup;
}

SplitState benchmark_initial_conditions(ModelKind kind, BlockAssignment assignment) {
    return instantiate(benchmark_model_spec(kind), assignment).initial;
}

namespace {

std::string format_value(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& key, const std::string& value) {
    char* end = nullptr;
    const double v = std::strtod(value.c_str(), &end);
    if (end == value.c_str() || *end != '\0')
        throw ConfigError("invalid numeric value '" + value + "' for key '" + key + "'");
    return v;
}

struct KeyTable {
    std::vector<std::pair<std::string, double*>> numeric;
    GateSign* gate_sign = nullptr;
};

KeyTable key_table(ModelSpec& spec) {
    KeyTable table;
    spec.initial.resize(spec.kind == ModelKind::hh ? 4 : 9, 0.0);
    if (spec.kind == ModelKind::hh) {
        HHParams& p = spec.hh;
        table.numeric = {{"C", &p.C},       {"I", &p.I},       {"g_K", &p.g_K},
                         {"g_Na", &p.g_Na}, {"g_L", &p.g_L},   {"V_K", &p.V_K},
                         {"V_Na", &p.V_Na}, {"V_L", &p.V_L},   {"V0", &spec.initial[0]},
                         {"n0", &spec.initial[1]},             {"m0", &spec.initial[2]},
                         {"h0", &spec.initial[3]},             {"t0", &spec.t0},
                         {"t_end", &spec.t_end}};
    } else {
        SDSParams& p = spec.sds;
        table.numeric = {{"C1", &p.C1},
                         {"C2", &p.C2},
                         {"C3", &p.C3},
                         {"R_m1", &p.R_m1},
                         {"R_m2", &p.R_m2},
                         {"R_m3", &p.R_m3},
                         {"R_a2", &p.R_a2},
                         {"R_a3", &p.R_a3},
                         {"V_Na", &p.V_Na},
                         {"V_K", &p.V_K},
                         {"V_Ca", &p.V_Ca},
                         {"V_L", &p.V_L},
                         {"g_Na", &p.g_Na},
                         {"g_K", &p.g_K},
                         {"g_Ca", &p.g_Ca},
                         {"g_KCa", &p.g_KCa},
                         {"I", &p.I},
                         {"tau", &p.tau},
                         {"B", &p.B},
                         {"V1_0", &spec.initial[0]},
                         {"V2_0", &spec.initial[1]},
                         {"V3_0", &spec.initial[2]},
                         {"n0", &spec.initial[3]},
                         {"m0", &spec.initial[4]},
                         {"h0", &spec.initial[5]},
                         {"r0", &spec.initial[6]},
                         {"s0", &spec.initial[7]},
                         {"cCa_0", &spec.initial[8]},
                         {"t0", &spec.t0},
                         {"t_end", &spec.t_end}};
        table.gate_sign = &p.gate_sign;
    }
    return table;
}

}  // namespace

ModelSpec load_model_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open model config '" + path + "'");

    // First pass: find the model key, then bind the remaining keys to it.
    std::vector<std::pair<std::string, std::string>> pairs;
    std::string line;
    int lineno = 0;
    std::string model_value;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected 'name = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ConfigError("line " + std::to_string(lineno) + ": expected 'name = value'");
        if (key == "model") {
            model_value = value;
        } else {
            pairs.emplace_back(key, value);
        }
    }
    if (model_value.empty()) throw ConfigError("missing 'model' key");
    const auto kind = model_from_name(model_value);
    if (!kind) throw ConfigError("unknown model '" + model_value + "' (expected hh or sds)");

    ModelSpec spec = benchmark_model_spec(*kind);
    KeyTable table = key_table(spec);
    for (const auto& [key, value] : pairs) {
        if (table.gate_sign && key == "gate_sign") {
            if (value == "standard")
                *table.gate_sign = GateSign::standard;
            else if (value == "verbatim")
                *table.gate_sign = GateSign::verbatim;
            else
                throw ConfigError("invalid gate_sign '" + value +
                                  "' (expected standard or verbatim)");
            continue;
        }
        bool found = false;
        for (auto& [name, target] : table.numeric) {
            if (name == key) {
                *target = parse_double(key, value);
                found = true;
                break;
            }
        }
        if (!found) throw ConfigError("unknown key '" + key + "'");
    }
    return spec;
}

void write_model_config(const std::string& path, const ModelSpec& spec) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open '" + path + "' for writing");
    out << "model = " << model_name(spec.kind) << "\n";
    ModelSpec copy = spec;
    KeyTable table = key_table(copy);
    for (const auto& [name, target] : table.numeric)
        out << name << " = " << format_value(*target) << "\n";
    if (table.gate_sign)
        out << "gate_sign = "
            << (*table.gate_sign == GateSign::standard ? "standard" : "verbatim") << "\n";
}

}  // namespace parthines
