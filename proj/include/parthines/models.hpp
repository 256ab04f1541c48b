#pragma once

#include "parthines/core.hpp"
#include "parthines/stability.hpp"

namespace parthines {

enum class ModelKind { hh, sds };
enum class BlockAssignment { voltages_as_x, gates_as_x };
enum class GateSign { standard, verbatim };

[[nodiscard]] const char* model_name(ModelKind kind);
[[nodiscard]] const char* assignment_name(BlockAssignment assignment);
[[nodiscard]] std::optional<ModelKind> model_from_name(const std::string& name);
[[nodiscard]] std::optional<BlockAssignment> assignment_from_name(const std::string& name);

/// Cancellation-free evaluation of psi(x) = x/(e^x - 1); series expansion
/// 1 - x/2 + x^2/12 for |x| < 1e-5.
double psi(double x);

/// Single-compartment squid axon model (1952 sign convention).
struct HHParams {
    double C = 1.0;
    double I = 14.2;
    double g_K = 36.0;
    double g_Na = 120.0;
    double g_L = 0.3;
    double V_K = 12.0;
    double V_Na = -115.0;
    double V_L = -10.599;
};

namespace hh_rates {
double alpha_n(double V);
double beta_n(double V);
double alpha_m(double V);
double beta_m(double V);
double alpha_h(double V);
double beta_h(double V);
}  // namespace hh_rates

/// Three-compartment soma-dendrite-spine model with calcium dynamics
/// (SI units). `gate_sign` selects the sign of the closing-rate term in the
/// gate equations: `standard` uses alpha*(1-P) - beta*P, `verbatim` keeps
/// the printed + sign, which makes the gates non-contractive.
struct SDSParams {
    double C1 = 3.6e-11;
    double C2 = 2e-11;
    double C3 = 9.6e-15;
    double R_m1 = 8.333e8;
    double R_m2 = 1.5e9;
    double R_m3 = 3.125e12;
    double R_a2 = 5e8;
    double R_a3 = 3e7;
    double V_Na = 0.045;
    double V_K = -0.085;
    double V_Ca = 0.07;
    double V_L = -0.0594;
    double g_Na = 5.4e-7;
    double g_K = 5.4e-8;
    double g_Ca = 9.6e-13;
    double g_KCa = 7.68e-12;
    double I = 0.09e-9;
    double tau = 0.1;
    double B = 4.51389e12;
    GateSign gate_sign = GateSign::standard;
};

namespace sds_rates {
double alpha_n(double V1);
double beta_n(double V1);
double alpha_m(double V1);
double beta_m(double V1);
double alpha_h(double V1);
double beta_h(double V1);
double alpha_r(double V3);
double beta_r(double V3);
double alpha_s(double V3);
double beta_s(double V3);
}  // namespace sds_rates

/// hh: x=(V), y=(n,m,h) or x=(n,m,h), y=(V). Both blocks are declared
/// semilinear (diagonal structures).
PartitionedSystem build_hh(const HHParams& p, BlockAssignment assignment);

/// sds: x=(V1,V2,V3), y=(n,m,h,r,s,cCa) or x=(n,m,h,r,s), y=(V1,V2,V3,cCa).
/// Only the x block is declared semilinear (tridiagonal respectively
/// diagonal); the calcium source s^2*r*B*(V_Ca - V3) couples the other block
/// nonlinearly, so its stages are solved by Newton.
PartitionedSystem build_sds(const SDSParams& p, BlockAssignment assignment);

/// The coupled linear test system as a 1+1 partitioned system with both
/// blocks declared; both evaluation paths share the same algebra.
PartitionedSystem build_test_system(const TestSystemParams& p);

/// Model parameters, initial values (natural component order: hh V,n,m,h;
/// sds V1,V2,V3,n,m,h,r,s,cCa) and time interval.
struct ModelSpec {
    ModelKind kind = ModelKind::hh;
    HHParams hh;
    SDSParams sds;
    Vec initial;
    double t0 = 0.0;
    double t_end = 0.0;
};

/// The benchmark setups: hh on [0,20] from (V,n,m,h) = (-4.5, 0.5, 0.085,
/// 0.38); sds on [0,0.1] from (0.07, 0.06, 0.06, 0.8, 1, 0.3, 1, 0.11,
/// 1.6e-4).
ModelSpec benchmark_model_spec(ModelKind kind);

struct ModelSetup {
    PartitionedSystem system;
    SplitState initial;
    double t_end = 0.0;
    ModelKind kind = ModelKind::hh;
    BlockAssignment assignment = BlockAssignment::voltages_as_x;
};

/// Builds the system and reorders the initial values for the assignment.
ModelSetup instantiate(const ModelSpec& spec, BlockAssignment assignment);

/// Initial state in the given block assignment.
SplitState benchmark_initial_conditions(ModelKind kind, BlockAssignment assignment);

/// Plain-text `name = value` configuration, one pair per line; `#` starts a
/// comment. Unknown keys are rejected. Values are written with 17
/// significant digits so a round trip preserves every bit.
ModelSpec load_model_config(const std::string& path);
void write_model_config(const std::string& path, const ModelSpec& spec);

}  // namespace parthines
