#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "parthines/models.hpp"
#include "support.hpp"

using namespace parthines;

namespace {

std::pair<Vec, Vec> rhs_at(const PartitionedSystem& sys, const SplitState& s) {
    Vec f, g;
    eval_raw(sys, s.x, s.y, s.t, f, g);
    return {f, g};
}

}  // namespace

TEST_CASE("psi: values, limit and series branch") {
    CHECK(psi(1.0) == doctest::Approx(0.5819767068693265).epsilon(1e-15));
    CHECK(psi(2.5) == doctest::Approx(0.22356372458463003).epsilon(1e-15));
    CHECK(psi(-4.0) == doctest::Approx(4.074629441455096).epsilon(1e-15));
    CHECK(psi(0.0) == 1.0);
    // Series branch joins the direct formula smoothly around the cutoff.
    for (double x : {1e-6, -1e-6, 9e-6, 2e-5}) {
        const double direct = x / std::expm1(x);
        CHECK(psi(x) == doctest::Approx(direct).epsilon(1e-13));
    }
}

TEST_CASE("squid-axon rate functions at frozen sample points") {
    using namespace hh_rates;
    CHECK(alpha_n(0.0) == doctest::Approx(0.05819767068693265).epsilon(1e-14));
    CHECK(beta_n(0.0) == doctest::Approx(0.125).epsilon(1e-15));
    CHECK(alpha_m(0.0) == doctest::Approx(0.22356372458463003).epsilon(1e-14));
    CHECK(beta_m(0.0) == doctest::Approx(4.0).epsilon(1e-15));
    CHECK(alpha_h(0.0) == doctest::Approx(0.07).epsilon(1e-15));
    CHECK(beta_h(0.0) == doctest::Approx(0.04742587317756678).epsilon(1e-14));

    CHECK(alpha_n(-50.0) == doctest::Approx(0.40746294414550965).epsilon(1e-14));
    CHECK(beta_n(-50.0) == doctest::Approx(0.06690767856487378).epsilon(1e-14));
    CHECK(alpha_m(-50.0) == doctest::Approx(2.72356372458463).epsilon(1e-14));
    CHECK(beta_m(-50.0) == doctest::Approx(0.24870609608846528).epsilon(1e-14));
    CHECK(alpha_h(-50.0) == doctest::Approx(0.005745949903672916).epsilon(1e-14));
    CHECK(beta_h(-50.0) == doctest::Approx(0.8807970779778823).epsilon(1e-14));
}

TEST_CASE("squid-axon right-hand side at the benchmark initial state") {
    const auto setup = instantiate(benchmark_model_spec(ModelKind::hh),
                                   BlockAssignment::voltages_as_x);
    const auto [f, g] = rhs_at(setup.system, setup.initial);
    REQUIRE(f.size() == 1);
    REQUIRE(g.size() == 3);
    CHECK(f[0] == doctest::Approx(46.40084695).epsilon(1e-12));          // V'
    CHECK(g[0] == doctest::Approx(-0.021577316300025018).epsilon(1e-12));  // n'
    CHECK(g[1] == doctest::Approx(0.01236160620992438).epsilon(1e-12));    // m'
    CHECK(g[2] == doctest::Approx(0.00713353945678024).epsilon(1e-12));    // h'
}

TEST_CASE("soma-dendrite-spine rate functions at frozen sample points") {
    using namespace sds_rates;
    CHECK(alpha_h(-0.06) == doctest::Approx(42.457146179884326).epsilon(1e-13));
    CHECK(beta_h(-0.06) == doctest::Approx(119.20292202211758).epsilon(1e-13));
    CHECK(alpha_m(-0.06) == doctest::Approx(430.82537518330236).epsilon(1e-13));
    CHECK(beta_m(-0.06) == doctest::Approx(2295.01368294973).epsilon(1e-13));
    CHECK(alpha_n(-0.06) == doctest::Approx(100.0).epsilon(1e-13));
    CHECK(beta_n(-0.06) == doctest::Approx(110.31211282307441).epsilon(1e-13));

    // Opening rate of r switches branches at V3 = -0.07 and stays continuous.
    CHECK(alpha_r(-0.08) == 5.0);
    CHECK(alpha_r(-0.07) == 5.0);
    CHECK(alpha_r(-0.05) == doctest::Approx(1.8393972058572112).epsilon(1e-13));
    CHECK(beta_r(-0.05) == doctest::Approx(3.1606027941427888).epsilon(1e-13));
    CHECK(alpha_s(-0.05) == doctest::Approx(60.30062481376947).epsilon(1e-13));
    CHECK(beta_s(-0.05) == doctest::Approx(623.2397767450997).epsilon(1e-13));
}

TEST_CASE("soma-dendrite-spine right-hand side at the benchmark initial state") {
    const auto setup = instantiate(benchmark_model_spec(ModelKind::sds),
                                   BlockAssignment::voltages_as_x);
    const auto [f, g] = rhs_at(setup.system, setup.initial);
    REQUIRE(f.size() == 3);
    REQUIRE(g.size() == 6);
    CHECK(f[0] == doctest::Approx(-210.10106142912392).epsilon(1e-12));  // V1'
    CHECK(f[1] == doctest::Approx(-2.979999999999999).epsilon(1e-12));   // V2'
    CHECK(f[2] == doctest::Approx(-3.98646).epsilon(1e-12));             // V3'
    CHECK(g[0] == doctest::Approx(242.62319334192964).epsilon(1e-12));   // n'
    CHECK(g[3] == doctest::Approx(-4.992482804035112).epsilon(1e-12));   // r'
    CHECK(g[4] == doctest::Approx(1410.9081392162955).epsilon(1e-12));   // s'
    CHECK(g[5] == doctest::Approx(-0.0010756665375999995).epsilon(1e-12));  // cCa'
}

TEST_CASE("the printed gate sign variant flips the closing-rate term") {
    SDSParams p;
    p.gate_sign = GateSign::verbatim;
    auto sys = build_sds(p, BlockAssignment::voltages_as_x);
    const auto spec = benchmark_model_spec(ModelKind::sds);
    SplitState s;
    s.t = 0.0;
    s.x = {spec.initial[0], spec.initial[1], spec.initial[2]};
    s.y = {spec.initial[3], spec.initial[4], spec.initial[5],
           spec.initial[6], spec.initial[7], spec.initial[8]};
    const auto [f, g] = rhs_at(sys, s);
    CHECK(g[0] == doctest::Approx(277.3779820320186).epsilon(1e-12));  // n' with +beta*n
}

TEST_CASE("benchmark specifications expose the documented setups") {
    const auto hh = benchmark_model_spec(ModelKind::hh);
    CHECK(hh.t0 == 0.0);
    CHECK(hh.t_end == 20.0);
    REQUIRE(hh.initial.size() == 4);
    CHECK(hh.initial[0] == -4.5);
    CHECK(hh.initial[1] == 0.5);
    CHECK(hh.initial[2] == 0.085);
    CHECK(hh.initial[3] == 0.38);

    const auto sds = benchmark_model_spec(ModelKind::sds);
    CHECK(sds.t_end == 0.1);
    REQUIRE(sds.initial.size() == 9);
    CHECK(sds.initial[0] == 0.07);
    CHECK(sds.initial[8] == 1.6e-4);
}

TEST_CASE("block assignments agree on the physical derivatives") {
    for (auto kind : {ModelKind::hh, ModelKind::sds}) {
        const auto volts = instantiate(benchmark_model_spec(kind), BlockAssignment::voltages_as_x);
        const auto gates = instantiate(benchmark_model_spec(kind), BlockAssignment::gates_as_x);
        const auto [fv, gv] = rhs_at(volts.system, volts.initial);
        const auto [fg, gg] = rhs_at(gates.system, gates.initial);

        // Either split carries the same concatenated derivative values,
        // permuted according to the component names.
        const auto& names_v = volts.system.component_names;
        const auto& names_g = gates.system.component_names;
        REQUIRE(names_v.size() == names_g.size());
        Vec all_v(fv), all_g(fg);
        all_v.insert(all_v.end(), gv.begin(), gv.end());
        all_g.insert(all_g.end(), gg.begin(), gg.end());
        for (size_t i = 0; i < names_v.size(); ++i) {
            bool found = false;
            for (size_t j = 0; j < names_g.size(); ++j) {
                if (names_g[j] != names_v[i]) continue;
                found = true;
                CHECK(all_g[j] == doctest::Approx(all_v[i]).epsilon(1e-14));
            }
            CHECK(found);
        }
    }
}

TEST_CASE("initial conditions follow the assignment permutation") {
    const auto s = benchmark_initial_conditions(ModelKind::hh, BlockAssignment::gates_as_x);
    REQUIRE(s.x.size() == 3);
    REQUIRE(s.y.size() == 1);
    CHECK(s.x[0] == 0.5);    // n
    CHECK(s.x[1] == 0.085);  // m
    CHECK(s.x[2] == 0.38);   // h
    CHECK(s.y[0] == -4.5);   // V
}

TEST_CASE("configuration round trip preserves every bit") {
    namespace fs = std::filesystem;
    const auto dir = fs::temp_directory_path() / "parthines_models_test";
    fs::create_directories(dir);

    ModelSpec spec = benchmark_model_spec(ModelKind::sds);
    spec.sds.g_Ca = 9.6000000000000013e-13;
    spec.sds.B = 4.5138899999999997e12;
    spec.initial[4] = 0.12345678901234567;
    spec.t_end = 0.07;
    const auto path = (dir / "sds_roundtrip.cfg").string();
    write_model_config(path, spec);
    const auto back = load_model_config(path);

    CHECK(back.kind == ModelKind::sds);
    CHECK(back.sds.g_Ca == spec.sds.g_Ca);
    CHECK(back.sds.B == spec.sds.B);
    CHECK(back.sds.R_m1 == spec.sds.R_m1);
    CHECK(back.initial[4] == spec.initial[4]);
    CHECK(back.t_end == spec.t_end);
    CHECK(back.sds.gate_sign == spec.sds.gate_sign);

    ModelSpec hh = benchmark_model_spec(ModelKind::hh);
    hh.hh.I = 11.0;
    const auto hh_path = (dir / "hh_roundtrip.cfg").string();
    write_model_config(hh_path, hh);
    const auto hh_back = load_model_config(hh_path);
    CHECK(hh_back.kind == ModelKind::hh);
    CHECK(hh_back.hh.I == 11.0);
    CHECK(hh_back.hh.V_L == hh.hh.V_L);
}

TEST_CASE("configuration parser: comments, unknown keys and malformed input") {
    namespace fs = std::filesystem;
    const auto dir = fs::temp_directory_path() / "parthines_models_test";
    fs::create_directories(dir);
    const auto path = (dir / "parse.cfg").string();

    auto write_file = [&](const char* text) {
        std::FILE* fp = std::fopen(path.c_str(), "w");
        REQUIRE(fp != nullptr);
        std::fputs(text, fp);
        std::fclose(fp);
    };

    write_file("# comment line\nmodel = hh\nI = 10.5   # trailing comment\n\n");
    const auto spec = load_model_config(path);
    CHECK(spec.kind == ModelKind::hh);
    CHECK(spec.hh.I == 10.5);
    CHECK(spec.hh.C == 1.0);  // unset keys keep benchmark values

    write_file("model = hh\nfoo = 1\n");
    CHECK_THROWS_AS(load_model_config(path), ConfigError);

    write_file("model = hh\nI = not_a_number\n");
    CHECK_THROWS_AS(load_model_config(path), ConfigError);

    write_file("I = 10.5\n");  // no model key
    CHECK_THROWS_AS(load_model_config(path), ConfigError);

    write_file("model = sds\ngate_sign = verbatim\n");
    const auto sds = load_model_config(path);
    CHECK(sds.sds.gate_sign == GateSign::verbatim);

    write_file("model = sds\ngate_sign = sideways\n");
    CHECK_THROWS_AS(load_model_config(path), ConfigError);

    CHECK_THROWS_AS(load_model_config((dir / "missing.cfg").string()), ConfigError);
}

TEST_CASE("model and assignment names round-trip") {
    CHECK(model_from_name("hh") == ModelKind::hh);
    CHECK(model_from_name("sds") == ModelKind::sds);
    CHECK(!model_from_name("squid").has_value());
    CHECK(assignment_from_name("voltages") == BlockAssignment::voltages_as_x);
    CHECK(assignment_from_name("gates") == BlockAssignment::gates_as_x);
    CHECK(!assignment_from_name("mixed").has_value());
    CHECK(std::string(model_name(ModelKind::hh)) == "hh");
    CHECK(std::string(assignment_name(BlockAssignment::gates_as_x)) == "gates");
}
