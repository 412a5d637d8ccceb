//------------------------------------------------------------------------------
// test_perfmodel.cpp
//
// SPDX-License-Identifier: Apache-2.0
//------------------------------------------------------------------------------
#include "doctest.h"
#include "hft/perfmodel.hpp"

#include <cmath>

using namespace hft::perf;

namespace {
const HardwareMetrics& machine(const char* name) {
    const HardwareMetrics* m = find_machine(name);
    REQUIRE(m != nullptr);
    return *m;
}
} // namespace

TEST_CASE("arithmetic intensity") {
    // 8 FLOP per point update, 8 bytes per value, 8 values moved
    CHECK(arithmetic_intensity(8, 8, 8) == 0.125);
    CHECK(arithmetic_intensity(16, 8, 8) == 0.25);
}

TEST_CASE("compute-bound thresholds from the machine table") {
    Calc k20x = compute_bound_threshold(machine("tsubame2.5"));
    REQUIRE(k20x.ok());
    // 1030 / 169.4; published summaries round this to 5.9, which does not
    // follow from the shipped constants, so only the computed value is
    // asserted here.
    CHECK(k20x.value == doctest::Approx(6.080283353010626).epsilon(1e-12));

    Calc p100 = compute_bound_threshold(machine("reedbush-h"));
    REQUIRE(p100.ok());
    CHECK(p100.value == doctest::Approx(7.809371245494594).epsilon(1e-12));

    Calc none = compute_bound_threshold(machine("tsubame3.0"));
    CHECK_FALSE(none.ok());
    CHECK(none.error.find("P_D") != std::string::npos);
}

TEST_CASE("profitability thresholds (speedup rhs)") {
    Calc t25 = speedup_rhs(machine("tsubame2.5"));
    REQUIRE(t25.ok());
    CHECK(t25.value == doctest::Approx(5.398695370992215).epsilon(1e-12));

    Calc rbh = speedup_rhs(machine("reedbush-h"));
    REQUIRE(rbh.ok());
    CHECK(rbh.value == doctest::Approx(8.280750722845367).epsilon(1e-12));

    Calc daint = speedup_rhs(machine("piz-daint"));
    REQUIRE(daint.ok());
    CHECK(daint.value == doctest::Approx(5.205184077754652).epsilon(1e-12));

    Calc t20 = speedup_rhs(machine("tsubame2.0"));
    CHECK_FALSE(t20.ok());
    CHECK(t20.error.find("BW_H") != std::string::npos);
    CHECK(t20.error.find("tsubame2.5") != std::string::npos);
}

TEST_CASE("achievable speedup lhs and feasibility verdict") {
    CHECK(speedup_lhs(10, 4, 8) == 5.0);
    CHECK(std::isinf(speedup_lhs(10, 4, 0)));

    Feasibility f;
    Calc c = feasibility(machine("tsubame2.5"), 10, 4, 8, f);
    REQUIRE(c.ok());
    CHECK(f.lhs == 5.0);
    CHECK_FALSE(f.feasible); // 5 < 5.3987: porting only these kernels cannot pay off

    Calc c2 = feasibility(machine("tsubame2.5"), 10, 4, 0.5, f);
    REQUIRE(c2.ok());
    CHECK(f.feasible); // 80x bound clears the threshold
}

TEST_CASE("host time model reproduces the frozen reference rows") {
    const HardwareMetrics& hw = machine("tsubame2.5");
    struct Row {
        long n;
        double m_sa;
        HostCores cores;
        double expect;
    };
    const Row rows[] = {
        {128, 4.0, HostCores::Single, 0.739398},  {128, 10.0, HostCores::Single, 1.766574},
        {128, 4.0, HostCores::Socket, 0.381974},  {128, 10.0, HostCores::Socket, 0.873014},
        {256, 4.0, HostCores::Single, 5.696728},  {256, 10.0, HostCores::Single, 13.91414},
        {256, 4.0, HostCores::Socket, 2.837336},  {256, 10.0, HostCores::Socket, 6.76566},
    };
    for (const Row& r : rows) {
        ModelParams p;
        p.nx = p.ny = p.nz = r.n;
        p.steps = 100;
        p.m_sa = r.m_sa;
        Calc c = cpu_model_time(hw, p, r.cores);
        REQUIRE(c.ok());
        CHECK(c.value == doctest::Approx(r.expect).epsilon(1e-5));
    }
}

TEST_CASE("host time model reports missing single-core data") {
    ModelParams p;
    p.nx = p.ny = p.nz = 128;
    p.steps = 100;
    Calc c = cpu_model_time(machine("reedbush-h"), p, HostCores::Single);
    CHECK_FALSE(c.ok());
    CHECK(c.error.find("BW_H1C") != std::string::npos);
    CHECK(c.error.find("tsubame2.5") != std::string::npos);
}

TEST_CASE("device time model") {
    const HardwareMetrics& hw = machine("tsubame2.5");
    ModelParams p;
    p.nx = p.ny = p.nz = 128;
    p.steps = 100;
    p.m_sa = 4.0;
    p.m_htod = 0.0;

    Calc spot = gpu_model_time(hw, p);
    REQUIRE(spot.ok());
    CHECK(spot.value == doctest::Approx(0.04706289492325856).epsilon(1e-12));

    SUBCASE("zero steps costs zero time") {
        p.steps = 0;
        CHECK(gpu_model_time(hw, p).value == 0.0);
    }
    SUBCASE("linear in step count") {
        p.steps = 1;
        double t1 = gpu_model_time(hw, p).value;
        p.steps = 17;
        CHECK(gpu_model_time(hw, p).value == doctest::Approx(17.0 * t1).epsilon(1e-12));
    }
    SUBCASE("monotonically decreasing in device bandwidth") {
        HardwareMetrics faster = hw;
        faster.bw_d = *hw.bw_d * 2.0;
        CHECK(gpu_model_time(faster, p).value < spot.value);
    }
    SUBCASE("interconnect traffic adds time") {
        p.m_htod = 8.0;
        CHECK(gpu_model_time(hw, p).value > spot.value);
    }
}

TEST_CASE("machine lookup") {
    CHECK(find_machine("no-such-machine") == nullptr);
    CHECK(machine_names().find("tsubame2.5") != std::string::npos);
    CHECK(machine_names().find("piz-daint") != std::string::npos);
}

TEST_CASE("four significant digit formatting") {
    CHECK(format_sig4(5.398695) == "5.399");
    CHECK(format_sig4(0.739398) == "0.7394");
    CHECK(format_sig4(13.91414) == "13.91");
}
