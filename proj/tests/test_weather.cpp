//------------------------------------------------------------------------------
// test_weather.cpp
// Native reference simulator: configuration validation, conservation/fixed
// point properties, a test-local brute-force oracle, comparison helpers and
// the dump file format
//
// SPDX-License-Identifier: Apache-2.0
//------------------------------------------------------------------------------
#include "doctest.h"
#include "hft/weather.hpp"

#include <sstream>
#include <vector>

using namespace hft;

namespace {

// Straight-line re-implementation of one timestep on nested vectors, written
// independently of the library code. Cell updates follow the same arithmetic
// (same operand order, association and constants), so results must match the
// reference bitwise even though layout and loop structure differ.
struct Brute {
    long long nx, ny, nz;
    double dv, ri, tv, surf, pbl;
    // [i][j][k] with i, j carrying one ghost cell each side; k is 0-based
    std::vector<std::vector<std::vector<double>>> e, u;
    std::vector<std::vector<double>> sf, pb;

    Brute(long long nx_, long long ny_, long long nz_, const GridConfig& c)
        : nx(nx_), ny(ny_), nz(nz_), dv(c.diffusion_velocity), ri(c.radiation_intensity),
          tv(c.transfer_velocity), surf(c.surf_energy), pbl(c.pbl_energy) {
        auto zero3 = std::vector<std::vector<std::vector<double>>>(
            nx + 2, std::vector<std::vector<double>>(ny + 2, std::vector<double>(nz, 0.0)));
        e = zero3;
        u = zero3;
        sf.assign(nx + 2, std::vector<double>(ny + 2, surf));
        pb.assign(nx + 2, std::vector<double>(ny + 2, pbl));
        for (long long i = 0; i <= nx + 1; ++i)
            for (long long j = 0; j <= ny + 1; ++j)
                for (long long k = 1; k <= nz; ++k)
                    if (i >= nx / 4 && i <= (3 * nx) / 4 && j >= ny / 4 && j <= (3 * ny) / 4 &&
                        k >= nz / 4 && k <= (3 * nz) / 4)
                        e[i][j][k - 1] = 300.0;
    }

    void step() {
        for (long long i = 0; i <= nx + 1; ++i)
            for (long long j = 0; j <= ny + 1; ++j) {
                for (long long k = 0; k < nz; ++k) e[i][j][k] = e[i][j][k] + ri;
                double drop = tv * (e[i][j][0] - sf[i][j]);
                e[i][j][0] = e[i][j][0] - drop;
                double rise = tv * (e[i][j][nz - 1] - pb[i][j]);
                e[i][j][nz - 1] = e[i][j][nz - 1] - rise;
            }
        for (long long i = 1; i <= nx; ++i)
            for (long long j = 1; j <= ny; ++j) {
                for (long long k = 1; k < nz - 1; ++k)
                    u[i][j][k] = (1 - 6.0 * dv) * e[i][j][k] +
                                 dv * (e[i - 1][j][k] + e[i + 1][j][k] + e[i][j - 1][k] +
                                       e[i][j + 1][k] + e[i][j][k - 1] + e[i][j][k + 1]);
                u[i][j][0] = (1 - 5.0 * dv) * e[i][j][0] +
                             dv * (e[i - 1][j][0] + e[i + 1][j][0] + e[i][j - 1][0] +
                                   e[i][j + 1][0] + e[i][j][1]);
                u[i][j][nz - 1] = (1 - 5.0 * dv) * e[i][j][nz - 1] +
                                  dv * (e[i - 1][j][nz - 1] + e[i + 1][j][nz - 1] +
                                        e[i][j - 1][nz - 1] + e[i][j + 1][nz - 1] +
                                        e[i][j][nz - 2]);
            }
        for (long long i = 0; i <= nx + 1; ++i)
            for (long long k = 0; k < nz; ++k) {
                u[i][0][k] = (1 - 2.0 * dv) * e[i][0][k] + dv * (e[i][ny][k] + e[i][1][k]);
                u[i][ny + 1][k] =
                    (1 - 2.0 * dv) * e[i][ny + 1][k] + dv * (e[i][ny][k] + e[i][1][k]);
            }
        for (long long j = 0; j <= ny + 1; ++j)
            for (long long k = 0; k < nz; ++k) {
                u[0][j][k] = (1 - 2.0 * dv) * e[0][j][k] + dv * (e[1][j][k] + e[nx][j][k]);
                u[nx + 1][j][k] =
                    (1 - 2.0 * dv) * e[nx + 1][j][k] + dv * (e[1][j][k] + e[nx][j][k]);
            }
        e.swap(u);
    }
};

} // namespace

TEST_CASE("grid configuration validation") {
    Diagnostics d;
    GridConfig cfg;
    CHECK(validate(cfg, d));
    CHECK(d.ok());

    SUBCASE("an unstable diffusion velocity is rejected") {
        cfg.diffusion_velocity = 0.2;
        Diagnostics d2;
        CHECK_FALSE(validate(cfg, d2));
        CHECK_FALSE(d2.ok());
    }
    SUBCASE("one sixth is the largest accepted diffusion velocity") {
        cfg.diffusion_velocity = 1.0 / 6.0;
        Diagnostics d2;
        CHECK(validate(cfg, d2));
    }
    SUBCASE("degenerate extents are rejected") {
        cfg.nx = 1;
        Diagnostics d2;
        CHECK_FALSE(validate(cfg, d2));
    }
    SUBCASE("timesteps must be positive") {
        cfg.timestep = 0.0;
        Diagnostics d2;
        CHECK_FALSE(validate(cfg, d2));
    }
}

TEST_CASE("with all process constants zero a step is the identity") {
    GridConfig cfg;
    cfg.nx = 6;
    cfg.ny = 4;
    cfg.nz = 4;
    cfg.diffusion_velocity = 0.0;
    cfg.radiation_intensity = 0.0;
    cfg.transfer_velocity = 0.0;
    // the first step also populates the update buffer, so the fixed point
    // covers all four fields from one step onward
    SimState before = run_reference(cfg, 1);
    SimState after = run_reference(cfg, 5);
    StateReport r = compare_fields(before, after);
    CHECK(r.shape_ok);
    CHECK(r.max_abs == 0.0);

    SimState fresh = run_reference(cfg, 0);
    CompareReport e = compare_arrays(fresh.energy, after.energy);
    CHECK(e.shape_ok);
    CHECK(e.max_abs == 0.0);
}

TEST_CASE("with radiation alone every cell gains exactly the intensity") {
    GridConfig cfg;
    cfg.nx = 4;
    cfg.ny = 4;
    cfg.nz = 4;
    cfg.diffusion_velocity = 0.0;
    cfg.transfer_velocity = 0.0;
    SimState s0 = run_reference(cfg, 0);
    SimState s1 = run_reference(cfg, 1);
    REQUIRE(s0.energy.size() == s1.energy.size());
    for (std::size_t n = 0; n < s0.energy.size(); ++n)
        CHECK(s1.energy.data[n] == s0.energy.data[n] + cfg.radiation_intensity);
}

TEST_CASE("three steps match an independent brute-force oracle bitwise") {
    GridConfig cfg;
    cfg.nx = 4;
    cfg.ny = 4;
    cfg.nz = 4;
    SimState got = run_reference(cfg, 3);

    Brute oracle(cfg.nx, cfg.ny, cfg.nz, cfg);
    for (int s = 0; s < 3; ++s) oracle.step();

    for (long long k = 1; k <= cfg.nz; ++k)
        for (long long j = 0; j <= cfg.ny + 1; ++j)
            for (long long i = 0; i <= cfg.nx + 1; ++i) {
                CAPTURE(i);
                CAPTURE(j);
                CAPTURE(k);
                CHECK(got.energy.data[got.energy.offset({i, j, k})] == oracle.e[i][j][k - 1]);
            }
}

TEST_CASE("array comparison locates the worst cell and reports NRMSE") {
    ArrayObject a;
    a.bounds = {{0, 2}, {1, 3}};
    a.data.assign(a.size(), 2.0);
    ArrayObject b = a;

    SUBCASE("identical arrays compare clean") {
        CompareReport r = compare_arrays(a, b);
        CHECK(r.shape_ok);
        CHECK(r.max_abs == 0.0);
        CHECK(r.nrmse == 0.0);
    }
    SUBCASE("a single disturbed cell is found and located") {
        b.data[b.offset({2, 3})] += 1e-9;
        CompareReport r = compare_arrays(a, b);
        CHECK(r.shape_ok);
        CHECK(r.max_abs > 1e-12); // fails a tight tolerance
        CHECK(r.max_abs < 1e-8);
        REQUIRE(r.where.size() == 2);
        CHECK(r.where[0] == 2);
        CHECK(r.where[1] == 3);
    }
    SUBCASE("shape mismatches are flagged before any value check") {
        b.bounds = {{0, 2}, {1, 4}};
        b.data.assign(b.size(), 2.0);
        CompareReport r = compare_arrays(a, b);
        CHECK_FALSE(r.shape_ok);
    }
}

TEST_CASE("dump and read round-trip a field bitwise") {
    GridConfig cfg;
    cfg.nx = 4;
    cfg.ny = 4;
    cfg.nz = 4;
    SimState st = run_reference(cfg, 2);

    SUBCASE("rank-3 field") {
        std::stringstream ss;
        dump_field(ss, st.energy);
        Diagnostics d;
        auto back = read_field(ss, d);
        REQUIRE(back.has_value());
        CHECK(d.ok());
        CHECK(back->bounds == st.energy.bounds);
        REQUIRE(back->data.size() == st.energy.data.size());
        for (std::size_t n = 0; n < back->data.size(); ++n)
            CHECK(back->data[n] == st.energy.data[n]);
    }
    SUBCASE("rank-2 field pads a unit third dimension") {
        std::stringstream ss;
        dump_field(ss, st.energy_surf);
        Diagnostics d;
        auto back = read_field(ss, d);
        REQUIRE(back.has_value());
        REQUIRE(back->rank() == 3);
        CHECK(back->bounds[0] == st.energy_surf.bounds[0]);
        CHECK(back->bounds[1] == st.energy_surf.bounds[1]);
        CHECK(back->bounds[2] == std::pair<long long, long long>{1, 1});
        REQUIRE(back->data.size() == st.energy_surf.data.size());
        for (std::size_t n = 0; n < back->data.size(); ++n)
            CHECK(back->data[n] == st.energy_surf.data[n]);
    }
    SUBCASE("a truncated dump is reported, not silently zero-filled") {
        std::stringstream ss;
        dump_field(ss, st.energy_surf);
        std::string text = ss.str();
        text.resize(text.size() / 2);
        std::stringstream cut(text);
        Diagnostics d;
        auto back = read_field(cut, d);
        CHECK_FALSE(back.has_value());
        CHECK_FALSE(d.ok());
    }
}

TEST_CASE("storage unpermutation restores the logical index order") {
    // raw layout (k, i, j) over logical (i, j, k): raw position p holds
    // logical dimension order[p]
    std::vector<int> order = {3, 1, 2};
    ArrayObject raw;
    raw.bounds = {{1, 2}, {0, 2}, {0, 1}}; // k, i, j
    raw.data.assign(raw.size(), 0.0);
    for (long long k = 1; k <= 2; ++k)
        for (long long i = 0; i <= 2; ++i)
            for (long long j = 0; j <= 1; ++j)
                raw.data[raw.offset({k, i, j})] =
                    100.0 * static_cast<double>(i) + 10.0 * static_cast<double>(j) +
                    static_cast<double>(k);

    ArrayObject logical = unpermute_storage(raw, order);
    REQUIRE(logical.rank() == 3);
    CHECK(logical.bounds[0] == std::pair<long long, long long>{0, 2});
    CHECK(logical.bounds[1] == std::pair<long long, long long>{0, 1});
    CHECK(logical.bounds[2] == std::pair<long long, long long>{1, 2});
    for (long long i = 0; i <= 2; ++i)
        for (long long j = 0; j <= 1; ++j)
            for (long long k = 1; k <= 2; ++k)
                CHECK(logical.data[logical.offset({i, j, k})] ==
                      100.0 * static_cast<double>(i) + 10.0 * static_cast<double>(j) +
                      static_cast<double>(k));
}

TEST_CASE("the identity permutation is a no-op") {
    ArrayObject a;
    a.bounds = {{0, 3}, {1, 2}, {1, 2}};
    a.data.assign(a.size(), 0.0);
    for (std::size_t n = 0; n < a.size(); ++n) a.data[n] = static_cast<double>(n);
    ArrayObject out = unpermute_storage(a, {1, 2, 3});
    CHECK(out.bounds == a.bounds);
    CHECK(out.data == a.data);
}
