//------------------------------------------------------------------------------
// weather.cpp
// Native reference simulator, field comparison and dump format, corpus
// variant drivers
//
// SPDX-License-Identifier: Apache-2.0
//------------------------------------------------------------------------------
#include "hft/weather.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "hft/parser.hpp"

namespace hft {

//------------------------------------------------------------------------------
// Configuration
//------------------------------------------------------------------------------

bool validate(const GridConfig& cfg, Diagnostics& diags) {
    SourceRef rf{"<config>", 0};
    bool ok = true;
    if (cfg.nx < 2 || cfg.ny < 2 || cfg.nz < 2) {
        diags.error(rf, "grid extents must be at least 2 in every dimension");
        ok = false;
    }
    if (!(cfg.diffusion_velocity <= 1.0 / 6.0) || cfg.diffusion_velocity < 0.0) {
        diags.error(rf, "diffusion velocity must lie in [0, 1/6] so the center "
                        "coefficient stays nonnegative");
        ok = false;
    }
    if (cfg.timestep <= 0.0 || cfg.output_timestep <= 0.0) {
        diags.error(rf, "timestep and output timestep must be positive");
        ok = false;
    }
    return ok;
}

namespace {

/// The annotated corpus hardcodes the process constants; an interpreted run
/// cannot honor different values, so reject them instead of ignoring them.
bool check_corpus_constants(const GridConfig& cfg, Diagnostics& diags) {
    GridConfig def;
    if (cfg.diffusion_velocity == def.diffusion_velocity &&
        cfg.radiation_intensity == def.radiation_intensity &&
        cfg.transfer_velocity == def.transfer_velocity &&
        cfg.surf_energy == def.surf_energy && cfg.pbl_energy == def.pbl_energy)
        return true;
    diags.error({"<config>", 0},
                "the annotated sources fix the process constants (diffusion velocity 0.1, "
                "radiation intensity 0.1, transfer velocity 0.01, surface 330, boundary "
                "layer 200); only the native reference accepts other values");
    return false;
}

} // namespace

//------------------------------------------------------------------------------
// Native reference
//------------------------------------------------------------------------------

void reference_init(const GridConfig& cfg, SimState& st) {
    const long long nx = cfg.nx, ny = cfg.ny, nz = cfg.nz;
    auto field3 = [&]() {
        ArrayObject a;
        a.bounds = {{0, nx + 1}, {0, ny + 1}, {1, nz}};
        a.data.assign(a.size(), 0.0);
        return a;
    };
    auto field2 = [&]() {
        ArrayObject a;
        a.bounds = {{0, nx + 1}, {0, ny + 1}};
        a.data.assign(a.size(), 0.0);
        return a;
    };
    st.energy = field3();
    st.energy_u = field3();
    st.energy_surf = field2();
    st.energy_pbl = field2();

    // zero everywhere with a warm box between one quarter and three quarters
    // of each dimension, constant boundary temperatures
    for (long long k = 1; k <= nz; ++k)
        for (long long j = 0; j <= ny + 1; ++j)
            for (long long i = 0; i <= nx + 1; ++i)
                if (i >= nx / 4 && i <= (3 * nx) / 4 && j >= ny / 4 && j <= (3 * ny) / 4 &&
                    k >= nz / 4 && k <= (3 * nz) / 4)
                    st.energy.data[st.energy.offset({i, j, k})] = 300.0;
    for (long long j = 0; j <= ny + 1; ++j)
        for (long long i = 0; i <= nx + 1; ++i) {
            st.energy_surf.data[st.energy_surf.offset({i, j})] = cfg.surf_energy;
            st.energy_pbl.data[st.energy_pbl.offset({i, j})] = cfg.pbl_energy;
        }
}

void reference_step(const GridConfig& cfg, SimState& st) {
    const long long nx = cfg.nx, ny = cfg.ny, nz = cfg.nz;
    const std::size_t sx = static_cast<std::size_t>(nx + 2);
    const std::size_t sy = static_cast<std::size_t>(ny + 2);
    auto at3 = [&](long long i, long long j, long long k) {
        return static_cast<std::size_t>(i) + sx * (static_cast<std::size_t>(j) +
                                                   sy * static_cast<std::size_t>(k - 1));
    };
    auto at2 = [&](long long i, long long j) {
        return static_cast<std::size_t>(i) + sx * static_cast<std::size_t>(j);
    };
    double* e = st.energy.data.data();
    double* u = st.energy_u.data.data();
    const double* sf = st.energy_surf.data.data();
    const double* pb = st.energy_pbl.data.data();
    const double dv = cfg.diffusion_velocity;

    // physics, column by column: radiation over the column, then heat
    // exchange with the surface at k=1 and the boundary layer at k=nz
    for (long long j = 0; j <= ny + 1; ++j)
        for (long long i = 0; i <= nx + 1; ++i) {
            for (long long k = 1; k <= nz; ++k)
                e[at3(i, j, k)] = e[at3(i, j, k)] + cfg.radiation_intensity;
            double to_surf = cfg.transfer_velocity * (e[at3(i, j, 1)] - sf[at2(i, j)]);
            e[at3(i, j, 1)] = e[at3(i, j, 1)] - to_surf;
            double to_pbl = cfg.transfer_velocity * (e[at3(i, j, nz)] - pb[at2(i, j)]);
            e[at3(i, j, nz)] = e[at3(i, j, nz)] - to_pbl;
        }

    // diffusion: inner cells
    for (long long k = 2; k <= nz - 1; ++k)
        for (long long j = 1; j <= ny; ++j)
            for (long long i = 1; i <= nx; ++i)
                u[at3(i, j, k)] =
                    (1 - 6.0 * dv) * e[at3(i, j, k)] +
                    dv * (e[at3(i - 1, j, k)] + e[at3(i + 1, j, k)] + e[at3(i, j - 1, k)] +
                          e[at3(i, j + 1, k)] + e[at3(i, j, k - 1)] + e[at3(i, j, k + 1)]);

    // bottom and top planes: one vertical neighbour only
    for (long long j = 1; j <= ny; ++j)
        for (long long i = 1; i <= nx; ++i) {
            u[at3(i, j, 1)] =
                (1 - 5.0 * dv) * e[at3(i, j, 1)] +
                dv * (e[at3(i - 1, j, 1)] + e[at3(i + 1, j, 1)] + e[at3(i, j - 1, 1)] +
                      e[at3(i, j + 1, 1)] + e[at3(i, j, 2)]);
            u[at3(i, j, nz)] =
                (1 - 5.0 * dv) * e[at3(i, j, nz)] +
                dv * (e[at3(i - 1, j, nz)] + e[at3(i + 1, j, nz)] + e[at3(i, j - 1, nz)] +
                      e[at3(i, j + 1, nz)] + e[at3(i, j, nz - 1)]);
        }

    // south and north ghost rows wrap around in j
    for (long long k = 1; k <= nz; ++k)
        for (long long i = 0; i <= nx + 1; ++i) {
            u[at3(i, 0, k)] =
                (1 - 2.0 * dv) * e[at3(i, 0, k)] + dv * (e[at3(i, ny, k)] + e[at3(i, 1, k)]);
            u[at3(i, ny + 1, k)] =
                (1 - 2.0 * dv) * e[at3(i, ny + 1, k)] + dv * (e[at3(i, ny, k)] + e[at3(i, 1, k)]);
        }

    // west and east ghost columns wrap around in i; corners take these values
    for (long long k = 1; k <= nz; ++k)
        for (long long j = 0; j <= ny + 1; ++j) {
            u[at3(0, j, k)] =
                (1 - 2.0 * dv) * e[at3(0, j, k)] + dv * (e[at3(1, j, k)] + e[at3(nx, j, k)]);
            u[at3(nx + 1, j, k)] =
                (1 - 2.0 * dv) * e[at3(nx + 1, j, k)] + dv * (e[at3(1, j, k)] + e[at3(nx, j, k)]);
        }

    st.energy.data.swap(st.energy_u.data);
}

SimState run_reference(const GridConfig& cfg, long long steps) {
    SimState st;
    reference_init(cfg, st);
    for (long long step = 0; step < steps; ++step) reference_step(cfg, st);
    return st;
}

//------------------------------------------------------------------------------
// Comparison
//------------------------------------------------------------------------------

CompareReport compare_arrays(const ArrayObject& a, const ArrayObject& b) {
    CompareReport r;
    r.shape_ok = a.bounds == b.bounds;
    if (!r.shape_ok) return r;
    r.cells = a.size();
    if (r.cells == 0) {
        r.shape_ok = true;
        return r;
    }
    double lo = a.data[0], hi = a.data[0], sq = 0.0;
    std::size_t worst = 0;
    for (std::size_t n = 0; n < r.cells; ++n) {
        double d = std::fabs(a.data[n] - b.data[n]);
        if (d > r.max_abs) {
            r.max_abs = d;
            worst = n;
        }
        sq += (a.data[n] - b.data[n]) * (a.data[n] - b.data[n]);
        lo = std::min(lo, a.data[n]);
        hi = std::max(hi, a.data[n]);
    }
    double range = hi - lo;
    if (range == 0.0) range = 1.0;
    r.nrmse = std::sqrt(sq / static_cast<double>(r.cells)) / range;
    // recover the logical index of the worst cell from its flat offset
    std::size_t rest = worst;
    for (int d = 0; d < a.rank(); ++d) {
        std::size_t ext = static_cast<std::size_t>(a.extent(d));
        r.where.push_back(a.bounds[static_cast<std::size_t>(d)].first +
                          static_cast<long long>(rest % ext));
        rest /= ext;
    }
    return r;
}

StateReport compare_fields(const SimState& a, const SimState& b) {
    StateReport out;
    out.shape_ok = true;
    const std::pair<const char*, const ArrayObject SimState::*> fields[] = {
        {"energy", &SimState::energy},
        {"energy_u", &SimState::energy_u},
        {"energy_surf", &SimState::energy_surf},
        {"energy_pbl", &SimState::energy_pbl},
    };
    bool first = true;
    for (const auto& [name, member] : fields) {
        CompareReport r = compare_arrays(a.*member, b.*member);
        if (!r.shape_ok) {
            out.shape_ok = false;
            out.field = name;
            return out;
        }
        if (first || r.max_abs > out.max_abs) {
            out.max_abs = r.max_abs;
            out.field = name;
            out.where = r.where;
            out.nrmse = r.nrmse;
            first = false;
        }
    }
    return out;
}

//------------------------------------------------------------------------------
// Field dump format
//------------------------------------------------------------------------------

void dump_field(std::ostream& out, const ArrayObject& a) {
    std::vector<std::pair<long long, long long>> b = a.bounds;
    while (b.size() < 3) b.push_back({1, 1});
    out << (b[0].second - b[0].first + 1) << " " << (b[1].second - b[1].first + 1) << " "
        << (b[2].second - b[2].first + 1) << " " << b[0].first << " " << b[1].first << " "
        << b[2].first << "\n";
    char buf[64];
    std::vector<long long> idx(a.bounds.size());
    for (long long i = b[0].first; i <= b[0].second; ++i)
        for (long long j = b[1].first; j <= b[1].second; ++j)
            for (long long k = b[2].first; k <= b[2].second; ++k) {
                if (!idx.empty()) idx[0] = i;
                if (idx.size() > 1) idx[1] = j;
                if (idx.size() > 2) idx[2] = k;
                std::size_t off = a.offset(idx);
                std::snprintf(buf, sizeof buf, "%.17g", off == SIZE_MAX ? 0.0 : a.data[off]);
                out << i << " " << j << " " << k << " " << buf << "\n";
            }
}

std::optional<ArrayObject> read_field(std::istream& in, Diagnostics& diags) {
    SourceRef rf{"<dump>", 1};
    long long ex[3], lo[3];
    if (!(in >> ex[0] >> ex[1] >> ex[2] >> lo[0] >> lo[1] >> lo[2])) {
        diags.error(rf, "dump header must hold three extents and three lower bounds");
        return std::nullopt;
    }
    ArrayObject a;
    for (int d = 0; d < 3; ++d) {
        if (ex[d] < 1) {
            diags.error(rf, "dump extents must be positive");
            return std::nullopt;
        }
        a.bounds.push_back({lo[d], lo[d] + ex[d] - 1});
    }
    a.data.assign(a.size(), 0.0);
    for (std::size_t n = 0; n < a.size(); ++n) {
        long long i, j, k;
        double v;
        if (!(in >> i >> j >> k >> v)) {
            diags.error(rf, "dump ends after " + std::to_string(n) + " of " +
                                std::to_string(a.size()) + " cells");
            return std::nullopt;
        }
        std::size_t off = a.offset({i, j, k});
        if (off == SIZE_MAX) {
            diags.error(rf, "dump cell (" + std::to_string(i) + ", " + std::to_string(j) + ", " +
                                std::to_string(k) + ") is outside the declared bounds");
            return std::nullopt;
        }
        a.data[off] = v;
    }
    return a;
}

ArrayObject unpermute_storage(const ArrayObject& raw, const std::vector<int>& order) {
    int rank = raw.rank();
    if (static_cast<int>(order.size()) != rank) return raw;
    std::vector<int> pos(static_cast<std::size_t>(rank), 0);
    for (int p = 0; p < rank; ++p) pos[static_cast<std::size_t>(order[static_cast<std::size_t>(p)] - 1)] = p;

    ArrayObject out;
    for (int d = 0; d < rank; ++d)
        out.bounds.push_back(raw.bounds[static_cast<std::size_t>(pos[static_cast<std::size_t>(d)])]);
    out.data.assign(out.size(), 0.0);
    if (out.data.empty()) return out;

    std::vector<long long> idx;
    for (const auto& bd : out.bounds) idx.push_back(bd.first);
    std::vector<long long> raw_idx(static_cast<std::size_t>(rank));
    while (true) {
        for (int p = 0; p < rank; ++p)
            raw_idx[static_cast<std::size_t>(p)] =
                idx[static_cast<std::size_t>(order[static_cast<std::size_t>(p)] - 1)];
        out.data[out.offset(idx)] = raw.data[raw.offset(raw_idx)];
        int d = 0;
        for (; d < rank; ++d) {
            auto du = static_cast<std::size_t>(d);
            if (idx[du] < out.bounds[du].second) {
                ++idx[du];
                break;
            }
            idx[du] = out.bounds[du].first;
        }
        if (d == rank) break;
    }
    return out;
}

//------------------------------------------------------------------------------
// Corpus drivers
//------------------------------------------------------------------------------

const char* variant_name(Variant v) {
    switch (v) {
    case Variant::Reference: return "reference";
    case Variant::Original: return "original";
    case Variant::Cpu: return "cpu";
    case Variant::GpuEmulated: return "gpu-emulated";
    }
    return "?";
}

std::optional<Variant> parse_variant(const std::string& name) {
    if (name == "reference") return Variant::Reference;
    if (name == "original") return Variant::Original;
    if (name == "cpu") return Variant::Cpu;
    if (name == "gpu-emulated") return Variant::GpuEmulated;
    return std::nullopt;
}

namespace {

bool drive(Interpreter& it, const GridConfig& gc, long long steps, VariantRun& out) {
    it.on_write_data = [&](const std::string&, double, const ArrayObject&) {
        ++out.write_data_calls;
    };
    it.set_global_int("nx", gc.nx);
    it.set_global_int("ny", gc.ny);
    it.set_global_int("nz", gc.nz);
    if (!it.call("initialize")) return false;
    double end_time = (static_cast<double>(steps) - 0.5) * gc.timestep;
    if (!it.call("simulate", {0.0, end_time, gc.timestep, gc.output_timestep})) return false;
    out.transcript = it.transcript;
    return true;
}

bool extract_state(Interpreter& it, const BuildConfig& bc, ast::Arch arch, bool permuted,
                   SimState& st, Diagnostics& diags) {
    const std::pair<const char*, int> fields[] = {
        {"energy", 3}, {"energy_u", 3}, {"energy_surf", 2}, {"energy_pbl", 2}};
    for (const auto& [name, rank] : fields) {
        const ArrayObject* raw = it.find_array(name);
        if (!raw) {
            diags.error({"<driver>", 0},
                        std::string("field '") + name + "' is not allocated after the run");
            return false;
        }
        ArrayObject logical =
            permuted ? unpermute_storage(*raw, bc.storage_order(arch, rank)) : *raw;
        if (std::string(name) == "energy") st.energy = std::move(logical);
        else if (std::string(name) == "energy_u") st.energy_u = std::move(logical);
        else if (std::string(name) == "energy_surf") st.energy_surf = std::move(logical);
        else st.energy_pbl = std::move(logical);
    }
    return true;
}

} // namespace

VariantRun run_units(const TranspileResult& tr, const BuildConfig& bc, const GridConfig& gc,
                     long long steps, bool gpu_defined, bool emulate_kernels, Diagnostics& diags,
                     LaunchOrder order) {
    VariantRun out;
    if (!validate(gc, diags) || !check_corpus_constants(gc, diags)) return out;
    if (steps < 1) {
        diags.error({"<config>", 0}, "interpreted runs need at least one step");
        return out;
    }
    if (tr.units.empty() || tr.units[0].filename != "storage_order.F90") {
        diags.error({"<driver>", 0}, "transpiled unit set is missing the storage-order header");
        return out;
    }
    std::vector<std::vector<LogicalLine>> files;
    for (std::size_t n = 1; n < tr.units.size(); ++n) {
        std::string text = expand_unit(tr.units[0], tr.units[n], gpu_defined, diags);
        if (!diags.ok()) return out;
        // continuation merging only happens for hybrid kinds, so feed the
        // expanded (now plain) text back under a hybrid name
        std::string stem = tr.units[n].filename.substr(0, tr.units[n].filename.rfind('.'));
        LoadedSource ls = prepare_source(stem + ".h90", text, diags);
        if (!diags.ok()) return out;
        files.push_back(std::move(ls.logical));
    }
    ast::Program prog = parse_program(files, diags);
    if (!diags.ok()) return out;

    InterpreterOptions io;
    io.emulate_kernels = emulate_kernels;
    io.launch_order = order;
    Interpreter it(prog, diags, io);
    if (!drive(it, gc, steps, out)) return out;
    ast::Arch arch = gpu_defined ? ast::Arch::Gpu : ast::Arch::Cpu;
    if (!extract_state(it, bc, arch, true, out.state, diags)) return out;
    out.ok = diags.ok();
    return out;
}

VariantRun run_variant(Variant v, const std::vector<LoadedSource>& sources,
                       const BuildConfig& bc, const GridConfig& gc, long long steps,
                       Diagnostics& diags, LaunchOrder order) {
    VariantRun out;
    if (!validate(gc, diags)) return out;
    if (v == Variant::Reference) {
        if (steps < 0) {
            diags.error({"<config>", 0}, "steps must be nonnegative");
            return out;
        }
        out.state = run_reference(gc, steps);
        out.ok = true;
        return out;
    }
    if (!check_corpus_constants(gc, diags)) return out;
    if (steps < 1) {
        diags.error({"<config>", 0}, "interpreted runs need at least one step");
        return out;
    }
    if (v == Variant::Original) {
        std::vector<std::vector<LogicalLine>> files;
        for (const auto& s : sources) files.push_back(s.logical);
        ast::Program prog = parse_program(files, diags);
        if (!diags.ok()) return out;
        InterpreterOptions io;
        io.launch_order = order;
        Interpreter it(prog, diags, io);
        if (!drive(it, gc, steps, out)) return out;
        if (!extract_state(it, bc, ast::Arch::Cpu, false, out.state, diags)) return out;
        out.ok = diags.ok();
        return out;
    }
    const char* target = v == Variant::Cpu ? "cpu-openmp" : "gpu-cuda";
    TranspileResult tr = transpile(sources, bc, target, diags);
    if (!diags.ok()) return out;
    return run_units(tr, bc, gc, steps, v == Variant::GpuEmulated,
                     v == Variant::GpuEmulated, diags, order);
}

} // namespace hft
