//------------------------------------------------------------------------------
// weather.hpp
// Reduced weather application: native reference simulator, field comparison,
// the field-dump format, and drivers that run the annotated corpus through
// the interpreter in its original or generated forms
//
// SPDX-License-Identifier: Apache-2.0
//------------------------------------------------------------------------------
#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hft/config.hpp"
#include "hft/diagnostics.hpp"
#include "hft/interpreter.hpp"
#include "hft/pipeline.hpp"

namespace hft {

/// Grid and process constants. The annotated corpus hardcodes everything
/// except the extents and times, so drivers reject interpreted runs whose
/// constants deviate from these defaults.
struct GridConfig {
    long long nx = 16, ny = 16, nz = 8;
    double timestep = 0.1;
    double output_timestep = 1.0;
    double diffusion_velocity = 0.1; // dv <= 1/6 keeps the center coefficient nonnegative
    double radiation_intensity = 0.1;
    double transfer_velocity = 0.01;
    double surf_energy = 330.0;
    double pbl_energy = 200.0;
};

bool validate(const GridConfig& cfg, Diagnostics& diags);

/// Prognostic state in logical index order: energy and the update buffer
/// over (0:nx+1, 0:ny+1, 1:nz), boundary temperatures over (0:nx+1, 0:ny+1).
struct SimState {
    ArrayObject energy;
    ArrayObject energy_u;
    ArrayObject energy_surf;
    ArrayObject energy_pbl;
};

/// Allocate the state for cfg's extents and apply the initial condition:
/// zero everywhere, 300 inside the box from one quarter to three quarters of
/// each dimension, constant surface and boundary-layer temperatures.
void reference_init(const GridConfig& cfg, SimState& st);

/// One native timestep in place: radiation and boundary exchange per column,
/// explicit diffusion with cyclic ghost handling, then the buffer swap.
void reference_step(const GridConfig& cfg, SimState& st);

/// Native implementation of the simulation; statement-for-statement
/// equivalent to the annotated corpus, so agreement is expected bitwise.
SimState run_reference(const GridConfig& cfg, long long steps);

/// Elementwise comparison of two fields of identical shape.
struct CompareReport {
    bool shape_ok = false;
    double max_abs = 0.0;
    std::vector<long long> where; // logical index of the largest difference
    double nrmse = 0.0;           // RMS difference over the value range of `a`
    std::size_t cells = 0;
};

CompareReport compare_arrays(const ArrayObject& a, const ArrayObject& b);

/// Worst field-level comparison over a whole state; `field` names it.
struct StateReport {
    bool shape_ok = false;
    double max_abs = 0.0;
    std::string field;
    std::vector<long long> where;
    double nrmse = 0.0;

    bool pass(double tol) const { return shape_ok && max_abs <= tol; }
};

StateReport compare_fields(const SimState& a, const SimState& b);

/// Field dump: header `nx ny nz` then the three lower bounds, one line per
/// cell `i j k value` at 17 significant digits with i slowest. Fields of
/// rank below three take extent-one trailing dimensions.
void dump_field(std::ostream& out, const ArrayObject& a);
std::optional<ArrayObject> read_field(std::istream& in, Diagnostics& diags);

/// Logical view of an array stored under a permuted order: position p of the
/// raw index tuple holds logical dimension order[p]-1.
ArrayObject unpermute_storage(const ArrayObject& raw, const std::vector<int>& order);

//------------------------------------------------------------------------------
// Corpus drivers
//------------------------------------------------------------------------------

enum class Variant { Reference, Original, Cpu, GpuEmulated };

const char* variant_name(Variant v);
std::optional<Variant> parse_variant(const std::string& name);

struct VariantRun {
    bool ok = false;
    SimState state; // logical order regardless of the storage config
    std::vector<std::string> transcript;
    int write_data_calls = 0;
};

/// Run already transpiled units through the interpreter: expand each with or
/// without GPU defined, parse, drive initialize/simulate over `steps`, and
/// read the fields back through the matching storage permutation.
VariantRun run_units(const TranspileResult& tr, const BuildConfig& bc, const GridConfig& gc,
                     long long steps, bool gpu_defined, bool emulate_kernels, Diagnostics& diags,
                     LaunchOrder order = LaunchOrder::Forward);

/// End-to-end variant runner over prepared corpus sources. `Reference` needs
/// no sources; `Original` interprets the annotated sources directly; the
/// emitted variants transpile first and then interpret the generated code.
VariantRun run_variant(Variant v, const std::vector<LoadedSource>& sources,
                       const BuildConfig& bc, const GridConfig& gc, long long steps,
                       Diagnostics& diags, LaunchOrder order = LaunchOrder::Forward);

} // namespace hft
