//------------------------------------------------------------------------------
// pipeline.hpp
// End-to-end transformation: load sources, preprocess and merge, parse,
// analyze, emit per target and length-split the generated lines
//
// SPDX-License-Identifier: Apache-2.0
//------------------------------------------------------------------------------
#pragma once

#include <string>
#include <vector>

#include "hft/analysis.hpp"
#include "hft/ast.hpp"
#include "hft/config.hpp"
#include "hft/emit.hpp"
#include "hft/lines.hpp"
#include "hft/source.hpp"

namespace hft {

/// One input after the text-level phases. Plain/macro-only kinds skip the
/// hybrid transformation and pass through to the output set.
struct LoadedSource {
    std::string stem;     // file name without directory and extension
    RawSource raw;        // macro phase applied for .F90/.H90 kinds
    std::vector<LogicalLine> logical; // continuation-merged (hybrid kinds)
    bool hybrid = false;
};

LoadedSource load_and_merge(const std::string& path, Diagnostics& diags);

/// In-memory variant (tests): `path` selects the kind by extension.
LoadedSource prepare_source(const std::string& path, const std::string& text,
                            Diagnostics& diags);

struct TranspileResult {
    ast::Program program;
    ProgramInfo info;
    std::vector<EmittedUnit> units; // storage_order.F90 first, then per input
};

/// Phases one through eight for one target over a set of already prepared
/// sources. `target` must be concrete (resolve_target first). Hybrid inputs
/// become `<stem>.<target>.f90`; other kinds pass through unchanged. The
/// final macro phase runs on the consumer side with storage_order.F90
/// prepended (GPU defined or not), so generated text still carries the
/// AT/DOM macros.
TranspileResult transpile(const std::vector<LoadedSource>& sources, const BuildConfig& cfg,
                          const std::string& target, Diagnostics& diags);

/// Convenience: load paths from disk and transpile.
TranspileResult transpile_files(const std::vector<std::string>& paths, const BuildConfig& cfg,
                                const std::string& target, Diagnostics& diags);

/// Consumer-side final macro phase: prepend the storage-order header to a
/// generated unit and expand, yielding plain Fortran text. `gpu` selects the
/// #if (GPU) branch.
std::string expand_unit(const EmittedUnit& storage_header, const EmittedUnit& unit, bool gpu,
                        Diagnostics& diags);

} // namespace hft
