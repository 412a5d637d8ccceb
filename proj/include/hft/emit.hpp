//------------------------------------------------------------------------------
// emit.hpp
// Backend emission: storage-order macro header, CPU (OpenMP / OpenACC / plain)
// and GPU (CUDA Fortran / OpenACC) source text
//
// SPDX-License-Identifier: Apache-2.0
//------------------------------------------------------------------------------
#pragma once

#include <string>
#include <vector>

#include "hft/analysis.hpp"
#include "hft/ast.hpp"
#include "hft/config.hpp"
#include "hft/diagnostics.hpp"

namespace hft {

struct EmittedUnit {
    std::string filename;
    std::string text;
};

/// An accPP/domPP macro name spelled out in a directive; storage_order.F90
/// aliases it onto the AT/DOM family of the same arity.
struct MacroAlias {
    std::string name;
    int arity = 0;
    bool dom = false; // declaration-side (domPP) rather than access-side (accPP)
};

/// Scan every @domainDependant for explicit accPP/domPP names. Conflicting
/// arities for one name are diagnosed.
std::vector<MacroAlias> collect_macro_aliases(const ast::Program& prog, Diagnostics& diags);

/// The storage_order.F90 header: AT/DOM macro families for 1..7 dimensions,
/// identity order under GPU, the configured permutation otherwise, plus
/// aliases for explicitly named directive macros. This header is prepended to
/// every unit before final macro processing on the consumer side.
EmittedUnit emit_storage_macros(const BuildConfig& cfg,
                                const std::vector<MacroAlias>& aliases, Diagnostics& diags);

/// Emission targets. "plain" erases directives and materializes CPU-applicable
/// regions as ordinary loops without any parallelization annotations.
bool is_known_target(const std::string& target);
ast::Arch target_arch(const std::string& target);

/// Map the user-facing --target spelling (which may be the architecture alias
/// "cpu"/"gpu") to a concrete backend using the configured defaults.
std::string resolve_target(const std::string& requested, const BuildConfig& cfg,
                           Diagnostics& diags);

/// Transform the modules of one input source file for `target`. The unit is
/// named `<stem>.<target>.f90`; its lines are not yet length-split.
EmittedUnit emit_source(const std::string& stem,
                        const std::vector<const ast::ModuleDecl*>& modules,
                        const ast::Program& prog, const ProgramInfo& info,
                        const BuildConfig& cfg, const std::string& target,
                        Diagnostics& diags);

} // namespace hft
