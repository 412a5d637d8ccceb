//------------------------------------------------------------------------------
// emit_internal.hpp
// Shared state and helpers for the backend emitters
//
// SPDX-License-Identifier: Apache-2.0
//------------------------------------------------------------------------------
#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "hft/analysis.hpp"
#include "hft/ast.hpp"
#include "hft/config.hpp"
#include "hft/emit.hpp"

namespace hft::emit {

struct EmitCtx {
    const ast::Program* prog = nullptr;
    const ProgramInfo* info = nullptr;
    const BuildConfig* cfg = nullptr;
    std::string target;
    std::string backend; // openmp | openacc | cuda | plain (default per target)
    ast::Arch arch = ast::Arch::Cpu;
    bool gpu_model = false;  // dimension extension + call-argument rewriting
    bool use_macros = true;  // AT/DOM wrapping (off for the plain target)
    Diagnostics* diags = nullptr;
};

struct RoutineCtx {
    const EmitCtx* e = nullptr;
    const ast::ModuleDecl* mod = nullptr;
    const ast::RoutineDecl* r = nullptr;
    const RoutineSymbols* syms = nullptr;
    RoutineColor color = RoutineColor::Unaffected;
    // host symbol -> device mirror name, for call-argument substitution and
    // the transfer/launch code (CUDA only)
    std::map<std::string, std::string> mirror;
    // rendering a (CUDA-extracted or loop-materialized) region body: extended
    // symbols gain the region's parallel-domain subscripts
    bool in_region = false;

    const SymbolRecord* sym(const std::string& name) const {
        return syms ? syms->find(name) : nullptr;
    }
};

/// declared rank + extension rank under the GPU model, declared rank otherwise
std::size_t total_rank(const RoutineCtx& c, const SymbolRecord& s);

/// Does this symbol's text go through a storage-order macro?
bool macro_wrapped(const RoutineCtx& c, const SymbolRecord& s);

/// AT/DOM family name for `rank` (AT1, AT2, AT, AT4..), or the explicit
/// directive-provided name.
std::string access_macro(const SymbolRecord& s, std::size_t rank);
std::string dim_macro(const SymbolRecord& s, std::size_t rank);

/// Full dimension list: extension domains (from the directive) first, then
/// the declared dimensions; for describing directives just the declared ones.
std::vector<ast::DimSpec> full_dims(const RoutineCtx& c, const SymbolRecord& s);

/// Expression with storage-order wrapping, dimension extension and mirror
/// substitution applied. Does not rewrite call arguments (statement-level).
ast::ExprPtr rewrite_expr(const RoutineCtx& c, const ast::ExprPtr& e);

std::string render_expr(const RoutineCtx& c, const ast::ExprPtr& e);

/// Declaration line for a symbol spec, dims rewritten through the DOM macro
/// when the record is wrapped; `extra_attrs` splices attributes (e.g.
/// "device") after the type.
std::string render_spec(const RoutineCtx& c, const ast::SymbolSpec& spec,
                        const std::string& extra_attrs = {});

/// Emission hooks that differ per backend while walking a routine body.
struct BodyHooks {
    // Render one Region statement (loops, launch block, or unlooped body).
    std::function<void(const ast::Statement&, int, std::vector<std::string>&)> region;
    // Lines inserted before every `return` and at the natural body end
    // (copy-out / exit-data). Empty function = nothing.
    std::function<void(int, std::vector<std::string>&)> before_return;
    // Extra lines after a pointer assignment (mirrored device swap).
    std::function<void(const ast::Statement&, int, std::vector<std::string>&)> after_pointer_assign;
};

void render_body(const RoutineCtx& c, const std::vector<ast::Statement>& body, int indent,
                 std::vector<std::string>& out, const BodyHooks& hooks);

/// The region body with loops materialized (CPU semantics): nested do loops,
/// last domain outermost. Used by the OpenMP/plain/OpenACC backends.
void render_region_loops(RoutineCtx& c, const ast::Statement& region_stmt, int indent,
                         std::vector<std::string>& out, const BodyHooks& hooks,
                         const std::vector<std::string>& inner_directives = {},
                         const std::string& seq_loop_directive = {});

/// The region body emitted once, without loops (architectures the region
/// does not apply to).
void render_region_unlooped(RoutineCtx& c, const ast::Statement& region_stmt, int indent,
                            std::vector<std::string>& out, const BodyHooks& hooks);

/// Call statement with GPU-model argument rewriting: arguments feeding
/// extended callee dummies collapse to the whole object; mirrors substitute
/// for device-expecting callees.
std::string render_call(const RoutineCtx& c, const ast::Statement& call);

/// Arrays referenced anywhere in `body`, first-use order.
std::vector<std::string> arrays_used(const RoutineCtx& c,
                                     const std::vector<ast::Statement>& body);

/// Region iterators that need synthesized integer(4) declarations: domain
/// names of arch-applicable regions not already declared by the user.
std::vector<std::string> synthesized_iterators(const RoutineCtx& c);

/// Indentation helper: 2 spaces per level.
std::string ind(int levels);

/// `start, end` of a region domain with defaults resolved by the parser.
struct DomainBounds {
    std::string iterator;
    ast::ExprPtr start;
    ast::ExprPtr end;
};
std::vector<DomainBounds> region_bounds(const ast::ParallelRegionSpec& spec);

/// Fold `<expr> + (start-1)` with literal folding for the common cases.
ast::ExprPtr plus_offset(const ast::ExprPtr& base, const ast::ExprPtr& start);

/// Extent of a region domain (`end` when start is literal 1, else
/// end - start + 1).
ast::ExprPtr domain_extent(const DomainBounds& d);

/// Positive-extent predicate `U - L + 1 .gt. 0` (declared lower) or
/// `U - 0 .gt. 0` (default lower) for one dimension.
ast::ExprPtr dim_extent_positive(const ast::DimSpec& dim);

/// Per-routine transfer plan under the GPU model.
struct TransferSymbol {
    std::string name;
    const SymbolRecord* rec = nullptr;
    bool copy_in = false;
    bool copy_out = false;
    bool zero_init = false; // intent(out): zero the device mirror
};

/// Symbols this routine transfers: transferHere-flagged ones, plus (for
/// kernel-colored routines) unflagged domain dependants. present/host
/// symbols never appear. Unflagged intent-none symbols in kernel routines
/// are diagnosed (untracked device state).
std::vector<TransferSymbol> transfer_plan(const RoutineCtx& c, Diagnostics& diags);

/// Diagnose reduction symbols that are never assigned inside the region.
void check_reductions(const RoutineCtx& c, const ast::Statement& region_stmt,
                      Diagnostics& diags);

/// ` reduction(op:name)` clauses, OpenMP/OpenACC spelling (empty if none).
std::string reduction_clause(const ast::ParallelRegionSpec& spec);

// Backend entry points (one routine each, appending lines).
void emit_routine_cpu(RoutineCtx& c, std::vector<std::string>& out, bool openmp);
void emit_routine_cuda(RoutineCtx& c, std::vector<std::string>& out);
void emit_routine_acc(RoutineCtx& c, std::vector<std::string>& out);

} // namespace hft::emit
