//------------------------------------------------------------------------------
// analysis.hpp
// Call graph, per-architecture routine coloring, symbol resolution and the
// region validation rules for GPU backends
//
// SPDX-License-Identifier: Apache-2.0
//------------------------------------------------------------------------------
#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "hft/ast.hpp"

namespace hft {

//------------------------------------------------------------------------------
// Call graph
//------------------------------------------------------------------------------

struct CallSite {
  std::string caller;
  std::string callee;
  const ast::ParallelRegionSpec* region = nullptr; // enclosing region, if any
  SourceRef ref;
};

struct CallGraph {
  std::vector<CallSite> sites;
  std::map<std::string, const ast::RoutineDecl*> routines; // defined routines
  std::set<std::string> externals;                         // whitelisted undefined callees
};

/// Subroutines that may be called without a definition in the parsed sources
/// (they are supplied by the runtime / test harness).
bool is_external_subroutine(const std::string& name);

/// Function names that evaluate without a user definition.
bool is_intrinsic_function(const std::string& name);

CallGraph build_callgraph(const ast::Program& prog, Diagnostics& diags);

//------------------------------------------------------------------------------
// Coloring: how each routine relates to parallel regions of one architecture
//------------------------------------------------------------------------------

enum class RoutineColor {
  Unaffected,   // no relation to any applicable region
  KernelCaller, // reaches a kernel routine from outside applicable regions
  Kernel,       // contains an applicable region
  InsideKernel, // (transitively) called from inside applicable regions
};

const char* color_name(RoutineColor c);

std::map<std::string, RoutineColor> color_callgraph(const CallGraph& graph, ast::Arch arch,
                                                    Diagnostics& diags);

//------------------------------------------------------------------------------
// Symbols
//------------------------------------------------------------------------------

struct SymbolRecord {
  std::string name;
  const ast::SymbolSpec* decl = nullptr; // null for synthesized iterators
  bool is_param = false;                 // dummy argument of this routine
  bool is_module = false;
  std::string home_module;
  bool is_iterator = false; // region iterator, synthesized integer(4)
  const ast::DomainDependantSpec* dd = nullptr;

  bool is_array() const { return decl && !decl->dims.empty(); }
  /// Extension domains, prepended on GPU positioning. A directive that names
  /// exactly as many domains as the declaration already has describes those
  /// dimensions (for storage order and transfers) rather than adding new ones;
  /// any other non-empty domain list is the set of missing parallel domains.
  std::size_t extension_rank() const {
    if (!dd || dd->dom_names.empty()) return 0;
    std::size_t declared = decl ? decl->dims.size() : 0;
    return dd->dom_names.size() == declared ? 0 : dd->dom_names.size();
  }
};

struct RoutineSymbols {
  std::map<std::string, SymbolRecord> table;

  const SymbolRecord* find(const std::string& name) const {
    auto it = table.find(name);
    return it == table.end() ? nullptr : &it->second;
  }
};

/// Two passes: module tables first, then each routine resolves locals,
/// dummies, module symbols (through use), region iterators, intrinsics and
/// whitelisted externals. Any other referenced name is an error.
std::map<std::string, RoutineSymbols> resolve_symbols(const ast::Program& prog,
                                                      Diagnostics& diags);

//------------------------------------------------------------------------------
// Routine segmentation (specification part, sequential runs, regions)
//------------------------------------------------------------------------------

enum class SegmentKind { Specification, Sequential, Parallel };

struct Segment {
  SegmentKind kind;
  std::vector<const ast::Statement*> stmts; // sequential statements, or the
                                            // comments leading a region
  const ast::Statement* region = nullptr;   // Parallel only
};

std::vector<Segment> segment_routine(const ast::RoutineDecl& r);

//------------------------------------------------------------------------------
// Combined result
//------------------------------------------------------------------------------

struct ProgramInfo {
  CallGraph graph;
  std::map<std::string, RoutineColor> color_cpu;
  std::map<std::string, RoutineColor> color_gpu;
  std::map<std::string, RoutineSymbols> symbols;
};

ProgramInfo analyze(const ast::Program& prog, Diagnostics& diags);

//------------------------------------------------------------------------------
// GPU region validation (applies to GPU-targeted backends)
//------------------------------------------------------------------------------

/// Checks every GPU-applicable region body and its transitive device call
/// closure. Violations are reported with stable rule names:
///   kernel-recursion, kernel-calls-kernel, kernel-save-data, kernel-io,
///   kernel-array-expression
void validate_kernel_bodies(const ast::Program& prog, const ProgramInfo& info,
                            Diagnostics& diags);

/// Call graph as DOT, each node labelled "name [color]".
std::string render_dot(const CallGraph& graph,
                       const std::map<std::string, RoutineColor>& colors);

} // namespace hft
