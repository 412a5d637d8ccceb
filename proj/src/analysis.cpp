//------------------------------------------------------------------------------
// analysis.cpp
//
// SPDX-License-Identifier: Apache-2.0
//------------------------------------------------------------------------------
#include "hft/analysis.hpp"

#include <algorithm>
#include <deque>

namespace hft {

using namespace ast;

//------------------------------------------------------------------------------
// Whitelists
//------------------------------------------------------------------------------

bool is_external_subroutine(const std::string& name) {
  // supplied by the harness at run time; anything else must be defined
  return name == "write_data";
}

bool is_intrinsic_function(const std::string& name) {
  static const char* kNames[] = {"modulo", "ceiling", "floor", "real", "abs",
                                 "min",    "max",     "sqrt",  "exp",  "dim3"};
  for (const char* n : kNames)
    if (name == n) return true;
  return false;
}

namespace {

bool is_device_builtin(const std::string& name) {
  return name == "blockidx" || name == "blockdim" || name == "threadidx" ||
         name == "griddim" || name == "warpsize";
}

} // namespace

//------------------------------------------------------------------------------
// Call graph
//------------------------------------------------------------------------------

namespace {

void collect_sites(const RoutineDecl& r, const std::vector<Statement>& body,
                   const ParallelRegionSpec* region, std::vector<CallSite>& out) {
  for (const auto& st : body) {
    if (st.kind == StmtKind::Call) {
      out.push_back({r.name, st.name, region, st.ref});
      continue;
    }
    const ParallelRegionSpec* inner =
        st.kind == StmtKind::Region ? st.region.get() : region;
    collect_sites(r, st.body, inner, out);
    for (const auto& arm : st.bodies) collect_sites(r, arm, inner, out);
  }
}

} // namespace

CallGraph build_callgraph(const Program& prog, Diagnostics& diags) {
  CallGraph g;
  for (const auto& m : prog.modules) {
    for (const auto& r : m.routines) {
      auto [it, inserted] = g.routines.emplace(r.name, &r);
      if (!inserted)
        diags.error(r.ref, "subroutine '" + r.name + "' is defined more than once");
    }
  }
  for (const auto& m : prog.modules)
    for (const auto& r : m.routines) collect_sites(r, r.body, nullptr, g.sites);
  for (const auto& site : g.sites) {
    if (g.routines.count(site.callee)) continue;
    if (is_external_subroutine(site.callee)) {
      g.externals.insert(site.callee);
      continue;
    }
    diags.error(site.ref, "call to undefined subroutine '" + site.callee + "'");
  }
  return g;
}

//------------------------------------------------------------------------------
// Coloring
//------------------------------------------------------------------------------

const char* color_name(RoutineColor c) {
  switch (c) {
    case RoutineColor::Unaffected: return "unaffected";
    case RoutineColor::KernelCaller: return "kernel-caller";
    case RoutineColor::Kernel: return "kernel";
    case RoutineColor::InsideKernel: return "inside-kernel";
  }
  return "?";
}

std::map<std::string, RoutineColor> color_callgraph(const CallGraph& graph, Arch arch,
                                                    Diagnostics& diags) {
  std::map<std::string, RoutineColor> color;
  std::set<std::string> kernels;
  for (const auto& [name, decl] : graph.routines) {
    color[name] = RoutineColor::Unaffected;
    for (const auto& spec : decl->regions)
      if (spec->applies_to(arch)) {
        kernels.insert(name);
        break;
      }
  }

  // inside-kernel: closure of callees reached from applicable region bodies
  std::set<std::string> inside;
  std::deque<std::string> work;
  for (const auto& site : graph.sites) {
    if (!site.region || !site.region->applies_to(arch)) continue;
    if (!graph.routines.count(site.callee)) continue;
    if (inside.insert(site.callee).second) work.push_back(site.callee);
  }
  while (!work.empty()) {
    std::string r = work.front();
    work.pop_front();
    for (const auto& site : graph.sites) {
      if (site.caller != r) continue;
      if (!graph.routines.count(site.callee)) continue;
      if (inside.insert(site.callee).second) work.push_back(site.callee);
    }
  }

  // a routine needed on the device and also called from host code has no
  // consistent position
  for (const auto& name : inside) {
    for (const auto& site : graph.sites) {
      if (site.callee != name) continue;
      if (site.region && site.region->applies_to(arch)) continue;
      if (inside.count(site.caller)) continue; // device-side chain
      diags.error(site.ref,
                  "subroutine '" + name + "' is called both inside and outside " +
                      (arch == Arch::Gpu ? std::string("GPU") : std::string("CPU")) +
                      " parallel regions",
                  "ambiguous-positioning");
      break;
    }
  }

  // kernel-caller: reverse reachability to kernels over host-side call sites
  std::set<std::string> callers;
  std::deque<std::string> cwork(kernels.begin(), kernels.end());
  std::set<std::string> targets(kernels.begin(), kernels.end());
  while (!cwork.empty()) {
    std::string t = cwork.front();
    cwork.pop_front();
    for (const auto& site : graph.sites) {
      if (site.callee != t) continue;
      if (site.region && site.region->applies_to(arch)) continue;
      if (!targets.count(site.caller) && callers.insert(site.caller).second)
        cwork.push_back(site.caller);
    }
  }

  for (const auto& name : inside) color[name] = RoutineColor::InsideKernel;
  for (const auto& name : kernels) color[name] = RoutineColor::Kernel;
  for (const auto& name : callers)
    if (color[name] == RoutineColor::Unaffected) color[name] = RoutineColor::KernelCaller;
  return color;
}

//------------------------------------------------------------------------------
// Symbol resolution
//------------------------------------------------------------------------------

namespace {

struct ModuleTable {
  const ModuleDecl* decl = nullptr;
  std::map<std::string, const SymbolSpec*> specs;
};

void add_module_symbols(const ModuleTable& mt, const std::vector<std::string>& only,
                        RoutineSymbols& out) {
  auto visible = [&](const std::string& n) {
    if (only.empty()) return true;
    return std::find(only.begin(), only.end(), n) != only.end();
  };
  for (const auto& [name, spec] : mt.specs) {
    if (!visible(name)) continue;
    if (out.table.count(name)) continue; // locals shadow module symbols
    SymbolRecord rec;
    rec.name = name;
    rec.decl = spec;
    rec.is_module = true;
    rec.home_module = mt.decl->name;
    out.table.emplace(name, std::move(rec));
  }
}

void collect_names(const ExprPtr& e, std::set<std::string>& out) {
  walk_expr(e, [&](const Expr& x) {
    if (x.kind == ExprKind::Name || x.kind == ExprKind::Ref) out.insert(x.text);
    if (x.kind == ExprKind::Member && !x.args.empty() &&
        x.args[0]->kind == ExprKind::Name)
      out.insert(x.args[0]->text);
  });
}

} // namespace

std::map<std::string, RoutineSymbols> resolve_symbols(const Program& prog, Diagnostics& diags) {
  std::map<std::string, ModuleTable> modules;
  for (const auto& m : prog.modules) {
    ModuleTable& mt = modules[m.name];
    mt.decl = &m;
    for (const auto& s : m.specs) mt.specs[s.name] = &s;
  }

  std::map<std::string, RoutineSymbols> result;
  for (const auto& m : prog.modules) {
    for (const auto& r : m.routines) {
      RoutineSymbols syms;

      for (const auto& s : r.specs) {
        SymbolRecord rec;
        rec.name = s.name;
        rec.decl = &s;
        rec.is_param = std::find(r.params.begin(), r.params.end(), s.name) != r.params.end();
        auto [it, inserted] = syms.table.emplace(s.name, std::move(rec));
        if (!inserted)
          diags.error(s.ref, "symbol '" + s.name + "' is declared twice in '" + r.name + "'");
      }
      for (const auto& p : r.params)
        if (!syms.table.count(p))
          diags.error(r.ref, "dummy argument '" + p + "' of '" + r.name +
                                 "' has no declaration");

      // region iterators become integer locals when not declared by the user
      for (const auto& spec : r.regions) {
        for (const auto& d : spec->domains) {
          auto it = syms.table.find(d.name);
          if (it == syms.table.end()) {
            SymbolRecord rec;
            rec.name = d.name;
            rec.is_iterator = true;
            syms.table.emplace(d.name, std::move(rec));
          } else if (it->second.decl && !it->second.decl->dims.empty()) {
            diags.error(spec->ref, "region iterator '" + d.name + "' conflicts with an array");
          } else {
            it->second.is_iterator = true;
          }
        }
      }

      // host association: the routine's use statements plus the module's,
      // plus the enclosing module itself
      for (const auto& u : r.uses) {
        auto it = modules.find(u.module);
        if (it == modules.end()) {
          diags.error(r.ref, "use of unknown module '" + u.module + "'");
          continue;
        }
        add_module_symbols(it->second, u.only, syms);
      }
      for (const auto& u : m.uses) {
        auto it = modules.find(u.module);
        if (it == modules.end()) continue; // reported once at module scope below
        add_module_symbols(it->second, u.only, syms);
      }
      add_module_symbols(modules[m.name], {}, syms);

      // attach directive entries
      for (const auto& dd : r.domain_dependants) {
        for (const auto& sym : dd.symbols) {
          auto it = syms.table.find(sym);
          if (it == syms.table.end()) {
            diags.error(dd.ref, "@domainDependant names unknown symbol '" + sym + "'");
            continue;
          }
          if (it->second.dd)
            diags.error(dd.ref,
                        "symbol '" + sym + "' is listed in more than one @domainDependant");
          it->second.dd = &dd;
        }
      }

      // every referenced name must resolve
      std::set<std::string> used;
      walk_statements(r.body, [&](const Statement& st) {
        if (st.kind == StmtKind::Do) used.insert(st.name);
        for (const auto& e : statement_exprs(st)) collect_names(e, used);
      });
      for (const auto& spec : r.regions) {
        for (const auto& d : spec->domains) {
          collect_names(d.size_lo, used);
          collect_names(d.size_hi, used);
          collect_names(d.start, used);
          collect_names(d.end, used);
        }
      }
      for (const auto& dd : r.domain_dependants) {
        for (const auto& [lo, hi] : dd.dom_sizes) {
          collect_names(lo, used);
          collect_names(hi, used);
        }
      }
      for (const auto& s : r.specs) {
        for (const auto& d : s.dims) {
          collect_names(d.lower, used);
          collect_names(d.upper, used);
        }
        collect_names(s.init, used);
      }
      for (const auto& name : used) {
        if (syms.table.count(name)) continue;
        if (is_intrinsic_function(name) || is_device_builtin(name)) continue;
        if (is_external_subroutine(name)) continue;
        if (prog.find_routine(name)) continue; // callee names reached via exprs
        diags.error(r.ref, "symbol '" + name + "' is not declared in '" + r.name + "'");
      }

      result.emplace(r.name, std::move(syms));
    }
    for (const auto& u : m.uses)
      if (!modules.count(u.module))
        diags.error(m.ref, "use of unknown module '" + u.module + "'");
  }
  return result;
}

//------------------------------------------------------------------------------
// Segmentation
//------------------------------------------------------------------------------

std::vector<Segment> segment_routine(const RoutineDecl& r) {
  std::vector<Segment> out;
  Segment spec;
  spec.kind = SegmentKind::Specification;
  out.push_back(spec);

  std::vector<const Statement*> pending; // comments waiting for a region
  Segment seq;
  seq.kind = SegmentKind::Sequential;
  auto flush_seq = [&]() {
    if (!seq.stmts.empty()) {
      out.push_back(seq);
      seq.stmts.clear();
    }
  };
  for (const auto& st : r.body) {
    if (st.kind == StmtKind::Comment) {
      pending.push_back(&st);
      continue;
    }
    if (st.kind == StmtKind::Region) {
      flush_seq();
      Segment par;
      par.kind = SegmentKind::Parallel;
      par.stmts = pending; // lead comments
      pending.clear();
      par.region = &st;
      out.push_back(par);
      continue;
    }
    for (const Statement* c : pending) seq.stmts.push_back(c);
    pending.clear();
    seq.stmts.push_back(&st);
  }
  for (const Statement* c : pending) seq.stmts.push_back(c);
  flush_seq();
  return out;
}

//------------------------------------------------------------------------------
// Combined
//------------------------------------------------------------------------------

ProgramInfo analyze(const Program& prog, Diagnostics& diags) {
  ProgramInfo info;
  info.graph = build_callgraph(prog, diags);
  info.color_cpu = color_callgraph(info.graph, Arch::Cpu, diags);
  info.color_gpu = color_callgraph(info.graph, Arch::Gpu, diags);
  info.symbols = resolve_symbols(prog, diags);
  return info;
}

//------------------------------------------------------------------------------
// GPU region validation
//------------------------------------------------------------------------------

namespace {

struct KernelValidator {
  const Program& prog;
  const ProgramInfo& info;
  Diagnostics& diags;
  std::set<std::string> reported; // "rule:routine" dedup

  void report(const SourceRef& ref, const std::string& rule, const std::string& key,
              const std::string& msg) {
    if (!reported.insert(rule + ":" + key).second) return;
    diags.error(ref, msg, rule);
  }

  bool is_array_symbol(const std::string& routine, const std::string& name) const {
    auto it = info.symbols.find(routine);
    if (it == info.symbols.end()) return false;
    const SymbolRecord* rec = it->second.find(name);
    return rec && rec->is_array();
  }

  bool has_array_expression(const std::string& routine, const ExprPtr& e) const {
    bool found = false;
    walk_expr(e, [&](const Expr& x) {
      if (x.kind == ExprKind::Range) found = true;
      if (x.kind == ExprKind::Name && is_array_symbol(routine, x.text)) found = true;
    });
    return found;
  }

  void check_body(const std::string& routine, const std::vector<Statement>& body,
                  const std::string& where_desc) {
    walk_statements(body, [&](const Statement& st) {
      switch (st.kind) {
        case StmtKind::Io:
          report(st.ref, "kernel-io", routine + ":" + st.name,
                 "'" + st.name + "' statement " + where_desc);
          break;
        case StmtKind::Assign:
          if (has_array_expression(routine, st.e1) || has_array_expression(routine, st.e2))
            report(st.ref, "kernel-array-expression", routine,
                   "array expression " + where_desc +
                       "; assignments must address single elements");
          break;
        case StmtKind::PointerAssign:
          diags.error(st.ref, "pointer assignment " + where_desc);
          break;
        case StmtKind::Allocate:
        case StmtKind::Deallocate:
          diags.error(st.ref, "allocation " + where_desc);
          break;
        default:
          break;
      }
    });
  }

  void check_state_symbols(const RoutineDecl& r) {
    for (const auto& s : r.specs) {
      if (s.save || s.data_init || (s.init && !s.parameter))
        report(s.ref, "kernel-save-data", r.name + ":" + s.name,
               "symbol '" + s.name + "' in '" + r.name +
                   "' keeps state across calls (save/data) and cannot move to the device");
    }
  }

  // closure of routines called from a GPU region, with cycle detection
  void check_closure(const std::string& kernel_routine,
                     const std::vector<const CallSite*>& seeds) {
    std::set<std::string> visited;
    for (const CallSite* seed : seeds) dfs(kernel_routine, seed->callee, seed->ref, {}, visited);
  }

  void dfs(const std::string& kernel_routine, const std::string& name, const SourceRef& ref,
           std::vector<std::string> stack, std::set<std::string>& visited) {
    if (std::find(stack.begin(), stack.end(), name) != stack.end()) {
      report(ref, "kernel-recursion", name,
             "recursive call chain involving '" + name + "' inside a GPU parallel region");
      return;
    }
    auto it = info.graph.routines.find(name);
    if (it == info.graph.routines.end()) return; // external
    const RoutineDecl& callee = *it->second;
    bool first_visit = visited.insert(name).second;
    if (first_visit) {
      auto cit = info.color_gpu.find(name);
      if (cit != info.color_gpu.end() && cit->second == RoutineColor::Kernel)
        report(ref, "kernel-calls-kernel", name,
               "'" + name + "' contains its own GPU parallel region and is also called "
                            "inside the GPU region of '" + kernel_routine + "'");
      check_state_symbols(callee);
      check_body(name, callee.body, "in '" + name + "', which runs inside a GPU parallel region");
    }
    stack.push_back(name);
    for (const auto& site : info.graph.sites) {
      if (site.caller != name) continue;
      dfs(kernel_routine, site.callee, site.ref, stack, visited);
    }
  }
};

void collect_region_stmts(const std::vector<Statement>& body,
                          std::vector<const Statement*>& out) {
  for (const auto& st : body) {
    if (st.kind == StmtKind::Region) out.push_back(&st);
    collect_region_stmts(st.body, out);
    for (const auto& arm : st.bodies) collect_region_stmts(arm, out);
  }
}

} // namespace

void validate_kernel_bodies(const Program& prog, const ProgramInfo& info, Diagnostics& diags) {
  KernelValidator v{prog, info, diags, {}};
  for (const auto& m : prog.modules) {
    for (const auto& r : m.routines) {
      std::vector<const Statement*> regions;
      collect_region_stmts(r.body, regions);
      for (const Statement* reg : regions) {
        if (!reg->region->applies_gpu) continue;
        v.check_body(r.name, reg->body, "inside a GPU parallel region");
        // a kernel extracted from a routine with stateful locals would have
        // to move that state to the device
        v.check_state_symbols(r);
        std::vector<const CallSite*> seeds;
        for (const auto& site : info.graph.sites)
          if (site.caller == r.name && site.region == reg->region.get())
            seeds.push_back(&site);
        v.check_closure(r.name, seeds);
      }
    }
  }
}

//------------------------------------------------------------------------------
// DOT rendering
//------------------------------------------------------------------------------

std::string render_dot(const CallGraph& graph,
                       const std::map<std::string, RoutineColor>& colors) {
  std::string out = "digraph calls {\n";
  for (const auto& [name, decl] : graph.routines) {
    (void)decl;
    auto it = colors.find(name);
    std::string c = it == colors.end() ? "unaffected" : color_name(it->second);
    out += "  \"" + name + "\" [label=\"" + name + " [" + c + "]\"];\n";
  }
  for (const auto& name : graph.externals)
    out += "  \"" + name + "\" [label=\"" + name + " [external]\", shape=box];\n";
  std::set<std::string> seen;
  for (const auto& site : graph.sites) {
    std::string edge = "  \"" + site.caller + "\" -> \"" + site.callee + "\";\n";
    if (seen.insert(edge).second) out += edge;
  }
  out += "}\n";
  return out;
}

} // namespace hft
