//------------------------------------------------------------------------------
// emit_common.cpp
// Storage-order header, expression/statement rewriting and the per-source
// driver shared by every backend
//
// SPDX-License-Identifier: Apache-2.0
//------------------------------------------------------------------------------
#include "emit_internal.hpp"

#include <algorithm>
#include <cctype>

#include "hft/printer.hpp"

namespace hft::emit {

using namespace ast;

std::string ind(int levels) { return std::string(static_cast<std::size_t>(levels) * 2, ' '); }

namespace {

std::string join(const std::vector<std::string>& items, const char* sep = ", ") {
    std::string s;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) s += sep;
        s += items[i];
    }
    return s;
}

} // namespace

//------------------------------------------------------------------------------
// Symbol geometry
//------------------------------------------------------------------------------

std::size_t total_rank(const RoutineCtx& c, const SymbolRecord& s) {
    std::size_t declared = s.decl ? s.decl->dims.size() : 0;
    return declared + (c.e->gpu_model ? s.extension_rank() : 0);
}

bool macro_wrapped(const RoutineCtx& c, const SymbolRecord& s) {
    if (!s.dd || !c.e->use_macros) return false;
    if (!s.dd->acc_pp.empty() || !s.dd->dom_pp.empty()) return true;
    return total_rank(c, s) >= 2;
}

namespace {

std::string family_macro(const char* base3, const char* stem, std::size_t rank) {
    if (rank == 3) return base3;
    return stem + std::to_string(rank);
}

} // namespace

std::string access_macro(const SymbolRecord& s, std::size_t rank) {
    if (s.dd && !s.dd->acc_pp.empty()) return s.dd->acc_pp;
    return family_macro("AT", "AT", rank);
}

std::string dim_macro(const SymbolRecord& s, std::size_t rank) {
    if (s.dd && !s.dd->dom_pp.empty()) return s.dd->dom_pp;
    return family_macro("DOM", "DOM", rank);
}

std::vector<DimSpec> full_dims(const RoutineCtx& c, const SymbolRecord& s) {
    (void)c;
    std::vector<DimSpec> dims;
    if (!s.dd) {
        if (s.decl) dims = s.decl->dims;
        return dims;
    }
    std::size_t declared = s.decl ? s.decl->dims.size() : 0;
    if (s.extension_rank() > 0) {
        for (const auto& [lo, hi] : s.dd->dom_sizes) {
            DimSpec d;
            d.lower = lo;
            d.upper = hi;
            dims.push_back(d);
        }
        if (s.decl)
            dims.insert(dims.end(), s.decl->dims.begin(), s.decl->dims.end());
        return dims;
    }
    // Describing directive: prefer its concrete sizes when the declaration is
    // deferred-shape (module pointers).
    bool deferred = false;
    if (s.decl)
        for (const auto& d : s.decl->dims)
            if (d.deferred) deferred = true;
    if (!s.dd->dom_sizes.empty() && (declared == 0 || deferred)) {
        for (const auto& [lo, hi] : s.dd->dom_sizes) {
            DimSpec d;
            d.lower = lo;
            d.upper = hi;
            dims.push_back(d);
        }
        return dims;
    }
    if (s.decl) dims = s.decl->dims;
    return dims;
}

//------------------------------------------------------------------------------
// Expression rewriting
//------------------------------------------------------------------------------

namespace {

ExprPtr wrap_args(const std::string& macro, std::vector<ExprPtr> args) {
    return make_ref(macro, std::move(args));
}

} // namespace

ExprPtr rewrite_expr(const RoutineCtx& c, const ExprPtr& e) {
    if (!e) return nullptr;
    const SymbolRecord* s = nullptr;
    switch (e->kind) {
        case ExprKind::Name: {
            s = c.sym(e->text);
            // A scalar that gains parallel domains reads as an element of the
            // extended object inside region bodies.
            if (s && c.in_region && c.e->gpu_model && s->extension_rank() > 0 &&
                (!s->decl || s->decl->dims.empty())) {
                std::vector<ExprPtr> idx;
                for (const auto& n : s->dd->dom_names) idx.push_back(make_name(n));
                std::size_t rank = idx.size();
                if (c.e->use_macros && (rank >= 2 || !s->dd->acc_pp.empty()))
                    return make_ref(e->text, {wrap_args(access_macro(*s, rank), std::move(idx))});
                return make_ref(e->text, std::move(idx));
            }
            return e;
        }
        case ExprKind::Ref: {
            s = c.sym(e->text);
            std::vector<ExprPtr> args;
            bool extend = s && c.in_region && c.e->gpu_model && s->extension_rank() > 0;
            if (extend)
                for (const auto& n : s->dd->dom_names) args.push_back(make_name(n));
            for (const auto& a : e->args) args.push_back(rewrite_expr(c, a));
            if (s && s->dd && !args.empty()) {
                std::size_t rank = args.size();
                if (c.e->use_macros && (rank >= 2 || !s->dd->acc_pp.empty()))
                    return make_ref(e->text, {wrap_args(access_macro(*s, rank), std::move(args))});
            }
            if (!extend && !s) {
                // plain function call / intrinsic: arguments rewritten above
            }
            return make_ref(e->text, std::move(args));
        }
        default: {
            if (e->args.empty()) return e;
            ExprPtr out = clone(e);
            for (auto& a : out->args) a = rewrite_expr(c, a);
            return out;
        }
    }
}

std::string render_expr(const RoutineCtx& c, const ExprPtr& e) {
    return print_expression(rewrite_expr(c, e));
}

std::string render_spec(const RoutineCtx& c, const SymbolSpec& spec,
                        const std::string& extra_attrs) {
    SymbolSpec copy = spec;
    const SymbolRecord* s = c.sym(spec.name);
    std::string dims_text;
    bool all_deferred = !spec.dims.empty();
    for (const auto& d : spec.dims)
        if (!d.deferred) all_deferred = false;
    if (s && !spec.dims.empty() && !all_deferred && macro_wrapped(c, *s)) {
        RoutineCtx plain = c;
        plain.in_region = false;
        std::vector<std::string> parts;
        for (const auto& d : spec.dims) {
            if (d.lower)
                parts.push_back(render_expr(plain, d.lower) + " : " + render_expr(plain, d.upper));
            else
                parts.push_back(render_expr(plain, d.upper));
        }
        dims_text = dim_macro(*s, spec.dims.size()) + "(" + join(parts) + ")";
        copy.dims.clear();
    }
    std::string line = print_symbol_spec(copy);
    if (!dims_text.empty()) {
        // re-attach the wrapped dimension list
        std::size_t at = line.rfind(" :: " + spec.name);
        line = line.substr(0, at + 4 + spec.name.size()) + "(" + dims_text + ")" +
               line.substr(at + 4 + spec.name.size());
    }
    if (!extra_attrs.empty()) {
        std::size_t comma = line.find(", ");
        std::size_t sep = line.find(" :: ");
        std::size_t cut = comma != std::string::npos && comma < sep ? comma : sep;
        line = line.substr(0, cut) + ", " + extra_attrs + line.substr(cut);
    }
    return line;
}

//------------------------------------------------------------------------------
// Region geometry
//------------------------------------------------------------------------------

std::vector<DomainBounds> region_bounds(const ParallelRegionSpec& spec) {
    std::vector<DomainBounds> out;
    for (const auto& d : spec.domains) out.push_back({d.name, d.start, d.end});
    return out;
}

ExprPtr plus_offset(const ExprPtr& base, const ExprPtr& start) {
    if (is_int_literal(start.get(), 1)) return base;
    if (start->kind == ExprKind::IntLit) {
        long long delta = start->int_value - 1;
        if (delta == 0) return base;
        if (delta > 0) return make_binary("+", base, make_int(delta));
        return make_binary("-", base, make_int(-delta));
    }
    return make_binary("+", base, make_paren(make_binary("-", clone(start), make_int(1))));
}

ExprPtr domain_extent(const DomainBounds& d) {
    if (is_int_literal(d.start.get(), 1)) return clone(d.end);
    return make_binary("+", make_binary("-", clone(d.end), clone(d.start)), make_int(1));
}

ExprPtr dim_extent_positive(const DimSpec& dim) {
    if (dim.deferred) return nullptr;
    ExprPtr lower = dim.lower ? clone(dim.lower) : nullptr;
    ExprPtr extent;
    if (lower)
        extent = make_binary("+", make_binary("-", clone(dim.upper), std::move(lower)), make_int(1));
    else
        extent = make_binary("-", clone(dim.upper), make_int(0));
    return make_binary(".gt.", std::move(extent), make_int(0));
}

//------------------------------------------------------------------------------
// Statement rendering
//------------------------------------------------------------------------------

std::string render_call(const RoutineCtx& c, const Statement& st) {
    const RoutineDecl* callee = c.e->prog->find_routine(st.name);
    const RoutineSymbols* callee_syms = nullptr;
    if (callee) {
        auto it = c.e->info->symbols.find(callee->name);
        if (it != c.e->info->symbols.end()) callee_syms = &it->second;
    }
    RoutineColor callee_color = RoutineColor::Unaffected;
    if (callee) {
        const auto& colors =
            c.e->arch == Arch::Gpu ? c.e->info->color_gpu : c.e->info->color_cpu;
        auto it = colors.find(callee->name);
        if (it != colors.end()) callee_color = it->second;
    }

    std::vector<std::string> args;
    for (std::size_t i = 0; i < st.exprs.size(); ++i) {
        const ExprPtr& a = st.exprs[i];
        const SymbolRecord* dummy = nullptr;
        if (callee_syms && i < callee->params.size())
            dummy = callee_syms->find(callee->params[i]);
        // Arguments feeding an extended dummy collapse to the whole object:
        // the callee addresses the parallel domains itself.
        if (c.e->gpu_model && dummy && dummy->extension_rank() > 0 &&
            (a->kind == ExprKind::Ref || a->kind == ExprKind::Name)) {
            std::string base = a->text;
            auto m = c.mirror.find(base);
            args.push_back(m != c.mirror.end() ? m->second : base);
            continue;
        }
        // Device-resident callee dummies receive this routine's mirrors.
        if (c.e->gpu_model && dummy && dummy->dd && dummy->dd->present &&
            a->kind == ExprKind::Name) {
            auto m = c.mirror.find(a->text);
            if (m != c.mirror.end()) {
                args.push_back(m->second);
                continue;
            }
        }
        args.push_back(render_expr(c, a));
    }
    // Device subroutines receive the parallel-domain iterators explicitly.
    if (c.in_region && c.e->gpu_model && callee_color == RoutineColor::InsideKernel &&
        callee_syms) {
        std::vector<std::string> iters;
        for (const auto& p : callee->params) {
            const SymbolRecord* pr = callee_syms->find(p);
            if (!pr || pr->extension_rank() == 0) continue;
            for (const auto& n : pr->dd->dom_names)
                if (std::find(iters.begin(), iters.end(), n) == iters.end())
                    iters.push_back(n);
        }
        for (const auto& n : iters) args.push_back(n);
    }
    return "call " + st.name + "(" + join(args) + ")";
}

void render_body(const RoutineCtx& c, const std::vector<Statement>& body, int indent,
                 std::vector<std::string>& out, const BodyHooks& hooks) {
    const std::string pad = ind(indent);
    for (const auto& st : body) {
        switch (st.kind) {
            case StmtKind::Assign:
                out.push_back(pad + render_expr(c, st.e1) + " = " + render_expr(c, st.e2));
                break;
            case StmtKind::PointerAssign:
                out.push_back(pad + render_expr(c, st.e1) + " => " + render_expr(c, st.e2));
                if (hooks.after_pointer_assign) hooks.after_pointer_assign(st, indent, out);
                break;
            case StmtKind::Do: {
                std::string head = pad + "do " + st.name + " = " + render_expr(c, st.e1) +
                                   ", " + render_expr(c, st.e2);
                if (st.e3) head += ", " + render_expr(c, st.e3);
                out.push_back(head);
                render_body(c, st.body, indent + 1, out, hooks);
                out.push_back(pad + "end do");
                break;
            }
            case StmtKind::DoWhile:
                out.push_back(pad + "do while (" + render_expr(c, st.e1) + ")");
                render_body(c, st.body, indent + 1, out, hooks);
                out.push_back(pad + "end do");
                break;
            case StmtKind::If: {
                for (std::size_t arm = 0; arm < st.bodies.size(); ++arm) {
                    if (arm == 0)
                        out.push_back(pad + "if (" + render_expr(c, st.conditions[0]) + ") then");
                    else if (st.conditions[arm])
                        out.push_back(pad + "else if (" + render_expr(c, st.conditions[arm]) +
                                      ") then");
                    else
                        out.push_back(pad + "else");
                    render_body(c, st.bodies[arm], indent + 1, out, hooks);
                }
                out.push_back(pad + "end if");
                break;
            }
            case StmtKind::Call:
                out.push_back(pad + render_call(c, st));
                break;
            case StmtKind::Return:
                if (hooks.before_return) hooks.before_return(indent, out);
                out.push_back(pad + "return");
                break;
            case StmtKind::Exit:
                out.push_back(pad + "exit");
                break;
            case StmtKind::Cycle:
                out.push_back(pad + "cycle");
                break;
            case StmtKind::Print: {
                std::string line = pad + "print *";
                for (const auto& e : st.exprs) line += ", " + render_expr(c, e);
                out.push_back(line);
                break;
            }
            case StmtKind::Comment:
                out.push_back(st.raw.empty() ? pad + "!" : pad + st.raw);
                break;
            case StmtKind::Allocate: {
                std::vector<std::string> items;
                for (const auto& e : st.exprs) {
                    const SymbolRecord* s = c.sym(e->text);
                    std::vector<std::string> dims;
                    for (const auto& a : e->args) dims.push_back(render_expr(c, a));
                    if (s && macro_wrapped(c, *s) && dims.size() >= 2)
                        items.push_back(e->text + "(" + dim_macro(*s, dims.size()) + "(" +
                                        join(dims) + "))");
                    else
                        items.push_back(e->text + "(" + join(dims) + ")");
                }
                out.push_back(pad + "allocate(" + join(items) + ")");
                break;
            }
            case StmtKind::Deallocate: {
                std::vector<std::string> items;
                for (const auto& e : st.exprs) items.push_back(e->text);
                out.push_back(pad + "deallocate(" + join(items) + ")");
                break;
            }
            case StmtKind::Io:
                out.push_back(pad + st.raw);
                break;
            case StmtKind::DataInit: {
                std::vector<std::string> vals;
                for (const auto& e : st.exprs) vals.push_back(print_expression(e));
                out.push_back(pad + "data " + st.name + " /" + join(vals) + "/");
                break;
            }
            case StmtKind::Region:
                if (hooks.region) hooks.region(st, indent, out);
                break;
        }
    }
}

void render_region_loops(RoutineCtx& c, const Statement& region_stmt, int indent,
                         std::vector<std::string>& out, const BodyHooks& hooks,
                         const std::vector<std::string>& inner_directives,
                         const std::string& seq_loop_directive) {
    bool saved = c.in_region;
    c.in_region = true;
    auto bounds = region_bounds(*region_stmt.region);
    int level = indent;
    // last directive domain outermost
    for (std::size_t k = 0; k < bounds.size(); ++k) {
        const DomainBounds& d = bounds[bounds.size() - 1 - k];
        if (k < inner_directives.size() && !inner_directives[k].empty())
            out.push_back(ind(level) + inner_directives[k]);
        out.push_back(ind(level) + "do " + d.iterator + " = " + render_expr(c, d.start) +
                      ", " + render_expr(c, d.end));
        ++level;
    }
    if (seq_loop_directive.empty()) {
        render_body(c, region_stmt.body, level, out, hooks);
    } else {
        std::vector<Statement> one;
        for (const auto& st : region_stmt.body) {
            if (st.kind == StmtKind::Do) out.push_back(ind(level) + seq_loop_directive);
            one.assign(1, st);
            render_body(c, one, level, out, hooks);
        }
    }
    for (std::size_t k = 0; k < bounds.size(); ++k) {
        --level;
        out.push_back(ind(level) + "end do");
    }
    c.in_region = saved;
}

void render_region_unlooped(RoutineCtx& c, const Statement& region_stmt, int indent,
                            std::vector<std::string>& out, const BodyHooks& hooks) {
    render_body(c, region_stmt.body, indent, out, hooks);
}

//------------------------------------------------------------------------------
// Body scans
//------------------------------------------------------------------------------

std::vector<std::string> arrays_used(const RoutineCtx& c,
                                     const std::vector<Statement>& body) {
    std::vector<std::string> order;
    std::set<std::string> seen;
    auto visit = [&](const Expr& e) {
        if (e.kind != ExprKind::Name && e.kind != ExprKind::Ref) return;
        const SymbolRecord* s = c.sym(e.text);
        if (!s) return;
        bool array = s->is_array() || (c.e->gpu_model && s->extension_rank() > 0);
        if (array && seen.insert(e.text).second) order.push_back(e.text);
    };
    walk_statements(body, [&](const Statement& st) {
        for (const auto& e : statement_exprs(st))
            walk_expr(e, visit);
    });
    return order;
}

std::vector<std::string> synthesized_iterators(const RoutineCtx& c) {
    std::vector<std::string> order;
    std::set<std::string> seen;
    for (const auto& spec : c.r->regions) {
        if (!spec->applies_to(c.e->arch)) continue;
        for (const auto& d : spec->domains) {
            const SymbolRecord* s = c.sym(d.name);
            if (s && s->decl) continue; // user-declared integer
            if (seen.insert(d.name).second) order.push_back(d.name);
        }
    }
    return order;
}

//------------------------------------------------------------------------------
// Transfers
//------------------------------------------------------------------------------

std::vector<TransferSymbol> transfer_plan(const RoutineCtx& c, Diagnostics& diags) {
    std::vector<TransferSymbol> plan;
    if (c.color == RoutineColor::Unaffected) return plan;
    for (const auto& dd : c.r->domain_dependants) {
        if (dd.present || dd.host) continue;
        for (const auto& name : dd.symbols) {
            const SymbolRecord* s = c.sym(name);
            if (!s || !s->dd) continue;
            Intent intent = s->decl ? s->decl->intent : Intent::None;
            if (!dd.transfer_here) {
                if (c.color != RoutineColor::Kernel) continue;
                if (intent == Intent::None) {
                    diags.error(dd.ref, "untracked device state for '" + name +
                                            "': no intent and neither present, "
                                            "transferHere nor host is specified");
                    continue;
                }
            }
            TransferSymbol t;
            t.name = name;
            t.rec = s;
            t.copy_in = intent == Intent::In || intent == Intent::InOut ||
                        intent == Intent::None;
            t.copy_out = intent == Intent::Out || intent == Intent::InOut ||
                         intent == Intent::None;
            t.zero_init = intent == Intent::Out;
            plan.push_back(t);
        }
    }
    return plan;
}

void check_reductions(const RoutineCtx& c, const Statement& region_stmt, Diagnostics& diags) {
    (void)c;
    for (const auto& [op, name] : region_stmt.region->reductions) {
        bool assigned = false;
        walk_statements(region_stmt.body, [&](const Statement& st) {
            if (st.kind == StmtKind::Assign && st.e1->kind == ExprKind::Name &&
                st.e1->text == name)
                assigned = true;
        });
        (void)op;
        if (!assigned)
            diags.error(region_stmt.region->ref,
                        "reduction symbol '" + name + "' is never assigned in the region");
    }
}

std::string reduction_clause(const ParallelRegionSpec& spec) {
    std::string s;
    for (const auto& [op, name] : spec.reductions) s += " reduction(" + op + ":" + name + ")";
    return s;
}

//------------------------------------------------------------------------------
// Storage-order header
//------------------------------------------------------------------------------

std::vector<MacroAlias> collect_aliases(const Program& prog, Diagnostics& diags) {
    std::vector<MacroAlias> out;
    auto add = [&](const std::string& name, int arity, bool dom, const SourceRef& ref) {
        if (name.empty()) return;
        for (const auto& a : out) {
            if (a.name == name) {
                if (a.arity != arity)
                    diags.error(ref, "macro '" + name + "' is used with both " +
                                         std::to_string(a.arity) + " and " +
                                         std::to_string(arity) + " domains");
                return;
            }
        }
        out.push_back({name, arity, dom});
    };
    for (const auto& m : prog.modules)
        for (const auto& r : m.routines)
            for (const auto& dd : r.domain_dependants) {
                int arity = static_cast<int>(dd.dom_sizes.size());
                add(dd.acc_pp, arity, false, dd.ref);
                add(dd.dom_pp, arity, true, dd.ref);
            }
    return out;
}

} // namespace hft::emit

namespace hft {

using emit::ind;

std::vector<MacroAlias> collect_macro_aliases(const ast::Program& prog, Diagnostics& diags) {
    return emit::collect_aliases(prog, diags);
}

namespace {

// formal parameter letters: AT(i, j, k), AT4(i, j, k, l), ...
std::string macro_formals(int rank) {
    static const char* names[] = {"i", "j", "k", "l", "m", "n", "o"};
    std::string s;
    for (int d = 0; d < rank; ++d) {
        if (d) s += ", ";
        s += names[d];
    }
    return s;
}

std::string macro_body(int rank, const std::vector<int>& order) {
    static const char* names[] = {"i", "j", "k", "l", "m", "n", "o"};
    std::string s;
    for (int d = 0; d < rank; ++d) {
        if (d) s += ", ";
        s += names[order[static_cast<std::size_t>(d)] - 1];
    }
    return s;
}

void emit_family(const BuildConfig& cfg, ast::Arch arch, std::vector<std::string>& out) {
    for (int rank = 1; rank <= 7; ++rank) {
        std::string at = rank == 3 ? "AT" : "AT" + std::to_string(rank);
        std::vector<int> order = cfg.storage_order(arch, rank);
        out.push_back("#define " + at + "(" + macro_formals(rank) + ") " +
                      macro_body(rank, order));
    }
    for (int rank = 1; rank <= 7; ++rank) {
        std::string dom = rank == 3 ? "DOM" : "DOM" + std::to_string(rank);
        std::vector<int> order = cfg.storage_order(arch, rank);
        out.push_back("#define " + dom + "(" + macro_formals(rank) + ") " +
                      macro_body(rank, order));
    }
}

} // namespace

EmittedUnit emit_storage_macros(const BuildConfig& cfg, const std::vector<MacroAlias>& aliases,
                                Diagnostics& diags) {
    (void)diags; // permutations were validated while parsing the configuration
    std::vector<std::string> out;
    out.push_back("! storage_order.F90");
    out.push_back("! Architecture dependent array index order. Every generated source is");
    out.push_back("! compiled with this header prepended; GPU targets define GPU.");
    out.push_back("#if (GPU)");
    emit_family(cfg, ast::Arch::Gpu, out);
    out.push_back("#else");
    emit_family(cfg, ast::Arch::Cpu, out);
    out.push_back("#endif");
    if (!aliases.empty()) {
        out.push_back("! directive-named storage macros alias the default families");
        for (const auto& a : aliases) {
            std::string target = a.dom ? (a.arity == 3 ? "DOM" : "DOM" + std::to_string(a.arity))
                                       : (a.arity == 3 ? "AT" : "AT" + std::to_string(a.arity));
            out.push_back("#define " + a.name + "(" + macro_formals(a.arity) + ") " + target +
                          "(" + macro_formals(a.arity) + ")");
        }
    }
    std::string text;
    for (const auto& l : out) text += l + "\n";
    return {"storage_order.F90", text};
}

//------------------------------------------------------------------------------
// Targets and the per-source driver
//------------------------------------------------------------------------------

bool is_known_target(const std::string& target) {
    return target == "cpu-openmp" || target == "cpu-openacc" || target == "gpu-cuda" ||
           target == "gpu-openacc" || target == "plain";
}

ast::Arch target_arch(const std::string& target) {
    return target.rfind("gpu-", 0) == 0 ? ast::Arch::Gpu : ast::Arch::Cpu;
}

std::string resolve_target(const std::string& requested, const BuildConfig& cfg,
                           Diagnostics& diags) {
    if (requested == "cpu") return "cpu-" + cfg.backend_cpu;
    if (requested == "gpu") return "gpu-" + cfg.backend_gpu;
    if (is_known_target(requested)) return requested;
    diags.error(SourceRef{}, "unknown target '" + requested +
                                 "' (expected cpu-openmp, cpu-openacc, gpu-cuda, "
                                 "gpu-openacc, plain, or the cpu/gpu aliases)");
    return {};
}

namespace {

std::string default_backend(const std::string& target) {
    if (target == "plain") return "plain";
    return target.substr(target.find('-') + 1);
}

// @scheme names select a backend per routine; normalize the paper spellings.
std::string normalize_scheme(const std::string& raw) {
    std::string s;
    for (char ch : raw) s += static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    if (s == "cuda-fortran" || s == "cuda_fortran") return "cuda";
    if (s == "plain-fortran" || s == "plain_fortran" || s == "fortran") return "plain";
    return s;
}

} // namespace

EmittedUnit emit_source(const std::string& stem,
                        const std::vector<const ast::ModuleDecl*>& modules,
                        const ast::Program& prog, const ProgramInfo& info,
                        const BuildConfig& cfg, const std::string& target,
                        Diagnostics& diags) {
    emit::EmitCtx e;
    e.prog = &prog;
    e.info = &info;
    e.cfg = &cfg;
    e.target = target;
    e.backend = default_backend(target);
    e.arch = target_arch(target);
    e.gpu_model = e.arch == ast::Arch::Gpu;
    e.use_macros = target != "plain";
    e.diags = &diags;

    std::vector<std::string> out;
    out.push_back("! " + stem + "." + target + ".f90");
    out.push_back("! Generated code; edit the annotated sources instead.");
    for (const ast::ModuleDecl* m : modules) {
        out.push_back("");
        out.push_back("module " + m->name);
        for (const auto& u : m->uses) {
            std::string line = ind(1) + "use " + u.module;
            if (!u.only.empty()) {
                line += ", only: ";
                for (std::size_t i = 0; i < u.only.size(); ++i) {
                    if (i) line += ", ";
                    line += u.only[i];
                }
            }
            out.push_back(line);
        }
        if (m->implicit_none) out.push_back(ind(1) + "implicit none");
        for (const auto& cstmt : m->spec_comments) out.push_back(ind(1) + cstmt.raw);
        for (const auto& s : m->specs) out.push_back(ind(1) + print_symbol_spec(s));
        for (const auto& s : m->specs)
            if (s.data_init)
                out.push_back(ind(1) + "data " + s.name + " /" + print_expression(s.init) + "/");
        if (!m->routines.empty()) out.push_back("");
        if (!m->routines.empty()) out.push_back("contains");
        for (const auto& r : m->routines) {
            out.push_back("");
            emit::RoutineCtx c;
            c.e = &e;
            c.mod = m;
            c.r = &r;
            auto sit = info.symbols.find(r.name);
            c.syms = sit == info.symbols.end() ? nullptr : &sit->second;
            const auto& colors = e.arch == ast::Arch::Gpu ? info.color_gpu : info.color_cpu;
            auto cit = colors.find(r.name);
            c.color = cit == colors.end() ? RoutineColor::Unaffected : cit->second;

            std::string backend = e.backend;
            if (!r.scheme.empty() && target != "plain") {
                std::string s = normalize_scheme(r.scheme);
                bool cpu_ok = s == "openmp" || s == "openacc" || s == "plain";
                bool gpu_ok = s == "cuda" || s == "openacc";
                bool ok = e.arch == ast::Arch::Cpu ? cpu_ok : gpu_ok;
                if (s != "openmp" && s != "openacc" && s != "cuda" && s != "plain") {
                    diags.error(r.ref, "scheme '" + r.scheme +
                                           "' does not name a registered backend");
                } else if (!ok) {
                    diags.error(r.ref, "scheme '" + r.scheme + "' is not available for the " +
                                           (e.arch == ast::Arch::Cpu ? "cpu" : "gpu") +
                                           " architecture");
                } else {
                    backend = s;
                }
            }

            if (e.arch == ast::Arch::Gpu && backend == "cuda")
                emit::emit_routine_cuda(c, out);
            else if (backend == "openacc")
                emit::emit_routine_acc(c, out);
            else
                emit::emit_routine_cpu(c, out, backend == "openmp");
        }
        out.push_back("end module " + m->name);
    }

    std::string text;
    for (const auto& l : out) text += l + "\n";
    return {stem + "." + target + ".f90", text};
}

} // namespace hft
