//------------------------------------------------------------------------------
// emit_cuda.cpp
// CUDA Fortran backend: kernel extraction, host wrappers with device mirrors
// and transfers, device routines, call rewriting
//
// SPDX-License-Identifier: Apache-2.0
//------------------------------------------------------------------------------
#include "emit_internal.hpp"

#include <algorithm>
#include <map>

#include "hft/printer.hpp"

namespace hft::emit {

using namespace ast;

namespace {

std::string join(const std::vector<std::string>& items) {
    std::string s;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) s += ", ";
        s += items[i];
    }
    return s;
}

std::set<std::string> assigned_scalars(const std::vector<Statement>& body) {
    std::set<std::string> names;
    walk_statements(body, [&](const Statement& st) {
        if (st.kind == StmtKind::Assign && st.e1->kind == ExprKind::Name)
            names.insert(st.e1->text);
        if (st.kind == StmtKind::Do) names.insert(st.name);
    });
    return names;
}

std::string base_type_text(const SymbolRecord* s) {
    if (!s || !s->decl) return "integer(4)";
    switch (s->decl->type) {
        case BaseType::Real8: return "real(8)";
        case BaseType::Integer4: return "integer(4)";
        case BaseType::Dim3: return "type(dim3)";
    }
    return "real(8)";
}

// `real(8), device :: name(DOM(0 : nx + 1, 0 : ny + 1, nz))`
std::string device_array_decl(const RoutineCtx& c, const SymbolRecord& s,
                              const std::string& name) {
    std::vector<DimSpec> dims = full_dims(c, s);
    RoutineCtx plain = c;
    plain.in_region = false;
    std::vector<std::string> parts;
    for (const auto& d : dims) {
        if (d.deferred)
            parts.push_back(":");
        else if (d.lower)
            parts.push_back(render_expr(plain, d.lower) + " : " + render_expr(plain, d.upper));
        else
            parts.push_back(render_expr(plain, d.upper));
    }
    std::string dim_list = join(parts);
    if (macro_wrapped(c, s) && dims.size() >= 2)
        dim_list = dim_macro(s, dims.size()) + "(" + dim_list + ")";
    return base_type_text(&s) + ", device :: " + name + "(" + dim_list + ")";
}

struct KernelPlan {
    std::string name;
    const Statement* region_stmt = nullptr;
    std::vector<std::string> value_params;
    std::vector<std::string> array_params;
    std::vector<std::string> locals;      // assigned scalars, re-declared
    std::vector<std::string> constants;   // named constants, re-declared with init
    std::vector<std::string> iterators;   // region domain iterators
};

KernelPlan plan_kernel(const RoutineCtx& c, const Statement& region_stmt, int index,
                       Diagnostics& diags) {
    KernelPlan p;
    p.name = "hfk" + std::to_string(index) + "_" + c.r->name;
    p.region_stmt = &region_stmt;
    const ParallelRegionSpec& spec = *region_stmt.region;

    if (spec.domains.size() > 3)
        diags.error(spec.ref, "more than three parallel domains cannot be mapped onto a "
                              "kernel launch");
    if (!spec.reductions.empty())
        diags.error(spec.ref, "reduction is only supported with the OpenACC- and OpenMP "
                              "backends");

    std::set<std::string> iter_set;
    for (const auto& d : spec.domains) {
        p.iterators.push_back(d.name);
        iter_set.insert(d.name);
    }

    p.array_params = arrays_used(c, region_stmt.body);
    // Extended symbols must be addressed by this region's iterators.
    for (const auto& a : p.array_params) {
        const SymbolRecord* s = c.sym(a);
        if (!s || s->extension_rank() == 0) continue;
        for (const auto& n : s->dd->dom_names)
            if (!iter_set.count(n))
                diags.error(s->dd->ref, "domain '" + n + "' of '" + a +
                                            "' is not an iterator of the enclosing "
                                            "parallel region");
    }

    std::vector<std::string> scalars;
    std::set<std::string> seen;
    auto add_scalar = [&](const std::string& n) {
        if (iter_set.count(n) || seen.count(n)) return;
        const SymbolRecord* s = c.sym(n);
        if (!s) return;
        if (s->is_array() || (c.e->gpu_model && s->extension_rank() > 0)) return;
        seen.insert(n);
        scalars.push_back(n);
    };
    auto collect = [&](const ExprPtr& e) {
        if (!e) return;
        walk_expr(e, [&](const Expr& x) {
            if (x.kind == ExprKind::Name || x.kind == ExprKind::Ref) add_scalar(x.text);
        });
    };
    for (const auto& d : spec.domains) {
        collect(d.start);
        collect(d.end);
    }
    for (const auto& a : p.array_params) {
        const SymbolRecord* s = c.sym(a);
        if (!s) continue;
        for (const auto& d : full_dims(c, *s)) {
            collect(d.lower);
            collect(d.upper);
        }
    }
    walk_statements(region_stmt.body, [&](const Statement& st) {
        if (st.kind == StmtKind::Do) add_scalar(st.name);
        for (const auto& e : statement_exprs(st)) collect(e);
    });

    std::set<std::string> assigned = assigned_scalars(region_stmt.body);
    for (const auto& n : scalars) {
        const SymbolRecord* s = c.sym(n);
        if (s && s->decl && s->decl->parameter)
            p.constants.push_back(n);
        else if (assigned.count(n))
            p.locals.push_back(n);
        else
            p.value_params.push_back(n);
    }
    return p;
}

void emit_kernel(RoutineCtx& c, const KernelPlan& p, std::vector<std::string>& out) {
    const ParallelRegionSpec& spec = *p.region_stmt->region;
    std::vector<std::string> params = p.value_params;
    params.insert(params.end(), p.array_params.begin(), p.array_params.end());
    out.push_back(ind(1) + "attributes(global) subroutine " + p.name + "(" + join(params) +
                  ")");
    out.push_back(ind(2) + "implicit none");
    for (const auto& n : p.value_params)
        out.push_back(ind(2) + base_type_text(c.sym(n)) + ", value :: " + n);
    for (const auto& n : p.array_params)
        out.push_back(ind(2) + device_array_decl(c, *c.sym(n), n));
    for (const auto& n : p.iterators) out.push_back(ind(2) + "integer(4) :: " + n);
    for (const auto& n : p.locals) {
        const SymbolRecord* s = c.sym(n);
        if (s && s->decl) {
            SymbolSpec copy = *s->decl;
            copy.intent = Intent::None;
            copy.value = false;
            out.push_back(ind(2) + print_symbol_spec(copy));
        } else {
            out.push_back(ind(2) + "integer(4) :: " + n);
        }
    }
    for (const auto& n : p.constants) {
        const SymbolRecord* s = c.sym(n);
        out.push_back(ind(2) + print_symbol_spec(*s->decl));
    }

    static const char* axes[] = {"x", "y", "z"};
    auto bounds = region_bounds(spec);
    for (std::size_t k = 0; k < bounds.size() && k < 3; ++k) {
        ExprPtr base = make_binary(
            "+",
            make_binary("*",
                        make_paren(make_binary("-", make_member(make_name("blockidx"), axes[k]),
                                               make_int(1))),
                        make_member(make_name("blockdim"), axes[k])),
            make_member(make_name("threadidx"), axes[k]));
        ExprPtr rhs = plus_offset(base, bounds[k].start);
        out.push_back(ind(2) + bounds[k].iterator + " = " + print_expression(rhs));
    }
    ExprPtr guard;
    for (const auto& b : bounds) {
        ExprPtr cond = make_binary(".gt.", make_name(b.iterator), clone(b.end));
        guard = guard ? make_binary(".or.", guard, cond) : cond;
    }
    out.push_back(ind(2) + "if (" + print_expression(guard) + ") then");
    out.push_back(ind(3) + "return");
    out.push_back(ind(2) + "end if");

    bool saved = c.in_region;
    c.in_region = true;
    render_body(c, p.region_stmt->body, 2, out, BodyHooks{});
    c.in_region = saved;
    out.push_back(ind(1) + "end subroutine " + p.name);
}

void emit_spec_intro(const RoutineCtx& c, std::vector<std::string>& out) {
    for (const auto& u : c.r->uses) {
        std::string line = ind(2) + "use " + u.module;
        if (!u.only.empty()) {
            line += ", only: ";
            for (std::size_t i = 0; i < u.only.size(); ++i) {
                if (i) line += ", ";
                line += u.only[i];
            }
        }
        out.push_back(line);
    }
    if (c.r->implicit_none) out.push_back(ind(2) + "implicit none");
    for (const auto& cm : c.r->spec_comments) out.push_back(ind(2) + cm.raw);
}

std::string colon_list(std::size_t rank) {
    std::string s;
    for (std::size_t i = 0; i < rank; ++i) {
        if (i) s += ", ";
        s += ":";
    }
    return s;
}

std::string extent_guard(const RoutineCtx& c, const std::vector<DimSpec>& dims) {
    ExprPtr conj;
    for (const auto& d : dims) {
        ExprPtr cond = dim_extent_positive(d);
        if (!cond) continue;
        conj = conj ? make_binary(".and.", conj, cond) : cond;
    }
    (void)c;
    return conj ? print_expression(conj) : "";
}

void emit_entry_transfers(const RoutineCtx& c, const std::vector<TransferSymbol>& plan,
                          std::vector<std::string>& out) {
    for (const auto& t : plan) {
        if (!(t.rec->decl && t.rec->decl->pointer)) continue;
        std::vector<DimSpec> dims = full_dims(c, *t.rec);
        RoutineCtx plain = c;
        plain.in_region = false;
        std::vector<std::string> parts;
        for (const auto& d : dims) {
            if (d.lower)
                parts.push_back(render_expr(plain, d.lower) + " : " +
                                render_expr(plain, d.upper));
            else
                parts.push_back(render_expr(plain, d.upper));
        }
        std::string dim_list = join(parts);
        if (macro_wrapped(c, *t.rec) && dims.size() >= 2)
            dim_list = dim_macro(*t.rec, dims.size()) + "(" + dim_list + ")";
        out.push_back(ind(2) + "allocate(" + c.mirror.at(t.name) + "(" + dim_list + "))");
    }
    for (const auto& t : plan) {
        std::vector<DimSpec> dims = full_dims(c, *t.rec);
        std::string colons = colon_list(dims.size());
        const std::string mirror = c.mirror.at(t.name);
        if (t.zero_init) out.push_back(ind(2) + mirror + "(" + colons + ") = 0");
        if (t.copy_in) {
            std::string guard = extent_guard(c, dims);
            out.push_back(ind(2) + "if (" + guard + ") then");
            out.push_back(ind(3) + mirror + "(" + colons + ") = " + t.name + "(" + colons +
                          ")");
            out.push_back(ind(2) + "end if");
        }
    }
}

void emit_exit_transfers(const RoutineCtx& c, const std::vector<TransferSymbol>& plan,
                         int indent, std::vector<std::string>& out) {
    for (const auto& t : plan) {
        if (!t.copy_out) continue;
        std::vector<DimSpec> dims = full_dims(c, *t.rec);
        std::string colons = colon_list(dims.size());
        const std::string mirror = c.mirror.at(t.name);
        std::string guard = extent_guard(c, dims);
        out.push_back(ind(indent) + "if (" + guard + ") then");
        out.push_back(ind(indent + 1) + t.name + "(" + colons + ") = " + mirror + "(" +
                      colons + ")");
        out.push_back(ind(indent) + "end if");
    }
    std::vector<std::string> pointer_mirrors;
    for (const auto& t : plan)
        if (t.rec->decl && t.rec->decl->pointer) pointer_mirrors.push_back(c.mirror.at(t.name));
    if (!pointer_mirrors.empty())
        out.push_back(ind(indent) + "deallocate(" + join(pointer_mirrors) + ")");
}

void emit_launch(const RoutineCtx& c, const KernelPlan& p, int indent,
                 std::vector<std::string>& out) {
    const ParallelRegionSpec& spec = *p.region_stmt->region;
    auto bounds = region_bounds(spec);
    std::array<int, 3> block = c.e->cfg->block_for(spec.template_name);
    static const char* axes[] = {"X", "Y", "Z"};
    for (std::size_t k = 0; k < 3; ++k) {
        if (k < bounds.size()) {
            ExprPtr extent = domain_extent(bounds[k]);
            out.push_back(ind(indent) + "cugridSize" + axes[k] + " = ceiling(real(" +
                          print_expression(extent) + ") / real(" +
                          std::to_string(block[k]) + "))");
        } else {
            out.push_back(ind(indent) + "cugridSize" + axes[k] + " = 1");
        }
    }
    out.push_back(ind(indent) + "cugrid = dim3(cugridSizeX, cugridSizeY, cugridSizeZ)");
    out.push_back(ind(indent) + "cublock = dim3(" + std::to_string(block[0]) + ", " +
                  std::to_string(block[1]) + ", " + std::to_string(block[2]) + ")");
    std::vector<std::string> args = p.value_params;
    for (const auto& a : p.array_params) {
        auto m = c.mirror.find(a);
        args.push_back(m != c.mirror.end() ? m->second : a);
    }
    out.push_back(ind(indent) + "call " + p.name + " <<< cugrid, cublock >>>(" + join(args) +
                  ")");
    out.push_back(ind(indent) + "! ... error handling code ...");
}

void emit_device_routine(RoutineCtx& c, std::vector<std::string>& out) {
    // iterators the extended dummies are addressed by, passed in by the kernel
    std::vector<std::string> iters;
    for (const auto& pname : c.r->params) {
        const SymbolRecord* s = c.sym(pname);
        if (!s || s->extension_rank() == 0) continue;
        for (const auto& n : s->dd->dom_names)
            if (std::find(iters.begin(), iters.end(), n) == iters.end()) iters.push_back(n);
    }
    std::vector<std::string> params = c.r->params;
    params.insert(params.end(), iters.begin(), iters.end());
    out.push_back(ind(1) + "attributes(device) subroutine " + c.r->name + "(" + join(params) +
                  ")");
    emit_spec_intro(c, out);
    for (const auto& s : c.r->specs) {
        const SymbolRecord* rec = c.sym(s.name);
        if (rec && rec->dd && (rec->is_array() || rec->extension_rank() > 0)) {
            SymbolSpec copy = s;
            copy.dims = full_dims(c, *rec);
            out.push_back(ind(2) + render_spec(c, copy, "device"));
        } else {
            out.push_back(ind(2) + render_spec(c, s));
        }
    }
    for (const auto& n : iters) out.push_back(ind(2) + "integer(4), value :: " + n);

    BodyHooks hooks;
    hooks.region = [&](const Statement& st, int indent, std::vector<std::string>& lines) {
        render_region_unlooped(c, st, indent, lines, hooks);
    };
    bool saved = c.in_region;
    c.in_region = true;
    render_body(c, c.r->body, 2, out, hooks);
    c.in_region = saved;
    out.push_back(ind(1) + "end subroutine " + c.r->name);
}

} // namespace

void emit_routine_cuda(RoutineCtx& c, std::vector<std::string>& out) {
    if (c.color == RoutineColor::InsideKernel) {
        emit_device_routine(c, out);
        return;
    }

    // Extract one kernel per GPU-applicable region, emitted ahead of the host
    // routine; numbering follows region order within the routine.
    std::map<const Statement*, KernelPlan> plans;
    if (c.color == RoutineColor::Kernel) {
        int index = 0;
        for (const auto& st : c.r->body) {
            if (st.kind != StmtKind::Region) continue;
            if (st.region->applies_to(Arch::Gpu)) {
                KernelPlan p = plan_kernel(c, st, index, *c.e->diags);
                emit_kernel(c, p, out);
                out.push_back("");
                plans.emplace(&st, std::move(p));
            }
            ++index;
        }
    }

    std::vector<TransferSymbol> plan = transfer_plan(c, *c.e->diags);
    for (const auto& t : plan) c.mirror[t.name] = t.name + "_hfdev";

    // Pointer targets swapped against mirrored symbols need device mirrors of
    // their own so rebinds track on both sides.
    std::set<std::string> synthesized;
    bool grew = true;
    while (grew) {
        grew = false;
        walk_statements(c.r->body, [&](const Statement& st) {
            if (st.kind != StmtKind::PointerAssign) return;
            if (st.e1->kind != ExprKind::Name || st.e2->kind != ExprKind::Name) return;
            const std::string& l = st.e1->text;
            const std::string& r = st.e2->text;
            bool lm = c.mirror.count(l) != 0;
            bool rm = c.mirror.count(r) != 0;
            if (lm == rm) return;
            const std::string& missing = lm ? r : l;
            const SymbolRecord* s = c.sym(missing);
            if (!s || !s->decl || !s->decl->pointer) return;
            c.mirror[missing] = missing + "_hfdev";
            synthesized.insert(missing);
            grew = true;
        });
    }

    out.push_back(ind(1) + "subroutine " + c.r->name + "(" + join(c.r->params) + ")");
    emit_spec_intro(c, out);
    for (const auto& s : c.r->specs) {
        const SymbolRecord* rec = c.sym(s.name);
        if (rec && rec->dd && rec->dd->present &&
            (rec->is_array() || rec->extension_rank() > 0)) {
            SymbolSpec copy = s;
            copy.dims = full_dims(c, *rec);
            out.push_back(ind(2) + render_spec(c, copy, "device"));
            continue;
        }
        out.push_back(ind(2) + render_spec(c, s));
        if (s.data_init)
            out.push_back(ind(2) + "data " + s.name + " /" + print_expression(s.init) + "/");
    }
    for (const auto& t : plan) {
        if (t.rec->decl && t.rec->decl->pointer) {
            std::vector<DimSpec> dims = full_dims(c, *t.rec);
            out.push_back(ind(2) + base_type_text(t.rec) + ", device, pointer :: " +
                          c.mirror.at(t.name) + "(" + colon_list(dims.size()) + ")");
        } else {
            out.push_back(ind(2) + device_array_decl(c, *t.rec, c.mirror.at(t.name)));
        }
    }
    for (const auto& n : synthesized) {
        const SymbolRecord* s = c.sym(n);
        std::size_t rank = s->decl ? s->decl->dims.size() : 0;
        out.push_back(ind(2) + base_type_text(s) + ", device, pointer :: " + c.mirror.at(n) +
                      "(" + colon_list(rank) + ")");
    }
    if (!plans.empty()) {
        out.push_back(ind(2) + "integer(4) :: cugridSizeX");
        out.push_back(ind(2) + "integer(4) :: cugridSizeY");
        out.push_back(ind(2) + "integer(4) :: cugridSizeZ");
        out.push_back(ind(2) + "type(dim3) :: cugrid");
        out.push_back(ind(2) + "type(dim3) :: cublock");
    }

    emit_entry_transfers(c, plan, out);

    BodyHooks hooks;
    hooks.region = [&](const Statement& st, int indent, std::vector<std::string>& lines) {
        auto p = plans.find(&st);
        if (p != plans.end())
            emit_launch(c, p->second, indent, lines);
        else
            render_region_unlooped(c, st, indent, lines, hooks);
    };
    hooks.before_return = [&](int indent, std::vector<std::string>& lines) {
        emit_exit_transfers(c, plan, indent, lines);
    };
    hooks.after_pointer_assign = [&](const Statement& st, int indent,
                                     std::vector<std::string>& lines) {
        if (st.e1->kind != ExprKind::Name || st.e2->kind != ExprKind::Name) return;
        auto l = c.mirror.find(st.e1->text);
        auto r = c.mirror.find(st.e2->text);
        if (l != c.mirror.end() && r != c.mirror.end())
            lines.push_back(ind(indent) + l->second + " => " + r->second);
    };
    render_body(c, c.r->body, 2, out, hooks);
    if (c.r->body.empty() || c.r->body.back().kind != StmtKind::Return)
        emit_exit_transfers(c, plan, 2, out);
    out.push_back(ind(1) + "end subroutine " + c.r->name);
}

} // namespace hft::emit
