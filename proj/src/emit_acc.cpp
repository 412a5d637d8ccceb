//------------------------------------------------------------------------------
// emit_acc.cpp
// OpenACC backend: gang/vector loop directives, structured device data
// regions on GPU, sequential routine marking
//
// SPDX-License-Identifier: Apache-2.0
//------------------------------------------------------------------------------
#include "emit_internal.hpp"

#include <algorithm>

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

void emit_enter_data(const RoutineCtx& c, const std::vector<TransferSymbol>& plan,
                     std::vector<std::string>& out) {
    (void)c;
    std::vector<std::string> copyin, create;
    for (const auto& t : plan)
        (t.copy_in ? copyin : create).push_back(t.name);
    if (copyin.empty() && create.empty()) return;
    std::string line = ind(2) + "!$acc enter data";
    if (!copyin.empty()) line += " copyin(" + join(copyin) + ")";
    if (!create.empty()) line += " create(" + join(create) + ")";
    out.push_back(line);
}

void emit_exit_data(const RoutineCtx& c, const std::vector<TransferSymbol>& plan, int indent,
                    std::vector<std::string>& out) {
    (void)c;
    std::vector<std::string> copyout, del;
    for (const auto& t : plan)
        (t.copy_out ? copyout : del).push_back(t.name);
    if (copyout.empty() && del.empty()) return;
    std::string line = ind(indent) + "!$acc exit data";
    if (!copyout.empty()) line += " copyout(" + join(copyout) + ")";
    if (!del.empty()) line += " delete(" + join(del) + ")";
    out.push_back(line);
}

} // namespace

void emit_routine_acc(RoutineCtx& c, std::vector<std::string>& out) {
    const bool gpu = c.e->arch == Arch::Gpu;
    const bool inside = gpu && c.color == RoutineColor::InsideKernel;

    // Sequential device routines receive the parallel-domain iterators of
    // their extended dummies from the caller.
    std::vector<std::string> iters;
    if (inside) {
        for (const auto& pname : c.r->params) {
            const SymbolRecord* s = c.sym(pname);
            if (!s || s->extension_rank() == 0) continue;
            for (const auto& n : s->dd->dom_names)
                if (std::find(iters.begin(), iters.end(), n) == iters.end())
                    iters.push_back(n);
        }
    }
    std::vector<std::string> params = c.r->params;
    params.insert(params.end(), iters.begin(), iters.end());
    out.push_back(ind(1) + "subroutine " + c.r->name + "(" + join(params) + ")");
    if (inside) out.push_back(ind(2) + "!$acc routine seq");
    emit_spec_intro(c, out);
    for (const auto& s : c.r->specs) {
        const SymbolRecord* rec = c.sym(s.name);
        if (gpu && rec && rec->extension_rank() > 0) {
            SymbolSpec copy = s;
            copy.dims = full_dims(c, *rec);
            out.push_back(ind(2) + render_spec(c, copy));
        } else {
            out.push_back(ind(2) + render_spec(c, s));
        }
        if (s.data_init)
            out.push_back(ind(2) + "data " + s.name + " /" + print_expression(s.init) + "/");
    }
    for (const auto& n : iters) out.push_back(ind(2) + "integer(4), value :: " + n);
    for (const auto& it : synthesized_iterators(c))
        out.push_back(ind(2) + "integer(4) :: " + it);

    std::vector<TransferSymbol> plan;
    if (gpu && !inside) plan = transfer_plan(c, *c.e->diags);
    emit_enter_data(c, plan, out);

    BodyHooks hooks;
    hooks.region = [&](const Statement& st, int indent, std::vector<std::string>& lines) {
        if (!st.region->applies_to(c.e->arch)) {
            render_region_unlooped(c, st, indent, lines, hooks);
            return;
        }
        check_reductions(c, st, *c.e->diags);
        const ParallelRegionSpec& spec = *st.region;
        std::array<int, 3> block = c.e->cfg->block_for(spec.template_name);
        std::size_t n = spec.domains.size();
        std::string vector_clause = " vector(" + std::to_string(block[0]) + ")";
        std::string head = "!$acc parallel loop gang";
        if (n == 1) head += vector_clause;
        if (gpu) {
            std::vector<std::string> present;
            for (const auto& a : arrays_used(c, st.body)) {
                const SymbolRecord* s = c.sym(a);
                if (s && s->dd && s->dd->present) present.push_back(a);
            }
            if (!present.empty()) head += " present(" + join(present) + ")";
        }
        head += reduction_clause(spec);
        std::vector<std::string> inner(n);
        inner[0] = head;
        for (std::size_t k = 1; k < n; ++k)
            inner[k] = k + 1 == n ? "!$acc loop" + vector_clause : "!$acc loop";
        render_region_loops(c, st, indent, lines, hooks, inner, "!$acc loop seq");
        lines.push_back(ind(indent) + "!$acc end parallel");
    };
    hooks.before_return = [&](int indent, std::vector<std::string>& lines) {
        emit_exit_data(c, plan, indent, lines);
    };

    bool saved = c.in_region;
    if (inside) c.in_region = true;
    render_body(c, c.r->body, 2, out, hooks);
    c.in_region = saved;
    if (c.r->body.empty() || c.r->body.back().kind != StmtKind::Return)
        emit_exit_data(c, plan, 2, out);
    out.push_back(ind(1) + "end subroutine " + c.r->name);
}

} // namespace hft::emit
