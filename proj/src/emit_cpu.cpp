//------------------------------------------------------------------------------
// emit_cpu.cpp
// CPU backends: OpenMP loop parallelization and the plain (directive-erased)
// form
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

void emit_spec_part(const RoutineCtx& c, std::vector<std::string>& out) {
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
    for (const auto& s : c.r->specs) {
        out.push_back(ind(2) + render_spec(c, s));
        if (s.data_init)
            out.push_back(ind(2) + "data " + s.name + " /" + print_expression(s.init) + "/");
    }
    for (const auto& it : synthesized_iterators(c))
        out.push_back(ind(2) + "integer(4) :: " + it);
}

} // namespace

void emit_routine_cpu(RoutineCtx& c, std::vector<std::string>& out, bool openmp) {
    std::string head = ind(1) + "subroutine " + c.r->name + "(";
    head += join(c.r->params) + ")";
    out.push_back(head);
    emit_spec_part(c, out);

    BodyHooks hooks;
    hooks.region = [&](const Statement& st, int indent, std::vector<std::string>& lines) {
        if (!st.region->applies_to(Arch::Cpu)) {
            render_region_unlooped(c, st, indent, lines, hooks);
            return;
        }
        check_reductions(c, st, *c.e->diags);
        if (openmp) {
            std::string parallel = ind(indent) + "!$omp parallel default(firstprivate)";
            std::vector<std::string> shared = arrays_used(c, st.body);
            if (!shared.empty()) parallel += " shared(" + join(shared) + ")";
            lines.push_back(parallel);
            lines.push_back(ind(indent) + "!$omp do" + reduction_clause(*st.region));
        }
        render_region_loops(c, st, indent, lines, hooks);
        if (openmp) {
            lines.push_back(ind(indent) + "!$omp end do");
            lines.push_back(ind(indent) + "!$omp end parallel");
        }
    };
    render_body(c, c.r->body, 2, out, hooks);
    out.push_back(ind(1) + "end subroutine " + c.r->name);
}

} // namespace hft::emit
