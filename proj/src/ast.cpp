//------------------------------------------------------------------------------
// ast.cpp
//
// SPDX-License-Identifier: Apache-2.0
//------------------------------------------------------------------------------
#include "hft/ast.hpp"

namespace hft::ast {

ExprPtr make_int(long long v) { return make_int(v, std::to_string(v)); }

ExprPtr make_int(long long v, std::string lexeme) {
    auto e = std::make_shared<Expr>(ExprKind::IntLit);
    e->int_value = v;
    e->text = std::move(lexeme);
    return e;
}

ExprPtr make_real(double v, std::string lexeme) {
    auto e = std::make_shared<Expr>(ExprKind::RealLit);
    e->real_value = v;
    e->text = std::move(lexeme);
    return e;
}

ExprPtr make_name(std::string name) {
    auto e = std::make_shared<Expr>(ExprKind::Name);
    e->text = std::move(name);
    return e;
}

ExprPtr make_string(std::string contents) {
    auto e = std::make_shared<Expr>(ExprKind::StringLit);
    e->text = std::move(contents);
    return e;
}

ExprPtr make_ref(std::string name, std::vector<ExprPtr> args) {
    auto e = std::make_shared<Expr>(ExprKind::Ref);
    e->text = std::move(name);
    e->args = std::move(args);
    return e;
}

ExprPtr make_unary(std::string op, ExprPtr a) {
    auto e = std::make_shared<Expr>(ExprKind::Unary);
    e->text = std::move(op);
    e->args.push_back(std::move(a));
    return e;
}

ExprPtr make_binary(std::string op, ExprPtr a, ExprPtr b) {
    auto e = std::make_shared<Expr>(ExprKind::Binary);
    e->text = std::move(op);
    e->args.push_back(std::move(a));
    e->args.push_back(std::move(b));
    return e;
}

ExprPtr make_paren(ExprPtr a) {
    auto e = std::make_shared<Expr>(ExprKind::Paren);
    e->args.push_back(std::move(a));
    return e;
}

ExprPtr make_member(ExprPtr base, std::string component) {
    auto e = std::make_shared<Expr>(ExprKind::Member);
    e->text = std::move(component);
    e->args.push_back(std::move(base));
    return e;
}

ExprPtr make_range(ExprPtr lo, ExprPtr hi) {
    auto e = std::make_shared<Expr>(ExprKind::Range);
    e->args.push_back(std::move(lo));
    e->args.push_back(std::move(hi));
    return e;
}

bool expr_equal(const Expr* a, const Expr* b) {
    if (a == b) return true;
    if (!a || !b) return false;
    if (a->kind != b->kind) return false;
    switch (a->kind) {
    case ExprKind::IntLit:
        if (a->int_value != b->int_value) return false;
        break;
    case ExprKind::RealLit:
        if (a->real_value != b->real_value) return false;
        break;
    default:
        if (a->text != b->text) return false;
        break;
    }
    if (a->args.size() != b->args.size()) return false;
    for (std::size_t i = 0; i < a->args.size(); ++i)
        if (!expr_equal(a->args[i].get(), b->args[i].get())) return false;
    return true;
}

ExprPtr clone(const ExprPtr& e) {
    if (!e) return nullptr;
    auto out = std::make_shared<Expr>(e->kind);
    out->text = e->text;
    out->int_value = e->int_value;
    out->real_value = e->real_value;
    out->quote = e->quote;
    for (const auto& a : e->args) out->args.push_back(clone(a));
    return out;
}

bool is_int_literal(const Expr* e, long long v) {
    return e && e->kind == ExprKind::IntLit && e->int_value == v;
}

const RoutineDecl* Program::find_routine(const std::string& name) const {
    for (const auto& m : modules)
        for (const auto& r : m.routines)
            if (r.name == name) return &r;
    return nullptr;
}

const ModuleDecl* Program::module_of(const std::string& routine) const {
    for (const auto& m : modules)
        for (const auto& r : m.routines)
            if (r.name == routine) return &m;
    return nullptr;
}

int region_count(const RoutineDecl& r) {
    int n = 0;
    for (const auto& s : r.body)
        if (s.kind == StmtKind::Region) ++n;
    return n;
}

void walk_expr(const ExprPtr& e, const std::function<void(const Expr&)>& fn) {
    if (!e) return;
    fn(*e);
    for (const auto& a : e->args) walk_expr(a, fn);
}

std::vector<ExprPtr> statement_exprs(const Statement& st) {
    std::vector<ExprPtr> out;
    for (const ExprPtr& e : {st.e1, st.e2, st.e3, st.launch_grid, st.launch_block})
        if (e) out.push_back(e);
    for (const auto& e : st.exprs)
        if (e) out.push_back(e);
    for (const auto& c : st.conditions)
        if (c) out.push_back(c);
    return out;
}

void walk_statements(const std::vector<Statement>& body,
                     const std::function<void(const Statement&)>& fn) {
    for (const auto& st : body) {
        fn(st);
        walk_statements(st.body, fn);
        for (const auto& arm : st.bodies) walk_statements(arm, fn);
    }
}

} // namespace hft::ast
