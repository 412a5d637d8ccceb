//------------------------------------------------------------------------------
// ast.hpp
// Syntax tree for the Fortran subset plus the hybrid directive model
//
// SPDX-License-Identifier: Apache-2.0
//------------------------------------------------------------------------------
#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "hft/diagnostics.hpp"

namespace hft::ast {

//------------------------------------------------------------------------------
// Expressions
//------------------------------------------------------------------------------

enum class ExprKind {
    IntLit,     // text = lexeme, int_value set
    RealLit,    // text = lexeme, real_value set
    LogicalLit, // text = ".true."/".false."
    StringLit,  // text = contents without quotes, quote = delimiter
    Name,       // text = identifier (lower case)
    Ref,        // text = name, args = subscripts or call arguments
    Member,     // args[0] % text   (blockidx%x and friends)
    Unary,      // text = "-" | "+" | ".not.", args[0]
    Binary,     // text = operator, args[0] op args[1]
    Paren,      // args[0]
    Range,      // args[0]:args[1], either side may be null (bare ':')
};

struct Expr;
using ExprPtr = std::shared_ptr<Expr>;

struct Expr {
    ExprKind kind;
    std::string text;
    std::vector<ExprPtr> args;
    long long int_value = 0;
    double real_value = 0.0;
    char quote = '"';

    explicit Expr(ExprKind k) : kind(k) {}
};

ExprPtr make_int(long long v);
ExprPtr make_int(long long v, std::string lexeme);
ExprPtr make_real(double v, std::string lexeme);
ExprPtr make_name(std::string name);
ExprPtr make_string(std::string contents);
ExprPtr make_ref(std::string name, std::vector<ExprPtr> args);
ExprPtr make_unary(std::string op, ExprPtr a);
ExprPtr make_binary(std::string op, ExprPtr a, ExprPtr b);
ExprPtr make_paren(ExprPtr a);
ExprPtr make_member(ExprPtr base, std::string component);
ExprPtr make_range(ExprPtr lo, ExprPtr hi);

/// Structural equality (lexemes of literals compare by value).
bool expr_equal(const Expr* a, const Expr* b);

/// Deep copy.
ExprPtr clone(const ExprPtr& e);

/// Is this expression the integer literal `v`?
bool is_int_literal(const Expr* e, long long v);

//------------------------------------------------------------------------------
// Statements
//------------------------------------------------------------------------------

enum class StmtKind {
    Assign,        // e1 = e2
    PointerAssign, // e1 => e2
    Do,            // name = var, e1 lo, e2 hi, e3 step (may be null), body
    DoWhile,       // e1 condition, body
    If,            // arms: (condition, body) list; null condition = else
    Call,          // name, exprs args; launch_grid/launch_block when chevroned
    Return,
    Exit,
    Cycle,
    Print,      // exprs items
    Comment,    // raw text (includes '!', also OpenMP/OpenACC sentinels)
    Allocate,   // exprs: Ref per allocation with bound ranges as subscripts
    Deallocate, // exprs: Name per object
    Io,         // raw statement preserved verbatim; name = verb
    DataInit,   // name = symbol, exprs = literal values
    Region,     // parallel region: region index into routine.regions, body
};

struct Statement;
struct ParallelRegionSpec;

struct Statement {
    StmtKind kind;
    SourceRef ref;
    std::string name;
    ExprPtr e1, e2, e3;
    std::vector<ExprPtr> exprs;
    std::vector<Statement> body;
    // If: parallel arrays; conditions[i] guards bodies[i]; null = else arm
    std::vector<ExprPtr> conditions;
    std::vector<std::vector<Statement>> bodies;
    ExprPtr launch_grid, launch_block;
    std::shared_ptr<ParallelRegionSpec> region; // for Region statements
    std::string raw;                            // Comment/Io text

    explicit Statement(StmtKind k) : kind(k) {}
};

//------------------------------------------------------------------------------
// Specifications
//------------------------------------------------------------------------------

enum class BaseType { Real8, Integer4, Dim3 };

enum class Intent { None, In, Out, InOut };

/// One declared dimension. `deferred` for `(:)`; otherwise upper is set and
/// lower may be null (declared from 1).
struct DimSpec {
    ExprPtr lower;
    ExprPtr upper;
    bool deferred = false;
};

struct SymbolSpec {
    std::string name;
    BaseType type = BaseType::Real8;
    std::vector<DimSpec> dims;
    Intent intent = Intent::None;
    bool pointer = false;
    bool parameter = false;
    bool save = false;
    bool device = false;
    bool value = false;
    bool data_init = false; // initialized via a data statement
    ExprPtr init;
    SourceRef ref;
};

struct UseStmt {
    std::string module;
    std::vector<std::string> only;
};

//------------------------------------------------------------------------------
// Directives
//------------------------------------------------------------------------------

enum class Arch { Cpu, Gpu };

struct RegionDomain {
    std::string name;   // iterator
    ExprPtr size_lo;    // null when the size is a plain extent
    ExprPtr size_hi;    // extent or range upper bound
    ExprPtr start;      // defaulted to 1 when omitted
    ExprPtr end;        // defaulted to size_hi when omitted
};

struct ParallelRegionSpec {
    bool applies_cpu = true; // omitted appliesTo targets every architecture
    bool applies_gpu = true;
    std::vector<RegionDomain> domains;
    std::vector<std::pair<std::string, std::string>> reductions; // (op, symbol)
    std::string template_name;
    SourceRef ref;

    bool applies_to(Arch a) const { return a == Arch::Cpu ? applies_cpu : applies_gpu; }
};

struct DomainDependantSpec {
    std::vector<std::string> dom_names;
    std::vector<std::pair<ExprPtr, ExprPtr>> dom_sizes; // (lower or null, upper)
    std::string acc_pp; // explicit accessor macro name
    std::string dom_pp; // explicit declaration macro name
    bool auto_dom = false;
    bool present = false;
    bool transfer_here = false;
    bool host = false;
    std::vector<std::string> symbols;
    SourceRef ref;
};

//------------------------------------------------------------------------------
// Program structure
//------------------------------------------------------------------------------

enum class RoutineKind { Normal, Global, Device };

struct RoutineDecl {
    std::string name;
    RoutineKind kind = RoutineKind::Normal;
    std::string scheme; // implementation name from an enclosing @scheme block
    std::vector<std::string> params;
    std::vector<UseStmt> uses;
    bool implicit_none = false;
    std::vector<SymbolSpec> specs;
    std::vector<Statement> spec_comments; // comments within the spec part
    std::vector<DomainDependantSpec> domain_dependants;
    std::vector<Statement> body;
    std::vector<std::shared_ptr<ParallelRegionSpec>> regions; // in body order
    SourceRef ref;
};

struct ModuleDecl {
    std::string name;
    std::vector<UseStmt> uses;
    bool implicit_none = false;
    std::vector<SymbolSpec> specs;
    std::vector<Statement> spec_comments;
    std::vector<RoutineDecl> routines;
    SourceRef ref;
};

struct Program {
    std::vector<ModuleDecl> modules;

    const RoutineDecl* find_routine(const std::string& name) const;
    const ModuleDecl* module_of(const std::string& routine) const;
};

/// Count parallel regions in a routine body (top level only; nesting is
/// rejected at parse time).
int region_count(const RoutineDecl& r);

/// Pre-order expression walk (visits e itself, then children).
void walk_expr(const ExprPtr& e, const std::function<void(const Expr&)>& fn);

/// Pre-order statement walk over a body, descending into nested blocks.
void walk_statements(const std::vector<Statement>& body,
                     const std::function<void(const Statement&)>& fn);

/// All expressions directly held by a statement (not descending into the
/// statement's nested bodies).
std::vector<ExprPtr> statement_exprs(const Statement& st);

} // namespace hft::ast
