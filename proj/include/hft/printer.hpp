//------------------------------------------------------------------------------
// printer.hpp
// Canonical source text from the syntax tree (lower-case keywords, dot-form
// comparisons, ", " argument separation)
//
// SPDX-License-Identifier: Apache-2.0
//------------------------------------------------------------------------------
#pragma once

#include <string>
#include <vector>

#include "hft/ast.hpp"

namespace hft {

std::string print_expression(const ast::ExprPtr& e);

/// Append the statement (and nested blocks) as lines indented by `indent`
/// two-space levels.
void print_statement(const ast::Statement& st, int indent, std::vector<std::string>& out);

/// One declaration line, without indentation.
std::string print_symbol_spec(const ast::SymbolSpec& s);

std::string print_parallel_region_header(const ast::ParallelRegionSpec& spec);
std::string print_domain_dependant_header(const ast::DomainDependantSpec& dd);

std::vector<std::string> print_routine(const ast::RoutineDecl& r, int indent);
std::vector<std::string> print_module(const ast::ModuleDecl& m);
std::vector<std::string> print_program(const ast::Program& p);

} // namespace hft
