//------------------------------------------------------------------------------
// parser.hpp
// Logical lines -> modules, routines, statements and directive specs
//
// SPDX-License-Identifier: Apache-2.0
//------------------------------------------------------------------------------
#pragma once

#include <vector>

#include "hft/ast.hpp"
#include "hft/lines.hpp"
#include "hft/source.hpp"

namespace hft {

/// Parse merged logical lines (one vector per file) into a program. Every
/// unsupported construct is reported with its location; parsing continues
/// where recovery is sane so that several problems surface in one run.
ast::Program parse_program(const std::vector<std::vector<LogicalLine>>& files,
                           Diagnostics& diags);

/// Convenience single-file form.
ast::Program parse_program_source(const std::vector<LogicalLine>& lines, Diagnostics& diags);

/// Parse one expression from text (tests and directive members).
ast::ExprPtr parse_expression_text(const std::string& text, const SourceRef& where,
                                   Diagnostics& diags);

/// Parse a "@parallelRegion{...}" logical line.
std::shared_ptr<ast::ParallelRegionSpec> parse_parallel_region_spec(const LogicalLine& line,
                                                                    Diagnostics& diags);

/// Parse a "@domainDependant{...}" header line (symbol list lines follow in
/// the routine and are appended by the caller).
ast::DomainDependantSpec parse_domain_dependant_spec(const LogicalLine& line, Diagnostics& diags);

} // namespace hft
