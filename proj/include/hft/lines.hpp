//------------------------------------------------------------------------------
// lines.hpp
// Continuation merging and line-length splitting (free-form rules)
//
// SPDX-License-Identifier: Apache-2.0
//------------------------------------------------------------------------------
#pragma once

#include <string>
#include <vector>

#include "hft/source.hpp"

namespace hft {

inline constexpr int kDefaultMaxLineLength = 132;

/// Merge `&` continuations into logical lines. Comment lines that interrupt
/// a continuation sequence are hoisted after the merged statement; blank
/// lines are dropped. Origins are strictly increasing within a file.
std::vector<LogicalLine> merge_continuations(const RawSource& source, Diagnostics& diags);

/// Split any line longer than `max_length` at whitespace outside character
/// literals, emitting trailing-`&` / leading-`&` pairs so that merging
/// restores the original text. Comment lines are split into further comment
/// lines (with sentinel continuation for !$omp / !$acc directives). A token
/// too long to place on any line reports a diagnostic.
std::vector<std::string> split_lines(const std::vector<std::string>& lines, int max_length,
                                     Diagnostics& diags);

/// Split a single line; returns one element when it already fits.
std::vector<std::string> split_line(const std::string& line, int max_length, Diagnostics& diags);

/// Collapse whitespace runs outside character literals to single spaces and
/// trim the ends: the equivalence used by split/merge round-trip checks.
std::string collapse_ws(const std::string& text);

} // namespace hft
