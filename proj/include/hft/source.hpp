//------------------------------------------------------------------------------
// source.hpp
// Raw and logical source line containers for the transformation pipeline
//
// SPDX-License-Identifier: Apache-2.0
//------------------------------------------------------------------------------
#pragma once

#include <string>
#include <vector>

#include "hft/diagnostics.hpp"

namespace hft {

/// How a file enters the pipeline, selected by extension:
///   .f90 plain Fortran (passes through untransformed)
///   .F90 Fortran with preprocessor macros (macro pass only)
///   .h90 hybrid sources with directives
///   .H90 hybrid sources with directives and macros
enum class SourceKind { PlainFortran, FortranWithMacros, Hybrid, HybridWithMacros };

/// One raw line plus the 1-based line number it had in the original file.
/// The preprocessor drops and rewrites lines, so the number travels along.
struct SourceLine {
    std::string text;
    int line = 0;
};

struct RawSource {
    std::string path;
    SourceKind kind = SourceKind::Hybrid;
    std::vector<SourceLine> lines;
};

enum class LineClass { Statement, Comment, Directive };

/// A statement with continuations merged. origin points at the first raw
/// line the statement was assembled from.
struct LogicalLine {
    std::string text;
    SourceRef origin;
    LineClass cls = LineClass::Statement;
};

/// Classify by filename extension; unknown extensions report a diagnostic
/// and default to Hybrid.
SourceKind kind_from_extension(const std::string& path, Diagnostics& diags);

/// Split `text` into lines, numbering from 1.
RawSource make_source(std::string path, const std::string& text, SourceKind kind);

/// Read a file from disk; kind derived from the extension.
RawSource load_source(const std::string& path, Diagnostics& diags);

/// Scan one line and report where executable text ends: the index of the
/// first `!` that starts a trailing comment (or text length if none), and
/// whether a quote is still open at end of line.
struct LineScan {
    std::size_t code_end = 0;
    bool open_string = false;
};
LineScan scan_line(const std::string& text);

} // namespace hft
