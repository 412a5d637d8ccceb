//------------------------------------------------------------------------------
// pipeline.cpp
//
// SPDX-License-Identifier: Apache-2.0
//------------------------------------------------------------------------------
#include "hft/pipeline.hpp"

#include "hft/parser.hpp"
#include "hft/preprocessor.hpp"

namespace hft {

namespace {

std::string stem_of(const std::string& path) {
    std::size_t slash = path.find_last_of("/\\");
    std::string name = slash == std::string::npos ? path : path.substr(slash + 1);
    std::size_t dot = name.find_last_of('.');
    return dot == std::string::npos ? name : name.substr(0, dot);
}

LoadedSource finish_load(RawSource raw, Diagnostics& diags) {
    LoadedSource out;
    out.stem = stem_of(raw.path);
    // .H90 starts at the macro phase; .F90 keeps its macros for the final
    // (consumer-side) preprocessor run and .f90/.h90 never had any.
    if (raw.kind == SourceKind::HybridWithMacros) {
        MacroTable table;
        raw = preprocess(raw, table, diags);
    }
    out.hybrid =
        raw.kind == SourceKind::Hybrid || raw.kind == SourceKind::HybridWithMacros;
    if (out.hybrid) out.logical = merge_continuations(raw, diags);
    out.raw = std::move(raw);
    return out;
}

} // namespace

LoadedSource load_and_merge(const std::string& path, Diagnostics& diags) {
    return finish_load(load_source(path, diags), diags);
}

LoadedSource prepare_source(const std::string& path, const std::string& text,
                            Diagnostics& diags) {
    SourceKind kind = kind_from_extension(path, diags);
    return finish_load(make_source(path, text, kind), diags);
}

TranspileResult transpile(const std::vector<LoadedSource>& sources, const BuildConfig& cfg,
                          const std::string& target, Diagnostics& diags) {
    TranspileResult res;
    std::vector<std::vector<LogicalLine>> files;
    for (const auto& s : sources)
        if (s.hybrid) files.push_back(s.logical);
    res.program = parse_program(files, diags);
    res.info = analyze(res.program, diags);
    if (target_arch(target) == ast::Arch::Gpu)
        validate_kernel_bodies(res.program, res.info, diags);

    auto aliases = collect_macro_aliases(res.program, diags);
    res.units.push_back(emit_storage_macros(cfg, aliases, diags));

    for (const auto& s : sources) {
        if (!s.hybrid) {
            std::string text;
            for (const auto& l : s.raw.lines) text += l.text + "\n";
            std::string name = s.stem + (s.raw.kind == SourceKind::PlainFortran ? ".f90" : ".F90");
            res.units.push_back({name, text});
            continue;
        }
        std::vector<const ast::ModuleDecl*> modules;
        for (const auto& m : res.program.modules)
            if (m.ref.file == s.raw.path) modules.push_back(&m);
        EmittedUnit unit = emit_source(s.stem, modules, res.program, res.info, cfg, target, diags);
        // phase eight: honor the line-length limit of the downstream compiler
        std::vector<std::string> lines;
        std::string current;
        for (char ch : unit.text) {
            if (ch == '\n') {
                lines.push_back(current);
                current.clear();
            } else {
                current += ch;
            }
        }
        if (!current.empty()) lines.push_back(current);
        std::vector<std::string> split = split_lines(lines, cfg.max_line_length, diags);
        unit.text.clear();
        for (const auto& l : split) unit.text += l + "\n";
        res.units.push_back(std::move(unit));
    }
    return res;
}

TranspileResult transpile_files(const std::vector<std::string>& paths, const BuildConfig& cfg,
                                const std::string& target, Diagnostics& diags) {
    std::vector<LoadedSource> sources;
    for (const auto& p : paths) sources.push_back(load_and_merge(p, diags));
    return transpile(sources, cfg, target, diags);
}

std::string expand_unit(const EmittedUnit& storage_header, const EmittedUnit& unit, bool gpu,
                        Diagnostics& diags) {
    std::string text = storage_header.text + unit.text;
    RawSource raw = make_source(unit.filename, text, SourceKind::FortranWithMacros);
    MacroTable table;
    if (gpu) table.define_flag("GPU");
    RawSource expanded = preprocess(raw, table, diags);
    std::string out;
    for (const auto& l : expanded.lines) out += l.text + "\n";
    return out;
}

} // namespace hft
