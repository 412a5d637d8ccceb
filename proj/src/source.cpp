//------------------------------------------------------------------------------
// source.cpp
//
// SPDX-License-Identifier: Apache-2.0
//------------------------------------------------------------------------------
#include "hft/source.hpp"

#include <fstream>
#include <sstream>

namespace hft {

SourceKind kind_from_extension(const std::string& path, Diagnostics& diags) {
    auto dot = path.find_last_of('.');
    std::string ext = dot == std::string::npos ? "" : path.substr(dot);
    if (ext == ".f90") return SourceKind::PlainFortran;
    if (ext == ".F90") return SourceKind::FortranWithMacros;
    if (ext == ".h90") return SourceKind::Hybrid;
    if (ext == ".H90") return SourceKind::HybridWithMacros;
    diags.error({path, 0}, "unrecognized source extension '" + ext +
                               "' (expected .f90, .F90, .h90 or .H90)");
    return SourceKind::Hybrid;
}

RawSource make_source(std::string path, const std::string& text, SourceKind kind) {
    RawSource src;
    src.path = std::move(path);
    src.kind = kind;
    std::string line;
    int number = 1;
    for (std::size_t i = 0; i <= text.size(); ++i) {
        if (i == text.size() || text[i] == '\n') {
            if (i == text.size() && line.empty() && number > 1) break;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            src.lines.push_back({line, number++});
            line.clear();
        } else {
            line.push_back(text[i]);
        }
    }
    return src;
}

RawSource load_source(const std::string& path, Diagnostics& diags) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        diags.error({path, 0}, "cannot open file");
        return {path, SourceKind::Hybrid, {}};
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return make_source(path, buf.str(), kind_from_extension(path, diags));
}

LineScan scan_line(const std::string& text) {
    LineScan scan;
    char quote = 0;
    std::size_t i = 0;
    for (; i < text.size(); ++i) {
        char c = text[i];
        if (quote) {
            if (c == quote) {
                // doubled quotes escape inside literals
                if (i + 1 < text.size() && text[i + 1] == quote)
                    ++i;
                else
                    quote = 0;
            }
        } else if (c == '\'' || c == '"') {
            quote = c;
        } else if (c == '!') {
            break;
        }
    }
    scan.code_end = i;
    scan.open_string = quote != 0;
    return scan;
}

} // namespace hft
