//------------------------------------------------------------------------------
// lines.cpp
//
// SPDX-License-Identifier: Apache-2.0
//------------------------------------------------------------------------------
#include "hft/lines.hpp"

#include <algorithm>
#include <cctype>

namespace hft {
namespace {

bool is_blank(const std::string& s) {
    return s.find_first_not_of(" \t") == std::string::npos;
}

std::size_t first_nonblank(const std::string& s) {
    auto p = s.find_first_not_of(" \t");
    return p == std::string::npos ? s.size() : p;
}

LineClass classify(const std::string& text) {
    std::size_t p = first_nonblank(text);
    if (p < text.size() && text[p] == '!') return LineClass::Comment;
    if (p < text.size() && text[p] == '@') return LineClass::Directive;
    return LineClass::Statement;
}

// Position of a trailing continuation '&' (outside strings and comments),
// or npos. `code_end` comes from scan_line.
std::size_t trailing_amp(const std::string& text, std::size_t code_end) {
    std::size_t i = code_end;
    while (i > 0 && (text[i - 1] == ' ' || text[i - 1] == '\t')) --i;
    if (i > 0 && text[i - 1] == '&') return i - 1;
    return std::string::npos;
}

bool omp_or_acc_sentinel(const std::string& text, std::string& sentinel) {
    std::size_t p = first_nonblank(text);
    for (const char* s : {"!$omp", "!$acc", "!$OMP", "!$ACC"}) {
        std::size_t n = std::char_traits<char>::length(s);
        if (text.compare(p, n, s) == 0) {
            sentinel = text.substr(p, n);
            std::transform(sentinel.begin(), sentinel.end(), sentinel.begin(),
                           [](unsigned char c) { return std::tolower(c); });
            return true;
        }
    }
    return false;
}

} // namespace

std::vector<LogicalLine> merge_continuations(const RawSource& source, Diagnostics& diags) {
    std::vector<LogicalLine> out;
    std::vector<LogicalLine> hoisted; // comments seen while a statement is open

    std::string pending;
    int pending_line = 0;
    bool open = false;

    auto flush = [&](bool force_error) {
        if (open) {
            if (force_error)
                diags.error({source.path, pending_line},
                            "line ends with '&' but no continuation follows");
            out.push_back({pending, {source.path, pending_line}, classify(pending)});
            open = false;
        }
        for (auto& h : hoisted) out.push_back(std::move(h));
        hoisted.clear();
    };

    for (const auto& raw : source.lines) {
        if (is_blank(raw.text)) continue;
        LineClass cls = classify(raw.text);
        if (cls == LineClass::Comment) {
            if (open)
                hoisted.push_back({raw.text, {source.path, raw.line}, cls});
            else
                out.push_back({raw.text, {source.path, raw.line}, cls});
            continue;
        }
        std::string text = raw.text;
        if (open) {
            // splice: drop a leading '&' (token may be split across it)
            std::size_t p = first_nonblank(text);
            if (p < text.size() && text[p] == '&')
                text = text.substr(p + 1);
            text = pending + text;
        } else {
            pending_line = raw.line;
        }
        LineScan scan = scan_line(text);
        if (scan.open_string) {
            diags.error({source.path, raw.line},
                        "unterminated character literal (string continuation is not supported)");
        }
        std::size_t amp = trailing_amp(text, scan.code_end);
        if (amp != std::string::npos) {
            // Anything after the '&' is a trailing comment; hoist it.
            std::size_t rest = text.find('!', amp);
            if (rest != std::string::npos)
                hoisted.push_back({text.substr(rest), {source.path, raw.line}, LineClass::Comment});
            pending = text.substr(0, amp);
            open = true;
        } else {
            pending = text;
            open = true;
            flush(false);
        }
    }
    flush(true);
    return out;
}

std::vector<std::string> split_line(const std::string& line, int max_length, Diagnostics& diags) {
    std::vector<std::string> out;
    if (static_cast<int>(line.size()) <= max_length) {
        out.push_back(line);
        return out;
    }
    std::size_t p = first_nonblank(line);
    if (p < line.size() && line[p] == '!') {
        // Comment: break into further comment lines. OpenMP/OpenACC sentinels
        // get proper sentinel continuations so real compilers still see one
        // directive.
        std::string sentinel;
        bool dir = omp_or_acc_sentinel(line, sentinel);
        std::string head = line;
        while (static_cast<int>(head.size()) > max_length) {
            int budget = max_length - (dir ? 2 : 0); // room for " &"
            std::size_t cut = std::string::npos;
            for (std::size_t i = static_cast<std::size_t>(budget); i > p; --i) {
                if (head[i] == ' ') {
                    cut = i;
                    break;
                }
            }
            if (cut == std::string::npos || cut <= p + 1) {
                diags.error({}, "comment token exceeds the line-length limit");
                out.push_back(head);
                return out;
            }
            if (dir) {
                out.push_back(head.substr(0, cut) + " &");
                head = sentinel + "& " + head.substr(cut + 1);
            } else {
                out.push_back(head.substr(0, cut));
                head = "! " + head.substr(cut + 1);
            }
        }
        out.push_back(head);
        return out;
    }

    std::string head = line;
    while (static_cast<int>(head.size()) > max_length) {
        LineScan scan = scan_line(head);
        // choose the rightmost breakable blank such that "prefix&" fits
        std::size_t limit = std::min<std::size_t>(head.size(), static_cast<std::size_t>(max_length) - 1);
        std::size_t cut = std::string::npos;
        char quote = 0;
        std::size_t code_end = scan.code_end;
        for (std::size_t i = 0; i < limit; ++i) {
            char c = head[i];
            if (quote) {
                if (c == quote) quote = 0;
                continue;
            }
            if (c == '\'' || c == '"') {
                quote = c;
                continue;
            }
            if (c == ' ' && i > p && i + 1 < code_end) cut = i;
        }
        if (cut == std::string::npos) {
            diags.error({}, "token exceeds the line-length limit and cannot be split");
            out.push_back(head);
            return out;
        }
        out.push_back(head.substr(0, cut + 1) + "&");
        head = "&" + head.substr(cut + 1);
    }
    out.push_back(head);
    return out;
}

std::vector<std::string> split_lines(const std::vector<std::string>& lines, int max_length,
                                     Diagnostics& diags) {
    std::vector<std::string> out;
    for (const auto& line : lines) {
        auto parts = split_line(line, max_length, diags);
        out.insert(out.end(), parts.begin(), parts.end());
    }
    return out;
}

std::string collapse_ws(const std::string& text) {
    std::string out;
    char quote = 0;
    bool in_ws = false;
    for (char c : text) {
        if (quote) {
            out.push_back(c);
            if (c == quote) quote = 0;
            continue;
        }
        if (c == '\'' || c == '"') {
            if (in_ws && !out.empty()) out.push_back(' ');
            in_ws = false;
            quote = c;
            out.push_back(c);
            continue;
        }
        if (c == ' ' || c == '\t') {
            in_ws = true;
            continue;
        }
        if (in_ws && !out.empty()) out.push_back(' ');
        in_ws = false;
        out.push_back(c);
    }
    return out;
}

} // namespace hft
