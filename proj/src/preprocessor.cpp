//------------------------------------------------------------------------------
// preprocessor.cpp
//
// SPDX-License-Identifier: Apache-2.0
//------------------------------------------------------------------------------
#include "hft/preprocessor.hpp"

#include <cctype>
#include <set>

namespace hft {
namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

//------------------------------------------------------------------------------
// #if expression evaluation
//------------------------------------------------------------------------------

struct CondParser {
    const std::string& text;
    std::size_t pos = 0;
    const MacroTable& table;
    Diagnostics& diags;
    SourceRef where;
    bool failed = false;

    void skip_ws() {
        while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t')) ++pos;
    }
    bool eat(const std::string& tok) {
        skip_ws();
        if (text.compare(pos, tok.size(), tok) == 0) {
            pos += tok.size();
            return true;
        }
        return false;
    }
    void fail(const std::string& msg) {
        if (!failed) diags.error(where, msg);
        failed = true;
    }

    long parse_or() {
        long v = parse_and();
        while (true) {
            skip_ws();
            if (eat("||")) {
                long r = parse_and();
                v = (v != 0 || r != 0) ? 1 : 0;
            } else {
                return v;
            }
        }
    }
    long parse_and() {
        long v = parse_cmp();
        while (true) {
            skip_ws();
            if (eat("&&")) {
                long r = parse_cmp();
                v = (v != 0 && r != 0) ? 1 : 0;
            } else {
                return v;
            }
        }
    }
    long parse_cmp() {
        long v = parse_add();
        skip_ws();
        static const struct { const char* op; int kind; } ops[] = {
            {"==", 0}, {"!=", 1}, {"<=", 2}, {">=", 3}, {"<", 4}, {">", 5}};
        for (const auto& o : ops) {
            if (eat(o.op)) {
                long r = parse_add();
                switch (o.kind) {
                case 0: return v == r;
                case 1: return v != r;
                case 2: return v <= r;
                case 3: return v >= r;
                case 4: return v < r;
                default: return v > r;
                }
            }
        }
        return v;
    }
    long parse_add() {
        long v = parse_mul();
        while (true) {
            skip_ws();
            if (eat("+")) v += parse_mul();
            else if (pos < text.size() && text[pos] == '-' &&
                     text.compare(pos, 2, "->") != 0) {
                ++pos;
                v -= parse_mul();
            } else {
                return v;
            }
        }
    }
    long parse_mul() {
        long v = parse_unary();
        while (true) {
            skip_ws();
            if (eat("*")) v *= parse_unary();
            else if (eat("/")) {
                long r = parse_unary();
                if (r == 0) {
                    fail("division by zero in preprocessor condition");
                    return 0;
                }
                v /= r;
            } else {
                return v;
            }
        }
    }
    long parse_unary() {
        skip_ws();
        if (pos < text.size() && text[pos] == '!' && (pos + 1 >= text.size() || text[pos + 1] != '=')) {
            ++pos;
            return parse_unary() == 0 ? 1 : 0;
        }
        if (eat("-")) return -parse_unary();
        return parse_primary();
    }
    long parse_primary() {
        skip_ws();
        if (eat("(")) {
            long v = parse_or();
            if (!eat(")")) fail("expected ')' in preprocessor condition");
            return v;
        }
        if (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
            long v = 0;
            while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos])))
                v = v * 10 + (text[pos++] - '0');
            return v;
        }
        if (pos < text.size() && ident_start(text[pos])) {
            std::size_t b = pos;
            while (pos < text.size() && ident_char(text[pos])) ++pos;
            std::string name = text.substr(b, pos - b);
            if (name == "defined") {
                skip_ws();
                bool paren = eat("(");
                skip_ws();
                std::size_t nb = pos;
                while (pos < text.size() && ident_char(text[pos])) ++pos;
                std::string target = text.substr(nb, pos - nb);
                if (paren && !eat(")")) fail("expected ')' after defined(NAME)");
                if (target.empty()) fail("expected a name after 'defined'");
                return table.is_defined(target) ? 1 : 0;
            }
            // Object macro expanding to an integer constant; undefined names
            // evaluate to 0 per cpp rules.
            if (const MacroDef* def = table.lookup(name); def && !def->function_like) {
                std::string body = trim(def->body);
                if (!body.empty()) {
                    CondParser sub{body, 0, table, diags, where};
                    long v = sub.parse_or();
                    if (!sub.failed) return v;
                    failed = true;
                }
            }
            return 0;
        }
        if (pos >= text.size()) {
            fail("empty preprocessor condition");
            return 0;
        }
        fail(std::string("unexpected character '") + text[pos] + "' in preprocessor condition");
        ++pos;
        return 0;
    }
};

long eval_condition(const std::string& expr, const MacroTable& table, Diagnostics& diags,
                    const SourceRef& where) {
    CondParser p{expr, 0, table, diags, where};
    long v = p.parse_or();
    p.skip_ws();
    if (!p.failed && p.pos != expr.size())
        diags.error(where, "trailing text in preprocessor condition: '" + expr.substr(p.pos) + "'");
    return v;
}

//------------------------------------------------------------------------------
// Macro expansion
//------------------------------------------------------------------------------

// Replace parameter names in a macro body with argument text, respecting
// identifier boundaries and character literals.
std::string substitute_params(const std::string& body, const std::vector<std::string>& params,
                              const std::vector<std::string>& args) {
    std::string out;
    char quote = 0;
    for (std::size_t i = 0; i < body.size();) {
        char c = body[i];
        if (quote) {
            out.push_back(c);
            if (c == quote) quote = 0;
            ++i;
        } else if (c == '\'' || c == '"') {
            quote = c;
            out.push_back(c);
            ++i;
        } else if (ident_start(c)) {
            std::size_t b = i;
            while (i < body.size() && ident_char(body[i])) ++i;
            std::string name = body.substr(b, i - b);
            bool replaced = false;
            for (std::size_t k = 0; k < params.size(); ++k) {
                if (params[k] == name) {
                    out += args[k];
                    replaced = true;
                    break;
                }
            }
            if (!replaced) out += name;
        } else {
            out.push_back(c);
            ++i;
        }
    }
    return out;
}

constexpr int kMaxExpansionDepth = 64;

std::string expand_impl(const std::string& text, const MacroTable& table,
                        std::set<std::string>& active, Diagnostics& diags, const SourceRef& where,
                        int depth) {
    if (depth > kMaxExpansionDepth) {
        diags.error(where, "macro expansion exceeds depth limit");
        return text;
    }
    std::string out;
    char quote = 0;
    for (std::size_t i = 0; i < text.size();) {
        char c = text[i];
        if (quote) {
            out.push_back(c);
            if (c == quote) quote = 0;
            ++i;
            continue;
        }
        if (c == '\'' || c == '"') {
            quote = c;
            out.push_back(c);
            ++i;
            continue;
        }
        if (c == '!') {
            // trailing comment: copied verbatim, never expanded
            out.append(text, i, std::string::npos);
            break;
        }
        if (!ident_start(c)) {
            out.push_back(c);
            ++i;
            continue;
        }
        std::size_t b = i;
        while (i < text.size() && ident_char(text[i])) ++i;
        std::string name = text.substr(b, i - b);
        const MacroDef* def = table.lookup(name);
        if (!def || active.count(name)) {
            out += name;
            continue;
        }
        if (!def->function_like) {
            active.insert(name);
            out += expand_impl(def->body, table, active, diags, where, depth + 1);
            active.erase(name);
            continue;
        }
        // function-like: require an argument list, else leave the name alone
        std::size_t j = i;
        while (j < text.size() && (text[j] == ' ' || text[j] == '\t')) ++j;
        if (j >= text.size() || text[j] != '(') {
            out += name;
            continue;
        }
        std::vector<std::string> args;
        std::string current;
        int parens = 1;
        char aq = 0;
        std::size_t k = j + 1;
        for (; k < text.size(); ++k) {
            char a = text[k];
            if (aq) {
                current.push_back(a);
                if (a == aq) aq = 0;
                continue;
            }
            if (a == '\'' || a == '"') {
                aq = a;
                current.push_back(a);
            } else if (a == '(') {
                ++parens;
                current.push_back(a);
            } else if (a == ')') {
                if (--parens == 0) break;
                current.push_back(a);
            } else if (a == ',' && parens == 1) {
                args.push_back(trim(current));
                current.clear();
            } else {
                current.push_back(a);
            }
        }
        if (parens != 0) {
            diags.error(where, "unterminated argument list for macro '" + name + "'");
            out += text.substr(b);
            return out;
        }
        args.push_back(trim(current));
        if (args.size() == 1 && args[0].empty() && def->params.empty()) args.clear();
        if (args.size() != def->params.size()) {
            diags.error(where, "macro '" + name + "' expects " +
                                   std::to_string(def->params.size()) + " argument(s), got " +
                                   std::to_string(args.size()));
            out += text.substr(b);
            return out;
        }
        std::string spliced = substitute_params(def->body, def->params, args);
        active.insert(name);
        out += expand_impl(spliced, table, active, diags, where, depth + 1);
        active.erase(name);
        i = k + 1;
    }
    return out;
}

struct CondState {
    bool parent_live = true; // were we emitting when this level opened
    bool taken = false;      // has any branch at this level been taken
    bool live = false;       // currently emitting
    bool seen_else = false;
};

} // namespace

std::string expand_text(const std::string& text, const MacroTable& table, Diagnostics& diags,
                        const SourceRef& where) {
    std::set<std::string> active;
    return expand_impl(text, table, active, diags, where, 0);
}

RawSource preprocess(const RawSource& source, MacroTable& table, Diagnostics& diags) {
    RawSource out;
    out.path = source.path;
    out.kind = source.kind == SourceKind::HybridWithMacros ? SourceKind::Hybrid
               : source.kind == SourceKind::FortranWithMacros ? SourceKind::PlainFortran
                                                              : source.kind;
    std::vector<CondState> stack;
    auto live = [&] { return stack.empty() || stack.back().live; };

    for (const auto& raw : source.lines) {
        SourceRef where{source.path, raw.line};
        std::size_t first = raw.text.find_first_not_of(" \t");
        if (first == std::string::npos || raw.text[first] != '#') {
            if (live()) {
                if (table.empty())
                    out.lines.push_back(raw);
                else
                    out.lines.push_back({expand_text(raw.text, table, diags, where), raw.line});
            }
            continue;
        }
        std::string directive = trim(raw.text.substr(first + 1));
        std::size_t sp = 0;
        while (sp < directive.size() && ident_char(directive[sp])) ++sp;
        std::string keyword = directive.substr(0, sp);
        std::string rest = trim(directive.substr(sp));

        if (keyword == "if") {
            CondState st;
            st.parent_live = live();
            st.live = st.parent_live && eval_condition(rest, table, diags, where) != 0;
            st.taken = st.live;
            stack.push_back(st);
        } else if (keyword == "ifdef" || keyword == "ifndef") {
            if (rest.empty()) diags.error(where, "#" + keyword + " requires a name");
            bool defined = table.is_defined(rest);
            CondState st;
            st.parent_live = live();
            st.live = st.parent_live && (keyword == "ifdef" ? defined : !defined);
            st.taken = st.live;
            stack.push_back(st);
        } else if (keyword == "elif") {
            if (stack.empty() || stack.back().seen_else) {
                diags.error(where, "#elif without matching #if");
            } else {
                auto& st = stack.back();
                st.live = st.parent_live && !st.taken &&
                          eval_condition(rest, table, diags, where) != 0;
                st.taken = st.taken || st.live;
            }
        } else if (keyword == "else") {
            if (stack.empty() || stack.back().seen_else) {
                diags.error(where, "#else without matching #if");
            } else {
                auto& st = stack.back();
                st.live = st.parent_live && !st.taken;
                st.taken = true;
                st.seen_else = true;
            }
        } else if (keyword == "endif") {
            if (stack.empty())
                diags.error(where, "#endif without matching #if");
            else
                stack.pop_back();
        } else if (keyword == "define") {
            if (!live()) continue;
            std::size_t p = 0;
            while (p < rest.size() && ident_char(rest[p])) ++p;
            std::string name = rest.substr(0, p);
            if (name.empty() || !ident_start(name[0])) {
                diags.error(where, "#define requires a macro name");
                continue;
            }
            MacroDef def;
            def.name = name;
            if (p < rest.size() && rest[p] == '(') {
                def.function_like = true;
                std::size_t close = rest.find(')', p);
                if (close == std::string::npos) {
                    diags.error(where, "unterminated parameter list in #define " + name);
                    continue;
                }
                std::string plist = rest.substr(p + 1, close - p - 1);
                std::string param;
                for (std::size_t q = 0; q <= plist.size(); ++q) {
                    if (q == plist.size() || plist[q] == ',') {
                        std::string t = trim(param);
                        if (!t.empty()) def.params.push_back(t);
                        param.clear();
                    } else {
                        param.push_back(plist[q]);
                    }
                }
                def.body = trim(rest.substr(close + 1));
            } else {
                def.body = trim(rest.substr(p));
            }
            table.define(std::move(def));
        } else if (keyword == "undef") {
            if (!live()) continue;
            if (rest.empty())
                diags.error(where, "#undef requires a name");
            else
                table.undef(rest);
        } else if (keyword == "include") {
            if (live())
                diags.error(where, "#include is not supported; storage-order macros are "
                                   "injected by the build driver");
        } else {
            if (live()) diags.error(where, "unsupported preprocessor directive '#" + keyword + "'");
        }
    }
    if (!stack.empty())
        diags.error({source.path, source.lines.empty() ? 0 : source.lines.back().line},
                    "unterminated #if block");
    return out;
}

} // namespace hft
