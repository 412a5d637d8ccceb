//------------------------------------------------------------------------------
// parser.cpp
//
// SPDX-License-Identifier: Apache-2.0
//------------------------------------------------------------------------------
#include "hft/parser.hpp"

#include <algorithm>
#include <cctype>

#include "hft/lexer.hpp"

namespace hft {
namespace {

using namespace ast;

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

bool valid_ident(const std::string& s) {
  if (s.empty()) return false;
  if (!std::isalpha(static_cast<unsigned char>(s[0])) && s[0] != '_') return false;
  for (char c : s)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
  return true;
}

//------------------------------------------------------------------------------
// Expressions
//------------------------------------------------------------------------------

class ExprParser {
public:
  ExprParser(TokenStream& ts, const SourceRef& where, Diagnostics& diags)
      : ts_(ts), where_(where), diags_(diags) {}

  ExprPtr parse() { return parse_or(); }

  /// Expression, `lo:hi` range, or bare `:` -- for subscripts, allocations
  /// and directive size members.
  ExprPtr parse_arg() {
    ExprPtr lo, hi;
    bool ranged = false;
    if (ts_.is_op(":")) {
      ts_.get();
      ranged = true;
    } else {
      lo = parse_or();
      if (!lo) return nullptr;
      if (ts_.accept_op(":")) ranged = true;
    }
    if (!ranged) return lo;
    if (!ts_.is_op(",") && !ts_.is_op(")") && !ts_.at_end()) {
      hi = parse_or();
      if (!hi) return nullptr;
    }
    return make_range(lo, hi);
  }

private:
  ExprPtr fail(const std::string& msg) {
    diags_.error(where_, msg);
    return nullptr;
  }

  ExprPtr parse_or() {
    ExprPtr e = parse_and();
    while (e && ts_.is_op(".or.")) {
      ts_.get();
      ExprPtr r = parse_and();
      if (!r) return nullptr;
      e = make_binary(".or.", e, r);
    }
    return e;
  }

  ExprPtr parse_and() {
    ExprPtr e = parse_not();
    while (e && ts_.is_op(".and.")) {
      ts_.get();
      ExprPtr r = parse_not();
      if (!r) return nullptr;
      e = make_binary(".and.", e, r);
    }
    return e;
  }

  ExprPtr parse_not() {
    if (ts_.is_op(".not.")) {
      ts_.get();
      ExprPtr e = parse_not();
      if (!e) return nullptr;
      return make_unary(".not.", e);
    }
    return parse_cmp();
  }

  static const char* relop_canonical(const std::string& op) {
    static const std::pair<const char*, const char*> kMap[] = {
        {"==", ".eq."},     {"/=", ".ne."},     {"<", ".lt."},  {">", ".gt."},
        {"<=", ".le."},     {">=", ".ge."},     {".eq.", ".eq."}, {".ne.", ".ne."},
        {".lt.", ".lt."},   {".gt.", ".gt."},   {".le.", ".le."}, {".ge.", ".ge."},
    };
    for (const auto& [written, canon] : kMap)
      if (op == written) return canon;
    return nullptr;
  }

  ExprPtr parse_cmp() {
    ExprPtr e = parse_add();
    if (!e) return nullptr;
    if (ts_.peek().kind == TokKind::Op) {
      if (const char* canon = relop_canonical(ts_.peek().text)) {
        ts_.get();
        ExprPtr r = parse_add();
        if (!r) return nullptr;
        return make_binary(canon, e, r);
      }
    }
    return e;
  }

  ExprPtr parse_add() {
    std::string sign;
    if (ts_.is_op("-") || ts_.is_op("+")) sign = ts_.get().text;
    ExprPtr e = parse_mul();
    if (!e) return nullptr;
    if (sign == "-") e = make_unary("-", e);
    while (ts_.is_op("+") || ts_.is_op("-")) {
      std::string op = ts_.get().text;
      ExprPtr r = parse_mul();
      if (!r) return nullptr;
      e = make_binary(op, e, r);
    }
    return e;
  }

  ExprPtr parse_mul() {
    ExprPtr e = parse_pow();
    while (e && (ts_.is_op("*") || ts_.is_op("/"))) {
      std::string op = ts_.get().text;
      ExprPtr r = parse_pow();
      if (!r) return nullptr;
      e = make_binary(op, e, r);
    }
    return e;
  }

  ExprPtr parse_pow() {
    ExprPtr e = parse_primary();
    if (e && ts_.is_op("**")) {
      ts_.get();
      ExprPtr r = parse_pow(); // right associative
      if (!r) return nullptr;
      return make_binary("**", e, r);
    }
    return e;
  }

  ExprPtr parse_primary() {
    const Token& t = ts_.peek();
    switch (t.kind) {
      case TokKind::Int: {
        ts_.get();
        return make_int(t.int_value, t.text);
      }
      case TokKind::Real: {
        ts_.get();
        return make_real(t.real_value, t.text);
      }
      case TokKind::String: {
        ts_.get();
        ExprPtr e = make_string(t.text);
        e->quote = t.quote;
        return e;
      }
      case TokKind::Op: {
        if (t.text == ".true." || t.text == ".false.") {
          ts_.get();
          auto e = std::make_shared<Expr>(ExprKind::LogicalLit);
          e->text = t.text;
          return e;
        }
        if (t.text == "(") {
          ts_.get();
          ExprPtr inner = parse_or();
          if (!inner) return nullptr;
          if (!ts_.accept_op(")")) return fail("expected ')'");
          return parse_postfix(make_paren(inner));
        }
        return fail("unexpected '" + t.text + "' in expression");
      }
      case TokKind::Ident: {
        ts_.get();
        ExprPtr e;
        if (ts_.accept_op("(")) {
          std::vector<ExprPtr> args;
          if (!ts_.is_op(")")) {
            while (true) {
              ExprPtr a = parse_arg();
              if (!a) return nullptr;
              args.push_back(a);
              if (ts_.accept_op(",")) continue;
              break;
            }
          }
          if (!ts_.accept_op(")")) return fail("expected ')' after subscripts of '" + t.text + "'");
          e = make_ref(t.text, std::move(args));
        } else {
          e = make_name(t.text);
        }
        return parse_postfix(e);
      }
      case TokKind::End:
        return fail("expression ends unexpectedly");
    }
    return nullptr;
  }

  ExprPtr parse_postfix(ExprPtr e) {
    while (ts_.is_op("%")) {
      ts_.get();
      const Token& comp = ts_.get();
      if (comp.kind != TokKind::Ident) return fail("expected component name after '%'");
      e = make_member(e, comp.text);
    }
    return e;
  }

  TokenStream& ts_;
  const SourceRef& where_;
  Diagnostics& diags_;
};

ExprPtr parse_expr_tokens(TokenStream& ts, const SourceRef& where, Diagnostics& diags) {
  return ExprParser(ts, where, diags).parse();
}

//------------------------------------------------------------------------------
// Directive attribute scanning: @name{attr(member, ...), attr(...)}
//------------------------------------------------------------------------------

struct DirectiveAttr {
  std::string name; // lowercased
  std::vector<std::string> members;
};

std::string directive_word(const std::string& text) {
  std::size_t i = text.find('@');
  if (i == std::string::npos) return "";
  ++i;
  std::size_t j = i;
  while (j < text.size() && (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_'))
    ++j;
  return lower(text.substr(i, j - i));
}

std::string directive_second_word(const std::string& text) {
  std::size_t i = text.find('@');
  if (i == std::string::npos) return "";
  ++i;
  while (i < text.size() && (std::isalnum(static_cast<unsigned char>(text[i])) || text[i] == '_'))
    ++i;
  while (i < text.size() && (text[i] == ' ' || text[i] == '\t')) ++i;
  std::size_t j = i;
  while (j < text.size() && (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_'))
    ++j;
  return lower(text.substr(i, j - i));
}

std::vector<std::string> split_members(const std::string& s) {
  std::vector<std::string> out;
  int depth = 0;
  std::string cur;
  for (char c : s) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == ',' && depth == 0) {
      out.push_back(trim(cur));
      cur.clear();
      continue;
    }
    cur.push_back(c);
  }
  if (!trim(cur).empty() || !out.empty()) out.push_back(trim(cur));
  return out;
}

bool scan_directive_attrs(const std::string& text, const SourceRef& where, Diagnostics& diags,
                          std::vector<DirectiveAttr>& out) {
  std::size_t open = text.find('{');
  std::size_t close = text.rfind('}');
  if (open == std::string::npos || close == std::string::npos || close < open) {
    diags.error(where, "malformed directive: expected '{...}' attribute list");
    return false;
  }
  std::string inner = text.substr(open + 1, close - open - 1);
  std::size_t i = 0;
  const std::size_t n = inner.size();
  while (i < n) {
    while (i < n && (inner[i] == ' ' || inner[i] == '\t' || inner[i] == ',')) ++i;
    if (i >= n) break;
    std::size_t j = i;
    while (j < n && (std::isalnum(static_cast<unsigned char>(inner[j])) || inner[j] == '_')) ++j;
    if (j == i) {
      diags.error(where, "malformed directive attribute list");
      return false;
    }
    DirectiveAttr attr;
    attr.name = lower(inner.substr(i, j - i));
    while (j < n && (inner[j] == ' ' || inner[j] == '\t')) ++j;
    if (j >= n || inner[j] != '(') {
      diags.error(where, "directive attribute '" + attr.name + "' is missing its '(...)' value");
      return false;
    }
    int depth = 1;
    std::size_t k = j + 1;
    while (k < n && depth > 0) {
      if (inner[k] == '(') ++depth;
      if (inner[k] == ')') --depth;
      ++k;
    }
    if (depth != 0) {
      diags.error(where, "unbalanced parentheses in directive attribute '" + attr.name + "'");
      return false;
    }
    attr.members = split_members(inner.substr(j + 1, k - j - 2));
    out.push_back(std::move(attr));
    i = k;
  }
  return true;
}

ExprPtr parse_member_expr(const std::string& text, const SourceRef& where, Diagnostics& diags) {
  auto toks = lex_statement(text, where, diags);
  TokenStream ts(std::move(toks));
  ExprPtr e = parse_expr_tokens(ts, where, diags);
  if (e && !ts.at_end()) {
    diags.error(where, "trailing text after expression '" + text + "'");
    return nullptr;
  }
  return e;
}

/// Parse `lo:hi` or a plain extent; (null, extent) for the plain form.
bool parse_member_size(const std::string& text, const SourceRef& where, Diagnostics& diags,
                       ExprPtr& lo, ExprPtr& hi) {
  auto toks = lex_statement(text, where, diags);
  TokenStream ts(std::move(toks));
  ExprParser ep(ts, where, diags);
  ExprPtr e = ep.parse_arg();
  if (!e || !ts.at_end()) {
    if (e) diags.error(where, "trailing text after size '" + text + "'");
    return false;
  }
  if (e->kind == ExprKind::Range) {
    lo = e->args[0];
    hi = e->args[1];
    if (!lo || !hi) {
      diags.error(where, "directive size ranges need both bounds: '" + text + "'");
      return false;
    }
  } else {
    lo = nullptr;
    hi = e;
  }
  return true;
}

} // namespace

//------------------------------------------------------------------------------
// Directive specs (public: used directly by tests)
//------------------------------------------------------------------------------

std::shared_ptr<ParallelRegionSpec> parse_parallel_region_spec(const LogicalLine& line,
                                                               Diagnostics& diags) {
  auto spec = std::make_shared<ParallelRegionSpec>();
  spec->ref = line.origin;
  std::vector<DirectiveAttr> attrs;
  if (!scan_directive_attrs(line.text, line.origin, diags, attrs)) return spec;

  std::vector<std::string> names;
  std::vector<std::pair<ExprPtr, ExprPtr>> sizes;
  std::vector<ExprPtr> starts, ends;
  bool saw_applies = false;

  for (const auto& attr : attrs) {
    if (attr.name == "appliesto") {
      saw_applies = true;
      spec->applies_cpu = spec->applies_gpu = false;
      for (const auto& m : attr.members) {
        std::string a = lower(m);
        if (a == "cpu")
          spec->applies_cpu = true;
        else if (a == "gpu")
          spec->applies_gpu = true;
        else
          diags.error(line.origin, "appliesTo accepts CPU and GPU, not '" + m + "'");
      }
    } else if (attr.name == "domname") {
      for (const auto& m : attr.members) {
        std::string nm = lower(m);
        if (!valid_ident(nm)) {
          diags.error(line.origin, "domName entry '" + m + "' is not an identifier");
          continue;
        }
        names.push_back(nm);
      }
    } else if (attr.name == "domsize") {
      for (const auto& m : attr.members) {
        ExprPtr lo, hi;
        if (parse_member_size(m, line.origin, diags, lo, hi))
          sizes.emplace_back(lo, hi);
      }
    } else if (attr.name == "startat") {
      for (const auto& m : attr.members)
        if (ExprPtr e = parse_member_expr(m, line.origin, diags)) starts.push_back(e);
    } else if (attr.name == "endat") {
      for (const auto& m : attr.members)
        if (ExprPtr e = parse_member_expr(m, line.origin, diags)) ends.push_back(e);
    } else if (attr.name == "reduction") {
      for (const auto& m : attr.members) {
        std::size_t colon = m.find(':');
        if (colon == std::string::npos) {
          diags.error(line.origin, "reduction entries use the form op:symbol");
          continue;
        }
        std::string op = trim(m.substr(0, colon));
        std::string sym = lower(trim(m.substr(colon + 1)));
        if (op != "+" && op != "*" && lower(op) != "max" && lower(op) != "min") {
          diags.error(line.origin, "unsupported reduction operator '" + op + "'");
          continue;
        }
        if (!valid_ident(sym)) {
          diags.error(line.origin, "reduction symbol '" + sym + "' is not an identifier");
          continue;
        }
        spec->reductions.emplace_back(op == "max" || op == "MAX" ? "max" : op, sym);
        if (lower(op) == "min") spec->reductions.back().first = "min";
      }
    } else if (attr.name == "template") {
      if (attr.members.size() == 1 && valid_ident(attr.members[0]))
        spec->template_name = attr.members[0];
      else
        diags.error(line.origin, "template takes a single name");
    } else {
      diags.error(line.origin, "unknown @parallelRegion attribute '" + attr.name + "'");
    }
  }

  if (names.empty()) {
    diags.error(line.origin, "@parallelRegion requires domName(...)");
    return spec;
  }
  if (sizes.size() != names.size()) {
    diags.error(line.origin, "@parallelRegion domSize count does not match domName");
    return spec;
  }
  if (!starts.empty() && starts.size() != names.size()) {
    diags.error(line.origin, "@parallelRegion startAt count does not match domName");
    return spec;
  }
  if (!ends.empty() && ends.size() != names.size()) {
    diags.error(line.origin, "@parallelRegion endAt count does not match domName");
    return spec;
  }
  for (std::size_t i = 0; i < names.size(); ++i) {
    RegionDomain d;
    d.name = names[i];
    d.size_lo = sizes[i].first;
    d.size_hi = sizes[i].second;
    d.start = i < starts.size() ? starts[i] : make_int(1);
    d.end = i < ends.size() ? ends[i] : clone(sizes[i].second);
    spec->domains.push_back(std::move(d));
  }
  (void)saw_applies;
  return spec;
}

DomainDependantSpec parse_domain_dependant_spec(const LogicalLine& line, Diagnostics& diags) {
  DomainDependantSpec dd;
  dd.ref = line.origin;
  std::vector<DirectiveAttr> attrs;
  if (!scan_directive_attrs(line.text, line.origin, diags, attrs)) return dd;

  for (const auto& attr : attrs) {
    if (attr.name == "attribute") {
      for (const auto& m : attr.members) {
        std::string a = lower(m);
        if (a == "autodom")
          dd.auto_dom = true;
        else if (a == "present")
          dd.present = true;
        else if (a == "transferhere")
          dd.transfer_here = true;
        else if (a == "host")
          dd.host = true;
        else
          diags.error(line.origin, "unknown @domainDependant attribute flag '" + m + "'");
      }
    } else if (attr.name == "domname") {
      for (const auto& m : attr.members) {
        std::string nm = lower(m);
        if (!valid_ident(nm)) {
          diags.error(line.origin, "domName entry '" + m + "' is not an identifier");
          continue;
        }
        dd.dom_names.push_back(nm);
      }
    } else if (attr.name == "domsize") {
      for (const auto& m : attr.members) {
        ExprPtr lo, hi;
        if (parse_member_size(m, line.origin, diags, lo, hi)) dd.dom_sizes.emplace_back(lo, hi);
      }
    } else if (attr.name == "accpp") {
      if (attr.members.size() == 1 && valid_ident(attr.members[0]))
        dd.acc_pp = attr.members[0];
      else
        diags.error(line.origin, "accPP takes a single macro name");
    } else if (attr.name == "dompp") {
      if (attr.members.size() == 1 && valid_ident(attr.members[0]))
        dd.dom_pp = attr.members[0];
      else
        diags.error(line.origin, "domPP takes a single macro name");
    } else {
      diags.error(line.origin, "unknown @domainDependant attribute '" + attr.name + "'");
    }
  }

  if (dd.dom_names.size() != dd.dom_sizes.size())
    diags.error(line.origin, "@domainDependant domSize count does not match domName");
  if (dd.present && dd.transfer_here)
    diags.error(line.origin, "present and transferHere are mutually exclusive");
  if (dd.host && (dd.present || dd.transfer_here))
    diags.error(line.origin, "host excludes the device data attributes present/transferHere");
  return dd;
}

//------------------------------------------------------------------------------
// Statement / structure parser
//------------------------------------------------------------------------------

namespace {

struct Stop {
  bool end_do = false;
  bool end_if = false;
  bool end_routine = false;
  bool end_region = false;
  bool allow_else = false;
  const char* describe = "end of block";
};

enum class Term { Matched, Else, Structural, Eof };

class Parser {
public:
  Parser(const std::vector<LogicalLine>& lines, Diagnostics& diags, Program& prog)
      : lines_(lines), diags_(diags), prog_(prog) {}

  void run() {
    while (!at_end()) {
      const LogicalLine& ln = *cur();
      if (ln.cls == LineClass::Comment) {
        Statement c(StmtKind::Comment);
        c.raw = trim(ln.text);
        c.ref = ln.origin;
        pending_comments_.push_back(std::move(c));
        advance();
        continue;
      }
      if (ln.cls == LineClass::Directive) {
        err(ln.origin, "directives are only valid inside a module");
        advance();
        continue;
      }
      auto toks = lex_statement(ln.text, ln.origin, diags_);
      TokenStream ts(std::move(toks));
      if (ts.at_end()) {
        advance();
        continue;
      }
      if (ts.is_ident("module")) {
        parse_module(ts);
        continue;
      }
      err(ln.origin, "expected a module at the top level, found '" + ts.peek().raw + "'");
      advance();
    }
  }

private:
  //---------------- cursor ----------------

  bool at_end() const { return li_ >= lines_.size(); }
  const LogicalLine* cur() const { return at_end() ? nullptr : &lines_[li_]; }
  void advance() { ++li_; }
  SourceRef here() const {
    if (!at_end()) return lines_[li_].origin;
    return lines_.empty() ? SourceRef{} : lines_.back().origin;
  }
  void err(const SourceRef& r, const std::string& msg) { diags_.error(r, msg); }

  //---------------- modules ----------------

  void parse_module(TokenStream& ts) {
    SourceRef rf = here();
    ts.get(); // module
    ModuleDecl m;
    m.ref = rf;
    if (ts.peek().kind != TokKind::Ident) {
      err(rf, "expected module name");
      advance();
      return;
    }
    m.name = ts.get().text;
    if (!ts.at_end()) err(rf, "trailing text after module header");
    advance();

    m.spec_comments = std::move(pending_comments_);
    pending_comments_.clear();
    parse_spec_part(m.uses, m.implicit_none, m.specs, m.spec_comments, nullptr);

    bool closed = false;
    bool in_contains = false;
    std::string scheme;      // active @scheme block name, empty outside
    SourceRef scheme_ref;
    std::vector<Statement> routine_comments;

    while (!at_end()) {
      const LogicalLine& ln = *cur();
      if (ln.cls == LineClass::Comment) {
        Statement c(StmtKind::Comment);
        c.raw = trim(ln.text);
        c.ref = ln.origin;
        routine_comments.push_back(std::move(c));
        advance();
        continue;
      }
      if (ln.cls == LineClass::Directive) {
        std::string word = directive_word(ln.text);
        if (word == "scheme") {
          if (!in_contains) {
            err(ln.origin, "@scheme blocks belong after 'contains'");
          }
          if (!scheme.empty()) {
            err(ln.origin, "@scheme blocks cannot nest");
            advance();
            continue;
          }
          std::size_t open = ln.text.find('{');
          std::size_t close = ln.text.rfind('}');
          if (open == std::string::npos || close == std::string::npos || close < open) {
            err(ln.origin, "malformed @scheme directive: expected @scheme{NAME}");
            advance();
            continue;
          }
          scheme = lower(trim(ln.text.substr(open + 1, close - open - 1)));
          if (!valid_ident(scheme)) {
            err(ln.origin, "@scheme needs an implementation name");
            scheme.clear();
          }
          scheme_ref = ln.origin;
          advance();
          continue;
        }
        if (word == "end" && directive_second_word(ln.text) == "scheme") {
          if (scheme.empty())
            err(ln.origin, "'@end scheme' without an open @scheme block");
          scheme.clear();
          advance();
          continue;
        }
        err(ln.origin, "unexpected directive '@" + word + "' at module level");
        advance();
        continue;
      }
      auto toks = lex_statement(ln.text, ln.origin, diags_);
      TokenStream ts2(std::move(toks));
      if (ts2.at_end()) {
        advance();
        continue;
      }
      if (ts2.is_ident("contains")) {
        if (in_contains) err(ln.origin, "duplicate 'contains'");
        in_contains = true;
        advance();
        continue;
      }
      if (ts2.is_ident("end")) {
        ts2.get();
        std::string kind = ts2.peek().kind == TokKind::Ident ? ts2.get().text : "";
        if (kind == "module") {
          if (ts2.peek().kind == TokKind::Ident && ts2.get().text != m.name)
            err(ln.origin, "'end module' name does not match '" + m.name + "'");
          advance();
          closed = true;
          break;
        }
        err(ln.origin, "unexpected 'end " + kind + "' at module level");
        advance();
        continue;
      }
      if (ts2.is_ident("subroutine") || ts2.is_ident("attributes")) {
        if (!in_contains)
          err(ln.origin, "subroutines must follow 'contains'");
        RoutineDecl r;
        if (parse_routine(ts2, ln.origin, r)) {
          r.scheme = scheme;
          // comments collected between routines lead the routine's spec part
          r.spec_comments.insert(r.spec_comments.begin(),
                                 std::make_move_iterator(routine_comments.begin()),
                                 std::make_move_iterator(routine_comments.end()));
          routine_comments.clear();
          m.routines.push_back(std::move(r));
        }
        continue;
      }
      if (ts2.is_ident("function")) {
        err(ln.origin, "functions are not part of the accepted subset; use subroutines");
        advance();
        continue;
      }
      if (in_contains) {
        err(ln.origin, "only subroutine definitions may follow 'contains'");
      } else {
        err(ln.origin, "declarations must precede 'contains'");
      }
      advance();
    }
    if (!scheme.empty()) err(scheme_ref, "@scheme block is never closed with '@end scheme'");
    if (!closed) err(here(), "missing 'end module " + m.name + "'");
    prog_.modules.push_back(std::move(m));
  }

  //---------------- routines ----------------

  bool parse_routine(TokenStream& ts, const SourceRef& rf, RoutineDecl& r) {
    r.ref = rf;
    if (ts.accept_ident("attributes")) {
      if (!ts.accept_op("(")) {
        err(rf, "expected '(' after attributes");
        advance();
        return false;
      }
      std::string a = ts.peek().kind == TokKind::Ident ? ts.get().text : "";
      if (a == "global")
        r.kind = RoutineKind::Global;
      else if (a == "device")
        r.kind = RoutineKind::Device;
      else
        err(rf, "unsupported routine attribute '" + a + "'");
      if (!ts.accept_op(")")) err(rf, "expected ')' after attributes");
    }
    if (!ts.accept_ident("subroutine")) {
      err(rf, "expected 'subroutine'");
      advance();
      return false;
    }
    if (ts.peek().kind != TokKind::Ident) {
      err(rf, "expected subroutine name");
      advance();
      return false;
    }
    r.name = ts.get().text;
    if (ts.accept_op("(")) {
      if (!ts.is_op(")")) {
        while (true) {
          if (ts.peek().kind != TokKind::Ident) {
            err(rf, "expected dummy argument name");
            break;
          }
          r.params.push_back(ts.get().text);
          if (ts.accept_op(",")) continue;
          break;
        }
      }
      if (!ts.accept_op(")")) err(rf, "expected ')' after dummy arguments");
    }
    if (!ts.at_end()) err(rf, "trailing text after subroutine header");
    advance();

    parse_spec_part(r.uses, r.implicit_none, r.specs, r.spec_comments, &r);

    Stop stop;
    stop.end_routine = true;
    stop.describe = "'end subroutine'";
    Term t = parse_block(stop, 0, false, &r, r.body);
    if (t == Term::Structural) {
      // leave the structural line for the module loop; the missing end was
      // already reported by parse_block
    } else if (t == Term::Eof) {
      // reported by parse_block
    }
    return true;
  }

  //---------------- specification part ----------------

  void parse_spec_part(std::vector<UseStmt>& uses, bool& implicit_none,
                       std::vector<SymbolSpec>& specs, std::vector<Statement>& comments,
                       RoutineDecl* routine) {
    bool after_dd = false;
    // comments attach forward: to the next spec construct, or — when the
    // spec part ends first — back to the body so regions keep their leads
    std::size_t comment_run = lines_.size();
    auto flush = [&]() {
      for (std::size_t at = comment_run; at < li_; ++at) {
        if (lines_[at].cls != LineClass::Comment) continue;
        Statement c(StmtKind::Comment);
        c.raw = trim(lines_[at].text);
        c.ref = lines_[at].origin;
        comments.push_back(std::move(c));
      }
      comment_run = lines_.size();
    };
    auto rewind = [&]() {
      if (comment_run < li_) li_ = comment_run;
    };
    while (!at_end()) {
      const LogicalLine& ln = *cur();
      if (ln.cls == LineClass::Comment) {
        if (comment_run > li_) comment_run = li_;
        advance();
        continue;
      }
      if (ln.cls == LineClass::Directive) {
        std::string word = directive_word(ln.text);
        if (word == "domaindependant") {
          if (!routine) {
            err(ln.origin, "@domainDependant is only valid inside a subroutine");
            flush();
            advance();
            skip_to_end_directive("domaindependant");
            continue;
          }
          flush();
          parse_domain_dependant_block(*routine, comments);
          after_dd = true;
          continue;
        }
        rewind();
        return; // body directive such as @parallelRegion
      }
      auto toks = lex_statement(ln.text, ln.origin, diags_);
      TokenStream ts(std::move(toks));
      if (ts.at_end()) {
        advance();
        continue;
      }
      const Token& first = ts.peek();
      if (first.kind != TokKind::Ident) {
        rewind();
        return;
      }
      const std::string& w = first.text;
      bool is_spec = w == "use" || w == "implicit" || w == "real" || w == "integer" ||
                     w == "type" || w == "data";
      if (!is_spec) {
        rewind();
        return;
      }
      flush();
      if (after_dd)
        err(ln.origin, "declarations must precede @domainDependant directives");
      if (w == "use") {
        parse_use(ts, ln.origin, uses);
      } else if (w == "implicit") {
        ts.get();
        if (ts.accept_ident("none") && ts.at_end())
          implicit_none = true;
        else
          err(ln.origin, "only 'implicit none' is supported");
      } else if (w == "data") {
        parse_data(ts, ln.origin, specs);
      } else {
        parse_declaration(ts, ln.origin, specs);
      }
      advance();
    }
    rewind();
  }

  void skip_to_end_directive(const std::string& which) {
    while (!at_end()) {
      const LogicalLine& ln = *cur();
      if (ln.cls == LineClass::Directive && directive_word(ln.text) == "end" &&
          directive_second_word(ln.text) == which) {
        advance();
        return;
      }
      advance();
    }
  }

  void parse_domain_dependant_block(RoutineDecl& r, std::vector<Statement>& comments) {
    const LogicalLine& header = *cur();
    DomainDependantSpec dd = parse_domain_dependant_spec(header, diags_);
    advance();
    bool closed = false;
    while (!at_end()) {
      const LogicalLine& ln = *cur();
      if (ln.cls == LineClass::Comment) {
        Statement c(StmtKind::Comment);
        c.raw = trim(ln.text);
        c.ref = ln.origin;
        comments.push_back(std::move(c));
        advance();
        continue;
      }
      if (ln.cls == LineClass::Directive) {
        if (directive_word(ln.text) == "end" &&
            directive_second_word(ln.text) == "domaindependant") {
          advance();
          closed = true;
        } else {
          err(ln.origin, "@domainDependant block is not closed before the next directive");
        }
        break;
      }
      auto toks = lex_statement(ln.text, ln.origin, diags_);
      TokenStream ts(std::move(toks));
      bool ok = true;
      while (ok && !ts.at_end()) {
        if (ts.peek().kind != TokKind::Ident) {
          err(ln.origin, "expected a symbol list inside @domainDependant");
          ok = false;
          break;
        }
        dd.symbols.push_back(ts.get().text);
        if (ts.at_end()) break;
        if (!ts.accept_op(",")) {
          err(ln.origin, "symbols inside @domainDependant are separated by commas");
          break;
        }
      }
      advance();
    }
    if (!closed && at_end())
      err(dd.ref, "@domainDependant block is never closed with '@end domainDependant'");
    if (dd.symbols.empty())
      err(dd.ref, "@domainDependant lists no symbols");
    r.domain_dependants.push_back(std::move(dd));
  }

  void parse_use(TokenStream& ts, const SourceRef& rf, std::vector<UseStmt>& uses) {
    ts.get(); // use
    if (ts.peek().kind != TokKind::Ident) {
      err(rf, "expected module name after 'use'");
      return;
    }
    UseStmt u;
    u.module = ts.get().text;
    if (ts.accept_op(",")) {
      if (!ts.accept_ident("only") || !ts.accept_op(":")) {
        err(rf, "expected 'only:' in use statement");
        return;
      }
      while (true) {
        if (ts.peek().kind != TokKind::Ident) {
          err(rf, "expected name in only list");
          return;
        }
        u.only.push_back(ts.get().text);
        if (!ts.accept_op(",")) break;
      }
    }
    if (!ts.at_end()) err(rf, "trailing text after use statement");
    uses.push_back(std::move(u));
  }

  bool parse_dims(TokenStream& ts, const SourceRef& rf, std::vector<DimSpec>& dims) {
    // caller consumed '('
    while (true) {
      DimSpec d;
      if (ts.accept_op(":")) {
        d.deferred = true;
      } else {
        ExprParser ep(ts, rf, diags_);
        ExprPtr e = ep.parse_arg();
        if (!e) return false;
        if (e->kind == ExprKind::Range) {
          if (!e->args[1]) {
            err(rf, "assumed-size dimensions are not supported");
            return false;
          }
          d.lower = e->args[0];
          d.upper = e->args[1];
        } else {
          d.upper = e;
        }
      }
      dims.push_back(std::move(d));
      if (ts.accept_op(",")) continue;
      break;
    }
    if (!ts.accept_op(")")) {
      err(rf, "expected ')' after dimension list");
      return false;
    }
    return true;
  }

  void parse_declaration(TokenStream& ts, const SourceRef& rf, std::vector<SymbolSpec>& specs) {
    SymbolSpec proto;
    proto.ref = rf;
    std::string tw = ts.get().text;
    if (tw == "real") {
      long long kind = 0;
      if (ts.accept_op("(")) {
        if (ts.peek().kind == TokKind::Int) kind = ts.get().int_value;
        if (!ts.accept_op(")")) {
          err(rf, "expected ')' after real kind");
          return;
        }
      }
      if (kind != 8) {
        err(rf, "reals must be declared real(8) in the accepted subset");
        return;
      }
      proto.type = BaseType::Real8;
    } else if (tw == "integer") {
      if (ts.accept_op("(")) {
        long long kind = ts.peek().kind == TokKind::Int ? ts.get().int_value : 0;
        if (!ts.accept_op(")")) {
          err(rf, "expected ')' after integer kind");
          return;
        }
        if (kind != 4) {
          err(rf, "integers must be default kind or integer(4)");
          return;
        }
      }
      proto.type = BaseType::Integer4;
    } else { // type
      if (!ts.accept_op("(") || !ts.accept_ident("dim3") || !ts.accept_op(")")) {
        err(rf, "only type(dim3) derived types are supported");
        return;
      }
      proto.type = BaseType::Dim3;
    }

    std::vector<DimSpec> shared_dims;
    while (ts.accept_op(",")) {
      if (ts.peek().kind != TokKind::Ident) {
        err(rf, "expected declaration attribute");
        return;
      }
      std::string a = ts.get().text;
      if (a == "intent") {
        if (!ts.accept_op("(")) {
          err(rf, "expected '(' after intent");
          return;
        }
        std::string dir = ts.peek().kind == TokKind::Ident ? ts.get().text : "";
        if (dir == "in")
          proto.intent = Intent::In;
        else if (dir == "out")
          proto.intent = Intent::Out;
        else if (dir == "inout")
          proto.intent = Intent::InOut;
        else
          err(rf, "intent must be in, out or inout");
        if (!ts.accept_op(")")) {
          err(rf, "expected ')' after intent");
          return;
        }
      } else if (a == "pointer") {
        proto.pointer = true;
      } else if (a == "parameter") {
        proto.parameter = true;
      } else if (a == "save") {
        proto.save = true;
      } else if (a == "device") {
        proto.device = true;
      } else if (a == "value") {
        proto.value = true;
      } else if (a == "dimension") {
        if (!ts.accept_op("(")) {
          err(rf, "expected '(' after dimension");
          return;
        }
        if (!parse_dims(ts, rf, shared_dims)) return;
      } else if (a == "allocatable") {
        err(rf, "allocatable is not supported; use pointer arrays");
        return;
      } else {
        err(rf, "unknown declaration attribute '" + a + "'");
        return;
      }
    }
    if (!ts.accept_op("::")) {
      err(rf, "expected '::' in declaration");
      return;
    }
    while (true) {
      if (ts.peek().kind != TokKind::Ident) {
        err(rf, "expected declared name");
        return;
      }
      SymbolSpec s = proto;
      s.name = ts.get().text;
      s.dims = shared_dims;
      if (ts.accept_op("(")) {
        s.dims.clear();
        if (!parse_dims(ts, rf, s.dims)) return;
      }
      if (ts.accept_op("=")) {
        ExprPtr init = parse_expr_tokens(ts, rf, diags_);
        if (!init) return;
        s.init = init;
      }
      if (s.parameter && !s.init) err(rf, "parameter '" + s.name + "' needs a value");
      specs.push_back(std::move(s));
      if (ts.accept_op(",")) continue;
      break;
    }
    if (!ts.at_end()) err(rf, "trailing text after declaration");
  }

  void parse_data(TokenStream& ts, const SourceRef& rf, std::vector<SymbolSpec>& specs) {
    ts.get(); // data
    if (ts.peek().kind != TokKind::Ident) {
      err(rf, "expected symbol name after 'data'");
      return;
    }
    std::string name = ts.get().text;
    if (!ts.accept_op("/")) {
      err(rf, "expected '/value/' in data statement");
      return;
    }
    // a plain signed literal: the closing '/' must not read as division
    bool neg = ts.accept_op("-");
    if (!neg) ts.accept_op("+");
    const Token& v = ts.get();
    ExprPtr value;
    if (v.kind == TokKind::Int)
      value = make_int(v.int_value, v.text);
    else if (v.kind == TokKind::Real)
      value = make_real(v.real_value, v.text);
    else {
      err(rf, "data values must be numeric literals");
      return;
    }
    if (neg) value = make_unary("-", value);
    if (!ts.accept_op("/")) {
      err(rf, "data statements hold a single scalar value in the accepted subset");
      return;
    }
    if (!ts.at_end()) {
      err(rf, "trailing text after data statement");
      return;
    }
    for (SymbolSpec& s : specs) {
      if (s.name == name) {
        if (!s.dims.empty()) {
          err(rf, "data statements are limited to scalars");
          return;
        }
        s.data_init = true;
        s.init = value;
        return;
      }
    }
    err(rf, "data statement names undeclared symbol '" + name + "'");
  }

  //---------------- executable statements ----------------

  Term parse_block(const Stop& stop, int depth, bool in_region, RoutineDecl* r,
                   std::vector<Statement>& out) {
    while (!at_end()) {
      const LogicalLine& ln = *cur();
      SourceRef rf = ln.origin;
      if (ln.cls == LineClass::Comment) {
        Statement c(StmtKind::Comment);
        c.raw = trim(ln.text);
        c.ref = rf;
        out.push_back(std::move(c));
        advance();
        continue;
      }
      if (ln.cls == LineClass::Directive) {
        std::string word = directive_word(ln.text);
        if (word == "parallelregion") {
          if (in_region) {
            err(rf, "parallel regions cannot nest");
          } else if (depth > 0) {
            err(rf, "parallel regions must appear at the top level of a routine body");
          }
          auto spec = parse_parallel_region_spec(ln, diags_);
          advance();
          Statement st(StmtKind::Region);
          st.ref = rf;
          st.region = spec;
          Stop rs;
          rs.end_region = true;
          rs.describe = "'@end parallelRegion'";
          parse_block(rs, 0, true, r, st.body);
          if (r && !in_region && depth == 0) r->regions.push_back(spec);
          out.push_back(std::move(st));
          continue;
        }
        if (word == "end") {
          std::string second = directive_second_word(ln.text);
          if (second == "parallelregion" && stop.end_region) {
            advance();
            return Term::Matched;
          }
          err(rf, "unexpected '@end " + second + "'");
          advance();
          continue;
        }
        if (word == "domaindependant") {
          err(rf, "@domainDependant must appear between the specification and "
                  "implementation parts of a subroutine");
          advance();
          skip_to_end_directive("domaindependant");
          continue;
        }
        err(rf, "unexpected directive '@" + word + "' in a routine body");
        advance();
        continue;
      }

      auto toks = lex_statement(ln.text, rf, diags_);
      TokenStream ts(std::move(toks));
      if (ts.at_end()) {
        advance();
        continue;
      }
      const Token& first = ts.peek();
      if (first.kind == TokKind::Ident) {
        const std::string& w = first.text;
        if (w == "end" || w == "enddo" || w == "endif") {
          std::string kind;
          ts.get();
          if (w == "enddo")
            kind = "do";
          else if (w == "endif")
            kind = "if";
          else
            kind = ts.peek().kind == TokKind::Ident ? ts.get().text : "";
          if (kind == "do" && stop.end_do) {
            advance();
            return Term::Matched;
          }
          if (kind == "if" && stop.end_if) {
            advance();
            return Term::Matched;
          }
          if (kind == "subroutine" && stop.end_routine) {
            if (ts.peek().kind == TokKind::Ident && r && ts.get().text != r->name)
              err(rf, "'end subroutine' name does not match '" + r->name + "'");
            advance();
            return Term::Matched;
          }
          if (kind == "subroutine" || kind == "module") {
            err(rf, "expected " + std::string(stop.describe) + " before 'end " + kind + "'");
            return Term::Structural;
          }
          err(rf, "unexpected 'end " + kind + "'");
          advance();
          continue;
        }
        if (w == "else" || w == "elseif") {
          if (stop.allow_else) return Term::Else;
          err(rf, "'" + w + "' outside an if construct");
          advance();
          continue;
        }
        if (w == "contains" || w == "subroutine" || w == "module" || w == "function" ||
            w == "attributes" || w == "program") {
          err(rf, "expected " + std::string(stop.describe) + " before '" + w + "'");
          return Term::Structural;
        }
        if (w == "use" || w == "implicit" || w == "real" || w == "integer" || w == "type" ||
            w == "data") {
          err(rf, "declarations must appear before the first executable statement");
          advance();
          continue;
        }
        if (w == "do") {
          parse_do(ts, rf, depth, in_region, r, out);
          continue;
        }
        if (w == "if") {
          parse_if(ts, rf, depth, in_region, r, out);
          continue;
        }
      }
      Statement st(StmtKind::Return);
      if (parse_simple(ts, rf, ln.text, st)) out.push_back(std::move(st));
      advance();
    }
    err(here(), "missing " + std::string(stop.describe));
    return Term::Eof;
  }

  void parse_do(TokenStream& ts, const SourceRef& rf, int depth, bool in_region, RoutineDecl* r,
                std::vector<Statement>& out) {
    ts.get(); // do
    if (ts.is_ident("while")) {
      ts.get();
      if (!ts.accept_op("(")) {
        err(rf, "expected '(' after do while");
        advance();
        return;
      }
      ExprPtr cond = parse_expr_tokens(ts, rf, diags_);
      if (!cond || !ts.accept_op(")") || !ts.at_end()) {
        if (cond) err(rf, "malformed do while header");
        advance();
        return;
      }
      advance();
      Statement st(StmtKind::DoWhile);
      st.ref = rf;
      st.e1 = cond;
      Stop stop;
      stop.end_do = true;
      stop.describe = "'end do'";
      parse_block(stop, depth + 1, in_region, r, st.body);
      out.push_back(std::move(st));
      return;
    }
    if (ts.peek().kind != TokKind::Ident) {
      err(rf, "expected loop variable after 'do'");
      advance();
      return;
    }
    Statement st(StmtKind::Do);
    st.ref = rf;
    st.name = ts.get().text;
    if (!ts.accept_op("=")) {
      err(rf, "expected '=' in do header");
      advance();
      return;
    }
    st.e1 = parse_expr_tokens(ts, rf, diags_);
    if (!st.e1 || !ts.accept_op(",")) {
      if (st.e1) err(rf, "expected ',' between do bounds");
      advance();
      return;
    }
    st.e2 = parse_expr_tokens(ts, rf, diags_);
    if (!st.e2) {
      advance();
      return;
    }
    if (ts.accept_op(",")) {
      st.e3 = parse_expr_tokens(ts, rf, diags_);
      if (!st.e3) {
        advance();
        return;
      }
    }
    if (!ts.at_end()) err(rf, "trailing text after do header");
    advance();
    Stop stop;
    stop.end_do = true;
    stop.describe = "'end do'";
    parse_block(stop, depth + 1, in_region, r, st.body);
    out.push_back(std::move(st));
  }

  void parse_if(TokenStream& ts, const SourceRef& rf, int depth, bool in_region, RoutineDecl* r,
                std::vector<Statement>& out) {
    ts.get(); // if
    if (!ts.accept_op("(")) {
      err(rf, "expected '(' after if");
      advance();
      return;
    }
    ExprPtr cond = parse_expr_tokens(ts, rf, diags_);
    if (!cond || !ts.accept_op(")")) {
      if (cond) err(rf, "expected ')' after if condition");
      advance();
      return;
    }
    Statement st(StmtKind::If);
    st.ref = rf;
    if (ts.is_ident("then")) {
      ts.get();
      if (!ts.at_end()) err(rf, "trailing text after 'then'");
      advance();
      bool have_else_arm = false;
      while (true) {
        st.conditions.push_back(cond);
        st.bodies.emplace_back();
        Stop stop;
        stop.end_if = true;
        stop.allow_else = true;
        stop.describe = "'end if'";
        Term t = parse_block(stop, depth + 1, in_region, r, st.bodies.back());
        if (t == Term::Matched) break;
        if (t == Term::Else) {
          const LogicalLine& eln = *cur();
          auto etoks = lex_statement(eln.text, eln.origin, diags_);
          TokenStream ets(std::move(etoks));
          bool elseif = false;
          if (ets.accept_ident("elseif")) {
            elseif = true;
          } else {
            ets.accept_ident("else");
            elseif = ets.is_ident("if");
            if (elseif) ets.get();
          }
          if (elseif) {
            if (have_else_arm) err(eln.origin, "'else if' after 'else'");
            if (!ets.accept_op("(")) {
              err(eln.origin, "expected '(' after else if");
              advance();
              break;
            }
            cond = parse_expr_tokens(ets, eln.origin, diags_);
            if (!cond || !ets.accept_op(")") || !ets.accept_ident("then") || !ets.at_end()) {
              if (cond) err(eln.origin, "malformed else if header");
              advance();
              break;
            }
            advance();
            continue;
          }
          if (!ets.at_end()) {
            err(eln.origin, "trailing text after 'else'");
          }
          if (have_else_arm) err(eln.origin, "duplicate 'else'");
          have_else_arm = true;
          cond = nullptr;
          advance();
          continue;
        }
        break; // Structural / Eof already reported
      }
      out.push_back(std::move(st));
      return;
    }
    // one-line form: the guarded statement shares the line
    Statement inner(StmtKind::Return);
    if (!parse_simple(ts, rf, cur()->text, inner)) {
      advance();
      return;
    }
    st.conditions.push_back(cond);
    st.bodies.push_back({std::move(inner)});
    out.push_back(std::move(st));
    advance();
  }

  /// Non-block statements; `ts` is positioned at the first token.
  bool parse_simple(TokenStream& ts, const SourceRef& rf, const std::string& line_text,
                    Statement& out) {
    const Token& first = ts.peek();
    if (first.kind == TokKind::Ident) {
      const std::string& w = first.text;
      if (w == "call") return parse_call(ts, rf, out);
      if (w == "return" || w == "exit" || w == "cycle") {
        ts.get();
        if (!ts.at_end()) {
          err(rf, "trailing text after '" + w + "'");
          return false;
        }
        out = Statement(w == "return"  ? StmtKind::Return
                        : w == "exit" ? StmtKind::Exit
                                      : StmtKind::Cycle);
        out.ref = rf;
        return true;
      }
      if (w == "print") return parse_print(ts, rf, out);
      if (w == "allocate") return parse_allocate(ts, rf, out);
      if (w == "deallocate") return parse_deallocate(ts, rf, out);
      if (w == "read" || w == "write" || w == "open" || w == "close" || w == "rewind" ||
          w == "flush" || w == "stop") {
        out = Statement(StmtKind::Io);
        out.ref = rf;
        out.name = w;
        // from the verb onward, so a one-line `if (...) stop` keeps only its body
        out.raw = trim(line_text.substr(first.column - 1));
        return true;
      }
    }
    return parse_assignment(ts, rf, out);
  }

  bool parse_call(TokenStream& ts, const SourceRef& rf, Statement& out) {
    ts.get(); // call
    if (ts.peek().kind != TokKind::Ident) {
      err(rf, "expected subroutine name after 'call'");
      return false;
    }
    out = Statement(StmtKind::Call);
    out.ref = rf;
    out.name = ts.get().text;
    if (ts.accept_op("<<<")) {
      out.launch_grid = parse_expr_tokens(ts, rf, diags_);
      if (!out.launch_grid || !ts.accept_op(",")) {
        if (out.launch_grid) err(rf, "expected ',' between launch grid and block");
        return false;
      }
      out.launch_block = parse_expr_tokens(ts, rf, diags_);
      if (!out.launch_block || !ts.accept_op(">>>")) {
        if (out.launch_block) err(rf, "expected '>>>' after launch configuration");
        return false;
      }
    }
    if (ts.accept_op("(")) {
      if (!ts.is_op(")")) {
        while (true) {
          ExprPtr a = parse_expr_tokens(ts, rf, diags_);
          if (!a) return false;
          out.exprs.push_back(a);
          if (ts.accept_op(",")) continue;
          break;
        }
      }
      if (!ts.accept_op(")")) {
        err(rf, "expected ')' after call arguments");
        return false;
      }
    }
    if (!ts.at_end()) {
      err(rf, "trailing text after call statement");
      return false;
    }
    return true;
  }

  bool parse_print(TokenStream& ts, const SourceRef& rf, Statement& out) {
    ts.get(); // print
    if (!ts.accept_op("*")) {
      err(rf, "only list-directed 'print *' is supported");
      return false;
    }
    out = Statement(StmtKind::Print);
    out.ref = rf;
    if (ts.at_end()) return true;
    if (!ts.accept_op(",")) {
      err(rf, "expected ',' after 'print *'");
      return false;
    }
    while (true) {
      ExprPtr e = parse_expr_tokens(ts, rf, diags_);
      if (!e) return false;
      out.exprs.push_back(e);
      if (ts.accept_op(",")) continue;
      break;
    }
    if (!ts.at_end()) {
      err(rf, "trailing text after print statement");
      return false;
    }
    return true;
  }

  bool parse_allocate(TokenStream& ts, const SourceRef& rf, Statement& out) {
    ts.get(); // allocate
    if (!ts.accept_op("(")) {
      err(rf, "expected '(' after allocate");
      return false;
    }
    out = Statement(StmtKind::Allocate);
    out.ref = rf;
    while (true) {
      ExprPtr e = parse_expr_tokens(ts, rf, diags_);
      if (!e) return false;
      if (e->kind != ExprKind::Ref) {
        err(rf, "allocate requires array bounds, e.g. allocate(a(1:n))");
        return false;
      }
      out.exprs.push_back(e);
      if (ts.accept_op(",")) continue;
      break;
    }
    if (!ts.accept_op(")") || !ts.at_end()) {
      err(rf, "malformed allocate statement");
      return false;
    }
    return true;
  }

  bool parse_deallocate(TokenStream& ts, const SourceRef& rf, Statement& out) {
    ts.get(); // deallocate
    if (!ts.accept_op("(")) {
      err(rf, "expected '(' after deallocate");
      return false;
    }
    out = Statement(StmtKind::Deallocate);
    out.ref = rf;
    while (true) {
      if (ts.peek().kind != TokKind::Ident) {
        err(rf, "expected object name in deallocate");
        return false;
      }
      out.exprs.push_back(make_name(ts.get().text));
      if (ts.accept_op(",")) continue;
      break;
    }
    if (!ts.accept_op(")") || !ts.at_end()) {
      err(rf, "malformed deallocate statement");
      return false;
    }
    return true;
  }

  bool parse_assignment(TokenStream& ts, const SourceRef& rf, Statement& out) {
    ExprPtr lhs = parse_expr_tokens(ts, rf, diags_);
    if (!lhs) return false;
    if (ts.accept_op("=>")) {
      if (lhs->kind != ExprKind::Name) {
        err(rf, "pointer assignment targets a whole pointer");
        return false;
      }
      ExprPtr rhs = parse_expr_tokens(ts, rf, diags_);
      if (!rhs) return false;
      if (rhs->kind != ExprKind::Name) {
        err(rf, "pointer assignment takes a plain name on the right-hand side");
        return false;
      }
      if (!ts.at_end()) {
        err(rf, "trailing text after pointer assignment");
        return false;
      }
      out = Statement(StmtKind::PointerAssign);
      out.ref = rf;
      out.e1 = lhs;
      out.e2 = rhs;
      return true;
    }
    if (!ts.accept_op("=")) {
      err(rf, "expected assignment");
      return false;
    }
    if (lhs->kind != ExprKind::Name && lhs->kind != ExprKind::Ref) {
      err(rf, "left-hand side of assignment must be a variable or array element");
      return false;
    }
    ExprPtr rhs = parse_expr_tokens(ts, rf, diags_);
    if (!rhs) return false;
    if (!ts.at_end()) {
      err(rf, "trailing text after assignment");
      return false;
    }
    out = Statement(StmtKind::Assign);
    out.ref = rf;
    out.e1 = lhs;
    out.e2 = rhs;
    return true;
  }

  const std::vector<LogicalLine>& lines_;
  std::size_t li_ = 0;
  Diagnostics& diags_;
  Program& prog_;
  std::vector<Statement> pending_comments_;
};

} // namespace

//------------------------------------------------------------------------------
// Public entry points
//------------------------------------------------------------------------------

Program parse_program(const std::vector<std::vector<LogicalLine>>& files, Diagnostics& diags) {
  Program p;
  for (const auto& f : files) Parser(f, diags, p).run();
  return p;
}

Program parse_program_source(const std::vector<LogicalLine>& lines, Diagnostics& diags) {
  Program p;
  Parser(lines, diags, p).run();
  return p;
}

ExprPtr parse_expression_text(const std::string& text, const SourceRef& where,
                              Diagnostics& diags) {
  auto toks = lex_statement(text, where, diags);
  TokenStream ts(std::move(toks));
  ExprPtr e = parse_expr_tokens(ts, where, diags);
  if (e && !ts.at_end()) {
    diags.error(where, "trailing text after expression");
    return nullptr;
  }
  return e;
}

} // namespace hft
