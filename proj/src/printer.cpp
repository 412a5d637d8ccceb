//------------------------------------------------------------------------------
// printer.cpp
//
// SPDX-License-Identifier: Apache-2.0
//------------------------------------------------------------------------------
#include "hft/printer.hpp"

namespace hft {

namespace {

using namespace ast;

std::string ind(int level) { return std::string(static_cast<std::size_t>(level) * 2, ' '); }

int op_prec(const std::string& op) {
  if (op == ".or.") return 1;
  if (op == ".and.") return 2;
  if (op == ".not.") return 3;
  if (op == ".eq." || op == ".ne." || op == ".lt." || op == ".gt." || op == ".le." ||
      op == ".ge.")
    return 4;
  if (op == "+" || op == "-") return 5;
  if (op == "*" || op == "/") return 6;
  if (op == "**") return 7;
  return 9;
}

int expr_prec(const Expr* e) {
  switch (e->kind) {
    case ExprKind::Binary:
      return op_prec(e->text);
    case ExprKind::Unary:
      return e->text == ".not." ? 3 : 5;
    default:
      return 9; // atoms, parens, refs
  }
}

std::string print_expr(const Expr* e);

std::string print_child(const Expr* child, int min_prec) {
  std::string s = print_expr(child);
  if (expr_prec(child) < min_prec) return "(" + s + ")";
  return s;
}

std::string print_expr(const Expr* e) {
  switch (e->kind) {
    case ExprKind::IntLit:
    case ExprKind::RealLit:
    case ExprKind::LogicalLit:
      return e->text;
    case ExprKind::StringLit: {
      std::string s(1, e->quote);
      for (char c : e->text) {
        s.push_back(c);
        if (c == e->quote) s.push_back(c); // re-double the delimiter
      }
      s.push_back(e->quote);
      return s;
    }
    case ExprKind::Name:
      return e->text;
    case ExprKind::Ref: {
      std::string s = e->text + "(";
      for (std::size_t i = 0; i < e->args.size(); ++i) {
        if (i) s += ", ";
        s += print_expr(e->args[i].get());
      }
      return s + ")";
    }
    case ExprKind::Member:
      return print_child(e->args[0].get(), 9) + "%" + e->text;
    case ExprKind::Unary: {
      int p = expr_prec(e);
      std::string inner = print_child(e->args[0].get(), p);
      if (e->text == ".not.") return ".not. " + inner;
      return e->text + inner;
    }
    case ExprKind::Binary: {
      int p = op_prec(e->text);
      bool right_assoc = e->text == "**";
      // comparisons chain with neither side at the same level
      bool nonassoc = p == 4;
      int lmin = right_assoc ? p + 1 : (nonassoc ? p + 1 : p);
      int rmin = right_assoc ? p : p + 1;
      std::string l = print_child(e->args[0].get(), lmin);
      std::string r = print_child(e->args[1].get(), rmin);
      if (e->text == "**") return l + "**" + r;
      return l + " " + e->text + " " + r;
    }
    case ExprKind::Paren:
      return "(" + print_expr(e->args[0].get()) + ")";
    case ExprKind::Range: {
      std::string s;
      if (e->args[0]) s += print_expr(e->args[0].get());
      s += ":";
      if (e->args[1]) s += print_expr(e->args[1].get());
      return s;
    }
  }
  return "";
}

std::string join_exprs(const std::vector<ExprPtr>& es) {
  std::string s;
  for (std::size_t i = 0; i < es.size(); ++i) {
    if (i) s += ", ";
    s += print_expr(es[i].get());
  }
  return s;
}

std::string dim_text(const DimSpec& d) {
  if (d.deferred) return ":";
  if (d.lower) return print_expr(d.lower.get()) + ":" + print_expr(d.upper.get());
  return print_expr(d.upper.get());
}

std::string size_member_text(const ExprPtr& lo, const ExprPtr& hi) {
  if (lo) return print_expr(lo.get()) + ":" + print_expr(hi.get());
  return print_expr(hi.get());
}

} // namespace

std::string print_expression(const ExprPtr& e) { return e ? print_expr(e.get()) : ""; }

std::string print_symbol_spec(const SymbolSpec& s) {
  std::string line;
  switch (s.type) {
    case BaseType::Real8: line = "real(8)"; break;
    case BaseType::Integer4: line = "integer(4)"; break;
    case BaseType::Dim3: line = "type(dim3)"; break;
  }
  if (s.device) line += ", device";
  if (s.value) line += ", value";
  switch (s.intent) {
    case Intent::In: line += ", intent(in)"; break;
    case Intent::Out: line += ", intent(out)"; break;
    case Intent::InOut: line += ", intent(inout)"; break;
    case Intent::None: break;
  }
  if (s.pointer) line += ", pointer";
  if (s.parameter) line += ", parameter";
  if (s.save) line += ", save";
  line += " :: " + s.name;
  if (!s.dims.empty()) {
    line += "(";
    for (std::size_t i = 0; i < s.dims.size(); ++i) {
      if (i) line += ", ";
      line += dim_text(s.dims[i]);
    }
    line += ")";
  }
  if (s.init && !s.data_init) line += " = " + print_expr(s.init.get());
  return line;
}

std::string print_parallel_region_header(const ParallelRegionSpec& spec) {
  std::string s = "@parallelRegion{";
  std::vector<std::string> attrs;
  if (!(spec.applies_cpu && spec.applies_gpu)) {
    std::string a = "appliesTo(";
    if (spec.applies_cpu) a += "CPU";
    if (spec.applies_gpu) a += spec.applies_cpu ? ", GPU" : "GPU";
    attrs.push_back(a + ")");
  }
  std::string names, sizes, starts, ends;
  bool any_start = false, any_end = false;
  for (const auto& d : spec.domains) {
    if (!names.empty()) {
      names += ", ";
      sizes += ", ";
      starts += ", ";
      ends += ", ";
    }
    names += d.name;
    sizes += size_member_text(d.size_lo, d.size_hi);
    starts += print_expr(d.start.get());
    ends += print_expr(d.end.get());
    if (!is_int_literal(d.start.get(), 1)) any_start = true;
    if (!expr_equal(d.end.get(), d.size_hi.get())) any_end = true;
  }
  attrs.push_back("domName(" + names + ")");
  attrs.push_back("domSize(" + sizes + ")");
  if (any_start) attrs.push_back("startAt(" + starts + ")");
  if (any_end) attrs.push_back("endAt(" + ends + ")");
  for (const auto& [op, sym] : spec.reductions) attrs.push_back("reduction(" + op + ":" + sym + ")");
  if (!spec.template_name.empty()) attrs.push_back("template(" + spec.template_name + ")");
  for (std::size_t i = 0; i < attrs.size(); ++i) {
    if (i) s += ", ";
    s += attrs[i];
  }
  return s + "}";
}

std::string print_domain_dependant_header(const DomainDependantSpec& dd) {
  std::string s = "@domainDependant{";
  std::vector<std::string> attrs;
  {
    std::vector<std::string> flags;
    if (dd.auto_dom) flags.push_back("autoDom");
    if (dd.present) flags.push_back("present");
    if (dd.transfer_here) flags.push_back("transferHere");
    if (dd.host) flags.push_back("host");
    if (!flags.empty()) {
      std::string a = "attribute(";
      for (std::size_t i = 0; i < flags.size(); ++i) {
        if (i) a += ", ";
        a += flags[i];
      }
      attrs.push_back(a + ")");
    }
  }
  if (!dd.dom_names.empty()) {
    std::string names, sizes;
    for (std::size_t i = 0; i < dd.dom_names.size(); ++i) {
      if (i) {
        names += ", ";
        sizes += ", ";
      }
      names += dd.dom_names[i];
      sizes += size_member_text(dd.dom_sizes[i].first, dd.dom_sizes[i].second);
    }
    attrs.push_back("domName(" + names + ")");
    attrs.push_back("domSize(" + sizes + ")");
  }
  if (!dd.acc_pp.empty()) attrs.push_back("accPP(" + dd.acc_pp + ")");
  if (!dd.dom_pp.empty()) attrs.push_back("domPP(" + dd.dom_pp + ")");
  for (std::size_t i = 0; i < attrs.size(); ++i) {
    if (i) s += ", ";
    s += attrs[i];
  }
  return s + "}";
}

void print_statement(const Statement& st, int indent, std::vector<std::string>& out) {
  const std::string pad = ind(indent);
  switch (st.kind) {
    case StmtKind::Assign:
      out.push_back(pad + print_expr(st.e1.get()) + " = " + print_expr(st.e2.get()));
      return;
    case StmtKind::PointerAssign:
      out.push_back(pad + print_expr(st.e1.get()) + " => " + print_expr(st.e2.get()));
      return;
    case StmtKind::Do: {
      std::string head = pad + "do " + st.name + " = " + print_expr(st.e1.get()) + ", " +
                         print_expr(st.e2.get());
      if (st.e3) head += ", " + print_expr(st.e3.get());
      out.push_back(head);
      for (const auto& s : st.body) print_statement(s, indent + 1, out);
      out.push_back(pad + "end do");
      return;
    }
    case StmtKind::DoWhile:
      out.push_back(pad + "do while (" + print_expr(st.e1.get()) + ")");
      for (const auto& s : st.body) print_statement(s, indent + 1, out);
      out.push_back(pad + "end do");
      return;
    case StmtKind::If: {
      for (std::size_t arm = 0; arm < st.bodies.size(); ++arm) {
        if (arm == 0)
          out.push_back(pad + "if (" + print_expr(st.conditions[0].get()) + ") then");
        else if (st.conditions[arm])
          out.push_back(pad + "else if (" + print_expr(st.conditions[arm].get()) + ") then");
        else
          out.push_back(pad + "else");
        for (const auto& s : st.bodies[arm]) print_statement(s, indent + 1, out);
      }
      out.push_back(pad + "end if");
      return;
    }
    case StmtKind::Call: {
      std::string line = pad + "call " + st.name;
      if (st.launch_grid)
        line += " <<< " + print_expr(st.launch_grid.get()) + ", " +
                print_expr(st.launch_block.get()) + " >>>";
      line += "(" + join_exprs(st.exprs) + ")";
      out.push_back(line);
      return;
    }
    case StmtKind::Return:
      out.push_back(pad + "return");
      return;
    case StmtKind::Exit:
      out.push_back(pad + "exit");
      return;
    case StmtKind::Cycle:
      out.push_back(pad + "cycle");
      return;
    case StmtKind::Print: {
      std::string line = pad + "print *";
      if (!st.exprs.empty()) line += ", " + join_exprs(st.exprs);
      out.push_back(line);
      return;
    }
    case StmtKind::Comment:
      out.push_back(st.raw.empty() ? pad + "!" : pad + st.raw);
      return;
    case StmtKind::Allocate:
      out.push_back(pad + "allocate(" + join_exprs(st.exprs) + ")");
      return;
    case StmtKind::Deallocate:
      out.push_back(pad + "deallocate(" + join_exprs(st.exprs) + ")");
      return;
    case StmtKind::Io:
      out.push_back(pad + st.raw);
      return;
    case StmtKind::DataInit:
      out.push_back(pad + "data " + st.name + " /" + join_exprs(st.exprs) + "/");
      return;
    case StmtKind::Region: {
      out.push_back(pad + print_parallel_region_header(*st.region));
      for (const auto& s : st.body) print_statement(s, indent + 1, out);
      out.push_back(pad + "@end parallelRegion");
      return;
    }
  }
}

namespace {

void print_spec_block(const std::vector<UseStmt>& uses, bool implicit_none,
                      const std::vector<Statement>& comments,
                      const std::vector<SymbolSpec>& specs, int indent,
                      std::vector<std::string>& out) {
  const std::string pad = ind(indent);
  for (const auto& u : uses) {
    std::string line = pad + "use " + u.module;
    if (!u.only.empty()) {
      line += ", only: ";
      for (std::size_t i = 0; i < u.only.size(); ++i) {
        if (i) line += ", ";
        line += u.only[i];
      }
    }
    out.push_back(line);
  }
  if (implicit_none) out.push_back(pad + "implicit none");
  for (const auto& c : comments) print_statement(c, indent, out);
  for (const auto& s : specs) out.push_back(pad + print_symbol_spec(s));
  for (const auto& s : specs)
    if (s.data_init)
      out.push_back(pad + "data " + s.name + " /" + print_expression(s.init) + "/");
}

} // namespace

std::vector<std::string> print_routine(const RoutineDecl& r, int indent) {
  std::vector<std::string> out;
  const std::string pad = ind(indent);
  std::string head = pad;
  if (r.kind == RoutineKind::Global) head += "attributes(global) ";
  if (r.kind == RoutineKind::Device) head += "attributes(device) ";
  head += "subroutine " + r.name + "(";
  for (std::size_t i = 0; i < r.params.size(); ++i) {
    if (i) head += ", ";
    head += r.params[i];
  }
  head += ")";
  out.push_back(head);
  print_spec_block(r.uses, r.implicit_none, r.spec_comments, r.specs, indent + 1, out);
  for (const auto& dd : r.domain_dependants) {
    out.push_back(ind(indent + 1) + print_domain_dependant_header(dd));
    std::string syms;
    for (std::size_t i = 0; i < dd.symbols.size(); ++i) {
      if (i) syms += ", ";
      syms += dd.symbols[i];
    }
    out.push_back(ind(indent + 1) + syms);
    out.push_back(ind(indent + 1) + "@end domainDependant");
  }
  for (const auto& st : r.body) print_statement(st, indent + 1, out);
  out.push_back(pad + "end subroutine " + r.name);
  return out;
}

std::vector<std::string> print_module(const ModuleDecl& m) {
  std::vector<std::string> out;
  out.push_back("module " + m.name);
  print_spec_block(m.uses, m.implicit_none, m.spec_comments, m.specs, 1, out);
  if (!m.routines.empty()) {
    out.push_back("contains");
    std::string scheme; // active @scheme block while printing
    for (const auto& r : m.routines) {
      if (r.scheme != scheme) {
        if (!scheme.empty()) out.push_back("@end scheme");
        if (!r.scheme.empty()) out.push_back("@scheme{" + r.scheme + "}");
        scheme = r.scheme;
      }
      out.push_back("");
      auto lines = print_routine(r, 1);
      out.insert(out.end(), lines.begin(), lines.end());
    }
    if (!scheme.empty()) out.push_back("@end scheme");
  }
  out.push_back("end module " + m.name);
  return out;
}

std::vector<std::string> print_program(const Program& p) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < p.modules.size(); ++i) {
    if (i) out.push_back("");
    auto lines = print_module(p.modules[i]);
    out.insert(out.end(), lines.begin(), lines.end());
  }
  return out;
}

} // namespace hft
