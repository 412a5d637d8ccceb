//------------------------------------------------------------------------------
// lexer.cpp
//
// SPDX-License-Identifier: Apache-2.0
//------------------------------------------------------------------------------
#include "hft/lexer.hpp"

#include <cctype>
#include <cstdlib>

namespace hft {

namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool digit(char c) { return std::isdigit(static_cast<unsigned char>(c)); }

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

// A '.' starts a dot-form operator when it is followed by letters and a
// closing '.', e.g. ".and." -- an exponent like "1.d0" has a digit after the
// letters instead and stays part of the number.
bool dot_operator_at(const std::string& s, std::size_t i) {
  if (i >= s.size() || s[i] != '.') return false;
  std::size_t j = i + 1;
  while (j < s.size() && std::isalpha(static_cast<unsigned char>(s[j]))) ++j;
  return j > i + 1 && j < s.size() && s[j] == '.';
}

double parse_real_value(std::string lexeme) {
  for (char& c : lexeme) {
    if (c == 'd' || c == 'D') c = 'e';
  }
  return std::strtod(lexeme.c_str(), nullptr);
}

} // namespace

std::vector<Token> lex_statement(const std::string& text, const SourceRef& where,
                                 Diagnostics& diags) {
  std::vector<Token> out;
  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    char c = text[i];
    if (c == ' ' || c == '\t') {
      ++i;
      continue;
    }
    if (c == '!') break; // trailing comment; callers keep comments elsewhere
    Token t;
    t.column = i + 1;
    if (ident_start(c)) {
      std::size_t j = i;
      while (j < n && ident_char(text[j])) ++j;
      t.kind = TokKind::Ident;
      t.raw = text.substr(i, j - i);
      t.text = lower(t.raw);
      i = j;
      out.push_back(std::move(t));
      continue;
    }
    if (digit(c) || (c == '.' && i + 1 < n && digit(text[i + 1]) && !dot_operator_at(text, i))) {
      std::size_t j = i;
      bool is_real = false;
      while (j < n && digit(text[j])) ++j;
      if (j < n && text[j] == '.' && !dot_operator_at(text, j)) {
        is_real = true;
        ++j;
        while (j < n && digit(text[j])) ++j;
      }
      if (j < n && (text[j] == 'e' || text[j] == 'E' || text[j] == 'd' || text[j] == 'D')) {
        std::size_t k = j + 1;
        if (k < n && (text[k] == '+' || text[k] == '-')) ++k;
        if (k < n && digit(text[k])) {
          is_real = true;
          j = k;
          while (j < n && digit(text[j])) ++j;
        }
      }
      t.raw = text.substr(i, j - i);
      t.text = lower(t.raw);
      if (is_real) {
        t.kind = TokKind::Real;
        t.real_value = parse_real_value(t.text);
      } else {
        t.kind = TokKind::Int;
        t.int_value = std::strtoll(t.text.c_str(), nullptr, 10);
      }
      i = j;
      out.push_back(std::move(t));
      continue;
    }
    if (c == '\'' || c == '"') {
      std::size_t j = i + 1;
      std::string contents;
      bool closed = false;
      while (j < n) {
        if (text[j] == c) {
          if (j + 1 < n && text[j + 1] == c) { // doubled delimiter escape
            contents.push_back(c);
            j += 2;
            continue;
          }
          closed = true;
          ++j;
          break;
        }
        contents.push_back(text[j]);
        ++j;
      }
      if (!closed) {
        diags.error(where, "unterminated string literal");
        return out;
      }
      t.kind = TokKind::String;
      t.text = contents;
      t.raw = text.substr(i, j - i);
      t.quote = c;
      i = j;
      out.push_back(std::move(t));
      continue;
    }
    if (dot_operator_at(text, i)) {
      std::size_t j = i + 1;
      while (j < n && std::isalpha(static_cast<unsigned char>(text[j]))) ++j;
      ++j; // closing '.'
      t.kind = TokKind::Op;
      t.raw = text.substr(i, j - i);
      t.text = lower(t.raw);
      i = j;
      out.push_back(std::move(t));
      continue;
    }
    // Multi-character punctuation, longest first.
    static const char* kMulti[] = {"<<<", ">>>", "**", "::", "=>", "==", "/=",
                                   "<=", ">=", "//"};
    bool matched = false;
    for (const char* m : kMulti) {
      std::size_t len = std::char_traits<char>::length(m);
      if (text.compare(i, len, m) == 0) {
        t.kind = TokKind::Op;
        t.text = m;
        t.raw = m;
        i += len;
        matched = true;
        break;
      }
    }
    if (matched) {
      out.push_back(std::move(t));
      continue;
    }
    static const std::string kSingle = "+-*/(),:=%<>.";
    if (kSingle.find(c) != std::string::npos) {
      t.kind = TokKind::Op;
      t.text.assign(1, c);
      t.raw = t.text;
      ++i;
      out.push_back(std::move(t));
      continue;
    }
    diags.error(where, std::string("unexpected character '") + c + "'");
    ++i;
  }
  return out;
}

} // namespace hft
