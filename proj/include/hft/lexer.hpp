//------------------------------------------------------------------------------
// lexer.hpp
// Statement-level tokenizer for the accepted Fortran subset
//
// SPDX-License-Identifier: Apache-2.0
//------------------------------------------------------------------------------
#pragma once

#include <string>
#include <vector>

#include "hft/diagnostics.hpp"

namespace hft {

enum class TokKind {
  End,     // end of statement
  Ident,   // identifiers and keywords, lowercased in `text`
  Int,     // integer literal
  Real,    // real literal (decimal point and/or d/e exponent)
  String,  // quoted literal; `text` holds the logical contents, `quote` the delimiter
  Op,      // punctuation / operators, including dot-form .and. .gt. ...
};

struct Token {
  TokKind kind = TokKind::End;
  std::string text;     // canonical lexeme (identifiers lowercased)
  std::string raw;      // lexeme as written (identifiers keep their case)
  char quote = '"';     // delimiter for String tokens
  long long int_value = 0;
  double real_value = 0.0;
  std::size_t column = 0;
};

/// Tokenize one logical statement. Strings must be terminated (merged lines
/// guarantee this); a stray delimiter is reported and the rest of the line
/// is skipped.
std::vector<Token> lex_statement(const std::string& text, const SourceRef& where,
                                 Diagnostics& diags);

/// Cursor over a token vector with the usual helpers.
class TokenStream {
public:
  explicit TokenStream(std::vector<Token> toks) : toks_(std::move(toks)) {}

  const Token& peek(std::size_t ahead = 0) const {
    static const Token kEnd{};
    std::size_t i = pos_ + ahead;
    return i < toks_.size() ? toks_[i] : kEnd;
  }
  const Token& get() {
    const Token& t = peek();
    if (pos_ < toks_.size()) ++pos_;
    return t;
  }
  bool at_end() const { return peek().kind == TokKind::End; }
  bool is_op(const char* s, std::size_t ahead = 0) const {
    const Token& t = peek(ahead);
    return t.kind == TokKind::Op && t.text == s;
  }
  bool is_ident(const char* s, std::size_t ahead = 0) const {
    const Token& t = peek(ahead);
    return t.kind == TokKind::Ident && t.text == s;
  }
  bool accept_op(const char* s) {
    if (!is_op(s)) return false;
    ++pos_;
    return true;
  }
  bool accept_ident(const char* s) {
    if (!is_ident(s)) return false;
    ++pos_;
    return true;
  }
  std::size_t save() const { return pos_; }
  void restore(std::size_t p) { pos_ = p; }

private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

} // namespace hft
