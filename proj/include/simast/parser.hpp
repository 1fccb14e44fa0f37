#pragma once

#include <string>
#include <string_view>

#include "simast/ast.hpp"

namespace simast {

/// Raw text of one method-level code fragment.
class SourceFragment {
 public:
  /// Throws DataError when the text is blank.
  explicit SourceFragment(std::string text);

  const std::string& text() const noexcept { return text_; }

 private:
  std::string text_;
};

/// Parses a single method written in a small Java-like subset:
///
///   method  := modifier* type IDENT '(' params ')' '{' stmt* '}'
///   stmt    := block | if | while | for | return | local-var-decl | expr ';'
///   expr    := literals, names, member access, calls, parentheses,
///              binary operators, assignment
///
/// Attribute labels follow javalang naming (MethodDeclaration, IfStatement,
/// MethodInvocation, ...). Punctuation, delimiters and statement keywords
/// (if/else/while/for/return) never become nodes; every other lexeme is
/// exactly one Code leaf. Throws ParseError at the offending offset.
Ast parse_subset(const SourceFragment& fragment);
Ast parse_subset(std::string_view text);

}  // namespace simast
