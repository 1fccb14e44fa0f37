#include "simast/parser.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <optional>
#include <utility>
#include <vector>

#include "simast/error.hpp"

namespace simast {

SourceFragment::SourceFragment(std::string text) : text_(std::move(text)) {
  if (std::all_of(text_.begin(), text_.end(), [](unsigned char c) { return std::isspace(c); })) {
    throw DataError("source fragment is empty");
  }
}

namespace {

enum class Tok { Ident, Keyword, Number, String, Char, Op, Punct, End };

struct Token {
  Tok type;
  std::string text;
  std::size_t offset;
};

constexpr std::array kModifiers = {"public", "private", "protected", "static",
                                   "final",  "abstract", "synchronized"};
constexpr std::array kBasicTypes = {"void", "int",   "long",  "short", "byte",
                                    "char", "float", "double", "boolean"};
// Reserved words outside the subset; seeing one is a parse error.
constexpr std::array kOtherKeywords = {
    "class",  "interface", "enum",    "new",     "this",   "super",  "try",
    "catch",  "finally",   "throw",   "throws",  "switch", "case",   "default",
    "do",     "break",     "continue", "import", "package", "extends", "implements",
    "instanceof", "assert", "native", "transient", "volatile", "strictfp", "goto", "const"};
constexpr std::array kStatementKeywords = {"if", "else", "while", "for", "return"};
constexpr std::array kLiteralWords = {"true", "false", "null"};

template <std::size_t N>
bool contains(const std::array<const char*, N>& set, std::string_view word) {
  return std::any_of(set.begin(), set.end(), [&](const char* s) { return word == s; });
}

bool is_keyword(std::string_view w) {
  return contains(kModifiers, w) || contains(kBasicTypes, w) || contains(kOtherKeywords, w) ||
         contains(kStatementKeywords, w) || contains(kLiteralWords, w);
}

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_space();
      if (pos_ >= text_.size()) break;
      out.push_back(next());
    }
    out.push_back({Tok::End, "", text_.size()});
    return out;
  }

 private:
  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  Token next() {
    const std::size_t start = pos_;
    const char c = text_[pos_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$') {
      while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
                                     text_[pos_] == '_' || text_[pos_] == '$')) {
        ++pos_;
      }
      std::string word(text_.substr(start, pos_ - start));
      if (contains(kOtherKeywords, word)) {
        throw ParseError(start, "keyword '" + word + "' is outside the supported subset");
      }
      return {is_keyword(word) ? Tok::Keyword : Tok::Ident, std::move(word), start};
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.' ||
              text_[pos_] == '_')) {
        ++pos_;
      }
      return {Tok::Number, std::string(text_.substr(start, pos_ - start)), start};
    }
    if (c == '"' || c == '\'') {
      ++pos_;
      while (pos_ < text_.size() && text_[pos_] != c) {
        if (text_[pos_] == '\\' && pos_ + 1 < text_.size()) ++pos_;
        if (text_[pos_] == '\n') throw ParseError(pos_, "newline in literal");
        ++pos_;
      }
      if (pos_ >= text_.size()) throw ParseError(start, "unterminated literal");
      ++pos_;
      return {c == '"' ? Tok::String : Tok::Char, std::string(text_.substr(start, pos_ - start)),
              start};
    }
    static constexpr std::array kTwoChar = {"==", "!=", "<=", ">=", "&&", "||", "++",
                                            "--", "+=", "-=", "*=", "/=", "%="};
    if (pos_ + 1 < text_.size()) {
      std::string_view two = text_.substr(pos_, 2);
      if (contains(kTwoChar, two)) {
        pos_ += 2;
        return {Tok::Op, std::string(two), start};
      }
    }
    if (std::string_view("+-*/%<>=").find(c) != std::string_view::npos) {
      ++pos_;
      return {Tok::Op, std::string(1, c), start};
    }
    if (std::string_view("{}()[];,.").find(c) != std::string_view::npos) {
      ++pos_;
      return {Tok::Punct, std::string(1, c), start};
    }
    throw ParseError(start, std::string("character '") + c + "' is outside the supported subset");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

int binary_precedence(const Token& t) {
  if (t.type != Tok::Op) return 0;
  const std::string& s = t.text;
  if (s == "||") return 1;
  if (s == "&&") return 2;
  if (s == "==" || s == "!=") return 3;
  if (s == "<" || s == "<=" || s == ">" || s == ">=") return 4;
  if (s == "+" || s == "-") return 5;
  if (s == "*" || s == "/" || s == "%") return 6;
  return 0;
}

bool is_assignment_op(const Token& t) {
  return t.type == Tok::Op &&
         (t.text == "=" || t.text == "+=" || t.text == "-=" || t.text == "*=" ||
          t.text == "/=" || t.text == "%=");
}

class Parser {
 public:
  Parser(std::vector<Token> tokens, std::size_t length)
      : toks_(std::move(tokens)), length_(length) {}

  AstNode method() {
    AstNode decl = AstNode::attribute("MethodDeclaration");
    AstNode mods = AstNode::attribute("modifiers");
    while (peek().type == Tok::Keyword && contains(kModifiers, peek().text)) {
      mods.children.push_back(AstNode::code(take().text));
    }
    if (!mods.children.empty()) decl.children.push_back(std::move(mods));
    decl.children.push_back(type());
    decl.children.push_back(AstNode::code(expect_ident("method name")));
    expect_punct("(");
    if (!at_punct(")")) {
      do {
        AstNode param = AstNode::attribute("FormalParameter");
        param.children.push_back(type());
        param.children.push_back(AstNode::code(expect_ident("parameter name")));
        decl.children.push_back(std::move(param));
      } while (accept_punct(","));
    }
    expect_punct(")");
    expect_punct("{");
    while (!at_punct("}")) decl.children.push_back(statement());
    expect_punct("}");
    if (peek().type != Tok::End) throw ParseError(peek().offset, "unexpected text after method body");
    return decl;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    return toks_[std::min(index_ + ahead, toks_.size() - 1)];
  }
  const Token& take() {
    const Token& t = toks_[index_];
    if (t.type != Tok::End) ++index_;
    return t;
  }

  [[noreturn]] void fail(const std::string& what) const {
    const Token& t = peek();
    if (t.type == Tok::End) throw ParseError(length_, "unexpected end of input, expected " + what);
    throw ParseError(t.offset, "unexpected '" + t.text + "', expected " + what);
  }

  bool at_punct(std::string_view p) const {
    if (peek().type == Tok::End) fail(std::string("'") + std::string(p) + "'");
    return peek().type == Tok::Punct && peek().text == p;
  }
  bool accept_punct(std::string_view p) {
    if (peek().type == Tok::Punct && peek().text == p) {
      take();
      return true;
    }
    return false;
  }
  void expect_punct(std::string_view p) {
    if (!accept_punct(p)) fail(std::string("'") + std::string(p) + "'");
  }
  bool at_keyword(std::string_view k) const {
    return peek().type == Tok::Keyword && peek().text == k;
  }
  std::string expect_ident(const char* what) {
    if (peek().type != Tok::Ident) fail(what);
    return take().text;
  }

  void skip_dims() {
    while (peek().type == Tok::Punct && peek().text == "[" && peek(1).type == Tok::Punct &&
           peek(1).text == "]") {
      take();
      take();
    }
  }

  AstNode type() {
    if (peek().type == Tok::Keyword && contains(kBasicTypes, peek().text)) {
      AstNode t = AstNode::attribute("BasicType", {AstNode::code(take().text)});
      skip_dims();
      return t;
    }
    AstNode t = AstNode::attribute("ReferenceType");
    t.children.push_back(AstNode::code(expect_ident("type")));
    while (peek().type == Tok::Punct && peek().text == "." && peek(1).type == Tok::Ident) {
      take();
      t.children.push_back(AstNode::code(take().text));
    }
    skip_dims();
    return t;
  }

  // Looks ahead for `Type name` without consuming anything.
  bool starts_declaration() const {
    std::size_t i = 0;
    if (peek().type == Tok::Keyword && contains(kBasicTypes, peek().text)) return true;
    if (peek().type != Tok::Ident) return false;
    ++i;
    while (peek(i).type == Tok::Punct && peek(i).text == "." && peek(i + 1).type == Tok::Ident) {
      i += 2;
    }
    while (peek(i).type == Tok::Punct && peek(i).text == "[" && peek(i + 1).type == Tok::Punct &&
           peek(i + 1).text == "]") {
      i += 2;
    }
    return peek(i).type == Tok::Ident;
  }

  AstNode variable_declaration(const char* label) {
    AstNode decl = AstNode::attribute(label);
    decl.children.push_back(type());
    do {
      AstNode var = AstNode::attribute("VariableDeclarator");
      var.children.push_back(AstNode::code(expect_ident("variable name")));
      skip_dims();
      if (peek().type == Tok::Op && peek().text == "=") {
        take();
        var.children.push_back(expression());
      }
      decl.children.push_back(std::move(var));
    } while (accept_punct(","));
    return decl;
  }

  AstNode statement() {
    if (at_punct("{")) {
      take();
      AstNode block = AstNode::attribute("BlockStatement");
      while (!at_punct("}")) block.children.push_back(statement());
      take();
      return block;
    }
    if (at_keyword("if")) {
      take();
      AstNode node = AstNode::attribute("IfStatement");
      expect_punct("(");
      node.children.push_back(expression());
      expect_punct(")");
      node.children.push_back(statement());
      if (at_keyword("else")) {
        take();
        node.children.push_back(statement());
      }
      return node;
    }
    if (at_keyword("while")) {
      take();
      AstNode node = AstNode::attribute("WhileStatement");
      expect_punct("(");
      node.children.push_back(expression());
      expect_punct(")");
      node.children.push_back(statement());
      return node;
    }
    if (at_keyword("for")) {
      take();
      AstNode control = AstNode::attribute("ForControl");
      expect_punct("(");
      if (!at_punct(";")) {
        if (starts_declaration()) {
          control.children.push_back(variable_declaration("VariableDeclaration"));
        } else {
          do control.children.push_back(expression());
          while (accept_punct(","));
        }
      }
      expect_punct(";");
      if (!at_punct(";")) control.children.push_back(expression());
      expect_punct(";");
      if (!at_punct(")")) {
        do control.children.push_back(expression());
        while (accept_punct(","));
      }
      expect_punct(")");
      AstNode node = AstNode::attribute("ForStatement");
      node.children.push_back(std::move(control));
      node.children.push_back(statement());
      return node;
    }
    if (at_keyword("return")) {
      take();
      AstNode node = AstNode::attribute("ReturnStatement");
      if (!at_punct(";")) node.children.push_back(expression());
      expect_punct(";");
      return node;
    }
    if (peek().type == Tok::Keyword && contains(kStatementKeywords, peek().text)) {
      fail("statement");  // dangling `else`
    }
    if (starts_declaration()) {
      AstNode decl = variable_declaration("LocalVariableDeclaration");
      expect_punct(";");
      return decl;
    }
    AstNode stmt = AstNode::attribute("StatementExpression", {expression()});
    expect_punct(";");
    return stmt;
  }

  AstNode expression() {
    AstNode lhs = binary(1);
    if (is_assignment_op(peek())) {
      std::string op = take().text;
      AstNode rhs = expression();
      return AstNode::attribute("Assignment", {std::move(lhs), AstNode::code(std::move(op)),
                                               std::move(rhs)});
    }
    return lhs;
  }

  // Precedence climbing; all binary operators are left-associative.
  AstNode binary(int min_prec) {
    AstNode lhs = postfix();
    while (true) {
      int prec = binary_precedence(peek());
      if (prec == 0 || prec < min_prec) return lhs;
      std::string op = take().text;
      AstNode rhs = binary(prec + 1);
      lhs = AstNode::attribute("BinaryOperation",
                               {std::move(lhs), AstNode::code(std::move(op)), std::move(rhs)});
    }
  }

  std::vector<AstNode> arguments() {
    std::vector<AstNode> args;
    expect_punct("(");
    if (!at_punct(")")) {
      do args.push_back(expression());
      while (accept_punct(","));
    }
    expect_punct(")");
    return args;
  }

  AstNode postfix() {
    AstNode node = primary();
    // selectors on a previous call: a.b().c().d
    while (peek().type == Tok::Punct && peek().text == "." && node.label == "MethodInvocation") {
      take();
      std::string member = expect_ident("member name");
      if (peek().type == Tok::Punct && peek().text == "(") {
        AstNode call = AstNode::attribute("MethodInvocation");
        call.children.push_back(std::move(node));
        call.children.push_back(AstNode::code(std::move(member)));
        for (auto& a : arguments()) call.children.push_back(std::move(a));
        node = std::move(call);
      } else {
        node = AstNode::attribute("MemberReference", {std::move(node), AstNode::code(std::move(member))});
      }
    }
    if (peek().type == Tok::Op && (peek().text == "++" || peek().text == "--")) {
      if (node.label != "MemberReference") fail("assignable operand for '" + peek().text + "'");
      node.children.push_back(AstNode::code(take().text));
    }
    return node;
  }

  AstNode primary() {
    const Token& t = peek();
    switch (t.type) {
      case Tok::Number:
      case Tok::String:
      case Tok::Char:
        return AstNode::attribute("Literal", {AstNode::code(take().text)});
      case Tok::Keyword:
        if (contains(kLiteralWords, t.text)) {
          return AstNode::attribute("Literal", {AstNode::code(take().text)});
        }
        fail("expression");
      case Tok::Punct:
        if (t.text == "(") {
          take();
          AstNode inner = expression();
          expect_punct(")");
          return inner;
        }
        fail("expression");
      case Tok::Ident: {
        std::vector<AstNode> names;
        names.push_back(AstNode::code(take().text));
        while (peek().type == Tok::Punct && peek().text == "." && peek(1).type == Tok::Ident) {
          take();
          names.push_back(AstNode::code(take().text));
        }
        if (peek().type == Tok::Punct && peek().text == "(") {
          AstNode call = AstNode::attribute("MethodInvocation", std::move(names));
          for (auto& a : arguments()) call.children.push_back(std::move(a));
          return call;
        }
        return AstNode::attribute("MemberReference", std::move(names));
      }
      default:
        fail("expression");
    }
  }

  std::vector<Token> toks_;
  std::size_t index_ = 0;
  std::size_t length_;
};

}  // namespace

Ast parse_subset(std::string_view text) {
  Parser parser(Lexer(text).run(), text.size());
  return Ast(parser.method());
}

Ast parse_subset(const SourceFragment& fragment) { return parse_subset(fragment.text()); }

}  // namespace simast
