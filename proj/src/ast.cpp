#include "simast/ast.hpp"

#include <utility>

#include "simast/error.hpp"

namespace simast {

namespace {

void validate(const AstNode& node) {
  std::vector<const AstNode*> stack{&node};
  while (!stack.empty()) {
    const AstNode* n = stack.back();
    stack.pop_back();
    if (n->label.empty()) throw SchemaError("node label must be non-empty");
    if (n->is_code() && !n->children.empty()) {
      throw SchemaError("code node '" + n->label + "' must not have children");
    }
    for (const auto& c : n->children) stack.push_back(&c);
  }
}

}  // namespace

Ast::Ast(AstNode root) : root_(std::move(root)) {
  if (root_.kind != NodeKind::Attribute) throw SchemaError("AST root must be an attribute node");
  validate(root_);
  node_count_ = count_nodes(root_);
}

std::size_t count_nodes(const AstNode& node) {
  std::size_t total = 0;
  std::vector<const AstNode*> stack{&node};
  while (!stack.empty()) {
    const AstNode* n = stack.back();
    stack.pop_back();
    ++total;
    for (const auto& c : n->children) stack.push_back(&c);
  }
  return total;
}

std::size_t count_nodes(const Ast& ast) { return count_nodes(ast.root()); }

std::size_t code_token_count(const AstNode& node) {
  std::size_t total = 0;
  std::vector<const AstNode*> stack{&node};
  while (!stack.empty()) {
    const AstNode* n = stack.back();
    stack.pop_back();
    if (n->is_code()) ++total;
    for (const auto& c : n->children) stack.push_back(&c);
  }
  return total;
}

std::size_t code_token_count(const Ast& ast) { return code_token_count(ast.root()); }

}  // namespace simast
