#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace simast {

enum class NodeKind { Code, Attribute };

/// One AST node. Code nodes are leaves carrying a source lexeme; attribute
/// nodes carry a grammar production name (e.g. "MethodDeclaration").
struct AstNode {
  NodeKind kind = NodeKind::Attribute;
  std::string label;
  std::vector<AstNode> children;

  static AstNode code(std::string lexeme) { return {NodeKind::Code, std::move(lexeme), {}}; }
  static AstNode attribute(std::string name, std::vector<AstNode> kids = {}) {
    return {NodeKind::Attribute, std::move(name), std::move(kids)};
  }

  bool is_code() const noexcept { return kind == NodeKind::Code; }

  friend bool operator==(const AstNode&, const AstNode&) = default;
};

/// A validated tree: attribute root, non-empty labels, code nodes are leaves.
class Ast {
 public:
  /// Throws SchemaError when an invariant does not hold.
  explicit Ast(AstNode root);

  const AstNode& root() const noexcept { return root_; }
  std::size_t node_count() const noexcept { return node_count_; }

  friend bool operator==(const Ast& a, const Ast& b) { return a.root_ == b.root_; }

 private:
  AstNode root_;
  std::size_t node_count_ = 0;
};

/// Number of nodes reachable from the root, recomputed by traversal.
std::size_t count_nodes(const Ast& ast);
std::size_t count_nodes(const AstNode& node);

/// Number of Code nodes.
std::size_t code_token_count(const Ast& ast);
std::size_t code_token_count(const AstNode& node);

}  // namespace simast
