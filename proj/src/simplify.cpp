#include "simast/simplify.hpp"

#include <algorithm>
#include <utility>

#include "simast/error.hpp"

namespace simast {

KeepRule::KeepRule() : substrings_{"Declaration", "Statement"} {}

KeepRule::KeepRule(std::vector<std::string> substrings) : substrings_(std::move(substrings)) {
  if (substrings_.empty()) throw ConfigError("keep rule needs at least one substring");
  if (std::any_of(substrings_.begin(), substrings_.end(), [](const auto& s) { return s.empty(); })) {
    throw ConfigError("keep rule substrings must be non-empty");
  }
}

bool is_kept(const AstNode& node, const KeepRule& rule) {
  if (node.is_code()) return true;
  return std::any_of(rule.substrings().begin(), rule.substrings().end(), [&](const std::string& s) {
    return node.label.find(s) != std::string::npos;
  });
}

namespace {

// Post-order: a removed node hands its already simplified children up, so a
// chain of removable nodes collapses completely.
std::vector<AstNode> simplify_children(const AstNode& node, const KeepRule& rule) {
  std::vector<AstNode> out;
  out.reserve(node.children.size());
  for (const AstNode& child : node.children) {
    std::vector<AstNode> grand = simplify_children(child, rule);
    if (is_kept(child, rule)) {
      out.push_back({child.kind, child.label, std::move(grand)});
    } else {
      std::move(grand.begin(), grand.end(), std::back_inserter(out));
    }
  }
  return out;
}

}  // namespace

Ast simplify(const Ast& ast, const KeepRule& rule) {
  const AstNode& root = ast.root();
  return Ast({root.kind, root.label, simplify_children(root, rule)});
}

}  // namespace simast
