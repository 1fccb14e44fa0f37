#pragma once

#include <string>
#include <vector>

#include "simast/ast.hpp"

namespace simast {

/// Attribute nodes whose label contains any of these substrings (case
/// sensitive) carry structural connections and survive simplification.
class KeepRule {
 public:
  KeepRule();  // {"Declaration", "Statement"}
  /// Throws ConfigError on an empty list or an empty substring.
  explicit KeepRule(std::vector<std::string> substrings);

  const std::vector<std::string>& substrings() const noexcept { return substrings_; }

 private:
  std::vector<std::string> substrings_;
};

/// Code nodes are always kept; attribute nodes are kept when the rule matches.
bool is_kept(const AstNode& node, const KeepRule& rule);

/// Removes every non-root attribute node rejected by `rule`, splicing its
/// (already simplified) children into its parent at the removed node's
/// position. The root is always retained.
Ast simplify(const Ast& ast, const KeepRule& rule = KeepRule());

}  // namespace simast
