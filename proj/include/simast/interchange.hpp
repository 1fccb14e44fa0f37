#pragma once

#include <string>
#include <string_view>

#include "json.hpp"
#include "simast/ast.hpp"

namespace simast {

// AST interchange format: one JSON document per fragment, each node is
//   {"kind": "code"|"attribute", "label": string, "children": [node, ...]}
// and code nodes must carry an empty "children" array.

/// Parses an interchange document. Throws ParseError (with byte offset) for
/// malformed JSON and SchemaError for rule violations.
Ast ingest_interchange(std::string_view document);

/// Same as ingest_interchange for an already-parsed JSON value.
Ast ast_from_json(const nlohmann::json& value);

nlohmann::json ast_to_json(const Ast& ast);

/// Compact single-line interchange text.
std::string emit_interchange(const Ast& ast);

}  // namespace simast
