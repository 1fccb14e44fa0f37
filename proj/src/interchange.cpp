#include "simast/interchange.hpp"

#include <algorithm>

#include "simast/error.hpp"

namespace simast {

using nlohmann::json;

namespace {

AstNode node_from_json(const json& value, const std::string& path) {
  if (!value.is_object()) throw SchemaError(path + ": node must be a JSON object");
  for (const auto& [key, _] : value.items()) {
    if (key != "kind" && key != "label" && key != "children") {
      throw SchemaError(path + ": unknown field '" + key + "'");
    }
  }
  auto kind_it = value.find("kind");
  if (kind_it == value.end() || !kind_it->is_string()) {
    throw SchemaError(path + ": missing string field 'kind'");
  }
  AstNode node;
  const auto& kind = kind_it->get_ref<const std::string&>();
  if (kind == "code") {
    node.kind = NodeKind::Code;
  } else if (kind == "attribute") {
    node.kind = NodeKind::Attribute;
  } else {
    throw SchemaError(path + ": unknown kind '" + kind + "'");
  }

  auto label_it = value.find("label");
  if (label_it == value.end() || !label_it->is_string()) {
    throw SchemaError(path + ": missing string field 'label'");
  }
  node.label = label_it->get<std::string>();
  if (node.label.empty()) throw SchemaError(path + ": empty label");

  auto children_it = value.find("children");
  if (children_it == value.end() || !children_it->is_array()) {
    throw SchemaError(path + ": missing array field 'children'");
  }
  if (node.is_code() && !children_it->empty()) {
    throw SchemaError(path + ": code node with children");
  }
  node.children.reserve(children_it->size());
  std::size_t i = 0;
  for (const auto& child : *children_it) {
    node.children.push_back(node_from_json(child, path + ".children[" + std::to_string(i++) + "]"));
  }
  return node;
}

json node_to_json(const AstNode& node) {
  json children = json::array();
  for (const auto& c : node.children) children.push_back(node_to_json(c));
  return json{{"kind", node.is_code() ? "code" : "attribute"},
              {"label", node.label},
              {"children", std::move(children)}};
}

}  // namespace

Ast ast_from_json(const json& value) {
  AstNode root = node_from_json(value, "$");
  if (root.kind != NodeKind::Attribute) throw SchemaError("$: root must be an attribute node");
  return Ast(std::move(root));
}

Ast ingest_interchange(std::string_view document) {
  json value;
  try {
    value = json::parse(document);
  } catch (const json::parse_error& e) {
    std::size_t offset = e.byte == 0 ? 0 : e.byte - 1;
    throw ParseError(std::min(offset, document.size()), e.what());
  }
  return ast_from_json(value);
}

json ast_to_json(const Ast& ast) { return node_to_json(ast.root()); }

std::string emit_interchange(const Ast& ast) { return ast_to_json(ast).dump(); }

}  // namespace simast
