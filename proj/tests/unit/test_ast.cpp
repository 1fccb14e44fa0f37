#include <random>

#include "doctest.h"
#include "simast/ast.hpp"
#include "simast/error.hpp"
#include "simast/interchange.hpp"
#include "support.hpp"

using namespace simast;

namespace {

std::size_t oracle_count(const AstNode& n) {
  std::size_t c = 1;
  for (const auto& k : n.children) c += oracle_count(k);
  return c;
}

std::size_t oracle_code(const AstNode& n) {
  std::size_t c = n.is_code() ? 1 : 0;
  for (const auto& k : n.children) c += oracle_code(k);
  return c;
}

}  // namespace

TEST_CASE("count_nodes and code_token_count on small trees") {
  Ast single(AstNode::attribute("MethodDeclaration"));
  CHECK(count_nodes(single) == 1);
  CHECK(code_token_count(single) == 0);

  Ast star(AstNode::attribute("R", {AstNode::code("a"), AstNode::code("b"), AstNode::code("c")}));
  CHECK(count_nodes(star) == 4);
  CHECK(code_token_count(star) == 3);

  Ast pair(AstNode::attribute("R", {AstNode::code("a"), AstNode::code("b")}));
  CHECK(code_token_count(pair) == 2);

  Ast attrs(AstNode::attribute("R", {AstNode::attribute("S", {AstNode::attribute("T")})}));
  CHECK(code_token_count(attrs) == 0);
  CHECK(count_nodes(attrs) == 3);
}

TEST_CASE("Ast rejects invariant violations") {
  CHECK_THROWS_AS(Ast(AstNode::code("x")), SchemaError);
  CHECK_THROWS_AS(Ast(AstNode::attribute("")), SchemaError);
  AstNode bad_code = AstNode::code("x");
  bad_code.children.push_back(AstNode::code("y"));
  CHECK_THROWS_AS(Ast(AstNode::attribute("R", {bad_code})), SchemaError);
  CHECK_THROWS_AS(Ast(AstNode::attribute("R", {AstNode::code("")})), SchemaError);
}

TEST_CASE("counts agree with a recursive oracle on random trees") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 200; ++i) {
    const Ast t(testing::random_tree(rng, 120));
    CHECK(count_nodes(t) == oracle_count(t.root()));
    CHECK(t.node_count() == count_nodes(t));
    CHECK(code_token_count(t) == oracle_code(t.root()));
    CHECK(code_token_count(t) <= count_nodes(t));
  }
}

TEST_CASE("count_nodes handles deep chains") {
  AstNode root = AstNode::attribute("R");
  AstNode* tip = &root;
  for (int i = 0; i < 50000; ++i) {
    tip->children.push_back(AstNode::attribute("S"));
    tip = &tip->children.back();
  }
  CHECK(count_nodes(root) == 50001);
}

TEST_CASE("interchange singleton and schema errors") {
  const Ast one = ingest_interchange(R"({"kind":"attribute","label":"MethodDeclaration","children":[]})");
  CHECK(count_nodes(one) == 1);
  CHECK(one.root().label == "MethodDeclaration");

  CHECK_THROWS_AS(ingest_interchange(
                      R"({"kind":"attribute","label":"R","children":[{"kind":"code","label":"x","children":[{"kind":"code","label":"y","children":[]}]}]})"),
                  SchemaError);
  CHECK_THROWS_AS(ingest_interchange(R"({"kind":"leaf","label":"R","children":[]})"), SchemaError);
  CHECK_THROWS_AS(ingest_interchange(R"({"kind":"attribute","label":"","children":[]})"), SchemaError);
  CHECK_THROWS_AS(ingest_interchange(R"({"kind":"attribute","label":"R"})"), SchemaError);
  CHECK_THROWS_AS(ingest_interchange(R"({"kind":"attribute","label":"R","children":[],"x":1})"), SchemaError);
  CHECK_THROWS_AS(ingest_interchange(R"({"kind":"code","label":"x","children":[]})"), SchemaError);

  try {
    ingest_interchange(R"({"kind":"code","label":"x","children":[]})");
  } catch (const SchemaError& e) {
    CHECK(std::string(e.what()).find("root") != std::string::npos);
  }
}

TEST_CASE("interchange reports offsets for malformed JSON") {
  const std::string doc = R"({"kind":"attribute", "label" "R"})";
  try {
    ingest_interchange(doc);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.position() <= doc.size());
    CHECK(e.position() >= 20);
  }
  try {
    ingest_interchange("");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.position() == 0);
  }
}

TEST_CASE("interchange round trip on random trees") {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 100; ++i) {
    const Ast t(testing::random_tree(rng, 50));
    CHECK(ingest_interchange(emit_interchange(t)) == t);
  }
}
