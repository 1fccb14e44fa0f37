#include <set>

#include "doctest.h"
#include "simast/error.hpp"
#include "simast/synthetic.hpp"

using namespace simast;

namespace {

std::size_t count_label(const AstNode& n, const std::string& label) {
  std::size_t c = n.label == label ? 1 : 0;
  for (const auto& k : n.children) c += count_label(k, label);
  return c;
}

}  // namespace

TEST_CASE("synthetic corpus is deterministic, balanced and parseable") {
  const auto recs = generate_synthetic({});
  REQUIRE(recs.size() == 400);
  std::size_t ones = 0;
  std::set<std::string> ids;
  for (const auto& r : recs) {
    ones += r.label;
    ids.insert(r.id);
    const Ast o = to_ast(r.original), v = to_ast(r.revised);
    const std::size_t added = count_label(v.root(), "ReturnStatement") - count_label(o.root(), "ReturnStatement");
    const std::size_t ifs = count_label(v.root(), "IfStatement") - count_label(o.root(), "IfStatement");
    if (r.label == 1) {
      CHECK(added == 1);
      CHECK(ifs == 1);
    } else {
      CHECK(added == 0);
    }
  }
  CHECK(ones == 200);
  CHECK(ids.size() == 400);

  const auto again = generate_synthetic({});
  for (std::size_t i = 0; i < recs.size(); ++i) {
    CHECK(std::get<SourceFragment>(again[i].original).text() == std::get<SourceFragment>(recs[i].original).text());
    CHECK(std::get<SourceFragment>(again[i].revised).text() == std::get<SourceFragment>(recs[i].revised).text());
  }
}

TEST_CASE("synthetic options") {
  const auto few = generate_synthetic({.pairs = 30, .seed = 2, .accept_fraction = 0.23});
  std::size_t ones = 0;
  for (const auto& r : few) ones += r.label;
  CHECK(few.size() == 30);
  CHECK(ones == 7);
  CHECK_THROWS_AS(generate_synthetic({.pairs = 10, .seed = 1, .accept_fraction = 1.5}), ConfigError);
}
