#include <cmath>
#include <sstream>

#include "doctest.h"
#include "simast/dataset.hpp"
#include "simast/error.hpp"
#include "simast/parser.hpp"
#include "simast/report.hpp"
#include "simast/simplify.hpp"

using namespace simast;

TEST_CASE("formulas on the published average row") {
  const double rate = simplified_rate(170.41, 94.61);
  CHECK(rate == doctest::Approx(1.0 - 94.61 / 170.41).epsilon(1e-12));
  CHECK(std::fabs(rate * 100.0 - 44.5) <= 0.05);
  const double inc = percentage_increase(0.4728, 0.8546);
  CHECK(std::fabs(inc - 38.18) <= 0.05);
  CHECK(code_token_rate(47.0, 100.0) == 0.47);
}

TEST_CASE("tree sizes of the hello world fixture") {
  const Ast t = parse_subset(R"(public static void main(String[] args){ System.out.println("Hello World"); })");
  const TreeSizes s = tree_sizes(t, simplify(t));
  CHECK(s.original_nodes == 18);
  CHECK(s.simplified_nodes == 12);
  CHECK(s.code_tokens == 10);
}

TEST_CASE("tree stats on a hand-made corpus") {
  const std::vector<TreeSizes> corpus = {{20, 10, 8}, {10, 6, 4}};
  const TreeStats st = tree_stats(corpus);
  CHECK(st.fragments == 2);
  CHECK(st.original.max_tokens == 20);
  CHECK(st.original.average_tokens == 15.0);
  CHECK(st.original.average_code_tokens == 6.0);
  CHECK(st.original.code_token_rate == doctest::Approx(0.4));
  CHECK(st.simplified.max_tokens == 10);
  CHECK(st.simplified.average_tokens == 8.0);
  CHECK(st.simplified.code_token_rate == doctest::Approx(0.75));
  CHECK(st.simplified_rate == doctest::Approx(1.0 - 8.0 / 15.0));
  CHECK(st.percentage_increase == doctest::Approx(35.0));

  std::ostringstream out;
  write_tree_stats_csv(out, "demo", st);
  CHECK(out.str() ==
        "corpus,operation,max_token,average_token,simplified_rate,average_code_token,code_token_rate,"
        "percentage_increase\n"
        "demo,Original,20,15.00,46.67%,6.00,40.00%,35.00\n"
        "demo,Simplified,10,8.00,,6.00,75.00%,\n");
}

TEST_CASE("tree stats errors") {
  CHECK_THROWS_AS(tree_stats(std::vector<TreeSizes>{}), DataError);
  CHECK_THROWS_AS(tree_stats(std::vector<TreeSizes>{{0, 0, 0}}), DataError);
  CHECK_THROWS_AS(tree_stats(std::vector<TreeSizes>{{5, 6, 1}}), DataError);
}

TEST_CASE("tree sizes from preprocessed pairs") {
  ReviewRecord r{"r1", SourceFragment("int f(){ return 0; }"), SourceFragment("int f(){ int a = 1; return a; }"), 0};
  const auto pairs = preprocess_all({r}, PreprocessOptions{});
  const auto sizes = tree_sizes(pairs);
  REQUIRE(sizes.size() == 2);
  const Ast o = parse_subset("int f(){ return 0; }");
  CHECK(sizes[0].original_nodes == count_nodes(o));
  CHECK(sizes[0].simplified_nodes == count_nodes(simplify(o)));
  CHECK(sizes[0].code_tokens == code_token_count(o));
}
