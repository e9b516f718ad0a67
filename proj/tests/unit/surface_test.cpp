#include <gtest/gtest.h>

#include "wlt/surface.hpp"

using namespace wlt;

namespace {

const char* kSmall = R"(signature:
+ : (hi int, li int) -> li int = add
* : (li int, li int) -> li int = mul
store:
x = li 3
y = li 1
main:
x + x * y
)";

}  // namespace

TEST(Parse, TupleOfVars) {
  auto e = parse_expression("li <x, y>", QualifiedSignature{}, {"x", "y"});
  auto t = e->as<node::Tuple>();
  ASSERT_NE(t, nullptr);
  EXPECT_EQ(t->qual, Qualifier::Li);
  ASSERT_EQ(t->items.size(), 2u);
  EXPECT_TRUE(equal(t->items[0], var("x")));
  EXPECT_TRUE(equal(t->items[1], var("y")));
}

TEST(Parse, SplitNode) {
  auto e = parse_expression("spl e as <x1, x2> in e2", QualifiedSignature{}, {"e", "e2"});
  auto s = e->as<node::Split>();
  ASSERT_NE(s, nullptr);
  EXPECT_EQ(s->pattern, (std::vector<std::string>{"x1", "x2"}));
}

TEST(Parse, HiIsNotAValueQualifier) {
  try {
    parse_expression("hi 3", QualifiedSignature{});
    FAIL() << "accepted hi 3";
  } catch (const ParseError& err) {
    EXPECT_NE(err.detail.find("hi"), std::string::npos);
    EXPECT_EQ(err.where.line, 1);
    EXPECT_EQ(err.where.column, 1);
  }
}

TEST(Parse, ErrorsArePositioned) {
  try {
    parse_program("signature:\nstore:\nmain:\n  li <x\n");
    FAIL();
  } catch (const ParseError& err) {
    EXPECT_EQ(err.where.line, 4);
    EXPECT_GT(err.where.column, 0);
  }
}

TEST(Parse, RepeatedPatternVariable) {
  EXPECT_THROW(parse_expression("spl e as <x, x> in x", QualifiedSignature{}, {"e"}), ParseError);
}

TEST(Parse, ReservedNames) {
  EXPECT_THROW(parse_expression("un \\v3 : un int. v3", QualifiedSignature{}), ParseError);
}

TEST(Parse, ProgramWithOperators) {
  auto p = parse_program(kSmall);
  EXPECT_EQ(p.signature.entries().size(), 2u);
  EXPECT_EQ(p.store.size(), 2u);
  auto top = p.main->as<node::Op>();
  ASSERT_NE(top, nullptr);
  EXPECT_EQ(top->name, "+");
  EXPECT_EQ(top->args[1]->as<node::Op>()->name, "*");
}

TEST(Parse, Params) {
  auto p = parse_program(R"(store:
a = li {n-1 .. 0}
main:
a
params:
n = 4
)");
  auto lit = p.store[0].value->as<node::Op>()->literal;
  ASSERT_TRUE(lit);
  EXPECT_EQ(std::get<std::vector<std::int64_t>>(*lit), (std::vector<std::int64_t>{3, 2, 1, 0}));
  auto q = parse_program("store:\nk = li n-1\nmain:\nk\nparams:\nn = 4\n", {{"n", 10}});
  EXPECT_EQ(std::get<std::int64_t>(*q.store[0].value->as<node::Op>()->literal), 9);
}

TEST(Print, Tuple) {
  auto e = make(node::Tuple{Qualifier::Li, {var("x")}});
  EXPECT_EQ(to_string(e), "li <x>");
}

TEST(Print, RoundTripProgram) {
  auto p = parse_program(kSmall);
  auto again = parse_program(print_program(p));
  EXPECT_TRUE(structurally_equal(p, again)) << print_program(p);
}

TEST(Print, RoundTripLambda) {
  QualifiedSignature sig;
  const char* cases[] = {
      "un \\x : (un (li int -> li <li int, un bool>)). x",
      "li \\x : li list (li int). case x of (un 0, (h : t) -> h)",
      "let z : li int = li 3 in if un true then z else z",
      "un (li 1 : li [])",
      "f (li 3) (un <f, f>)",
      "a[i][j <- k]",
  };
  for (const char* c : cases) {
    auto e = parse_expression(c, sig, {"f", "a", "i", "j", "k"});
    auto again = parse_expression(to_string(e), sig, {"f", "a", "i", "j", "k"});
    EXPECT_TRUE(equal(e, again)) << c << " => " << to_string(e);
  }
}
