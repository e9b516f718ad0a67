#include <gtest/gtest.h>

#include "wlt/surface.hpp"
#include "wlt/typing.hpp"

using namespace wlt;

namespace {

PseudoType li_int() { return PseudoType::proper(types::li(types::int_())); }
PseudoType un_int() { return PseudoType::proper(types::un(types::int_())); }
PseudoType hi_int() { return PseudoType::hidden(types::int_()); }
PseudoType un_bool() { return PseudoType::proper(types::un(types::bool_())); }

const char* kSig = R"(signature:
+ : (hi int, li int) -> li int = add
* : (li int, li int) -> li int = mul
- : (li int, li int) -> li int = sub
id : (hi int) -> li int = id
< : (hi int, hi int) -> li bool = lt
store:
main:
li 0
)";

QualifiedSignature sig() { return parse_program(kSig).signature; }

TypeContext ctx(std::initializer_list<TypeContext::Binding> b) { return TypeContext(b); }

Verdict<TypeResult> check(const std::string& text, const TypeContext& c,
                          const CheckOptions& opts = {}) {
  std::vector<std::string> scope;
  for (const auto& [x, _] : c.bindings()) scope.push_back(x);
  auto s = sig();
  auto e = parse_expression(text, s, scope);
  return type_of(c, s, e, opts);
}

}  // namespace

TEST(Split, Examples) {
  EXPECT_TRUE(split_check({{}, {}}, {}));
  EXPECT_TRUE(split_check({ctx({{"x", un_int()}}), ctx({{"x", un_int()}})}, ctx({{"x", un_int()}})));
  EXPECT_FALSE(split_check({ctx({{"x", li_int()}}), ctx({{"x", li_int()}})}, ctx({{"x", li_int()}})));
  EXPECT_TRUE(split_check({}, ctx({{"x", un_int()}, {"y", hi_int()}})));
  EXPECT_FALSE(split_check({}, ctx({{"x", li_int()}})));
}

TEST(Pseudosplit, Examples) {
  EXPECT_TRUE(pseudosplit_check({ctx({{"x", hi_int()}}), ctx({{"x", li_int()}})},
                                ctx({{"x", li_int()}})));
  EXPECT_FALSE(pseudosplit_check({ctx({{"x", li_int()}}), ctx({{"x", hi_int()}})},
                                 ctx({{"x", li_int()}})));
  EXPECT_FALSE(split_check({ctx({{"x", hi_int()}}), ctx({{"x", li_int()}})},
                           ctx({{"x", li_int()}})));
  auto tup = PseudoType::proper(types::li(Pretype::tuple({types::li(types::int_())})));
  EXPECT_FALSE(pseudosplit_check({ctx({{"x", tup}}), ctx({{"x", tup}})}, ctx({{"x", tup}})));
}

TEST(Merge, Examples) {
  UsageReport h, l;
  h.set("x", {Usage::Hidden, {}});
  l.set("x", {Usage::Linear, {}});
  auto ok = merge_usages(MergeRule::PseudoSplit, {h, l});
  ASSERT_TRUE(ok.ok());
  EXPECT_EQ(ok->get("x"), Usage::Linear);
  EXPECT_EQ(ok->find("x")->premise, 1u);
  EXPECT_FALSE(merge_usages(MergeRule::PseudoSplit, {l, h}).ok());
  EXPECT_FALSE(merge_usages(MergeRule::Split, {h, l}).ok());
  EXPECT_FALSE(merge_usages(MergeRule::Split, {l, l}).ok());
  EXPECT_FALSE(merge_usages(MergeRule::Branch, {l, UsageReport{}}).ok());
  EXPECT_EQ(merge_usages(MergeRule::Branch, {h, UsageReport{}})->get("x"), Usage::Hidden);
}

TEST(PseudoType, Examples) {
  auto s = sig();
  auto x = var("x");
  auto a = pseudo_type_of(ctx({{"x", hi_int()}}), s, x, hi_int());
  ASSERT_TRUE(a.ok());
  EXPECT_EQ(a.value(), hi_int());
  EXPECT_FALSE(pseudo_type_of(ctx({{"x", hi_int()}, {"y", li_int()}}), s, x, hi_int()).ok());
  auto c = pseudo_type_of(ctx({{"x", un_int()}}), s, x, un_int());
  ASSERT_TRUE(c.ok());
  EXPECT_EQ(c.value(), un_int());
}

TEST(TypeOf, Var) {
  auto r = check("x", ctx({{"x", un_bool()}}));
  ASSERT_TRUE(r.ok()) << r.diagnostic().text();
  EXPECT_EQ(r->type, types::un(types::bool_()));
}

TEST(TypeOf, CounterexampleRejected) {
  auto r = check("x + x * y", ctx({{"x", li_int()}, {"y", li_int()}}));
  ASSERT_FALSE(r.ok());
  EXPECT_EQ(r.diagnostic().rule, "split");
  EXPECT_EQ(r.diagnostic().variable, "x");
}

TEST(TypeOf, CounterexampleAcceptedByMutant) {
  CheckOptions mutant;
  mutant.operator_pseudosplit = true;
  auto r = check("x + x * y", ctx({{"x", li_int()}, {"y", li_int()}}), mutant);
  EXPECT_TRUE(r.ok());
}

TEST(TypeOf, HiddenThenConsumedUnderPseudosplit) {
  auto r = check("let z = x + y in x * z", ctx({{"x", li_int()}, {"y", li_int()}}));
  ASSERT_TRUE(r.ok()) << r.diagnostic().text();
  EXPECT_EQ(r->type, types::li(types::int_()));
}

TEST(TypeOf, HiddenAfterConsumptionRejected) {
  auto r = check("let z = x * y in x + z", ctx({{"x", li_int()}, {"y", li_int()}}));
  EXPECT_FALSE(r.ok());
}

TEST(TypeOf, UnusedLinearRejected) {
  auto r = check("y", ctx({{"x", li_int()}, {"y", li_int()}}));
  ASSERT_FALSE(r.ok());
  EXPECT_EQ(r.diagnostic().variable, "x");
}

TEST(TypeOf, HiddenOnlyRejected) {
  auto r = check("id(x)", ctx({{"x", li_int()}}));
  EXPECT_FALSE(r.ok());
  EXPECT_TRUE(check("id(x)", ctx({{"x", hi_int()}})).ok());
}

TEST(TypeOf, UnClosureCannotCaptureLinear) {
  EXPECT_FALSE(check("un \\y : li int. x * y", ctx({{"x", li_int()}})).ok());
  EXPECT_TRUE(check("li \\y : li int. x * y", ctx({{"x", li_int()}})).ok());
}

TEST(TypeOf, ClosuresCannotCaptureHiddenReads) {
  const char* prog = "spl li <un \\y : li int. id(x) * y, x> as <f, z> in let w = z * li 1 in f (li 2) * w";
  auto strict = check(prog, ctx({{"x", li_int()}}));
  EXPECT_FALSE(strict.ok());
  CheckOptions loose;
  loose.allow_hidden_capture = true;
  EXPECT_TRUE(check(prog, ctx({{"x", li_int()}}), loose).ok());
}

TEST(TypeOf, UnTupleRejectsLinearComponent) {
  EXPECT_FALSE(check("un <x>", ctx({{"x", li_int()}})).ok());
  EXPECT_TRUE(check("li <x, y>", ctx({{"x", li_int()}, {"y", un_int()}})).ok());
}

TEST(TypeOf, BranchesMustAgree) {
  auto c = ctx({{"b", un_bool()}, {"x", li_int()}});
  EXPECT_FALSE(check("if b then x else li 3", c).ok());
  EXPECT_TRUE(check("if b then x else x * li 1", c).ok());
}

TEST(TypeOf, Lists) {
  auto c = ctx({{"x", li_int()}});
  auto r = check("case li (x : li []) of (li 0, (h : t) -> case t of (h, (a : b) -> a * (h * id(a))))",
                 c);
  EXPECT_FALSE(r.ok());
  auto ok = check("case li (x : li []) of (li 0, (h : t) -> case t of (h, (a : b) -> h))", c);
  EXPECT_FALSE(ok.ok());  // a, b unused in the inner cons arm
  auto good = check("case li (x : li []) of (li 0, (h : t) -> h)", c);
  EXPECT_FALSE(good.ok());  // t unused
  auto fine = check("case un (x : un []) of (li 0, (h : t) -> h * li 1)",
                    ctx({{"x", PseudoType::proper(types::un(types::int_()))}}));
  EXPECT_FALSE(fine.ok());  // un int is not li int
  auto f = PseudoType::proper(
      types::un(Pretype::arrow(types::li(Pretype::list(types::li(types::int_()))), types::li(types::int_()))));
  auto pos = check("case li (x : li []) of (li 0, (h : t) -> h * f t)", ctx({{"x", li_int()}, {"f", f}}));
  EXPECT_TRUE(pos.ok()) << pos.diagnostic().text();
}

TEST(TypeOf, AmbiguityNeedsAnnotation) {
  auto s = parse_program(R"(signature:
id : (hi int) -> li int = id
id : (hi int) -> un int = id
store:
main:
li 0
)").signature;
  auto amb = type_of(ctx({{"x", hi_int()}}), s, parse_expression("id(x)", s, {"x"}));
  EXPECT_FALSE(amb.ok());
  auto pick = type_of(ctx({{"x", hi_int()}}), s, parse_expression("id@2(x)", s, {"x"}));
  ASSERT_TRUE(pick.ok()) << pick.diagnostic().text();
  EXPECT_EQ(pick->type, types::un(types::int_()));
}

TEST(TypeOf, ShadowedBinderIsRenamed) {
  auto r = check("let x = x * li 2 in x", ctx({{"x", li_int()}}));
  ASSERT_TRUE(r.ok()) << r.diagnostic().text();
}

TEST(Derivation, ReconstructedTreesValidate) {
  const char* cases[] = {
      "let z = x + y in x * z",
      "li <x, y>",
      "spl li <x, y> as <a, b> in a * b",
      "if un true then x * y else y - x",
      "li \\w : li int. x * (y * w)",
  };
  auto s = sig();
  auto c = ctx({{"x", li_int()}, {"y", li_int()}});
  for (const char* text : cases) {
    auto e = parse_expression(text, s, {"x", "y"});
    Typed t;
    try {
      t = Checker(s).check(c, e);
    } catch (const TypeError& err) {
      ADD_FAILURE() << text << ": " << err.what();
      continue;
    }
    auto d = reconstruct(c, t);
    auto bad = validate(d, s);
    EXPECT_FALSE(bad.has_value()) << text << "\n" << *bad << "\n" << to_string(d);
  }
}

TEST(Weakening, UnusedHiddenBindingIsInert) {
  const char* cases[] = {"x * y", "x + y", "id(x)", "let z = x + y in x * z"};
  for (const char* text : cases) {
    auto base = check(text, ctx({{"x", li_int()}, {"y", li_int()}}));
    auto more = check(text, ctx({{"x", li_int()}, {"y", li_int()}, {"h", hi_int()}}));
    EXPECT_EQ(base.ok(), more.ok()) << text;
  }
}
