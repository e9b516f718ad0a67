#include <gtest/gtest.h>

#include "wlt/corpus.hpp"
#include "wlt/verify.hpp"

using namespace wlt;

namespace {

const char* kSig = R"(signature:
+ : (hi int, li int) -> li int = add
* : (li int, li int) -> li int = mul
store:
main:
li 0
)";

QualifiedSignature sig() { return parse_program(kSig).signature; }

Value li_int(std::int64_t i) { return Value{Qualifier::Li, Constant{i}}; }

Configuration config(Store s, const std::string& text) {
  std::vector<std::string> scope;
  for (const auto& [x, _] : s.cells()) scope.push_back(x);
  auto q = sig();
  return {std::move(s), parse_expression(text, q, scope)};
}

TEST(StoreTyping, EmptyStore) {
  EXPECT_TRUE(store_typing_check(Store{}, TypeContext{}, sig()));
  auto r = config_check(config(Store{}, "li 3"), sig());
  EXPECT_TRUE(r.ok);
  EXPECT_EQ(to_string(*r.type), "li int");
}

TEST(StoreTyping, LinearConstantMayEnterHidden) {
  Store s;
  s.push("x", li_int(3));
  TypeContext hidden{{"x", PseudoType::hidden(types::int_())}};
  TypeContext linear{{"x", PseudoType::proper(types::li(types::int_()))}};
  EXPECT_TRUE(store_typing_check(s, hidden, sig()));
  EXPECT_TRUE(store_typing_check(s, linear, sig()));
  TypeContext wrong{{"x", PseudoType::proper(types::un(types::int_()))}};
  EXPECT_FALSE(store_typing_check(s, wrong, sig()));
}

TEST(StoreTyping, TupleConsumesItsComponent) {
  Store s;
  s.push("x", li_int(3));
  s.push("y", Value{Qualifier::Li, pre::TupleCells{{"x"}}});
  TypeContext pi{{"y", PseudoType::proper(types::li(Pretype::tuple({types::li(types::int_())})))}};
  EXPECT_TRUE(store_typing_check(s, pi, sig()));

  auto r = config_check({s, parse_expression("y", sig(), {"y"})}, sig());
  ASSERT_TRUE(r.ok);
  EXPECT_FALSE(r.context.contains("x"));
  using Use = std::pair<std::string, std::string>;
  // x by the tuple cell, y by the control
  EXPECT_EQ(r.consumers, (std::vector<Use>{{"x", "y"}, {"y", ""}}));
  EXPECT_FALSE(decomposition_invariants(s, r));
}

TEST(ConfigCheck, CounterexampleIsRejected) {
  Store s;
  s.push("x", li_int(3));
  s.push("y", li_int(1));
  auto c = config(s, "x + x * y");
  auto r = config_check(c, sig());
  EXPECT_FALSE(r.ok);
  EXPECT_FALSE(r.inconclusive);
  ASSERT_TRUE(r.diagnostic);
  EXPECT_EQ(r.diagnostic->rule, "split");

  VerifyOptions mutant;
  mutant.check.operator_pseudosplit = true;
  EXPECT_TRUE(config_check(c, sig(), mutant).ok);
}

TEST(ConfigCheck, HiddenReadThenConsume) {
  Store s;
  s.push("x", li_int(3));
  s.push("y", li_int(1));
  auto r = config_check(config(s, "x + y"), sig());
  ASSERT_TRUE(r.ok);
  EXPECT_TRUE(r.context.find("x")->is_hidden());
}

TEST(ConfigCheck, CorpusProgramsCheck) {
  for (const auto& name : corpus_names()) {
    auto lp = load_program(get_program(name, Variant::WeakLinear, 3));
    EXPECT_TRUE(lp.report.ok) << name;
  }
}

TEST(Load, CounterexampleFailsWithSplitDiagnostic) {
  try {
    load_program(parse_program(counterexample_source()));
    FAIL() << "accepted";
  } catch (const LoadError& e) {
    EXPECT_EQ(e.stage, "main");
    EXPECT_EQ(e.diagnostic.rule, "split");
    EXPECT_EQ(e.diagnostic.variable, "x");
  }
}

TEST(Preservation, FibPassesAndTheDeallocMutantIsCaught) {
  auto lp = load_program(get_program("fib", Variant::WeakLinear, 4));
  auto clean = preservation_suite(lp, "fib", 4);
  EXPECT_TRUE(clean.passed()) << clean.record();
  EXPECT_EQ(clean.status, RunStatus::Terminal);
  EXPECT_GT(clean.steps_checked, 0u);

  SuiteOptions broken;
  broken.machine.mutant = Mutant::StoreQualifierDealloc;
  auto bad = preservation_suite(lp, "fib", 4, broken);
  EXPECT_FALSE(bad.passed());
  ASSERT_TRUE(bad.violation);
  EXPECT_EQ(bad.violation->rule, "eop");
}

TEST(Preservation, RefusesIllTypedStart) {
  LoadOptions unsafe;
  unsafe.unsafe = true;
  auto lp = load_program(parse_program(counterexample_source()), unsafe);
  auto r = preservation_suite(lp, "counterexample", 0);
  EXPECT_FALSE(r.started);
  EXPECT_FALSE(r.passed());
  EXPECT_EQ(r.steps_checked, 0u);
}

TEST(Progress, MapTraceAndTerminalExclusion) {
  auto lp = load_program(get_program("map", Variant::WeakLinear, 3));
  std::vector<PoolEntry> pool;
  SuiteOptions so;
  so.pool = &pool;
  ASSERT_TRUE(preservation_suite(lp, "map", 3, so).passed());
  ASSERT_FALSE(pool.empty());
  auto r = progress_suite(pool);
  EXPECT_TRUE(r.passed());
  EXPECT_EQ(r.checked, pool.size());

  Store s;
  s.push("x", li_int(1));
  std::vector<PoolEntry> terminal{{lp.signature, {s, parse_expression("x", sig(), {"x"})}, {}, "t"}};
  auto t = progress_suite(terminal);
  EXPECT_EQ(t.terminal_excluded, 1u);
  EXPECT_EQ(t.checked, 0u);
}

TEST(Generator, DeterministicWellTypedAndShallow) {
  auto a = generate_configurations(7, 200, 3);
  auto b = generate_configurations(7, 200, 3);
  ASSERT_EQ(a.size(), 200u);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(to_string(a[i].config.control), to_string(b[i].config.control));
    EXPECT_EQ(a[i].config.store, b[i].config.store);
    EXPECT_LE(expr_depth(a[i].config.control), 3u);
  }
  auto r = progress_suite(a);
  EXPECT_TRUE(r.passed());
  EXPECT_EQ(r.ill_typed, 0u);
}

}  // namespace
