#include <gtest/gtest.h>

#include <array>
#include <map>
#include <set>

#include "wlt/surface.hpp"
#include "wlt/syntax.hpp"

using namespace wlt;

namespace {

// Independent closure of {li <= un} under reflexivity and transitivity.
bool leq_oracle(PseudoQualifier a, PseudoQualifier b) {
  std::set<std::pair<int, int>> rel = {{int(PseudoQualifier::Li), int(PseudoQualifier::Un)}};
  for (int q = 0; q < 3; ++q) rel.insert({q, q});
  bool grew = true;
  while (grew) {
    grew = false;
    for (auto [x, y] : std::set(rel))
      for (auto [y2, z] : std::set(rel))
        if (y == y2 && rel.insert({x, z}).second) grew = true;
  }
  return rel.count({int(a), int(b)}) > 0;
}

constexpr std::array kAll = {PseudoQualifier::Li, PseudoQualifier::Un, PseudoQualifier::Hi};

}  // namespace

TEST(Qualifiers, LeqMatchesClosure) {
  for (auto a : kAll)
    for (auto b : kAll) EXPECT_EQ(qualifier_leq(a, b), leq_oracle(a, b));
  EXPECT_TRUE(qualifier_leq(PseudoQualifier::Li, PseudoQualifier::Un));
  EXPECT_FALSE(qualifier_leq(PseudoQualifier::Un, PseudoQualifier::Li));
}

TEST(Qualifiers, LeqIsPartialOrder) {
  for (auto a : kAll) {
    EXPECT_TRUE(qualifier_leq(a, a));
    for (auto b : kAll) {
      if (qualifier_leq(a, b) && qualifier_leq(b, a)) EXPECT_EQ(a, b);
      for (auto c : kAll)
        if (qualifier_leq(a, b) && qualifier_leq(b, c)) EXPECT_TRUE(qualifier_leq(a, c));
    }
  }
}

TEST(Qualifiers, TypeIsQ) {
  EXPECT_TRUE(type_is_q(Qualifier::Li, types::un(types::int_())));
  EXPECT_FALSE(type_is_q(Qualifier::Un, types::li(types::int_())));
  EXPECT_TRUE(type_is_q(Qualifier::Un, PseudoType::hidden(types::int_())));
}

TEST(Contexts, CtxIsQ) {
  EXPECT_TRUE(ctx_is_q(Qualifier::Un, TypeContext{}));
  TypeContext mixed{{"x", PseudoType::proper(types::un(types::int_()))},
                    {"y", PseudoType::hidden(types::int_())}};
  EXPECT_TRUE(ctx_is_q(Qualifier::Un, mixed));
  TypeContext lin{{"x", PseudoType::proper(types::li(types::int_()))}};
  EXPECT_FALSE(ctx_is_q(Qualifier::Un, lin));
}

TEST(Contexts, RejectsDuplicates) {
  auto t = PseudoType::proper(types::un(types::int_()));
  EXPECT_THROW((TypeContext{{"x", t}, {"x", t}}), DuplicateVariable);
  TypeContext c;
  c.push("x", t);
  EXPECT_THROW(c.push("x", t), DuplicateVariable);
}

TEST(Contexts, HiddenOnlyOnBase) {
  EXPECT_THROW(PseudoType::hidden(Pretype::tuple({types::li(types::int_())})),
               std::invalid_argument);
}

TEST(FreeVars, Examples) {
  EXPECT_EQ(free_vars(var("x")), std::vector<std::string>{"x"});
  auto lam = make(node::Lambda{Qualifier::Un, "x", types::un(types::int_()), var("x")});
  EXPECT_TRUE(free_vars(lam).empty());
  auto sum = op("+", {var("x"), var("x")});
  EXPECT_EQ(free_vars(sum), (std::vector<std::string>{"x", "x"}));
}

TEST(Subst, Examples) {
  EXPECT_TRUE(equal(apply_subst({{"x", "y"}}, var("x")), var("y")));
  auto lam = make(node::Lambda{Qualifier::Un, "x", types::un(types::int_()), var("x")});
  EXPECT_TRUE(equal(apply_subst({{"x", "y"}}, lam), lam));

  auto spl = make(node::Split{var("z"), {"x"}, var("x")});
  auto got = apply_subst({{"z", "x"}}, spl);
  auto s = got->as<node::Split>();
  ASSERT_NE(s, nullptr);
  EXPECT_TRUE(equal(s->scrutinee, var("x")));
  ASSERT_EQ(s->pattern.size(), 1u);
  EXPECT_NE(s->pattern[0], "x");
  EXPECT_TRUE(equal(s->body, var(s->pattern[0])));
}

namespace {

// Capture-avoidance oracle: rename every binder apart first, then substitute
// naively (no binder can capture after renaming).
int g_counter = 0;
ExprPtr rename_apart(const ExprPtr& e, std::map<std::string, std::string> env) {
  auto look = [&](const std::string& x) { return env.count(x) ? env.at(x) : x; };
  auto fresh = [&](const std::string& x) {
    auto n = "_r" + std::to_string(g_counter++);
    env[x] = n;
    return n;
  };
  return std::visit(
      [&](const auto& n) -> ExprPtr {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, node::Var>) {
          return var(look(n.name));
        } else if constexpr (std::is_same_v<T, node::Lambda>) {
          auto saved = env;
          auto p = fresh(n.param);
          auto b = rename_apart(n.body, env);
          env = saved;
          return make(node::Lambda{n.qual, p, n.param_type, b});
        } else if constexpr (std::is_same_v<T, node::Split>) {
          auto sc = rename_apart(n.scrutinee, env);
          std::vector<std::string> pat;
          for (auto& x : n.pattern) pat.push_back(fresh(x));
          return make(node::Split{sc, pat, rename_apart(n.body, env)});
        } else if constexpr (std::is_same_v<T, node::Op>) {
          auto copy = n;
          for (auto& a : copy.args) a = rename_apart(a, env);
          return make(copy);
        } else {
          return make(n);
        }
      },
      e->node);
}

}  // namespace

TEST(Subst, AgreesWithRenameApartOracle) {
  QualifiedSignature sig;
  sig.add({"add", {{PseudoType::proper(types::li(types::int_())),
                    PseudoType::proper(types::li(types::int_()))},
                   types::li(types::int_())},
           "add"});
  std::vector<std::string> cases = {
      "spl z as <x, y> in add(x, y)",
      "un \\x : li int. add(x, z)",
      "spl x as <y> in un \\z : li int. add(y, z)",
      "un \\y : li int. spl z as <x> in add(x, y)",
  };
  for (const auto& text : cases) {
    auto e = parse_expression(text, sig, {"x", "y", "z"});
    for (auto [from, to] : std::vector<std::pair<std::string, std::string>>{
             {"z", "x"}, {"z", "y"}, {"x", "y"}, {"y", "z"}}) {
      auto got = apply_subst({{from, to}}, e);
      auto renamed = rename_apart(e, {});
      auto want = apply_subst({{from, to}}, renamed);
      EXPECT_TRUE(alpha_equal(got, want)) << text << " [" << from << "->" << to << "]\n"
                                          << to_string(got) << "\n" << to_string(want);
      // alpha-equivalent inputs give alpha-equivalent outputs
      EXPECT_TRUE(alpha_equal(apply_subst({{from, to}}, renamed), got));
    }
  }
}

TEST(Subst, RenamesDeterministically) {
  auto spl = make(node::Split{var("z"), {"x"}, var("x")});
  EXPECT_TRUE(equal(apply_subst({{"z", "x"}}, spl), apply_subst({{"z", "x"}}, spl)));
}
