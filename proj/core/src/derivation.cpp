#include <algorithm>
#include <sstream>

#include "wlt/typing.hpp"

namespace wlt {

namespace {

UsageReport without(const UsageReport& u, const std::vector<TypeContext::Binding>& binders) {
  UsageReport out = u;
  for (const auto& [x, _] : binders) out.erase(x);
  return out;
}

std::vector<TypeContext> distribute(const TypeContext& whole,
                                    const std::vector<UsageReport>& usages, MergeRule merge) {
  std::vector<TypeContext> parts(usages.size());
  for (const auto& [x, t] : whole.bindings()) {
    if (t.qual != PseudoQualifier::Li) {
      for (auto& p : parts) p.push(x, t);
      continue;
    }
    std::size_t j = usages.size();
    for (std::size_t i = 0; i < usages.size(); ++i)
      if (usages[i].get(x) == Usage::Linear) {
        j = i;
        break;
      }
    if (j == usages.size()) continue;  // left for validation to report
    bool hidden_before = false;
    for (std::size_t i = 0; i < j; ++i) hidden_before |= usages[i].get(x) == Usage::Hidden;
    if (merge == MergeRule::PseudoSplit && t.pre->is_base() && hidden_before)
      for (std::size_t i = 0; i < j; ++i) parts[i].push(x, PseudoType::hidden(t.pre));
    parts[j].push(x, t);
  }
  return parts;
}

TypeContext extend(TypeContext ctx, const std::vector<TypeContext::Binding>& binders) {
  for (const auto& [x, t] : binders) ctx.push(x, t);
  return ctx;
}

}  // namespace

Derivation reconstruct(const TypeContext& root, const Typed& t) {
  Derivation d;
  d.rule = t.rule;
  d.context = root;
  d.expr = t.expr;
  d.type = t.type;
  d.binders = t.binders;
  d.merge = t.merge;
  d.branch_from = t.branch_from;
  if (t.children.empty()) return d;
  if (t.rule == "lam") {
    d.premises.push_back(reconstruct(extend(root, t.binders[0]), t.children[0]));
    return d;
  }
  std::size_t groups = t.branch_from ? t.branch_from + 1 : t.children.size();
  std::vector<UsageReport> usages;
  for (std::size_t i = 0; i < groups && i < t.children.size(); ++i) {
    if (t.branch_from && i == t.branch_from) break;
    usages.push_back(without(t.children[i].usage, t.binders[i]));
  }
  if (t.branch_from) {
    std::vector<UsageReport> branch;
    for (std::size_t i = t.branch_from; i < t.children.size(); ++i)
      branch.push_back(without(t.children[i].usage, t.binders[i]));
    usages.push_back(merge_usages_or_throw(MergeRule::Branch, branch));
  }
  auto parts = distribute(root, usages, t.merge);
  for (std::size_t i = 0; i < t.children.size(); ++i) {
    const TypeContext& base = parts[t.branch_from ? std::min(i, t.branch_from) : i];
    d.premises.push_back(reconstruct(extend(base, t.binders[i]), t.children[i]));
  }
  return d;
}

namespace {

struct Invalid {
  std::string what;
};

[[noreturn]] void bad(const Derivation& d, const std::string& why) {
  throw Invalid{"[" + d.rule + "] " + to_string(d.context) + " |- " + to_string(d.expr) + " : " +
                to_string(d.type) + ": " + why};
}

TypeContext strip(const Derivation& d, std::size_t i) {
  const auto& b = d.premises[i].context.bindings();
  const auto& binders = d.binders.at(i);
  if (b.size() < binders.size()) bad(d, "premise context lacks its binders");
  std::vector<TypeContext::Binding> prefix(b.begin(), b.end() - binders.size());
  std::vector<TypeContext::Binding> tail(b.end() - binders.size(), b.end());
  if (tail != binders) bad(d, "premise context does not end with its binders");
  return TypeContext(std::move(prefix));
}

bool same(const Type& a, const Type& b) { return a.qual == b.qual && unify(a, b).has_value(); }

bool others_un(const TypeContext& ctx, const std::string& x) {
  for (const auto& [y, t] : ctx.bindings())
    if (y != x && !type_is_q(Qualifier::Un, t)) return false;
  return true;
}

Type ty(const Derivation& d) {
  if (d.type.is_hidden()) bad(d, "hidden type outside an operator argument");
  return d.type.as_type();
}

void check_node(const Derivation& d, const QualifiedSignature& sig, const CheckOptions& opts) {
  const std::string& r = d.rule;
  auto premise_count = [&](std::size_t n) {
    if (d.premises.size() != n) bad(d, "wrong number of premises");
  };
  auto pseudo = [&](const std::vector<TypeContext>& parts) {
    if (!pseudosplit_check(parts, d.context)) bad(d, "premise contexts do not pseudosplit");
  };

  if (r == "var") {
    auto v = d.expr->as<node::Var>();
    const PseudoType* t = v ? d.context.find(v->name) : nullptr;
    if (!t || t->is_hidden() || !same(t->as_type(), ty(d))) bad(d, "variable rule mismatch");
    if (!others_un(d.context, v->name)) bad(d, "un(Π₁, Π₂) fails");
  } else if (r == "hidden") {
    auto v = d.expr->as<node::Var>();
    const PseudoType* t = v ? d.context.find(v->name) : nullptr;
    if (!t || !t->is_hidden() || !(*t == d.type)) bad(d, "hidden variable rule mismatch");
    if (!others_un(d.context, v->name)) bad(d, "un(Π₁, Π₂) fails");
  } else if (r == "const" || r == "nil") {
    premise_count(0);
    if (!split_check({}, d.context)) bad(d, "un(Π) fails for a nullary rule");
  } else if (r == "op") {
    auto o = d.expr->as<node::Op>();
    if (!o || !o->type || !o->entry) bad(d, "operator is not elaborated");
    const auto& entries = sig.entries();
    if (*o->entry >= entries.size() || !(entries[*o->entry].type == *o->type))
      bad(d, "operator type is not in the signature");
    const OperatorType& tau = *o->type;
    premise_count(tau.inputs.size());
    std::vector<TypeContext> parts;
    for (std::size_t i = 0; i < d.premises.size(); ++i) {
      parts.push_back(strip(d, i));
      const PseudoType& want = tau.inputs[i];
      const PseudoType& got = d.premises[i].type;
      bool ok = want.is_hidden() ? got == want
                                 : !got.is_hidden() && same(got.as_type(), want.as_type());
      if (!ok) bad(d, "argument " + std::to_string(i + 1) + " does not match τ");
    }
    bool split = opts.operator_pseudosplit ? pseudosplit_check(parts, d.context)
                                           : split_check(parts, d.context);
    if (!split) bad(d, "argument contexts do not split");
    if (!same(ty(d), tau.output)) bad(d, "result type differs from τ");
  } else if (r == "tuple") {
    auto t = d.expr->as<node::Tuple>();
    std::vector<TypeContext> parts;
    std::vector<Type> items;
    for (std::size_t i = 0; i < d.premises.size(); ++i) {
      parts.push_back(strip(d, i));
      Type it = ty(d.premises[i]);
      if (!type_is_q(t->qual, it)) bad(d, "q(Tᵢ) fails");
      items.push_back(it);
    }
    pseudo(parts);
    if (!same(ty(d), Type{t->qual, Pretype::tuple(items)})) bad(d, "tuple type mismatch");
  } else if (r == "lam") {
    auto l = d.expr->as<node::Lambda>();
    premise_count(1);
    if (!ctx_is_q(l->qual, d.context)) bad(d, "q(Π) fails for the closure context");
    if (!(strip(d, 0) == d.context)) bad(d, "body context is not Π, x:T");
    if (!same(ty(d), Type{l->qual, Pretype::arrow(l->param_type, ty(d.premises[0]))}))
      bad(d, "closure type mismatch");
  } else if (r == "app") {
    premise_count(2);
    pseudo({strip(d, 0), strip(d, 1)});
    Type f = ty(d.premises[0]);
    if (f.pre->kind() != Pretype::Kind::Arrow || !same(ty(d.premises[1]), f.pre->from()) ||
        !same(ty(d), f.pre->to()))
      bad(d, "application types mismatch");
  } else if (r == "spl" || r == "let" || r == "cons") {
    premise_count(2);
    pseudo({strip(d, 0), strip(d, 1)});
    if (r == "spl") {
      Type s = ty(d.premises[0]);
      if (s.pre->kind() != Pretype::Kind::Tuple) bad(d, "scrutinee is not a tuple");
      std::vector<TypeContext::Binding> want;
      auto sp = d.expr->as<node::Split>();
      for (std::size_t i = 0; i < sp->pattern.size(); ++i)
        want.emplace_back(sp->pattern[i], PseudoType::proper(s.pre->items().at(i)));
      if (want != d.binders[1]) bad(d, "pattern bindings do not match the tuple type");
      if (!same(ty(d), ty(d.premises[1]))) bad(d, "result type mismatch");
    } else if (r == "let") {
      auto lt = d.expr->as<node::Let>();
      if (d.binders[1].size() != 1 || d.binders[1][0].first != lt->name ||
          !same(d.binders[1][0].second.as_type(), ty(d.premises[0])))
        bad(d, "let binding does not match the bound type");
      if (!same(ty(d), ty(d.premises[1]))) bad(d, "result type mismatch");
    } else {
      auto c = d.expr->as<node::Cons>();
      Type h = ty(d.premises[0]);
      if (!type_is_q(c->qual, h)) bad(d, "q(T) fails for the head");
      if (!same(ty(d.premises[1]), Type{c->qual, Pretype::list(h)}) ||
          !same(ty(d), Type{c->qual, Pretype::list(h)}))
        bad(d, "list types mismatch");
    }
  } else if (r == "if" || r == "case") {
    premise_count(3);
    TypeContext a = strip(d, 1);
    TypeContext b = strip(d, 2);
    if (!(a == b)) bad(d, "branches are typed under different contexts");
    pseudo({strip(d, 0), a});
    if (!same(ty(d.premises[1]), ty(d)) || !same(ty(d.premises[2]), ty(d)))
      bad(d, "branch type mismatch");
    Type s = ty(d.premises[0]);
    if (r == "if" && !(*s.pre == *types::bool_())) bad(d, "condition is not a bool");
    if (r == "case" && s.pre->kind() != Pretype::Kind::List) bad(d, "scrutinee is not a list");
  } else {
    bad(d, "unknown rule");
  }
}

void walk(const Derivation& d, const QualifiedSignature& sig, const CheckOptions& opts) {
  check_node(d, sig, opts);
  for (const auto& p : d.premises) walk(p, sig, opts);
}

}  // namespace

std::optional<std::string> validate(const Derivation& d, const QualifiedSignature& sig,
                                    const CheckOptions& opts) {
  try {
    walk(d, sig, opts);
  } catch (const Invalid& e) {
    return e.what;
  } catch (const std::exception& e) {
    return std::string(e.what());
  }
  return std::nullopt;
}

std::string to_string(const Derivation& d, int indent) {
  std::ostringstream out;
  out << std::string(indent * 2, ' ') << "(" << d.rule << ") " << to_string(d.context) << " |- "
      << to_string(d.expr) << " : " << to_string(d.type) << "\n";
  for (const auto& p : d.premises) out << to_string(p, indent + 1);
  return out.str();
}

}  // namespace wlt
