#include <algorithm>
#include <set>

#include "wlt/typing.hpp"

namespace wlt {

namespace {

[[noreturn]] void fail(std::string rule, std::string variable, Span span, std::string message) {
  throw TypeError(Diagnostic{std::move(rule), std::move(variable), span, std::move(message)});
}

std::string show(const Type& t) { return to_string(t); }

Type proper(const Typed& t) { return t.type.as_type(); }

// Records the now-known element type on `q []` literals in result position.
ExprPtr refine(const ExprPtr& e, const Type& t) {
  if (t.pre->kind() != Pretype::Kind::List || !t.pre->has_element()) return e;
  if (auto n = e->as<node::Nil>()) {
    if (n->element) return e;
    return make(node::Nil{n->qual, t.pre->element()}, e->span);
  }
  if (auto n = e->as<node::If>())
    return make(node::If{n->cond, refine(n->then_branch, t), refine(n->else_branch, t)}, e->span);
  if (auto n = e->as<node::Let>())
    return make(node::Let{n->name, n->annotation, n->bound, refine(n->body, t)}, e->span);
  if (auto n = e->as<node::Split>())
    return make(node::Split{n->scrutinee, n->pattern, refine(n->body, t)}, e->span);
  if (auto n = e->as<node::Case>())
    return make(node::Case{n->scrutinee, refine(n->nil_branch, t), n->head, n->tail,
                           refine(n->cons_branch, t)},
                e->span);
  return e;
}

/// Binds `name` in `env` for the duration of a scope. A binder that clashes
/// with an existing binding is renamed in the body.
class Binder {
 public:
  Binder(TypeContext& env, const std::string& name, const Type& type, ExprPtr& body)
      : env_(env) {
    name_ = name;
    if (env.contains(name)) {
      std::vector<std::string> used;
      collect_names(body, used);
      for (const auto& [x, _] : env.bindings()) used.push_back(x);
      for (int k = 1;; ++k) {
        std::string cand = name + "'" + std::to_string(k);
        if (std::find(used.begin(), used.end(), cand) == used.end()) {
          name_ = cand;
          break;
        }
      }
      body = apply_subst({{name, name_}}, body);
    }
    env.push(name_, PseudoType::proper(type));
  }
  ~Binder() { env_.erase(name_); }
  Binder(const Binder&) = delete;
  Binder& operator=(const Binder&) = delete;

  const std::string& name() const { return name_; }

 private:
  TypeContext& env_;
  std::string name_;
};

class Walk {
 public:
  Walk(const QualifiedSignature& sig, const CheckOptions& opts) : sig_(sig), opts_(opts) {}

  Typed expr(TypeContext& env, const ExprPtr& e) {
    return std::visit([&](const auto& n) { return this->visit(env, e, n); }, e->node);
  }

  Typed hidden(TypeContext& env, const ExprPtr& e, const PretypePtr& base) {
    auto v = e->as<node::Var>();
    if (!v)
      fail("pseudo", "", e->span,
           "an argument in a hidden position must be a variable, found '" + to_string(e) + "'");
    const PseudoType* t = env.find(v->name);
    if (!t) fail("var", v->name, e->span, "variable '" + v->name + "' is not bound");
    bool ok = (t->qual == PseudoQualifier::Li || t->qual == PseudoQualifier::Hi) &&
              t->pre->is_base() && *t->pre == *base;
    if (!ok)
      fail("pseudo", v->name, e->span,
           "variable '" + v->name + "' has type " + to_string(*t) + " but the hidden position expects " +
               to_string(PseudoType::hidden(base)) + " over a linear or hidden variable");
    Typed out;
    out.expr = e;
    out.type = PseudoType::hidden(base);
    out.usage.set(v->name, {Usage::Hidden, std::nullopt});
    out.rule = "hidden";
    return out;
  }

 private:
  const QualifiedSignature& sig_;
  const CheckOptions& opts_;

  static Typed leaf(ExprPtr e, Type t, std::string rule) {
    Typed out;
    out.expr = std::move(e);
    out.type = PseudoType::proper(t);
    out.rule = std::move(rule);
    return out;
  }

  // Usage of a premise with binders removed, after checking each binder.
  static UsageReport close(const std::vector<std::pair<std::string, Type>>& binders,
                           const UsageReport& usage, Span span) {
    UsageReport out = usage;
    for (const auto& [x, t] : binders) {
      Usage u = out.get(x);
      if (t.qual == Qualifier::Li && u != Usage::Linear) {
        if (u == Usage::Hidden)
          fail("unused-linear", x, span,
               "linear variable '" + x + "' is only read hidden and never consumed");
        fail("unused-linear", x, span, "linear variable '" + x + "' is never consumed");
      }
      out.erase(x);
    }
    return out;
  }

  Typed visit(TypeContext& env, const ExprPtr& e, const node::Var& n) {
    const PseudoType* t = env.find(n.name);
    if (!t) fail("var", n.name, e->span, "variable '" + n.name + "' is not bound");
    if (t->is_hidden())
      fail("var", n.name, e->span,
           "hidden variable '" + n.name + "' may only be read in a hidden operator position");
    Typed out = leaf(e, t->as_type(), "var");
    out.usage.set(n.name, {t->qual == PseudoQualifier::Li ? Usage::Linear : Usage::Unrestricted,
                           std::nullopt});
    return out;
  }

  Typed visit(TypeContext& env, const ExprPtr& e, const node::Op& n) {
    if (n.literal) return leaf(e, n.type->output, "const");

    std::vector<std::size_t> cands;
    if (n.entry) {
      if (*n.entry >= sig_.entries().size() || sig_.entries()[*n.entry].name != n.name)
        fail("op", "", e->span, "operator '" + n.name + "' does not match its signature entry");
      cands.push_back(*n.entry);
    } else {
      cands = sig_.candidates(n.name, n.args.size());
      if (n.type)
        cands.erase(std::remove_if(cands.begin(), cands.end(),
                                   [&](std::size_t k) {
                                     return !(sig_.entries()[k].type == *n.type);
                                   }),
                    cands.end());
    }
    if (cands.empty())
      fail("op", "", e->span,
           "no signature entry for '" + n.name + "' with " + std::to_string(n.args.size()) +
               " argument(s)" + (n.type ? " and type " + to_string(*n.type) : ""));

    // Non-variable arguments do not depend on the candidate.
    std::vector<std::optional<Typed>> typed(n.args.size());
    std::optional<TypeError> arg_error;
    for (std::size_t i = 0; i < n.args.size(); ++i)
      if (!n.args[i]->is<node::Var>()) typed[i] = expr(env, n.args[i]);

    std::vector<std::pair<std::size_t, Typed>> fits;
    std::optional<TypeError> first_error;
    for (std::size_t k : cands) {
      try {
        fits.emplace_back(k, with_entry(env, e, n, k, typed));
      } catch (const TypeError& err) {
        if (!first_error) first_error = err;
      }
    }
    if (fits.empty()) {
      if (cands.size() == 1) throw *first_error;
      Diagnostic d = first_error->diagnostic;
      d.message = "no signature entry for '" + n.name + "' fits; first attempt: " + d.message;
      throw TypeError(d);
    }
    for (const auto& [k, _] : fits)
      if (!(sig_.entries()[k].type == sig_.entries()[fits.front().first].type))
        fail("op", "", e->span,
             "operator '" + n.name + "' is ambiguous between entries @" +
                 std::to_string(fits.front().first + 1) + " and @" + std::to_string(k + 1) +
                 "; annotate the occurrence");
    return std::move(fits.front().second);
  }

  Typed with_entry(TypeContext& env, const ExprPtr& e, const node::Op& n, std::size_t k,
                   const std::vector<std::optional<Typed>>& typed) {
    const SignatureEntry& entry = sig_.entries()[k];
    const OperatorType& tau = entry.type;
    Typed out;
    std::vector<ExprPtr> args;
    std::vector<UsageReport> usages;
    for (std::size_t i = 0; i < n.args.size(); ++i) {
      const PseudoType& want = tau.inputs[i];
      Typed arg;
      if (want.is_hidden()) {
        arg = hidden(env, n.args[i], want.pre);
      } else {
        arg = typed[i] ? *typed[i] : expr(env, n.args[i]);
        Type have = proper(arg);
        Type need = want.as_type();
        if (have.qual != need.qual || !unify(have, need))
          fail("op", "", n.args[i]->span,
               "argument " + std::to_string(i + 1) + " of '" + n.name + "' has type " + show(have) +
                   " but " + to_string(tau) + " expects " + show(need));
        arg.expr = refine(arg.expr, need);
      }
      args.push_back(arg.expr);
      usages.push_back(arg.usage);
      out.children.push_back(std::move(arg));
    }
    out.merge = opts_.operator_pseudosplit ? MergeRule::PseudoSplit : MergeRule::Split;
    out.usage = merge_usages_or_throw(out.merge, usages, e->span);
    out.binders.assign(out.children.size(), {});
    out.type = PseudoType::proper(tau.output);
    out.rule = "op";
    out.expr = op(n.name, k, tau, std::move(args), e->span);
    return out;
  }

  Typed visit(TypeContext& env, const ExprPtr& e, const node::Tuple& n) {
    Typed out;
    std::vector<Type> items;
    std::vector<ExprPtr> elab;
    std::vector<UsageReport> usages;
    for (const auto& item : n.items) {
      Typed t = expr(env, item);
      Type ty = proper(t);
      if (!type_is_q(n.qual, ty))
        fail("tuple", "", item->span,
             "component of type " + show(ty) + " cannot be stored in a " +
                 std::string(to_string(n.qual)) + " tuple");
      items.push_back(ty);
      elab.push_back(t.expr);
      usages.push_back(t.usage);
      out.children.push_back(std::move(t));
    }
    out.usage = merge_usages_or_throw(MergeRule::PseudoSplit, usages, e->span);
    out.binders.assign(out.children.size(), {});
    out.type = PseudoType::proper(Type{n.qual, Pretype::tuple(std::move(items))});
    out.rule = "tuple";
    out.expr = make(node::Tuple{n.qual, std::move(elab)}, e->span);
    return out;
  }

  Typed visit(TypeContext& env, const ExprPtr& e, const node::App& n) {
    Typed fn = expr(env, n.fn);
    Typed arg = expr(env, n.arg);
    Type ft = proper(fn);
    if (ft.pre->kind() != Pretype::Kind::Arrow)
      fail("app", "", n.fn->span, "applying a value of non-function type " + show(ft));
    Type at = proper(arg);
    if (!unify(at, ft.pre->from()))
      fail("app", "", n.arg->span,
           "argument has type " + show(at) + " but the function expects " + show(ft.pre->from()));
    Typed out;
    out.usage = merge_usages_or_throw(MergeRule::PseudoSplit, {fn.usage, arg.usage}, e->span);
    out.type = PseudoType::proper(ft.pre->to());
    out.rule = "app";
    out.expr = make(node::App{fn.expr, refine(arg.expr, ft.pre->from())}, e->span);
    out.children.push_back(std::move(fn));
    out.children.push_back(std::move(arg));
    out.binders.assign(2, {});
    return out;
  }

  Typed visit(TypeContext& env, const ExprPtr& e, const node::Lambda& n) {
    ExprPtr body = n.body;
    Binder b(env, n.param, n.param_type, body);
    Typed t = expr(env, body);
    UsageReport usage = close({{b.name(), n.param_type}}, t.usage, e->span);
    for (const auto& [x, u] : usage.entries()) {
      if (u.usage == Usage::Linear && n.qual == Qualifier::Un)
        fail("lam", x, e->span,
             "unrestricted closure captures linear variable '" + x + "'");
      if (u.usage == Usage::Hidden && !opts_.allow_hidden_capture)
        fail("lam", x, e->span,
             "closure reads '" + x +
                 "' in a hidden position; the cell could be freed before the closure runs");
    }
    Typed out;
    out.usage = usage;
    out.type = PseudoType::proper(
        Type{n.qual, Pretype::arrow(n.param_type, proper(t))});
    out.rule = "lam";
    out.expr = make(node::Lambda{n.qual, b.name(), n.param_type, t.expr}, e->span);
    out.binders.push_back({{b.name(), PseudoType::proper(n.param_type)}});
    out.children.push_back(std::move(t));
    return out;
  }

  Typed visit(TypeContext& env, const ExprPtr& e, const node::Split& n) {
    Typed scrut = expr(env, n.scrutinee);
    Type st = proper(scrut);
    if (st.pre->kind() != Pretype::Kind::Tuple || st.pre->items().size() != n.pattern.size())
      fail("spl", "", n.scrutinee->span,
           "cannot split a value of type " + show(st) + " into " +
               std::to_string(n.pattern.size()) + " component(s)");
    ExprPtr body = n.body;
    std::vector<std::unique_ptr<Binder>> bs;
    std::vector<std::pair<std::string, Type>> binders;
    std::vector<std::string> names;
    for (std::size_t i = 0; i < n.pattern.size(); ++i) {
      bs.push_back(std::make_unique<Binder>(env, n.pattern[i], st.pre->items()[i], body));
      binders.emplace_back(bs.back()->name(), st.pre->items()[i]);
      names.push_back(bs.back()->name());
    }
    Typed t = expr(env, body);
    UsageReport bu = close(binders, t.usage, e->span);
    while (!bs.empty()) bs.pop_back();
    Typed out;
    out.usage = merge_usages_or_throw(MergeRule::PseudoSplit, {scrut.usage, bu}, e->span);
    out.type = t.type;
    out.rule = "spl";
    out.expr = make(node::Split{scrut.expr, names, t.expr}, e->span);
    out.binders.push_back({});
    out.binders.emplace_back();
    for (const auto& [x, ty] : binders) out.binders.back().emplace_back(x, PseudoType::proper(ty));
    out.children.push_back(std::move(scrut));
    out.children.push_back(std::move(t));
    return out;
  }

  Typed visit(TypeContext& env, const ExprPtr& e, const node::If& n) {
    Typed c = expr(env, n.cond);
    Type ct = proper(c);
    if (!(*ct.pre == *types::bool_()))
      fail("if", "", n.cond->span, "condition has type " + show(ct) + ", expected a bool");
    Typed a = expr(env, n.then_branch);
    Typed b = expr(env, n.else_branch);
    auto ty = unify(proper(a), proper(b));
    if (!ty)
      fail("if", "", e->span,
           "branches have different types " + show(proper(a)) + " and " + show(proper(b)));
    UsageReport shared = merge_usages_or_throw(MergeRule::Branch, {a.usage, b.usage}, e->span);
    Typed out;
    out.usage = merge_usages_or_throw(MergeRule::PseudoSplit, {c.usage, shared}, e->span);
    out.type = PseudoType::proper(*ty);
    out.rule = "if";
    out.expr = make(node::If{c.expr, refine(a.expr, *ty), refine(b.expr, *ty)}, e->span);
    out.children.push_back(std::move(c));
    out.children.push_back(std::move(a));
    out.children.push_back(std::move(b));
    out.binders.assign(3, {});
    out.branch_from = 1;
    return out;
  }

  Typed visit(TypeContext& env, const ExprPtr& e, const node::Let& n) {
    Typed bound = expr(env, n.bound);
    Type bt = proper(bound);
    if (n.annotation) {
      auto u = unify(bt, *n.annotation);
      if (!u)
        fail("let", n.name, n.bound->span,
             "'" + n.name + "' is annotated " + show(*n.annotation) + " but bound to " + show(bt));
      bt = *u;
    }
    ExprPtr body = n.body;
    Binder b(env, n.name, bt, body);
    Typed t = expr(env, body);
    UsageReport bu = close({{b.name(), bt}}, t.usage, e->span);
    Typed out;
    out.usage = merge_usages_or_throw(MergeRule::PseudoSplit, {bound.usage, bu}, e->span);
    out.type = t.type;
    out.rule = "let";
    out.expr = make(node::Let{b.name(), n.annotation, refine(bound.expr, bt), t.expr}, e->span);
    out.binders = {{}, {{b.name(), PseudoType::proper(bt)}}};
    out.children.push_back(std::move(bound));
    out.children.push_back(std::move(t));
    return out;
  }

  Typed visit(TypeContext&, const ExprPtr& e, const node::Nil& n) {
    return leaf(e, Type{n.qual, Pretype::list(n.element)}, "nil");
  }

  Typed visit(TypeContext& env, const ExprPtr& e, const node::Cons& n) {
    Typed h = expr(env, n.head);
    Typed t = expr(env, n.tail);
    Type ht = proper(h);
    if (!type_is_q(n.qual, ht))
      fail("cons", "", n.head->span,
           "element of type " + show(ht) + " cannot be stored in a " +
               std::string(to_string(n.qual)) + " list");
    Type tt = proper(t);
    auto lt = unify(tt, Type{n.qual, Pretype::list(ht)});
    if (!lt)
      fail("cons", "", n.tail->span,
           "tail has type " + show(tt) + ", expected " + show(Type{n.qual, Pretype::list(ht)}));
    Typed out;
    out.usage = merge_usages_or_throw(MergeRule::PseudoSplit, {h.usage, t.usage}, e->span);
    out.type = PseudoType::proper(*lt);
    out.rule = "cons";
    out.expr = make(node::Cons{n.qual, h.expr, refine(t.expr, *lt)}, e->span);
    out.children.push_back(std::move(h));
    out.children.push_back(std::move(t));
    out.binders.assign(2, {});
    return out;
  }

  Typed visit(TypeContext& env, const ExprPtr& e, const node::Case& n) {
    Typed s = expr(env, n.scrutinee);
    Type st = proper(s);
    if (st.pre->kind() != Pretype::Kind::List)
      fail("case", "", n.scrutinee->span, "case on a value of non-list type " + show(st));
    if (!st.pre->has_element())
      fail("case", "", n.scrutinee->span, "cannot determine the element type of the scrutinee");
    Typed nil = expr(env, n.nil_branch);
    ExprPtr body = n.cons_branch;
    Type elem = st.pre->element();
    std::optional<Binder> hb;
    hb.emplace(env, n.head, elem, body);
    Binder tb(env, n.tail, st, body);
    Typed cons = expr(env, body);
    UsageReport cu = close({{hb->name(), elem}, {tb.name(), st}}, cons.usage, e->span);
    auto ty = unify(proper(nil), proper(cons));
    if (!ty)
      fail("case", "", e->span,
           "branches have different types " + show(proper(nil)) + " and " + show(proper(cons)));
    UsageReport shared = merge_usages_or_throw(MergeRule::Branch, {nil.usage, cu}, e->span);
    Typed out;
    out.usage = merge_usages_or_throw(MergeRule::PseudoSplit, {s.usage, shared}, e->span);
    out.type = PseudoType::proper(*ty);
    out.rule = "case";
    out.expr = make(
        node::Case{s.expr, refine(nil.expr, *ty), hb->name(), tb.name(), refine(cons.expr, *ty)},
        e->span);
    out.binders = {{},
                   {},
                   {{hb->name(), PseudoType::proper(elem)}, {tb.name(), PseudoType::proper(st)}}};
    out.children.push_back(std::move(s));
    out.children.push_back(std::move(nil));
    out.children.push_back(std::move(cons));
    out.branch_from = 1;
    return out;
  }
};

}  // namespace

Checker::Checker(const QualifiedSignature& sig, CheckOptions opts) : sig_(sig), opts_(opts) {}

Typed Checker::check(const TypeContext& ctx, const ExprPtr& e) const {
  TypeContext env = ctx;
  Walk w(sig_, opts_);
  Typed t = w.expr(env, e);
  check_top_usage(ctx, t.usage, e->span);
  return t;
}

Typed Checker::check_pseudo(const TypeContext& ctx, const ExprPtr& e,
                            const PseudoType& expected) const {
  if (!expected.is_hidden()) {
    Typed t = check(ctx, e);
    Type have = t.type.as_type();
    if (have.qual != expected.as_type().qual || !unify(have, expected.as_type()))
      throw TypeError(Diagnostic{"pseudo", "", e->span,
                                 "expression has type " + to_string(have) + ", expected " +
                                     to_string(expected)});
    return t;
  }
  TypeContext env = ctx;
  Walk w(sig_, opts_);
  Typed t = w.hidden(env, e, expected.pre);
  // un(Π₁, Π₂) around the hidden variable
  const std::string& x = e->as<node::Var>()->name;
  for (const auto& [y, ty] : ctx.bindings())
    if (y != x && !type_is_q(Qualifier::Un, ty))
      throw TypeError(Diagnostic{"pseudo", y, e->span,
                                 "linear variable '" + y + "' is left unused beside hidden '" + x +
                                     "'"});
  return t;
}

Verdict<TypeResult> type_of(const TypeContext& ctx, const QualifiedSignature& sig,
                            const ExprPtr& e, const CheckOptions& opts) {
  try {
    Typed t = Checker(sig, opts).check(ctx, e);
    return TypeResult{t.type.as_type(), t.usage, t.expr};
  } catch (const TypeError& err) {
    return err.diagnostic;
  }
}

Verdict<PseudoType> pseudo_type_of(const TypeContext& ctx, const QualifiedSignature& sig,
                                   const ExprPtr& e, const PseudoType& expected,
                                   const CheckOptions& opts) {
  try {
    return Checker(sig, opts).check_pseudo(ctx, e, expected).type;
  } catch (const TypeError& err) {
    return err.diagnostic;
  }
}

}  // namespace wlt
