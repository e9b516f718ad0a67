#include "wlt/syntax.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>
#include <unordered_set>

namespace wlt {

std::optional<Qualifier> narrow(PseudoQualifier q) {
  switch (q) {
    case PseudoQualifier::Li:
      return Qualifier::Li;
    case PseudoQualifier::Un:
      return Qualifier::Un;
    case PseudoQualifier::Hi:
      return std::nullopt;
  }
  return std::nullopt;
}

std::string_view to_string(Qualifier q) { return q == Qualifier::Li ? "li" : "un"; }

std::string_view to_string(PseudoQualifier q) {
  switch (q) {
    case PseudoQualifier::Li:
      return "li";
    case PseudoQualifier::Un:
      return "un";
    case PseudoQualifier::Hi:
      return "hi";
  }
  return "?";
}

bool qualifier_leq(PseudoQualifier a, PseudoQualifier b) {
  return a == b || (a == PseudoQualifier::Li && b == PseudoQualifier::Un);
}

// ---------------------------------------------------------------------------
// Pretypes and types

PretypePtr Pretype::base(std::string name) {
  return PretypePtr(new Pretype(Kind::Base, std::move(name), {}));
}

PretypePtr Pretype::tuple(std::vector<Type> items) {
  if (items.empty()) throw std::invalid_argument("tuple pretype needs at least one component");
  return PretypePtr(new Pretype(Kind::Tuple, {}, std::move(items)));
}

PretypePtr Pretype::arrow(Type from, Type to) {
  return PretypePtr(new Pretype(Kind::Arrow, {}, {std::move(from), std::move(to)}));
}

PretypePtr Pretype::list(std::optional<Type> element) {
  std::vector<Type> items;
  if (element) items.push_back(std::move(*element));
  return PretypePtr(new Pretype(Kind::List, {}, std::move(items)));
}

namespace types {
PretypePtr int_() {
  static const PretypePtr p = Pretype::base("int");
  return p;
}
PretypePtr bool_() {
  static const PretypePtr p = Pretype::base("bool");
  return p;
}
PretypePtr array() {
  static const PretypePtr p = Pretype::base("array");
  return p;
}
}  // namespace types

bool operator==(const Pretype& a, const Pretype& b) {
  if (&a == &b) return true;
  if (a.kind() != b.kind()) return false;
  if (a.kind() == Pretype::Kind::Base) return a.base_name() == b.base_name();
  return a.items() == b.items();
}

bool operator==(const Type& a, const Type& b) {
  if (a.qual != b.qual) return false;
  if (a.pre == b.pre) return true;
  if (!a.pre || !b.pre) return false;
  return *a.pre == *b.pre;
}

std::optional<PretypePtr> unify(const PretypePtr& a, const PretypePtr& b) {
  if (a == b) return a;
  if (a->kind() != b->kind()) return std::nullopt;
  switch (a->kind()) {
    case Pretype::Kind::Base:
      if (a->base_name() == b->base_name()) return a;
      return std::nullopt;
    case Pretype::Kind::List: {
      if (!a->has_element()) return b;
      if (!b->has_element()) return a;
      auto e = unify(a->element(), b->element());
      if (!e) return std::nullopt;
      return Pretype::list(*e);
    }
    case Pretype::Kind::Tuple:
    case Pretype::Kind::Arrow: {
      if (a->items().size() != b->items().size()) return std::nullopt;
      std::vector<Type> items;
      for (std::size_t i = 0; i < a->items().size(); ++i) {
        auto t = unify(a->items()[i], b->items()[i]);
        if (!t) return std::nullopt;
        items.push_back(*t);
      }
      if (a->kind() == Pretype::Kind::Tuple) return Pretype::tuple(std::move(items));
      return Pretype::arrow(items[0], items[1]);
    }
  }
  return std::nullopt;
}

std::optional<Type> unify(const Type& a, const Type& b) {
  if (a.qual != b.qual) return std::nullopt;
  auto p = unify(a.pre, b.pre);
  if (!p) return std::nullopt;
  return Type{a.qual, *p};
}

bool has_unknown(const Type& t) {
  const auto& p = *t.pre;
  if (p.kind() == Pretype::Kind::List && !p.has_element()) return true;
  return std::any_of(p.items().begin(), p.items().end(),
                     [](const Type& i) { return has_unknown(i); });
}

PseudoType PseudoType::hidden(PretypePtr base) {
  if (!base || !base->is_base())
    throw std::invalid_argument("hi applies only to base pretypes");
  return {PseudoQualifier::Hi, std::move(base)};
}

Type PseudoType::as_type() const {
  auto q = narrow(qual);
  if (!q) throw std::logic_error("hidden pseudotype is not a type");
  return Type{*q, pre};
}

bool operator==(const PseudoType& a, const PseudoType& b) {
  if (a.qual != b.qual) return false;
  if (a.pre == b.pre) return true;
  return a.pre && b.pre && *a.pre == *b.pre;
}

bool type_is_q(Qualifier q, const PseudoType& t) {
  if (t.is_hidden()) return true;
  return qualifier_leq(widen(q), t.qual);
}

// ---------------------------------------------------------------------------
// Contexts

TypeContext::TypeContext(std::initializer_list<Binding> bindings) {
  for (const auto& b : bindings) push(b.first, b.second);
}

TypeContext::TypeContext(std::vector<Binding> bindings) {
  for (auto& b : bindings) push(std::move(b.first), std::move(b.second));
}

void TypeContext::push(std::string var, PseudoType t) {
  if (contains(var)) throw DuplicateVariable(var);
  bindings_.emplace_back(std::move(var), std::move(t));
}

void TypeContext::erase(const std::string& var) {
  bindings_.erase(std::remove_if(bindings_.begin(), bindings_.end(),
                                 [&](const Binding& b) { return b.first == var; }),
                  bindings_.end());
}

const PseudoType* TypeContext::find(const std::string& var) const {
  for (const auto& b : bindings_)
    if (b.first == var) return &b.second;
  return nullptr;
}

bool ctx_is_q(Qualifier q, const TypeContext& ctx) {
  return std::all_of(ctx.bindings().begin(), ctx.bindings().end(),
                     [q](const auto& b) { return type_is_q(q, b.second); });
}

// ---------------------------------------------------------------------------
// Signatures

bool operator==(const OperatorType& a, const OperatorType& b) {
  return a.inputs == b.inputs && a.output == b.output;
}

QualifiedSignature::QualifiedSignature(std::vector<SignatureEntry> entries) {
  for (auto& e : entries) add(std::move(e));
}

void QualifiedSignature::add(SignatureEntry entry) {
  for (const auto& in : entry.type.inputs)
    if (in.is_hidden() && !in.pre->is_base())
      throw std::invalid_argument("operator '" + entry.name +
                                  "': hi applies only to base pretypes");
  entries_.push_back(std::move(entry));
}

std::vector<std::size_t> QualifiedSignature::candidates(std::string_view name,
                                                        std::size_t arity) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < entries_.size(); ++i)
    if (entries_[i].name == name && entries_[i].type.inputs.size() == arity) out.push_back(i);
  return out;
}

bool QualifiedSignature::has_operator(std::string_view name) const {
  return std::any_of(entries_.begin(), entries_.end(),
                     [&](const SignatureEntry& e) { return e.name == name; });
}

// ---------------------------------------------------------------------------
// Expressions

PretypePtr constant_pretype(const Constant& c) {
  if (std::holds_alternative<std::int64_t>(c)) return types::int_();
  if (std::holds_alternative<bool>(c)) return types::bool_();
  return types::array();
}

std::string constant_text(const Constant& c) {
  if (auto i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
  if (auto b = std::get_if<bool>(&c)) return *b ? "true" : "false";
  const auto& a = std::get<std::vector<std::int64_t>>(c);
  std::string s = "{";
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (i) s += ", ";
    s += std::to_string(a[i]);
  }
  return s + "}";
}

ExprPtr make(Expr::Node n, Span span) {
  return std::make_shared<const Expr>(Expr{std::move(n), span});
}

ExprPtr var(std::string name, Span span) { return make(node::Var{std::move(name)}, span); }

ExprPtr literal(Qualifier q, Constant c, Span span) {
  OperatorType t{{}, Type{q, constant_pretype(c)}};
  std::string name = constant_text(c);
  return make(node::Op{std::move(name), std::nullopt, std::move(t), std::move(c), {}}, span);
}

ExprPtr op(std::string name, std::vector<ExprPtr> args, Span span) {
  return make(node::Op{std::move(name), std::nullopt, std::nullopt, std::nullopt, std::move(args)},
              span);
}

ExprPtr op(std::string name, std::size_t entry, OperatorType t, std::vector<ExprPtr> args,
           Span span) {
  return make(node::Op{std::move(name), entry, std::move(t), std::nullopt, std::move(args)}, span);
}

namespace {

bool equal_list(const std::vector<ExprPtr>& a, const std::vector<ExprPtr>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!equal(a[i], b[i])) return false;
  return true;
}

struct StructuralEq {
  const Expr& rhs;

  bool operator()(const node::Var& a) const { return a.name == rhs.as<node::Var>()->name; }
  bool operator()(const node::Op& a) const {
    const auto& b = *rhs.as<node::Op>();
    return a.name == b.name && a.entry == b.entry && a.type == b.type && a.literal == b.literal &&
           equal_list(a.args, b.args);
  }
  bool operator()(const node::Tuple& a) const {
    const auto& b = *rhs.as<node::Tuple>();
    return a.qual == b.qual && equal_list(a.items, b.items);
  }
  bool operator()(const node::App& a) const {
    const auto& b = *rhs.as<node::App>();
    return equal(a.fn, b.fn) && equal(a.arg, b.arg);
  }
  bool operator()(const node::Lambda& a) const {
    const auto& b = *rhs.as<node::Lambda>();
    return a.qual == b.qual && a.param == b.param && a.param_type == b.param_type &&
           equal(a.body, b.body);
  }
  bool operator()(const node::Split& a) const {
    const auto& b = *rhs.as<node::Split>();
    return a.pattern == b.pattern && equal(a.scrutinee, b.scrutinee) && equal(a.body, b.body);
  }
  bool operator()(const node::If& a) const {
    const auto& b = *rhs.as<node::If>();
    return equal(a.cond, b.cond) && equal(a.then_branch, b.then_branch) &&
           equal(a.else_branch, b.else_branch);
  }
  bool operator()(const node::Let& a) const {
    const auto& b = *rhs.as<node::Let>();
    return a.name == b.name && a.annotation == b.annotation && equal(a.bound, b.bound) &&
           equal(a.body, b.body);
  }
  bool operator()(const node::Nil& a) const { return a.qual == rhs.as<node::Nil>()->qual; }
  bool operator()(const node::Cons& a) const {
    const auto& b = *rhs.as<node::Cons>();
    return a.qual == b.qual && equal(a.head, b.head) && equal(a.tail, b.tail);
  }
  bool operator()(const node::Case& a) const {
    const auto& b = *rhs.as<node::Case>();
    return a.head == b.head && a.tail == b.tail && equal(a.scrutinee, b.scrutinee) &&
           equal(a.nil_branch, b.nil_branch) && equal(a.cons_branch, b.cons_branch);
  }
};

}  // namespace

bool operator==(const Expr& a, const Expr& b) {
  if (a.node.index() != b.node.index()) return false;
  return std::visit(StructuralEq{b}, a.node);
}

bool equal(const ExprPtr& a, const ExprPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  return *a == *b;
}

// ---------------------------------------------------------------------------
// Free variables and substitution

namespace {

void free_vars_into(const ExprPtr& e, std::vector<std::string>& bound,
                    std::vector<std::string>& out) {
  auto is_bound = [&](const std::string& x) {
    return std::find(bound.begin(), bound.end(), x) != bound.end();
  };
  auto under = [&](std::vector<std::string> names, const ExprPtr& body) {
    std::size_t mark = bound.size();
    bound.insert(bound.end(), names.begin(), names.end());
    free_vars_into(body, bound, out);
    bound.resize(mark);
  };
  std::visit(
      [&](const auto& n) {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, node::Var>) {
          if (!is_bound(n.name)) out.push_back(n.name);
        } else if constexpr (std::is_same_v<N, node::Op>) {
          for (const auto& a : n.args) free_vars_into(a, bound, out);
        } else if constexpr (std::is_same_v<N, node::Tuple>) {
          for (const auto& a : n.items) free_vars_into(a, bound, out);
        } else if constexpr (std::is_same_v<N, node::App>) {
          free_vars_into(n.fn, bound, out);
          free_vars_into(n.arg, bound, out);
        } else if constexpr (std::is_same_v<N, node::Lambda>) {
          under({n.param}, n.body);
        } else if constexpr (std::is_same_v<N, node::Split>) {
          free_vars_into(n.scrutinee, bound, out);
          under(n.pattern, n.body);
        } else if constexpr (std::is_same_v<N, node::If>) {
          free_vars_into(n.cond, bound, out);
          free_vars_into(n.then_branch, bound, out);
          free_vars_into(n.else_branch, bound, out);
        } else if constexpr (std::is_same_v<N, node::Let>) {
          free_vars_into(n.bound, bound, out);
          under({n.name}, n.body);
        } else if constexpr (std::is_same_v<N, node::Nil>) {
        } else if constexpr (std::is_same_v<N, node::Cons>) {
          free_vars_into(n.head, bound, out);
          free_vars_into(n.tail, bound, out);
        } else if constexpr (std::is_same_v<N, node::Case>) {
          free_vars_into(n.scrutinee, bound, out);
          free_vars_into(n.nil_branch, bound, out);
          under({n.head, n.tail}, n.cons_branch);
        }
      },
      e->node);
}

}  // namespace

std::vector<std::string> free_vars(const ExprPtr& e) {
  std::vector<std::string> bound, out;
  free_vars_into(e, bound, out);
  return out;
}

bool occurs_free(const std::string& x, const ExprPtr& e) {
  auto fv = free_vars(e);
  return std::find(fv.begin(), fv.end(), x) != fv.end();
}

void collect_names(const ExprPtr& e, std::vector<std::string>& out) {
  std::visit(
      [&](const auto& n) {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, node::Var>) {
          out.push_back(n.name);
        } else if constexpr (std::is_same_v<N, node::Op>) {
          for (const auto& a : n.args) collect_names(a, out);
        } else if constexpr (std::is_same_v<N, node::Tuple>) {
          for (const auto& a : n.items) collect_names(a, out);
        } else if constexpr (std::is_same_v<N, node::App>) {
          collect_names(n.fn, out);
          collect_names(n.arg, out);
        } else if constexpr (std::is_same_v<N, node::Lambda>) {
          out.push_back(n.param);
          collect_names(n.body, out);
        } else if constexpr (std::is_same_v<N, node::Split>) {
          collect_names(n.scrutinee, out);
          out.insert(out.end(), n.pattern.begin(), n.pattern.end());
          collect_names(n.body, out);
        } else if constexpr (std::is_same_v<N, node::If>) {
          collect_names(n.cond, out);
          collect_names(n.then_branch, out);
          collect_names(n.else_branch, out);
        } else if constexpr (std::is_same_v<N, node::Let>) {
          out.push_back(n.name);
          collect_names(n.bound, out);
          collect_names(n.body, out);
        } else if constexpr (std::is_same_v<N, node::Nil>) {
        } else if constexpr (std::is_same_v<N, node::Cons>) {
          collect_names(n.head, out);
          collect_names(n.tail, out);
        } else if constexpr (std::is_same_v<N, node::Case>) {
          collect_names(n.scrutinee, out);
          collect_names(n.nil_branch, out);
          out.push_back(n.head);
          out.push_back(n.tail);
          collect_names(n.cons_branch, out);
        }
      },
      e->node);
}

namespace {

std::string strip_prime_suffix(const std::string& x) {
  auto pos = x.find('\'');
  return pos == std::string::npos ? x : x.substr(0, pos);
}

class Substituter {
 public:
  Substituter(const ExprPtr& root, const Substitution& d) {
    std::vector<std::string> names;
    collect_names(root, names);
    used_.insert(names.begin(), names.end());
    for (const auto& [from, to] : d) {
      used_.insert(from);
      used_.insert(to);
    }
  }

  ExprPtr run(const Substitution& d, const ExprPtr& e) {
    if (d.empty()) return e;
    return std::visit([&](const auto& n) { return go(d, n, e); }, e->node);
  }

 private:
  std::string fresh_like(const std::string& x) {
    std::string stem = strip_prime_suffix(x);
    for (std::size_t k = 1;; ++k) {
      std::string cand = stem + "'" + std::to_string(k);
      if (!used_.count(cand)) {
        used_.insert(cand);
        return cand;
      }
    }
  }

  static bool in_range(const Substitution& d, const std::string& x) {
    for (const auto& [from, to] : d)
      if (to == x) return true;
    return false;
  }

  /// Removes the binders from d and renames any binder that would capture a
  /// range variable. Returns the new binder names.
  std::vector<std::string> bind(Substitution& d, const std::vector<std::string>& binders) {
    for (const auto& b : binders) d.erase(b);
    std::vector<std::string> out = binders;
    for (auto& b : out) {
      if (in_range(d, b)) {
        std::string renamed = fresh_like(b);
        d[b] = renamed;
        b = renamed;
      }
    }
    return out;
  }

  ExprPtr go(const Substitution& d, const node::Var& n, const ExprPtr& self) {
    auto it = d.find(n.name);
    if (it == d.end()) return self;
    return var(it->second, self->span);
  }
  ExprPtr go(const Substitution& d, const node::Op& n, const ExprPtr& self) {
    node::Op out = n;
    for (auto& a : out.args) a = run(d, a);
    return make(std::move(out), self->span);
  }
  ExprPtr go(const Substitution& d, const node::Tuple& n, const ExprPtr& self) {
    node::Tuple out = n;
    for (auto& a : out.items) a = run(d, a);
    return make(std::move(out), self->span);
  }
  ExprPtr go(const Substitution& d, const node::App& n, const ExprPtr& self) {
    return make(node::App{run(d, n.fn), run(d, n.arg)}, self->span);
  }
  ExprPtr go(const Substitution& d, const node::Lambda& n, const ExprPtr& self) {
    Substitution inner = d;
    auto names = bind(inner, {n.param});
    return make(node::Lambda{n.qual, names[0], n.param_type, run(inner, n.body)}, self->span);
  }
  ExprPtr go(const Substitution& d, const node::Split& n, const ExprPtr& self) {
    Substitution inner = d;
    auto names = bind(inner, n.pattern);
    return make(node::Split{run(d, n.scrutinee), names, run(inner, n.body)}, self->span);
  }
  ExprPtr go(const Substitution& d, const node::If& n, const ExprPtr& self) {
    return make(node::If{run(d, n.cond), run(d, n.then_branch), run(d, n.else_branch)},
                self->span);
  }
  ExprPtr go(const Substitution& d, const node::Let& n, const ExprPtr& self) {
    Substitution inner = d;
    auto names = bind(inner, {n.name});
    return make(node::Let{names[0], n.annotation, run(d, n.bound), run(inner, n.body)},
                self->span);
  }
  ExprPtr go(const Substitution&, const node::Nil&, const ExprPtr& self) { return self; }
  ExprPtr go(const Substitution& d, const node::Cons& n, const ExprPtr& self) {
    return make(node::Cons{n.qual, run(d, n.head), run(d, n.tail)}, self->span);
  }
  ExprPtr go(const Substitution& d, const node::Case& n, const ExprPtr& self) {
    Substitution inner = d;
    auto names = bind(inner, {n.head, n.tail});
    return make(node::Case{run(d, n.scrutinee), run(d, n.nil_branch), names[0], names[1],
                           run(inner, n.cons_branch)},
                self->span);
  }

  std::unordered_set<std::string> used_;
};

}  // namespace

ExprPtr apply_subst(const Substitution& d, const ExprPtr& e) {
  Substitution effective;
  for (const auto& [from, to] : d)
    if (from != to) effective.emplace(from, to);
  if (effective.empty()) return e;
  Substituter s(e, effective);
  return s.run(effective, e);
}

namespace {

// Binder positions are compared through de Bruijn-style levels.
bool alpha_eq(const ExprPtr& a, const ExprPtr& b, std::map<std::string, int>& la,
              std::map<std::string, int>& lb, int& level);

bool alpha_under(const std::vector<std::string>& xa, const ExprPtr& ba,
                 const std::vector<std::string>& xb, const ExprPtr& bb,
                 std::map<std::string, int>& la, std::map<std::string, int>& lb, int& level) {
  if (xa.size() != xb.size()) return false;
  auto saved_a = la;
  auto saved_b = lb;
  for (std::size_t i = 0; i < xa.size(); ++i) {
    la[xa[i]] = level;
    lb[xb[i]] = level;
    ++level;
  }
  bool r = alpha_eq(ba, bb, la, lb, level);
  la = std::move(saved_a);
  lb = std::move(saved_b);
  return r;
}

bool alpha_list(const std::vector<ExprPtr>& a, const std::vector<ExprPtr>& b,
                std::map<std::string, int>& la, std::map<std::string, int>& lb, int& level) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!alpha_eq(a[i], b[i], la, lb, level)) return false;
  return true;
}

bool alpha_eq(const ExprPtr& a, const ExprPtr& b, std::map<std::string, int>& la,
              std::map<std::string, int>& lb, int& level) {
  if (a->node.index() != b->node.index()) return false;
  if (auto x = a->as<node::Var>()) {
    const auto& y = *b->as<node::Var>();
    auto ia = la.find(x->name);
    auto ib = lb.find(y.name);
    if (ia == la.end() && ib == lb.end()) return x->name == y.name;
    if (ia == la.end() || ib == lb.end()) return false;
    return ia->second == ib->second;
  }
  if (auto x = a->as<node::Op>()) {
    const auto& y = *b->as<node::Op>();
    return x->name == y.name && x->entry == y.entry && x->type == y.type &&
           x->literal == y.literal && alpha_list(x->args, y.args, la, lb, level);
  }
  if (auto x = a->as<node::Tuple>()) {
    const auto& y = *b->as<node::Tuple>();
    return x->qual == y.qual && alpha_list(x->items, y.items, la, lb, level);
  }
  if (auto x = a->as<node::App>()) {
    const auto& y = *b->as<node::App>();
    return alpha_eq(x->fn, y.fn, la, lb, level) && alpha_eq(x->arg, y.arg, la, lb, level);
  }
  if (auto x = a->as<node::Lambda>()) {
    const auto& y = *b->as<node::Lambda>();
    return x->qual == y.qual && x->param_type == y.param_type &&
           alpha_under({x->param}, x->body, {y.param}, y.body, la, lb, level);
  }
  if (auto x = a->as<node::Split>()) {
    const auto& y = *b->as<node::Split>();
    return alpha_eq(x->scrutinee, y.scrutinee, la, lb, level) &&
           alpha_under(x->pattern, x->body, y.pattern, y.body, la, lb, level);
  }
  if (auto x = a->as<node::If>()) {
    const auto& y = *b->as<node::If>();
    return alpha_eq(x->cond, y.cond, la, lb, level) &&
           alpha_eq(x->then_branch, y.then_branch, la, lb, level) &&
           alpha_eq(x->else_branch, y.else_branch, la, lb, level);
  }
  if (auto x = a->as<node::Let>()) {
    const auto& y = *b->as<node::Let>();
    return x->annotation == y.annotation && alpha_eq(x->bound, y.bound, la, lb, level) &&
           alpha_under({x->name}, x->body, {y.name}, y.body, la, lb, level);
  }
  if (auto x = a->as<node::Nil>()) return x->qual == b->as<node::Nil>()->qual;
  if (auto x = a->as<node::Cons>()) {
    const auto& y = *b->as<node::Cons>();
    return x->qual == y.qual && alpha_eq(x->head, y.head, la, lb, level) &&
           alpha_eq(x->tail, y.tail, la, lb, level);
  }
  const auto& x = *a->as<node::Case>();
  const auto& y = *b->as<node::Case>();
  return alpha_eq(x.scrutinee, y.scrutinee, la, lb, level) &&
         alpha_eq(x.nil_branch, y.nil_branch, la, lb, level) &&
         alpha_under({x.head, x.tail}, x.cons_branch, {y.head, y.tail}, y.cons_branch, la, lb,
                     level);
}

}  // namespace

bool alpha_equal(const ExprPtr& a, const ExprPtr& b) {
  std::map<std::string, int> la, lb;
  int level = 0;
  return alpha_eq(a, b, la, lb, level);
}

namespace {

template <class F>
void for_children(const ExprPtr& e, F&& f) {
  std::visit(
      [&](const auto& n) {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, node::Op>) {
          for (const auto& a : n.args) f(a);
        } else if constexpr (std::is_same_v<N, node::Tuple>) {
          for (const auto& a : n.items) f(a);
        } else if constexpr (std::is_same_v<N, node::App>) {
          f(n.fn);
          f(n.arg);
        } else if constexpr (std::is_same_v<N, node::Lambda>) {
          f(n.body);
        } else if constexpr (std::is_same_v<N, node::Split>) {
          f(n.scrutinee);
          f(n.body);
        } else if constexpr (std::is_same_v<N, node::If>) {
          f(n.cond);
          f(n.then_branch);
          f(n.else_branch);
        } else if constexpr (std::is_same_v<N, node::Let>) {
          f(n.bound);
          f(n.body);
        } else if constexpr (std::is_same_v<N, node::Cons>) {
          f(n.head);
          f(n.tail);
        } else if constexpr (std::is_same_v<N, node::Case>) {
          f(n.scrutinee);
          f(n.nil_branch);
          f(n.cons_branch);
        }
      },
      e->node);
}

}  // namespace

std::size_t expr_depth(const ExprPtr& e) {
  std::size_t d = 0;
  for_children(e, [&](const ExprPtr& c) { d = std::max(d, expr_depth(c)); });
  return d + 1;
}

std::size_t expr_size(const ExprPtr& e) {
  std::size_t s = 1;
  for_children(e, [&](const ExprPtr& c) { s += expr_size(c); });
  return s;
}

// ---------------------------------------------------------------------------
// Printing

namespace {

std::string type_atom(const Type& t);

std::string pretype_text(const PretypePtr& p) {
  switch (p->kind()) {
    case Pretype::Kind::Base:
      return p->base_name();
    case Pretype::Kind::Tuple: {
      std::string s = "<";
      for (std::size_t i = 0; i < p->items().size(); ++i) {
        if (i) s += ", ";
        s += to_string(p->items()[i]);
      }
      return s + ">";
    }
    case Pretype::Kind::Arrow:
      return "(" + to_string(p->from()) + " -> " + to_string(p->to()) + ")";
    case Pretype::Kind::List:
      return p->has_element() ? "list " + type_atom(p->element()) : std::string("list ?");
  }
  return "?";
}

std::string type_atom(const Type& t) { return "(" + to_string(t) + ")"; }

}  // namespace

std::string to_string(const PretypePtr& p) { return pretype_text(p); }

std::string to_string(const Type& t) {
  return std::string(to_string(t.qual)) + " " + pretype_text(t.pre);
}

std::string to_string(const PseudoType& t) {
  return std::string(to_string(t.qual)) + " " + pretype_text(t.pre);
}

std::string to_string(const OperatorType& t) {
  std::string s = "(";
  for (std::size_t i = 0; i < t.inputs.size(); ++i) {
    if (i) s += ", ";
    s += to_string(t.inputs[i]);
  }
  return s + ") -> " + to_string(t.output);
}

std::string to_string(const TypeContext& ctx) {
  std::string s = "[";
  bool first = true;
  for (const auto& [x, t] : ctx.bindings()) {
    if (!first) s += ", ";
    first = false;
    s += x + " : " + to_string(t);
  }
  return s + "]";
}

namespace {

// Precedence levels: 0 binders, 1 comparison, 2 additive, 3 multiplicative,
// 4 application, 5 postfix, 6 atom.
enum Level { kExpr = 0, kCmp = 1, kAdd = 2, kMul = 3, kApp = 4, kPostfix = 5, kAtom = 6 };

int infix_level(std::string_view name) {
  static const std::set<std::string_view> cmp = {"=", "==", "!=", "<", "<=", ">", ">="};
  static const std::set<std::string_view> add = {"+", "-"};
  static const std::set<std::string_view> mul = {"*", "/", "%"};
  if (cmp.count(name)) return kCmp;
  if (add.count(name)) return kAdd;
  if (mul.count(name)) return kMul;
  return -1;
}

bool is_identifier(std::string_view s) {
  if (s.empty()) return false;
  if (!(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
  });
}

class Printer {
 public:
  std::string print(const ExprPtr& e, int ctx) {
    int lvl = level_of(e);
    std::string s = raw(e);
    return lvl < ctx ? "(" + s + ")" : s;
  }

 private:
  static std::string annot(const node::Op& n) {
    return n.entry ? "@" + std::to_string(*n.entry + 1) : std::string();
  }

  int level_of(const ExprPtr& e) {
    if (auto o = e->as<node::Op>()) {
      if (o->literal) return kApp;
      if (o->args.size() == 2 && infix_level(o->name) >= 0) return infix_level(o->name);
      if ((o->name == ".[]" && o->args.size() == 2) ||
          (o->name == ".[<-]" && o->args.size() == 3))
        return kPostfix;
      return kAtom;
    }
    if (e->is<node::App>()) return kApp;
    if (e->is<node::Var>()) return kAtom;
    // Qualified forms are atoms for the parser but read better parenthesized
    // in argument position.
    if (e->is<node::Tuple>() || e->is<node::Nil>() || e->is<node::Cons>()) return kApp;
    return kExpr;
  }

  std::string list(const std::vector<ExprPtr>& xs, int ctx) {
    std::string s;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (i) s += ", ";
      s += print(xs[i], ctx);
    }
    return s;
  }

  std::string raw(const ExprPtr& e) {
    return std::visit([&](const auto& n) { return raw_node(n); }, e->node);
  }

  std::string raw_node(const node::Var& n) { return n.name; }
  std::string raw_node(const node::Op& n) {
    if (n.literal) return std::string(to_string(n.type->output.qual)) + " " + constant_text(*n.literal);
    int lvl = n.args.size() == 2 ? infix_level(n.name) : -1;
    if (lvl >= 0) {
      // Infix operators are left-associative.
      return print(n.args[0], lvl) + " " + n.name + annot(n) + " " + print(n.args[1], lvl + 1);
    }
    if (n.name == ".[]" && n.args.size() == 2)
      return print(n.args[0], kPostfix) + "[" + print(n.args[1], kExpr) + "]" + annot(n);
    if (n.name == ".[<-]" && n.args.size() == 3)
      return print(n.args[0], kPostfix) + "[" + print(n.args[1], kCmp) + " <- " +
             print(n.args[2], kExpr) + "]" + annot(n);
    std::string head = is_identifier(n.name) ? n.name : "`" + n.name + "`";
    return head + annot(n) + "(" + list(n.args, kExpr) + ")";
  }
  std::string raw_node(const node::Tuple& n) {
    return std::string(to_string(n.qual)) + " <" + list(n.items, kAdd) + ">";
  }
  std::string raw_node(const node::App& n) {
    return print(n.fn, kApp) + " " + print(n.arg, kPostfix);
  }
  std::string raw_node(const node::Lambda& n) {
    return std::string(to_string(n.qual)) + " \\" + n.param + " : " + to_string(n.param_type) +
           ". " + print(n.body, kExpr);
  }
  std::string raw_node(const node::Split& n) {
    std::string p;
    for (std::size_t i = 0; i < n.pattern.size(); ++i) p += (i ? ", " : "") + n.pattern[i];
    return "spl " + print(n.scrutinee, kExpr) + " as <" + p + "> in " + print(n.body, kExpr);
  }
  std::string raw_node(const node::If& n) {
    return "if " + print(n.cond, kExpr) + " then " + print(n.then_branch, kExpr) + " else " +
           print(n.else_branch, kExpr);
  }
  std::string raw_node(const node::Let& n) {
    std::string a = n.annotation ? " : " + to_string(*n.annotation) : std::string();
    return "let " + n.name + a + " = " + print(n.bound, kExpr) + " in " + print(n.body, kExpr);
  }
  std::string raw_node(const node::Nil& n) { return std::string(to_string(n.qual)) + " []"; }
  std::string raw_node(const node::Cons& n) {
    return std::string(to_string(n.qual)) + " (" + print(n.head, kCmp) + " : " +
           print(n.tail, kCmp) + ")";
  }
  std::string raw_node(const node::Case& n) {
    return "case " + print(n.scrutinee, kExpr) + " of (" + print(n.nil_branch, kExpr) + ", (" +
           n.head + " : " + n.tail + ") -> " + print(n.cons_branch, kExpr) + ")";
  }
};

}  // namespace

std::string to_string(const ExprPtr& e) {
  Printer p;
  return p.print(e, kExpr);
}

}  // namespace wlt
