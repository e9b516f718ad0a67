// Type-directed random configurations, filtered through config_check.

#include <random>

#include "wlt/verify.hpp"

namespace wlt {

namespace {

using types::li;
using types::un;

Type li_int() { return li(types::int_()); }
Type un_int() { return un(types::int_()); }
Type li_bool() { return li(types::bool_()); }
Type un_bool() { return un(types::bool_()); }
Type li_pair() { return li(Pretype::tuple({li_int(), un_int()})); }
Type un_fn() { return un(Pretype::arrow(li_int(), li_int())); }
Type li_fn() { return li(Pretype::arrow(li_int(), li_int())); }
Type un_list() { return un(Pretype::list(un_int())); }

enum Entry : std::size_t { AddLL, AddHL, MulUU, SubHH, LtHL, Not, Id, EqUU, kEntries };

QualifiedSignature build_signature() {
  auto P = [](PseudoQualifier q) { return PseudoType{q, types::int_()}; };
  const auto L = PseudoQualifier::Li, U = PseudoQualifier::Un, H = PseudoQualifier::Hi;
  QualifiedSignature s;
  s.add({"+", {{P(L), P(L)}, li_int()}, "add"});
  s.add({"+", {{P(H), P(L)}, li_int()}, "add"});
  s.add({"*", {{P(U), P(U)}, un_int()}, "mul"});
  s.add({"-", {{P(H), P(H)}, li_int()}, "sub"});
  s.add({"<", {{P(H), P(L)}, li_bool()}, "lt"});
  s.add({"not", {{PseudoType{L, types::bool_()}}, li_bool()}, "not"});
  s.add({"id", {{P(H)}, un_int()}, "id"});
  s.add({"=", {{P(U), P(U)}, un_bool()}, "eq"});
  return s;
}

struct Slot {
  std::string name;
  Type type;
  bool consumed = false;
};

class Gen {
 public:
  Gen(std::mt19937_64& rng, const QualifiedSignature& sig) : rng_(rng), sig_(sig) {}

  std::vector<Slot> env;

  Store store(std::size_t cells) {
    Store s;
    for (std::size_t i = 0; i < cells; ++i) {
      std::string x = "s" + std::to_string(i);
      switch (pick(7)) {
        case 0:
          push(s, x, li_int(), Value{Qualifier::Li, Constant{small()}});
          break;
        case 1:
          push(s, x, un_int(), Value{Qualifier::Un, Constant{small()}});
          break;
        case 2: {
          bool l = pick(2);
          push(s, x, l ? li_bool() : un_bool(),
               Value{l ? Qualifier::Li : Qualifier::Un, Constant{pick(2) == 1}});
          break;
        }
        case 3: {
          Slot* a = available(li_int());
          Slot* b = available(un_int());
          if (!a || !b) {
            push(s, x, un_int(), Value{Qualifier::Un, Constant{small()}});
            break;
          }
          a->consumed = true;
          push(s, x, li_pair(), Value{Qualifier::Li, pre::TupleCells{{a->name, b->name}}});
          break;
        }
        case 4: {
          ExprPtr body = call(AddLL, {var("p"), literal(Qualifier::Li, Constant{small()})});
          push(s, x, un_fn(), Value{Qualifier::Un, pre::Closure{"p", li_int(), body}});
          break;
        }
        case 5: {
          Slot* c = available(li_int());
          if (!c) {
            push(s, x, li_int(), Value{Qualifier::Li, Constant{small()}});
            break;
          }
          c->consumed = true;
          ExprPtr body = call(AddLL, {var("p"), var(c->name)});
          push(s, x, li_fn(), Value{Qualifier::Li, pre::Closure{"p", li_int(), body}});
          break;
        }
        default: {
          std::string nil = x + "n";
          s.push(nil, Value{Qualifier::Un, pre::NilCell{un_int()}});
          std::string head = x + "h";
          s.push(head, Value{Qualifier::Un, Constant{small()}});
          push(s, x, un_list(), Value{Qualifier::Un, pre::ConsCell{head, nil}});
          break;
        }
      }
    }
    return s;
  }

  ExprPtr expr(const Type& want, std::size_t depth) {
    for (int tries = 0; tries < 8; ++tries) {
      auto saved = env;
      if (ExprPtr e = attempt(want, depth)) return e;
      env = saved;
    }
    return nullptr;
  }

 private:
  std::mt19937_64& rng_;
  const QualifiedSignature& sig_;
  int fresh_ = 0;

  std::size_t pick(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }
  std::int64_t small() { return std::uniform_int_distribution<std::int64_t>(-3, 9)(rng_); }

  void push(Store& s, const std::string& x, Type t, Value v) {
    s.push(x, std::move(v));
    env.push_back({x, std::move(t)});
  }

  ExprPtr call(Entry k, std::vector<ExprPtr> args) {
    const auto& e = sig_.entries()[k];
    return op(e.name, k, e.type, std::move(args));
  }

  Slot* available(const Type& t) {
    std::vector<Slot*> c;
    for (auto& s : env)
      if (s.type == t && !(s.type.qual == Qualifier::Li && s.consumed)) c.push_back(&s);
    return c.empty() ? nullptr : c[pick(c.size())];
  }

  ExprPtr use(const Type& t) {
    Slot* s = available(t);
    if (!s) return nullptr;
    if (t.qual == Qualifier::Li) s->consumed = true;
    return var(s->name);
  }

  // A li int variable read in a hidden position.
  ExprPtr peek() {
    Slot* s = available(li_int());
    return s ? var(s->name) : nullptr;
  }

  std::string bind(const Type& t) {
    std::string x = "b" + std::to_string(fresh_++);
    env.push_back({x, t});
    return x;
  }

  bool bound_ok(const std::string& x) {
    for (auto it = env.begin(); it != env.end(); ++it)
      if (it->name == x) {
        bool ok = it->type.qual == Qualifier::Un || it->consumed;
        env.erase(it);
        return ok;
      }
    return false;
  }

  std::vector<bool> flags() const {
    std::vector<bool> f;
    for (const auto& s : env) f.push_back(s.consumed);
    return f;
  }

  ExprPtr leaf(const Type& want) {
    if (pick(2))
      if (ExprPtr v = use(want)) return v;
    if (want.pre->is_base())
      return literal(want.qual,
                     *want.pre == *types::bool_() ? Constant{pick(2) == 1} : Constant{small()});
    return use(want);
  }

  ExprPtr branches(const Type& want, std::size_t depth, ExprPtr cond) {
    auto before = env;
    ExprPtr a = expr(want, depth - 1);
    if (!a) return nullptr;
    auto after = flags();
    auto then_env = env;
    for (int i = 0; i < 6; ++i) {
      env = before;
      ExprPtr b = expr(want, depth - 1);
      if (b && flags() == after) return make(node::If{cond, a, b});
    }
    env = then_env;
    return make(node::If{cond, a, a});
  }

  ExprPtr attempt(const Type& want, std::size_t depth) {
    if (depth <= 1) return leaf(want);
    switch (pick(9)) {
      case 0:
      case 1:
        return leaf(want);
      case 2: {  // operator producing want
        if (want == li_int()) {
          switch (pick(3)) {
            case 0: {
              ExprPtr a = expr(li_int(), depth - 1);
              ExprPtr b = a ? expr(li_int(), depth - 1) : nullptr;
              return b ? call(AddLL, {a, b}) : nullptr;
            }
            case 1: {
              ExprPtr h = peek();
              ExprPtr b = h ? expr(li_int(), depth - 1) : nullptr;
              return b ? call(AddHL, {h, b}) : nullptr;
            }
            default: {
              ExprPtr h = peek();
              ExprPtr g = peek();
              return h && g ? call(SubHH, {h, g}) : nullptr;
            }
          }
        }
        if (want == un_int()) {
          if (pick(2)) {
            ExprPtr h = peek();
            return h ? call(Id, {h}) : nullptr;
          }
          ExprPtr a = expr(un_int(), depth - 1);
          ExprPtr b = a ? expr(un_int(), depth - 1) : nullptr;
          return b ? call(MulUU, {a, b}) : nullptr;
        }
        if (want == li_bool()) {
          if (pick(2)) {
            ExprPtr a = expr(li_bool(), depth - 1);
            return a ? call(Not, {a}) : nullptr;
          }
          ExprPtr h = peek();
          ExprPtr b = h ? expr(li_int(), depth - 1) : nullptr;
          return b ? call(LtHL, {h, b}) : nullptr;
        }
        if (want == un_bool()) {
          ExprPtr a = expr(un_int(), depth - 1);
          ExprPtr b = a ? expr(un_int(), depth - 1) : nullptr;
          return b ? call(EqUU, {a, b}) : nullptr;
        }
        return nullptr;
      }
      case 3: {  // if
        ExprPtr c = expr(pick(2) ? li_bool() : un_bool(), depth - 1);
        return c ? branches(want, depth, c) : nullptr;
      }
      case 4: {  // let
        Type t = pick(2) ? li_int() : un_int();
        ExprPtr b = expr(t, depth - 1);
        if (!b) return nullptr;
        std::string x = bind(t);
        ExprPtr body = expr(want, depth - 1);
        if (!body || !bound_ok(x)) return nullptr;
        return make(node::Let{x, std::nullopt, b, body});
      }
      case 5: {  // spl
        ExprPtr s = use(li_pair());
        if (!s) return nullptr;
        std::string x = bind(li_int());
        std::string y = bind(un_int());
        ExprPtr body = expr(want, depth - 1);
        bool ok = body && bound_ok(y) && bound_ok(x);
        return ok ? make(node::Split{s, {x, y}, body}) : nullptr;
      }
      case 6: {  // application
        if (!(want == li_int())) return nullptr;
        ExprPtr f = use(pick(2) ? un_fn() : li_fn());
        if (!f) return nullptr;
        ExprPtr a = expr(li_int(), depth - 1);
        return a ? make(node::App{f, a}) : nullptr;
      }
      case 7: {  // case on an un list
        ExprPtr s = use(un_list());
        if (!s) return nullptr;
        auto before = env;
        ExprPtr nil = expr(want, depth - 1);
        if (!nil) return nullptr;
        auto after = flags();
        env = before;
        std::string h = bind(un_int());
        std::string t = bind(un_list());
        ExprPtr cons = expr(want, depth - 1);
        if (!cons) return nullptr;
        bound_ok(t);
        bound_ok(h);
        if (flags() != after) return nullptr;
        return make(node::Case{s, nil, h, t, cons});
      }
      default: {  // tuple or closure
        if (want == li_pair()) {
          ExprPtr a = expr(li_int(), depth - 1);
          ExprPtr b = a ? expr(un_int(), depth - 1) : nullptr;
          return b ? make(node::Tuple{Qualifier::Li, {a, b}}) : nullptr;
        }
        if (want == un_fn() || want == li_fn()) {
          std::string x = bind(li_int());
          ExprPtr body = expr(li_int(), depth - 1);
          if (!body || !bound_ok(x)) return nullptr;
          return make(node::Lambda{want.qual, x, li_int(), body});
        }
        return nullptr;
      }
    }
  }
};

}  // namespace

std::shared_ptr<const QualifiedSignature> generator_signature() {
  static const auto sig = std::make_shared<const QualifiedSignature>(build_signature());
  return sig;
}

std::vector<PoolEntry> generate_configurations(std::uint64_t seed, std::size_t count,
                                               std::size_t max_depth) {
  auto sig = generator_signature();
  std::mt19937_64 rng(seed);
  std::vector<PoolEntry> out;
  const std::vector<Type> targets = {li_int(), un_int(), li_bool(), un_bool(), li_pair()};
  std::size_t budget = count * 200;
  for (std::size_t attempt = 0; out.size() < count && attempt < budget; ++attempt) {
    Gen g(rng, *sig);
    Store s = g.store(std::uniform_int_distribution<std::size_t>(0, 5)(rng));
    Type want = targets[std::uniform_int_distribution<std::size_t>(0, targets.size() - 1)(rng)];
    ExprPtr e = g.expr(want, max_depth - 1);
    if (!e) continue;
    std::vector<ExprPtr> rest;
    for (const auto& slot : g.env)
      if (slot.type.qual == Qualifier::Li && !slot.consumed) rest.push_back(var(slot.name));
    if (!rest.empty()) {
      rest.insert(rest.begin(), e);
      e = make(node::Tuple{Qualifier::Li, std::move(rest)});
    }
    if (e->is<node::Var>() || expr_depth(e) > max_depth) continue;
    Configuration c{std::move(s), e};
    if (!config_check(c, *sig).ok) continue;
    out.push_back({sig, std::move(c), {}, "generated#" + std::to_string(out.size())});
  }
  return out;
}

}  // namespace wlt
