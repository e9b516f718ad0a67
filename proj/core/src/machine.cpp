#include "wlt/machine.hpp"

#include <algorithm>
#include <nlohmann/json.hpp>
#include <sstream>

namespace wlt {

// ---------------------------------------------------------------------------
// Values

namespace {

bool same_prevalue(const Prevalue& a, const Prevalue& b) {
  if (a.index() != b.index()) return false;
  return std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        const T& y = std::get<T>(b);
        if constexpr (std::is_same_v<T, Constant>) return x == y;
        if constexpr (std::is_same_v<T, pre::TupleCells>) return x.items == y.items;
        if constexpr (std::is_same_v<T, pre::Closure>)
          return x.param == y.param && x.param_type == y.param_type && equal(x.body, y.body);
        if constexpr (std::is_same_v<T, pre::NilCell>) return true;
        if constexpr (std::is_same_v<T, pre::ConsCell>)
          return x.head == y.head && x.tail == y.tail;
      },
      a);
}

}  // namespace

bool operator==(const Value& a, const Value& b) {
  return a.qual == b.qual && same_prevalue(a.pre, b.pre);
}

std::string to_string(const Prevalue& w) {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Constant>) {
          return constant_text(x);
        } else if constexpr (std::is_same_v<T, pre::TupleCells>) {
          std::string s = "<";
          for (std::size_t i = 0; i < x.items.size(); ++i) s += (i ? ", " : "") + x.items[i];
          return s + ">";
        } else if constexpr (std::is_same_v<T, pre::Closure>) {
          return "\\" + x.param + " : " + to_string(x.param_type) + ". " + to_string(x.body);
        } else if constexpr (std::is_same_v<T, pre::NilCell>) {
          return "[]";
        } else {
          return "(" + x.head + " : " + x.tail + ")";
        }
      },
      w);
}

std::string to_string(const Value& v) {
  return std::string(to_string(v.qual)) + " " + to_string(v.pre);
}

std::int64_t size_of(const Value& v) {
  if (auto c = std::get_if<Constant>(&v.pre))
    if (auto arr = std::get_if<std::vector<std::int64_t>>(c))
      return std::max<std::int64_t>(1, static_cast<std::int64_t>(arr->size()));
  return 1;
}

namespace {
const std::string& var_name_(const ExprPtr& e) {
  auto v = e->as<node::Var>();
  if (!v) throw std::invalid_argument("expected a variable, found '" + to_string(e) + "'");
  return v->name;
}
}  // namespace

Value value_of(const ExprPtr& e) {
  if (auto o = e->as<node::Op>()) return Value{o->type->output.qual, *o->literal};
  if (auto t = e->as<node::Tuple>()) {
    pre::TupleCells cells;
    for (const auto& i : t->items) cells.items.push_back(var_name_(i));
    return Value{t->qual, cells};
  }
  if (auto l = e->as<node::Lambda>()) return Value{l->qual, pre::Closure{l->param, l->param_type, l->body}};
  if (auto n = e->as<node::Nil>()) return Value{n->qual, pre::NilCell{n->element}};
  auto c = e->as<node::Cons>();
  return Value{c->qual, pre::ConsCell{var_name_(c->head), var_name_(c->tail)}};
}

ExprPtr expr_of(const Value& v) {
  return std::visit(
      [&](const auto& w) -> ExprPtr {
        using T = std::decay_t<decltype(w)>;
        if constexpr (std::is_same_v<T, Constant>) {
          return literal(v.qual, w);
        } else if constexpr (std::is_same_v<T, pre::TupleCells>) {
          std::vector<ExprPtr> items;
          for (const auto& x : w.items) items.push_back(var(x));
          return make(node::Tuple{v.qual, std::move(items)});
        } else if constexpr (std::is_same_v<T, pre::Closure>) {
          return make(node::Lambda{v.qual, w.param, w.param_type, w.body});
        } else if constexpr (std::is_same_v<T, pre::NilCell>) {
          return make(node::Nil{v.qual, w.element});
        } else {
          return make(node::Cons{v.qual, var(w.head), var(w.tail)});
        }
      },
      v.pre);
}

// ---------------------------------------------------------------------------
// Store

const Value* Store::find(const std::string& x) const {
  auto it = index_.find(x);
  return it == index_.end() ? nullptr : &slots_[it->second]->second;
}

void Store::push(const std::string& x, Value v) {
  if (index_.count(x)) throw std::invalid_argument("store variable '" + x + "' already bound");
  index_.emplace(x, slots_.size());
  slots_.emplace_back(Cell{x, std::move(v)});
}

bool Store::erase(const std::string& x) {
  auto it = index_.find(x);
  if (it == index_.end()) return false;
  slots_[it->second].reset();
  index_.erase(it);
  if (slots_.size() > 32 && index_.size() * 2 < slots_.size()) compact();
  return true;
}

void Store::rename(const std::string& from, const std::string& to) {
  auto it = index_.find(from);
  if (it == index_.end()) throw std::invalid_argument("store variable '" + from + "' unbound");
  if (index_.count(to)) throw std::invalid_argument("store variable '" + to + "' already bound");
  std::size_t slot = it->second;
  index_.erase(it);
  index_.emplace(to, slot);
  slots_[slot]->first = to;
}

std::string Store::allocate(Value v) {
  std::string x = fresh();
  ++next_;
  push(x, std::move(v));
  return x;
}

std::vector<Store::Cell> Store::cells() const {
  std::vector<Cell> out;
  out.reserve(index_.size());
  for (const auto& s : slots_)
    if (s) out.push_back(*s);
  return out;
}

void Store::compact() {
  std::vector<std::optional<Cell>> live;
  live.reserve(index_.size());
  for (auto& s : slots_)
    if (s) {
      index_[s->first] = live.size();
      live.push_back(std::move(s));
    }
  slots_ = std::move(live);
}

bool operator==(const Store& a, const Store& b) {
  if (a.next_ != b.next_ || a.size() != b.size()) return false;
  auto ca = a.cells();
  auto cb = b.cells();
  for (std::size_t i = 0; i < ca.size(); ++i)
    if (ca[i].first != cb[i].first || !(ca[i].second == cb[i].second)) return false;
  return true;
}

std::string to_string(const Store& s) {
  std::string out;
  for (const auto& [x, v] : s.cells()) out += (out.empty() ? "" : ", ") + x + " = " + to_string(v);
  return "[" + out + "]";
}

Store dealloc(Store s, const std::vector<PseudoQualifier>& quals,
              const std::vector<std::string>& vars, std::vector<Store::Cell>* removed) {
  if (quals.size() != vars.size()) throw MachineError("dealloc: qualifier/variable count mismatch");
  for (std::size_t i = 0; i < vars.size(); ++i) {
    if (quals[i] != PseudoQualifier::Li) continue;
    const Value* v = s.find(vars[i]);
    if (!v) throw MachineError("dealloc: linear variable '" + vars[i] + "' is not in the store");
    if (removed) removed->emplace_back(vars[i], *v);
    s.erase(vars[i]);
  }
  return s;
}

bool is_terminal(const Configuration& c) { return c.control->is<node::Var>(); }

// ---------------------------------------------------------------------------
// Evaluation contexts

namespace {

bool is_var(const ExprPtr& e) { return e->is<node::Var>(); }

const std::string& var_name(const ExprPtr& e) { return e->as<node::Var>()->name; }

// Child that must be reduced next, if any.
std::optional<std::pair<std::size_t, ExprPtr>> next_hole(const ExprPtr& e) {
  return std::visit(
      [](const auto& n) -> std::optional<std::pair<std::size_t, ExprPtr>> {
        using T = std::decay_t<decltype(n)>;
        auto first_nonvar = [](const std::vector<ExprPtr>& xs)
            -> std::optional<std::pair<std::size_t, ExprPtr>> {
          for (std::size_t i = 0; i < xs.size(); ++i)
            if (!is_var(xs[i])) return std::make_pair(i, xs[i]);
          return std::nullopt;
        };
        if constexpr (std::is_same_v<T, node::Op>) {
          if (n.literal) return std::nullopt;
          return first_nonvar(n.args);
        } else if constexpr (std::is_same_v<T, node::Tuple>) {
          return first_nonvar(n.items);
        } else if constexpr (std::is_same_v<T, node::App>) {
          if (!is_var(n.fn)) return std::make_pair(std::size_t{0}, n.fn);
          if (!is_var(n.arg)) return std::make_pair(std::size_t{1}, n.arg);
          return std::nullopt;
        } else if constexpr (std::is_same_v<T, node::If>) {
          if (!is_var(n.cond)) return std::make_pair(std::size_t{0}, n.cond);
          return std::nullopt;
        } else if constexpr (std::is_same_v<T, node::Split> || std::is_same_v<T, node::Case>) {
          if (!is_var(n.scrutinee)) return std::make_pair(std::size_t{0}, n.scrutinee);
          return std::nullopt;
        } else if constexpr (std::is_same_v<T, node::Let>) {
          if (!is_var(n.bound)) return std::make_pair(std::size_t{0}, n.bound);
          return std::nullopt;
        } else if constexpr (std::is_same_v<T, node::Cons>) {
          if (!is_var(n.head)) return std::make_pair(std::size_t{0}, n.head);
          if (!is_var(n.tail)) return std::make_pair(std::size_t{1}, n.tail);
          return std::nullopt;
        } else {
          return std::nullopt;
        }
      },
      e->node);
}

ExprPtr replace_child(const ExprPtr& parent, std::size_t slot, ExprPtr child) {
  Expr::Node n = parent->node;
  std::visit(
      [&](auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, node::Op>) x.args.at(slot) = child;
        if constexpr (std::is_same_v<T, node::Tuple>) x.items.at(slot) = child;
        if constexpr (std::is_same_v<T, node::App>) (slot == 0 ? x.fn : x.arg) = child;
        if constexpr (std::is_same_v<T, node::If>) x.cond = child;
        if constexpr (std::is_same_v<T, node::Split> || std::is_same_v<T, node::Case>)
          x.scrutinee = child;
        if constexpr (std::is_same_v<T, node::Let>) x.bound = child;
        if constexpr (std::is_same_v<T, node::Cons>) (slot == 0 ? x.head : x.tail) = child;
      },
      n);
  return make(std::move(n), parent->span);
}

}  // namespace

ExprPtr EvalContext::plug(ExprPtr e) const {
  for (auto it = frames.rbegin(); it != frames.rend(); ++it)
    e = replace_child(it->node, it->slot, std::move(e));
  return e;
}

std::optional<Decomposition> decompose(const ExprPtr& e) {
  if (is_var(e)) return std::nullopt;
  Decomposition d;
  ExprPtr cur = e;
  while (auto h = next_hole(cur)) {
    d.context.frames.push_back(Frame{cur, h->first});
    cur = h->second;
  }
  d.redex = cur;
  return d;
}

bool is_value_expr(const ExprPtr& e) {
  if (e->is<node::Lambda>() || e->is<node::Nil>()) return true;
  if (auto o = e->as<node::Op>()) return o->literal.has_value();
  if (auto t = e->as<node::Tuple>()) return std::all_of(t->items.begin(), t->items.end(), is_var);
  if (auto c = e->as<node::Cons>()) return is_var(c->head) && is_var(c->tail);
  return false;
}

bool is_beta_node(const ExprPtr& e) {
  if (is_var(e)) return false;
  return !next_hole(e).has_value();
}

// ---------------------------------------------------------------------------
// Primitives

namespace {

const Constant& constant(const Prevalue& w) {
  auto c = std::get_if<Constant>(&w);
  if (!c) throw PrimitiveError("expected a base constant, found " + to_string(w));
  return *c;
}
std::int64_t as_int(const Prevalue& w) {
  auto v = std::get_if<std::int64_t>(&constant(w));
  if (!v) throw PrimitiveError("expected an integer, found " + to_string(w));
  return *v;
}
bool as_bool(const Prevalue& w) {
  auto v = std::get_if<bool>(&constant(w));
  if (!v) throw PrimitiveError("expected a boolean, found " + to_string(w));
  return *v;
}
const std::vector<std::int64_t>& as_array(const Prevalue& w) {
  auto v = std::get_if<std::vector<std::int64_t>>(&constant(w));
  if (!v) throw PrimitiveError("expected an array, found " + to_string(w));
  return *v;
}

void arity(const std::vector<Prevalue>& a, std::size_t n, const char* key) {
  if (a.size() != n)
    throw PrimitiveError(std::string(key) + " expects " + std::to_string(n) + " argument(s)");
}

std::size_t index_into(const std::vector<std::int64_t>& arr, std::int64_t i) {
  if (i < 0 || static_cast<std::size_t>(i) >= arr.size())
    throw PrimitiveError("array index " + std::to_string(i) + " out of bounds for size " +
                         std::to_string(arr.size()));
  return static_cast<std::size_t>(i);
}

template <class F>
Primitive int_binary(const char* key, F f) {
  return [key, f](const std::vector<Prevalue>& a) -> Prevalue {
    arity(a, 2, key);
    return Constant{f(as_int(a[0]), as_int(a[1]))};
  };
}

template <class F>
Primitive compare(const char* key, F f) {
  return [key, f](const std::vector<Prevalue>& a) -> Prevalue {
    arity(a, 2, key);
    const Constant& x = constant(a[0]);
    const Constant& y = constant(a[1]);
    if (x.index() != y.index()) throw PrimitiveError(std::string(key) + ": operand kinds differ");
    return Constant{f(x, y)};
  };
}

PrimitiveTable build_standard() {
  PrimitiveTable t;
  t.add("add", int_binary("add", [](auto x, auto y) { return x + y; }));
  t.add("sub", int_binary("sub", [](auto x, auto y) { return x - y; }));
  t.add("mul", int_binary("mul", [](auto x, auto y) { return x * y; }));
  t.add("div", [](const std::vector<Prevalue>& a) -> Prevalue {
    arity(a, 2, "div");
    if (as_int(a[1]) == 0) throw PrimitiveError("division by zero");
    return Constant{as_int(a[0]) / as_int(a[1])};
  });
  t.add("mod", [](const std::vector<Prevalue>& a) -> Prevalue {
    arity(a, 2, "mod");
    if (as_int(a[1]) == 0) throw PrimitiveError("division by zero");
    return Constant{as_int(a[0]) % as_int(a[1])};
  });
  t.add("eq", compare("eq", [](const Constant& x, const Constant& y) { return x == y; }));
  t.add("ne", compare("ne", [](const Constant& x, const Constant& y) { return x != y; }));
  t.add("lt", compare("lt", [](const Constant& x, const Constant& y) { return x < y; }));
  t.add("le", compare("le", [](const Constant& x, const Constant& y) { return x <= y; }));
  t.add("gt", compare("gt", [](const Constant& x, const Constant& y) { return x > y; }));
  t.add("ge", compare("ge", [](const Constant& x, const Constant& y) { return x >= y; }));
  t.add("not", [](const std::vector<Prevalue>& a) -> Prevalue {
    arity(a, 1, "not");
    return Constant{!as_bool(a[0])};
  });
  t.add("and", [](const std::vector<Prevalue>& a) -> Prevalue {
    arity(a, 2, "and");
    return Constant{as_bool(a[0]) && as_bool(a[1])};
  });
  t.add("or", [](const std::vector<Prevalue>& a) -> Prevalue {
    arity(a, 2, "or");
    return Constant{as_bool(a[0]) || as_bool(a[1])};
  });
  t.add("is_zero", [](const std::vector<Prevalue>& a) -> Prevalue {
    arity(a, 1, "is_zero");
    return Constant{as_int(a[0]) == 0};
  });
  t.add("id", [](const std::vector<Prevalue>& a) -> Prevalue {
    arity(a, 1, "id");
    return a[0];
  });
  t.add("get", [](const std::vector<Prevalue>& a) -> Prevalue {
    arity(a, 2, "get");
    const auto& arr = as_array(a[0]);
    return Constant{arr[index_into(arr, as_int(a[1]))]};
  });
  t.add("set", [](const std::vector<Prevalue>& a) -> Prevalue {
    arity(a, 3, "set");
    auto arr = as_array(a[0]);
    arr[index_into(arr, as_int(a[1]))] = as_int(a[2]);
    return Constant{std::move(arr)};
  });
  t.add("size", [](const std::vector<Prevalue>& a) -> Prevalue {
    arity(a, 1, "size");
    return Constant{static_cast<std::int64_t>(as_array(a[0]).size())};
  });
  t.add("proj1", [](const std::vector<Prevalue>& a) -> Prevalue {
    if (a.empty()) throw PrimitiveError("proj1 expects at least one argument");
    return a[0];
  });
  t.add("proj2", [](const std::vector<Prevalue>& a) -> Prevalue {
    if (a.size() < 2) throw PrimitiveError("proj2 expects at least two arguments");
    return a[1];
  });
  return t;
}

}  // namespace

const PrimitiveTable& PrimitiveTable::standard() {
  static const PrimitiveTable t = build_standard();
  return t;
}

void PrimitiveTable::add(std::string key, Primitive f) { table_[std::move(key)] = std::move(f); }

const Primitive* PrimitiveTable::find(const std::string& key) const {
  auto it = table_.find(key);
  return it == table_.end() ? nullptr : &it->second;
}

// ---------------------------------------------------------------------------
// Stepping

std::string_view to_string(RunStatus s) {
  switch (s) {
    case RunStatus::Terminal:
      return "terminal";
    case RunStatus::FuelExhausted:
      return "fuel-exhausted";
    case RunStatus::Stuck:
      return "stuck";
  }
  return "?";
}

Machine::Machine(const QualifiedSignature& sig, const PrimitiveTable& prims, MachineOptions opts)
    : sig_(sig), prims_(prims), opts_(opts) {}

namespace {

const Value& lookup(const Store& s, const std::string& x) {
  const Value* v = s.find(x);
  if (!v) throw MachineError("variable '" + x + "' is not in the store");
  return *v;
}

// Deallocation by the store qualifier of x.
Store drop(const Store& s, const std::string& x, std::vector<Store::Cell>& freed) {
  const Value& v = lookup(s, x);
  return dealloc(s, {widen(v.qual)}, {x}, &freed);
}

}  // namespace

Stepped Machine::beta_step(const Configuration& c) const {
  const ExprPtr& e = c.control;
  Stepped out;
  out.info.redex = e;
  const Store& s = c.store;

  if (is_value_expr(e)) {
    out.info.rule = "eva";
    out.next.store = s;
    Value v = value_of(e);
    std::string x = out.next.store.allocate(v);
    out.info.allocated.emplace_back(x, v);
    out.next.control = var(x, e->span);
    return out;
  }

  if (auto o = e->as<node::Op>()) {
    out.info.rule = "eop";
    if (!o->type || !o->entry || *o->entry >= sig_.entries().size())
      throw MachineError("operator '" + o->name + "' is not elaborated");
    const OperatorType& tau = *o->type;
    const std::string& key = sig_.entries()[*o->entry].primitive;
    const Primitive* f = prims_.find(key);
    if (!f) throw MachineError("no primitive bound to key '" + key + "'");
    std::vector<Prevalue> ws;
    std::vector<std::string> xs;
    std::vector<PseudoQualifier> quals;
    for (std::size_t i = 0; i < o->args.size(); ++i) {
      const std::string& x = var_name(o->args[i]);
      const Value& v = lookup(s, x);
      ws.push_back(v.pre);
      xs.push_back(x);
      quals.push_back(opts_.mutant == Mutant::StoreQualifierDealloc ? widen(v.qual)
                                                                    : tau.inputs.at(i).qual);
    }
    Prevalue result;
    try {
      result = (*f)(ws);
    } catch (const PrimitiveError& err) {
      throw MachineError(std::string("primitive '") + key + "' failed: " + err.what());
    }
    std::string x = s.fresh();
    out.next.store = dealloc(s, quals, xs, &out.info.freed);
    Value v{tau.output.qual, std::move(result)};
    out.next.store.allocate(v);
    out.info.allocated.emplace_back(x, v);
    out.next.control = var(x, e->span);
    return out;
  }

  if (auto n = e->as<node::If>()) {
    out.info.rule = "eif";
    const std::string& x = var_name(n->cond);
    const Value& v = lookup(s, x);
    auto c0 = std::get_if<Constant>(&v.pre);
    auto b = c0 ? std::get_if<bool>(c0) : nullptr;
    if (!b) throw MachineError("if scrutinee '" + x + "' does not hold a boolean");
    out.next.store = drop(s, x, out.info.freed);
    out.next.control = *b ? n->then_branch : n->else_branch;
    return out;
  }

  if (auto n = e->as<node::Split>()) {
    out.info.rule = "esp";
    const std::string& x = var_name(n->scrutinee);
    auto t = std::get_if<pre::TupleCells>(&lookup(s, x).pre);
    if (!t || t->items.size() != n->pattern.size())
      throw MachineError("spl scrutinee '" + x + "' does not hold a tuple of arity " +
                         std::to_string(n->pattern.size()));
    Substitution d;
    for (std::size_t i = 0; i < n->pattern.size(); ++i) d[n->pattern[i]] = t->items[i];
    out.next.store = drop(s, x, out.info.freed);
    out.next.control = apply_subst(d, n->body);
    return out;
  }

  if (auto n = e->as<node::Case>()) {
    out.info.rule = "eca";
    const std::string& x = var_name(n->scrutinee);
    const Value& v = lookup(s, x);
    if (std::holds_alternative<pre::NilCell>(v.pre)) {
      out.next.store = drop(s, x, out.info.freed);
      out.next.control = n->nil_branch;
      return out;
    }
    auto cell = std::get_if<pre::ConsCell>(&v.pre);
    if (!cell) throw MachineError("case scrutinee '" + x + "' does not hold a list cell");
    Substitution d{{n->head, cell->head}};
    d[n->tail] = cell->tail;
    out.next.store = drop(s, x, out.info.freed);
    out.next.control = apply_subst(d, n->cons_branch);
    return out;
  }

  if (auto n = e->as<node::App>()) {
    out.info.rule = "efu";
    const std::string& f = var_name(n->fn);
    auto clo = std::get_if<pre::Closure>(&lookup(s, f).pre);
    if (!clo) throw MachineError("applied variable '" + f + "' does not hold a closure");
    ExprPtr body = apply_subst({{clo->param, var_name(n->arg)}}, clo->body);
    out.next.store = drop(s, f, out.info.freed);
    out.next.control = std::move(body);
    return out;
  }

  if (auto n = e->as<node::Let>()) {
    out.info.rule = "ele";
    out.next.store = s;
    out.next.control = apply_subst({{n->name, var_name(n->bound)}}, n->body);
    return out;
  }

  throw MachineError("not a beta-node: " + to_string(e));
}

StepOutcome Machine::step(const Configuration& c) const {
  auto d = decompose(c.control);
  if (!d) return Terminal{var_name(c.control)};
  try {
    Stepped s = beta_step(Configuration{c.store, d->redex});
    s.next.control = d->context.plug(s.next.control);
    return s;
  } catch (const MachineError& err) {
    return Stuck{d->redex, err.what()};
  } catch (const std::invalid_argument& err) {
    return Stuck{d->redex, err.what()};
  }
}

RunResult Machine::run(Configuration c, const RunOptions& opts) const {
  RunResult r;
  while (true) {
    if (is_terminal(c)) {
      r.status = RunStatus::Terminal;
      break;
    }
    if (r.steps >= opts.fuel) {
      r.status = RunStatus::FuelExhausted;
      break;
    }
    StepOutcome o = step(c);
    if (auto st = std::get_if<Stuck>(&o)) {
      r.status = RunStatus::Stuck;
      r.stuck_reason = st->reason;
      r.stuck_redex = st->redex;
      break;
    }
    auto& s = std::get<Stepped>(o);
    ++r.steps;
    c = std::move(s.next);
    if (opts.observer) opts.observer(r.steps, c, s.info);
    if (opts.record_trace) r.trace.push_back(std::move(s.info));
  }
  r.final = std::move(c);
  return r;
}

// ---------------------------------------------------------------------------
// Traces

namespace {

std::string cells_text(char sign, const std::vector<Store::Cell>& cells) {
  if (cells.empty()) return std::string(1, sign);
  std::string s;
  for (const auto& [x, v] : cells)
    s += (s.empty() ? "" : " ") + std::string(1, sign) + x + "(" + std::to_string(size_of(v)) + ")";
  return s;
}

nlohmann::json cells_json(const std::vector<Store::Cell>& cells) {
  auto arr = nlohmann::json::array();
  for (const auto& [x, v] : cells) arr.push_back({{"var", x}, {"size", size_of(v)}});
  return arr;
}

}  // namespace

std::string trace_line(std::uint64_t step, const StepInfo& info) {
  return std::to_string(step) + ", " + info.rule + ", " + to_string(info.redex) + ", " +
         cells_text('+', info.allocated) + ", " + cells_text('-', info.freed);
}

std::string trace_record(std::uint64_t step, const StepInfo& info) {
  nlohmann::json j{{"step", step},
                   {"rule", info.rule},
                   {"redex", to_string(info.redex)},
                   {"alloc", cells_json(info.allocated)},
                   {"dealloc", cells_json(info.freed)}};
  return j.dump();
}

// ---------------------------------------------------------------------------

ExprPtr resolve_operators_naively(const QualifiedSignature& sig, const ExprPtr& e) {
  auto go = [&](const ExprPtr& x) { return resolve_operators_naively(sig, x); };
  Expr::Node n = e->node;
  std::visit(
      [&](auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, node::Op>) {
          for (auto& a : x.args) a = go(a);
          if (!x.literal && !x.entry) {
            auto c = sig.candidates(x.name, x.args.size());
            if (!c.empty()) {
              x.entry = c.front();
              x.type = sig.entries()[c.front()].type;
            }
          }
        } else if constexpr (std::is_same_v<T, node::Tuple>) {
          for (auto& a : x.items) a = go(a);
        } else if constexpr (std::is_same_v<T, node::App>) {
          x.fn = go(x.fn);
          x.arg = go(x.arg);
        } else if constexpr (std::is_same_v<T, node::Lambda>) {
          x.body = go(x.body);
        } else if constexpr (std::is_same_v<T, node::Split>) {
          x.scrutinee = go(x.scrutinee);
          x.body = go(x.body);
        } else if constexpr (std::is_same_v<T, node::If>) {
          x.cond = go(x.cond);
          x.then_branch = go(x.then_branch);
          x.else_branch = go(x.else_branch);
        } else if constexpr (std::is_same_v<T, node::Let>) {
          x.bound = go(x.bound);
          x.body = go(x.body);
        } else if constexpr (std::is_same_v<T, node::Cons>) {
          x.head = go(x.head);
          x.tail = go(x.tail);
        } else if constexpr (std::is_same_v<T, node::Case>) {
          x.scrutinee = go(x.scrutinee);
          x.nil_branch = go(x.nil_branch);
          x.cons_branch = go(x.cons_branch);
        }
      },
      n);
  return make(std::move(n), e->span);
}

}  // namespace wlt
