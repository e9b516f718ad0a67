#include "wlt/verify.hpp"

#include <nlohmann/json.hpp>
#include <set>

namespace wlt {

namespace {

bool is_li_base_constant(const Value& v) {
  return v.qual == Qualifier::Li && std::holds_alternative<Constant>(v.pre);
}

bool is_non_base(const Value& v) { return !std::holds_alternative<Constant>(v.pre); }

// Free occurrences of each variable, split into hidden operator arguments
// and everything else.
struct Uses {
  std::map<std::string, int> hidden;
  std::map<std::string, int> plain;
};

void scan(const ExprPtr& e, std::set<std::string>& bound, Uses& u);

void scan_bound(const ExprPtr& e, std::set<std::string>& bound,
                const std::vector<std::string>& names, Uses& u) {
  std::vector<std::string> added;
  for (const auto& x : names)
    if (bound.insert(x).second) added.push_back(x);
  scan(e, bound, u);
  for (const auto& x : added) bound.erase(x);
}

void scan(const ExprPtr& e, std::set<std::string>& bound, Uses& u) {
  if (auto v = e->as<node::Var>()) {
    if (!bound.count(v->name)) ++u.plain[v->name];
  } else if (auto o = e->as<node::Op>()) {
    for (std::size_t i = 0; i < o->args.size(); ++i) {
      auto a = o->args[i]->as<node::Var>();
      bool hid = a && o->type && i < o->type->inputs.size() && o->type->inputs[i].is_hidden();
      if (hid) {
        if (!bound.count(a->name)) ++u.hidden[a->name];
      } else {
        scan(o->args[i], bound, u);
      }
    }
  } else if (auto t = e->as<node::Tuple>()) {
    for (const auto& i : t->items) scan(i, bound, u);
  } else if (auto a = e->as<node::App>()) {
    scan(a->fn, bound, u);
    scan(a->arg, bound, u);
  } else if (auto l = e->as<node::Lambda>()) {
    scan_bound(l->body, bound, {l->param}, u);
  } else if (auto s = e->as<node::Split>()) {
    scan(s->scrutinee, bound, u);
    scan_bound(s->body, bound, s->pattern, u);
  } else if (auto i = e->as<node::If>()) {
    scan(i->cond, bound, u);
    scan(i->then_branch, bound, u);
    scan(i->else_branch, bound, u);
  } else if (auto l = e->as<node::Let>()) {
    scan(l->bound, bound, u);
    scan_bound(l->body, bound, {l->name}, u);
  } else if (auto c = e->as<node::Cons>()) {
    scan(c->head, bound, u);
    scan(c->tail, bound, u);
  } else if (auto c = e->as<node::Case>()) {
    scan(c->scrutinee, bound, u);
    scan(c->nil_branch, bound, u);
    scan_bound(c->cons_branch, bound, {c->head, c->tail}, u);
  }
}

bool self_referring(const std::string& x, const Value& v) {
  auto clo = std::get_if<pre::Closure>(&v.pre);
  return clo && v.qual == Qualifier::Un && clo->param != x && occurs_free(x, clo->body);
}

bool same_type(const Type& a, const Type& b) { return a.qual == b.qual && unify(a, b).has_value(); }

struct WalkState {
  TypeContext live;
  std::vector<std::pair<std::string, std::string>> consumers;
  std::optional<Diagnostic> diagnostic;
  std::string failing_cell;
};

// Types every cell in order under the given hi set. Returns false with the
// state's diagnostic set on the first failing cell.
bool walk_store(const std::vector<Store::Cell>& cells, const std::set<std::string>& hi,
                const QualifiedSignature& sig, const VerifyOptions& opts, WalkState& st) {
  for (const auto& [x, v] : cells) {
    ExprPtr e = expr_of(v);
    TypeContext local;
    bool self = self_referring(x, v);
    if (self) {
      auto hint = opts.hints.find(x);
      if (hint == opts.hints.end()) {
        st.diagnostic = Diagnostic{"store", x, {},
                                   "recursive closure '" + x + "' has no declared type"};
        st.failing_cell = x;
        return false;
      }
      for (const auto& [y, t] : st.live.bindings())
        if (t.qual == PseudoQualifier::Un) local.push(y, t);
      local.push(x, PseudoType::proper(hint->second));
    } else {
      for (const auto& [y, t] : st.live.bindings())
        if (t.qual != PseudoQualifier::Li || occurs_free(y, e)) local.push(y, t);
    }
    auto r = type_of(local, sig, e, opts.check);
    if (!r) {
      Diagnostic d = r.diagnostic();
      d.message = "store cell '" + x + "': " + d.message;
      st.diagnostic = d;
      st.failing_cell = x;
      return false;
    }
    Type ty = r->type;
    if (self) {
      const Type& want = opts.hints.at(x);
      if (!same_type(ty, want)) {
        st.diagnostic = Diagnostic{"store", x, {},
                                   "recursive closure '" + x + "' has type " + to_string(ty) +
                                       " but is declared " + to_string(want)};
        st.failing_cell = x;
        return false;
      }
      ty = want;
    } else {
      for (const auto& [y, t] : local.bindings())
        if (t.qual == PseudoQualifier::Li) {
          st.live.erase(y);
          st.consumers.emplace_back(y, x);
        }
    }
    if (hi.count(x)) {
      if (!is_li_base_constant(v)) {
        st.diagnostic = Diagnostic{"shi", x, {}, "only a li base constant may be hidden"};
        st.failing_cell = x;
        return false;
      }
      st.live.push(x, PseudoType::hidden(ty.pre));
    } else {
      st.live.push(x, PseudoType::proper(ty));
    }
  }
  return true;
}

ConfigReport attempt(const Configuration& c, const std::vector<Store::Cell>& cells,
                     const std::set<std::string>& hi, const QualifiedSignature& sig,
                     const VerifyOptions& opts) {
  ConfigReport rep;
  WalkState st;
  if (!walk_store(cells, hi, sig, opts, st)) {
    rep.diagnostic = st.diagnostic;
    rep.failing_cell = st.failing_cell;
    rep.context = st.live;
    return rep;
  }
  auto r = type_of(st.live, sig, c.control, opts.check);
  rep.context = st.live;
  rep.consumers = std::move(st.consumers);
  if (!r) {
    rep.diagnostic = r.diagnostic();
    return rep;
  }
  for (const auto& [y, t] : st.live.bindings())
    if (t.qual == PseudoQualifier::Li) rep.consumers.emplace_back(y, "");
  rep.ok = true;
  rep.type = r->type;
  rep.elaborated = r->elaborated;
  return rep;
}

}  // namespace

ConfigReport config_check(const Configuration& c, const QualifiedSignature& sig,
                          const VerifyOptions& opts) {
  std::vector<Store::Cell> cells = c.store.cells();

  // Candidates for shi, and the guess from the reference scan.
  std::vector<std::string> cands;
  std::set<std::string> guess;
  Uses later;
  std::set<std::string> bound;
  scan(c.control, bound, later);
  for (std::size_t i = cells.size(); i-- > 0;) {
    const auto& [x, v] = cells[i];
    if (is_li_base_constant(v)) {
      cands.push_back(x);
      if (!later.plain.count(x)) guess.insert(x);
    }
    bound.clear();
    scan(expr_of(v), bound, later);
  }

  ConfigReport first = attempt(c, cells, guess, sig, opts);
  first.assignments_tried = 1;
  if (first.ok || cands.empty()) return first;

  std::size_t k = cands.size();
  if (k > opts.cap_log2) {
    first.inconclusive = true;
    return first;
  }
  std::uint64_t tried = 1;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << k); ++mask) {
    std::set<std::string> hi;
    for (std::size_t b = 0; b < k; ++b)
      if (mask >> b & 1) hi.insert(cands[b]);
    if (hi == guess) continue;
    ++tried;
    ConfigReport r = attempt(c, cells, hi, sig, opts);
    if (r.ok) {
      r.assignments_tried = tried;
      return r;
    }
  }
  first.assignments_tried = tried;
  return first;
}

bool store_typing_check(const Store& s, const TypeContext& ctx, const QualifiedSignature& sig,
                        const VerifyOptions& opts) {
  std::set<std::string> hi;
  for (const auto& [x, t] : ctx.bindings()) {
    if (!s.contains(x)) return false;
    if (t.is_hidden()) hi.insert(x);
  }
  WalkState st;
  if (!walk_store(s.cells(), hi, sig, opts, st)) return false;
  const auto& got = st.live.bindings();
  const auto& want = ctx.bindings();
  if (got.size() != want.size()) return false;
  for (std::size_t i = 0; i < got.size(); ++i) {
    if (got[i].first != want[i].first) return false;
    const PseudoType& a = got[i].second;
    const PseudoType& b = want[i].second;
    if (a.is_hidden() || b.is_hidden()) {
      if (!(a == b)) return false;
    } else if (!same_type(a.as_type(), b.as_type())) {
      return false;
    }
  }
  return true;
}

std::optional<std::string> decomposition_invariants(const Store& s, const ConfigReport& r) {
  std::map<std::string, int> count;
  for (const auto& [cell, _] : r.consumers) ++count[cell];
  for (const auto& [cell, n] : count) {
    const Value* v = s.find(cell);
    if (!v) return "consumer recorded for missing cell '" + cell + "'";
    if (v->qual == Qualifier::Li && is_non_base(*v) && n > 1)
      return "linear cell '" + cell + "' is shared by " + std::to_string(n) + " sub-stores";
  }
  for (const auto& [x, t] : r.context.bindings()) {
    if (!t.is_hidden()) continue;
    const Value* v = s.find(x);
    if (!v || !is_li_base_constant(*v))
      return "hidden entry '" + x + "' does not hold a linear base constant";
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Loading

LoadError::LoadError(std::string stage_, Diagnostic d)
    : std::runtime_error(stage_ + ": " + d.text()), stage(std::move(stage_)),
      diagnostic(std::move(d)) {}

LoadedProgram load_program(const ProgramFile& p, const LoadOptions& opts) {
  LoadedProgram lp;
  lp.signature = std::make_shared<const QualifiedSignature>(p.signature);
  const QualifiedSignature& sig = *lp.signature;
  VerifyOptions vo;
  vo.check = opts.check;
  std::map<std::string, Type> types;
  Store store;

  for (const StoreDecl& d : p.store) {
    if (d.declared) vo.hints[d.name] = *d.declared;
    if (is_value_expr(d.value)) {
      ExprPtr e = d.value;
      if (opts.unsafe) {
        e = resolve_operators_naively(sig, e);
      } else {
        TypeContext local;
        auto lam = e->as<node::Lambda>();
        bool self = lam && lam->qual == Qualifier::Un && lam->param != d.name &&
                    occurs_free(d.name, lam->body);
        for (const auto& [y, _] : store.cells()) {
          if (!occurs_free(y, e)) continue;
          if (self && types.at(y).qual != Qualifier::Un) continue;
          local.push(y, PseudoType::proper(types.at(y)));
        }
        if (self) {
          if (!d.declared)
            throw LoadError("store " + d.name,
                            Diagnostic{"store", d.name, d.value->span,
                                       "recursive entry '" + d.name + "' needs a declared type"});
          local.push(d.name, PseudoType::proper(*d.declared));
        }
        auto r = type_of(local, sig, e, opts.check);
        if (!r) throw LoadError("store " + d.name, r.diagnostic());
        if (d.declared && !same_type(r->type, *d.declared))
          throw LoadError("store " + d.name,
                          Diagnostic{"store", d.name, d.value->span,
                                     "entry has type " + to_string(r->type) + " but is declared " +
                                         to_string(*d.declared)});
        types[d.name] = d.declared ? *d.declared : r->type;
        e = r->elaborated;
      }
      store.push(d.name, value_of(e));
      continue;
    }

    ExprPtr control;
    if (opts.unsafe) {
      control = resolve_operators_naively(sig, d.value);
    } else {
      ConfigReport rep = config_check(Configuration{store, d.value}, sig, vo);
      if (!rep.ok)
        throw LoadError("setup " + d.name,
                        rep.diagnostic.value_or(Diagnostic{"setup", d.name, d.value->span,
                                                           "setup entry does not check"}));
      if (d.declared && !same_type(*rep.type, *d.declared))
        throw LoadError("setup " + d.name,
                        Diagnostic{"setup", d.name, d.value->span,
                                   "entry has type " + to_string(*rep.type) + " but is declared " +
                                       to_string(*d.declared)});
      types[d.name] = d.declared ? *d.declared : *rep.type;
      control = rep.elaborated;
    }
    Machine m(sig);
    RunOptions ro;
    ro.fuel = opts.setup_fuel;
    RunResult run = m.run(Configuration{store, control}, ro);
    if (run.status != RunStatus::Terminal)
      throw LoadError("setup " + d.name,
                      Diagnostic{"setup", d.name, d.value->span,
                                 "setup entry did not terminate (" +
                                     std::string(to_string(run.status)) + ")" +
                                     (run.stuck_reason.empty() ? "" : ": " + run.stuck_reason)});
    const std::string& x = run.final.control->as<node::Var>()->name;
    if (!is_reserved_name(x) || store.contains(x))
      throw LoadError("setup " + d.name,
                      Diagnostic{"setup", d.name, d.value->span,
                                 "setup entry must produce a new cell, not '" + x + "'"});
    store = std::move(run.final.store);
    store.rename(x, d.name);
    lp.setup_steps += run.steps;
  }

  lp.hints = vo.hints;
  Configuration init{store, p.main};
  if (opts.unsafe) {
    init.control = resolve_operators_naively(sig, p.main);
  } else {
    lp.report = config_check(init, sig, vo);
    if (!lp.report.ok)
      throw LoadError("main", lp.report.diagnostic.value_or(
                                  Diagnostic{"main", "", p.main->span, "main does not check"}));
    init.control = lp.report.elaborated;
  }
  lp.initial = std::move(init);
  return lp;
}

// ---------------------------------------------------------------------------
// Suites

std::string PreservationReport::record() const {
  nlohmann::json j{{"suite", "preservation"},
                   {"program", program},
                   {"n", n},
                   {"steps_checked", steps_checked},
                   {"status", std::string(to_string(status))},
                   {"verdict", passed() ? "pass" : "fail"}};
  if (violation) {
    j["violation_step"] = violation->step;
    j["violation_rule"] = violation->rule;
    j["violation"] = violation->message;
  }
  return j.dump();
}

PreservationReport preservation_suite(const LoadedProgram& lp, const std::string& name,
                                      std::int64_t n, const SuiteOptions& opts) {
  PreservationReport rep;
  rep.program = name;
  rep.n = n;
  const QualifiedSignature& sig = *lp.signature;
  VerifyOptions vo = opts.verify;
  for (const auto& [x, t] : lp.hints) vo.hints.emplace(x, t);

  ConfigReport first = config_check(lp.initial, sig, vo);
  if (!first.ok) {
    rep.violation = Violation{0, "", "initial configuration does not check: " +
                                         (first.diagnostic ? first.diagnostic->text() : "")};
    return rep;
  }
  rep.started = true;

  Machine m(sig, PrimitiveTable::standard(), opts.machine);
  Configuration c = lp.initial;
  if (opts.pool && !is_terminal(c)) opts.pool->push_back({lp.signature, c, vo.hints, name});
  std::uint64_t step = 0;
  while (!is_terminal(c)) {
    if (step >= opts.fuel) {
      rep.status = RunStatus::FuelExhausted;
      return rep;
    }
    StepOutcome o = m.step(c);
    ++step;
    if (auto st = std::get_if<Stuck>(&o)) {
      rep.status = RunStatus::Stuck;
      rep.violation = Violation{step, "stuck", st->reason};
      return rep;
    }
    auto& s = std::get<Stepped>(o);
    c = std::move(s.next);
    ConfigReport r = config_check(c, sig, vo);
    ++rep.steps_checked;
    if (!r.ok) {
      rep.violation = Violation{step, s.info.rule,
                                (r.inconclusive ? "inconclusive: " : "") +
                                    (r.diagnostic ? r.diagnostic->text() : std::string())};
      return rep;
    }
    if (auto bad = decomposition_invariants(c.store, r)) {
      rep.violation = Violation{step, s.info.rule, *bad};
      return rep;
    }
    if (opts.pool && !is_terminal(c)) opts.pool->push_back({lp.signature, c, vo.hints, name});
  }
  rep.status = RunStatus::Terminal;
  return rep;
}

std::string ProgressReport::record() const {
  nlohmann::json j{{"suite", "progress"},
                   {"checked", checked},
                   {"terminal_excluded", terminal_excluded},
                   {"ill_typed", ill_typed},
                   {"stuck", stuck},
                   {"verdict", passed() ? "pass" : "fail"}};
  if (first_stuck) j["first_stuck"] = *first_stuck;
  return j.dump();
}

ProgressReport progress_suite(const std::vector<PoolEntry>& pool, bool recheck,
                              const VerifyOptions& opts) {
  ProgressReport rep;
  for (const PoolEntry& p : pool) {
    if (is_terminal(p.config)) {
      ++rep.terminal_excluded;
      continue;
    }
    if (recheck) {
      VerifyOptions vo = opts;
      for (const auto& [x, t] : p.hints) vo.hints.emplace(x, t);
      if (!config_check(p.config, *p.signature, vo).ok) {
        ++rep.ill_typed;
        continue;
      }
    }
    ++rep.checked;
    StepOutcome o = Machine(*p.signature).step(p.config);
    if (auto st = std::get_if<Stuck>(&o)) {
      if (!rep.first_stuck)
        rep.first_stuck = p.origin + ": " + to_string(st->redex) + ": " + st->reason;
      ++rep.stuck;
    }
  }
  return rep;
}

}  // namespace wlt
