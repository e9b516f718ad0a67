// One PASS/FAIL line per acceptance criterion.
//
// usage: wlt_acceptance <path-to-wlt-cli> <corpus-dir> [--expect-fail N]...
// Exit status is 0 iff the failing criteria are exactly the expected ones.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <future>
#include <iomanip>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "split_oracle.hpp"
#include "wlt/corpus.hpp"
#include "wlt/profile.hpp"
#include "wlt/verify.hpp"

using namespace wlt;

namespace {

std::string g_cli;
std::string g_corpus;

int cli(const std::string& args) {
  std::string cmd = "'" + g_cli + "' " + args + " >/dev/null 2>&1";
  int raw = std::system(cmd.c_str());
  return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

std::string corpus_file(const std::string& name, Variant v) {
  return g_corpus + "/" + name + "." + std::string(to_string(v)) + ".wlt";
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Outcome {
  bool pass = true;
  std::vector<std::string> notes;
  void fail(std::string why) {
    pass = false;
    notes.push_back("  - " + std::move(why));
  }
  void note(std::string s) { notes.push_back("  " + std::move(s)); }
};

// ---------------------------------------------------------------------------

Outcome corpus_well_typed() {
  Outcome o;
  for (const auto& name : corpus_names()) {
    const auto& e = corpus_entry(name, Variant::WeakLinear);
    std::int64_t n = e.default_ns.back();
    auto t0 = std::chrono::steady_clock::now();
    try {
      load_program(get_program(name, Variant::WeakLinear, n));
    } catch (const std::exception& ex) {
      o.fail(name + ": " + ex.what());
      continue;
    }
    double s = seconds_since(t0);
    if (s >= 1.0) o.fail(name + " took " + std::to_string(s) + " s");
    int rc = cli("check --param n=" + std::to_string(n) + " '" +
                 corpus_file(name, Variant::WeakLinear) + "'");
    if (rc != 0) o.fail(name + ": check exited " + std::to_string(rc));
    o.note(name + " (n=" + std::to_string(n) + ") checked in " + std::to_string(s) + " s");
  }
  return o;
}

std::string counterexample_file() { return g_corpus + "/counterexample.wlt"; }

Outcome counterexample_rejected() {
  Outcome o;
  try {
    load_program(parse_program(counterexample_source()));
    o.fail("counterexample was accepted");
  } catch (const LoadError& e) {
    if (e.diagnostic.rule != "split") o.fail("rejected for rule " + e.diagnostic.rule);
    o.note("rejected: " + e.diagnostic.text());
  }
  int rc = cli("check '" + counterexample_file() + "'");
  if (rc != 1) o.fail("check exited " + std::to_string(rc) + ", expected 1");
  return o;
}

struct Sweep {
  std::vector<PreservationReport> reports;
  std::vector<PoolEntry> pool;
  std::vector<std::string> load_errors;
};

Sweep preservation_sweep() {
  struct Item {
    std::string name;
    Variant v;
    std::int64_t n;
  };
  std::vector<Item> items;
  for (const auto& name : corpus_names())
    for (std::int64_t n = corpus_entry(name, Variant::WeakLinear).min_n;
         n <= (name == "sort" ? 8 : 16); ++n)
      items.push_back({name, Variant::WeakLinear, n});

  struct Part {
    PreservationReport report;
    std::vector<PoolEntry> pool;
    std::string error;
  };
  std::vector<std::future<Part>> jobs;
  for (const auto& it : items)
    jobs.push_back(std::async(std::launch::async, [it] {
      Part p;
      try {
        auto lp = load_program(get_program(it.name, it.v, it.n));
        SuiteOptions so;
        so.fuel = 10'000'000;
        so.pool = &p.pool;
        p.report = preservation_suite(lp, it.name, it.n, so);
      } catch (const std::exception& e) {
        p.error = it.name + " n=" + std::to_string(it.n) + ": " + e.what();
      }
      return p;
    }));
  Sweep s;
  for (auto& j : jobs) {
    Part p = j.get();
    if (!p.error.empty()) s.load_errors.push_back(p.error);
    s.reports.push_back(std::move(p.report));
    for (auto& e : p.pool) s.pool.push_back(std::move(e));
  }
  return s;
}

Outcome preservation(const Sweep& s) {
  Outcome o;
  std::uint64_t steps = 0;
  for (const auto& e : s.load_errors) o.fail(e);
  for (const auto& r : s.reports) {
    steps += r.steps_checked;
    if (!r.started) continue;  // already reported as a load error
    if (!r.passed())
      o.fail(r.program + " n=" + std::to_string(r.n) + ": " +
             (r.violation ? r.violation->rule + " " + r.violation->message : "not started"));
    else if (r.status != RunStatus::Terminal)
      o.fail(r.program + " n=" + std::to_string(r.n) + " ended " + std::string(to_string(r.status)));
  }
  o.note(std::to_string(s.reports.size()) + " runs, " + std::to_string(steps) +
         " configurations checked");
  return o;
}

Outcome progress(const Sweep& s) {
  Outcome o;
  auto traces = progress_suite(s.pool, false);
  auto generated = generate_configurations(20260101, 1000, 4);
  auto gen = progress_suite(generated, true);
  if (generated.size() < 1000)
    o.fail("only " + std::to_string(generated.size()) + " generated configurations");
  for (const auto& g : generated)
    if (expr_depth(g.config.control) > 4) {
      o.fail("generated control deeper than 4");
      break;
    }
  if (!traces.passed()) o.fail("trace pool: " + traces.first_stuck.value_or("ill-typed"));
  if (!gen.passed()) o.fail("generated: " + gen.first_stuck.value_or("ill-typed"));
  o.note("trace configurations " + std::to_string(traces.checked) + ", generated " +
         std::to_string(gen.checked) + " (+" + std::to_string(gen.terminal_excluded) +
         " terminal), stuck " + std::to_string(traces.stuck + gen.stuck));
  return o;
}

Outcome mutation_sensitivity() {
  Outcome o;
  int rc = cli("meta --preservation --max-n 6 --mutant store-qualifier-dealloc");
  if (rc != 1) o.fail("meta with store-qualifier-dealloc exited " + std::to_string(rc));
  else o.note("store-qualifier-dealloc: meta exits 1");

  rc = cli("check --mutant operator-pseudosplit '" + counterexample_file() + "'");
  if (rc != 0) o.fail("operator-pseudosplit check rejected the counterexample (" + std::to_string(rc) + ")");
  rc = cli("meta --preservation --max-n 4 --mutant operator-pseudosplit");
  if (rc != 1) o.fail("meta with operator-pseudosplit exited " + std::to_string(rc));
  else o.note("operator-pseudosplit: counterexample accepted, meta exits 1");

  rc = cli("meta --preservation --max-n 4");
  if (rc != 0) o.fail("unmutated meta exited " + std::to_string(rc));
  return o;
}

Outcome growth_degrees() {
  Outcome o;
  struct Row {
    std::string name;
    Variant v;
    int expected;
  };
  const std::vector<Row> rows = {
      {"fib", Variant::WeakLinear, 0},  {"map", Variant::WeakLinear, 0},
      {"mapa", Variant::WeakLinear, 0}, {"fib", Variant::Unrestricted, 1},
      {"map", Variant::Unrestricted, 1}, {"mapa", Variant::Unrestricted, 2},
      {"sort", Variant::WeakLinear, 1}, {"sort", Variant::Unrestricted, 3},
  };
  std::vector<std::future<GrowthReport>> jobs;
  for (const auto& r : rows) {
    std::vector<std::int64_t> ns = r.name == "sort" ? std::vector<std::int64_t>{4, 6, 8, 10}
                                                    : std::vector<std::int64_t>{4, 8, 16, 32};
    jobs.push_back(std::async(std::launch::async,
                              [r, ns] { return growth_experiment(r.name, r.v, ns); }));
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::string label = rows[i].name + "." + std::string(to_string(rows[i].v));
    try {
      GrowthReport g = jobs[i].get();
      std::string cs;
      for (const auto& row : g.rows) cs += (cs.empty() ? "" : ",") + std::to_string(row.balance);
      std::string got = std::to_string(g.degree);
      std::string line = label + " C(n) = " + cs + " degree " + got + ", expected " +
                         std::to_string(rows[i].expected);
      if (g.degree != rows[i].expected) o.fail(line);
      else o.note(line);
    } catch (const std::exception& e) {
      o.fail(label + ": " + e.what());
    }
  }
  return o;
}

oracle::Entry entry_of(char var, int q, char base) {
  return {var, "luh"[q], base};
}

TypeContext to_context(const oracle::Ctx& c) {
  TypeContext t;
  for (const auto& e : c) {
    auto b = e.base == 'i' ? types::int_() : types::bool_();
    PseudoType p = e.qual == 'h' ? PseudoType::hidden(b)
                                 : PseudoType::proper(e.qual == 'l' ? types::li(b) : types::un(b));
    t.push(std::string(1, e.var), p);
  }
  return t;
}

Outcome split_oracle() {
  Outcome o;
  std::size_t cases = 0, positive = 0, mismatches = 0;
  auto compare = [&](const std::vector<oracle::Ctx>& parts, const oracle::Ctx& whole) {
    std::vector<TypeContext> ps;
    for (const auto& p : parts) ps.push_back(to_context(p));
    TypeContext w = to_context(whole);
    for (bool pseudo : {false, true}) {
      bool want = oracle::derivable(parts, whole, pseudo);
      bool got = pseudo ? pseudosplit_check(ps, w) : split_check(ps, w);
      ++cases;
      positive += want;
      if (want != got && ++mismatches <= 5) {
        std::ostringstream m;
        m << (pseudo ? "pseudosplit" : "split") << " disagrees on";
        for (const auto& p : ps) m << " [" << to_string(p) << "]";
        m << " = [" << to_string(w) << "]: oracle " << want;
        o.fail(m.str());
      }
    }
  };

  const char vars[] = {'x', 'y', 'z'};
  const char bases[] = {'i', 'b'};
  for (int k = 0; k <= 3; ++k) {
    int wholes = 1;
    for (int i = 0; i < k; ++i) wholes *= 6;
    for (int wcode = 0; wcode < wholes; ++wcode) {
      oracle::Ctx whole;
      for (int i = 0, c = wcode; i < k; ++i, c /= 6)
        whole.push_back(entry_of(vars[i], c % 3, bases[(c / 3) % 2]));
      for (int n = 0; n <= (k <= 2 ? 3 : 2); ++n) {
        // each part holds each whole variable absent or as li / un / hi
        int slots = n * k, combos = 1;
        for (int i = 0; i < slots; ++i) combos *= 4;
        for (int pc = 0; pc < combos; ++pc) {
          std::vector<oracle::Ctx> parts(n);
          int c = pc;
          for (int j = 0; j < n; ++j)
            for (int i = 0; i < k; ++i, c /= 4)
              if (c % 4) parts[j].push_back(entry_of(vars[i], c % 4 - 1, whole[i].base));
          compare(parts, whole);
          // order matters: the same parts with the first one reversed
          if (n >= 1 && parts[0].size() >= 2) {
            std::reverse(parts[0].begin(), parts[0].end());
            compare(parts, whole);
          }
        }
      }
      // parts mentioning a variable at the wrong pretype or one absent from the whole
      for (int i = 0; i < k; ++i) {
        char other = whole[i].base == 'i' ? 'b' : 'i';
        for (int q = 0; q < 3; ++q) {
          oracle::Ctx bad = whole;
          bad[i] = entry_of(vars[i], q, other);
          compare({bad}, whole);
          compare({bad, whole}, whole);
        }
      }
      if (k < 3) compare({oracle::Ctx{entry_of(vars[k], 1, 'i')}}, whole);
    }
  }
  o.note(std::to_string(cases) + " relation queries, " + std::to_string(positive) +
         " derivable, " + std::to_string(mismatches) + " disagreements");
  return o;
}

std::optional<std::vector<std::int64_t>> array_in(const Store& s, const std::string& x) {
  const Value* v = s.find(x);
  if (!v) return std::nullopt;
  auto c = std::get_if<Constant>(&v->pre);
  if (!c) return std::nullopt;
  auto a = std::get_if<std::vector<std::int64_t>>(c);
  if (!a) return std::nullopt;
  return *a;
}

std::optional<std::int64_t> int_in(const Store& s, const std::string& x) {
  const Value* v = s.find(x);
  if (!v) return std::nullopt;
  auto c = std::get_if<Constant>(&v->pre);
  if (!c) return std::nullopt;
  auto i = std::get_if<std::int64_t>(c);
  if (!i) return std::nullopt;
  return *i;
}

RunResult run_program(const LoadedProgram& lp) {
  Machine m(*lp.signature);
  RunOptions ro;
  ro.fuel = 10'000'000;
  return m.run(lp.initial, ro);
}

Outcome functional_oracles() {
  Outcome o;
  for (std::int64_t n = 1; n <= 12; ++n) {
    auto lp = load_program(get_program("sort", Variant::WeakLinear, n));
    auto input = array_in(lp.initial.store, "a");
    if (!input) {
      o.fail("sort n=" + std::to_string(n) + ": no input array a");
      continue;
    }
    std::vector<std::int64_t> want = *input;
    std::sort(want.begin(), want.end());
    std::vector<std::int64_t> iota(n);
    for (std::int64_t i = 0; i < n; ++i) iota[i] = i;
    auto r = run_program(lp);
    std::optional<std::vector<std::int64_t>> got;
    if (r.status == RunStatus::Terminal)
      got = array_in(r.final.store, r.final.control->as<node::Var>()->name);
    if (!got || *got != want || want != iota) o.fail("sort n=" + std::to_string(n));
  }
  o.note("sort n = 1..12 equals the host-sorted input 0..n-1");

  for (std::int64_t n = 0; n <= 40; ++n) {
    // direct recurrence: F(0) = 0, F(1) = 1, F(k) = F(k-1) + F(k-2)
    std::vector<std::int64_t> f{0, 1};
    while (static_cast<std::int64_t>(f.size()) < n + 3) f.push_back(f[f.size() - 1] + f[f.size() - 2]);
    auto lp = load_program(get_program("fib", Variant::WeakLinear, n));
    auto r = run_program(lp);
    bool ok = r.status == RunStatus::Terminal;
    if (ok) {
      const Value* v = r.final.store.find(r.final.control->as<node::Var>()->name);
      auto t = v ? std::get_if<pre::TupleCells>(&v->pre) : nullptr;
      ok = t && t->items.size() == 3 && int_in(r.final.store, t->items[0]) == std::int64_t{0} &&
           int_in(r.final.store, t->items[1]) == f[n + 1] &&
           int_in(r.final.store, t->items[2]) == f[n + 2];
    }
    if (!ok) o.fail("fib n=" + std::to_string(n));
  }
  o.note("fib n = 0..40: result <0, F(n+1), F(n+2)>");
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 3) {
    std::cerr << "usage: " << argv[0] << " <wlt-cli> <corpus-dir> [--expect-fail N]...\n";
    return 2;
  }
  g_cli = argv[1];
  g_corpus = argv[2];
  std::set<int> expected_failures;
  for (int i = 3; i + 1 < argc; i += 2)
    if (std::string(argv[i]) == "--expect-fail") expected_failures.insert(std::atoi(argv[i + 1]));

  Sweep sweep;
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"corpus programs are well typed", corpus_well_typed},
      {"counterexample rejected", counterexample_rejected},
      {"preservation over corpus traces",
       [&] {
         sweep = preservation_sweep();
         return preservation(sweep);
       }},
      {"progress over traces and generated configurations", [&] { return progress(sweep); }},
      {"mutants detected", mutation_sensitivity},
      {"growth degrees", growth_degrees},
      {"split relations agree with rule enumeration", split_oracle},
      {"functional oracles", functional_oracles},
  };

  std::set<int> failures;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    int id = static_cast<int>(i) + 1;
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    if (!o.pass) failures.insert(id);
    std::cout << "criterion " << id << ": " << (o.pass ? "PASS" : "FAIL") << "  "
              << criteria[i].first << " (" << std::fixed << std::setprecision(2)
              << seconds_since(t0) << " s)\n";
    for (const auto& n : o.notes) std::cout << n << "\n";
    std::cout.flush();
  }
  if (failures != expected_failures) {
    std::cout << "failing criteria differ from the expected set\n";
    return 1;
  }
  if (!failures.empty()) std::cout << "all failures are the expected ones\n";
  return 0;
}
