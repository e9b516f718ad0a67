// wlt: check, run, profile and meta-test weak-linear programs.

#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <future>
#include <iomanip>
#include <iostream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "wlt/corpus.hpp"
#include "wlt/profile.hpp"
#include "wlt/verify.hpp"

namespace {

using namespace wlt;

constexpr int kOk = 0;
constexpr int kFail = 1;
constexpr int kUsage = 2;

enum class Format { Text, Records };

struct Common {
  std::string format = "text";
  Format fmt() const { return format == "records" ? Format::Records : Format::Text; }
};

std::uint64_t default_fuel() {
  if (const char* env = std::getenv("WLT_FUEL")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      std::cerr << "ignoring malformed WLT_FUEL='" << env << "'\n";
    }
  }
  return 1'000'000;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ParamOverrides parse_params(const std::vector<std::string>& raw) {
  ParamOverrides out;
  for (const auto& p : raw) {
    auto eq = p.find('=');
    if (eq == std::string::npos || eq == 0)
      throw std::runtime_error("--param expects name=value, got '" + p + "'");
    try {
      out[p.substr(0, eq)] = std::stoll(p.substr(eq + 1));
    } catch (const std::exception&) {
      throw std::runtime_error("--param value for '" + p.substr(0, eq) + "' is not an integer");
    }
  }
  return out;
}

// Follows tuple and cons cells so results read as data.
std::string render(const Store& s, const std::string& x, int depth = 0) {
  const Value* v = s.find(x);
  if (!v) return x + "?";
  if (depth > 8) return x;
  std::string q(to_string(v->qual));
  if (auto t = std::get_if<pre::TupleCells>(&v->pre)) {
    std::string out = q + " <";
    for (std::size_t i = 0; i < t->items.size(); ++i)
      out += (i ? ", " : "") + render(s, t->items[i], depth + 1);
    return out + ">";
  }
  if (auto c = std::get_if<pre::ConsCell>(&v->pre))
    return q + " (" + render(s, c->head, depth + 1) + " : " + render(s, c->tail, depth + 1) + ")";
  return to_string(*v);
}

void print_diagnostic(const std::string& stage, const Diagnostic& d, Format f) {
  if (f == Format::Records) {
    auto j = nlohmann::json::parse(d.record());
    j["stage"] = stage;
    j["verdict"] = "fail";
    std::cout << j.dump() << "\n";
  } else {
    std::cout << "error in " << stage << ": " << d.text() << "\n";
  }
}

// ---------------------------------------------------------------------------
// check

struct CheckArgs {
  std::string path;
  std::vector<std::string> params;
  bool explain = false;
  std::string mutant;
};

int cmd_check(const CheckArgs& a, const Common& c) {
  ProgramFile p;
  try {
    p = parse_program(read_file(a.path), parse_params(a.params));
  } catch (const std::exception& e) {
    std::cerr << a.path << ": " << e.what() << "\n";
    return kUsage;
  }
  LoadOptions lo;
  if (a.mutant == "operator-pseudosplit") lo.check.operator_pseudosplit = true;
  LoadedProgram lp;
  try {
    lp = load_program(p, lo);
  } catch (const LoadError& e) {
    print_diagnostic(e.stage, e.diagnostic, c.fmt());
    return kFail;
  }
  const ConfigReport& r = lp.report;
  if (c.fmt() == Format::Records) {
    nlohmann::json j{{"path", a.path},
                     {"verdict", "pass"},
                     {"type", to_string(*r.type)},
                     {"context", to_string(r.context)},
                     {"setup_steps", lp.setup_steps}};
    std::cout << j.dump() << "\n";
    return kOk;
  }
  std::cout << "ok: main : " << to_string(*r.type) << "\n";
  if (a.explain) {
    std::cout << "Π:\n";
    for (const auto& [x, t] : r.context.bindings()) std::cout << "  " << x << " : " << to_string(t) << "\n";
    for (const auto& [cell, by] : r.consumers)
      std::cout << "  " << cell << " consumed by " << (by.empty() ? "main" : by) << "\n";
    VerifyOptions vo;
    vo.check = lo.check;
    vo.hints = lp.hints;
    Typed t = Checker(*lp.signature, lo.check).check(r.context, lp.initial.control);
    std::cout << "derivation of main:\n" << to_string(reconstruct(r.context, t), 1);
  }
  return kOk;
}

// ---------------------------------------------------------------------------
// run

struct RunArgs {
  std::string path;
  std::vector<std::string> params;
  std::uint64_t fuel = 0;
  bool trace = false;
  bool unsafe = false;
};

int cmd_run(const RunArgs& a, const Common& c) {
  ProgramFile p;
  try {
    p = parse_program(read_file(a.path), parse_params(a.params));
  } catch (const std::exception& e) {
    std::cerr << a.path << ": " << e.what() << "\n";
    return kUsage;
  }
  LoadOptions lo;
  lo.unsafe = a.unsafe;
  LoadedProgram lp;
  try {
    lp = load_program(p, lo);
  } catch (const LoadError& e) {
    print_diagnostic(e.stage, e.diagnostic, c.fmt());
    return kFail;
  }
  Machine m(*lp.signature);
  RunOptions ro;
  ro.fuel = a.fuel;
  if (a.trace)
    ro.observer = [&](std::uint64_t step, const Configuration&, const StepInfo& info) {
      std::cout << (c.fmt() == Format::Records ? trace_record(step, info) : trace_line(step, info))
                << "\n";
    };
  RunResult r = m.run(lp.initial, ro);
  bool ok = r.status == RunStatus::Terminal;
  if (c.fmt() == Format::Records) {
    nlohmann::json j{{"path", a.path},
                     {"status", std::string(to_string(r.status))},
                     {"steps", r.steps},
                     {"store_cells", r.final.store.size()},
                     {"store_size", live_size(r.final.store)},
                     {"verdict", ok ? "pass" : "fail"}};
    if (ok) {
      const std::string& x = r.final.control->as<node::Var>()->name;
      j["variable"] = x;
      j["value"] = render(r.final.store, x);
    } else if (!r.stuck_reason.empty()) {
      j["reason"] = r.stuck_reason;
    }
    std::cout << j.dump() << "\n";
  } else if (ok) {
    const std::string& x = r.final.control->as<node::Var>()->name;
    std::cout << "terminal " << x << " = " << render(r.final.store, x) << "\n"
              << "steps " << r.steps << ", store cells " << r.final.store.size()
              << ", locations " << live_size(r.final.store) << "\n";
  } else {
    std::cout << to_string(r.status) << " after " << r.steps << (r.steps == 1 ? " step" : " steps");
    if (r.status == RunStatus::Stuck)
      std::cout << " at " << to_string(r.stuck_redex) << ": " << r.stuck_reason;
    std::cout << "\n";
  }
  return ok ? kOk : kFail;
}

// ---------------------------------------------------------------------------
// profile

struct ProfileArgs {
  std::string program;
  std::string variant = "weak-linear";
  std::vector<std::int64_t> ns;
  std::uint64_t fuel = 0;
};

int cmd_profile(const ProfileArgs& a, const Common& c) {
  auto v = parse_variant(a.variant);
  if (!v) {
    std::cerr << "unknown variant '" << a.variant << "'\n";
    return kUsage;
  }
  GrowthReport rep;
  try {
    const CorpusEntry& e = corpus_entry(a.program, *v);
    rep = growth_experiment(a.program, *v, a.ns.empty() ? e.default_ns : a.ns,
                            std::max<std::uint64_t>(a.fuel, 1));
  } catch (const GrowthError& e) {
    std::cout << e.what() << "\n";
    return kFail;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return kUsage;
  }
  if (c.fmt() == Format::Records)
    for (const auto& r : rep.records()) std::cout << r << "\n";
  else
    std::cout << rep.table();
  return rep.matches() ? kOk : kFail;
}

// ---------------------------------------------------------------------------
// meta

struct MetaArgs {
  bool preservation = false;
  bool progress = false;
  std::uint64_t fuel = 0;
  std::uint64_t seed = 1;
  std::size_t count = 1000;
  std::size_t depth = 4;
  std::int64_t max_n = 16;
  std::string mutant;
};

struct SweepItem {
  std::string name;
  std::string variant;
  std::int64_t n;
  std::optional<ProgramFile> program;
};

int cmd_meta(const MetaArgs& a, const Common& c) {
  bool pres = a.preservation || !a.progress;
  bool prog = a.progress || !a.preservation;
  SuiteOptions so;
  so.fuel = a.fuel;
  LoadOptions lo;
  if (a.mutant == "store-qualifier-dealloc") {
    so.machine.mutant = Mutant::StoreQualifierDealloc;
  } else if (a.mutant == "operator-pseudosplit") {
    so.verify.check.operator_pseudosplit = true;
    lo.check.operator_pseudosplit = true;
  } else if (!a.mutant.empty() && a.mutant != "none") {
    std::cerr << "unknown mutant '" << a.mutant << "'\n";
    return kUsage;
  }

  std::vector<SweepItem> items;
  try {
    for (const auto& e : corpus()) {
      std::int64_t top = e.name == "sort" ? std::min<std::int64_t>(a.max_n, 8) : a.max_n;
      for (std::int64_t n = e.min_n; n <= top; ++n)
        items.push_back({e.name, std::string(to_string(e.variant)), n,
                         get_program(e.name, e.variant, n)});
    }
    items.push_back({"counterexample", "weak-linear", 0, parse_program(counterexample_source())});
  } catch (const std::exception& e) {
    std::cerr << "setup failed: " << e.what() << "\n";
    return kUsage;
  }

  struct Outcome {
    PreservationReport report;
    std::vector<PoolEntry> pool;
    bool rejected = false;
    std::string why;
  };
  auto one = [&](const SweepItem& it) {
    Outcome o;
    o.report.program = it.name + "." + it.variant;
    o.report.n = it.n;
    LoadedProgram lp;
    try {
      lp = load_program(*it.program, lo);
    } catch (const LoadError& e) {
      o.rejected = true;
      o.why = e.what();
      return o;
    }
    SuiteOptions local = so;
    local.pool = prog ? &o.pool : nullptr;
    o.report = preservation_suite(lp, it.name + "." + it.variant, it.n, local);
    return o;
  };
  std::vector<std::future<Outcome>> jobs;
  for (const auto& it : items) jobs.push_back(std::async(std::launch::async, one, std::cref(it)));

  bool failed = false;
  std::size_t programs = 0, steps = 0, violations = 0;
  std::vector<PoolEntry> pool;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    Outcome o = jobs[i].get();
    bool witness = items[i].name == "counterexample";
    bool pass;
    std::string verdict;
    if (o.rejected) {
      // A sound checker must reject the counterexample; corpus programs must load.
      pass = witness;
      verdict = witness ? "rejected (expected)" : "load failed: " + o.why;
    } else {
      pass = o.report.passed();
      verdict = pass ? "pass" : "violation";
      if (o.report.violation)
        verdict += " at step " + std::to_string(o.report.violation->step) + " (" +
                   o.report.violation->rule + "): " + o.report.violation->message;
    }
    ++programs;
    steps += o.report.steps_checked;
    if (!pass) {
      failed = true;
      ++violations;
    }
    if (pres) {
      if (c.fmt() == Format::Records) {
        auto j = nlohmann::json::parse(o.report.record());
        j["program"] = items[i].name;
        j["variant"] = items[i].variant;
        j["verdict"] = pass ? "pass" : "fail";
        if (o.rejected) j["rejected"] = o.why;
        std::cout << j.dump() << "\n";
      } else if (!pass || a.max_n <= 4) {
        std::cout << std::left << std::setw(16) << items[i].name << std::setw(14)
                  << items[i].variant << std::right << std::setw(4) << items[i].n << "  "
                  << verdict << "\n";
      }
    }
    for (auto& p : o.pool) pool.push_back(std::move(p));
  }
  if (pres && c.fmt() == Format::Text)
    std::cout << "preservation: " << programs << " runs, " << steps << " steps checked, "
              << violations << " failing\n";

  if (prog) {
    auto generated = generate_configurations(a.seed, a.count, a.depth);
    if (generated.size() < a.count) {
      std::cerr << "generator produced only " << generated.size() << " configurations\n";
      failed = true;
    }
    ProgressReport traces = progress_suite(pool, false, so.verify);
    ProgressReport gen = progress_suite(generated, true, so.verify);
    if (!traces.passed() || !gen.passed()) failed = true;
    if (c.fmt() == Format::Records) {
      auto t = nlohmann::json::parse(traces.record());
      t["pool"] = "traces";
      auto g = nlohmann::json::parse(gen.record());
      g["pool"] = "generated";
      g["seed"] = a.seed;
      std::cout << t.dump() << "\n" << g.dump() << "\n";
    } else {
      std::cout << "progress: traces " << traces.checked << " configurations, " << traces.stuck
                << " stuck; generated " << gen.checked << " (seed " << a.seed << ", depth <= "
                << a.depth << "), " << gen.stuck << " stuck, " << gen.ill_typed << " ill-typed\n";
      if (traces.first_stuck) std::cout << "  first stuck: " << *traces.first_stuck << "\n";
      if (gen.first_stuck) std::cout << "  first stuck: " << *gen.first_stuck << "\n";
    }
  }
  if (c.fmt() == Format::Text) std::cout << (failed ? "FAIL" : "PASS") << "\n";
  return failed ? kFail : kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weak-linear language toolkit: type checking, evaluation, profiling, metatheory tests"};
  app.require_subcommand(1);
  app.fallthrough();
  Common common;
  app.add_option("--format", common.format, "Output format")
      ->check(CLI::IsMember({"text", "records"}))
      ->capture_default_str();

  CheckArgs ca;
  auto* check = app.add_subcommand("check", "Type-check a program file (exit 1 on a typing error)");
  check->add_option("path", ca.path, "Program file")->required();
  check->add_option("--param", ca.params, "Override a parameter, name=value");
  check->add_flag("--explain", ca.explain, "Print the reconstructed context and derivation");
  check->add_option("--mutant", ca.mutant, "Checker mutant")
      ->check(CLI::IsMember({"none", "operator-pseudosplit"}));

  RunArgs ra;
  ra.fuel = default_fuel();
  auto* run = app.add_subcommand("run", "Evaluate a program (exit 1 when stuck or out of fuel)");
  run->add_option("path", ra.path, "Program file")->required();
  run->add_option("--param", ra.params, "Override a parameter, name=value");
  run->add_option("--fuel", ra.fuel, "Step limit (default: $WLT_FUEL or 1000000)");
  run->add_flag("--trace", ra.trace, "Print every step");
  run->add_flag("--unsafe", ra.unsafe, "Skip type checking");

  ProfileArgs pa;
  pa.fuel = 10 * default_fuel();
  auto* profile = app.add_subcommand("profile", "Memory-balance growth of a corpus program");
  profile->add_option("--program", pa.program, "fib, mapa, map or sort")->required();
  profile->add_option("--variant", pa.variant, "weak-linear or unrestricted")->capture_default_str();
  profile->add_option("--ns", pa.ns, "Parameter values, e.g. 4,8,16,32")->delimiter(',');
  profile->add_option("--fuel", pa.fuel, "Step limit per run");

  MetaArgs ma;
  ma.fuel = default_fuel();
  auto* meta = app.add_subcommand("meta", "Preservation and progress suites over the corpus");
  meta->add_flag("--preservation", ma.preservation, "Run the preservation suite");
  meta->add_flag("--progress", ma.progress, "Run the progress suite");
  meta->add_option("--fuel", ma.fuel, "Step limit per run");
  meta->add_option("--seed", ma.seed, "Seed of generated configurations")->capture_default_str();
  meta->add_option("--count", ma.count, "Generated configurations")->capture_default_str();
  meta->add_option("--depth", ma.depth, "Depth bound of generated controls")->capture_default_str();
  meta->add_option("--max-n", ma.max_n, "Largest n swept (sort stops at 8)")->capture_default_str();
  meta->add_option("--mutant", ma.mutant, "Behaviour switch")
      ->check(CLI::IsMember({"none", "store-qualifier-dealloc", "operator-pseudosplit"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }
  try {
    if (*check) return cmd_check(ca, common);
    if (*run) return cmd_run(ra, common);
    if (*profile) return cmd_profile(pa, common);
    if (*meta) return cmd_meta(ma, common);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
