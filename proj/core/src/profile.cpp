#include "wlt/profile.hpp"

#include <algorithm>
#include <future>
#include <iomanip>
#include <nlohmann/json.hpp>
#include <numeric>
#include <sstream>

namespace wlt {

void BalanceLedger::record(std::uint64_t step, std::int64_t delta, std::string cell) {
  events_.push_back({step, delta, std::move(cell)});
  balance_ += delta;
  peak_ = std::max(peak_, balance_);
  if (step == 0) initial_ = balance_;
}

bool BalanceLedger::has_deallocation() const {
  return std::any_of(events_.begin(), events_.end(), [](const auto& e) { return e.delta < 0; });
}

std::int64_t live_size(const Store& s) {
  std::int64_t total = 0;
  for (const auto& [_, v] : s.cells()) total += size_of(v);
  return total;
}

InstrumentedRun instrumented_run(const LoadedProgram& lp, std::uint64_t fuel, MachineOptions mopts) {
  InstrumentedRun out;
  for (const auto& [x, v] : lp.initial.store.cells()) out.ledger.record(0, size_of(v), x);
  Machine m(*lp.signature, PrimitiveTable::standard(), mopts);
  RunOptions ro;
  ro.fuel = fuel;
  BalanceLedger& ledger = out.ledger;
  ro.observer = [&ledger](std::uint64_t step, const Configuration&, const StepInfo& info) {
    for (const auto& [x, v] : info.freed) ledger.record(step, -size_of(v), x);
    for (const auto& [x, v] : info.allocated) ledger.record(step, size_of(v), x);
  };
  out.result = m.run(lp.initial, ro);
  return out;
}

InstrumentedRun instrumented_run(const ProgramFile& p, std::uint64_t fuel) {
  return instrumented_run(load_program(p), fuel);
}

// ---------------------------------------------------------------------------
// Degrees

namespace {

struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  static Rational make(std::int64_t n, std::int64_t d) {
    if (d < 0) n = -n, d = -d;
    std::int64_t g = std::gcd(n, d);
    if (g == 0) g = 1;
    return {n / g, d / g};
  }
  friend Rational operator-(Rational a, Rational b) {
    return make(a.num * b.den - b.num * a.den, a.den * b.den);
  }
  friend Rational operator/(Rational a, std::int64_t k) { return make(a.num, a.den * k); }
  friend bool operator==(Rational a, Rational b) { return a.num == b.num && a.den == b.den; }
};

}  // namespace

int detect_degree(const std::vector<std::int64_t>& xs, const std::vector<std::int64_t>& ys) {
  if (xs.empty() || xs.size() != ys.size())
    throw std::invalid_argument("degree detection needs matching, non-empty samples");
  for (std::size_t i = 1; i < xs.size(); ++i)
    if (xs[i] <= xs[i - 1]) throw std::invalid_argument("sample points must increase strictly");
  std::vector<Rational> d;
  for (auto y : ys) d.push_back(Rational::make(y, 1));
  for (int k = 0;; ++k) {
    if (std::all_of(d.begin(), d.end(), [&](const Rational& r) { return r == d.front(); }))
      return k;
    std::vector<Rational> next;
    for (std::size_t i = 0; i + 1 < d.size(); ++i)
      next.push_back((d[i + 1] - d[i]) / (xs[i + k + 1] - xs[i]));
    d = std::move(next);
  }
}

GrowthError::GrowthError(std::int64_t n_, const std::string& what)
    : std::runtime_error("run at n = " + std::to_string(n_) + " failed: " + what), n(n_) {}

GrowthReport growth_experiment(const std::string& program, Variant variant,
                               const std::vector<std::int64_t>& ns, std::uint64_t fuel) {
  if (ns.size() < 4) throw std::invalid_argument("growth experiments need at least 4 points");
  for (std::size_t i = 0; i < ns.size(); ++i) {
    if (ns[i] < 2) throw std::invalid_argument("growth experiment points must be >= 2");
    if (i && ns[i] <= ns[i - 1]) throw std::invalid_argument("points must increase strictly");
  }
  const CorpusEntry& entry = corpus_entry(program, variant);
  GrowthReport rep;
  rep.program = entry.name;
  rep.variant = variant;
  rep.expected_degree = entry.expected_degree;

  auto one = [&](std::int64_t n) {
    InstrumentedRun r;
    try {
      r = instrumented_run(load_program(get_program(program, variant, n)), fuel);
    } catch (const std::exception& e) {
      throw GrowthError(n, e.what());
    }
    if (r.result.status != RunStatus::Terminal)
      throw GrowthError(n, std::string(to_string(r.result.status)) + " " + r.result.stuck_reason);
    return GrowthRow{n, r.ledger.run_balance(), r.ledger.final_balance(), r.ledger.peak_balance(),
                     r.result.steps};
  };
  std::vector<std::future<GrowthRow>> jobs;
  for (auto n : ns) jobs.push_back(std::async(std::launch::async, one, n));
  std::vector<std::int64_t> ys;
  for (auto& j : jobs) {
    rep.rows.push_back(j.get());
    ys.push_back(rep.rows.back().balance);
  }
  rep.degree = detect_degree(ns, ys);
  return rep;
}

std::string GrowthReport::table() const {
  std::ostringstream out;
  out << std::left << std::setw(8) << "program" << std::setw(14) << "variant" << std::right
      << std::setw(6) << "n" << std::setw(10) << "C(n)" << std::setw(10) << "final"
      << std::setw(10) << "peak" << std::setw(10) << "steps" << "\n";
  for (const auto& r : rows)
    out << std::left << std::setw(8) << program << std::setw(14) << to_string(variant)
        << std::right << std::setw(6) << r.n << std::setw(10) << r.balance << std::setw(10)
        << r.final_balance << std::setw(10) << r.peak << std::setw(10) << r.steps << "\n";
  out << "detected degree " << degree << ", expected " << expected_degree
      << (matches() ? "" : "  MISMATCH") << "\n";
  return out.str();
}

std::vector<std::string> GrowthReport::records() const {
  std::vector<std::string> out;
  for (const auto& r : rows)
    out.push_back(nlohmann::json{{"program", program},
                                 {"variant", std::string(to_string(variant))},
                                 {"n", r.n},
                                 {"balance", r.balance},
                                 {"final", r.final_balance},
                                 {"peak", r.peak},
                                 {"steps", r.steps},
                                 {"degree", degree}}
                      .dump());
  out.push_back(nlohmann::json{{"program", program},
                               {"variant", std::string(to_string(variant))},
                               {"degree", degree},
                               {"expected_degree", expected_degree},
                               {"verdict", matches() ? "pass" : "fail"}}
                    .dump());
  return out;
}

}  // namespace wlt
