#pragma once

// Memory balance of a run: locations allocated minus locations freed, with
// arrays weighted by length and every other value (closures included)
// counting 1.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "wlt/corpus.hpp"
#include "wlt/machine.hpp"
#include "wlt/verify.hpp"

namespace wlt {

struct BalanceEvent {
  std::uint64_t step;  // 0 for cells of the initial store
  std::int64_t delta;  // +size or -size
  std::string cell;
};

class BalanceLedger {
 public:
  void record(std::uint64_t step, std::int64_t delta, std::string cell);

  const std::vector<BalanceEvent>& events() const { return events_; }
  /// Σ(+size) − Σ(−size) over every event.
  std::int64_t final_balance() const { return balance_; }
  std::int64_t peak_balance() const { return peak_; }
  /// Balance after the step-0 events.
  std::int64_t initial_balance() const { return initial_; }
  /// final − initial: what the run itself allocated and did not free.
  std::int64_t run_balance() const { return balance_ - initial_; }
  bool has_deallocation() const;

 private:
  std::vector<BalanceEvent> events_;
  std::int64_t balance_ = 0;
  std::int64_t peak_ = 0;
  std::int64_t initial_ = 0;
};

/// Σ size_of over the store's cells.
std::int64_t live_size(const Store& s);

struct InstrumentedRun {
  BalanceLedger ledger;
  RunResult result;
};

InstrumentedRun instrumented_run(const LoadedProgram& lp, std::uint64_t fuel = 1'000'000,
                                 MachineOptions mopts = {});
/// Loads (throwing LoadError) and runs.
InstrumentedRun instrumented_run(const ProgramFile& p, std::uint64_t fuel = 1'000'000);

struct GrowthRow {
  std::int64_t n;
  std::int64_t balance;  // run balance C(n)
  std::int64_t final_balance;
  std::int64_t peak;
  std::uint64_t steps;
};

struct GrowthReport {
  std::string program;
  Variant variant;
  std::vector<GrowthRow> rows;
  /// Smallest k whose order-k divided differences over (n, C(n)) are all
  /// equal. With m points this is at most m − 1.
  int degree = 0;
  int expected_degree = 0;

  bool matches() const { return degree == expected_degree; }
  std::string table() const;
  std::vector<std::string> records() const;
};

class GrowthError : public std::runtime_error {
 public:
  GrowthError(std::int64_t n, const std::string& what);
  std::int64_t n;
};

/// Exact degree of a sampled integer sequence by divided differences.
/// Requires strictly increasing xs and at least one point.
int detect_degree(const std::vector<std::int64_t>& xs, const std::vector<std::int64_t>& ys);

/// Runs the corpus program at each n. Throws std::invalid_argument when ns
/// is not strictly increasing, has fewer than 4 points or a point below 2;
/// throws GrowthError when a run fails.
GrowthReport growth_experiment(const std::string& program, Variant variant,
                               const std::vector<std::int64_t>& ns,
                               std::uint64_t fuel = 10'000'000);

}  // namespace wlt
