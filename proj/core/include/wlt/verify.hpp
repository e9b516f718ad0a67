#pragma once

// Store typing, configuration typing, program loading, and the executable
// preservation and progress suites.
//
// ⊢ S : Π is relational: each li base constant may enter Π as li or as hi.
// config_check first tries the assignment suggested by a syntactic scan
// (hi when every later reference is a hidden operator argument) and then
// falls back to enumerating assignments, up to a fixed cap.

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "wlt/machine.hpp"
#include "wlt/surface.hpp"
#include "wlt/typing.hpp"

namespace wlt {

struct VerifyOptions {
  CheckOptions check;
  /// Declared types of store cells. Needed for un closures that refer to
  /// themselves.
  std::map<std::string, Type> hints;
  /// The fallback search stops after 2^cap_log2 li/hi assignments.
  unsigned cap_log2 = 12;
};

struct ConfigReport {
  bool ok = false;
  /// The fallback search hit its cap; never counted as success.
  bool inconclusive = false;
  /// Π, in store order.
  TypeContext context;
  std::optional<Type> type;
  ExprPtr elaborated;
  /// (cell, consumer): consumer is a later cell, or "" for the control.
  std::vector<std::pair<std::string, std::string>> consumers;
  std::optional<Diagnostic> diagnostic;
  /// Store cell whose value failed to type, or "" when the control failed.
  std::string failing_cell;
  std::uint64_t assignments_tried = 0;
};

/// ⊢ (S, e): there exists Π with ⊢ S : Π and Π ⊢ e : T.
ConfigReport config_check(const Configuration& c, const QualifiedSignature& sig,
                          const VerifyOptions& opts = {});

/// ⊢ S : Π for the given Π. A cell absent from Π must have been consumed by
/// a later cell; a cell bound hi in Π must be a li base constant.
bool store_typing_check(const Store& s, const TypeContext& ctx, const QualifiedSignature& sig,
                        const VerifyOptions& opts = {});

/// Checks the verifier's own decomposition of a store typing: every li
/// non-base cell has at most one consumer, and every hi entry of Π sits on
/// a li base constant. Returns a description of the first failure.
std::optional<std::string> decomposition_invariants(const Store& s, const ConfigReport& r);

// ---------------------------------------------------------------------------
// Loading

class LoadError : public std::runtime_error {
 public:
  LoadError(std::string stage, Diagnostic d);
  std::string stage;  // "store x", "setup x" or "main"
  Diagnostic diagnostic;
};

struct LoadOptions {
  /// Skip typing; operators resolve to their first candidate.
  bool unsafe = false;
  std::uint64_t setup_fuel = 1'000'000;
  CheckOptions check;
};

struct LoadedProgram {
  std::shared_ptr<const QualifiedSignature> signature;
  Configuration initial;
  std::map<std::string, Type> hints;
  /// Report of the initial configuration (empty when unsafe).
  ConfigReport report;
  std::uint64_t setup_steps = 0;
};

/// Builds the initial configuration. Value entries are typed and allocated
/// under their own names; setup entries are checked, run, and their result
/// cell renamed to the entry name. Throws LoadError.
LoadedProgram load_program(const ProgramFile& p, const LoadOptions& opts = {});

// ---------------------------------------------------------------------------
// Suites

struct Violation {
  std::uint64_t step = 0;
  std::string rule;
  std::string message;
};

struct PreservationReport {
  std::string program;
  std::int64_t n = 0;
  bool started = false;
  std::uint64_t steps_checked = 0;
  RunStatus status = RunStatus::Terminal;
  std::optional<Violation> violation;

  bool passed() const { return started && !violation; }
  std::string record() const;
};

/// Configuration reached during a run, kept for the progress suite.
struct PoolEntry {
  std::shared_ptr<const QualifiedSignature> signature;
  Configuration config;
  std::map<std::string, Type> hints;
  std::string origin;
};

struct SuiteOptions {
  std::uint64_t fuel = 1'000'000;
  MachineOptions machine;
  VerifyOptions verify;
  /// When set, every non-terminal configuration of the trace is appended.
  std::vector<PoolEntry>* pool = nullptr;
};

/// Runs the machine and calls config_check after every step. Refuses to
/// start when the initial configuration does not check.
PreservationReport preservation_suite(const LoadedProgram& lp, const std::string& name,
                                      std::int64_t n, const SuiteOptions& opts = {});

struct ProgressReport {
  std::size_t checked = 0;
  std::size_t terminal_excluded = 0;
  /// Pool elements failing config_check (a broken precondition).
  std::size_t ill_typed = 0;
  std::size_t stuck = 0;
  std::optional<std::string> first_stuck;

  bool passed() const { return stuck == 0 && ill_typed == 0; }
  std::string record() const;
};

/// Asserts that no well-typed non-terminal configuration is stuck. With
/// `recheck` off the pool is trusted to be well typed.
ProgressReport progress_suite(const std::vector<PoolEntry>& pool, bool recheck = true,
                              const VerifyOptions& opts = {});

/// Signature shared by generated configurations.
std::shared_ptr<const QualifiedSignature> generator_signature();

/// Seeded random configurations of control depth at most `max_depth` that
/// pass config_check. Deterministic in the seed.
std::vector<PoolEntry> generate_configurations(std::uint64_t seed, std::size_t count,
                                               std::size_t max_depth = 4);

}  // namespace wlt
