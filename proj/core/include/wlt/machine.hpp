#pragma once

// Store-based small-step machine with explicit deallocation.
//
// The machine works on elaborated expressions: every operator node carries
// its signature entry and type. Cells allocated by the machine are named
// v0, v1, ... from a counter kept in the store; source programs cannot use
// those names.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "wlt/syntax.hpp"

namespace wlt {

namespace pre {
struct TupleCells {
  std::vector<std::string> items;
};
struct Closure {
  std::string param;
  Type param_type;
  ExprPtr body;
};
struct NilCell {
  std::optional<Type> element;
};
struct ConsCell {
  std::string head;
  std::string tail;
};
}  // namespace pre

using Prevalue = std::variant<Constant, pre::TupleCells, pre::Closure, pre::NilCell, pre::ConsCell>;

struct Value {
  Qualifier qual = Qualifier::Un;
  Prevalue pre;
};

bool operator==(const Value& a, const Value& b);
std::string to_string(const Prevalue& w);
std::string to_string(const Value& v);

/// Value denoted by a value expression (an elaborated literal, tuple of
/// variables, closure, nil or cons of variables).
Value value_of(const ExprPtr& e);
/// Inverse of value_of, up to spans.
ExprPtr expr_of(const Value& v);

/// Memory locations a value occupies: 1 for everything except arrays, which
/// count their length (at least 1).
std::int64_t size_of(const Value& v);

/// Ordered cells with pairwise distinct names.
class Store {
 public:
  using Cell = std::pair<std::string, Value>;

  const Value* find(const std::string& x) const;
  bool contains(const std::string& x) const { return find(x) != nullptr; }

  /// Throws std::invalid_argument if x is already bound.
  void push(const std::string& x, Value v);
  /// Returns false if x is unbound.
  bool erase(const std::string& x);
  /// Renames a cell in place. Throws std::invalid_argument on a clash or a
  /// missing cell.
  void rename(const std::string& from, const std::string& to);

  /// Next machine name; does not reserve it.
  std::string fresh() const { return "v" + std::to_string(next_); }
  /// Allocates a fresh cell and returns its name.
  std::string allocate(Value v);

  std::vector<Cell> cells() const;
  std::size_t size() const { return index_.size(); }
  bool empty() const { return index_.empty(); }
  std::uint64_t counter() const { return next_; }

  friend bool operator==(const Store& a, const Store& b);

 private:
  void compact();

  std::vector<std::optional<Cell>> slots_;
  std::unordered_map<std::string, std::size_t> index_;
  std::uint64_t next_ = 0;
};

std::string to_string(const Store& s);

class MachineError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// S ∼ϱ₁..ϱₙ x₁..xₙ, folded left to right. Removed cells are appended to
/// `removed` when given. Throws MachineError on li-removal of an unbound
/// variable.
Store dealloc(Store s, const std::vector<PseudoQualifier>& quals,
              const std::vector<std::string>& vars,
              std::vector<Store::Cell>* removed = nullptr);

struct Configuration {
  Store store;
  ExprPtr control;
};

bool is_terminal(const Configuration& c);

// ---------------------------------------------------------------------------
// Evaluation contexts

/// One step down an evaluation context: the hole is child `slot` of `node`.
/// Slots: operator and tuple positions; application 0 = function, 1 =
/// argument; cons 0 = head, 1 = tail; scrutinee/bound position 0 otherwise.
struct Frame {
  ExprPtr node;
  std::size_t slot = 0;
};

struct EvalContext {
  std::vector<Frame> frames;  // outermost first
  ExprPtr plug(ExprPtr e) const;
  bool is_hole() const { return frames.empty(); }
};

struct Decomposition {
  EvalContext context;
  ExprPtr redex;
};

/// e = E[r] with r a β-node, or nullopt when e is a variable.
std::optional<Decomposition> decompose(const ExprPtr& e);

bool is_value_expr(const ExprPtr& e);
bool is_beta_node(const ExprPtr& e);

// ---------------------------------------------------------------------------
// Primitives

class PrimitiveError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Primitive = std::function<Prevalue(const std::vector<Prevalue>&)>;

class PrimitiveTable {
 public:
  /// add sub mul div mod eq ne lt le gt ge not and or id is_zero get set
  /// size proj1 proj2.
  static const PrimitiveTable& standard();

  void add(std::string key, Primitive f);
  const Primitive* find(const std::string& key) const;
  bool contains(const std::string& key) const { return find(key) != nullptr; }

 private:
  std::map<std::string, Primitive> table_;
};

// ---------------------------------------------------------------------------
// Stepping

enum class Mutant : std::uint8_t {
  None,
  /// Deallocate operator inputs by their store qualifier instead of τ.
  StoreQualifierDealloc,
};

struct MachineOptions {
  Mutant mutant = Mutant::None;
};

struct StepInfo {
  std::string rule;  // eva eop eif esp efu ele eca
  ExprPtr redex;
  std::vector<Store::Cell> allocated;
  std::vector<Store::Cell> freed;
};

struct Stepped {
  Configuration next;
  StepInfo info;
};
struct Terminal {
  std::string variable;
};
struct Stuck {
  ExprPtr redex;
  std::string reason;
};

using StepOutcome = std::variant<Stepped, Terminal, Stuck>;

enum class RunStatus : std::uint8_t { Terminal, FuelExhausted, Stuck };
std::string_view to_string(RunStatus s);

struct RunResult {
  RunStatus status = RunStatus::Terminal;
  Configuration final;
  std::uint64_t steps = 0;
  std::vector<StepInfo> trace;  // only when requested
  std::string stuck_reason;
  ExprPtr stuck_redex;
};

/// Called after every successful step with the configuration reached.
using StepObserver = std::function<void(std::uint64_t step, const Configuration& next,
                                        const StepInfo& info)>;

struct RunOptions {
  std::uint64_t fuel = 1'000'000;
  bool record_trace = false;
  StepObserver observer;
};

class Machine {
 public:
  explicit Machine(const QualifiedSignature& sig,
                   const PrimitiveTable& prims = PrimitiveTable::standard(),
                   MachineOptions opts = {});

  /// Requires a β-node as control. Throws MachineError on a failed premise.
  Stepped beta_step(const Configuration& c) const;
  StepOutcome step(const Configuration& c) const;
  RunResult run(Configuration c, const RunOptions& opts = {}) const;

  const QualifiedSignature& signature() const { return sig_; }

 private:
  const QualifiedSignature& sig_;
  const PrimitiveTable& prims_;
  MachineOptions opts_;
};

// ---------------------------------------------------------------------------
// Trace rendering

/// `step#, rule, redex, +alloc(size), -dealloc(size)`.
std::string trace_line(std::uint64_t step, const StepInfo& info);
/// One JSON object per step with fields step, rule, redex, alloc, dealloc.
std::string trace_record(std::uint64_t step, const StepInfo& info);

/// Resolves every unannotated operator to its first candidate by name and
/// arity, without typing. Used only to run unchecked programs.
ExprPtr resolve_operators_naively(const QualifiedSignature& sig, const ExprPtr& e);

}  // namespace wlt
