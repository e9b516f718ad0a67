#pragma once

// Context split and pseudosplit, pseudotyping, and a usage-driven checker
// for the declarative typing rules.
//
// The checker walks an expression once and records, per free variable, how
// the expression uses it (UsageReport). Multi-premise rules merge the
// reports of their premises in evaluation order; the merge decides whether
// the sub-contexts form a split (operators) or a pseudosplit (everything
// else). A derivation with explicit contexts can be rebuilt from the
// annotated tree and re-validated against split_check / pseudosplit_check.

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "wlt/syntax.hpp"

namespace wlt {

// ---------------------------------------------------------------------------
// Relations on contexts

/// Π₁ ∘ ... ∘ Πₙ = Π. For n = 0 this is un(Π).
bool split_check(const std::vector<TypeContext>& parts, const TypeContext& whole);
/// Π₁ ⊔ ... ⊔ Πₙ = Π.
bool pseudosplit_check(const std::vector<TypeContext>& parts, const TypeContext& whole);

// ---------------------------------------------------------------------------
// Diagnostics and verdicts

struct Diagnostic {
  std::string rule;
  std::string variable;
  Span span;
  std::string message;

  std::string text() const;
  /// One-line JSON record with fields rule, variable, line, column, message.
  std::string record() const;
};

class TypeError : public std::runtime_error {
 public:
  explicit TypeError(Diagnostic d);
  Diagnostic diagnostic;
};

template <class T>
class Verdict {
 public:
  Verdict(T value) : v_(std::move(value)) {}
  Verdict(Diagnostic d) : v_(std::move(d)) {}

  bool ok() const { return v_.index() == 0; }
  explicit operator bool() const { return ok(); }
  const T& value() const { return std::get<0>(v_); }
  const T* operator->() const { return &value(); }
  const Diagnostic& diagnostic() const { return std::get<1>(v_); }

 private:
  std::variant<T, Diagnostic> v_;
};

// ---------------------------------------------------------------------------
// Usage reports

enum class Usage : std::uint8_t { Unused, Unrestricted, Hidden, Linear };
std::string_view to_string(Usage u);

struct VarUse {
  Usage usage = Usage::Unused;
  /// For linear uses: index of the premise that consumed the variable,
  /// relative to the innermost merge that saw it.
  std::optional<std::size_t> premise;
};

/// Variables in order of first occurrence.
class UsageReport {
 public:
  Usage get(const std::string& x) const;
  const VarUse* find(const std::string& x) const;
  void set(const std::string& x, VarUse u);
  void erase(const std::string& x);
  const std::vector<std::pair<std::string, VarUse>>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }

  friend bool operator==(const UsageReport& a, const UsageReport& b) {
    if (a.entries_.size() != b.entries_.size()) return false;
    for (std::size_t i = 0; i < a.entries_.size(); ++i)
      if (a.entries_[i].first != b.entries_[i].first ||
          a.entries_[i].second.usage != b.entries_[i].second.usage)
        return false;
    return true;
  }

 private:
  std::vector<std::pair<std::string, VarUse>> entries_;
};

enum class MergeRule : std::uint8_t {
  Split,        // ∘, operator arguments
  PseudoSplit,  // ⊔, every other multi-premise rule
  Branch,       // the shared context of if/case branches
};

/// Throws TypeError.
UsageReport merge_usages_or_throw(MergeRule rule, const std::vector<UsageReport>& ordered,
                                  Span where = {});
Verdict<UsageReport> merge_usages(MergeRule rule, const std::vector<UsageReport>& ordered);

// ---------------------------------------------------------------------------
// Checker

struct CheckOptions {
  /// Merge operator arguments with ⊔ instead of ∘ (a deliberately unsound
  /// variant, kept for mutation testing).
  bool operator_pseudosplit = false;
  /// Let closures read captured variables in hidden positions. Unsound: the
  /// captured cell can be freed before the closure runs.
  bool allow_hidden_capture = false;
};

/// Annotated result of checking one node.
struct Typed {
  ExprPtr expr;  // elaborated: every operator carries its entry and τ
  PseudoType type;
  UsageReport usage;
  std::string rule;
  std::vector<Typed> children;
  /// Bindings introduced for each child, in the same order as children.
  std::vector<std::vector<TypeContext::Binding>> binders;
  /// Merge applied to the children (ignored for leaves).
  MergeRule merge = MergeRule::PseudoSplit;
  /// For if/case: children[branch_from..] share one context.
  std::size_t branch_from = 0;
};

class Checker {
 public:
  explicit Checker(const QualifiedSignature& sig, CheckOptions opts = {});

  /// Π ⊢ e : T. On success every li binding of Π is consumed exactly once
  /// and hi bindings are at most read. Throws TypeError.
  Typed check(const TypeContext& ctx, const ExprPtr& e) const;
  /// Π ⊩ e : ϱ B against an expected pseudotype (operator argument position).
  Typed check_pseudo(const TypeContext& ctx, const ExprPtr& e, const PseudoType& expected) const;

  const QualifiedSignature& signature() const { return sig_; }
  const CheckOptions& options() const { return opts_; }

 private:
  const QualifiedSignature& sig_;
  CheckOptions opts_;
};

struct TypeResult {
  Type type;
  UsageReport usage;
  ExprPtr elaborated;
};

Verdict<TypeResult> type_of(const TypeContext& ctx, const QualifiedSignature& sig,
                            const ExprPtr& e, const CheckOptions& opts = {});
Verdict<PseudoType> pseudo_type_of(const TypeContext& ctx, const QualifiedSignature& sig,
                                   const ExprPtr& e, const PseudoType& expected,
                                   const CheckOptions& opts = {});

/// Closed-world check that `usage` respects the bindings of `ctx`: every li
/// binding consumed, hi bindings never consumed, un bindings never hidden.
/// Throws TypeError.
void check_top_usage(const TypeContext& ctx, const UsageReport& usage, Span where = {});

// ---------------------------------------------------------------------------
// Explicit derivations

struct Derivation {
  std::string rule;
  TypeContext context;
  ExprPtr expr;
  PseudoType type;
  std::vector<Derivation> premises;
  std::vector<std::vector<TypeContext::Binding>> binders;
  MergeRule merge = MergeRule::PseudoSplit;
  std::size_t branch_from = 0;
};

/// Assigns each node of a checked tree its explicit context, starting from
/// the root context.
Derivation reconstruct(const TypeContext& root, const Typed& t);

/// Re-checks every node: the premises' contexts (minus their binders) form
/// a split or pseudosplit of the node's context, and the rule's side
/// conditions hold. Returns a description of the first failing node.
std::optional<std::string> validate(const Derivation& d, const QualifiedSignature& sig,
                                    const CheckOptions& opts = {});

std::string to_string(const Derivation& d, int indent = 0);

}  // namespace wlt
