#pragma once

// Abstract syntax of the weak-linear language: qualifiers, pretypes, types,
// pseudotypes, contexts, operator signatures and expressions.

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace wlt {

enum class Qualifier : std::uint8_t { Li, Un };
enum class PseudoQualifier : std::uint8_t { Li, Un, Hi };

constexpr PseudoQualifier widen(Qualifier q) {
  return q == Qualifier::Li ? PseudoQualifier::Li : PseudoQualifier::Un;
}
std::optional<Qualifier> narrow(PseudoQualifier q);

std::string_view to_string(Qualifier q);
std::string_view to_string(PseudoQualifier q);

/// The preorder generated by li <= un. hi is related only to itself.
bool qualifier_leq(PseudoQualifier a, PseudoQualifier b);

struct Span {
  int line = 0;
  int column = 0;
};

class Pretype;
using PretypePtr = std::shared_ptr<const Pretype>;

struct Type {
  Qualifier qual = Qualifier::Un;
  PretypePtr pre;
};

/// A pretype node. List pretypes with no element type stand for the element
/// type of a `q []` literal that has not been fixed yet; they unify with any
/// list pretype.
class Pretype {
 public:
  enum class Kind : std::uint8_t { Base, Tuple, Arrow, List };

  static PretypePtr base(std::string name);
  static PretypePtr tuple(std::vector<Type> items);
  static PretypePtr arrow(Type from, Type to);
  static PretypePtr list(std::optional<Type> element);

  Kind kind() const { return kind_; }
  const std::string& base_name() const { return name_; }
  const std::vector<Type>& items() const { return items_; }
  const Type& from() const { return items_.at(0); }
  const Type& to() const { return items_.at(1); }
  bool has_element() const { return kind_ == Kind::List && !items_.empty(); }
  const Type& element() const { return items_.at(0); }

  bool is_base() const { return kind_ == Kind::Base; }

 private:
  Pretype(Kind kind, std::string name, std::vector<Type> items)
      : kind_(kind), name_(std::move(name)), items_(std::move(items)) {}

  Kind kind_;
  std::string name_;
  std::vector<Type> items_;
};

bool operator==(const Pretype& a, const Pretype& b);
bool operator==(const Type& a, const Type& b);
inline bool operator!=(const Type& a, const Type& b) { return !(a == b); }

/// Structural unification where an element-less list matches any list.
/// Returns the more specific of the two, or nullopt on mismatch.
std::optional<Type> unify(const Type& a, const Type& b);
std::optional<PretypePtr> unify(const PretypePtr& a, const PretypePtr& b);

/// True when the type mentions an unresolved list element.
bool has_unknown(const Type& t);

namespace types {
PretypePtr int_();
PretypePtr bool_();
PretypePtr array();
inline Type li(PretypePtr p) { return Type{Qualifier::Li, std::move(p)}; }
inline Type un(PretypePtr p) { return Type{Qualifier::Un, std::move(p)}; }
}  // namespace types

/// Either a proper type or `hi B` for a base pretype B.
struct PseudoType {
  PseudoQualifier qual = PseudoQualifier::Un;
  PretypePtr pre;

  static PseudoType proper(const Type& t) { return {widen(t.qual), t.pre}; }
  /// Throws std::invalid_argument unless `base` is a base pretype.
  static PseudoType hidden(PretypePtr base);

  bool is_hidden() const { return qual == PseudoQualifier::Hi; }
  /// Precondition: !is_hidden().
  Type as_type() const;
};

bool operator==(const PseudoType& a, const PseudoType& b);
inline bool operator!=(const PseudoType& a, const PseudoType& b) { return !(a == b); }

/// q(T): T = q' P with q <= q'. Hidden pseudotypes satisfy every q.
bool type_is_q(Qualifier q, const PseudoType& t);
inline bool type_is_q(Qualifier q, const Type& t) {
  return type_is_q(q, PseudoType::proper(t));
}

class DuplicateVariable : public std::invalid_argument {
 public:
  explicit DuplicateVariable(const std::string& var)
      : std::invalid_argument("variable '" + var + "' appears twice in a context"),
        variable(var) {}
  std::string variable;
};

/// Ordered bindings; a variable occurs at most once.
class TypeContext {
 public:
  using Binding = std::pair<std::string, PseudoType>;

  TypeContext() = default;
  /// Throws DuplicateVariable.
  TypeContext(std::initializer_list<Binding> bindings);
  explicit TypeContext(std::vector<Binding> bindings);

  /// Throws DuplicateVariable.
  void push(std::string var, PseudoType t);
  void erase(const std::string& var);

  const PseudoType* find(const std::string& var) const;
  bool contains(const std::string& var) const { return find(var) != nullptr; }

  const std::vector<Binding>& bindings() const { return bindings_; }
  std::size_t size() const { return bindings_.size(); }
  bool empty() const { return bindings_.empty(); }

  friend bool operator==(const TypeContext& a, const TypeContext& b) {
    return a.bindings_ == b.bindings_;
  }

 private:
  std::vector<Binding> bindings_;
};

bool ctx_is_q(Qualifier q, const TypeContext& ctx);

struct OperatorType {
  std::vector<PseudoType> inputs;
  Type output;
};
bool operator==(const OperatorType& a, const OperatorType& b);

struct SignatureEntry {
  std::string name;
  OperatorType type;
  std::string primitive;
};

class QualifiedSignature {
 public:
  QualifiedSignature() = default;
  explicit QualifiedSignature(std::vector<SignatureEntry> entries);

  /// Throws std::invalid_argument on a hidden output or a hidden non-base input.
  void add(SignatureEntry entry);

  const std::vector<SignatureEntry>& entries() const { return entries_; }
  /// Indices of entries named `name` with the given arity, in order.
  std::vector<std::size_t> candidates(std::string_view name, std::size_t arity) const;
  bool has_operator(std::string_view name) const;

 private:
  std::vector<SignatureEntry> entries_;
};

// ---------------------------------------------------------------------------
// Expressions

/// Base constants: integers, booleans and integer arrays.
using Constant = std::variant<std::int64_t, bool, std::vector<std::int64_t>>;
PretypePtr constant_pretype(const Constant& c);
std::string constant_text(const Constant& c);

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

namespace node {
struct Var {
  std::string name;
};
/// Operator application. Literal constants `q c` are nullary operators with a
/// literal payload and the type `() -> q B`. `type`/`entry` are filled in by
/// elaboration; `entry` is the index into the signature when one was used.
struct Op {
  std::string name;
  std::optional<std::size_t> entry;
  std::optional<OperatorType> type;
  std::optional<Constant> literal;
  std::vector<ExprPtr> args;
};
struct Tuple {
  Qualifier qual;
  std::vector<ExprPtr> items;
};
struct App {
  ExprPtr fn;
  ExprPtr arg;
};
struct Lambda {
  Qualifier qual;
  std::string param;
  Type param_type;
  ExprPtr body;
};
struct Split {
  ExprPtr scrutinee;
  std::vector<std::string> pattern;
  ExprPtr body;
};
struct If {
  ExprPtr cond;
  ExprPtr then_branch;
  ExprPtr else_branch;
};
struct Let {
  std::string name;
  std::optional<Type> annotation;
  ExprPtr bound;
  ExprPtr body;
};
/// `element` is filled in by the checker once the list type is known; it is
/// not part of the concrete syntax and is ignored by equality.
struct Nil {
  Qualifier qual;
  std::optional<Type> element = std::nullopt;
};
struct Cons {
  Qualifier qual;
  ExprPtr head;
  ExprPtr tail;
};
struct Case {
  ExprPtr scrutinee;
  ExprPtr nil_branch;
  std::string head;
  std::string tail;
  ExprPtr cons_branch;
};
}  // namespace node

struct Expr {
  using Node = std::variant<node::Var, node::Op, node::Tuple, node::App, node::Lambda,
                            node::Split, node::If, node::Let, node::Nil, node::Cons,
                            node::Case>;
  Node node;
  Span span;

  template <class T>
  const T* as() const {
    return std::get_if<T>(&node);
  }
  template <class T>
  bool is() const {
    return std::holds_alternative<T>(node);
  }
};

ExprPtr make(Expr::Node n, Span span = {});
ExprPtr var(std::string name, Span span = {});
ExprPtr literal(Qualifier q, Constant c, Span span = {});
ExprPtr op(std::string name, std::vector<ExprPtr> args, Span span = {});
ExprPtr op(std::string name, std::size_t entry, OperatorType t, std::vector<ExprPtr> args,
           Span span = {});

/// Structural equality ignoring spans. Binder names must match exactly.
bool operator==(const Expr& a, const Expr& b);
bool equal(const ExprPtr& a, const ExprPtr& b);
/// Equality up to consistent renaming of bound variables.
bool alpha_equal(const ExprPtr& a, const ExprPtr& b);

/// Free occurrences in left-to-right evaluation order, duplicates kept.
std::vector<std::string> free_vars(const ExprPtr& e);
bool occurs_free(const std::string& x, const ExprPtr& e);

/// Variable-for-variable substitution; identity outside its domain.
using Substitution = std::map<std::string, std::string>;

/// Capture-avoiding substitution. Binders that would capture a range variable
/// are renamed to `name'k` with the smallest k not already in use.
ExprPtr apply_subst(const Substitution& d, const ExprPtr& e);

/// Every variable name appearing anywhere in e, bound or free.
void collect_names(const ExprPtr& e, std::vector<std::string>& out);

std::size_t expr_depth(const ExprPtr& e);
std::size_t expr_size(const ExprPtr& e);

// Printing in the concrete syntax accepted by the parser.
std::string to_string(const PretypePtr& p);
std::string to_string(const Type& t);
std::string to_string(const PseudoType& t);
std::string to_string(const OperatorType& t);
std::string to_string(const TypeContext& ctx);
std::string to_string(const ExprPtr& e);

}  // namespace wlt
