#pragma once

// Concrete syntax for programs, signatures and initial stores.
//
// A program file has four sections, each introduced by a header line at
// column 0: `signature:`, `store:`, `main:` and `params:`. Signature entries
// are one per line:
//
//     name : (pq B, ...) -> q B = primitive-key
//
// Store entries start at column 0 and may continue on indented lines:
//
//     name [: type] = expression
//
// A store entry whose expression is not a value is a setup entry: it is
// evaluated before `main`, in order, and its result is bound to the name.
// Parameters (`n = 4`) may appear after a qualifier wherever an integer
// constant is expected, optionally offset (`li n-1`), and as array range
// bounds (`li {0 .. n-1}`, inclusive, stepping towards the upper bound).

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "wlt/syntax.hpp"

namespace wlt {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, Span where, std::vector<std::string> expected = {});

  Span where;
  std::string detail;
  std::vector<std::string> expected;
};

struct StoreDecl {
  std::string name;
  std::optional<Type> declared;
  ExprPtr value;
};

struct ProgramFile {
  QualifiedSignature signature;
  std::vector<StoreDecl> store;
  ExprPtr main;
  std::vector<std::pair<std::string, std::int64_t>> params;

  const StoreDecl* find(std::string_view name) const;
};

using ParamOverrides = std::map<std::string, std::int64_t>;

/// Throws ParseError. Overrides replace the values declared in `params:`;
/// an override for an undeclared parameter is an error.
ProgramFile parse_program(std::string_view text, const ParamOverrides& overrides = {});

/// Parses a lone expression against a signature, with `scope` naming the
/// variables that may occur free.
ExprPtr parse_expression(std::string_view text, const QualifiedSignature& sig,
                         const std::vector<std::string>& scope = {});
Type parse_type(std::string_view text);

std::string print_program(const ProgramFile& p);
std::string print_signature_entry(const SignatureEntry& e);

bool structurally_equal(const ProgramFile& a, const ProgramFile& b);

/// True for names of the form v<digits>, which are reserved for machine cells.
bool is_reserved_name(std::string_view name);

}  // namespace wlt
