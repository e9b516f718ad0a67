#pragma once

// The four benchmark programs (fib, mapa, map, sort), each in a weak-linear
// and an unrestricted variant. Sources live in corpus/ and are embedded at
// build time.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wlt/surface.hpp"

namespace wlt {

enum class Variant : std::uint8_t { WeakLinear, Unrestricted };

std::string_view to_string(Variant v);
/// Accepts "weak-linear"/"li" and "unrestricted"/"un".
std::optional<Variant> parse_variant(std::string_view s);

struct CorpusEntry {
  std::string name;
  Variant variant;
  std::string_view source;
  /// Growth degree of the final balance in n.
  int expected_degree;
  std::vector<std::int64_t> default_ns;
  std::int64_t min_n;

  /// File name under corpus/, e.g. "fib.weak-linear.wlt".
  std::string file_name() const;
};

const std::vector<CorpusEntry>& corpus();
std::vector<std::string> corpus_names();

/// Throws std::invalid_argument for an unknown name.
const CorpusEntry& corpus_entry(std::string_view name, Variant variant);

/// The entry's program with parameter n. Throws std::invalid_argument for
/// an unknown name or n below the entry's minimum.
ProgramFile get_program(std::string_view name, Variant variant, std::int64_t n);

/// Source of corpus/counterexample.wlt: x + x * y over x = li 3, y = li 1
/// with + : (hi int, li int) -> li int and * : (li int, li int) -> li int.
std::string_view counterexample_source();

}  // namespace wlt
