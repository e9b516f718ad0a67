#include "wlt/corpus.hpp"

#include <stdexcept>

namespace wlt {

namespace detail {
std::string_view corpus_source(const std::string& file);
}

std::string_view to_string(Variant v) {
  return v == Variant::WeakLinear ? "weak-linear" : "unrestricted";
}

std::optional<Variant> parse_variant(std::string_view s) {
  if (s == "weak-linear" || s == "li") return Variant::WeakLinear;
  if (s == "unrestricted" || s == "un") return Variant::Unrestricted;
  return std::nullopt;
}

std::string CorpusEntry::file_name() const {
  return name + "." + std::string(to_string(variant)) + ".wlt";
}

namespace {

std::vector<CorpusEntry> build() {
  const std::vector<std::int64_t> powers = {4, 8, 16, 32};
  const std::vector<std::int64_t> small = {4, 6, 8, 10};
  struct Row {
    const char* name;
    int li_degree;
    int un_degree;
    std::int64_t min_n;
  };
  const Row rows[] = {{"fib", 0, 1, 0}, {"mapa", 0, 2, 1}, {"map", 0, 1, 0}, {"sort", 1, 3, 1}};
  std::vector<CorpusEntry> out;
  for (const Row& r : rows)
    for (Variant v : {Variant::WeakLinear, Variant::Unrestricted}) {
      CorpusEntry e{r.name,
                    v,
                    {},
                    v == Variant::WeakLinear ? r.li_degree : r.un_degree,
                    std::string(r.name) == "sort" ? small : powers,
                    r.min_n};
      e.source = detail::corpus_source(e.file_name());
      if (e.source.empty()) throw std::logic_error("corpus file " + e.file_name() + " not embedded");
      out.push_back(std::move(e));
    }
  return out;
}

}  // namespace

const std::vector<CorpusEntry>& corpus() {
  static const std::vector<CorpusEntry> entries = build();
  return entries;
}

std::vector<std::string> corpus_names() { return {"fib", "mapa", "map", "sort"}; }

const CorpusEntry& corpus_entry(std::string_view name, Variant variant) {
  for (const auto& e : corpus())
    if (e.name == name && e.variant == variant) return e;
  throw std::invalid_argument("unknown corpus program '" + std::string(name) + "'");
}

std::string_view counterexample_source() {
  return detail::corpus_source("counterexample.wlt");
}

ProgramFile get_program(std::string_view name, Variant variant, std::int64_t n) {
  const CorpusEntry& e = corpus_entry(name, variant);
  if (n < e.min_n)
    throw std::invalid_argument(e.name + " needs n >= " + std::to_string(e.min_n));
  return parse_program(e.source, {{"n", n}});
}

}  // namespace wlt
