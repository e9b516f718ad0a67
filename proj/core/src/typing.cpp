#include "wlt/typing.hpp"

#include <algorithm>
#include <nlohmann/json.hpp>
#include <sstream>

namespace wlt {

// ---------------------------------------------------------------------------
// Relations

namespace {

bool is_li(const PseudoType& t) { return t.qual == PseudoQualifier::Li; }
bool is_li_base(const PseudoType& t) { return is_li(t) && t.pre->is_base(); }

// Position of each part entry in `whole`; nullopt if a part is not an
// order-preserving sub-context of `whole` with identical pseudotypes.
std::optional<std::vector<std::vector<int>>> occurrences(const std::vector<TypeContext>& parts,
                                                         const TypeContext& whole) {
  const auto& wb = whole.bindings();
  // occ[i][j]: pseudoqualifier of whole entry i in part j, or -1 if absent
  std::vector<std::vector<int>> occ(wb.size(), std::vector<int>(parts.size(), -1));
  for (std::size_t j = 0; j < parts.size(); ++j) {
    std::size_t cursor = 0;
    for (const auto& [x, t] : parts[j].bindings()) {
      while (cursor < wb.size() && wb[cursor].first != x) ++cursor;
      if (cursor == wb.size()) return std::nullopt;
      const PseudoType& w = wb[cursor].second;
      bool same = t == w;
      bool hidden_of_li = t.is_hidden() && is_li_base(w) && *t.pre == *w.pre;
      if (!same && !hidden_of_li) return std::nullopt;
      occ[cursor][j] = static_cast<int>(t.qual);
      ++cursor;
    }
  }
  return occ;
}

constexpr int kLi = static_cast<int>(PseudoQualifier::Li);
constexpr int kHi = static_cast<int>(PseudoQualifier::Hi);

bool relation(const std::vector<TypeContext>& parts, const TypeContext& whole, bool pseudo) {
  if (parts.empty()) return ctx_is_q(Qualifier::Un, whole);
  auto occ = occurrences(parts, whole);
  if (!occ) return false;
  const auto& wb = whole.bindings();
  for (std::size_t i = 0; i < wb.size(); ++i) {
    const auto& row = (*occ)[i];
    const PseudoType& w = wb[i].second;
    if (!is_li(w)) {
      // un and hi entries duplicate into every part
      if (std::any_of(row.begin(), row.end(), [](int q) { return q < 0; })) return false;
      continue;
    }
    auto lin = std::count(row.begin(), row.end(), kLi);
    if (lin != 1) return false;
    std::size_t j = std::find(row.begin(), row.end(), kLi) - row.begin();
    bool after_absent = std::all_of(row.begin() + j + 1, row.end(), [](int q) { return q < 0; });
    if (!after_absent) return false;
    bool before_absent = std::all_of(row.begin(), row.begin() + j, [](int q) { return q < 0; });
    bool before_hidden = std::all_of(row.begin(), row.begin() + j, [](int q) { return q == kHi; });
    if (before_absent) continue;
    if (!(pseudo && w.pre->is_base() && before_hidden)) return false;
  }
  return true;
}

}  // namespace

bool split_check(const std::vector<TypeContext>& parts, const TypeContext& whole) {
  return relation(parts, whole, false);
}

bool pseudosplit_check(const std::vector<TypeContext>& parts, const TypeContext& whole) {
  return relation(parts, whole, true);
}

// ---------------------------------------------------------------------------
// Diagnostics

std::string Diagnostic::text() const {
  std::ostringstream out;
  out << span.line << ":" << span.column << ": [" << rule << "] " << message;
  return out.str();
}

std::string Diagnostic::record() const {
  nlohmann::json j{{"rule", rule},
                   {"variable", variable},
                   {"line", span.line},
                   {"column", span.column},
                   {"message", message}};
  return j.dump();
}

TypeError::TypeError(Diagnostic d) : std::runtime_error(d.text()), diagnostic(std::move(d)) {}

namespace {

[[noreturn]] void fail(std::string rule, std::string variable, Span span, std::string message) {
  throw TypeError(Diagnostic{std::move(rule), std::move(variable), span, std::move(message)});
}

}  // namespace

// ---------------------------------------------------------------------------
// Usage reports

std::string_view to_string(Usage u) {
  switch (u) {
    case Usage::Unused:
      return "unused";
    case Usage::Unrestricted:
      return "unrestricted";
    case Usage::Hidden:
      return "hidden-only";
    case Usage::Linear:
      return "linear";
  }
  return "?";
}

const VarUse* UsageReport::find(const std::string& x) const {
  for (const auto& [n, u] : entries_)
    if (n == x) return &u;
  return nullptr;
}

Usage UsageReport::get(const std::string& x) const {
  const VarUse* u = find(x);
  return u ? u->usage : Usage::Unused;
}

void UsageReport::set(const std::string& x, VarUse u) {
  for (auto& [n, v] : entries_)
    if (n == x) {
      v = u;
      return;
    }
  entries_.emplace_back(x, u);
}

void UsageReport::erase(const std::string& x) {
  entries_.erase(std::remove_if(entries_.begin(), entries_.end(),
                                [&](const auto& p) { return p.first == x; }),
                 entries_.end());
}

UsageReport merge_usages_or_throw(MergeRule rule, const std::vector<UsageReport>& ordered,
                                  Span where) {
  std::vector<std::string> order;
  for (const auto& r : ordered)
    for (const auto& [x, u] : r.entries())
      if (u.usage != Usage::Unused && std::find(order.begin(), order.end(), x) == order.end())
        order.push_back(x);

  UsageReport out;
  for (const auto& x : order) {
    std::vector<Usage> row;
    for (const auto& r : ordered) row.push_back(r.get(x));
    auto count = [&](Usage u) { return std::count(row.begin(), row.end(), u); };
    auto first = [&](Usage u) {
      return static_cast<std::size_t>(std::find(row.begin(), row.end(), u) - row.begin());
    };
    auto last = [&](Usage u) {
      std::size_t k = row.size();
      for (std::size_t i = 0; i < row.size(); ++i)
        if (row[i] == u) k = i;
      return k;
    };
    long lin = count(Usage::Linear);
    long hid = count(Usage::Hidden);
    long unr = count(Usage::Unrestricted);
    if (unr > 0 && (lin > 0 || hid > 0))
      fail("merge", x, where, "variable '" + x + "' used both as unrestricted and as linear");

    if (rule == MergeRule::Branch) {
      if (lin > 0 && lin != static_cast<long>(row.size()))
        fail("branch", x, where,
             "linear variable '" + x + "' is consumed in one branch but not in the other");
      if (lin > 0)
        out.set(x, {Usage::Linear, std::nullopt});
      else if (hid > 0)
        out.set(x, {Usage::Hidden, std::nullopt});
      else
        out.set(x, {Usage::Unrestricted, std::nullopt});
      continue;
    }

    if (lin > 1)
      fail(rule == MergeRule::Split ? "split" : "pseudosplit", x, where,
           "linear variable '" + x + "' is consumed more than once");
    if (lin == 1 && hid > 0) {
      if (rule == MergeRule::Split)
        fail("split", x, where,
             "linear variable '" + x +
                 "' is read hidden and consumed by arguments of the same operator; only a "
                 "pseudosplit may merge hidden and linear uses");
      if (last(Usage::Hidden) > first(Usage::Linear))
        fail("pseudosplit", x, where,
             "linear variable '" + x + "' is read hidden after it has been consumed");
    }
    if (lin == 1)
      out.set(x, {Usage::Linear, first(Usage::Linear)});
    else if (hid > 0)
      out.set(x, {Usage::Hidden, std::nullopt});
    else
      out.set(x, {Usage::Unrestricted, std::nullopt});
  }
  return out;
}

Verdict<UsageReport> merge_usages(MergeRule rule, const std::vector<UsageReport>& ordered) {
  try {
    return merge_usages_or_throw(rule, ordered);
  } catch (const TypeError& e) {
    return e.diagnostic;
  }
}

void check_top_usage(const TypeContext& ctx, const UsageReport& usage, Span where) {
  for (const auto& [x, t] : ctx.bindings()) {
    Usage u = usage.get(x);
    if (t.qual == PseudoQualifier::Li && u != Usage::Linear) {
      if (u == Usage::Hidden)
        fail("unused-linear", x, where,
             "linear variable '" + x + "' is only read hidden and never consumed");
      fail("unused-linear", x, where, "linear variable '" + x + "' is never consumed");
    }
    if (t.qual == PseudoQualifier::Hi && u == Usage::Linear)
      fail("hidden", x, where, "hidden variable '" + x + "' cannot be consumed");
  }
  for (const auto& [x, u] : usage.entries())
    if (u.usage != Usage::Unused && !ctx.contains(x))
      fail("var", x, where, "variable '" + x + "' is not bound");
}

}  // namespace wlt
